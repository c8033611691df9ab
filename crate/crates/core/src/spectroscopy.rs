//! Probe-detuning sweeps and the cavity observables derived from them.
//!
//! Transmission `T` is the steady-state `|g1⟩` population, the phase obeys
//! `tan φ = Re ρ10 / Im ρ10`, and the theoretical dispersion is `Re ρ10`,
//! where `ρ10 = ⟨g1|ρ|g0⟩`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lindblad::{steady_state, Level, SystemParams};
use crate::scalar::{angular_to_mhz, c, lit, mhz_to_angular, to_f64, Cplx, Real};

/// Smallest allowed sweep.
pub const MIN_SWEEP_POINTS: usize = 16;
/// Default number of detuning samples.
pub const DEFAULT_SWEEP_POINTS: usize = 801;
/// Phase noise (degrees) that corresponds to a 4% noise fraction.
pub const PHASE_NOISE_DEG_AT_4PCT: f64 = 7.0;

/// Uniform detuning grid plus the model it is evaluated on. The `delta` of
/// `base_params` is ignored.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepSpec<T: Real> {
    pub delta_min: T,
    pub delta_max: T,
    pub n_points: usize,
    pub base_params: SystemParams<T>,
}

impl<T: Real> SweepSpec<T> {
    pub fn new(delta_min: T, delta_max: T, n_points: usize, base_params: SystemParams<T>) -> Result<Self> {
        let spec = Self {
            delta_min,
            delta_max,
            n_points,
            base_params,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Symmetric grid spanning `±max(2π·15 MHz, 2Ω_c + 8κ)` with 801 points.
    pub fn default_for(base_params: SystemParams<T>) -> Self {
        let half_span = default_half_span(&base_params);
        Self {
            delta_min: -half_span,
            delta_max: half_span,
            n_points: DEFAULT_SWEEP_POINTS,
            base_params,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta_min.is_finite() && self.delta_max.is_finite()) {
            return Err(Error::validation("delta_min/delta_max", "must be finite"));
        }
        if !(self.delta_min < self.delta_max) {
            return Err(Error::validation("delta_min", "must be below delta_max"));
        }
        if self.n_points < MIN_SWEEP_POINTS {
            return Err(Error::validation(
                "n_points",
                format!("need at least {MIN_SWEEP_POINTS}, got {}", self.n_points),
            ));
        }
        self.base_params.validate()
    }

    pub fn step(&self) -> T {
        (self.delta_max - self.delta_min) / T::from_usize(self.n_points - 1).unwrap()
    }

    pub fn grid(&self) -> Vec<T> {
        let step = self.step();
        (0..self.n_points)
            .map(|k| {
                if k + 1 == self.n_points {
                    self.delta_max
                } else {
                    self.delta_min + step * T::from_usize(k).unwrap()
                }
            })
            .collect()
    }
}

/// Half-width of the default detuning window.
pub fn default_half_span<T: Real>(params: &SystemParams<T>) -> T {
    mhz_to_angular(lit::<T>(15.0))
        .max(lit::<T>(2.0) * params.omega_c + lit::<T>(8.0) * params.kappa)
}

/// One detuning point of a spectrum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectrumSample<T: Real> {
    /// Probe detuning, rad/µs.
    pub delta: T,
    /// Transmission; equals `pop_g1` until normalized.
    pub transmission: T,
    /// Phase in radians, principal value.
    pub phi: T,
    pub chi: T,
    pub rho10: Cplx<T>,
    pub pop_g1: T,
    pub pop_f0: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumTrace<T: Real> {
    /// Model the sweep was run on (`delta` not meaningful).
    pub params: SystemParams<T>,
    pub samples: Vec<SpectrumSample<T>>,
}

impl<T: Real> SpectrumTrace<T> {
    pub fn deltas(&self) -> Vec<T> {
        self.samples.iter().map(|s| s.delta).collect()
    }

    pub fn transmission(&self) -> Vec<T> {
        self.samples.iter().map(|s| s.transmission).collect()
    }

    pub fn chi(&self) -> Vec<T> {
        self.samples.iter().map(|s| s.chi).collect()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Phase with `tan φ = Re ρ10 / Im ρ10`, offset by π so that the undriven
/// resonance (where `ρ10` is negative imaginary) reads zero.
pub fn phase_of<T: Real>(rho10: Cplx<T>) -> T {
    wrap_phase(rho10.re.atan2(rho10.im) - T::PI())
}

/// Maps an angle into `(−π, π]`.
pub fn wrap_phase<T: Real>(x: T) -> T {
    let tau = T::TAU();
    let mut a = x % tau;
    if a > T::PI() {
        a = a - tau;
    } else if a <= -T::PI() {
        a = a + tau;
    }
    a
}

fn sample_at<T: Real>(params: &SystemParams<T>, delta: T) -> Result<SpectrumSample<T>> {
    let p = params.with_delta(delta);
    let rho = p
        .liouvillian()
        .and_then(|l| steady_state(&l))
        .map_err(|e| Error::AtDetuning {
            delta_mhz: to_f64(angular_to_mhz(delta)),
            source: Box::new(e),
        })?;
    let rho10 = rho.coherence_g1_g0();
    let pop_g1 = rho.population(Level::G1);
    Ok(SpectrumSample {
        delta,
        transmission: pop_g1.abs(),
        phi: phase_of(rho10),
        chi: rho10.re,
        rho10,
        pop_g1,
        pop_f0: rho.population(Level::F0),
    })
}

/// Steady-state spectrum over the sweep grid. Grid points are solved in
/// parallel and assembled in grid order.
pub fn sweep_spectrum<T: Real>(spec: &SweepSpec<T>) -> Result<SpectrumTrace<T>> {
    spec.validate()?;
    let samples = spec
        .grid()
        .into_par_iter()
        .map(|delta| sample_at(&spec.base_params, delta))
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectrumTrace {
        params: spec.base_params,
        samples,
    })
}

/// Rescales `T` by the peak `|g1⟩` population of an undriven reference on the
/// same grid. Idempotent: it always starts from the raw populations.
pub fn normalize_spectrum<T: Real>(
    trace: &SpectrumTrace<T>,
    reference: &SpectrumTrace<T>,
) -> Result<SpectrumTrace<T>> {
    if reference.params.omega_c != T::zero() {
        return Err(Error::validation("reference", "must be computed with omega_c = 0"));
    }
    if trace.len() != reference.len() {
        return Err(Error::validation("reference", "grid length differs from trace"));
    }
    let scale = trace
        .samples
        .iter()
        .fold(T::one(), |m, s| m.max(s.delta.abs()));
    for (a, b) in trace.samples.iter().zip(&reference.samples) {
        if (a.delta - b.delta).abs() > lit::<T>(1e-12) * scale {
            return Err(Error::validation("reference", "grid differs from trace"));
        }
    }
    let peak = reference
        .samples
        .iter()
        .fold(T::zero(), |m, s| m.max(s.pop_g1.abs()));
    if !(peak > T::zero()) {
        return Err(Error::UndrivenReference);
    }
    let mut out = trace.clone();
    for s in &mut out.samples {
        s.transmission = s.pop_g1.abs() / peak;
    }
    Ok(out)
}

/// Linear-response `ρ10` for a vanishing probe:
/// `(Ω_p/2)(δ + iγ/2) / [(δ + iκ/2)(δ + iγ/2) − Ω_c²/4]`.
pub fn weak_probe_coherence<T: Real>(params: &SystemParams<T>) -> Cplx<T> {
    let half = lit::<T>(0.5);
    let d = params.delta;
    let upper = c(d, half * params.gamma);
    let cavity = c(d, half * params.kappa);
    let coupler = c(params.omega_c * params.omega_c * lit(0.25), T::zero());
    upper.scale(half * params.omega_p) / (cavity * upper - coupler)
}

/// Emulates measurement noise: multiplicative uniform noise of relative
/// size `fraction` on `T`, additive uniform phase noise of
/// `±(fraction/0.04)·7°`, then `χ = T·tan φ`.
///
/// Samples are visited in grid order from a ChaCha8 stream seeded with `seed`.
pub fn inject_noise<T: Real>(
    trace: &SpectrumTrace<T>,
    fraction: T,
    seed: u64,
) -> Result<SpectrumTrace<T>> {
    if !(fraction >= T::zero()) || !fraction.is_finite() {
        return Err(Error::validation("fraction", "must be finite and non-negative"));
    }
    if fraction == T::zero() {
        return Ok(trace.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phase_amp = (fraction / lit(0.04)) * lit::<T>(PHASE_NOISE_DEG_AT_4PCT).to_radians();
    let guard = lit::<T>(1e-12);
    let mut out = trace.clone();
    for s in &mut out.samples {
        let u_t: T = lit(rng.gen_range(-1.0..=1.0));
        let u_phi: T = lit(rng.gen_range(-1.0..=1.0));
        s.transmission = s.transmission * (T::one() + fraction * u_t);
        s.phi = wrap_phase(s.phi + phase_amp * u_phi);
        let (sin, cos) = s.phi.sin_cos();
        s.chi = if cos.abs() < guard {
            // tan φ diverges at a dispersion zero crossing; fall back to the
            // theory value rescaled like T.
            let mag = s.rho10.norm();
            if mag > T::zero() {
                s.rho10.re * s.transmission / mag
            } else {
                T::zero()
            }
        } else {
            s.transmission * sin / cos
        };
    }
    Ok(out)
}
