//! Photon-number calibration: ac-Stark line and Poisson-weighted
//! number-splitting spectra.

use serde::{Deserialize, Serialize};

use crate::analysis::{levenberg_marquardt, LmOptions};
use crate::error::{Error, Result};
use crate::scalar::{lit, mhz_to_angular, Real};

/// Cumulative Poisson mass retained by [`number_splitting_spectrum`].
pub const POISSON_MASS_TARGET: f64 = 1.0 - 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationParams<T: Real> {
    /// Dispersive shift (rad/µs), typically negative.
    pub chi_shift: T,
    /// Mean probe photon number.
    pub nbar: T,
    /// Mean coupler photon number.
    pub nbar_c: T,
    /// ac-Stark shift (rad/µs).
    pub delta_ac: T,
    /// Qubit spectroscopic linewidth (rad/µs).
    pub gamma_q: T,
}

impl<T: Real> CalibrationParams<T> {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("chi_shift", self.chi_shift),
            ("nbar", self.nbar),
            ("nbar_c", self.nbar_c),
            ("delta_ac", self.delta_ac),
            ("gamma_q", self.gamma_q),
        ] {
            if !v.is_finite() {
                return Err(Error::validation(name, "must be finite"));
            }
        }
        if self.nbar < T::zero() {
            return Err(Error::validation("nbar", "must be non-negative"));
        }
        if self.nbar_c < T::zero() {
            return Err(Error::validation("nbar_c", "must be non-negative"));
        }
        Ok(())
    }

    /// Measured device: χ_shift/2π = −11.2 MHz, n̄ = 0.16, γ_q/2π = 1 MHz.
    pub fn measured_device() -> Self {
        Self {
            chi_shift: mhz_to_angular(lit(-11.2)),
            nbar: lit(0.16),
            nbar_c: T::zero(),
            delta_ac: T::zero(),
            gamma_q: mhz_to_angular(lit(1.0)),
        }
    }
}

/// Transmon and cavity parameters of the measured device. Informational only.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviceMetadata {
    /// GHz.
    pub e_j_over_h: f64,
    /// GHz.
    pub e_c_over_h: f64,
    /// rad/ns.
    pub omega_cav: f64,
    pub omega_g1g0: f64,
    pub omega_e0g0: f64,
    pub omega_f0g0_half: f64,
    /// rad/µs.
    pub g_coupling: f64,
}

impl Default for DeviceMetadata {
    fn default() -> Self {
        let tau = std::f64::consts::TAU;
        Self {
            e_j_over_h: 42.418,
            e_c_over_h: 0.259,
            omega_cav: tau * 8.121,
            omega_g1g0: tau * 8.0870,
            omega_e0g0: tau * 9.1160,
            omega_f0g0_half: tau * 8.9865,
            g_coupling: tau * 182.0,
        }
    }
}

/// `e^{−n̄} n̄ⁿ / n!`, evaluated in log space for `n > 20`.
pub fn poisson_pmf<T: Real>(nbar: T, n: u32) -> T {
    if nbar < T::zero() || !nbar.is_finite() {
        return T::nan();
    }
    if nbar == T::zero() {
        return if n == 0 { T::one() } else { T::zero() };
    }
    if n <= 20 {
        let mut term = (-nbar).exp();
        for k in 1..=n {
            term = term * nbar / T::from_u32(k).unwrap();
        }
        term
    } else {
        let ln_fact = (2..=n).fold(T::zero(), |s, k| s + T::from_u32(k).unwrap().ln());
        (T::from_u32(n).unwrap() * nbar.ln() - nbar - ln_fact).exp()
    }
}

/// Coupler photon number from an ac-Stark shift, `Δ_ac / (2χ_shift)`.
pub fn stark_to_photons<T: Real>(delta_ac: T, chi_shift: T) -> Result<T> {
    if chi_shift == T::zero() || !chi_shift.is_finite() {
        return Err(Error::validation("chi_shift", "must be finite and non-zero"));
    }
    Ok(delta_ac / (lit::<T>(2.0) * chi_shift))
}

/// ac-Stark shift `2χ_shift·n̄_c`.
pub fn photons_to_stark<T: Real>(nbar_c: T, chi_shift: T) -> T {
    lit::<T>(2.0) * chi_shift * nbar_c
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StarkFit<T: Real> {
    pub chi_shift: T,
    pub residual_rms: T,
}

/// Least-squares line through the origin of `(n̄_c, Δ_ac)` points.
pub fn fit_stark_line<T: Real>(points: &[(T, T)]) -> Result<StarkFit<T>> {
    if points.len() < 2 {
        return Err(Error::validation("points", "need at least two points"));
    }
    if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(Error::validation("points", "must be finite"));
    }
    let sxx = points.iter().fold(T::zero(), |s, (x, _)| s + *x * *x);
    if sxx == T::zero() {
        return Err(Error::validation("points", "all photon numbers are zero"));
    }
    let sxy = points.iter().fold(T::zero(), |s, (x, y)| s + *x * *y);
    let slope = sxy / sxx;
    let ss = points.iter().fold(T::zero(), |s, (x, y)| {
        let r = *y - slope * *x;
        s + r * r
    });
    Ok(StarkFit {
        chi_shift: slope / lit(2.0),
        residual_rms: (ss / T::from_usize(points.len()).unwrap()).sqrt(),
    })
}

/// Smallest `n` whose cumulative Poisson mass reaches [`POISSON_MASS_TARGET`].
pub fn poisson_cutoff<T: Real>(nbar: T) -> u32 {
    let target = lit::<T>(POISSON_MASS_TARGET);
    let mut mass = T::zero();
    let mut n = 0;
    loop {
        mass = mass + poisson_pmf(nbar, n);
        // f32 mass can stall just below the target
        if mass >= target || n >= 10_000 || (n as f64) > 10.0 * to_f64_lossy(nbar) + 50.0 {
            return n;
        }
        n += 1;
    }
}

fn to_f64_lossy<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

/// Poisson-weighted comb of unit-height Lorentzians of FWHM `γ_q` at
/// `ω = 2χ_shift·n`, with `ω` measured from the `n = 0` line.
pub fn number_splitting_spectrum<T: Real>(cal: &CalibrationParams<T>, omega_grid: &[T]) -> Result<Vec<T>> {
    cal.validate()?;
    if !(cal.gamma_q > T::zero()) {
        return Err(Error::validation("gamma_q", "must be positive"));
    }
    Ok(comb(cal.nbar, cal.chi_shift, cal.gamma_q, omega_grid))
}

fn comb<T: Real>(nbar: T, chi_shift: T, gamma_q: T, omega_grid: &[T]) -> Vec<T> {
    let n_max = poisson_cutoff(nbar);
    let weights: Vec<(T, T)> = (0..=n_max)
        .map(|n| {
            (
                poisson_pmf(nbar, n),
                lit::<T>(2.0) * chi_shift * T::from_u32(n).unwrap(),
            )
        })
        .collect();
    let hw2 = (gamma_q * lit(0.5)).powi(2);
    omega_grid
        .iter()
        .map(|&w| {
            weights
                .iter()
                .fold(T::zero(), |s, &(p, c)| s + p * hw2 / ((w - c).powi(2) + hw2))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NumberSplittingFit<T: Real> {
    pub nbar: T,
    pub chi_shift: T,
    pub gamma_q: T,
    pub residual_rms: T,
    pub converged: bool,
}

/// Least-squares fit of (n̄, χ_shift, γ_q) to a number-splitting spectrum.
pub fn fit_number_splitting<T: Real>(
    omega_grid: &[T],
    spectrum: &[T],
    initial: &CalibrationParams<T>,
) -> Result<NumberSplittingFit<T>> {
    if omega_grid.len() != spectrum.len() {
        return Err(Error::validation("spectrum", "length differs from frequency grid"));
    }
    if omega_grid.len() < 6 {
        return Err(Error::validation("spectrum", "need at least six samples"));
    }
    initial.validate()?;
    if !(initial.gamma_q > T::zero()) {
        return Err(Error::validation("gamma_q", "must be positive"));
    }
    let residuals = |p: &[T]| -> Vec<T> {
        let nbar = p[0].abs();
        let gamma_q = p[2].abs().max(T::min_positive_value());
        comb(nbar, p[1], gamma_q, omega_grid)
            .into_iter()
            .zip(spectrum)
            .map(|(m, y)| m - *y)
            .collect()
    };
    let report = levenberg_marquardt(
        residuals,
        &[initial.nbar, initial.chi_shift, initial.gamma_q],
        &LmOptions::default(),
    )?;
    Ok(NumberSplittingFit {
        nbar: report.params[0].abs(),
        chi_shift: report.params[1],
        gamma_q: report.params[2].abs(),
        residual_rms: report.residual_rms,
        converged: report.converged,
    })
}
