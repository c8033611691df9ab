use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::scalar::{c, lit, to_f64, Cplx, Real};
use crate::spectroscopy::SpectrumTrace;

/// Minimum grid length accepted by [`inverse_fourier`].
pub const MIN_TRANSFORM_POINTS: usize = 64;

/// Spectral quantity to transform.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SpectralField {
    Transmission,
    Chi,
}

impl SpectralField {
    pub fn label(self) -> &'static str {
        match self {
            SpectralField::Transmission => "T",
            SpectralField::Chi => "chi",
        }
    }
}

/// Taper applied across the detuning grid before transforming.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Window {
    #[default]
    Rectangular,
    Hann,
}

/// Uniformly sampled real signal starting at `t = 0` (µs).
#[derive(Clone, Debug, PartialEq)]
pub struct TimeSignal<T: Real> {
    pub times: Vec<T>,
    pub values: Vec<T>,
}

impl<T: Real> TimeSignal<T> {
    pub fn step(&self) -> T {
        self.times[1] - self.times[0]
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Samples with `t ≤ t_max`.
    pub fn truncated(&self, t_max: T) -> TimeSignal<T> {
        let n = self.times.iter().take_while(|&&t| t <= t_max).count();
        TimeSignal {
            times: self.times[..n].to_vec(),
            values: self.values[..n].to_vec(),
        }
    }

    /// Number of sign changes among samples with `t ≤ t_max`; exact zeros are
    /// skipped.
    pub fn sign_changes(&self, t_max: T) -> usize {
        let mut last: Option<bool> = None;
        let mut count = 0;
        for (t, v) in self.times.iter().zip(&self.values) {
            if *t > t_max {
                break;
            }
            if *v == T::zero() {
                continue;
            }
            let positive = *v > T::zero();
            if let Some(prev) = last {
                if prev != positive {
                    count += 1;
                }
            }
            last = Some(positive);
        }
        count
    }
}

/// Inverse discrete Fourier transform of one spectral field over the
/// detuning grid, without windowing.
///
/// `P(t_m) = Σ_k f(δ_k) e^{iδ_k t_m}` with `t_m = m·2π/(N·Δδ)`, kept for
/// `t ≥ 0`. Transmission is even in δ, so its real part carries the signal
/// and is normalized to `P(0) = 1`. The dispersion is odd in δ: its real part
/// vanishes, so the imaginary part is kept and scaled to unit peak magnitude
/// (positive sign).
pub fn inverse_fourier<T: Real>(trace: &SpectrumTrace<T>, field: SpectralField) -> Result<TimeSignal<T>> {
    inverse_fourier_windowed(trace, field, Window::Rectangular)
}

pub fn inverse_fourier_windowed<T: Real>(
    trace: &SpectrumTrace<T>,
    field: SpectralField,
    window: Window,
) -> Result<TimeSignal<T>> {
    let values = match field {
        SpectralField::Transmission => trace.transmission(),
        SpectralField::Chi => trace.chi(),
    };
    let raw = transform(&trace.deltas(), &values, window)?;
    match field {
        SpectralField::Transmission => {
            let (times, re): (Vec<T>, Vec<T>) = raw.iter().map(|(t, z)| (*t, z.re)).unzip();
            let origin = re[0];
            if !(origin.abs() > T::zero()) {
                return Err(Error::Numerical {
                    context: "inverse transform normalization at t = 0".into(),
                    residual: to_f64(origin),
                });
            }
            Ok(TimeSignal {
                times,
                values: re.into_iter().map(|v| v / origin).collect(),
            })
        }
        SpectralField::Chi => {
            let (times, im): (Vec<T>, Vec<T>) = raw.iter().map(|(t, z)| (*t, z.im)).unzip();
            let peak = im
                .iter()
                .copied()
                .fold(T::zero(), |m: T, v| if v.abs() > m.abs() { v } else { m });
            if !(peak.abs() > T::zero()) {
                return Err(Error::Numerical {
                    context: "inverse transform normalization of dispersion".into(),
                    residual: 0.0,
                });
            }
            Ok(TimeSignal {
                times,
                values: im.into_iter().map(|v| v / peak).collect(),
            })
        }
    }
}

/// Complex transform of `values` sampled on the uniform grid `deltas`,
/// returned as `(t_m, P(t_m))` for the non-negative half.
pub fn transform<T: Real>(deltas: &[T], values: &[T], window: Window) -> Result<Vec<(T, Cplx<T>)>> {
    let n = deltas.len();
    if n != values.len() {
        return Err(Error::validation("values", "length differs from detuning grid"));
    }
    if n < MIN_TRANSFORM_POINTS {
        return Err(Error::validation(
            "n_points",
            format!("transform needs at least {MIN_TRANSFORM_POINTS} points, got {n}"),
        ));
    }
    let step = uniform_step(deltas)?;
    let nt = T::from_usize(n).unwrap();
    let dt = T::TAU() / (nt * step);

    let mut buf: Vec<Cplx<T>> = values
        .iter()
        .enumerate()
        .map(|(k, &v)| {
            let w = match window {
                Window::Rectangular => T::one(),
                Window::Hann => {
                    let x = T::TAU() * T::from_usize(k).unwrap() / T::from_usize(n - 1).unwrap();
                    lit::<T>(0.5) * (T::one() - x.cos())
                }
            };
            c(v * w, T::zero())
        })
        .collect();
    let fft: Arc<dyn Fft<T>> = FftPlanner::new().plan_fft_inverse(n);
    fft.process(&mut buf);

    let half = n.div_ceil(2);
    Ok((0..half)
        .map(|m| {
            let t = dt * T::from_usize(m).unwrap();
            // Grid offset δ_0 contributes a global phase e^{iδ_0 t}.
            let phase = deltas[0] * t;
            (t, buf[m] * c(phase.cos(), phase.sin()))
        })
        .collect())
}

/// Grid step of a uniform grid, or an error naming the worst deviation.
pub fn uniform_step<T: Real>(grid: &[T]) -> Result<T> {
    let n = grid.len();
    if n < 2 {
        return Err(Error::validation("grid", "needs at least two points"));
    }
    let step = (grid[n - 1] - grid[0]) / T::from_usize(n - 1).unwrap();
    if !(step > T::zero()) {
        return Err(Error::validation("grid", "must be strictly increasing"));
    }
    let scale = grid.iter().fold(step, |m, d| m.max(d.abs()));
    let deviation = grid
        .iter()
        .enumerate()
        .map(|(k, &d)| (d - (grid[0] + step * T::from_usize(k).unwrap())).abs())
        .fold(T::zero(), T::max);
    if deviation > lit::<T>(1e-9) * scale {
        return Err(Error::NonUniformGrid {
            deviation: to_f64(deviation),
        });
    }
    Ok(step)
}
