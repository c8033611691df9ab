//! Levenberg–Marquardt least squares with a central-difference Jacobian,
//! and the three model shapes used by the analysis pipeline.

use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::linalg::RealMatrix;
use crate::scalar::{c, lit, Cplx, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitModel {
    /// `offset + amplitude / (1 + (2(x − center)/fwhm)²)`
    Lorentzian,
    /// `amplitude·e^{−rate·x} + offset`
    Exponential,
    /// `A·e^{−λx}·cos(ωx + θ) + offset`
    DampedCosine,
}

impl FitModel {
    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            FitModel::Lorentzian => &["center", "fwhm", "amplitude", "offset"],
            FitModel::Exponential => &["amplitude", "rate", "offset"],
            FitModel::DampedCosine => &["amplitude", "decay", "omega", "phase", "offset"],
        }
    }

    pub fn n_params(self) -> usize {
        self.param_names().len()
    }

    pub fn eval<T: Real>(self, x: T, p: &[T]) -> T {
        match self {
            FitModel::Lorentzian => {
                let u = lit::<T>(2.0) * (x - p[0]) / p[1];
                p[3] + p[2] / (T::one() + u * u)
            }
            FitModel::Exponential => p[0] * (-p[1] * x).exp() + p[2],
            FitModel::DampedCosine => p[0] * (-p[1] * x).exp() * (p[2] * x + p[3]).cos() + p[4],
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            FitModel::Lorentzian => "lorentzian",
            FitModel::Exponential => "exponential",
            FitModel::DampedCosine => "damped_cosine",
        }
    }
}

/// Stopping rules for [`levenberg_marquardt`].
#[derive(Clone, Copy, Debug)]
pub struct LmOptions<T: Real> {
    pub max_iterations: usize,
    /// Relative parameter change below which the fit has converged.
    pub param_tol: T,
    /// Gradient infinity norm below which the fit has converged.
    pub grad_tol: T,
}

impl<T: Real> Default for LmOptions<T> {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            param_tol: lit(1e-9),
            grad_tol: lit(1e-10),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LmReport<T: Real> {
    pub params: Vec<T>,
    pub residual_rms: T,
    pub gradient_norm: T,
    pub converged: bool,
    pub iterations: usize,
}

/// Minimizes `½‖r(p)‖²` from `initial`.
///
/// Marquardt scaling: the damping term is `μ·diag(JᵀJ)`. Rejected steps raise
/// `μ` until a decrease is found; a run that cannot decrease the cost
/// reports `converged = false` with the best parameters seen.
pub fn levenberg_marquardt<T: Real, F>(residuals: F, initial: &[T], opts: &LmOptions<T>) -> Result<LmReport<T>>
where
    F: Fn(&[T]) -> Vec<T>,
{
    if initial.iter().any(|v| !v.is_finite()) {
        return Err(Error::validation("initial", "parameters must be finite"));
    }
    let n = initial.len();
    let mut p = initial.to_vec();
    let mut r = residuals(&p);
    let m = r.len();
    let mut cost = sum_sq(&r);
    if !cost.is_finite() {
        return Err(Error::validation("initial", "residuals are not finite at the initial guess"));
    }
    let mut mu = lit::<T>(1e-3);
    let mu_max = lit::<T>(1e16);
    let tiny = T::min_positive_value().sqrt();
    let mut gradient_norm = T::infinity();
    let mut converged = false;
    let mut iterations = 0;

    while iterations < opts.max_iterations {
        iterations += 1;
        let jac = jacobian(&residuals, &p, &r);
        let mut grad = vec![T::zero(); n];
        let mut normal = RealMatrix::<T>::zeros(n, n);
        for i in 0..m {
            for a in 0..n {
                grad[a] = grad[a] + jac[i * n + a] * r[i];
                for b in a..n {
                    normal[(a, b)] = normal[(a, b)] + jac[i * n + a] * jac[i * n + b];
                }
            }
        }
        for a in 0..n {
            for b in 0..a {
                normal[(a, b)] = normal[(b, a)];
            }
        }
        gradient_norm = grad.iter().fold(T::zero(), |s, g| s.max(g.abs()));
        if gradient_norm < opts.grad_tol {
            converged = true;
            break;
        }

        let mut accepted = None;
        while mu <= mu_max {
            let mut damped = normal.clone();
            for a in 0..n {
                damped[(a, a)] = damped[(a, a)] + mu * normal[(a, a)].max(tiny);
            }
            let rhs: Vec<T> = grad.iter().map(|g| -*g).collect();
            if let Some(step) = damped.solve(&rhs) {
                let trial: Vec<T> = p.iter().zip(&step).map(|(a, b)| *a + *b).collect();
                let r_trial = residuals(&trial);
                let c_trial = sum_sq(&r_trial);
                if c_trial.is_finite() && c_trial <= cost {
                    accepted = Some((trial, r_trial, c_trial, step));
                    break;
                }
            }
            mu = mu * lit(4.0);
        }
        let Some((trial, r_trial, c_trial, step)) = accepted else {
            break;
        };
        mu = (mu / lit(3.0)).max(lit(1e-12));
        let step_norm = norm(&step);
        let p_norm = norm(&p);
        p = trial;
        r = r_trial;
        let decreased = c_trial < cost;
        cost = c_trial;
        if step_norm <= opts.param_tol * (p_norm + opts.param_tol) || !decreased {
            converged = true;
            break;
        }
    }

    let residual_rms = (cost / T::from_usize(m.max(1)).unwrap()).sqrt();
    Ok(LmReport {
        params: p,
        residual_rms,
        gradient_norm,
        converged: converged && residual_rms.is_finite(),
        iterations,
    })
}

fn sum_sq<T: Real>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |s, x| s + *x * *x)
}

fn norm<T: Real>(v: &[T]) -> T {
    sum_sq(v).sqrt()
}

/// Central differences; row-major `m × n`.
fn jacobian<T: Real, F>(residuals: &F, p: &[T], r0: &[T]) -> Vec<T>
where
    F: Fn(&[T]) -> Vec<T>,
{
    let n = p.len();
    let m = r0.len();
    let h_rel = T::epsilon().cbrt();
    let mut jac = vec![T::zero(); m * n];
    let mut probe = p.to_vec();
    for a in 0..n {
        let h = h_rel * p[a].abs().max(T::one());
        probe[a] = p[a] + h;
        let up = residuals(&probe);
        probe[a] = p[a] - h;
        let down = residuals(&probe);
        probe[a] = p[a];
        for i in 0..m {
            jac[i * n + a] = (up[i] - down[i]) / (lit::<T>(2.0) * h);
        }
    }
    jac
}

/// Fitted model with named parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct FitOutcome<T: Real> {
    pub model: FitModel,
    pub params: Vec<T>,
    pub residual_rms: T,
    pub gradient_norm: T,
    pub converged: bool,
    pub iterations: usize,
}

impl<T: Real> FitOutcome<T> {
    pub fn get(&self, name: &str) -> Option<T> {
        self.model
            .param_names()
            .iter()
            .position(|n| *n == name)
            .map(|i| self.params[i])
    }

    pub fn named(&self) -> Vec<(&'static str, T)> {
        self.model
            .param_names()
            .iter()
            .copied()
            .zip(self.params.iter().copied())
            .collect()
    }
}

/// Least-squares fit of `model` to `(x, y)` from `initial`.
pub fn nlls_fit<T: Real>(x: &[T], y: &[T], model: FitModel, initial: &[T]) -> Result<FitOutcome<T>> {
    if x.len() != y.len() {
        return Err(Error::validation("y", "length differs from x"));
    }
    if initial.len() != model.n_params() {
        return Err(Error::validation(
            "initial",
            format!("{} expects {} parameters", model.label(), model.n_params()),
        ));
    }
    if x.len() < 2 * model.n_params() {
        return Err(Error::validation(
            "samples",
            format!("need at least {} samples for {}", 2 * model.n_params(), model.label()),
        ));
    }
    let report = levenberg_marquardt(
        |p: &[T]| x.iter().zip(y).map(|(xi, yi)| model.eval(*xi, p) - *yi).collect(),
        initial,
        &LmOptions::default(),
    )?;
    let mut params = report.params;
    canonicalize(model, &mut params);
    Ok(FitOutcome {
        model,
        params,
        residual_rms: report.residual_rms,
        gradient_norm: report.gradient_norm,
        converged: report.converged,
        iterations: report.iterations,
    })
}

/// [`nlls_fit`] seeded by [`initial_guess`].
pub fn nlls_fit_auto<T: Real>(x: &[T], y: &[T], model: FitModel) -> Result<FitOutcome<T>> {
    let init = initial_guess(x, y, model)?;
    nlls_fit(x, y, model, &init)
}

/// Folds sign ambiguities into a canonical form: positive fwhm, and for the
/// damped cosine non-negative ω and amplitude with θ in (−π, π].
fn canonicalize<T: Real>(model: FitModel, p: &mut [T]) {
    match model {
        FitModel::Lorentzian => p[1] = p[1].abs(),
        FitModel::Exponential => {}
        FitModel::DampedCosine => {
            if p[2] < T::zero() {
                p[2] = -p[2];
                p[3] = -p[3];
            }
            if p[0] < T::zero() {
                p[0] = -p[0];
                p[3] = p[3] + T::PI();
            }
            p[3] = crate::spectroscopy::wrap_phase(p[3]);
        }
    }
}

/// Data-driven starting point for each model.
///
/// * Lorentzian: peak location and height, width from the half-maximum crossings.
/// * Exponential: log-linear regression after removing a baseline.
/// * Damped cosine: frequency from the periodogram peak of the detrended
///   signal, decay from the log of its successive extrema.
pub fn initial_guess<T: Real>(x: &[T], y: &[T], model: FitModel) -> Result<Vec<T>> {
    if x.len() != y.len() || x.len() < 4 {
        return Err(Error::validation("samples", "need at least four matching samples"));
    }
    let n = x.len();
    let span = x[n - 1] - x[0];
    let (ymin, ymax) = y
        .iter()
        .fold((T::infinity(), T::neg_infinity()), |(lo, hi), v| (lo.min(*v), hi.max(*v)));
    match model {
        FitModel::Lorentzian => {
            let imax = argmax(y);
            let offset = ymin;
            let amp = ymax - offset;
            let half = offset + amp * lit(0.5);
            let left = (0..imax).rev().find(|&i| y[i] < half).map(|i| crossing(x, y, i, i + 1, half));
            let right = ((imax + 1)..n).find(|&i| y[i] < half).map(|i| crossing(x, y, i - 1, i, half));
            let fwhm = match (left, right) {
                (Some(l), Some(r)) => r - l,
                (Some(l), None) => lit::<T>(2.0) * (x[imax] - l),
                (None, Some(r)) => lit::<T>(2.0) * (r - x[imax]),
                (None, None) => span / lit(4.0),
            };
            Ok(vec![x[imax], fwhm, amp, offset])
        }
        FitModel::Exponential => {
            let range = (ymax - ymin).max(T::min_positive_value());
            let base = if ymin > T::zero() { T::zero() } else { ymin - lit::<T>(1e-3) * range };
            let pts: Vec<(T, T)> = x
                .iter()
                .zip(y)
                .filter(|(_, v)| **v - base > lit::<T>(1e-9) * range)
                .map(|(xi, v)| (*xi, (*v - base).ln()))
                .collect();
            let (slope, intercept) = linear_regression(&pts).unwrap_or((-T::one() / span, ymax.ln()));
            Ok(vec![intercept.exp(), -slope, base])
        }
        FitModel::DampedCosine => {
            let tail = (n / 5).max(1);
            let offset = y[n - tail..].iter().fold(T::zero(), |s, v| s + *v) / T::from_usize(tail).unwrap();
            let detrended: Vec<T> = y.iter().map(|v| *v - offset).collect();
            let dx = span / T::from_usize(n - 1).unwrap();
            let omega = dominant_frequency(&detrended, dx);
            let extrema: Vec<(T, T)> = (1..n - 1)
                .filter(|&i| {
                    let a = detrended[i].abs();
                    a > T::zero() && a >= detrended[i - 1].abs() && a > detrended[i + 1].abs()
                })
                .map(|i| (x[i], detrended[i].abs().ln()))
                .collect();
            let mut anchors = vec![(x[0], detrended[0].abs().max(T::min_positive_value()).ln())];
            anchors.extend(extrema);
            let decay = linear_regression(&anchors)
                .map(|(s, _)| -s)
                .filter(|d| d.is_finite() && *d > T::zero())
                .unwrap_or(lit::<T>(3.0) / span);
            let amp = detrended.iter().fold(T::zero(), |m, v| m.max(v.abs()));
            let phase = if amp > T::zero() {
                (detrended[0] / amp).max(-T::one()).min(T::one()).acos()
            } else {
                T::zero()
            };
            Ok(vec![amp, decay, omega, phase, offset])
        }
    }
}

fn argmax<T: Real>(y: &[T]) -> usize {
    y.iter()
        .enumerate()
        .fold((0, T::neg_infinity()), |(bi, bv), (i, v)| if *v > bv { (i, *v) } else { (bi, bv) })
        .0
}

fn crossing<T: Real>(x: &[T], y: &[T], i: usize, j: usize, level: T) -> T {
    let dy = y[j] - y[i];
    if dy == T::zero() {
        x[i]
    } else {
        x[i] + (level - y[i]) * (x[j] - x[i]) / dy
    }
}

/// Least-squares line through `(x, y)` pairs: `(slope, intercept)`.
pub(crate) fn linear_regression<T: Real>(pts: &[(T, T)]) -> Option<(T, T)> {
    if pts.len() < 2 {
        return None;
    }
    let n = T::from_usize(pts.len()).unwrap();
    let (sx, sy) = pts.iter().fold((T::zero(), T::zero()), |(a, b), (x, y)| (a + *x, b + *y));
    let (mx, my) = (sx / n, sy / n);
    let (sxx, sxy) = pts.iter().fold((T::zero(), T::zero()), |(a, b), (x, y)| {
        (a + (*x - mx) * (*x - mx), b + (*x - mx) * (*y - my))
    });
    if sxx == T::zero() {
        return None;
    }
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Angular frequency of the largest non-DC periodogram bin, zero-padded ×8
/// and refined by parabolic interpolation.
fn dominant_frequency<T: Real>(signal: &[T], dx: T) -> T {
    let padded = (signal.len() * 8).next_power_of_two();
    let mut buf: Vec<Cplx<T>> = signal.iter().map(|v| c(*v, T::zero())).collect();
    buf.resize(padded, c(T::zero(), T::zero()));
    let fft: Arc<dyn Fft<T>> = FftPlanner::new().plan_fft_forward(padded);
    fft.process(&mut buf);
    let power: Vec<T> = buf[..padded / 2].iter().map(|z| z.norm_sqr()).collect();
    // Skip bins belonging to the DC lobe: walk down until power stops falling.
    let mut start = 1;
    while start + 1 < power.len() && power[start + 1] < power[start] {
        start += 1;
    }
    let k = start + argmax(&power[start..]);
    let refined = if k > 0 && k + 1 < power.len() {
        let (a, b, cc) = (power[k - 1], power[k], power[k + 1]);
        let denom = a - lit::<T>(2.0) * b + cc;
        if denom != T::zero() {
            T::from_usize(k).unwrap() + lit::<T>(0.5) * (a - cc) / denom
        } else {
            T::from_usize(k).unwrap()
        }
    } else {
        T::from_usize(k).unwrap()
    };
    T::TAU() * refined / (T::from_usize(padded).unwrap() * dx)
}
