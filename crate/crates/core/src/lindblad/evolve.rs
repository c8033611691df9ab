use super::{DensityMatrix, Superoperator};
use crate::error::{Error, Result};
use crate::linalg::Mat3;
use crate::scalar::{lit, re, to_f64, tol, Cplx, Real};

/// Uniformly sampled trajectory, `states[k]` at `times[k]`.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeTrajectory<T: Real> {
    pub times: Vec<T>,
    pub states: Vec<DensityMatrix<T>>,
}

impl<T: Real> TimeTrajectory<T> {
    pub fn last(&self) -> &DensityMatrix<T> {
        self.states.last().expect("trajectory holds the initial state")
    }

    pub fn step(&self) -> T {
        self.times[1] - self.times[0]
    }
}

/// Fixed-step RK4 integration of `dvec(ρ)/dt = L·vec(ρ)` from `t = 0`.
///
/// The step is shrunk so that an integer number of steps lands exactly on
/// `t_end`. Each step is re-Hermitized and trace-renormalized after checking
/// that neither the trace nor the Hermiticity drifted by more than 1e-8.
pub fn evolve<T: Real>(
    rho0: &DensityMatrix<T>,
    l: &Superoperator<T>,
    t_end: T,
    dt: T,
) -> Result<TimeTrajectory<T>> {
    let mut traj = TimeTrajectory {
        times: vec![T::zero()],
        states: vec![*rho0],
    };
    integrate(rho0, l, t_end, dt, |t, rho| {
        traj.times.push(t);
        traj.states.push(rho);
    })?;
    Ok(traj)
}

/// Like [`evolve`] but keeps only the final state.
pub fn evolve_final<T: Real>(
    rho0: &DensityMatrix<T>,
    l: &Superoperator<T>,
    t_end: T,
    dt: T,
) -> Result<DensityMatrix<T>> {
    let mut last = *rho0;
    integrate(rho0, l, t_end, dt, |_, rho| last = rho)?;
    Ok(last)
}

fn integrate<T: Real>(
    rho0: &DensityMatrix<T>,
    l: &Superoperator<T>,
    t_end: T,
    dt: T,
    mut emit: impl FnMut(T, DensityMatrix<T>),
) -> Result<()> {
    if !(dt > T::zero()) {
        return Err(Error::validation("dt", "must be positive"));
    }
    if !(t_end >= dt) {
        return Err(Error::validation("t_end", "must be at least one step"));
    }
    let limit = lit::<T>(0.01) / l.rate_scale();
    // Allow rounding slack when callers pass exactly the limit.
    if dt > limit * (T::one() + lit(1e-12)) {
        return Err(Error::StepSize {
            dt: to_f64(dt),
            limit: to_f64(limit),
        });
    }
    let n_steps = (t_end / dt).ceil().to_usize().unwrap_or(usize::MAX);
    let h = t_end / T::from_usize(n_steps).expect("step count representable");
    let half_h = re(h * lit(0.5));
    let sixth = re(h / lit(6.0));
    let hc = re(h);
    let two = re(lit::<T>(2.0));
    let drift_tol = tol::<T>(1e-8);

    let mut v: [Cplx<T>; 9] = rho0.matrix().vectorize().try_into().expect("9 entries");
    let axpy = |a: &[Cplx<T>; 9], s: Cplx<T>, b: &[Cplx<T>; 9]| {
        let mut out = *a;
        for (o, bi) in out.iter_mut().zip(b.iter()) {
            *o = *o + s * *bi;
        }
        out
    };

    for step in 1..=n_steps {
        let k1 = l.apply_vec(&v);
        let k2 = l.apply_vec(&axpy(&v, half_h, &k1));
        let k3 = l.apply_vec(&axpy(&v, half_h, &k2));
        let k4 = l.apply_vec(&axpy(&v, hc, &k3));
        for i in 0..9 {
            v[i] = v[i] + sixth * (k1[i] + two * k2[i] + two * k3[i] + k4[i]);
        }

        let raw = Mat3::unvectorize(&v);
        let trace_drift = (raw.trace() - re(T::one())).norm();
        if !(trace_drift <= drift_tol) {
            return Err(Error::InvariantBreach {
                step,
                what: "trace",
                drift: to_f64(trace_drift),
            });
        }
        let herm_drift = raw.hermiticity_deviation();
        if !(herm_drift <= drift_tol) {
            return Err(Error::InvariantBreach {
                step,
                what: "hermiticity",
                drift: to_f64(herm_drift),
            });
        }
        let fixed = DensityMatrix::corrected(raw);
        v = fixed.vectorize().try_into().expect("9 entries");
        let t = h * T::from_usize(step).expect("step index representable");
        emit(t, DensityMatrix::new_unchecked(fixed));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindblad::{steady_state, Level, SystemParams};

    #[test]
    fn zero_generator_keeps_state() {
        let rho0 = DensityMatrix::<f64>::pure(Level::G1);
        let traj = evolve(&rho0, &Superoperator::zero(), 1.0, 0.1).unwrap();
        assert_eq!(traj.times.len(), 11);
        assert!(traj.states.iter().all(|s| *s == rho0));
    }

    #[test]
    fn pure_decay_matches_exponential() {
        let kappa = 7.9;
        let p = SystemParams::<f64>::new(kappa, 0.0, 0.0, 0.0, 0.0).unwrap();
        let l = p.liouvillian().unwrap();
        let dt = 0.01 / kappa;
        let traj = evolve(&DensityMatrix::pure(Level::G1), &l, 1.0, dt).unwrap();
        for (t, rho) in traj.times.iter().zip(&traj.states) {
            let want = (-kappa * t).exp();
            assert!((rho.population(Level::G1) - want).abs() < 1e-8, "t={t}");
        }
    }

    #[test]
    fn times_are_uniform_and_end_exactly() {
        let p = SystemParams::<f64>::new(1.0, 1.0, 0.5, 0.5, 0.0).unwrap();
        let l = p.liouvillian().unwrap();
        let traj = evolve(&DensityMatrix::ground(), &l, 0.1, 0.003).unwrap();
        assert!((traj.times.last().unwrap() - 0.1).abs() < 1e-15);
        let h = traj.step();
        assert!(h <= 0.003);
        for w in traj.times.windows(2) {
            assert!((w[1] - w[0] - h).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_large_step() {
        let p = SystemParams::<f64>::new(10.0, 1.0, 0.0, 0.0, 0.0).unwrap();
        let l = p.liouvillian().unwrap();
        let err = evolve(&DensityMatrix::ground(), &l, 1.0, 0.01).unwrap_err();
        assert!(matches!(err, Error::StepSize { .. }));
        let err = evolve(&DensityMatrix::ground(), &l, 1e-5, 1e-4).unwrap_err();
        assert!(matches!(err, Error::Validation { .. }));
    }

    #[test]
    fn long_run_reaches_steady_state() {
        let p = SystemParams::<f64>::new(6.0, 4.0, 1.0, 10.0, 2.0).unwrap();
        let l = p.liouvillian().unwrap();
        let ss = steady_state(&l).unwrap();
        let fin = evolve_final(&DensityMatrix::ground(), &l, 15.0, 0.01 / p.max_rate()).unwrap();
        assert!((*fin.matrix() - *ss.matrix()).max_abs() < 1e-10);
    }
}
