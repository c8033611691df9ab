use super::{DensityMatrix, Superoperator};
use crate::error::{Error, Result};
use crate::linalg::Mat3;
use crate::scalar::{c, lit, re, to_f64, tol, Cplx, Real};

/// Condition number above which the augmented solve is abandoned in favour of
/// the smallest right singular vector.
pub const STEADY_STATE_COND_LIMIT: f64 = 1e12;

/// Steady state of `L`.
///
/// Solves `L·v = 0` with the `ρ_g0,g0` row replaced by the trace-one
/// constraint. That row is redundant because the diagonal rows of a
/// trace-preserving generator sum to zero.
pub fn steady_state<T: Real>(l: &Superoperator<T>) -> Result<DensityMatrix<T>> {
    let mut augmented = *l.matrix();
    for col in 0..9 {
        let is_diag = col % 4 == 0;
        augmented[(0, col)] = if is_diag { re(T::one()) } else { re(T::zero()) };
    }
    let mut rhs = [re(T::zero()); 9];
    rhs[0] = re(T::one());

    let cond = augmented.condition_number();
    let v = if cond.is_finite() && cond <= lit(STEADY_STATE_COND_LIMIT) {
        augmented
            .lu()
            .ok_or_else(|| Error::Numerical {
                context: "steady-state LU factorization".into(),
                residual: f64::INFINITY,
            })?
            .solve(&rhs)
    } else {
        null_vector(l)?
    };

    let raw = Mat3::unvectorize(&v);
    let tr = raw.trace();
    if !(tr.norm() > T::epsilon()) {
        return Err(Error::Numerical {
            context: "steady-state trace normalization".into(),
            residual: to_f64(tr.norm()),
        });
    }
    let rho = DensityMatrix::corrected(raw.scale(re(T::one()) / tr));

    let flat: [Cplx<T>; 9] = rho.vectorize().try_into().expect("9 entries");
    let residual = l
        .apply_vec(&flat)
        .iter()
        .fold(T::zero(), |m, z| m.max(z.norm()));
    if !(residual <= tol(1e-10)) {
        return Err(Error::Numerical {
            context: "steady-state residual ‖L·vec(ρ)‖∞".into(),
            residual: to_f64(residual),
        });
    }
    DensityMatrix::new(rho)
}

/// Null vector of `L` from a one-sided Jacobi SVD of its real embedding.
fn null_vector<T: Real>(l: &Superoperator<T>) -> Result<[Cplx<T>; 9]> {
    let (sigma, v) = l.matrix().real_embedding().svd_right();
    let sigma_max = sigma.last().copied().unwrap_or(T::zero());
    let threshold = tol::<T>(1e-10) * sigma_max.max(T::one());
    // Every complex singular value appears twice in the real embedding.
    let nullity = sigma.iter().filter(|&&s| s <= threshold).count() / 2;
    if nullity > 1 {
        return Err(Error::DegenerateSteadyState { nullity });
    }
    let col = v.column(0);
    let mut out = [re(T::zero()); 9];
    for (k, o) in out.iter_mut().enumerate() {
        *o = c(col[k], col[k + 9]);
    }
    Ok(out)
}
