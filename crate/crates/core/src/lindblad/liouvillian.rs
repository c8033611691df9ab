use super::JumpOperatorSet;
use crate::error::{Error, Result};
use crate::linalg::{kron3, Mat3, Mat9};
use crate::scalar::{c, lit, re, to_f64, tol, Cplx, Real};

/// Lindblad generator acting on column-major `vec(ρ)`.
///
/// `dρ/dt = −i[H, ρ] + Σ_j (L_j ρ L_j† − ½{ρ, L_j†L_j})`
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Superoperator<T: Real> {
    matrix: Mat9<T>,
    rate_scale: T,
}

impl<T: Real> Superoperator<T> {
    pub fn zero() -> Self {
        Self {
            matrix: Mat9::zeros(),
            rate_scale: T::zero(),
        }
    }

    pub fn matrix(&self) -> &Mat9<T> {
        &self.matrix
    }

    /// Largest physical rate that entered the generator: diagonal energies,
    /// full Rabi strengths `2|H_ij|` and jump rates `|L_j|²`.
    pub fn rate_scale(&self) -> T {
        self.rate_scale
    }

    pub fn apply_vec(&self, v: &[Cplx<T>; 9]) -> [Cplx<T>; 9] {
        self.matrix.matvec(v)
    }

    /// `dρ/dt` for the matrix `rho`.
    pub fn apply(&self, rho: &Mat3<T>) -> Mat3<T> {
        let v: [Cplx<T>; 9] = rho
            .vectorize()
            .try_into()
            .expect("3×3 vectorizes to 9 entries");
        Mat3::unvectorize(&self.apply_vec(&v))
    }

    /// Row functional of `d tr(ρ)/dt`; identically zero for a
    /// trace-preserving generator. Returns its largest entry magnitude.
    pub fn trace_functional_residual(&self) -> T {
        (0..9)
            .map(|col| {
                [0usize, 4, 8]
                    .iter()
                    .fold(Cplx::new(T::zero(), T::zero()), |s, &row| {
                        s + self.matrix[(row, col)]
                    })
                    .norm()
            })
            .fold(T::zero(), T::max)
    }
}

/// Assembles the Liouvillian from a Hamiltonian and jump operators.
///
/// Uses `vec(AρB) = (Bᵀ ⊗ A) vec(ρ)`.
pub fn build_liouvillian<T: Real>(
    hamiltonian: &Mat3<T>,
    jumps: &JumpOperatorSet<T>,
) -> Result<Superoperator<T>> {
    let dev = hamiltonian.hermiticity_deviation();
    if !(dev <= tol(1e-12)) {
        return Err(Error::NonHermitian {
            deviation: to_f64(dev),
        });
    }
    let id = Mat3::identity();
    let minus_i = c(T::zero(), -T::one());
    let half = re(lit::<T>(0.5));

    let mut matrix = (kron3(&id, hamiltonian) - kron3(&hamiltonian.transpose(), &id)).scale(minus_i);
    let mut rate_scale = T::zero();
    for i in 0..3 {
        rate_scale = rate_scale.max(hamiltonian[(i, i)].norm());
        for j in 0..3 {
            if i != j {
                rate_scale = rate_scale.max(lit::<T>(2.0) * hamiltonian[(i, j)].norm());
            }
        }
    }
    for l in &jumps.ops {
        let ldl = l.adjoint() * *l;
        matrix = matrix + kron3(&l.conj(), l)
            - kron3(&id, &ldl).scale(half)
            - kron3(&ldl.transpose(), &id).scale(half);
        rate_scale = rate_scale.max(l.max_abs() * l.max_abs());
    }
    Ok(Superoperator { matrix, rate_scale })
}
