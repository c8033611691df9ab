use crate::error::{Error, Result};
use crate::linalg::Mat3;
use crate::scalar::{lit, re, to_f64, tol, Cplx, Real};

/// Basis levels of the ladder.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Level {
    G0 = 0,
    G1 = 1,
    F0 = 2,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::G0, Level::G1, Level::F0];

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Hermitian, unit-trace, positive semidefinite 3×3 state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix<T: Real> {
    entries: Mat3<T>,
}

impl<T: Real> DensityMatrix<T> {
    /// Validates `entries` against the density-matrix invariants.
    pub fn new(entries: Mat3<T>) -> Result<Self> {
        let rho = Self { entries };
        rho.check()?;
        Ok(rho)
    }

    pub(crate) fn new_unchecked(entries: Mat3<T>) -> Self {
        Self { entries }
    }

    /// Pure state `|level⟩⟨level|`.
    pub fn pure(level: Level) -> Self {
        Self {
            entries: Mat3::unit(level.index(), level.index(), re(T::one())),
        }
    }

    pub fn ground() -> Self {
        Self::pure(Level::G0)
    }

    pub fn matrix(&self) -> &Mat3<T> {
        &self.entries
    }

    pub fn element(&self, row: Level, col: Level) -> Cplx<T> {
        self.entries[(row.index(), col.index())]
    }

    pub fn population(&self, level: Level) -> T {
        self.element(level, level).re
    }

    /// `⟨g1|ρ|g0⟩`.
    pub fn coherence_g1_g0(&self) -> Cplx<T> {
        self.element(Level::G1, Level::G0)
    }

    pub fn trace(&self) -> Cplx<T> {
        self.entries.trace()
    }

    pub fn min_eigenvalue(&self) -> T {
        self.entries.hermitian_eigenvalues()[0]
    }

    /// Hermitian part rescaled to unit real trace.
    pub(crate) fn corrected(entries: Mat3<T>) -> Mat3<T> {
        let herm = (entries + entries.adjoint()).scale(re(lit(0.5)));
        let tr = herm.trace().re;
        herm.scale(re(T::one() / tr))
    }

    /// Checks Hermiticity (1e-12), unit trace (1e-10) and positivity (−1e-10).
    pub fn check(&self) -> Result<()> {
        let herm = self.entries.hermiticity_deviation();
        if !(herm <= tol(1e-12)) {
            return Err(Error::Numerical {
                context: "density matrix Hermiticity".into(),
                residual: to_f64(herm),
            });
        }
        let tr_err = (self.trace() - re(T::one())).norm();
        if !(tr_err <= tol(1e-10)) {
            return Err(Error::Numerical {
                context: "density matrix trace".into(),
                residual: to_f64(tr_err),
            });
        }
        let min_ev = self.min_eigenvalue();
        if !(min_ev >= -tol::<T>(1e-10)) {
            return Err(Error::Numerical {
                context: "density matrix positivity".into(),
                residual: to_f64(min_ev),
            });
        }
        Ok(())
    }
}
