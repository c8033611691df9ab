//! Driven three-level ladder model: Hamiltonian, dissipators, Liouvillian,
//! steady state and time evolution.
//!
//! Basis ordering is `(|g0⟩, |g1⟩, |f0⟩)`. Rates and drive strengths are
//! angular (rad/µs) and times are in µs, so `ħ = 1` throughout.

mod evolve;
mod liouvillian;
mod operators;
mod state;
mod steady;

pub use evolve::{evolve, evolve_final, TimeTrajectory};
pub use liouvillian::{build_liouvillian, Superoperator};
pub use operators::{build_hamiltonian, build_jump_operators, JumpOperatorSet};
pub use state::{DensityMatrix, Level};
pub use steady::{steady_state, STEADY_STATE_COND_LIMIT};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{mhz_to_angular, to_f64, Real};

/// Where the `|f0⟩` damping channel deposits its population.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayTarget {
    #[default]
    ToG0,
    ToG1,
}

impl DecayTarget {
    pub fn level(self) -> Level {
        match self {
            DecayTarget::ToG0 => Level::G0,
            DecayTarget::ToG1 => Level::G1,
        }
    }
}

/// One instance of the driven ladder model, in angular units (rad/µs).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SystemParams<T: Real> {
    /// Decay rate of the cavity dispersive level `|g1⟩`.
    pub kappa: T,
    /// Damping rate of the transmon level `|f0⟩`.
    pub gamma: T,
    /// Probe Rabi strength on `|g0⟩ ↔ |g1⟩`.
    pub omega_p: T,
    /// Coupler Rabi strength on `|g1⟩ ↔ |f0⟩`.
    pub omega_c: T,
    /// Probe detuning from the dispersive cavity line.
    pub delta: T,
    pub f_decay_target: DecayTarget,
}

impl<T: Real> SystemParams<T> {
    /// Builds validated parameters from angular values.
    pub fn new(kappa: T, gamma: T, omega_p: T, omega_c: T, delta: T) -> Result<Self> {
        let p = Self {
            kappa,
            gamma,
            omega_p,
            omega_c,
            delta,
            f_decay_target: DecayTarget::ToG0,
        };
        p.validate()?;
        Ok(p)
    }

    /// Builds validated parameters from ordinary frequencies in MHz.
    pub fn from_mhz(kappa: T, gamma: T, omega_p: T, omega_c: T, delta: T) -> Result<Self> {
        Self::new(
            mhz_to_angular(kappa),
            mhz_to_angular(gamma),
            mhz_to_angular(omega_p),
            mhz_to_angular(omega_c),
            mhz_to_angular(delta),
        )
    }

    /// Measured device values: κ/2π = 1.26 MHz, γ/2π = 1.18 MHz,
    /// Ω_p/2π = 0.252 MHz, coupler off, on resonance.
    pub fn measured_device() -> Self {
        Self::from_mhz(
            T::from_f64(1.26).unwrap(),
            T::from_f64(1.18).unwrap(),
            T::from_f64(0.252).unwrap(),
            T::zero(),
            T::zero(),
        )
        .expect("built-in parameters are valid")
    }

    pub fn with_delta(mut self, delta: T) -> Self {
        self.delta = delta;
        self
    }

    pub fn with_omega_c(mut self, omega_c: T) -> Self {
        self.omega_c = omega_c;
        self
    }

    pub fn with_omega_p(mut self, omega_p: T) -> Self {
        self.omega_p = omega_p;
        self
    }

    pub fn with_gamma(mut self, gamma: T) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_decay_target(mut self, target: DecayTarget) -> Self {
        self.f_decay_target = target;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("kappa", self.kappa),
            ("gamma", self.gamma),
            ("omega_p", self.omega_p),
            ("omega_c", self.omega_c),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(Error::validation(name, "must be finite"));
            }
            if v < T::zero() {
                return Err(Error::validation(
                    name,
                    format!("must be non-negative, got {}", to_f64(v)),
                ));
            }
        }
        if !self.delta.is_finite() {
            return Err(Error::validation("delta", "must be finite"));
        }
        Ok(())
    }

    /// Largest rate in the model, `max(κ, γ, Ω_p, Ω_c, |δ|)`.
    pub fn max_rate(&self) -> T {
        self.kappa
            .max(self.gamma)
            .max(self.omega_p)
            .max(self.omega_c)
            .max(self.delta.abs())
    }

    /// Assembles the Liouvillian for these parameters.
    pub fn liouvillian(&self) -> Result<Superoperator<T>> {
        build_liouvillian(&build_hamiltonian(self), &build_jump_operators(self))
    }
}
