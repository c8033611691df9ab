//! Driven three-level ladder (g0 ↔ g1 ↔ f0) circuit-QED simulator.
//!
//! The core is generic over the real scalar ([`Real`], implemented for `f32`
//! and `f64`). Rates are angular (rad/µs) throughout; `*_mhz` helpers and the
//! configuration layer take `x/2π` in MHz. Concrete `f64` and `f32` aliases
//! are provided below.
//!
//! ```
//! use xi_cqed::{steady_state, Level, SystemParamsF64};
//!
//! let params = SystemParamsF64::measured_device().with_omega_c(2.0 * std::f64::consts::PI * 7.3);
//! let rho = steady_state(&params.liouvillian()?)?;
//! assert!((rho.trace().re - 1.0).abs() < 1e-10);
//! assert!(rho.population(Level::G1) > 0.0);
//! # Ok::<(), xi_cqed::Error>(())
//! ```

pub mod analysis;
pub mod calibration;
pub mod error;
pub mod io;
pub mod linalg;
pub mod lindblad;
pub mod scalar;
pub mod spectroscopy;

pub use analysis::{
    classify_regime, find_doublet, inverse_fourier, nlls_fit, DoubletReport, FitModel, FitOutcome, Regime,
    RegimeReport, SpectralField, TimeSignal,
};
pub use calibration::{
    fit_stark_line, number_splitting_spectrum, poisson_pmf, stark_to_photons, CalibrationParams, DeviceMetadata,
};
pub use error::{Error, Result};
pub use lindblad::{
    build_hamiltonian, build_jump_operators, build_liouvillian, evolve, steady_state, DecayTarget, DensityMatrix,
    JumpOperatorSet, Level, Superoperator, SystemParams,
};
pub use scalar::{Cplx, Real};
pub use spectroscopy::{
    inject_noise, normalize_spectrum, sweep_spectrum, weak_probe_coherence, SpectrumSample, SpectrumTrace, SweepSpec,
};

pub type SystemParamsF64 = SystemParams<f64>;
pub type DensityMatrixF64 = DensityMatrix<f64>;
pub type SuperoperatorF64 = Superoperator<f64>;
pub type SweepSpecF64 = SweepSpec<f64>;
pub type SpectrumTraceF64 = SpectrumTrace<f64>;
pub type TimeSignalF64 = TimeSignal<f64>;
pub type FitOutcomeF64 = FitOutcome<f64>;
pub type RegimeReportF64 = RegimeReport<f64>;
pub type DoubletReportF64 = DoubletReport<f64>;
pub type CalibrationParamsF64 = CalibrationParams<f64>;
pub type BundleF64 = io::Bundle<f64>;

pub type SystemParamsF32 = SystemParams<f32>;
pub type DensityMatrixF32 = DensityMatrix<f32>;
pub type SuperoperatorF32 = Superoperator<f32>;
pub type SpectrumTraceF32 = SpectrumTrace<f32>;
pub type TimeSignalF32 = TimeSignal<f32>;
pub type CalibrationParamsF32 = CalibrationParams<f32>;
