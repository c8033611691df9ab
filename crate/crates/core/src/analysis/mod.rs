//! Time-domain analysis of spectra, curve fitting, doublet detection and
//! EIT/ATS regime classification.

mod fit;
mod fourier;
mod peaks;
mod regime;

pub use fit::{
    initial_guess, levenberg_marquardt, nlls_fit, nlls_fit_auto, FitModel, FitOutcome, LmOptions, LmReport,
};
pub use fourier::{
    inverse_fourier, inverse_fourier_windowed, transform, uniform_step, SpectralField, TimeSignal, Window,
    MIN_TRANSFORM_POINTS,
};
pub use peaks::{find_doublet, find_doublet_with, locate_peaks, moving_average, DoubletReport, PeakOptions};
pub use regime::{classify_regime, Regime, RegimeReport};
