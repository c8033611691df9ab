//! Configuration loading, scenario execution and serialization.

mod config;
mod output;
mod scenario;

pub use config::{
    load_config, load_config_as, load_config_file, CalibrationMhz, NoiseConfig, OutputConfig, OutputFormat, ScenarioConfig,
    ScenarioKind, SweepMhz, SystemMhz, FIG2_COUPLERS_MHZ, FIG4_COUPLERS_MHZ, FIG4_GAMMA_MHZ,
};
pub use output::{
    fmt12, mhz_label, read_spectrum, round12, signal_file_stem, spectrum_file_stem, write_output, DoubletRow,
    FitRow, PoissonRow, RegimeRow, SignalRow, SpectrumRow, SplittingRow, StarkRow, Tables, DOUBLET_HEADER,
    FIT_HEADER, POISSON_HEADER, REGIME_HEADER, SIGNAL_HEADER, SPECTRUM_HEADER, SPLITTING_HEADER, STARK_HEADER,
};
pub use scenario::{
    run_calibration, run_plan, run_scenario, Bundle, CalibrationBundle, DoubletEntry, FitEntry, RegimeEntry, RunPlan,
    SignalEntry, SpectrumEntry, FIT_WINDOW_KAPPA,
};
