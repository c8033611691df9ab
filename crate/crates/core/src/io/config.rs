use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::calibration::CalibrationParams;
use crate::error::{Error, Result};
use crate::lindblad::{DecayTarget, SystemParams};
use crate::scalar::{lit, mhz_to_angular, Real};
use crate::spectroscopy::{default_half_span, SweepSpec, DEFAULT_SWEEP_POINTS};

/// Coupler strengths (Ω_c/2π, MHz) used by the spectrum and time-domain presets.
pub const FIG2_COUPLERS_MHZ: [f64; 5] = [0.2, 0.9, 1.8, 3.6, 7.3];
pub const FIG4_COUPLERS_MHZ: [f64; 2] = [0.4, 4.0];
pub const FIG4_GAMMA_MHZ: f64 = 0.02;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioKind {
    Fig2,
    Fig3,
    Fig4,
    #[default]
    Custom,
}

impl ScenarioKind {
    pub fn label(self) -> &'static str {
        match self {
            ScenarioKind::Fig2 => "fig2",
            ScenarioKind::Fig3 => "fig3",
            ScenarioKind::Fig4 => "fig4",
            ScenarioKind::Custom => "custom",
        }
    }

    fn default_couplers(self) -> Vec<f64> {
        match self {
            ScenarioKind::Fig2 | ScenarioKind::Fig3 => FIG2_COUPLERS_MHZ.to_vec(),
            ScenarioKind::Fig4 => FIG4_COUPLERS_MHZ.to_vec(),
            ScenarioKind::Custom => Vec::new(),
        }
    }

    fn default_gamma_mhz(self) -> f64 {
        match self {
            ScenarioKind::Fig4 => FIG4_GAMMA_MHZ,
            _ => 1.18,
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig2" => Ok(ScenarioKind::Fig2),
            "fig3" => Ok(ScenarioKind::Fig3),
            "fig4" => Ok(ScenarioKind::Fig4),
            "custom" => Ok(ScenarioKind::Custom),
            other => Err(Error::validation("scenario", format!("unknown scenario `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::validation("format", format!("expected csv or json, got `{other}`"))),
        }
    }
}

/// System rates in MHz (`x/2π`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemMhz {
    pub kappa: f64,
    pub gamma: f64,
    pub omega_p: f64,
    pub omega_c: f64,
    pub delta: f64,
    pub f_decay_target: DecayTarget,
}

impl SystemMhz {
    fn defaults(kind: ScenarioKind) -> Self {
        Self {
            kappa: 1.26,
            gamma: kind.default_gamma_mhz(),
            omega_p: 0.252,
            omega_c: 0.0,
            delta: 0.0,
            f_decay_target: DecayTarget::ToG0,
        }
    }

    /// Converts to angular units and validates.
    pub fn to_params<T: Real>(&self) -> Result<SystemParams<T>> {
        for (name, v) in [
            ("kappa", self.kappa),
            ("gamma", self.gamma),
            ("omega_p", self.omega_p),
            ("omega_c", self.omega_c),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::validation(name, format!("must be finite and non-negative, got {v} MHz")));
            }
        }
        if !self.delta.is_finite() {
            return Err(Error::validation("delta", "must be finite"));
        }
        let p = SystemParams::from_mhz(
            lit(self.kappa),
            lit(self.gamma),
            lit(self.omega_p),
            lit(self.omega_c),
            lit(self.delta),
        )?;
        Ok(p.with_decay_target(self.f_decay_target))
    }
}

/// Detuning sweep in MHz. Missing bounds fall back to the default span for
/// each coupler strength.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepMhz {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_max: Option<f64>,
    pub n_points: usize,
}

impl Default for SweepMhz {
    fn default() -> Self {
        Self {
            delta_min: None,
            delta_max: None,
            n_points: DEFAULT_SWEEP_POINTS,
        }
    }
}

impl SweepMhz {
    pub fn to_spec<T: Real>(&self, base: SystemParams<T>) -> Result<SweepSpec<T>> {
        let half = default_half_span(&base);
        let lo = self.delta_min.map(|v| mhz_to_angular(lit::<T>(v))).unwrap_or(-half);
        let hi = self.delta_max.map(|v| mhz_to_angular(lit::<T>(v))).unwrap_or(half);
        SweepSpec::new(lo, hi, self.n_points, base)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    pub fraction: f64,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub path: PathBuf,
    pub format: OutputFormat,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            path: PathBuf::from("out"),
            format: OutputFormat::Csv,
        }
    }
}

/// Calibration inputs in MHz.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationMhz {
    pub chi_shift: f64,
    pub nbar: f64,
    pub gamma_q: f64,
    /// ac-Stark shifts to convert into coupler photon numbers.
    pub stark_shifts: Vec<f64>,
    /// Half-span of the number-splitting spectrum.
    pub span: f64,
    pub n_points: usize,
}

impl Default for CalibrationMhz {
    fn default() -> Self {
        Self {
            chi_shift: -11.2,
            nbar: 0.16,
            gamma_q: 1.0,
            stark_shifts: vec![-0.1, -6.5],
            span: 60.0,
            n_points: 1201,
        }
    }
}

impl CalibrationMhz {
    pub fn to_params<T: Real>(&self) -> Result<CalibrationParams<T>> {
        let p = CalibrationParams {
            chi_shift: mhz_to_angular(lit(self.chi_shift)),
            nbar: lit(self.nbar),
            nbar_c: T::zero(),
            delta_ac: T::zero(),
            gamma_q: mhz_to_angular(lit(self.gamma_q)),
        };
        p.validate()?;
        if !(p.gamma_q > T::zero()) {
            return Err(Error::validation("gamma_q", "must be positive"));
        }
        if self.chi_shift == 0.0 {
            return Err(Error::validation("chi_shift", "must be non-zero"));
        }
        if !(self.span > 0.0 && self.span.is_finite()) {
            return Err(Error::validation("span", "must be positive"));
        }
        if self.n_points < 2 {
            return Err(Error::validation("n_points", "need at least two points"));
        }
        Ok(p)
    }
}

/// Fully resolved run configuration. All values are in MHz as written in
/// the source document; conversion happens in [`SystemMhz::to_params`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    pub coupler_list: Vec<f64>,
    pub system: SystemMhz,
    pub sweep: SweepMhz,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseConfig>,
    pub output: OutputConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calibration: Option<CalibrationMhz>,
}

impl ScenarioConfig {
    /// Defaults for a scenario, as if loaded from an empty document.
    pub fn preset(kind: ScenarioKind) -> Self {
        Self {
            scenario: kind,
            coupler_list: kind.default_couplers(),
            system: SystemMhz::defaults(kind),
            sweep: SweepMhz::default(),
            noise: None,
            output: OutputConfig::default(),
            calibration: None,
        }
    }

    /// Coupler strengths to run, in MHz: the list, or the single system value.
    pub fn couplers(&self) -> Vec<f64> {
        if self.coupler_list.is_empty() {
            vec![self.system.omega_c]
        } else {
            self.coupler_list.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.system.to_params::<f64>()?;
        if matches!(self.scenario, ScenarioKind::Fig2 | ScenarioKind::Fig3) && self.coupler_list.is_empty() {
            return Err(Error::validation("coupler_list", "must be non-empty for this scenario"));
        }
        for (i, &oc) in self.coupler_list.iter().enumerate() {
            if !(oc >= 0.0 && oc.is_finite()) {
                return Err(Error::validation(
                    format!("coupler_list[{i}]"),
                    "must be finite and non-negative",
                ));
            }
        }
        for oc in self.couplers() {
            let base = SystemMhz { omega_c: oc, ..self.system }.to_params::<f64>()?;
            self.sweep.to_spec(base)?;
        }
        if let Some(noise) = &self.noise {
            if !(noise.fraction >= 0.0 && noise.fraction.is_finite()) {
                return Err(Error::validation("fraction", "must be finite and non-negative"));
            }
        }
        if let Some(cal) = &self.calibration {
            cal.to_params::<f64>()?;
        }
        Ok(())
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Serialize(e.to_string()))
    }
}

/// Source document as written, with every key optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    scenario: Option<ScenarioKind>,
    coupler_list: Option<Vec<f64>>,
    #[serde(default)]
    system: RawSystem,
    sweep: Option<RawSweep>,
    noise: Option<NoiseConfig>,
    output: Option<RawOutput>,
    calibration: Option<RawCalibration>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    kappa: Option<f64>,
    gamma: Option<f64>,
    omega_p: Option<f64>,
    omega_c: Option<f64>,
    delta: Option<f64>,
    f_decay_target: Option<DecayTarget>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    delta_min: Option<f64>,
    delta_max: Option<f64>,
    n_points: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    path: Option<PathBuf>,
    format: Option<OutputFormat>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCalibration {
    chi_shift: Option<f64>,
    nbar: Option<f64>,
    gamma_q: Option<f64>,
    stark_shifts: Option<Vec<f64>>,
    span: Option<f64>,
    n_points: Option<usize>,
}

/// Parses and validates a TOML configuration document. Missing keys take
/// the defaults of the selected scenario.
pub fn load_config(text: &str) -> Result<ScenarioConfig> {
    load_config_as(text, None)
}

/// [`load_config`] with the scenario forced to `kind`, so that its defaults
/// apply to keys missing from the document.
pub fn load_config_as(text: &str, kind: Option<ScenarioKind>) -> Result<ScenarioConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| parse_error(text, &e))?;
    let kind = kind.or(raw.scenario).unwrap_or_default();
    let mut cfg = ScenarioConfig::preset(kind);
    if let Some(list) = raw.coupler_list {
        cfg.coupler_list = list;
    }
    let s = raw.system;
    let sys = &mut cfg.system;
    sys.kappa = s.kappa.unwrap_or(sys.kappa);
    sys.gamma = s.gamma.unwrap_or(sys.gamma);
    sys.omega_p = s.omega_p.unwrap_or(sys.omega_p);
    sys.omega_c = s.omega_c.unwrap_or(sys.omega_c);
    sys.delta = s.delta.unwrap_or(sys.delta);
    sys.f_decay_target = s.f_decay_target.unwrap_or(sys.f_decay_target);
    if let Some(sw) = raw.sweep {
        cfg.sweep.delta_min = sw.delta_min;
        cfg.sweep.delta_max = sw.delta_max;
        cfg.sweep.n_points = sw.n_points.unwrap_or(cfg.sweep.n_points);
    }
    cfg.noise = raw.noise;
    if let Some(out) = raw.output {
        cfg.output.path = out.path.unwrap_or(cfg.output.path);
        cfg.output.format = out.format.unwrap_or(cfg.output.format);
    }
    if let Some(c) = raw.calibration {
        let d = CalibrationMhz::default();
        cfg.calibration = Some(CalibrationMhz {
            chi_shift: c.chi_shift.unwrap_or(d.chi_shift),
            nbar: c.nbar.unwrap_or(d.nbar),
            gamma_q: c.gamma_q.unwrap_or(d.gamma_q),
            stark_shifts: c.stark_shifts.unwrap_or(d.stark_shifts),
            span: c.span.unwrap_or(d.span),
            n_points: c.n_points.unwrap_or(d.n_points),
        });
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config_file(path: &Path, kind: Option<ScenarioKind>) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    load_config_as(&text, kind)
}

fn parse_error(text: &str, err: &toml::de::Error) -> Error {
    let (line, column) = match err.span() {
        Some(span) => line_column(text, span.start),
        None => (1, 1),
    };
    Error::ConfigParse {
        line,
        column,
        message: err.message().to_string(),
    }
}

/// One-based line and column of a byte offset.
fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(text.len());
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}
