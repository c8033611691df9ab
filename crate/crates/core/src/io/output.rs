use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::config::OutputFormat;
use crate::io::scenario::Bundle;
use crate::scalar::{angular_to_mhz, to_f64, Real};

pub const SPECTRUM_HEADER: &str = "delta_mhz, T, phi_deg, chi, re_rho10, im_rho10, pop_g1, pop_f0";
pub const SIGNAL_HEADER: &str = "t_us, pf";
pub const FIT_HEADER: &str = "omega_c_mhz, field, model, converged, iterations, residual_rms, param, value";
pub const DOUBLET_HEADER: &str = "omega_c_mhz, n_peaks, separation_mhz, centers_mhz";
pub const REGIME_HEADER: &str =
    "omega_c_mhz, regime, threshold_mhz, pole1_re_mhz, pole1_im_mhz, pole2_re_mhz, pole2_im_mhz, resolvable";
pub const STARK_HEADER: &str = "delta_ac_mhz, nbar_c";
pub const POISSON_HEADER: &str = "n, p";
pub const SPLITTING_HEADER: &str = "omega_mhz, s";

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub delta_mhz: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub phi_deg: f64,
    pub chi: f64,
    pub re_rho10: f64,
    pub im_rho10: f64,
    pub pop_g1: f64,
    pub pop_f0: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignalRow {
    pub t_us: f64,
    pub pf: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitRow {
    pub omega_c_mhz: f64,
    pub field: String,
    pub model: String,
    pub converged: bool,
    pub iterations: usize,
    pub residual_rms: f64,
    pub param: String,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DoubletRow {
    pub omega_c_mhz: f64,
    pub n_peaks: usize,
    pub separation_mhz: f64,
    pub centers_mhz: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeRow {
    pub omega_c_mhz: f64,
    pub regime: String,
    pub threshold_mhz: f64,
    pub pole1_re_mhz: f64,
    pub pole1_im_mhz: f64,
    pub pole2_re_mhz: f64,
    pub pole2_im_mhz: f64,
    pub resolvable: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StarkRow {
    pub delta_ac_mhz: f64,
    pub nbar_c: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoissonRow {
    pub n: u32,
    pub p: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplittingRow {
    pub omega_mhz: f64,
    pub s: f64,
}

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if x.is_finite() {
        format!("{x:.11e}").parse().unwrap_or(x)
    } else {
        x
    }
}

/// Formats with 12 significant digits in scientific notation.
pub fn fmt12(x: f64) -> String {
    format!("{x:.11e}")
}

/// `7.3 → "7.3"`, `4 → "4.0"`: the coupler value as used in file names.
pub fn mhz_label(x: f64) -> String {
    let s = format!("{}", round12(x));
    if s.contains('.') || s.contains('e') || !x.is_finite() {
        s
    } else {
        format!("{s}.0")
    }
}

pub fn spectrum_file_stem(omega_c_mhz: f64) -> String {
    format!("spectrum_omega_c_{}MHz", mhz_label(omega_c_mhz))
}

pub fn signal_file_stem(field_label: &str, omega_c_mhz: f64) -> String {
    format!("timesignal_{field_label}_omega_c_{}MHz", mhz_label(omega_c_mhz))
}

trait CsvRow {
    fn cells(&self) -> Vec<String>;
}

impl CsvRow for SpectrumRow {
    fn cells(&self) -> Vec<String> {
        [
            self.delta_mhz,
            self.t,
            self.phi_deg,
            self.chi,
            self.re_rho10,
            self.im_rho10,
            self.pop_g1,
            self.pop_f0,
        ]
        .iter()
        .map(|v| fmt12(*v))
        .collect()
    }
}

impl CsvRow for SignalRow {
    fn cells(&self) -> Vec<String> {
        vec![fmt12(self.t_us), fmt12(self.pf)]
    }
}

impl CsvRow for FitRow {
    fn cells(&self) -> Vec<String> {
        vec![
            fmt12(self.omega_c_mhz),
            self.field.clone(),
            self.model.clone(),
            self.converged.to_string(),
            self.iterations.to_string(),
            fmt12(self.residual_rms),
            self.param.clone(),
            fmt12(self.value),
        ]
    }
}

impl CsvRow for DoubletRow {
    fn cells(&self) -> Vec<String> {
        vec![
            fmt12(self.omega_c_mhz),
            self.n_peaks.to_string(),
            fmt12(self.separation_mhz),
            self.centers_mhz.iter().map(|c| fmt12(*c)).collect::<Vec<_>>().join(";"),
        ]
    }
}

impl CsvRow for RegimeRow {
    fn cells(&self) -> Vec<String> {
        vec![
            fmt12(self.omega_c_mhz),
            self.regime.clone(),
            fmt12(self.threshold_mhz),
            fmt12(self.pole1_re_mhz),
            fmt12(self.pole1_im_mhz),
            fmt12(self.pole2_re_mhz),
            fmt12(self.pole2_im_mhz),
            self.resolvable.to_string(),
        ]
    }
}

impl CsvRow for StarkRow {
    fn cells(&self) -> Vec<String> {
        vec![fmt12(self.delta_ac_mhz), fmt12(self.nbar_c)]
    }
}

impl CsvRow for PoissonRow {
    fn cells(&self) -> Vec<String> {
        vec![self.n.to_string(), fmt12(self.p)]
    }
}

impl CsvRow for SplittingRow {
    fn cells(&self) -> Vec<String> {
        vec![fmt12(self.omega_mhz), fmt12(self.s)]
    }
}

/// Rows of a bundle in output units (MHz, degrees), before formatting.
pub struct Tables {
    pub spectra: Vec<(f64, Vec<SpectrumRow>)>,
    pub signals: Vec<(String, f64, Vec<SignalRow>)>,
    pub fits: Vec<FitRow>,
    pub doublets: Vec<DoubletRow>,
    pub regimes: Vec<RegimeRow>,
    pub calibration: Option<(Vec<StarkRow>, Vec<PoissonRow>, Vec<SplittingRow>)>,
}

impl Tables {
    pub fn from_bundle<T: Real>(bundle: &Bundle<T>) -> Self {
        let mhz = |x: T| to_f64(angular_to_mhz(x));
        let spectra = bundle
            .spectra
            .iter()
            .map(|e| {
                let rows = e
                    .trace
                    .samples
                    .iter()
                    .map(|s| SpectrumRow {
                        delta_mhz: mhz(s.delta),
                        t: to_f64(s.transmission),
                        phi_deg: to_f64(s.phi).to_degrees(),
                        chi: to_f64(s.chi),
                        re_rho10: to_f64(s.rho10.re),
                        im_rho10: to_f64(s.rho10.im),
                        pop_g1: to_f64(s.pop_g1),
                        pop_f0: to_f64(s.pop_f0),
                    })
                    .collect();
                (e.omega_c_mhz, rows)
            })
            .collect();
        let signals = bundle
            .signals
            .iter()
            .map(|e| {
                let rows = e
                    .signal
                    .times
                    .iter()
                    .zip(&e.signal.values)
                    .map(|(t, v)| SignalRow {
                        t_us: to_f64(*t),
                        pf: to_f64(*v),
                    })
                    .collect();
                (e.field.label().to_string(), e.omega_c_mhz, rows)
            })
            .collect();
        let fits = bundle
            .fits
            .iter()
            .flat_map(|e| {
                e.outcome.named().into_iter().map(move |(name, v)| FitRow {
                    omega_c_mhz: e.omega_c_mhz,
                    field: e.field.label().to_string(),
                    model: e.outcome.model.label().to_string(),
                    converged: e.outcome.converged,
                    iterations: e.outcome.iterations,
                    residual_rms: to_f64(e.outcome.residual_rms),
                    param: name.to_string(),
                    value: to_f64(v),
                })
            })
            .collect();
        let doublets = bundle
            .doublets
            .iter()
            .map(|e| DoubletRow {
                omega_c_mhz: e.omega_c_mhz,
                n_peaks: e.report.n_peaks,
                separation_mhz: mhz(e.report.separation),
                centers_mhz: e.report.centers.iter().map(|c| mhz(*c)).collect(),
            })
            .collect();
        let regimes = bundle
            .regimes
            .iter()
            .map(|e| {
                let [p1, p2] = e.report.poles;
                RegimeRow {
                    omega_c_mhz: e.omega_c_mhz,
                    regime: e.report.regime.label().to_string(),
                    threshold_mhz: mhz(e.report.threshold),
                    pole1_re_mhz: mhz(p1.re),
                    pole1_im_mhz: mhz(p1.im),
                    pole2_re_mhz: mhz(p2.re),
                    pole2_im_mhz: mhz(p2.im),
                    resolvable: e.report.resolvable,
                }
            })
            .collect();
        let calibration = bundle.calibration.as_ref().map(|c| {
            let stark = c
                .stark_points
                .iter()
                .map(|(d, n)| StarkRow {
                    delta_ac_mhz: mhz(*d),
                    nbar_c: to_f64(*n),
                })
                .collect();
            let poisson = c
                .poisson
                .iter()
                .map(|(n, p)| PoissonRow { n: *n, p: to_f64(*p) })
                .collect();
            let splitting = c
                .omega_grid
                .iter()
                .zip(&c.spectrum)
                .map(|(w, s)| SplittingRow {
                    omega_mhz: mhz(*w),
                    s: to_f64(*s),
                })
                .collect();
            (stark, poisson, splitting)
        });
        Tables {
            spectra,
            signals,
            fits,
            doublets,
            regimes,
            calibration,
        }
    }
}

/// Writes the bundle into `dir` and returns the files written, in order.
///
/// Spectra and time signals get one file per coupler strength (and field);
/// an empty set still yields a header-only `spectrum` / `timesignal` file.
/// Fit, doublet and regime tables are always written.
pub fn write_output<T: Real>(bundle: &Bundle<T>, dir: &Path, format: OutputFormat) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let tables = Tables::from_bundle(bundle);
    let mut w = Writer {
        dir,
        format,
        written: Vec::new(),
    };
    if tables.spectra.is_empty() {
        w.table::<SpectrumRow>("spectrum", SPECTRUM_HEADER, &[])?;
    }
    for (oc, rows) in &tables.spectra {
        w.table(&spectrum_file_stem(*oc), SPECTRUM_HEADER, rows)?;
    }
    if tables.signals.is_empty() {
        w.table::<SignalRow>("timesignal", SIGNAL_HEADER, &[])?;
    }
    for (label, oc, rows) in &tables.signals {
        w.table(&signal_file_stem(label, *oc), SIGNAL_HEADER, rows)?;
    }
    w.table("fits", FIT_HEADER, &tables.fits)?;
    w.table("doublets", DOUBLET_HEADER, &tables.doublets)?;
    w.table("regimes", REGIME_HEADER, &tables.regimes)?;
    if let Some((stark, poisson, splitting)) = &tables.calibration {
        w.table("stark_photons", STARK_HEADER, stark)?;
        w.table("poisson", POISSON_HEADER, poisson)?;
        w.table("number_splitting", SPLITTING_HEADER, splitting)?;
    }
    Ok(w.written)
}

struct Writer<'a> {
    dir: &'a Path,
    format: OutputFormat,
    written: Vec<PathBuf>,
}

impl Writer<'_> {
    fn table<R: CsvRow + Serialize>(&mut self, stem: &str, header: &str, rows: &[R]) -> Result<()> {
        let path = self.dir.join(format!("{stem}.{}", self.format.extension()));
        let text = match self.format {
            OutputFormat::Csv => render_csv(header, rows),
            OutputFormat::Json => render_json(rows)?,
        };
        fs::write(&path, text).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?;
        self.written.push(path);
        Ok(())
    }
}

fn render_csv<R: CsvRow>(header: &str, rows: &[R]) -> String {
    let mut out = String::with_capacity(header.len() + 1 + rows.len() * 64);
    out.push_str(header);
    out.push('\n');
    for r in rows {
        let _ = writeln!(out, "{}", r.cells().join(", "));
    }
    out
}

fn render_json<R: Serialize>(rows: &[R]) -> Result<String> {
    let mut value = serde_json::to_value(rows).map_err(|e| Error::Serialize(e.to_string()))?;
    round_numbers(&mut value);
    let mut s = serde_json::to_string_pretty(&value).map_err(|e| Error::Serialize(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn round_numbers(v: &mut serde_json::Value) {
    match v {
        serde_json::Value::Number(n) if n.is_f64() => {
            if let Some(r) = n.as_f64().and_then(|x| serde_json::Number::from_f64(round12(x))) {
                *n = r;
            }
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(round_numbers),
        serde_json::Value::Object(map) => map.values_mut().for_each(round_numbers),
        _ => {}
    }
}

/// Reads a spectrum written by [`write_output`] in either format.
pub fn read_spectrum(path: &Path) -> Result<Vec<SpectrumRow>> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    if path.extension().is_some_and(|e| e == "json") {
        return serde_json::from_str(&text).map_err(|e| Error::Serialize(e.to_string()));
    }
    let mut lines = text.lines();
    if lines.next() != Some(SPECTRUM_HEADER) {
        return Err(Error::Serialize(format!("{}: unexpected header", path.display())));
    }
    lines
        .filter(|l| !l.is_empty())
        .map(|l| {
            let v: Vec<f64> = l
                .split(", ")
                .map(|c| c.parse::<f64>().map_err(|e| Error::Serialize(e.to_string())))
                .collect::<Result<_>>()?;
            if v.len() != 8 {
                return Err(Error::Serialize(format!("expected 8 columns, got {}", v.len())));
            }
            Ok(SpectrumRow {
                delta_mhz: v[0],
                t: v[1],
                phi_deg: v[2],
                chi: v[3],
                re_rho10: v[4],
                im_rho10: v[5],
                pop_g1: v[6],
                pop_f0: v[7],
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::config::ScenarioKind;

    #[test]
    fn twelve_digit_formatting() {
        assert_eq!(fmt12(1.0), "1.00000000000e0");
        assert_eq!(round12(0.1 + 0.2), 0.3);
        assert_eq!(round12(1.234567890123456), 1.23456789012);
        assert_eq!(mhz_label(7.3), "7.3");
        assert_eq!(mhz_label(4.0), "4.0");
        assert_eq!(spectrum_file_stem(0.2), "spectrum_omega_c_0.2MHz");
    }

    #[test]
    fn empty_bundle_writes_headers() {
        let dir = tempfile::tempdir().unwrap();
        let files = write_output(&Bundle::<f64>::empty(ScenarioKind::Custom), dir.path(), OutputFormat::Csv).unwrap();
        assert_eq!(files.len(), 5);
        let spectrum = fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
        assert_eq!(spectrum, format!("{SPECTRUM_HEADER}\n"));
        let signal = fs::read_to_string(dir.path().join("timesignal.csv")).unwrap();
        assert_eq!(signal, "t_us, pf\n");
        let json = write_output(&Bundle::<f64>::empty(ScenarioKind::Custom), dir.path(), OutputFormat::Json).unwrap();
        assert_eq!(fs::read_to_string(&json[0]).unwrap().trim(), "[]");
    }
}
