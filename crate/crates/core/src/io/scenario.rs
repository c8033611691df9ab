use rayon::prelude::*;

use crate::analysis::{
    classify_regime, find_doublet, inverse_fourier, nlls_fit_auto, DoubletReport, FitModel, FitOutcome, Regime,
    RegimeReport, SpectralField, TimeSignal,
};
use crate::calibration::{
    fit_stark_line, number_splitting_spectrum, poisson_cutoff, poisson_pmf, stark_to_photons,
    CalibrationParams, StarkFit,
};
use crate::error::{Error, Result};
use crate::io::config::{CalibrationMhz, ScenarioConfig, ScenarioKind, SystemMhz};
use crate::scalar::{lit, mhz_to_angular, Real};
use crate::spectroscopy::{inject_noise, normalize_spectrum, sweep_spectrum, SpectrumTrace};

/// Time-domain fits use samples with `t ≤ FIT_WINDOW_KAPPA / κ`.
pub const FIT_WINDOW_KAPPA: f64 = 10.0;

/// Stages executed by [`run_plan`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunPlan {
    pub spectra: bool,
    pub time_domain: bool,
    pub fits: bool,
    pub doublets: bool,
    pub regimes: bool,
    pub calibration: bool,
}

impl RunPlan {
    pub fn all() -> Self {
        Self {
            spectra: true,
            time_domain: true,
            fits: true,
            doublets: true,
            regimes: true,
            calibration: true,
        }
    }

    pub fn for_scenario(kind: ScenarioKind) -> Self {
        match kind {
            ScenarioKind::Fig2 => Self {
                spectra: true,
                doublets: true,
                regimes: true,
                ..Self::default()
            },
            ScenarioKind::Fig3 => Self {
                spectra: true,
                time_domain: true,
                fits: true,
                doublets: true,
                ..Self::default()
            },
            ScenarioKind::Fig4 => Self {
                spectra: true,
                time_domain: true,
                fits: true,
                doublets: true,
                regimes: true,
                ..Self::default()
            },
            ScenarioKind::Custom => Self::all(),
        }
    }

    fn needs_traces(&self) -> bool {
        self.spectra || self.time_domain || self.fits || self.doublets
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumEntry<T: Real> {
    pub omega_c_mhz: f64,
    pub trace: SpectrumTrace<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SignalEntry<T: Real> {
    pub omega_c_mhz: f64,
    pub field: SpectralField,
    pub signal: TimeSignal<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitEntry<T: Real> {
    pub omega_c_mhz: f64,
    pub field: SpectralField,
    pub outcome: FitOutcome<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DoubletEntry<T: Real> {
    pub omega_c_mhz: f64,
    pub report: DoubletReport<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegimeEntry<T: Real> {
    pub omega_c_mhz: f64,
    pub report: RegimeReport<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CalibrationBundle<T: Real> {
    pub params: CalibrationParams<T>,
    /// `(Δ_ac, n̄_c)` pairs, angular.
    pub stark_points: Vec<(T, T)>,
    pub stark_fit: Option<StarkFit<T>>,
    /// `(n, P(n))` up to the truncation cutoff.
    pub poisson: Vec<(u32, T)>,
    pub omega_grid: Vec<T>,
    pub spectrum: Vec<T>,
}

/// Everything a run produces, ordered by coupler strength as configured.
#[derive(Clone, Debug, PartialEq)]
pub struct Bundle<T: Real> {
    pub scenario: ScenarioKind,
    pub spectra: Vec<SpectrumEntry<T>>,
    pub signals: Vec<SignalEntry<T>>,
    pub fits: Vec<FitEntry<T>>,
    pub doublets: Vec<DoubletEntry<T>>,
    pub regimes: Vec<RegimeEntry<T>>,
    pub calibration: Option<CalibrationBundle<T>>,
}

impl<T: Real> Bundle<T> {
    pub fn empty(scenario: ScenarioKind) -> Self {
        Self {
            scenario,
            spectra: Vec::new(),
            signals: Vec::new(),
            fits: Vec::new(),
            doublets: Vec::new(),
            regimes: Vec::new(),
            calibration: None,
        }
    }
}

/// Runs the stages implied by the configured scenario.
pub fn run_scenario<T: Real>(cfg: &ScenarioConfig) -> Result<Bundle<T>> {
    run_plan(cfg, &RunPlan::for_scenario(cfg.scenario))
}

pub fn run_plan<T: Real>(cfg: &ScenarioConfig, plan: &RunPlan) -> Result<Bundle<T>> {
    execute(cfg, plan).map_err(|e| Error::InScenario {
        scenario: cfg.scenario.label().to_string(),
        source: Box::new(e),
    })
}

struct CouplerRun<T: Real> {
    spectrum: Option<SpectrumEntry<T>>,
    signals: Vec<SignalEntry<T>>,
    fits: Vec<FitEntry<T>>,
    doublet: Option<DoubletEntry<T>>,
    regime: Option<RegimeEntry<T>>,
}

fn execute<T: Real>(cfg: &ScenarioConfig, plan: &RunPlan) -> Result<Bundle<T>> {
    cfg.validate()?;
    let runs = cfg
        .couplers()
        .into_par_iter()
        .enumerate()
        .map(|(i, oc)| run_coupler(cfg, plan, i, oc))
        .collect::<Result<Vec<_>>>()?;
    let mut bundle = Bundle::empty(cfg.scenario);
    for run in runs {
        bundle.spectra.extend(run.spectrum);
        bundle.signals.extend(run.signals);
        bundle.fits.extend(run.fits);
        bundle.doublets.extend(run.doublet);
        bundle.regimes.extend(run.regime);
    }
    if plan.calibration {
        let cal = cfg.calibration.clone().unwrap_or_default();
        bundle.calibration = Some(run_calibration(&cal)?);
    }
    Ok(bundle)
}

fn run_coupler<T: Real>(cfg: &ScenarioConfig, plan: &RunPlan, index: usize, oc_mhz: f64) -> Result<CouplerRun<T>> {
    let system = SystemMhz {
        omega_c: oc_mhz,
        ..cfg.system
    };
    let params = system.to_params::<T>()?;
    let regime = classify_regime(&params);
    let mut run = CouplerRun {
        spectrum: None,
        signals: Vec::new(),
        fits: Vec::new(),
        doublet: None,
        regime: plan.regimes.then_some(RegimeEntry {
            omega_c_mhz: oc_mhz,
            report: regime,
        }),
    };
    if !plan.needs_traces() {
        return Ok(run);
    }

    let spec = cfg.sweep.to_spec(params)?;
    let reference_spec = crate::spectroscopy::SweepSpec {
        base_params: params.with_omega_c(T::zero()),
        ..spec
    };
    let reference = sweep_spectrum(&reference_spec)?;
    let raw = sweep_spectrum(&spec)?;
    let mut trace = normalize_spectrum(&raw, &reference)?;
    if let Some(noise) = cfg.noise {
        // Distinct stream per coupler strength.
        trace = inject_noise(&trace, lit(noise.fraction), noise.seed.wrapping_add(index as u64))?;
    }

    if plan.doublets {
        run.doublet = Some(DoubletEntry {
            omega_c_mhz: oc_mhz,
            report: find_doublet(&trace),
        });
    }
    if plan.time_domain || plan.fits {
        let window = lit::<T>(FIT_WINDOW_KAPPA) / params.kappa;
        for field in [SpectralField::Transmission, SpectralField::Chi] {
            let signal = inverse_fourier(&trace, field)?;
            if plan.fits {
                let model = match (field, regime.regime) {
                    (SpectralField::Transmission, Regime::Eit) => FitModel::Exponential,
                    _ => FitModel::DampedCosine,
                };
                let part = signal.truncated(window);
                run.fits.push(FitEntry {
                    omega_c_mhz: oc_mhz,
                    field,
                    outcome: nlls_fit_auto(&part.times, &part.values, model)?,
                });
            }
            if plan.time_domain {
                run.signals.push(SignalEntry {
                    omega_c_mhz: oc_mhz,
                    field,
                    signal,
                });
            }
        }
    }
    if plan.spectra {
        run.spectrum = Some(SpectrumEntry {
            omega_c_mhz: oc_mhz,
            trace,
        });
    }
    Ok(run)
}

/// Stark-shift conversion, Poisson table and number-splitting spectrum.
pub fn run_calibration<T: Real>(cal: &CalibrationMhz) -> Result<CalibrationBundle<T>> {
    let params = cal.to_params::<T>()?;
    let stark_points = cal
        .stark_shifts
        .iter()
        .map(|&d| {
            let delta_ac = mhz_to_angular(lit::<T>(d));
            Ok((delta_ac, stark_to_photons(delta_ac, params.chi_shift)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let stark_fit = if stark_points.len() >= 2 && stark_points.iter().any(|(_, n)| *n != T::zero()) {
        let pts: Vec<(T, T)> = stark_points.iter().map(|(d, n)| (*n, *d)).collect();
        Some(fit_stark_line(&pts)?)
    } else {
        None
    };
    let poisson = (0..=poisson_cutoff(params.nbar))
        .map(|n| (n, poisson_pmf(params.nbar, n)))
        .collect();
    let span = mhz_to_angular(lit::<T>(cal.span));
    let last = T::from_usize(cal.n_points - 1).unwrap();
    let omega_grid: Vec<T> = (0..cal.n_points)
        .map(|k| -span + lit::<T>(2.0) * span * T::from_usize(k).unwrap() / last)
        .collect();
    let spectrum = number_splitting_spectrum(&params, &omega_grid)?;
    Ok(CalibrationBundle {
        params,
        stark_points,
        stark_fit,
        poisson,
        omega_grid,
        spectrum,
    })
}
