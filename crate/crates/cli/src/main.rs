use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use xi_cqed::io::{
    load_config_file, run_plan, write_output, Bundle, NoiseConfig, OutputFormat, RunPlan, ScenarioConfig,
    ScenarioKind,
};
use xi_cqed::scalar::angular_to_mhz;
use xi_cqed::Error;

/// `println!` that ignores a closed stdout.
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

/// Driven three-level ladder circuit-QED simulator.
#[derive(Debug, Parser)]
#[command(name = "xi-cqed", version)]
struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory (overrides `[output] path`).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Multiplicative transmission noise, e.g. 0.04 for ±4%.
    #[arg(long, global = true, value_name = "FRACTION")]
    noise_level: Option<f64>,

    #[arg(long, global = true, value_name = "INT")]
    noise_seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Preset {
    Fig2,
    Fig3,
    Fig4,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Normalized transmission, phase and dispersion spectra per coupler strength.
    Spectrum,
    /// Inverse Fourier transforms of the transmission and dispersion spectra.
    Timedomain,
    /// Damped-cosine or exponential fits to the time-domain signals.
    Fit,
    /// EIT/ATS classification from the coupler strength and damping rates.
    Classify,
    /// ac-Stark photon calibration and number-splitting spectrum.
    Calibrate,
    /// Run a preset scenario.
    Scenario {
        #[arg(value_enum)]
        name: Preset,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 2 } else { 1 })
        }
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    let forced = match cli.command {
        Command::Scenario { name } => Some(match name {
            Preset::Fig2 => ScenarioKind::Fig2,
            Preset::Fig3 => ScenarioKind::Fig3,
            Preset::Fig4 => ScenarioKind::Fig4,
        }),
        _ => None,
    };
    let mut cfg = match &cli.config {
        Some(path) => load_config_file(path, forced)?,
        None => ScenarioConfig::preset(forced.unwrap_or_default()),
    };
    apply_overrides(&mut cfg, &cli);
    cfg.validate()?;

    let plan = match cli.command {
        Command::Spectrum => RunPlan {
            spectra: true,
            doublets: true,
            ..RunPlan::default()
        },
        Command::Timedomain => RunPlan {
            time_domain: true,
            ..RunPlan::default()
        },
        Command::Fit => RunPlan {
            fits: true,
            doublets: true,
            ..RunPlan::default()
        },
        Command::Classify => RunPlan {
            regimes: true,
            ..RunPlan::default()
        },
        Command::Calibrate => RunPlan {
            calibration: true,
            ..RunPlan::default()
        },
        Command::Scenario { .. } => RunPlan::for_scenario(cfg.scenario),
    };
    let bundle = run_plan::<f64>(&cfg, &plan)?;
    report(&bundle);
    for path in write_output(&bundle, &cfg.output.path, cfg.output.format)? {
        out!("wrote {}", path.display());
    }
    Ok(())
}

fn apply_overrides(cfg: &mut ScenarioConfig, cli: &Cli) {
    if let Some(out) = &cli.out {
        cfg.output.path = out.clone();
    }
    if let Some(f) = cli.format {
        cfg.output.format = match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        };
    }
    if let Some(fraction) = cli.noise_level {
        let seed = cli.noise_seed.or(cfg.noise.map(|n| n.seed)).unwrap_or(0);
        cfg.noise = Some(NoiseConfig { fraction, seed });
    } else if let (Some(seed), Some(noise)) = (cli.noise_seed, cfg.noise.as_mut()) {
        noise.seed = seed;
    }
}

fn report(bundle: &Bundle<f64>) {
    let mhz = angular_to_mhz::<f64>;
    for r in &bundle.regimes {
        out!(
            "Omega_c = {} MHz: {} (threshold {:.4} MHz, resolvable {})",
            r.omega_c_mhz,
            r.report.regime.label(),
            mhz(r.report.threshold),
            r.report.resolvable
        );
    }
    for d in &bundle.doublets {
        out!(
            "Omega_c = {} MHz: {} peak(s), separation {:.4} MHz",
            d.omega_c_mhz,
            d.report.n_peaks,
            mhz(d.report.separation)
        );
    }
    for f in &bundle.fits {
        let params: Vec<String> = f.outcome.named().iter().map(|(n, v)| format!("{n}={v:.6}")).collect();
        out!(
            "Omega_c = {} MHz: {} fit to F^-1({}) converged={} {}",
            f.omega_c_mhz,
            f.outcome.model.label(),
            f.field.label(),
            f.outcome.converged,
            params.join(" ")
        );
    }
    if let Some(c) = &bundle.calibration {
        for (d, n) in &c.stark_points {
            out!("Delta_ac = {:.4} MHz -> nbar_c = {n:.6}", mhz(*d));
        }
        if let Some(fit) = &c.stark_fit {
            out!("chi_shift from Stark line = {:.4} MHz", mhz(fit.chi_shift));
        }
        if let Some((_, p2)) = c.poisson.get(2) {
            out!("P(n=2) at nbar = {} is {p2:.5}", c.params.nbar);
        }
    }
}
