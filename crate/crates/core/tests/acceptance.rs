//! Acceptance criteria 1–9. Runs as a plain binary and prints one line per
//! criterion; exits non-zero if any criterion fails.

use std::f64::consts::TAU;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xi_cqed::analysis::{
    classify_regime, find_doublet, inverse_fourier, nlls_fit, nlls_fit_auto, FitModel, Regime, SpectralField,
};
use xi_cqed::calibration::{
    fit_number_splitting, number_splitting_spectrum, poisson_pmf, stark_to_photons, CalibrationParams,
};
use xi_cqed::io::FIG2_COUPLERS_MHZ;
use xi_cqed::lindblad::{evolve_final, steady_state, DensityMatrix, Level, SystemParams};
use xi_cqed::linalg::Mat3;
use xi_cqed::spectroscopy::{normalize_spectrum, sweep_spectrum, weak_probe_coherence, SweepSpec};
use xi_cqed::Cplx;

type P = SystemParams<f64>;

fn mhz(x: f64) -> f64 {
    TAU * x
}

fn device(omega_c_mhz: f64) -> P {
    P::from_mhz(1.26, 1.18, 0.252, omega_c_mhz, 0.0).unwrap()
}

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn normalized_trace(params: P) -> xi_cqed::SpectrumTraceF64 {
    let spec = SweepSpec::default_for(params);
    let reference = sweep_spectrum(&SweepSpec {
        base_params: params.with_omega_c(0.0),
        ..spec
    })
    .unwrap();
    normalize_spectrum(&sweep_spectrum(&spec).unwrap(), &reference).unwrap()
}

fn criterion_1() -> Verdict {
    let p = poisson_pmf(0.16_f64, 2);
    verdict((p - 0.011).abs() <= 0.0005, format!("P(n=2 | nbar=0.16) = {p:.6}"))
}

fn criterion_2() -> Verdict {
    let chi = mhz(-11.2);
    let lo = stark_to_photons(mhz(-0.1), chi).unwrap();
    let hi = stark_to_photons(mhz(-6.5), chi).unwrap();
    let e_lo = (lo / 0.0044 - 1.0).abs();
    let e_hi = (hi / 0.286 - 1.0).abs();
    verdict(
        e_lo <= 0.02 && e_hi <= 0.02,
        format!(
            "nbar_c = {lo:.5} ({:+.2}%), {hi:.5} ({:+.2}%)",
            100.0 * (lo / 0.0044 - 1.0),
            100.0 * (hi / 0.286 - 1.0)
        ),
    )
}

fn criterion_3() -> Verdict {
    let eit = classify_regime(&P::from_mhz(1.26, 0.02, 0.252, 0.4, 0.0).unwrap());
    let ats = classify_regime(&P::from_mhz(1.26, 0.02, 0.252, 4.0, 0.0).unwrap());
    verdict(
        eit.regime == Regime::Eit && ats.regime == Regime::Ats,
        format!("0.4 MHz -> {}, 4.0 MHz -> {}", eit.regime.label(), ats.regime.label()),
    )
}

fn criterion_4() -> Verdict {
    let low = find_doublet(&normalized_trace(device(0.2)));
    let p = device(7.3);
    let high = find_doublet(&normalized_trace(p));
    let oracle = (p.omega_c.powi(2) - ((p.kappa - p.gamma) / 2.0).powi(2)).sqrt();
    let err = (high.separation / oracle - 1.0).abs();
    verdict(
        low.n_peaks == 1 && high.n_peaks == 2 && err <= 0.05,
        format!(
            "0.2 MHz: {} peak(s); 7.3 MHz: {} peak(s), separation {:.4} MHz vs gap {:.4} MHz ({:.2}%)",
            low.n_peaks,
            high.n_peaks,
            high.separation / TAU,
            oracle / TAU,
            100.0 * err
        ),
    )
}

fn criterion_5() -> Verdict {
    let p = device(4.0);
    let trace = normalized_trace(p);
    let doublet = find_doublet(&trace);
    let signal = inverse_fourier(&trace, SpectralField::Transmission).unwrap();
    let window = 5.0 / p.kappa;
    let part = signal.truncated(10.0 / p.kappa);
    let fit = nlls_fit_auto(&part.times, &part.values, FitModel::DampedCosine).unwrap();
    let omega = fit.get("omega").unwrap();
    let oracle = doublet.separation / 2.0;
    let freq_err = if doublet.n_peaks == 2 {
        (omega / oracle - 1.0).abs()
    } else {
        f64::INFINITY
    };
    let ats_changes = signal.sign_changes(window);

    let eit = P::from_mhz(1.26, 0.02, 0.252, 0.4, 0.0).unwrap();
    let eit_signal = inverse_fourier(&normalized_trace(eit), SpectralField::Transmission).unwrap();
    let eit_changes = eit_signal.sign_changes(5.0 / eit.kappa);
    let first_crossing = eit_signal
        .times
        .windows(2)
        .zip(eit_signal.values.windows(2))
        .find(|(_, v)| v[0].signum() != v[1].signum())
        .map(|(t, _)| t[1]);

    verdict(
        fit.converged && freq_err <= 0.02 && ats_changes >= 2 && eit_changes == 0,
        format!(
            "ATS: converged={}, omega {:.4} vs half-separation {:.4} rad/us ({:.2}%), {} sign changes; \
             EIT: {} sign changes on [0, {:.3}] us (first at {})",
            fit.converged,
            omega,
            oracle,
            100.0 * freq_err,
            ats_changes,
            eit_changes,
            5.0 / eit.kappa,
            first_crossing.map_or("none".into(), |t| format!("{t:.3} us")),
        ),
    )
}

fn criterion_6() -> Verdict {
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for &oc in &FIG2_COUPLERS_MHZ {
        let p = device(oc);
        let l = p.liouvillian().unwrap();
        let ss = steady_state(&l).unwrap();
        let t_end = 20.0 / p.kappa.min(p.gamma);
        let dt = 0.01 / p.max_rate();
        let ev = evolve_final(&DensityMatrix::ground(), &l, t_end, dt).unwrap();
        let d = max_diff(ss.matrix(), ev.matrix());
        worst = worst.max(d);
        if d > 1e-8 {
            failures.push(format!("{oc} MHz: {d:.2e}"));
        }
    }
    verdict(
        failures.is_empty(),
        format!("max elementwise |rho_ss - rho(t_end)| = {worst:.3e} (limit 1e-8) {}", failures.join(", ")),
    )
}

fn max_diff(a: &Mat3<f64>, b: &Mat3<f64>) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            m = m.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    m
}

fn criterion_7() -> Verdict {
    let mut worst: f64 = 0.0;
    for oc in [0.0, 0.4, 4.0, 7.3] {
        let base = device(oc);
        let p = base.with_omega_p(0.01 * base.kappa);
        let spec = SweepSpec::default_for(p);
        let trace = sweep_spectrum(&spec).unwrap();
        let analytic: Vec<Cplx<f64>> = spec.grid().iter().map(|&d| weak_probe_coherence(&p.with_delta(d))).collect();
        let scale = analytic.iter().fold(0.0_f64, |m, z| m.max(z.norm()));
        let dev = trace
            .samples
            .iter()
            .zip(&analytic)
            .fold(0.0_f64, |m, (s, a)| m.max((s.rho10 - a).norm()));
        worst = worst.max(dev / scale);
    }
    verdict(worst <= 1e-3, format!("sup relative deviation {worst:.3e} (limit 1e-3)"))
}

fn criterion_8() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst = [0.0_f64; 5];
    let mut min_eig = f64::INFINITY;
    let mut errors = 0;
    for _ in 0..100 {
        let p = P::from_mhz(
            rng.gen_range(0.05..5.0),
            rng.gen_range(0.0..5.0),
            rng.gen_range(0.0..2.0),
            rng.gen_range(0.0..10.0),
            rng.gen_range(-10.0..10.0),
        )
        .unwrap();
        let l = p.liouvillian().unwrap();
        let rho = match steady_state(&l) {
            Ok(r) => r,
            Err(_) => {
                errors += 1;
                continue;
            }
        };
        let m = rho.matrix();
        worst[0] = worst[0].max((m.trace() - Cplx::new(1.0, 0.0)).norm());
        worst[1] = worst[1].max(m.hermiticity_deviation());
        min_eig = min_eig.min(rho.min_eigenvalue());
        worst[2] = worst[2].max(l.apply(m).max_abs()).max(smallest_eigenvalue_modulus(&l));
        worst[3] = worst[3].max(l.trace_functional_residual());

        let mirror = steady_state(&p.with_delta(-p.delta).liouvillian().unwrap()).unwrap();
        let (a, b) = (rho.coherence_g1_g0(), mirror.coherence_g1_g0());
        let parity = (rho.population(Level::G1) - mirror.population(Level::G1))
            .abs()
            .max((a.re + b.re).abs())
            .max((a.im - b.im).abs());
        worst[4] = worst[4].max(parity);
    }
    let pass = errors == 0
        && worst[0] <= 1e-10
        && worst[1] <= 1e-12
        && min_eig >= -1e-10
        && worst[2] <= 1e-10
        && worst[3] <= 1e-12
        && worst[4] <= 1e-10;
    verdict(
        pass,
        format!(
            "100 sets: trace {:.1e}, hermiticity {:.1e}, min eigenvalue {:.1e}, |L rho| and min |eigenvalue| {:.1e}, \
             trace functional {:.1e}, parity {:.1e}, solver errors {errors}",
            worst[0], worst[1], min_eig, worst[2], worst[3], worst[4]
        ),
    )
}

/// Independent eigenvalue oracle: diagonal of the complex Schur form.
fn smallest_eigenvalue_modulus(l: &xi_cqed::SuperoperatorF64) -> f64 {
    let m = l.matrix();
    let na = nalgebra::SMatrix::<Cplx<f64>, 9, 9>::from_fn(|i, j| m[(i, j)]);
    let (_, t) = na.schur().unpack();
    (0..9).map(|k| t[(k, k)].norm()).fold(f64::INFINITY, f64::min)
}

fn criterion_9() -> Verdict {
    let x: Vec<f64> = (0..400).map(|k| k as f64 / 399.0).collect();
    let cases: [(FitModel, Vec<f64>, Vec<f64>); 3] = [
        (FitModel::DampedCosine, vec![1.0, 1.0, TAU * 4.0, 0.3, 0.05], vec![0.9, 1.3, 24.0, 0.1, 0.0]),
        (FitModel::Lorentzian, vec![0.42, 0.17, 2.0, 0.1], vec![0.4, 0.2, 1.5, 0.0]),
        (FitModel::Exponential, vec![1.5, 3.2, -0.2], vec![1.0, 2.0, 0.0]),
    ];
    let mut worst: f64 = 0.0;
    let mut all_converged = true;
    for (model, truth, init) in &cases {
        let y: Vec<f64> = x.iter().map(|&t| model.eval(t, truth)).collect();
        let fit = nlls_fit(&x, &y, *model, init).unwrap();
        all_converged &= fit.converged;
        for (a, b) in fit.params.iter().zip(truth) {
            worst = worst.max((a - b).abs() / b.abs().max(1e-300));
        }
    }

    let truth = CalibrationParams {
        chi_shift: mhz(-11.2),
        nbar: 0.16,
        nbar_c: 0.0,
        delta_ac: 0.0,
        gamma_q: mhz(1.0),
    };
    let grid: Vec<f64> = (0..1201).map(|k| mhz(-60.0 + 0.1 * k as f64)).collect();
    let spectrum = number_splitting_spectrum(&truth, &grid).unwrap();
    let start = CalibrationParams {
        chi_shift: mhz(-10.5),
        nbar: 0.25,
        gamma_q: mhz(1.4),
        ..truth
    };
    let ns = fit_number_splitting(&grid, &spectrum, &start).unwrap();
    let ns_err = [
        (ns.nbar / truth.nbar - 1.0).abs(),
        (ns.chi_shift / truth.chi_shift - 1.0).abs(),
        (ns.gamma_q / truth.gamma_q - 1.0).abs(),
    ]
    .into_iter()
    .fold(0.0_f64, f64::max);
    verdict(
        all_converged && worst <= 1e-6 && ns_err <= 0.01,
        format!(
            "synthetic recovery max rel error {worst:.2e} (converged {all_converged}); \
             number-splitting round trip max rel error {ns_err:.2e}"
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict, Duration); 9] = [
        ("Poisson check", criterion_1, Duration::from_secs(1)),
        ("ac-Stark calibration endpoints", criterion_2, Duration::from_secs(1)),
        ("regime labels", criterion_3, Duration::from_secs(1)),
        ("doublet emergence", criterion_4, Duration::from_secs(5)),
        ("time-domain coherence", criterion_5, Duration::from_secs(10)),
        ("solver oracle equivalence", criterion_6, Duration::from_secs(30)),
        ("linear-response oracle", criterion_7, Duration::from_secs(10)),
        ("invariant suite", criterion_8, Duration::from_secs(60)),
        ("fit engine", criterion_9, Duration::from_secs(10)),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= *budget;
        let pass = v.pass && in_time;
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {}: {} {name}: {} [{:.2} s{}]",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            v.detail,
            elapsed.as_secs_f64(),
            if in_time { "" } else { ", over budget" }
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
