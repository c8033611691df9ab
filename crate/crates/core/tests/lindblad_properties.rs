use std::f64::consts::TAU;

use proptest::prelude::*;
use xi_cqed::linalg::Mat3;
use xi_cqed::lindblad::{
    build_hamiltonian, build_jump_operators, build_liouvillian, evolve, steady_state, DecayTarget, DensityMatrix,
    JumpOperatorSet, Level, SystemParams,
};
use xi_cqed::Cplx;

fn cx(re: f64, im: f64) -> Cplx<f64> {
    Cplx::new(re, im)
}

fn mat(entries: &[f64]) -> Mat3<f64> {
    let mut m = Mat3::zeros();
    for i in 0..3 {
        for j in 0..3 {
            let k = 2 * (3 * i + j);
            m[(i, j)] = cx(entries[k], entries[k + 1]);
        }
    }
    m
}

fn hermitian(entries: &[f64]) -> Mat3<f64> {
    let a = mat(entries);
    (a + a.adjoint()).scale(cx(0.5, 0.0))
}

fn density(entries: &[f64]) -> Mat3<f64> {
    let a = mat(entries);
    let p = a * a.adjoint();
    p.scale(cx(1.0 / p.trace().re, 0.0))
}

/// `−i[H,ρ] + Σ (LρL† − ½{L†L, ρ})`, evaluated directly.
fn direct_rhs(h: &Mat3<f64>, jumps: &[Mat3<f64>], rho: &Mat3<f64>) -> Mat3<f64> {
    let mut out = (*h * *rho - *rho * *h).scale(cx(0.0, -1.0));
    for l in jumps {
        let ld = l.adjoint();
        let ldl = ld * *l;
        out = out + *l * *rho * ld - (ldl * *rho + *rho * ldl).scale(cx(0.5, 0.0));
    }
    out
}

fn max_abs_diff(a: &Mat3<f64>, b: &Mat3<f64>) -> f64 {
    (*a - *b).max_abs()
}

fn params() -> impl Strategy<Value = SystemParams<f64>> {
    (0.05..5.0, 0.0..5.0, 0.0..2.0, 0.0..10.0, -10.0..10.0, any::<bool>()).prop_map(|(k, g, p, c, d, to_g1)| {
        let target = if to_g1 { DecayTarget::ToG1 } else { DecayTarget::ToG0 };
        SystemParams::from_mhz(k, g, p, c, d).unwrap().with_decay_target(target)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn superoperator_matches_direct_evaluation(
        h in prop::collection::vec(-3.0..3.0_f64, 18),
        l1 in prop::collection::vec(-1.5..1.5_f64, 18),
        l2 in prop::collection::vec(-1.5..1.5_f64, 18),
        r in prop::collection::vec(-1.0..1.0_f64, 18),
    ) {
        let h = hermitian(&h);
        let jumps = vec![mat(&l1), mat(&l2)];
        let rho = density(&r);
        let l = build_liouvillian(&h, &JumpOperatorSet { ops: jumps.clone() }).unwrap();
        let expected = direct_rhs(&h, &jumps, &rho);
        prop_assert!(max_abs_diff(&l.apply(&rho), &expected) <= 1e-12);
        prop_assert!(l.trace_functional_residual() <= 1e-12);
    }

    #[test]
    fn steady_state_is_physical(p in params()) {
        let l = p.liouvillian().unwrap();
        let rho = steady_state(&l).unwrap();
        let m = rho.matrix();
        prop_assert!((m.trace().re - 1.0).abs() <= 1e-10);
        prop_assert!(m.hermiticity_deviation() <= 1e-12);
        prop_assert!(rho.min_eigenvalue() >= -1e-10);
        prop_assert!(l.apply(m).max_abs() <= 1e-10);
    }

    #[test]
    fn zero_mode_from_independent_eigensolver(p in params()) {
        let l = p.liouvillian().unwrap();
        let m = l.matrix();
        let na = nalgebra::SMatrix::<Cplx<f64>, 9, 9>::from_fn(|i, j| m[(i, j)]);
        let (_, t) = na.schur().unpack();
        let smallest = (0..9).map(|k| t[(k, k)].norm()).fold(f64::INFINITY, f64::min);
        prop_assert!(smallest <= 1e-10, "smallest |lambda| = {smallest:e}");
    }

    #[test]
    fn detuning_parity(p in params()) {
        let a = steady_state(&p.liouvillian().unwrap()).unwrap();
        let b = steady_state(&p.with_delta(-p.delta).liouvillian().unwrap()).unwrap();
        let u = [1.0, -1.0, 1.0];
        for i in 0..3 {
            for j in 0..3 {
                let mirrored = b.matrix()[(i, j)].conj() * (u[i] * u[j]);
                prop_assert!((a.matrix()[(i, j)] - mirrored).norm() <= 1e-10);
            }
        }
    }

    #[test]
    fn evolution_keeps_density_invariants(p in params()) {
        let l = p.liouvillian().unwrap();
        let dt = 0.01 / p.max_rate();
        let traj = evolve(&DensityMatrix::ground(), &l, 0.5, dt).unwrap();
        prop_assert!(traj.times.windows(2).all(|w| w[1] > w[0]));
        prop_assert!((traj.times.last().unwrap() - 0.5).abs() < 1e-12);
        for s in &traj.states {
            prop_assert!((s.trace().re - 1.0).abs() <= 1e-10);
            prop_assert!(s.min_eigenvalue() >= -1e-10);
        }
    }
}

#[test]
fn hamiltonian_entries() {
    let zero = SystemParams::new(1.0, 1.0, 0.0, 0.0, 0.0).unwrap();
    assert_eq!(build_hamiltonian(&zero).max_abs(), 0.0);

    let p = SystemParams::from_mhz(1.26, 1.18, 0.252, 7.3, 0.0).unwrap();
    let h = build_hamiltonian(&p);
    assert!((h[(0, 1)].re - std::f64::consts::PI * 0.252).abs() < 1e-12);
    assert!((h[(1, 2)].re - std::f64::consts::PI * 7.3).abs() < 1e-12);
    assert_eq!(h[(0, 1)], h[(1, 0)]);
    assert_eq!(h[(1, 2)], h[(2, 1)]);
    assert_eq!(h[(0, 2)], cx(0.0, 0.0));
    for i in 0..3 {
        assert_eq!(h[(i, i)], cx(0.0, 0.0));
    }

    // {g1, f0} block: eigenvalues ±Ω_c/2 from the 2×2 closed form
    let p = p.with_omega_p(0.0);
    let h = build_hamiltonian(&p);
    let (a, b, d) = (h[(1, 1)].re, h[(1, 2)].re, h[(2, 2)].re);
    let mid = 0.5 * (a + d);
    let rad = (0.25 * (a - d).powi(2) + b * b).sqrt();
    assert!(((mid + rad) - (mid - rad) - p.omega_c).abs() < 1e-12);
    let eig = h.hermitian_eigenvalues();
    assert!((eig[2] - p.omega_c / 2.0).abs() < 1e-10);
    assert!((eig[0] + p.omega_c / 2.0).abs() < 1e-10);
}

#[test]
fn jump_operators() {
    let p = SystemParams::new(0.0, 0.0, 1.0, 1.0, 0.0).unwrap();
    assert!(build_jump_operators(&p).ops.iter().all(|l| l.max_abs() == 0.0));

    let p = SystemParams::from_mhz(1.26, 1.18, 0.252, 7.3, 0.0).unwrap();
    let ops = build_jump_operators(&p).ops;
    assert_eq!(ops.len(), 2);
    assert!((ops[0][(0, 1)].re - (TAU * 1.26).sqrt()).abs() < 1e-12);
    let mut others = ops[0];
    others[(0, 1)] = cx(0.0, 0.0);
    assert_eq!(others.max_abs(), 0.0);

    for target in [DecayTarget::ToG0, DecayTarget::ToG1] {
        let set = build_jump_operators(&p.with_decay_target(target));
        let mut sum = Mat3::zeros();
        for l in &set.ops {
            sum = sum + l.adjoint() * *l;
        }
        let expect = [0.0, p.kappa, p.gamma];
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { expect[i] } else { 0.0 };
                assert!((sum[(i, j)] - cx(want, 0.0)).norm() < 1e-12);
            }
        }
        assert!((set.ops[1][(target.level().index(), 2)].re - p.gamma.sqrt()).abs() < 1e-12);
    }
}

#[test]
fn pure_decay_generator() {
    let kappa = TAU * 1.26;
    let jumps = JumpOperatorSet {
        ops: vec![Mat3::unit(0, 1, cx(kappa.sqrt(), 0.0))],
    };
    let l = build_liouvillian(&Mat3::zeros(), &jumps).unwrap();
    let out = l.apply(DensityMatrix::<f64>::pure(Level::G1).matrix());
    let mut expect = Mat3::zeros();
    expect[(0, 0)] = cx(kappa, 0.0);
    expect[(1, 1)] = cx(-kappa, 0.0);
    assert!(max_abs_diff(&out, &expect) <= 1e-12);

    let zero = build_liouvillian(&Mat3::<f64>::zeros(), &JumpOperatorSet::empty()).unwrap();
    assert_eq!(zero.matrix().max_abs(), 0.0);
}

#[test]
fn non_hermitian_hamiltonian_rejected() {
    let mut h = Mat3::<f64>::zeros();
    h[(0, 1)] = cx(1.0, 0.0);
    assert!(build_liouvillian(&h, &JumpOperatorSet::empty()).is_err());
}

#[test]
fn bloch_steady_state_matches_long_evolution() {
    // Two-level closed form ρ11 = (Ω²/4)/(κ²/4 + Ω²/2) at Ω/κ = 0.2
    let kappa = 1.0_f64;
    let p = SystemParams::new(kappa, 1.0, 0.2 * kappa, 0.0, 0.0).unwrap();
    let l = p.liouvillian().unwrap();
    let ss = steady_state(&l).unwrap();
    let closed = 0.01 / 0.27;
    assert!((ss.population(Level::G1) - closed).abs() < 1e-12);
    let traj = evolve(&DensityMatrix::ground(), &l, 60.0, 0.01 / p.max_rate()).unwrap();
    assert!((traj.last().population(Level::G1) - closed).abs() < 1e-10);
}

#[test]
fn undriven_constant_trajectory() {
    let rho0 = DensityMatrix::<f64>::pure(Level::F0);
    let zero = build_liouvillian(&Mat3::zeros(), &JumpOperatorSet::empty()).unwrap();
    let traj = evolve(&rho0, &zero, 1.0, 0.1).unwrap();
    assert!(traj.states.iter().all(|s| s == &rho0));
}

#[test]
fn degenerate_dynamics_reported() {
    let p = SystemParams::new(0.0, 0.0, 1.0, 1.0, 0.0).unwrap();
    let err = steady_state(&p.liouvillian().unwrap()).unwrap_err();
    assert!(err.is_numerical(), "{err}");
}

#[test]
fn doublet_valley_at_line_center() {
    let driven = SystemParams::<f64>::measured_device().with_omega_c(TAU * 7.3);
    let centre = steady_state(&driven.liouvillian().unwrap()).unwrap();
    let reference = steady_state(&driven.with_omega_c(0.0).liouvillian().unwrap()).unwrap();
    assert!(centre.population(Level::G1) < 0.1 * reference.population(Level::G1));
}
