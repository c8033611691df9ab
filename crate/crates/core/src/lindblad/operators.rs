use super::{Level, SystemParams};
use crate::linalg::Mat3;
use crate::scalar::{lit, re, Real};

/// Ladder Hamiltonian in the rotating frame, units of ħ·rad/µs.
///
/// `H = −δ(|g1⟩⟨g1| + |f0⟩⟨f0|) + (Ω_p/2)(|g1⟩⟨g0| + h.c.) + (Ω_c/2)(|f0⟩⟨g1| + h.c.)`
pub fn build_hamiltonian<T: Real>(params: &SystemParams<T>) -> Mat3<T> {
    let (g0, g1, f0) = (Level::G0.index(), Level::G1.index(), Level::F0.index());
    let half = lit::<T>(0.5);
    let mut h = Mat3::zeros();
    h[(g1, g1)] = re(-params.delta);
    h[(f0, f0)] = re(-params.delta);
    h[(g1, g0)] = re(half * params.omega_p);
    h[(g0, g1)] = re(half * params.omega_p);
    h[(f0, g1)] = re(half * params.omega_c);
    h[(g1, f0)] = re(half * params.omega_c);
    h
}

/// Collapse operators of the model: cavity decay and `|f0⟩` damping.
#[derive(Clone, Debug, PartialEq)]
pub struct JumpOperatorSet<T: Real> {
    pub ops: Vec<Mat3<T>>,
}

impl<T: Real> JumpOperatorSet<T> {
    pub fn empty() -> Self {
        Self { ops: Vec::new() }
    }

    /// `Σ_j L_j† L_j`.
    pub fn decay_generator(&self) -> Mat3<T> {
        self.ops
            .iter()
            .fold(Mat3::zeros(), |acc, l| acc + l.adjoint() * *l)
    }
}

/// `{√κ |g0⟩⟨g1|, √γ |target⟩⟨f0|}`.
pub fn build_jump_operators<T: Real>(params: &SystemParams<T>) -> JumpOperatorSet<T> {
    let target = params.f_decay_target.level().index();
    JumpOperatorSet {
        ops: vec![
            Mat3::unit(
                Level::G0.index(),
                Level::G1.index(),
                re(params.kappa.sqrt()),
            ),
            Mat3::unit(target, Level::F0.index(), re(params.gamma.sqrt())),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindblad::DecayTarget;
    use crate::scalar::c;
    use std::f64::consts::PI;

    fn params(kappa: f64, gamma: f64, op: f64, oc: f64, delta: f64) -> SystemParams<f64> {
        SystemParams::new(kappa, gamma, op, oc, delta).unwrap()
    }

    #[test]
    fn drives_off_gives_zero_hamiltonian() {
        let h = build_hamiltonian(&params(1.0, 1.0, 0.0, 0.0, 0.0));
        assert_eq!(h, Mat3::zeros());
    }

    #[test]
    fn measured_drive_entries() {
        let h = build_hamiltonian(&params(1.0, 1.0, 2.0 * PI * 0.252, 2.0 * PI * 7.3, 0.0));
        assert!((h[(0, 1)].re - PI * 0.252).abs() < 1e-14);
        assert_eq!(h[(0, 1)], h[(1, 0)]);
        assert!((h[(1, 2)].re - PI * 7.3).abs() < 1e-14);
        assert_eq!(h[(1, 2)], h[(2, 1)]);
        for i in 0..3 {
            assert_eq!(h[(i, i)], c(0.0, 0.0));
        }
        assert_eq!(h[(0, 2)], c(0.0, 0.0));
        assert!(h.rows().iter().flatten().all(|z| z.im == 0.0));
    }

    #[test]
    fn dressed_gap_equals_coupler_strength() {
        // 2×2 block {g1, f0} at δ=0, Ω_p=0 has eigenvalues ±Ω_c/2
        let oc = 2.0 * PI * 4.0;
        let h = build_hamiltonian(&params(1.0, 1.0, 0.0, oc, 0.0));
        let (a, b, d) = (h[(1, 1)].re, h[(1, 2)].re, h[(2, 2)].re);
        let mean = 0.5 * (a + d);
        let half_gap = (0.25 * (a - d).powi(2) + b * b).sqrt();
        assert!((mean + half_gap - oc / 2.0).abs() < 1e-12);
        assert!((mean - half_gap + oc / 2.0).abs() < 1e-12);
        let ev = h.hermitian_eigenvalues();
        assert!((ev[2] - ev[0] - oc).abs() < 1e-12);
    }

    #[test]
    fn detuning_on_upper_levels() {
        let h = build_hamiltonian(&params(1.0, 1.0, 0.0, 0.0, 3.0));
        assert_eq!(h[(0, 0)].re, 0.0);
        assert_eq!(h[(1, 1)].re, -3.0);
        assert_eq!(h[(2, 2)].re, -3.0);
    }

    #[test]
    fn zero_rates_give_zero_jumps() {
        let j = build_jump_operators(&params(0.0, 0.0, 1.0, 1.0, 0.0));
        assert_eq!(j.ops.len(), 2);
        assert!(j.ops.iter().all(|l| *l == Mat3::zeros()));
    }

    #[test]
    fn cavity_decay_entry() {
        let kappa = 2.0 * PI * 1.26;
        let j = build_jump_operators(&params(kappa, 1.0, 0.0, 0.0, 0.0));
        let l = j.ops[0];
        assert!((l[(0, 1)].re - kappa.sqrt()).abs() < 1e-15);
        let nonzero = l.rows().iter().flatten().filter(|z| z.norm() > 0.0).count();
        assert_eq!(nonzero, 1);
    }

    #[test]
    fn decay_generator_is_diag_zero_kappa_gamma() {
        for target in [DecayTarget::ToG0, DecayTarget::ToG1] {
            let p = params(2.5, 0.7, 1.0, 3.0, 0.4).with_decay_target(target);
            let g = build_jump_operators(&p).decay_generator();
            let expected = [0.0, 2.5, 0.7];
            for i in 0..3 {
                for k in 0..3 {
                    let want = if i == k { expected[i] } else { 0.0 };
                    assert!((g[(i, k)] - c(want, 0.0)).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn decay_target_to_g1() {
        let p = params(1.0, 4.0, 0.0, 0.0, 0.0).with_decay_target(DecayTarget::ToG1);
        let l = build_jump_operators(&p).ops[1];
        assert_eq!(l[(1, 2)], c(2.0, 0.0));
        assert_eq!(l[(0, 2)], c(0.0, 0.0));
    }
}
