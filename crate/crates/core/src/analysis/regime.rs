use crate::lindblad::SystemParams;
use crate::scalar::{c, lit, Cplx, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Regime {
    #[serde(rename = "EIT")]
    Eit,
    #[serde(rename = "ATS")]
    Ats,
}

impl Regime {
    pub fn label(self) -> &'static str {
        match self {
            Regime::Eit => "EIT",
            Regime::Ats => "ATS",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegimeReport<T: Real> {
    /// Roots of `(s + κ/2)(s + γ/2) + Ω_c²/4 = 0` (rad/µs).
    pub poles: [Cplx<T>; 2],
    /// `|κ − γ|/2`.
    pub threshold: T,
    pub regime: Regime,
    /// Pole frequency splitting exceeds `(κ + γ)/4`.
    pub resolvable: bool,
}

/// EIT below the pole-degeneracy point `Ω_c = |κ − γ|/2`, ATS above it.
pub fn classify_regime<T: Real>(params: &SystemParams<T>) -> RegimeReport<T> {
    let quarter = lit::<T>(0.25);
    let centre = -(params.kappa + params.gamma) * quarter;
    let asym = (params.kappa - params.gamma) * quarter;
    let half_c = params.omega_c * lit(0.5);
    let disc = asym * asym - half_c * half_c;
    let poles = if disc >= T::zero() {
        let r = disc.sqrt();
        [c(centre + r, T::zero()), c(centre - r, T::zero())]
    } else {
        let w = (-disc).sqrt();
        [c(centre, w), c(centre, -w)]
    };
    let threshold = (params.kappa - params.gamma).abs() * lit(0.5);
    let regime = if params.omega_c > threshold {
        Regime::Ats
    } else {
        Regime::Eit
    };
    let splitting = (poles[0].im - poles[1].im).abs();
    RegimeReport {
        poles,
        threshold,
        regime,
        resolvable: splitting > (params.kappa + params.gamma) * quarter,
    }
}
