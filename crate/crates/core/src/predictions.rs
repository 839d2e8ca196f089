//! Closed-form growth exponents for the discrepancy norms and the rotational
//! Fourier averages, with the critical indices where the formulas change branch.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Which norm or quantity the exponent refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    /// `L^p` over rotations and translations.
    #[serde(rename = "joint")]
    Joint,
    /// `L^1` over rotations at a fixed translation.
    #[serde(rename = "rotation_only_L1")]
    RotationOnlyL1,
    /// Supremum over translations.
    #[serde(rename = "sup")]
    Sup,
    /// Lower bound for the joint `L^p` norm.
    #[serde(rename = "lower_bound")]
    LowerBound,
    /// Decay of the rotational `L^p` average of `χ̂` (a negative exponent).
    #[serde(rename = "fourier_rot")]
    FourierRot,
}

impl Mode {
    pub const ALL: [Mode; 5] = [Mode::Joint, Mode::RotationOnlyL1, Mode::Sup, Mode::LowerBound, Mode::FourierRot];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Joint => "joint",
            Mode::RotationOnlyL1 => "rotation_only_L1",
            Mode::Sup => "sup",
            Mode::LowerBound => "lower_bound",
            Mode::FourierRot => "fourier_rot",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Mode::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::invalid("mode", s, "expected joint, rotation_only_L1, sup, lower_bound or fourier_rot"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Upper,
    Lower,
}

/// Predicted `R^exponent (log R)^log_power` (or `ρ^exponent ...` for `fourier_rot`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub exponent: f64,
    pub log_power: f64,
    pub regime: String,
    pub bound_kind: BoundKind,
}

impl Prediction {
    fn upper(exponent: f64, log_power: f64, regime: &str) -> Self {
        Prediction {
            exponent,
            log_power,
            regime: regime.to_string(),
            bound_kind: BoundKind::Upper,
        }
    }
}

/// Critical indices in `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeBoundaries {
    /// `2d/(d-1)`.
    pub p_star: f64,
    /// `2(γ-1)/(γ-2)`, infinite at `γ = 2`.
    pub p_flat: f64,
    /// `((2d-1)γ - (d-1)) / ((d-1)(γ-1))`.
    pub p_mix: f64,
}

fn check_d_gamma(d: usize, gamma: f64) -> Result<()> {
    if d < 2 {
        return Err(Error::invalid("d", d, "dimension must be at least 2"));
    }
    if !(gamma >= 2.0 && gamma.is_finite()) {
        return Err(Error::invalid("gamma", gamma, "flatness order must be >= 2"));
    }
    Ok(())
}

pub fn regime_boundaries(d: usize, gamma: f64) -> Result<RegimeBoundaries> {
    check_d_gamma(d, gamma)?;
    let df = d as f64;
    let p_flat = if gamma == 2.0 {
        f64::INFINITY
    } else {
        2.0 * (gamma - 1.0) / (gamma - 2.0)
    };
    Ok(RegimeBoundaries {
        p_star: 2.0 * df / (df - 1.0),
        p_flat,
        p_mix: ((2.0 * df - 1.0) * gamma - (df - 1.0)) / ((df - 1.0) * (gamma - 1.0)),
    })
}

/// `p` equals a critical index up to relative `1e-9`.
fn at(p: f64, critical: f64) -> bool {
    critical.is_finite() && (p - critical).abs() <= 1e-9 * critical.max(1.0)
}

/// Predicted exponent for `(d, γ, p)` in the given mode. `p` is ignored by
/// `rotation_only_L1`, `sup` and `lower_bound`.
pub fn predicted_exponent(d: usize, gamma: f64, p: f64, mode: Mode) -> Result<Prediction> {
    check_d_gamma(d, gamma)?;
    let uses_p = matches!(mode, Mode::Joint | Mode::FourierRot);
    if uses_p && !(p >= 1.0) {
        return Err(Error::invalid("p", p, "norm exponent must be >= 1"));
    }
    let b = regime_boundaries(d, gamma)?;
    let df = d as f64;
    let dm = df - 1.0;
    let half = dm / 2.0;
    let pd = dm / p;
    Ok(match mode {
        Mode::LowerBound => Prediction {
            exponent: half,
            log_power: 0.0,
            regime: "Theorem 4".into(),
            bound_kind: BoundKind::Lower,
        },
        Mode::RotationOnlyL1 => Prediction::upper(df * dm / (df + 1.0), 0.0, "Theorem 3"),
        Mode::Sup => {
            if gamma <= df + 1.0 {
                Prediction::upper(df * dm / (df + 1.0), 0.0, "L-infinity gamma<=d+1")
            } else {
                Prediction::upper(dm * (1.0 - 1.0 / gamma), 0.0, "L-infinity gamma>d+1")
            }
        }
        Mode::FourierRot => {
            if at(p, b.p_flat) {
                Prediction::upper(
                    -(df + 1.0) / 2.0,
                    (gamma - 2.0) * dm / (2.0 * (gamma - 1.0)),
                    "rotational average p=p_flat",
                )
            } else if p < b.p_flat {
                Prediction::upper(-(df + 1.0) / 2.0, 0.0, "rotational average p<p_flat")
            } else {
                Prediction::upper(
                    -dm * (1.0 / p + 1.0 / gamma - 1.0 / (p * gamma)) - 1.0,
                    0.0,
                    "rotational average p>p_flat",
                )
            }
        }
        Mode::Joint => {
            if p <= 2.0 {
                Prediction::upper(half, 0.0, "Corollary 2")
            } else if gamma <= df + 1.0 {
                if at(p, b.p_flat) {
                    Prediction::upper(df * dm / (df + gamma - 1.0), pd, "Theorem 1.1 p=p_flat")
                } else if p < b.p_star {
                    Prediction::upper(half, 0.0, "Theorem 1.1 p<p_star")
                } else if p < b.p_flat {
                    Prediction::upper(
                        df * dm * (p - 2.0) / (df * (p - 2.0) + p),
                        0.0,
                        "Theorem 1.1 p_star<=p<p_flat",
                    )
                } else {
                    Prediction::upper(
                        df * dm / (df + 1.0) * (1.0 - 2.0 * (gamma - 1.0) / (p * (df + gamma - 1.0))),
                        pd,
                        "Theorem 1.1 p>p_flat",
                    )
                }
            } else if at(p, b.p_flat) {
                Prediction::upper(half, pd, "Theorem 1.2 p=p_flat")
            } else if p < b.p_flat {
                Prediction::upper(half, 0.0, "Theorem 1.2 p<p_flat")
            } else {
                Prediction::upper(dm * (1.0 - 1.0 / p) * (1.0 - 1.0 / gamma), 0.0, "Theorem 1.2 p>p_flat")
            }
        }
    })
}

/// One row of the `predict` grid CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub d: usize,
    pub gamma: f64,
    pub p: f64,
    pub mode: Mode,
    pub regime: String,
    pub exponent: f64,
    pub log_power: f64,
    pub bound_kind: BoundKind,
}

impl PredictionRecord {
    pub fn compute(d: usize, gamma: f64, p: f64, mode: Mode) -> Result<Self> {
        let pr = predicted_exponent(d, gamma, p, mode)?;
        Ok(PredictionRecord {
            d,
            gamma,
            p,
            mode,
            regime: pr.regime,
            exponent: pr.exponent,
            log_power: pr.log_power,
            bound_kind: pr.bound_kind,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn joint(d: usize, g: f64, p: f64) -> Prediction {
        predicted_exponent(d, g, p, Mode::Joint).unwrap()
    }

    #[test]
    fn documented_examples() {
        let a = joint(2, 4.0, 2.0);
        assert_eq!((a.exponent, a.log_power, a.regime.as_str()), (0.5, 0.0, "Corollary 2"));
        let b = joint(2, 4.0, 3.0);
        assert!((b.exponent - 0.5).abs() < 1e-15 && (b.log_power - 1.0 / 3.0).abs() < 1e-15);
        assert!((joint(3, 6.0, 10.0).exponent - 1.5).abs() < 1e-12);
        let c = joint(2, 3.0, 4.0);
        assert!((c.exponent - 0.5).abs() < 1e-15 && (c.log_power - 0.25).abs() < 1e-15);
        for g in [2.0, 2.5, 3.0] {
            let s = predicted_exponent(2, g, 1.0, Mode::Sup).unwrap();
            assert!((s.exponent - 2.0 / 3.0).abs() < 1e-15);
        }
        let f = predicted_exponent(2, 4.0, 8.0, Mode::FourierRot).unwrap();
        assert!((f.exponent + 1.34375).abs() < 1e-15);
        assert_eq!(predicted_exponent(2, 4.0, 2.0, Mode::FourierRot).unwrap().exponent, -1.5);
        let lb = predicted_exponent(2, 4.0, 2.0, Mode::LowerBound).unwrap();
        assert_eq!(lb.bound_kind, BoundKind::Lower);
        assert!((predicted_exponent(2, 4.0, 1.0, Mode::RotationOnlyL1).unwrap().exponent - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn boundary_examples() {
        // At γ = d+1 all three critical indices coincide.
        let b = regime_boundaries(2, 3.0).unwrap();
        assert_eq!((b.p_star, b.p_flat, b.p_mix), (4.0, 4.0, 4.0));
        let b = regime_boundaries(4, 5.0).unwrap();
        assert!((b.p_star - b.p_flat).abs() < 1e-15 && (b.p_mix - b.p_flat).abs() < 1e-15);
        assert!(regime_boundaries(2, 2.0).unwrap().p_flat.is_infinite());
        let b = regime_boundaries(3, 6.0).unwrap();
        assert!((b.p_flat - 2.5).abs() < 1e-15 && (b.p_mix - 2.8).abs() < 1e-15);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(predicted_exponent(2, 1.5, 2.0, Mode::Joint).is_err());
        assert!(predicted_exponent(2, 3.0, 0.5, Mode::Joint).is_err());
        assert!(predicted_exponent(1, 3.0, 2.0, Mode::Joint).is_err());
        assert!(predicted_exponent(2, 3.0, 0.5, Mode::Sup).is_ok());
    }

    #[test]
    fn mode_names_round_trip() {
        for m in Mode::ALL {
            assert_eq!(m.as_str().parse::<Mode>().unwrap(), m);
            let json = serde_json::to_string(&m).unwrap();
            assert_eq!(json, format!("\"{}\"", m.as_str()));
        }
    }

    proptest! {
        #[test]
        fn ordering_of_critical_indices(d in 2usize..8, g in 2.0f64..20.0) {
            let b = regime_boundaries(d, g).unwrap();
            let df = d as f64;
            prop_assert!(b.p_star > 2.0);
            if (g - (df + 1.0)).abs() > 1e-9 {
                prop_assert_eq!(b.p_flat > b.p_star, g < df + 1.0);
                prop_assert_eq!(b.p_flat < b.p_mix, g > df + 1.0);
            }
        }

        #[test]
        fn joint_nondecreasing_in_p(d in 2usize..7, g in 2.0f64..12.0, p in 1.0f64..40.0, dp in 0.0f64..10.0) {
            let a = joint(d, g, p).exponent;
            let b = joint(d, g, p + dp).exponent;
            prop_assert!(b >= a - 1e-12, "{} -> {}", a, b);
        }

        #[test]
        fn joint_monotone_in_gamma_beyond_d_plus_1(d in 2usize..7, g in 0.0f64..10.0, dg in 0.0f64..5.0, p in 2.0f64..40.0) {
            // Beyond γ = d+1 the exponent (d-1)(1-1/p)(1-1/γ) grows with γ while p_flat shrinks.
            let g0 = d as f64 + 1.0 + 1e-6 + g;
            let a = joint(d, g0, p).exponent;
            let b = joint(d, g0 + dg, p).exponent;
            prop_assert!(b >= a - 1e-12);
        }

        #[test]
        fn lower_bound_below_joint(d in 2usize..7, g in 2.0f64..12.0, p in 1.0f64..40.0) {
            let lo = predicted_exponent(d, g, p, Mode::LowerBound).unwrap().exponent;
            let up = joint(d, g, p);
            prop_assert!(lo <= up.exponent + 1e-12);
            if (up.exponent - lo).abs() < 1e-12 {
                let flat_regimes = ["Corollary 2", "Theorem 1.1 p<p_star", "Theorem 1.1 p=p_flat",
                    "Theorem 1.2 p<p_flat", "Theorem 1.2 p=p_flat", "Theorem 1.1 p_star<=p<p_flat"];
                prop_assert!(flat_regimes.contains(&up.regime.as_str()), "{}", up.regime);
            }
        }

        #[test]
        fn nonnegative_except_fourier(d in 2usize..7, g in 2.0f64..12.0, p in 1.0f64..40.0) {
            for m in [Mode::Joint, Mode::RotationOnlyL1, Mode::Sup, Mode::LowerBound] {
                let pr = predicted_exponent(d, g, p, m).unwrap();
                prop_assert!(pr.exponent >= 0.0 && pr.log_power >= 0.0);
            }
            prop_assert!(predicted_exponent(d, g, p, Mode::FourierRot).unwrap().exponent < 0.0);
        }
    }
}
