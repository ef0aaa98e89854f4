//! Ellipsoidal and D-norm uncertainty sets written as a box `[l, u]` plus a
//! separable budget constraint `sum_st R_st(x_st) <= gamma`.

use super::instance::InfluenceInstance;
use crate::error::{param, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UncertaintyKind {
    /// `R_st(x) = (x - x_hat)^2 / sigma^2`
    Ellipsoidal,
    /// `R_st(x) = (x - x_hat) / (u - x_hat)`
    DNorm,
}

impl UncertaintyKind {
    pub fn name(self) -> &'static str {
        match self {
            UncertaintyKind::Ellipsoidal => "ellipsoid",
            UncertaintyKind::DNorm => "dnorm",
        }
    }
}

impl std::str::FromStr for UncertaintyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ellipsoid" | "ellipsoidal" => Ok(UncertaintyKind::Ellipsoidal),
            "dnorm" | "d-norm" => Ok(UncertaintyKind::DNorm),
            other => Err(param("set", format!("unknown uncertainty set `{other}`"))),
        }
    }
}

/// Separable regularizer restricted to a box, used as the adversary's constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct UncertaintySet {
    kind: UncertaintyKind,
    center: Vec<f64>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    /// `sigma^2` for ellipsoidal sets, `u - x_hat` for D-norm sets.
    scale: Vec<f64>,
    gamma: f64,
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma >= 0.0 && gamma.is_finite() {
        Ok(())
    } else {
        Err(param("gamma", format!("must be finite and >= 0, got {gamma}")))
    }
}

impl UncertaintySet {
    /// Ellipsoidal set built from the posterior variances of `inst`.
    ///
    /// The influence is nonincreasing in every `x_st`, so the adversary never
    /// moves below the estimate and the box `[0, 1]` is tightened to `[x_hat, 1]`.
    pub fn ellipsoidal(inst: &InfluenceInstance, gamma: f64) -> Result<Self> {
        Self::ellipsoidal_with_variance(inst, inst.posterior_variances(), gamma)
    }

    pub fn ellipsoidal_with_variance(inst: &InfluenceInstance, sigma2: Vec<f64>, gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        inst.check_edge_len(&sigma2)?;
        if let Some(v) = sigma2.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
            return Err(param("sigma2", format!("variances must be finite and > 0, got {v}")));
        }
        let center = inst.x_hat();
        Ok(UncertaintySet {
            kind: UncertaintyKind::Ellipsoidal,
            lo: center.clone(),
            hi: vec![1.0; center.len()],
            center,
            scale: sigma2,
            gamma,
        })
    }

    /// D-norm set with per-edge upper bounds `u_st` in `[x_hat, 1]`.
    pub fn dnorm(inst: &InfluenceInstance, upper: Vec<f64>, gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        inst.check_edge_len(&upper)?;
        let center = inst.x_hat();
        for (k, (&u, &c)) in upper.iter().zip(&center).enumerate() {
            if !(u >= c && u <= 1.0) {
                return Err(param(
                    "upper",
                    format!("edge {k}: u = {u} must lie in [x_hat = {c}, 1]"),
                ));
            }
        }
        let scale = upper.iter().zip(&center).map(|(u, c)| u - c).collect();
        Ok(UncertaintySet {
            kind: UncertaintyKind::DNorm,
            lo: center.clone(),
            center,
            hi: upper,
            scale,
            gamma,
        })
    }

    /// D-norm set where each failure probability may be pushed all the way to 1.
    pub fn dnorm_full(inst: &InfluenceInstance, gamma: f64) -> Result<Self> {
        Self::dnorm(inst, vec![1.0; inst.num_edges()], gamma)
    }

    /// Same set with a different adversary budget.
    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        Ok(UncertaintySet { gamma, ..self.clone() })
    }

    pub fn kind(&self) -> UncertaintyKind {
        self.kind
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn len(&self) -> usize {
        self.center.len()
    }

    pub fn is_empty(&self) -> bool {
        self.center.is_empty()
    }

    /// Per-edge regularizer `R_st(x)`; zero at the estimate.
    #[inline]
    pub fn term(&self, edge: usize, x: f64) -> f64 {
        let d = x - self.center[edge];
        match self.kind {
            UncertaintyKind::Ellipsoidal => d * d / self.scale[edge],
            UncertaintyKind::DNorm => {
                if self.scale[edge] > 0.0 {
                    d / self.scale[edge]
                } else {
                    0.0
                }
            }
        }
    }

    /// Returns `sum_st R_st(x_st)` and whether it is within `gamma`.
    pub fn regularizer_eval(&self, x: &[f64]) -> Result<(f64, bool)> {
        if x.len() != self.len() {
            return Err(Error::Dimension {
                what: "edge values",
                expected: self.len(),
                got: x.len(),
            });
        }
        let mut total = 0.0;
        for (k, &v) in x.iter().enumerate() {
            if !(v >= self.lo[k] && v <= self.hi[k]) {
                return Err(Error::Domain {
                    edge: k,
                    value: v,
                    lo: self.lo[k],
                    hi: self.hi[k],
                });
            }
            total += self.term(k, v);
        }
        Ok((total, total <= self.gamma))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::instance::Edge;

    fn inst(n: usize) -> InfluenceInstance {
        InfluenceInstance::new(
            vec!["s".into()],
            (0..n).map(|i| format!("t{i}")).collect(),
            (0..n).map(|t| Edge::from_counts(0, t, 2.0, 3.0)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn center_is_zero_and_feasible() {
        let i = inst(3);
        for set in [
            UncertaintySet::ellipsoidal(&i, 0.0).unwrap(),
            UncertaintySet::dnorm_full(&i, 0.0).unwrap(),
        ] {
            assert_eq!(set.regularizer_eval(&i.x_hat()).unwrap(), (0.0, true));
        }
    }

    #[test]
    fn dnorm_upper_corner() {
        let i = inst(3);
        let set = UncertaintySet::dnorm_full(&i, 2.0).unwrap();
        let (v, ok) = set.regularizer_eval(&[1.0; 3]).unwrap();
        assert!((v - 3.0).abs() < 1e-12);
        assert!(!ok);
        let (_, ok) = set.with_gamma(3.0).unwrap().regularizer_eval(&[1.0; 3]).unwrap();
        assert!(ok);
    }

    #[test]
    fn ellipsoid_single_edge() {
        let i = InfluenceInstance::new(
            vec!["s".into()],
            vec!["t".into()],
            vec![Edge {
                channel: 0,
                customer: 0,
                x_hat: 0.2,
                alpha: 1.0,
                beta: 1.0,
                n: 0.0,
            }],
        )
        .unwrap();
        let set = UncertaintySet::ellipsoidal_with_variance(&i, vec![0.04], 1.0).unwrap();
        let (v, ok) = set.regularizer_eval(&[0.3]).unwrap();
        assert!((v - 0.25).abs() < 1e-12);
        assert!(ok);
    }

    #[test]
    fn outside_box_is_domain_error() {
        let i = inst(1);
        let set = UncertaintySet::dnorm_full(&i, 1.0).unwrap();
        assert!(matches!(set.regularizer_eval(&[0.1]), Err(Error::Domain { .. })));
        assert!(UncertaintySet::dnorm(&i, vec![0.1], 1.0).is_err());
        assert!(UncertaintySet::dnorm_full(&i, -1.0).is_err());
    }
}
