//! Flat TOML run configuration. Command-line flags are applied on top with
//! [`RunConfig::apply`], so flags always win over the file.

use std::path::{Path, PathBuf};

use robust_alloc::csfm::FwOptions;
use robust_alloc::robust::{PolyakNumerator, RobustOptions};
use robust_alloc::synth::{GraphShape, Observations, SynthSpec};
use robust_alloc::UncertaintyKind;
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Total budget `C`.
    pub cap: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub set: String,
    pub gamma: f64,
    /// Additional set kinds; cells are `sets x gammas` when either is given.
    pub sets: Vec<String>,
    /// Grid of adversary budgets. For `compare` these are the evaluation
    /// budgets and `gamma` is the training budget.
    pub gammas: Vec<f64>,
    /// D-norm upper bound, applied as `u_st = max(dnorm_upper, x_hat_st)`.
    pub dnorm_upper: f64,

    pub max_iters: usize,
    pub fw_max_iters: usize,
    pub fw_max_active: usize,
    pub fw_epsilon: Option<f64>,
    pub fw_gap_tol: Option<f64>,
    pub inner_tol: Option<f64>,
    /// `best_upper` or `iteration_upper`.
    pub polyak: String,
    pub mixture_every: usize,
    pub warm_start: bool,
    /// Wall-clock seconds in `trace.csv`; off by default so reruns are
    /// byte-identical.
    pub record_time: bool,

    /// Budget file (`channel,y`) for `adversary` and `fw-compare`; uniform
    /// when absent.
    pub budget: Option<PathBuf>,
    pub fw_iters: usize,

    pub seed: u64,
    pub out: PathBuf,

    // Synthetic generation.
    pub channels: usize,
    pub customers: usize,
    /// Channels per customer; 0 means every channel reaches every customer.
    pub degree: usize,
    pub obs_lo: f64,
    pub obs_hi: f64,
    pub obs_fixed: Option<u64>,
    pub p_max: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            cap: 1.0,
            delta: 1e-3,
            epsilon: 1e-2,
            set: "ellipsoid".into(),
            gamma: 1.0,
            sets: Vec::new(),
            gammas: Vec::new(),
            dnorm_upper: 1.0,
            max_iters: 500,
            fw_max_iters: FwOptions::default().max_iters,
            fw_max_active: FwOptions::default().max_active,
            fw_epsilon: None,
            fw_gap_tol: None,
            inner_tol: None,
            polyak: "best_upper".into(),
            mixture_every: 10,
            warm_start: true,
            record_time: false,
            budget: None,
            fw_iters: 2000,
            seed: 0,
            out: PathBuf::from("out"),
            channels: 6,
            customers: 2,
            degree: 0,
            obs_lo: 10.0,
            obs_hi: 1e4,
            obs_fixed: None,
            p_max: 0.4,
        }
    }
}

/// Values given on the command line; `None` leaves the configured value.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub delta: Option<f64>,
    pub epsilon: Option<f64>,
    pub gamma: Option<f64>,
    pub set: Option<String>,
    pub cap: Option<f64>,
    pub budget: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(v) = &o.out {
            self.out = v.clone();
        }
        if let Some(v) = o.seed {
            self.seed = v;
        }
        if let Some(v) = o.delta {
            self.delta = v;
        }
        if let Some(v) = o.epsilon {
            self.epsilon = v;
        }
        if let Some(v) = o.gamma {
            self.gamma = v;
        }
        if let Some(v) = &o.set {
            self.set = v.clone();
        }
        if let Some(v) = o.cap {
            self.cap = v;
        }
        if let Some(v) = &o.budget {
            self.budget = Some(v.clone());
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return bad(format!("delta must be > 0, got {}", self.delta));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return bad(format!("epsilon must be > 0, got {}", self.epsilon));
        }
        if !(self.cap >= 0.0 && self.cap.is_finite()) {
            return bad(format!("cap must be >= 0, got {}", self.cap));
        }
        for &g in std::iter::once(&self.gamma).chain(&self.gammas) {
            if !(g >= 0.0 && g.is_finite()) {
                return bad(format!("gamma must be >= 0, got {g}"));
            }
        }
        if !(0.0..=1.0).contains(&self.dnorm_upper) {
            return bad(format!("dnorm_upper must lie in [0, 1], got {}", self.dnorm_upper));
        }
        if self.max_iters == 0 {
            return bad("max_iters must be at least 1".into());
        }
        self.kinds()?;
        self.polyak()?;
        Ok(())
    }

    /// Set kinds in run order: `sets` when given, else `set`.
    pub fn kinds(&self) -> Result<Vec<UncertaintyKind>, CliError> {
        let names: Vec<&String> = if self.sets.is_empty() {
            vec![&self.set]
        } else {
            self.sets.iter().collect()
        };
        names
            .into_iter()
            .map(|n| {
                n.parse()
                    .map_err(|e: robust_alloc::Error| CliError::Config(e.to_string()))
            })
            .collect()
    }

    /// `gammas` when given, else `gamma`.
    pub fn gamma_grid(&self) -> Vec<f64> {
        if self.gammas.is_empty() {
            vec![self.gamma]
        } else {
            self.gammas.clone()
        }
    }

    pub fn polyak(&self) -> Result<PolyakNumerator, CliError> {
        match self.polyak.as_str() {
            "best_upper" => Ok(PolyakNumerator::BestUpper),
            "iteration_upper" => Ok(PolyakNumerator::IterationUpper),
            other => Err(CliError::Config(format!(
                "polyak must be `best_upper` or `iteration_upper`, got `{other}`"
            ))),
        }
    }

    pub fn robust_options(&self) -> Result<RobustOptions, CliError> {
        let mut o = RobustOptions::new(self.cap, self.epsilon, self.delta);
        o.max_iters = self.max_iters;
        o.fw_epsilon = self.fw_epsilon;
        o.fw_gap_tol = self.fw_gap_tol;
        o.fw_max_iters = self.fw_max_iters;
        o.fw_max_active = self.fw_max_active;
        o.inner_tol = self.inner_tol;
        o.polyak = self.polyak()?;
        o.warm_start = self.warm_start;
        o.record_time = self.record_time;
        o.mixture_every = self.mixture_every;
        Ok(o)
    }

    pub fn synth_spec(&self) -> SynthSpec {
        SynthSpec {
            channels: self.channels,
            customers: self.customers,
            graph: if self.degree == 0 {
                GraphShape::Complete
            } else {
                GraphShape::RandomDegree(self.degree)
            },
            observations: match self.obs_fixed {
                Some(n) => Observations::Fixed(n),
                None => Observations::LogUniform {
                    lo: self.obs_lo,
                    hi: self.obs_hi,
                },
            },
            p_max: self.p_max,
            seed: self.seed,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let mut cfg = RunConfig::from_toml_str("cap = 4.0\ngamma = 2.0\nset = \"dnorm\"\n").unwrap();
        assert_eq!(cfg.cap, 4.0);
        cfg.apply(&Overrides {
            gamma: Some(3.0),
            ..Overrides::default()
        });
        assert_eq!(cfg.gamma, 3.0);
        assert_eq!(cfg.kinds().unwrap(), vec![UncertaintyKind::DNorm]);
        cfg.validate().unwrap();
    }

    #[test]
    fn unknown_keys_and_bad_values_are_rejected() {
        assert!(RunConfig::from_toml_str("gama = 1.0").is_err());
        let cfg = RunConfig::from_toml_str("delta = 0.0").unwrap();
        assert!(cfg.validate().is_err());
        let cfg = RunConfig::from_toml_str("sets = [\"ellipsoid\", \"box\"]").unwrap();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn grid_defaults_to_single_gamma() {
        let cfg = RunConfig::default();
        assert_eq!(cfg.gamma_grid(), vec![1.0]);
        let cfg = RunConfig::from_toml_str("gammas = [0.5, 1.0]").unwrap();
        assert_eq!(cfg.gamma_grid(), vec![0.5, 1.0]);
    }
}
