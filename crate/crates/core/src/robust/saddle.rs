//! Subgradient ascent on `y -> min_x I(y; x)` with Polyak steps and a
//! duality-gap stopping rule.
//!
//! The upper bound is the smaller of `min_k max_y I(y; x_k)` over adversary
//! responses and `max_y sum_k mu_k I(y; x_k)` for the mixture with weights
//! proportional to step lengths. `I` is concave in `y`, so the game has no gap
//! once the adversary may mix, while the pure bound can stall above the
//! optimum when `I` is concave along some coordinates of `x`.

use std::time::Instant;

use super::adversary::{adversary_best_response, AdversaryResponse};
use super::ascent::{max_influence_given_x, max_mixture_influence, AscentOptions};
use super::projection::project_budget;
use crate::csfm::{CsfmCertificate, CsfmOptions, FwOptions};
use crate::error::{param, Error, Result};
use crate::model::{influence_grad_y, BudgetVector, InfluenceInstance, UncertaintySet};

/// Upper value used in the Polyak numerator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PolyakNumerator {
    /// Running minimum of the upper bounds.
    #[default]
    BestUpper,
    /// The upper bound computed at the current iteration.
    IterationUpper,
}

#[derive(Debug, Clone)]
pub struct RobustOptions {
    pub cap: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub max_iters: usize,
    /// Certified accuracy of each adversary solve; defaults to `epsilon / 10`.
    pub fw_epsilon: Option<f64>,
    /// Frank-Wolfe gap on the relaxation at which an adversary solve stops
    /// when the certificate cannot reach `fw_epsilon`; defaults to
    /// `fw_epsilon / 100`.
    pub fw_gap_tol: Option<f64>,
    pub fw_max_iters: usize,
    pub fw_max_active: usize,
    /// Defaults to `epsilon / 10`.
    pub inner_tol: Option<f64>,
    pub polyak: PolyakNumerator,
    /// Start each inner Frank-Wolfe solve from the previous rho.
    pub warm_start: bool,
    /// Defaults to the uniform allocation.
    pub y0: Option<Vec<f64>>,
    /// Record wall-clock seconds per iteration (otherwise zero).
    pub record_time: bool,
    /// Iterations between evaluations of the mixture upper bound, which
    /// weights past adversary responses by their step lengths; 0 disables it
    /// and leaves only the per-response bounds.
    pub mixture_every: usize,
}

impl RobustOptions {
    pub fn new(cap: f64, epsilon: f64, delta: f64) -> Self {
        RobustOptions {
            cap,
            epsilon,
            delta,
            max_iters: 500,
            fw_epsilon: None,
            fw_gap_tol: None,
            fw_max_iters: FwOptions::default().max_iters,
            fw_max_active: FwOptions::default().max_active,
            inner_tol: None,
            polyak: PolyakNumerator::default(),
            warm_start: true,
            y0: None,
            record_time: false,
            mixture_every: 10,
        }
    }

    pub fn csfm_options(&self) -> CsfmOptions {
        let target_gap = self.fw_epsilon.unwrap_or(self.epsilon / 10.0);
        CsfmOptions {
            delta: self.delta,
            fw: FwOptions {
                epsilon: self.fw_gap_tol.unwrap_or(target_gap / 100.0),
                max_iters: self.fw_max_iters,
                max_active: self.fw_max_active,
            },
            target_gap,
            ..CsfmOptions::default()
        }
    }

    pub fn ascent_options(&self) -> AscentOptions {
        AscentOptions {
            tol: self.inner_tol.unwrap_or(self.epsilon / 10.0),
            ..AscentOptions::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub iter: usize,
    /// `I(y_k; x_k)` at the adversary's response.
    pub lower: f64,
    /// Certified `max_y I(y; x_k)`.
    pub upper: f64,
    /// Certified bound from the step-weighted mixture of earlier responses,
    /// when evaluated at this iteration.
    pub upper_mixture: Option<f64>,
    /// Certified lower bound on `min_x I(y_k; x)` over the grid.
    pub lower_certified: f64,
    pub lower_best: f64,
    pub upper_best: f64,
    pub gap: f64,
    /// Step length taken after this record; zero on the final iteration.
    pub step: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub records: Vec<IterationRecord>,
    pub y_robust: BudgetVector,
    pub x_worst: Vec<f64>,
    pub lower_best: f64,
    pub upper_best: f64,
    pub gap: f64,
    /// Largest certified lower bound; `upper_best` minus this bounds the
    /// suboptimality of the budget that attained it.
    pub certified_lower_best: f64,
    pub converged: bool,
    /// Certificate of each inner adversary solve, in iteration order.
    pub certificates: Vec<CsfmCertificate>,
    /// Response at the returned budget.
    pub response: AdversaryResponse,
}

pub fn solve_robust(inst: &InfluenceInstance, uset: &UncertaintySet, opts: &RobustOptions) -> Result<SolveReport> {
    if !(opts.epsilon > 0.0) {
        return Err(param("epsilon", format!("must be positive, got {}", opts.epsilon)));
    }
    if opts.max_iters == 0 {
        return Err(param("max_iters", "must be at least 1"));
    }
    let cap = opts.cap;
    let mut y = match &opts.y0 {
        Some(v) => {
            inst.check_budget_len(v)?;
            BudgetVector::new(v.clone(), cap)?
        }
        None => BudgetVector::uniform(inst.num_channels(), cap),
    };
    let csfm = opts.csfm_options();
    let ascent = opts.ascent_options();
    let start = Instant::now();

    let mut records = Vec::new();
    let mut certificates = Vec::new();
    let mut best: Option<(BudgetVector, AdversaryResponse)> = None;
    let mut lower_best = f64::NEG_INFINITY;
    let mut upper_best = f64::INFINITY;
    let mut certified_lower_best = f64::NEG_INFINITY;
    let mut y_upper: Option<BudgetVector> = None;
    let mut converged = false;
    let mut prev_rho = None;

    let mut mix_weights: Vec<f64> = Vec::new();
    let mut mix_xs: Vec<Vec<f64>> = Vec::new();
    let mut y_mix: Option<BudgetVector> = None;

    for iter in 0..opts.max_iters {
        let resp = adversary_best_response(inst, uset, y.as_slice(), &csfm, prev_rho.as_ref())?;
        if opts.warm_start {
            prev_rho = Some(resp.rho.clone());
        }
        certificates.push(resp.certificate.clone());
        let lower = resp.value;
        let lower_certified = resp.lower_bound();
        certified_lower_best = certified_lower_best.max(lower_certified);
        let g = influence_grad_y(inst, y.as_slice(), &resp.x_worst)?;
        let upper_res = max_influence_given_x(inst, &resp.x_worst, cap, y_upper.take(), &ascent)?;
        let upper = upper_res.upper_bound;
        y_upper = Some(upper_res.y);
        upper_best = upper_best.min(upper);

        let upper_mixture = if opts.mixture_every > 0 && iter > 0 && iter % opts.mixture_every == 0 {
            let res = max_mixture_influence(inst, &mix_weights, &mix_xs, cap, y_mix.take(), &ascent)?;
            y_mix = Some(res.y);
            upper_best = upper_best.min(res.upper_bound);
            Some(res.upper_bound)
        } else {
            None
        };

        let x_worst = resp.x_worst.clone();
        if lower > lower_best {
            lower_best = lower;
            best = Some((y.clone(), resp));
        }
        let gap = upper_best - lower_best;
        let seconds = if opts.record_time {
            start.elapsed().as_secs_f64()
        } else {
            0.0
        };
        records.push(IterationRecord {
            iter,
            lower,
            upper,
            upper_mixture,
            lower_certified,
            lower_best,
            upper_best,
            gap,
            step: 0.0,
            seconds,
        });
        if gap <= opts.epsilon {
            converged = true;
            break;
        }
        let gnorm2: f64 = g.iter().map(|v| v * v).sum();
        if !(gnorm2 > 0.0) {
            return Err(Error::Stalled { iter, gap });
        }
        let numerator = match opts.polyak {
            PolyakNumerator::BestUpper => upper_best,
            PolyakNumerator::IterationUpper => upper,
        } - lower;
        let step = numerator.max(0.0) / gnorm2;
        records.last_mut().expect("just pushed").step = step;
        if opts.mixture_every > 0 {
            mix_weights.push(step);
            mix_xs.push(x_worst);
        }
        let raw: Vec<f64> = y.as_slice().iter().zip(&g).map(|(a, b)| a + step * b).collect();
        y = project_budget(&raw, cap)?;
    }

    let (y_robust, response) = best.expect("at least one iteration runs when max_iters > 0");
    Ok(SolveReport {
        records,
        x_worst: response.x_worst.clone(),
        y_robust,
        lower_best,
        upper_best,
        gap: upper_best - lower_best,
        certified_lower_best,
        converged,
        certificates,
        response,
    })
}
