//! Minimization of a monotone decreasing continuous submodular function over
//! `{ x in [lo, hi] : R(x) <= B }` with a separable, strictly increasing `R`.
//!
//! Pipeline: uniform discretization, pairwise Frank-Wolfe on the regularized
//! relaxation (coefficients `R_i(A_i(j)) - R_i(A_i(j-1))`), threshold scan for
//! the budget, and mapping back to the box.

use super::discretization::Discretization;
use super::frank_wolfe::{fw_solve, fw_solve_monitored, FwOptions, FwResult};
use super::greedy::{lattice_value, RhoProfile};
use super::oracle::{SeparableRegularizer, SubmodularObjective};
use super::threshold::{lambda_search, lattice_regularizer};
use crate::error::{param, Error, Result};

#[derive(Debug, Clone)]
pub struct CsfmOptions {
    pub delta: f64,
    pub fw: FwOptions,
    /// Stop Frank-Wolfe once `H(x_minus) - dual_lower_bound` is at most this;
    /// zero leaves stopping to `fw.epsilon` and `fw.max_iters`.
    pub target_gap: f64,
    /// Objective evaluations allowed for the repair step that spends leftover
    /// budget on levels up to `x_plus`; zero disables it.
    pub fill_evals: usize,
}

impl Default for CsfmOptions {
    fn default() -> Self {
        CsfmOptions {
            delta: 1e-2,
            fw: FwOptions::default(),
            target_gap: 0.0,
            fill_evals: 4096,
        }
    }
}

/// Optimality certificate for one constrained solve.
///
/// `bracket_gap` and `lagrangian_gap` bound `H(x') - min_{grid, R <= B} H`
/// when the relaxation is solved exactly and the threshold group is not split
/// by the budget. `dual_lower_bound` is a lower bound on that grid minimum that
/// holds for any Frank-Wolfe iterate, so `certified_gap` is always valid.
#[derive(Debug, Clone, PartialEq)]
pub struct CsfmCertificate {
    pub lambda_star: f64,
    pub lambda_plus: f64,
    pub x_minus: Vec<usize>,
    pub x_plus: Vec<usize>,
    /// `2 G delta` with `G` the objective's l-infinity Lipschitz bound.
    pub theory_gap: f64,
    /// `H(x') - H(A(x_plus))`.
    pub bracket_gap: f64,
    /// `H(x') - [H(x_minus) - lambda_star (B - R(x_minus))]`, which is
    /// `lambda_star (B - R(x'))` when the repair step added nothing.
    pub lagrangian_gap: f64,
    pub fw_dual_gap: f64,
    pub fw_converged: bool,
    pub fw_iterations: usize,
    pub dual_lower_bound: f64,
    /// `H(x') - dual_lower_bound`.
    pub certified_gap: f64,
    pub ties_at_threshold: usize,
    /// Levels by which `x'` differs from `x_minus` after the repair step.
    pub filled_levels: usize,
    /// Smallest separation between distinct entries of rho.
    pub min_rho_separation: f64,
    /// Smallest slope of `R_i` between consecutive grid levels.
    pub min_regularizer_slope: f64,
    pub lipschitz: f64,
}

impl CsfmCertificate {
    /// Tightest of the solution-dependent bounds; see the type docs for when
    /// they hold.
    pub fn best_gap(&self) -> f64 {
        self.bracket_gap.min(self.lagrangian_gap).min(self.certified_gap)
    }
}

#[derive(Debug, Clone)]
pub struct CsfmSolution {
    pub x: Vec<f64>,
    pub levels: Vec<usize>,
    pub value: f64,
    pub regularizer: f64,
    pub rho: RhoProfile,
    pub discretization: Discretization,
    pub certificate: CsfmCertificate,
}

/// Quadratic coefficients `r_ij = R_i(A_i(j)) - R_i(A_i(j - 1))` in flat layout.
pub fn regularizer_coefficients<R: SeparableRegularizer + ?Sized>(reg: &R, disc: &Discretization) -> Vec<f64> {
    let mut out = Vec::with_capacity(disc.num_entries());
    for i in 0..disc.dim() {
        let lv = disc.levels(i);
        let mut prev = reg.term(i, lv[0]);
        for &l in &lv[1..] {
            let cur = reg.term(i, l);
            out.push(cur - prev);
            prev = cur;
        }
    }
    out
}

pub fn constrained_min<O, R>(
    obj: &O,
    reg: &R,
    budget: f64,
    lo: &[f64],
    hi: &[f64],
    opts: &CsfmOptions,
    warm_start: Option<&RhoProfile>,
) -> Result<CsfmSolution>
where
    O: SubmodularObjective,
    R: SeparableRegularizer + ?Sized,
{
    if obj.dim() != lo.len() || reg.dim() != lo.len() {
        return Err(Error::Dimension {
            what: "objective/regularizer coordinates",
            expected: lo.len(),
            got: if obj.dim() != lo.len() { obj.dim() } else { reg.dim() },
        });
    }
    if !budget.is_finite() {
        return Err(param("budget", format!("must be finite, got {budget}")));
    }
    if !(opts.target_gap >= 0.0) {
        return Err(param("target_gap", format!("must be >= 0, got {}", opts.target_gap)));
    }
    let disc = Discretization::uniform(lo, hi, opts.delta)?;
    let r_lo = lattice_regularizer(reg, &disc, &vec![0; disc.dim()]);
    if r_lo > budget {
        return Err(Error::Infeasible { r_lo, budget });
    }
    let coeffs = regularizer_coefficients(reg, &disc);
    let warm = warm_start.filter(|w| w.len() == disc.num_entries());
    let h_lo = obj.value(&disc.lower_corner());

    let fw = if opts.target_gap > 0.0 {
        let offsets = disc.offsets().to_vec();
        fw_solve_monitored(obj, &disc, &coeffs, &opts.fw, warm, |p| {
            let rho = RhoProfile::from_parts_unchecked(p.rho.to_vec(), offsets.clone());
            let Ok(search) = lambda_search(&rho, &disc, reg, budget) else {
                return false;
            };
            let upper = lattice_value(obj, &disc, &search.x_minus);
            let lower = dual_lower_bound(
                reg,
                &disc,
                &coeffs,
                p.w,
                budget,
                &[search.lambda_star, search.lambda_plus],
            );
            upper - (lower + h_lo) <= opts.target_gap
        })?
    } else {
        fw_solve(obj, &disc, &coeffs, &opts.fw, warm)?
    };
    finish(obj, reg, budget, disc, &coeffs, fw, h_lo, opts.fill_evals)
}

#[allow(clippy::too_many_arguments)]
fn finish<O, R>(
    obj: &O,
    reg: &R,
    budget: f64,
    disc: Discretization,
    coeffs: &[f64],
    fw: FwResult,
    h_lo: f64,
    fill_evals: usize,
) -> Result<CsfmSolution>
where
    O: SubmodularObjective,
    R: SeparableRegularizer + ?Sized,
{
    let search = lambda_search(&fw.rho, &disc, reg, budget)?;
    let minus_point = disc.map(&search.x_minus);
    let value_minus = obj.value(&minus_point);
    let reg_minus = reg.total(&minus_point);
    let (levels, value) = repair(
        obj,
        reg,
        &disc,
        budget,
        &search.x_minus,
        &search.x_plus,
        value_minus,
        h_lo,
        fill_evals,
    );
    let x = disc.map(&levels);
    let regularizer = reg.total(&x);
    let value_plus = lattice_value(obj, &disc, &search.x_plus);

    let bracket_gap = (value - value_plus).max(0.0);
    // x_minus is the thresholded point for every multiplier in (lambda_plus,
    // lambda_star]; when lambda_star is the +inf sentinel any finite value in
    // that interval serves, and lambda_plus is its limit.
    let lambda_cert = if search.lambda_star.is_finite() {
        search.lambda_star
    } else {
        search.lambda_plus
    };
    let slack = budget - reg_minus;
    let lagrangian_gap = (value - value_minus + if slack <= 0.0 { 0.0 } else { lambda_cert * slack }).max(0.0);
    let filled_levels = levels.iter().zip(&search.x_minus).map(|(a, b)| a.abs_diff(*b)).sum();

    let lower = h_lo
        + dual_lower_bound(
            reg,
            &disc,
            coeffs,
            fw.w.as_slice(),
            budget,
            &[search.lambda_plus, search.lambda_star],
        );
    // The bound can never exceed a feasible value; clamp round-off.
    let dual_lower_bound = lower.min(value);
    let certified_gap = value - dual_lower_bound;

    let lipschitz = obj.linf_lipschitz(&disc.lower_corner(), &disc.map(&disc.top()));
    let theory_gap = 2.0 * lipschitz * disc.delta();

    let sorted = fw.rho.sorted_desc();
    let min_rho_separation = sorted
        .windows(2)
        .map(|w| w[0] - w[1])
        .filter(|d| *d > 0.0)
        .fold(f64::INFINITY, f64::min);
    let mut min_regularizer_slope = f64::INFINITY;
    for i in 0..disc.dim() {
        let off = disc.offset(i);
        for (j, w) in disc.levels(i).windows(2).enumerate() {
            min_regularizer_slope = min_regularizer_slope.min(coeffs[off + j] / (w[1] - w[0]));
        }
    }

    Ok(CsfmSolution {
        x,
        levels,
        value,
        regularizer,
        certificate: CsfmCertificate {
            lambda_star: search.lambda_star,
            lambda_plus: search.lambda_plus,
            x_minus: search.x_minus,
            x_plus: search.x_plus,
            theory_gap,
            bracket_gap,
            lagrangian_gap,
            fw_dual_gap: fw.dual_gap,
            fw_converged: fw.converged,
            fw_iterations: fw.iterations,
            dual_lower_bound,
            certified_gap,
            ties_at_threshold: search.ties_at_threshold,
            filled_levels,
            min_rho_separation,
            min_regularizer_slope,
            lipschitz,
        },
        rho: fw.rho,
        discretization: disc,
    })
}

/// Budget-feasible improvement of `x_minus` within `[0, cap]`.
///
/// When entries of rho tie at the threshold, the thresholded point only
/// spends part of the budget and the relaxation does not say which tied
/// levels to add. Two greedy passes fill the remainder, one from `x_minus`
/// and one from the lower corner; the better point is then improved by
/// pairwise budget exchanges.
#[allow(clippy::too_many_arguments)]
fn repair<O, R>(
    obj: &O,
    reg: &R,
    disc: &Discretization,
    budget: f64,
    x_minus: &[usize],
    cap: &[usize],
    value_minus: f64,
    h_lo: f64,
    max_evals: usize,
) -> (Vec<usize>, f64)
where
    O: SubmodularObjective,
    R: SeparableRegularizer + ?Sized,
{
    let mut evals = 0;
    let (mut best_x, mut best_h) = greedy_fill(
        obj,
        reg,
        disc,
        budget,
        x_minus.to_vec(),
        value_minus,
        cap,
        max_evals,
        &mut evals,
    );
    if evals < max_evals {
        let zero = vec![0; disc.dim()];
        let (x, h) = greedy_fill(obj, reg, disc, budget, zero, h_lo, cap, max_evals, &mut evals);
        if h < best_h {
            best_x = x;
            best_h = h;
        }
    }
    exchange_search(obj, reg, disc, budget, best_x, best_h, max_evals, &mut evals)
}

/// First-improvement local search over moves that lower coordinate `i` by
/// `2^m` levels and raise another coordinate `j` as far as the freed budget
/// allows.
#[allow(clippy::too_many_arguments)]
fn exchange_search<O, R>(
    obj: &O,
    reg: &R,
    disc: &Discretization,
    budget: f64,
    mut x: Vec<usize>,
    mut h: f64,
    max_evals: usize,
    evals: &mut usize,
) -> (Vec<usize>, f64)
where
    O: SubmodularObjective,
    R: SeparableRegularizer + ?Sized,
{
    let n = x.len();
    let top = disc.top();
    let mut point = disc.map(&x);
    let mut improved = true;
    while improved && *evals < max_evals {
        improved = false;
        for i in 0..n {
            let mut size = x[i].checked_next_power_of_two().unwrap_or(1);
            while size >= 1 && *evals < max_evals {
                let a = size.min(x[i]);
                size /= 2;
                if a == 0 {
                    continue;
                }
                let old_i = point[i];
                let new_i = disc.level(i, x[i] - a);
                point[i] = new_i;
                let freed_r = reg.total(&point);
                let mut accepted = false;
                for j in (0..n).filter(|&j| j != i && x[j] < top[j]) {
                    if *evals >= max_evals {
                        break;
                    }
                    let old_j = point[j];
                    let room = budget - freed_r + reg.term(j, old_j);
                    let (mut lo, mut hi) = (x[j], top[j]);
                    while lo < hi {
                        let mid = lo + (hi - lo).div_ceil(2);
                        if reg.term(j, disc.level(j, mid)) <= room {
                            lo = mid;
                        } else {
                            hi = mid - 1;
                        }
                    }
                    if lo == x[j] {
                        continue;
                    }
                    point[j] = disc.level(j, lo);
                    if reg.total(&point) <= budget {
                        let v = obj.value(&point);
                        *evals += 1;
                        if v < h {
                            x[i] -= a;
                            x[j] = lo;
                            h = v;
                            accepted = true;
                            improved = true;
                            break;
                        }
                    }
                    point[j] = old_j;
                }
                if !accepted {
                    point[i] = old_i;
                } else {
                    size = x[i].checked_next_power_of_two().unwrap_or(1);
                }
            }
        }
    }
    (x, h)
}

/// Raises coordinates toward `cap` while the budget allows, taking the move
/// with the largest decrease of `H` per unit of `R`. Each coordinate offers
/// a single-level step and a jump to its highest affordable level, so a
/// coordinate along which `H` is concave is not judged by its first level.
#[allow(clippy::too_many_arguments)]
fn greedy_fill<O, R>(
    obj: &O,
    reg: &R,
    disc: &Discretization,
    budget: f64,
    mut x: Vec<usize>,
    value: f64,
    cap: &[usize],
    max_evals: usize,
    evals: &mut usize,
) -> (Vec<usize>, f64)
where
    O: SubmodularObjective,
    R: SeparableRegularizer + ?Sized,
{
    let mut h = value;
    let mut point = disc.map(&x);
    let mut base_r = reg.total(&point);
    if base_r > budget {
        return (x, h);
    }
    loop {
        let mut best: Option<(usize, usize, f64, f64)> = None;
        for i in 0..x.len() {
            if x[i] >= cap[i] {
                continue;
            }
            let old = point[i];
            let old_term = reg.term(i, old);
            let room = budget - base_r + old_term;
            // Highest level in (x_i, cap_i] whose term fits in `room`.
            let (mut a, mut b) = (x[i], cap[i]);
            while a < b {
                let mid = a + (b - a).div_ceil(2);
                if reg.term(i, disc.level(i, mid)) <= room {
                    a = mid;
                } else {
                    b = mid - 1;
                }
            }
            let jump = a;
            if jump == x[i] {
                continue;
            }
            let targets = if jump > x[i] + 1 {
                [x[i] + 1, jump].to_vec()
            } else {
                vec![jump]
            };
            for j in targets {
                if *evals >= max_evals {
                    break;
                }
                let new = disc.level(i, j);
                let cost = reg.term(i, new) - old_term;
                point[i] = new;
                if reg.total(&point) <= budget && cost > 0.0 {
                    let hj = obj.value(&point);
                    *evals += 1;
                    let ratio = (h - hj) / cost;
                    if best.is_none_or(|b| ratio > b.2) {
                        best = Some((i, j, ratio, hj));
                    }
                }
                point[i] = old;
            }
        }
        match best {
            Some((i, j, _, hj)) if hj < h => {
                x[i] = j;
                point[i] = disc.level(i, j);
                base_r = reg.total(&point);
                h = hj;
            }
            _ => break,
        }
    }
    (x, h)
}

/// `g(lambda) = min_x sum_i [W_i(x_i) + lambda R_i(x_i)] - lambda B` with `W_i`
/// the prefix sums of `w`.
fn lagrangian_dual<R: SeparableRegularizer + ?Sized>(
    reg: &R,
    disc: &Discretization,
    w: &[f64],
    lambda: f64,
    budget: f64,
) -> f64 {
    let mut total = -lambda * budget;
    for i in 0..disc.dim() {
        let off = disc.offset(i);
        let lv = disc.levels(i);
        let mut prefix = 0.0;
        let mut best = lambda * reg.term(i, lv[0]);
        for j in 1..lv.len() {
            prefix += w[off + j - 1];
            best = best.min(prefix + lambda * reg.term(i, lv[j]));
        }
        total += best;
    }
    total
}

/// `max_{lambda >= 0} g(lambda)`, approximately. For `w` in the base polytope,
/// `H(lo) + W(x) <= H(A(x))`, so `H(lo) + g(lambda)` lower-bounds the
/// constrained grid minimum for every `lambda >= 0`; `g` is concave, so a
/// golden-section search is used, seeded with the `hints`.
fn dual_lower_bound<R: SeparableRegularizer + ?Sized>(
    reg: &R,
    disc: &Discretization,
    coeffs: &[f64],
    w: &[f64],
    budget: f64,
    hints: &[f64],
) -> f64 {
    let g = |l: f64| lagrangian_dual(reg, disc, w, l, budget);
    // Past this multiplier every level step increases W + lambda R.
    let hi = w.iter().zip(coeffs).map(|(wj, rj)| -wj / rj).fold(0.0, f64::max);
    let mut best = g(0.0).max(g(hi));
    for &l in hints {
        if l.is_finite() && l >= 0.0 {
            best = best.max(g(l));
        }
    }
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (0.0, hi);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    for _ in 0..80 {
        if b - a <= 1e-14 * hi.max(1.0) {
            break;
        }
        if gc >= gd {
            b = d;
            d = c;
            gd = gc;
            c = b - phi * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + phi * (b - a);
            gd = g(d);
        }
    }
    best.max(gc).max(gd)
}
