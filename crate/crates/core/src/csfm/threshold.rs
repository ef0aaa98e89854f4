//! Solution path `x(lambda)` obtained by thresholding the relaxation optimum,
//! and the scan for the constrained threshold.

use super::discretization::Discretization;
use super::greedy::RhoProfile;
use super::oracle::SeparableRegularizer;
use crate::error::{param, Error, Result};

/// `x(lambda)_i = max { j : rho_i(j) >= lambda }`, or 0 when no level clears.
pub fn threshold(rho: &RhoProfile, lambda: f64) -> Vec<usize> {
    (0..rho.dim())
        .map(|i| rho.coord(i).iter().take_while(|&&v| v >= lambda).count())
        .collect()
}

/// `R(A(x))` summed in coordinate order.
pub fn lattice_regularizer<R: SeparableRegularizer + ?Sized>(reg: &R, disc: &Discretization, x: &[usize]) -> f64 {
    x.iter().enumerate().map(|(i, &j)| reg.term(i, disc.level(i, j))).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LambdaSearch {
    /// Smallest threshold whose solution satisfies the budget; `0` when the
    /// top corner is feasible and `+inf` when only the origin is.
    pub lambda_star: f64,
    /// Largest threshold whose solution meets or exceeds the budget. When the
    /// top corner is strictly feasible there is none and this is `0`.
    pub lambda_plus: f64,
    pub x_minus: Vec<usize>,
    pub x_plus: Vec<usize>,
    /// Threshold values visited (the smallest entry of each group), in
    /// decreasing order.
    pub scanned: Vec<f64>,
    /// Entries of rho in the group of `lambda_plus` (1 when distinct there).
    pub ties_at_threshold: usize,
}

/// Entries of rho closer than this, relative to the largest magnitude, are
/// treated as one tie group. Frank-Wolfe leaves pooled entries equal only up
/// to round-off, and splitting such a group yields a point that is not a
/// Lagrangian minimizer.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// Linear scan over the tie groups of `rho` in decreasing order, stopping at
/// the first threshold whose solution violates `R(x) <= budget`.
pub fn lambda_search<R: SeparableRegularizer + ?Sized>(
    rho: &RhoProfile,
    disc: &Discretization,
    reg: &R,
    budget: f64,
) -> Result<LambdaSearch> {
    if !budget.is_finite() {
        return Err(param("budget", format!("must be finite, got {budget}")));
    }
    let n = disc.dim();
    let mut x = vec![0usize; n];
    let r_lo = lattice_regularizer(reg, disc, &x);
    if r_lo > budget {
        return Err(Error::Infeasible { r_lo, budget });
    }

    let mut entries: Vec<(f64, u32)> = Vec::with_capacity(rho.len());
    for i in 0..n {
        entries.extend(rho.coord(i).iter().map(|&v| (v, i as u32)));
    }
    entries.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));

    let mut terms: Vec<f64> = (0..n).map(|i| reg.term(i, disc.level(i, 0))).collect();
    let mut r = r_lo;
    let mut scanned = Vec::new();
    // Index into `scanned` of the last feasible threshold.
    let mut last_feasible: Option<usize> = None;
    let mut crossed_infeasible = false;

    let scale = entries.iter().map(|e| e.0.abs()).fold(0.0, f64::max);
    let tol = TIE_TOLERANCE * scale;
    let mut group_sizes = Vec::new();

    let mut pos = 0;
    while pos < entries.len() {
        let mut v = entries[pos].0;
        let mut end = pos;
        while end < entries.len() && v - entries[end].0 <= tol {
            v = entries[end].0;
            let i = entries[end].1 as usize;
            x[i] += 1;
            let t = reg.term(i, disc.level(i, x[i]));
            r += t - terms[i];
            terms[i] = t;
            end += 1;
        }
        scanned.push(v);
        group_sizes.push(end - pos);
        pos = end;
        if r <= budget {
            last_feasible = Some(scanned.len() - 1);
        } else {
            crossed_infeasible = true;
            break;
        }
    }

    // The incremental sum may drift; confirm feasibility on a direct sum.
    let mut star_idx = last_feasible;
    loop {
        let lambda = star_idx.map_or(f64::INFINITY, |k| scanned[k]);
        let cand = threshold(rho, lambda);
        if lattice_regularizer(reg, disc, &cand) <= budget || star_idx.is_none() {
            break;
        }
        star_idx = star_idx.and_then(|k| k.checked_sub(1));
    }

    let top_feasible = !crossed_infeasible && star_idx.map_or(entries.is_empty(), |k| k + 1 == scanned.len());
    let (lambda_star, lambda_plus) = if top_feasible {
        (0.0, 0.0)
    } else {
        let plus_idx = star_idx.map_or(0, |k| k + 1);
        (star_idx.map_or(f64::INFINITY, |k| scanned[k]), scanned[plus_idx])
    };
    let x_minus = if top_feasible {
        disc.top()
    } else {
        threshold(rho, lambda_star)
    };
    let x_plus = if top_feasible {
        disc.top()
    } else {
        threshold(rho, lambda_plus)
    };
    let ties_at_threshold = if top_feasible {
        0
    } else {
        group_sizes[star_idx.map_or(0, |k| k + 1)]
    };

    Ok(LambdaSearch {
        lambda_star,
        lambda_plus,
        x_minus,
        x_plus,
        scanned,
        ties_at_threshold,
    })
}
