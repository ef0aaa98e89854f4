//! Pairwise Frank-Wolfe on the dual of the regularized relaxation
//!
//! ```text
//! max_{w in B(H)} f(w),  f(w) = min_{rho nonincreasing} <rho, w> + sum_ij r_ij rho_ij^2 / 2
//! ```
//!
//! The gradient of `f` is the inner minimizer `rho(w)`, a per-coordinate
//! weighted isotonic regression of `-w / r`; the linear oracle is the greedy
//! vertex at `rho(w)`.

use std::hash::{Hash, Hasher};

use super::discretization::Discretization;
use super::greedy::{dot, BaseVertex, GreedyWorkspace, RhoProfile};
use super::oracle::SubmodularObjective;
use super::pav::{pav_into, Block};
use crate::error::{param, Error, Result};

#[derive(Debug, Clone)]
pub struct FwOptions {
    /// Stop once the Frank-Wolfe gap `<rho, s - w>` is at most this.
    pub epsilon: f64,
    pub max_iters: usize,
    /// Active atoms kept for away steps; beyond this the set is collapsed
    /// into the current iterate.
    pub max_active: usize,
}

impl Default for FwOptions {
    fn default() -> Self {
        FwOptions {
            epsilon: 1e-9,
            max_iters: 2000,
            max_active: 256,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FwResult {
    pub rho: RhoProfile,
    /// Final dual iterate, a convex combination of greedy vertices.
    pub w: BaseVertex,
    pub dual_gap: f64,
    pub dual_value: f64,
    pub iterations: usize,
    /// Gap at or below `epsilon`, or stopped by the monitor.
    pub converged: bool,
    pub stopped_by_monitor: bool,
    pub active_atoms: usize,
}

/// State handed to a monitor of [`fw_solve_monitored`].
pub struct FwProgress<'a> {
    pub iteration: usize,
    pub rho: &'a [f64],
    pub w: &'a [f64],
    pub dual_gap: f64,
}

/// Iterations at which the monitor runs: 0, powers of two, multiples of 32.
fn monitor_due(iteration: usize) -> bool {
    iteration.is_power_of_two() || iteration.is_multiple_of(32)
}

const DROP_WEIGHT: f64 = 1e-12;

struct Atom {
    w: Vec<f64>,
    weight: f64,
    /// `None` for collapsed aggregates, which never match a fresh vertex.
    key: Option<u64>,
}

fn vertex_key(w: &[f64]) -> u64 {
    let mut h = std::collections::hash_map::DefaultHasher::new();
    for v in w {
        v.to_bits().hash(&mut h);
    }
    h.finish()
}

/// Maps dual iterates to their isotonic primal profile.
struct Relaxation<'a> {
    offsets: &'a [usize],
    coeffs: &'a [f64],
    blocks: Vec<Block>,
}

impl Relaxation<'_> {
    fn rho_into(&mut self, w: &[f64], out: &mut [f64]) {
        for win in self.offsets.windows(2) {
            let (a, b) = (win[0], win[1]);
            if a == b {
                continue;
            }
            let r = &self.coeffs[a..b];
            let z = w[a..b].iter().zip(r).map(|(wj, rj)| -wj / rj);
            pav_into(z, r, &mut out[a..b], &mut self.blocks);
        }
    }

    fn dual_value(&self, w: &[f64], rho: &[f64]) -> f64 {
        w.iter()
            .zip(rho)
            .zip(self.coeffs)
            .map(|((wj, pj), rj)| pj * wj + 0.5 * rj * pj * pj)
            .sum()
    }
}

/// Solves the regularized relaxation with quadratic coefficients `coeffs`
/// (flat layout, all strictly positive). `warm_start` selects the first greedy
/// vertex; the zero profile is used otherwise.
pub fn fw_solve<O: SubmodularObjective>(
    obj: &O,
    disc: &Discretization,
    coeffs: &[f64],
    opts: &FwOptions,
    warm_start: Option<&RhoProfile>,
) -> Result<FwResult> {
    fw_solve_monitored(obj, disc, coeffs, opts, warm_start, |_| false)
}

/// [`fw_solve`] with a callback run periodically on the current iterate;
/// returning `true` stops the solve.
pub fn fw_solve_monitored<O: SubmodularObjective>(
    obj: &O,
    disc: &Discretization,
    coeffs: &[f64],
    opts: &FwOptions,
    warm_start: Option<&RhoProfile>,
    mut monitor: impl FnMut(&FwProgress) -> bool,
) -> Result<FwResult> {
    let n = disc.num_entries();
    if coeffs.len() != n {
        return Err(Error::Dimension {
            what: "quadratic coefficients",
            expected: n,
            got: coeffs.len(),
        });
    }
    if let Some((k, c)) = coeffs.iter().enumerate().find(|(_, c)| !(**c > 0.0) || !c.is_finite()) {
        return Err(param("coeffs", format!("entry {k} must be finite and > 0, got {c}")));
    }
    if !(opts.epsilon >= 0.0) {
        return Err(param("epsilon_fw", format!("must be >= 0, got {}", opts.epsilon)));
    }
    if let Some(ws) = warm_start {
        if ws.len() != n {
            return Err(Error::Dimension {
                what: "warm-start rho entries",
                expected: n,
                got: ws.len(),
            });
        }
        ws.check_monotone()?;
    }

    let mut relax = Relaxation {
        offsets: disc.offsets(),
        coeffs,
        blocks: Vec::new(),
    };
    let mut greedy = GreedyWorkspace::new(disc);

    let mut s = vec![0.0; n];
    let init = warm_start
        .map(|r| r.as_slice().to_vec())
        .unwrap_or_else(|| vec![0.0; n]);
    greedy.vertex_into(obj, disc, &init, &mut s);
    let mut w = s.clone();
    let mut atoms = vec![Atom {
        key: Some(vertex_key(&s)),
        w: s.clone(),
        weight: 1.0,
    }];

    let mut rho = vec![0.0; n];
    let mut rho_tmp = vec![0.0; n];
    let mut w_tmp = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut iterations = 0;
    let mut converged = false;
    let mut stopped_by_monitor = false;
    let mut gap;

    loop {
        relax.rho_into(&w, &mut rho);
        greedy.vertex_into(obj, disc, &rho, &mut s);
        let rho_w = dot(&rho, &w);
        let rho_s = dot(&rho, &s);
        gap = rho_s - rho_w;
        if gap <= opts.epsilon {
            converged = true;
            break;
        }
        if iterations >= opts.max_iters {
            break;
        }
        if monitor_due(iterations)
            && monitor(&FwProgress {
                iteration: iterations,
                rho: &rho,
                w: &w,
                dual_gap: gap,
            })
        {
            converged = true;
            stopped_by_monitor = true;
            break;
        }
        iterations += 1;

        let (away, rho_a) = atoms
            .iter()
            .enumerate()
            .map(|(k, a)| (k, dot(&rho, &a.w)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("active set is never empty");
        let slope0 = rho_s - rho_a;
        if !(slope0 > 0.0) {
            // Only reachable through round-off once the gap is at noise level.
            break;
        }
        for ((dj, sj), aj) in d.iter_mut().zip(&s).zip(&atoms[away].w) {
            *dj = sj - aj;
        }
        let t_max = atoms[away].weight;

        let mut deriv = |t: f64| {
            for ((x, wj), dj) in w_tmp.iter_mut().zip(&w).zip(&d) {
                *x = wj + t * dj;
            }
            relax.rho_into(&w_tmp, &mut rho_tmp);
            dot(&rho_tmp, &d)
        };
        let t = line_search(&mut deriv, slope0, t_max);
        if !(t > 0.0) {
            break;
        }

        let key = vertex_key(&s);
        let s_idx = match atoms.iter().position(|a| a.key == Some(key) && a.w == s) {
            Some(k) => k,
            None => {
                atoms.push(Atom {
                    w: s.clone(),
                    weight: 0.0,
                    key: Some(key),
                });
                atoms.len() - 1
            }
        };
        let mut step = t;
        let remaining = atoms[away].weight - t;
        if remaining <= DROP_WEIGHT {
            // Move the leftover mass too, so w stays the exact combination.
            step = atoms[away].weight;
        }
        for (wj, dj) in w.iter_mut().zip(&d) {
            *wj += step * dj;
        }
        atoms[s_idx].weight += step;
        atoms[away].weight -= step;
        if atoms[away].weight <= DROP_WEIGHT {
            atoms.swap_remove(away);
        }

        if atoms.len() > opts.max_active {
            atoms.clear();
            atoms.push(Atom {
                w: w.clone(),
                weight: 1.0,
                key: None,
            });
        }
    }

    let dual_value = relax.dual_value(&w, &rho);
    Ok(FwResult {
        rho: RhoProfile::from_parts_unchecked(rho, disc.offsets().to_vec()),
        w: BaseVertex(w),
        dual_gap: gap,
        dual_value,
        iterations,
        converged,
        stopped_by_monitor,
        active_atoms: atoms.len(),
    })
}

/// Maximizes a concave `phi` on `[0, t_max]` given `phi'(0) = slope0 > 0`, by
/// an Illinois root search on the nonincreasing derivative.
fn line_search(deriv: &mut impl FnMut(f64) -> f64, slope0: f64, t_max: f64) -> f64 {
    let g_max = deriv(t_max);
    if g_max >= 0.0 {
        return t_max;
    }
    let (mut a, mut fa, mut b, mut fb) = (0.0, slope0, t_max, g_max);
    let mut side = 0i8;
    let mut c = a;
    for _ in 0..80 {
        c = (a * fb - b * fa) / (fb - fa);
        if !(c > a && c < b) {
            c = 0.5 * (a + b);
        }
        let fc = deriv(c);
        if fc.abs() <= 1e-13 * slope0 || (b - a) <= 1e-15 * t_max {
            return c;
        }
        if fc > 0.0 {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        } else {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        }
    }
    c
}
