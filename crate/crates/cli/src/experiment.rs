//! Experiment orchestration and CSV emission.
//!
//! Each run writes into the output directory. Modes that take an uncertainty
//! set run one cell per `(set, gamma)` pair; with more than one cell every
//! cell gets its own subdirectory `<set>_gamma<gamma>` and cells run in
//! parallel. Every directory gets a `summary.csv` whose `status` row is
//! `converged`, `not_converged` or `error`; solver errors are recorded there
//! and do not stop other cells.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use robust_alloc::baselines::{
    evaluate_allocations, fw_adversary, solve_expected, solve_nominal, spread_start, Candidate,
};
use robust_alloc::csfm::{CsfmCertificate, RhoProfile};
use robust_alloc::robust::{adversary_best_response, solve_robust, AdversaryResponse};
use robust_alloc::synth::gen_synthetic;
use robust_alloc::{BudgetVector, InfluenceInstance, UncertaintyKind, UncertaintySet};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::io::{read_budget, write_instance, Schema};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Robust,
    Nominal,
    Expected,
    Adversary,
    Compare,
    FwCompare,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Robust => "robust",
            Mode::Nominal => "nominal",
            Mode::Expected => "expected",
            Mode::Adversary => "adversary",
            Mode::Compare => "compare",
            Mode::FwCompare => "fw-compare",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Status {
    Converged,
    NotConverged,
    Failed(String),
}

impl Status {
    pub fn name(&self) -> &'static str {
        match self {
            Status::Converged => "converged",
            Status::NotConverged => "not_converged",
            Status::Failed(_) => "error",
        }
    }

    fn from_flag(ok: bool) -> Self {
        if ok {
            Status::Converged
        } else {
            Status::NotConverged
        }
    }
}

#[derive(Debug, Clone)]
pub struct CellOutcome {
    pub dir: PathBuf,
    pub status: Status,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub cells: Vec<CellOutcome>,
}

impl Outcome {
    /// 1 if any cell failed, 2 if any did not converge, 0 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.cells.iter().any(|c| matches!(c.status, Status::Failed(_))) {
            1
        } else if self.cells.iter().any(|c| c.status == Status::NotConverged) {
            2
        } else {
            0
        }
    }
}

/// Builds the set of kind `kind` with budget `gamma`. D-norm upper bounds are
/// `max(dnorm_upper, x_hat)` per edge.
pub fn build_set(
    inst: &InfluenceInstance,
    kind: UncertaintyKind,
    gamma: f64,
    cfg: &RunConfig,
) -> robust_alloc::Result<UncertaintySet> {
    match kind {
        UncertaintyKind::Ellipsoidal => UncertaintySet::ellipsoidal(inst, gamma),
        UncertaintyKind::DNorm => {
            let upper = inst.x_hat().into_iter().map(|x| x.max(cfg.dnorm_upper)).collect();
            UncertaintySet::dnorm(inst, upper, gamma)
        }
    }
}

pub fn run_experiment(cfg: &RunConfig, mode: Mode, inst: &InfluenceInstance) -> Result<Outcome, CliError> {
    cfg.validate()?;
    create_dir(&cfg.out)?;
    let cell = match mode {
        Mode::Nominal | Mode::Expected => run_baseline(cfg, mode, inst, &cfg.out)?,
        Mode::Compare => run_compare(cfg, inst, &cfg.out)?,
        Mode::Robust | Mode::Adversary | Mode::FwCompare => return run_cells(cfg, mode, inst),
    };
    Ok(Outcome { cells: vec![cell] })
}

/// Generates a synthetic instance into `cfg.out`: `instance.csv` in the
/// counts schema and `truth.csv` with the true failure probabilities.
pub fn generate(cfg: &RunConfig) -> Result<PathBuf, CliError> {
    let (inst, truth) = gen_synthetic(&cfg.synth_spec())?;
    create_dir(&cfg.out)?;
    let path = cfg.out.join("instance.csv");
    write_instance(&path, &inst, Schema::Counts)?;
    let rows = inst.edges().iter().zip(&truth).map(|(e, x)| {
        vec![
            inst.channels()[e.channel].clone(),
            inst.customers()[e.customer].clone(),
            x.to_string(),
        ]
    });
    write_csv(&cfg.out.join("truth.csv"), &["s", "t", "x_true"], rows)?;
    Ok(path)
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn write_csv<I>(path: &Path, header: &[&str], rows: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::csv(path, e))?;
    w.write_record(header).map_err(|e| CliError::csv(path, e))?;
    for row in rows {
        w.write_record(&row).map_err(|e| CliError::csv(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

struct Summary(Vec<(String, String)>);

impl Summary {
    fn new(cfg: &RunConfig, mode: Mode) -> Self {
        let mut s = Summary(Vec::new());
        s.put("mode", mode.name());
        s.put("cap", cfg.cap);
        s.put("delta", cfg.delta);
        s.put("epsilon", cfg.epsilon);
        s.put("seed", cfg.seed);
        s
    }

    fn put(&mut self, key: &str, value: impl ToString) {
        self.0.push((key.to_string(), value.to_string()));
    }

    fn finish(mut self, dir: &Path, status: &Status) -> Result<(), CliError> {
        self.put("status", status.name());
        if let Status::Failed(msg) = status {
            self.put("message", msg);
        }
        write_csv(
            &dir.join("summary.csv"),
            &["key", "value"],
            self.0.into_iter().map(|(k, v)| vec![k, v]),
        )
    }
}

fn f(v: f64) -> String {
    v.to_string()
}

fn write_budget(path: &Path, inst: &InfluenceInstance, y: &[f64]) -> Result<(), CliError> {
    let rows = inst.channels().iter().zip(y).map(|(c, v)| vec![c.clone(), f(*v)]);
    write_csv(path, &["channel", "y"], rows)
}

fn bounds_row(iter: usize, c: &CsfmCertificate) -> Vec<String> {
    vec![
        iter.to_string(),
        f(c.theory_gap),
        f(c.bracket_gap),
        f(c.lagrangian_gap),
        f(c.fw_dual_gap),
        f(c.certified_gap),
    ]
}

const BOUNDS_HEADER: [&str; 6] = [
    "iter",
    "theory_gap",
    "bracket_gap",
    "lagrangian_gap",
    "fw_dual_gap",
    "certified_gap",
];

/// Entries of rho sorted in decreasing order. `selected` marks entries at or
/// above the threshold `lambda_star`, i.e. the levels taken by `x_minus`.
fn write_rho(path: &Path, inst: &InfluenceInstance, rho: &RhoProfile, x_minus: &[usize]) -> Result<(), CliError> {
    let mut entries: Vec<(usize, usize, f64)> = (0..rho.dim())
        .flat_map(|i| rho.coord(i).iter().enumerate().map(move |(j, &v)| (i, j + 1, v)))
        .collect();
    entries.sort_by(|a, b| b.2.total_cmp(&a.2).then(a.0.cmp(&b.0)).then(a.1.cmp(&b.1)));
    let rows = entries.into_iter().enumerate().map(|(rank, (i, level, v))| {
        let e = &inst.edges()[i];
        vec![
            (rank + 1).to_string(),
            inst.channels()[e.channel].clone(),
            inst.customers()[e.customer].clone(),
            level.to_string(),
            f(v),
            u8::from(level <= x_minus[i]).to_string(),
        ]
    });
    write_csv(path, &["rank", "s", "t", "level", "rho", "selected"], rows)
}

fn write_adversary(path: &Path, inst: &InfluenceInstance, x: &[f64]) -> Result<(), CliError> {
    let rows = inst.edges().iter().zip(x).map(|(e, v)| {
        vec![
            inst.channels()[e.channel].clone(),
            inst.customers()[e.customer].clone(),
            f(e.x_hat),
            f(*v),
        ]
    });
    write_csv(path, &["s", "t", "x_hat", "x_worst"], rows)
}

/// Whether an adversary solve is certified to `epsilon`. The bracket and
/// Lagrangian bounds only count when the threshold group is a single entry
/// and the relaxation converged.
fn adversary_certified(c: &CsfmCertificate, epsilon: f64) -> bool {
    c.certified_gap <= epsilon || (c.ties_at_threshold <= 1 && c.fw_converged && c.best_gap() <= epsilon)
}

fn response_summary(s: &mut Summary, r: &AdversaryResponse) {
    let c = &r.certificate;
    s.put("worst_case", r.value);
    s.put("lower_bound", r.lower_bound());
    s.put("regularizer", r.regularizer);
    s.put("lambda_star", c.lambda_star);
    s.put("ties_at_threshold", c.ties_at_threshold);
    s.put("certified_gap", c.certified_gap);
    s.put("theory_gap", c.theory_gap);
}

fn write_response(dir: &Path, inst: &InfluenceInstance, r: &AdversaryResponse) -> Result<(), CliError> {
    write_adversary(&dir.join("adversary.csv"), inst, &r.x_worst)?;
    write_rho(&dir.join("rho.csv"), inst, &r.rho, &r.certificate.x_minus)
}

fn initial_budget(cfg: &RunConfig, inst: &InfluenceInstance) -> Result<Vec<f64>, CliError> {
    match &cfg.budget {
        Some(path) => read_budget(path, inst),
        None => Ok(BudgetVector::uniform(inst.num_channels(), cfg.cap).into_vec()),
    }
}

fn gamma_label(g: f64) -> String {
    format!("{g}")
}

fn run_cells(cfg: &RunConfig, mode: Mode, inst: &InfluenceInstance) -> Result<Outcome, CliError> {
    let kinds = cfg.kinds()?;
    let gammas = cfg.gamma_grid();
    let cells: Vec<(UncertaintyKind, f64)> = kinds
        .iter()
        .flat_map(|&k| gammas.iter().map(move |&g| (k, g)))
        .collect();
    let single = cells.len() == 1;
    let y = match mode {
        Mode::Adversary | Mode::FwCompare => Some(initial_budget(cfg, inst)?),
        _ => None,
    };
    let outcomes: Result<Vec<CellOutcome>, CliError> = cells
        .par_iter()
        .map(|&(kind, gamma)| {
            let dir = if single {
                cfg.out.clone()
            } else {
                cfg.out.join(format!("{}_gamma{}", kind.name(), gamma_label(gamma)))
            };
            create_dir(&dir)?;
            let mut summary = Summary::new(cfg, mode);
            summary.put("set", kind.name());
            summary.put("gamma", gamma);
            let status = match mode {
                Mode::Robust => robust_cell(cfg, inst, kind, gamma, &dir, &mut summary)?,
                Mode::Adversary => adversary_cell(cfg, inst, kind, gamma, y.as_deref().unwrap(), &dir, &mut summary)?,
                _ => fw_compare_cell(cfg, inst, kind, gamma, y.as_deref().unwrap(), &dir, &mut summary)?,
            };
            summary.finish(&dir, &status)?;
            Ok(CellOutcome { dir, status })
        })
        .collect();
    Ok(Outcome { cells: outcomes? })
}

/// Turns a solver error into a failed status; IO errors still propagate.
fn solver<T>(r: robust_alloc::Result<T>) -> Result<T, Status> {
    r.map_err(|e| Status::Failed(e.to_string()))
}

macro_rules! try_solver {
    ($e:expr) => {
        match solver($e) {
            Ok(v) => v,
            Err(status) => return Ok(status),
        }
    };
}

fn robust_cell(
    cfg: &RunConfig,
    inst: &InfluenceInstance,
    kind: UncertaintyKind,
    gamma: f64,
    dir: &Path,
    summary: &mut Summary,
) -> Result<Status, CliError> {
    let opts = cfg.robust_options()?;
    let set = try_solver!(build_set(inst, kind, gamma, cfg));
    let report = try_solver!(solve_robust(inst, &set, &opts));

    let trace = report.records.iter().map(|r| {
        vec![
            r.iter.to_string(),
            f(r.lower_best),
            f(r.upper_best),
            f(r.gap),
            f(r.step),
            f(r.seconds),
        ]
    });
    write_csv(
        &dir.join("trace.csv"),
        &["iter", "L", "U", "gap", "step", "seconds"],
        trace,
    )?;
    write_budget(&dir.join("budget.csv"), inst, report.y_robust.as_slice())?;
    let bounds = report.certificates.iter().enumerate().map(|(k, c)| bounds_row(k, c));
    write_csv(&dir.join("bounds.csv"), &BOUNDS_HEADER, bounds)?;
    write_response(dir, inst, &report.response)?;

    summary.put("iterations", report.records.len());
    summary.put("lower_best", report.lower_best);
    summary.put("upper_best", report.upper_best);
    summary.put("gap", report.gap);
    summary.put("certified_lower_best", report.certified_lower_best);
    response_summary(summary, &report.response);
    Ok(Status::from_flag(report.converged))
}

fn adversary_cell(
    cfg: &RunConfig,
    inst: &InfluenceInstance,
    kind: UncertaintyKind,
    gamma: f64,
    y: &[f64],
    dir: &Path,
    summary: &mut Summary,
) -> Result<Status, CliError> {
    let opts = cfg.robust_options()?.csfm_options();
    let set = try_solver!(build_set(inst, kind, gamma, cfg));
    let r = try_solver!(adversary_best_response(inst, &set, y, &opts, None));
    write_response(dir, inst, &r)?;
    write_csv(&dir.join("bounds.csv"), &BOUNDS_HEADER, [bounds_row(0, &r.certificate)])?;
    response_summary(summary, &r);
    Ok(Status::from_flag(adversary_certified(&r.certificate, cfg.epsilon)))
}

fn fw_compare_cell(
    cfg: &RunConfig,
    inst: &InfluenceInstance,
    kind: UncertaintyKind,
    gamma: f64,
    y: &[f64],
    dir: &Path,
    summary: &mut Summary,
) -> Result<Status, CliError> {
    let opts = cfg.robust_options()?.csfm_options();
    let set = try_solver!(build_set(inst, kind, gamma, cfg));
    let r = try_solver!(adversary_best_response(inst, &set, y, &opts, None));
    let starts = [("x_hat", set.center().to_vec()), ("spread", spread_start(&set))];
    let mut traces = Vec::new();
    for (name, x0) in starts {
        traces.push((name, try_solver!(fw_adversary(inst, y, &set, &x0, cfg.fw_iters))));
    }
    let rows = traces.iter().flat_map(|(name, tr)| {
        tr.values
            .iter()
            .enumerate()
            .map(move |(k, v)| vec![name.to_string(), k.to_string(), f(*v)])
    });
    write_csv(&dir.join("fw_trace.csv"), &["init", "iter", "value"], rows)?;
    write_response(dir, inst, &r)?;

    response_summary(summary, &r);
    for (name, tr) in &traces {
        let v = tr.final_value();
        summary.put(&format!("fw_{name}_final"), v);
        let rel = if r.value != 0.0 {
            (v - r.value) / r.value.abs()
        } else {
            v - r.value
        };
        summary.put(&format!("fw_{name}_relative_excess"), rel);
    }
    Ok(Status::from_flag(adversary_certified(&r.certificate, cfg.epsilon)))
}

fn run_baseline(cfg: &RunConfig, mode: Mode, inst: &InfluenceInstance, dir: &Path) -> Result<CellOutcome, CliError> {
    let opts = cfg.robust_options()?.ascent_options();
    let mut summary = Summary::new(cfg, mode);
    let result = if mode == Mode::Nominal {
        solve_nominal(inst, cfg.cap, &opts)
    } else {
        solve_expected(inst, cfg.cap, &opts)
    };
    let status = match result {
        Ok(r) => {
            write_budget(&dir.join("budget.csv"), inst, r.y.as_slice())?;
            summary.put("value", r.value);
            summary.put("upper_bound", r.upper_bound);
            summary.put("gap", r.gap);
            summary.put("iterations", r.iterations);
            Status::from_flag(r.converged)
        }
        Err(e) => Status::Failed(e.to_string()),
    };
    summary.finish(dir, &status)?;
    Ok(CellOutcome {
        dir: dir.to_path_buf(),
        status,
    })
}

/// Trains the robust budget at `gamma` for every set kind, plus the nominal
/// and expected budgets, and evaluates all of them across the gamma grid.
fn run_compare(cfg: &RunConfig, inst: &InfluenceInstance, dir: &Path) -> Result<CellOutcome, CliError> {
    let mut summary = Summary::new(cfg, Mode::Compare);
    summary.put("train_gamma", cfg.gamma);
    let status = match compare_inner(cfg, inst, dir, &mut summary)? {
        Ok(s) => s,
        Err(s) => s,
    };
    summary.finish(dir, &status)?;
    Ok(CellOutcome {
        dir: dir.to_path_buf(),
        status,
    })
}

fn compare_inner(
    cfg: &RunConfig,
    inst: &InfluenceInstance,
    dir: &Path,
    summary: &mut Summary,
) -> Result<Result<Status, Status>, CliError> {
    let ropts = cfg.robust_options()?;
    let kinds = cfg.kinds()?;
    let gammas = cfg.gamma_grid();

    let nominal = match solver(solve_nominal(inst, cfg.cap, &ropts.ascent_options())) {
        Ok(v) => v,
        Err(s) => return Ok(Err(s)),
    };
    let expected = match solver(solve_expected(inst, cfg.cap, &ropts.ascent_options())) {
        Ok(v) => v,
        Err(s) => return Ok(Err(s)),
    };
    write_budget(&dir.join("budget_nominal.csv"), inst, nominal.y.as_slice())?;
    write_budget(&dir.join("budget_expected.csv"), inst, expected.y.as_slice())?;
    let mut converged = nominal.converged && expected.converged;

    let trained: Vec<robust_alloc::Result<(UncertaintySet, _)>> = kinds
        .par_iter()
        .map(|&k| {
            let set = build_set(inst, k, cfg.gamma, cfg)?;
            let report = solve_robust(inst, &set, &ropts)?;
            Ok((set, report))
        })
        .collect();

    let mut rows = Vec::new();
    for (k, t) in kinds.iter().zip(trained) {
        let (set, report) = match solver(t) {
            Ok(v) => v,
            Err(s) => {
                write_compare(dir, &rows)?;
                return Ok(Err(s));
            }
        };
        write_budget(
            &dir.join(format!("budget_robust_{}.csv", k.name())),
            inst,
            report.y_robust.as_slice(),
        )?;
        summary.put(&format!("robust_{}_gap", k.name()), report.gap);
        converged &= report.converged;
        let candidates = [
            Candidate {
                name: "robust".into(),
                y: report.y_robust.clone(),
            },
            Candidate {
                name: "nominal".into(),
                y: nominal.y.clone(),
            },
            Candidate {
                name: "expected".into(),
                y: expected.y.clone(),
            },
        ];
        match solver(evaluate_allocations(
            inst,
            &[set],
            &gammas,
            &candidates,
            &ropts.csfm_options(),
        )) {
            Ok(r) => rows.extend(r),
            Err(s) => {
                write_compare(dir, &rows)?;
                return Ok(Err(s));
            }
        }
    }
    write_compare(dir, &rows)?;
    Ok(Ok(Status::from_flag(converged)))
}

fn write_compare(dir: &Path, rows: &[robust_alloc::baselines::ComparisonRow]) -> Result<(), CliError> {
    let rows = rows.iter().map(|r| {
        vec![
            r.kind.name().to_string(),
            f(r.gamma),
            r.candidate.clone(),
            f(r.worst_case),
            f(r.theory_gap),
            f(r.certified_gap),
        ]
    });
    write_csv(
        &dir.join("compare.csv"),
        &[
            "kind",
            "gamma",
            "candidate",
            "worst_case",
            "theory_gap",
            "certified_gap",
        ],
        rows,
    )
}
