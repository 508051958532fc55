//! `optimize`, `evaluate`, `stack` and `report`.

use std::fs;
use std::path::{Path, PathBuf};

use qcompress_core::circuit::{build_template, build_trotter, evaluate, initial_params, stack, Arch};
use qcompress_core::compress::{
    epsilon_between, schedule_step, CostKind, ScheduleConfig, StageResult, TaskMap, Targets,
};
use qcompress_core::model::{ModelKind, ModelSpec, Propagator};

use crate::config::{check_size, Plan, RunConfig};
use crate::error::{Result, RunError};
use crate::exec::Pool;
use crate::io::{checkpoint_dir, checkpoint_name, fmt_time, num, write_csv, write_manifest, Checkpoint, SCHEMA_VERSION};

/// Outcome of one `(arch, M, t)` stage: a checkpoint per ladder size, or the
/// failure message.
#[derive(Debug, Clone)]
pub struct StageRecord {
    pub arch: Arch,
    pub depth: usize,
    pub t: f64,
    /// True when loaded from existing checkpoints instead of recomputed.
    pub resumed: bool,
    pub outcome: std::result::Result<Vec<Checkpoint>, String>,
}

impl StageRecord {
    pub fn final_checkpoint(&self) -> Option<&Checkpoint> {
        self.outcome.as_ref().ok().and_then(|c| c.last())
    }
}

#[derive(Debug, Clone)]
pub struct OptimizeReport {
    pub records: Vec<StageRecord>,
    /// One ε-vs-t CSV per `(arch, M)`.
    pub csv_files: Vec<PathBuf>,
}

pub const OPTIMIZE_HEADER: [&str; 15] = [
    "model",
    "arch",
    "M",
    "t",
    "L",
    "epsilon",
    "cost_value",
    "initial_cost",
    "lr",
    "beta1",
    "beta2",
    "delta",
    "iterations",
    "aborted_at",
    "status",
];

/// Runs the warm-started schedule for every `(arch, M)` series. Series are
/// independent tasks on the pool; grid points inside a series share it.
pub fn cmd_optimize(plan: &Plan, pool: &Pool) -> Result<OptimizeReport> {
    let targets = Targets::new(plan.kind, &plan.config.ladder)?;
    let series = plan.series();
    let results = pool.map(&series, &|&(a, m)| run_series(plan, &targets, a, m, pool));
    let mut records = Vec::new();
    let mut csv_files = Vec::new();
    for r in results {
        let (recs, path) = r?;
        records.extend(recs);
        csv_files.push(path);
    }
    let cfg = &plan.config;
    write_manifest(&cfg.out.join("optimize"), "optimize", cfg, &csv_files)?;
    Ok(OptimizeReport { records, csv_files })
}

fn run_series(plan: &Plan, targets: &Targets, arch_idx: usize, depth: usize, pool: &Pool) -> Result<(Vec<StageRecord>, PathBuf)> {
    let cfg = &plan.config;
    let arch = plan.archs[arch_idx];
    let dir = checkpoint_dir(&cfg.out, plan.kind, arch, depth);
    let sched = ScheduleConfig {
        ladder: cfg.ladder.clone(),
        iterations: cfg.iterations.clone(),
        grid: plan.grids[arch_idx].clone(),
        cost: plan.cost,
        seed: cfg.seed,
    };
    let mut warm = initial_params(&build_template(arch, cfg.ladder[0], depth)?, cfg.seed);
    let mut records = Vec::with_capacity(cfg.times.len());
    for &t in &cfg.times {
        if let Some(done) = load_completed(&dir, plan, arch, depth, t) {
            warm = done.last().expect("nonempty ladder").params.clone();
            records.push(StageRecord { arch, depth, t, resumed: true, outcome: Ok(done) });
            continue;
        }
        match schedule_step(targets, arch, depth, t, &warm, &sched, pool) {
            Ok(res) => {
                let cps: Vec<Checkpoint> = res
                    .stages
                    .iter()
                    .map(|s| to_checkpoint(plan.kind, arch, depth, t, plan.cost, s))
                    .collect();
                for cp in &cps {
                    cp.save(&dir.join(checkpoint_name(t, cp.n_qubits)))?;
                }
                warm = res.final_stage().run.best_params.clone();
                records.push(StageRecord { arch, depth, t, resumed: false, outcome: Ok(cps) });
            }
            Err(e) => {
                eprintln!("warning: {} {} M={depth} t={}: {e}", plan.kind.name(), arch.name(), fmt_time(t));
                records.push(StageRecord { arch, depth, t, resumed: false, outcome: Err(e.to_string()) });
            }
        }
    }
    let path = cfg.out.join(format!("epsilon_{}_{}_M{depth}.csv", plan.kind.name(), arch.name()));
    write_csv(&path, &OPTIMIZE_HEADER, &series_rows(plan.kind, &records))?;
    Ok((records, path))
}

fn to_checkpoint(kind: ModelKind, arch: Arch, depth: usize, t: f64, cost: CostKind, s: &StageResult) -> Checkpoint {
    Checkpoint {
        schema_version: SCHEMA_VERSION,
        model: kind.name().into(),
        arch: arch.name(),
        depth,
        repeats: 1,
        n_qubits: s.n_qubits,
        t,
        params: s.run.best_params.clone(),
        epsilon: s.epsilon,
        cost: cost_name(cost).into(),
        run: Some(s.run.clone()),
    }
}

fn cost_name(cost: CostKind) -> &'static str {
    match cost {
        CostKind::Full => "full",
        CostKind::RestrictedD1O1 => "restricted",
    }
}

/// Checkpoints for every ladder size of one time, if all exist and match.
fn load_completed(dir: &Path, plan: &Plan, arch: Arch, depth: usize, t: f64) -> Option<Vec<Checkpoint>> {
    let cfg = &plan.config;
    let mut out = Vec::with_capacity(cfg.ladder.len());
    for (&l, &iters) in cfg.ladder.iter().zip(&cfg.iterations) {
        let path = dir.join(checkpoint_name(t, l));
        if !path.exists() {
            return None;
        }
        let cp = match Checkpoint::load(&path) {
            Ok(cp) => cp,
            Err(e) => {
                eprintln!("warning: ignoring unreadable checkpoint: {e}");
                return None;
            }
        };
        let same_run = cp.run.as_ref().is_some_and(|r| r.hyper.iterations == iters && r.seed == cfg.seed);
        if cp.model != plan.kind.name()
            || cp.arch != arch.name()
            || cp.depth != depth
            || cp.t != t
            || cp.cost != cost_name(plan.cost)
            || !same_run
        {
            return None;
        }
        out.push(cp);
    }
    Some(out)
}

fn series_rows(kind: ModelKind, records: &[StageRecord]) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    for r in records {
        let head = |l: String| vec![kind.name().to_string(), r.arch.name(), r.depth.to_string(), fmt_time(r.t), l];
        match &r.outcome {
            Ok(cps) => {
                for cp in cps {
                    let mut row = head(cp.n_qubits.to_string());
                    let run = cp.run.as_ref();
                    row.push(num(cp.epsilon));
                    row.push(run.map_or(String::new(), |r| num(r.best_epsilon)));
                    row.push(run.map_or(String::new(), |r| num(r.initial_epsilon)));
                    match run {
                        Some(r) => {
                            let h = r.hyper;
                            row.extend([num(h.lr), num(h.beta1), num(h.beta2), num(h.delta), h.iterations.to_string()]);
                            row.push(r.aborted_at.map_or(String::new(), |i| i.to_string()));
                        }
                        None => row.extend(std::iter::repeat_n(String::new(), 6)),
                    }
                    row.push("ok".into());
                    rows.push(row);
                }
            }
            Err(msg) => {
                let mut row = head(String::new());
                row.extend(std::iter::repeat_n(String::new(), 9));
                row.push(format!("failed: {msg}"));
                rows.push(row);
            }
        }
    }
    rows
}

/// One `ε` value from `evaluate`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalRow {
    /// `circuit`, `trotter1` or `trotter2`.
    pub source: String,
    pub n_qubits: usize,
    pub t: f64,
    pub steps: Option<usize>,
    pub epsilon: f64,
}

/// Trotter steps whose circuit matches the layout of a blocked checkpoint.
pub fn matched_trotter_steps(arch: Arch, depth: usize, configured: Option<usize>) -> Option<usize> {
    configured.or(match arch {
        Arch::BlockedXxz | Arch::BlockedQlm | Arch::Trotter2(_) => Some(depth),
        Arch::BlockedPxp => Some(depth / 4),
        Arch::Tivb2 | Arch::Tivb4 => None,
    })
}

/// `ε` of a checkpointed circuit at each size, optionally with Trotter
/// baselines of matched layout.
pub fn cmd_evaluate(cfg: &RunConfig, checkpoint: &Path, sizes: &[usize], trotter: bool) -> Result<(PathBuf, Vec<EvalRow>)> {
    let cp = Checkpoint::load(checkpoint)?;
    let kind = cp.model_kind()?;
    let arch = cp.arch()?;
    let sizes = if sizes.is_empty() { vec![cp.n_qubits] } else { sizes.to_vec() };
    let steps = if trotter {
        let s = matched_trotter_steps(arch, cp.depth, cfg.trotter_steps);
        if s.is_none() {
            eprintln!("warning: no Trotter baseline for {} without trotter_steps", arch.name());
        }
        s
    } else {
        None
    };
    let mut rows = Vec::new();
    for &l in &sizes {
        check_size(kind, l)?;
        let spec = ModelSpec::new(kind, l)?;
        let u = Propagator::new(&spec)?.unitary(cp.t);
        let tpl = cp.template_at(l).map_err(|e| match e {
            RunError::Core(qcompress_core::Error::InvalidSize(m)) => RunError::InvalidConfig(m),
            other => other,
        })?;
        let eps = epsilon_between(&evaluate(&tpl, &cp.params)?, &u)?;
        rows.push(EvalRow { source: "circuit".into(), n_qubits: l, t: cp.t, steps: None, epsilon: eps });
        if let Some(k) = steps.filter(|&k| k > 0) {
            for order in [1, 2] {
                let (tt, p) = build_trotter(&spec, order, k, cp.t)?;
                let e = epsilon_between(&evaluate(&tt, &p)?, &u)?;
                rows.push(EvalRow { source: format!("trotter{order}"), n_qubits: l, t: cp.t, steps: Some(k), epsilon: e });
            }
        }
    }
    let path = cfg.out.join(format!(
        "evaluate_{}_{}_M{}_t{}.csv",
        kind.name(),
        arch.name(),
        cp.depth,
        fmt_time(cp.t)
    ));
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.source.clone(),
                r.n_qubits.to_string(),
                fmt_time(r.t),
                r.steps.map_or(String::new(), |s| s.to_string()),
                num(r.epsilon),
            ]
        })
        .collect();
    write_csv(&path, &["source", "L", "t", "steps", "epsilon"], &table)?;
    write_manifest(&path, "evaluate", (checkpoint, &sizes, trotter), std::slice::from_ref(&path))?;
    Ok((path, rows))
}

#[derive(Debug, Clone, PartialEq)]
pub struct StackRow {
    pub n: usize,
    pub t: f64,
    pub n_qubits: usize,
    pub epsilon: f64,
}

/// `ε(C^n, U(n t*))` for `n = 1..=n_max`.
pub fn cmd_stack(cfg: &RunConfig, checkpoint: &Path, n_max: usize, size: Option<usize>) -> Result<(PathBuf, Vec<StackRow>)> {
    if n_max == 0 {
        return Err(RunError::InvalidConfig("stack needs n >= 1".into()));
    }
    let cp = Checkpoint::load(checkpoint)?;
    let kind = cp.model_kind()?;
    let l = size.unwrap_or(cp.n_qubits);
    check_size(kind, l)?;
    let spec = ModelSpec::new(kind, l)?;
    let prop = Propagator::new(&spec)?;
    let tpl = cp.template_at(l)?;
    let mut rows = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let (stacked, p) = stack(&tpl, &cp.params, n)?;
        let t = n as f64 * cp.t;
        let eps = epsilon_between(&evaluate(&stacked, &p)?, &prop.unitary(t))?;
        rows.push(StackRow { n, t, n_qubits: l, epsilon: eps });
    }
    let path = cfg.out.join(format!(
        "stack_{}_{}_M{}_t{}_L{l}.csv",
        kind.name(),
        cp.arch,
        cp.depth,
        fmt_time(cp.t)
    ));
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| vec![r.n.to_string(), fmt_time(r.t), r.n_qubits.to_string(), num(r.epsilon)])
        .collect();
    write_csv(&path, &["n", "t", "L", "epsilon"], &table)?;
    write_manifest(&path, "stack", (checkpoint, n_max, l), std::slice::from_ref(&path))?;
    Ok((path, rows))
}

/// All checkpoints under `{out}/checkpoints`, sorted by model, arch, M, t, L.
pub fn collect_checkpoints(out: &Path) -> Result<Vec<(PathBuf, Checkpoint)>> {
    let root = out.join("checkpoints");
    let mut found = Vec::new();
    if !root.exists() {
        return Ok(found);
    }
    for dir in fs::read_dir(&root).map_err(RunError::io(&root))? {
        let dir = dir.map_err(RunError::io(&root))?.path();
        if !dir.is_dir() {
            continue;
        }
        for f in fs::read_dir(&dir).map_err(RunError::io(&dir))? {
            let p = f.map_err(RunError::io(&dir))?.path();
            if p.extension().is_some_and(|e| e == "json") {
                let cp = Checkpoint::load(&p)?;
                found.push((p, cp));
            }
        }
    }
    found.sort_by(|a, b| {
        (&a.1.model, &a.1.arch, a.1.depth, a.1.n_qubits)
            .cmp(&(&b.1.model, &b.1.arch, b.1.depth, b.1.n_qubits))
            .then(a.1.t.total_cmp(&b.1.t))
    });
    Ok(found)
}

/// Summary table of every checkpoint in the output directory.
pub fn cmd_report(cfg: &RunConfig) -> Result<(PathBuf, usize)> {
    let found = collect_checkpoints(&cfg.out)?;
    let rows: Vec<Vec<String>> = found
        .iter()
        .map(|(_, cp)| {
            let run = cp.run.as_ref();
            vec![
                cp.model.clone(),
                cp.arch.clone(),
                cp.depth.to_string(),
                fmt_time(cp.t),
                cp.n_qubits.to_string(),
                cp.params.len().to_string(),
                num(cp.epsilon),
                run.map_or(String::new(), |r| num(r.best_epsilon)),
                cp.cost.clone(),
            ]
        })
        .collect();
    let path = cfg.out.join("report.csv");
    write_csv(&path, &["model", "arch", "M", "t", "L", "params", "epsilon", "cost_value", "cost"], &rows)?;
    let files: Vec<PathBuf> = found.iter().map(|(p, _)| p.clone()).collect();
    write_manifest(&path, "report", &cfg.out, &files)?;
    Ok((path, rows.len()))
}
