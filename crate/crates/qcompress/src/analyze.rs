//! `analyze`: observables, OTOCs and error diagnostics.

use std::path::{Path, PathBuf};

use qcompress_core::analysis::{
    angle_sum, eigen_overlaps, error_map, exact_states, heisenberg_z, imbalance, otoc_value, periodic_distance,
    restricted_distance_report, string_order,
};
use qcompress_core::circuit::{evaluate, evaluate_state};
use qcompress_core::compress::epsilon_between;
use qcompress_core::model::{named_state, sector_table, ModelKind, ModelSpec, NamedState, Propagator};
use qcompress_core::{DenseOperator, StateVector};

use crate::config::{check_size, validate_times, RunConfig};
use crate::error::{Result, RunError};
use crate::io::{fmt_time, num, write_csv, write_manifest, Checkpoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    Imbalance,
    String,
    Otoc,
    ErrorMap,
    Blocks,
    Spectrum,
    Angles,
}

impl Which {
    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "imbalance" => Which::Imbalance,
            "string" => Which::String,
            "otoc" => Which::Otoc,
            "errormap" => Which::ErrorMap,
            "blocks" => Which::Blocks,
            "spectrum" => Which::Spectrum,
            "angles" => Which::Angles,
            other => return Err(RunError::InvalidConfig(format!("unknown analysis {other:?}"))),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Which::Imbalance => "imbalance",
            Which::String => "string",
            Which::Otoc => "otoc",
            Which::ErrorMap => "errormap",
            Which::Blocks => "blocks",
            Which::Spectrum => "spectrum",
            Which::Angles => "angles",
        }
    }
}

#[derive(Debug, Clone)]
pub struct AnalyzeRequest {
    pub which: Which,
    pub checkpoints: Vec<PathBuf>,
    /// Chain length; defaults to the checkpoint size.
    pub size: Option<usize>,
    /// OTOC reference site; defaults to `L/2`.
    pub center: Option<usize>,
}

/// Writes the artifact under `{out}/analysis` and returns its path.
pub fn cmd_analyze(cfg: &RunConfig, req: &AnalyzeRequest) -> Result<PathBuf> {
    let cps = req.checkpoints.iter().map(|p| Checkpoint::load(p)).collect::<Result<Vec<_>>>()?;
    let kind = match cps.first() {
        Some(cp) => cp.model_kind()?,
        None => cfg.model_kind()?,
    };
    if cps.iter().any(|c| c.model != kind.name()) {
        return Err(RunError::InvalidConfig("checkpoints mix models".into()));
    }
    let l = req.size.or(cps.first().map(|c| c.n_qubits)).or(cfg.ladder.last().copied()).ok_or_else(|| {
        RunError::InvalidConfig("analysis needs a checkpoint, a size or a ladder".into())
    })?;
    check_size(kind, l)?;
    let spec = ModelSpec::new(kind, l)?;
    let (header, rows): (Vec<&str>, Vec<Vec<String>>) = match req.which {
        Which::Imbalance | Which::String => observable(cfg, &spec, &cps, req.which)?,
        Which::Otoc => otoc(cfg, &spec, &cps, req.center)?,
        Which::ErrorMap => errormap(&spec, &cps)?,
        Which::Blocks => blocks(&spec, &cps)?,
        Which::Spectrum => spectrum(cfg, &spec, &cps)?,
        Which::Angles => angles(&cps)?,
    };
    let path = analysis_path(&cfg.out, req.which, kind, l);
    write_csv(&path, &header, &rows)?;
    write_manifest(&path, req.which.name(), (&req.checkpoints, l, req.center), std::slice::from_ref(&path))?;
    Ok(path)
}

fn reference_state(cfg: &RunConfig, spec: &ModelSpec) -> Result<StateVector> {
    let state = match cfg.state.as_deref() {
        Some(s) => NamedState::parse(s).map_err(|e| RunError::InvalidConfig(e.to_string()))?,
        None if spec.kind() == ModelKind::Qlm => NamedState::NeelQlm,
        None => NamedState::Neel,
    };
    named_state(spec, state).map_err(|e| RunError::InvalidConfig(e.to_string()))
}

fn circuit_op(cp: &Checkpoint, l: usize) -> Result<DenseOperator> {
    Ok(evaluate(&cp.template_at(l)?, &cp.params)?)
}

/// Exact series on the configured times, plus one circuit point per checkpoint.
fn observable(
    cfg: &RunConfig,
    spec: &ModelSpec,
    cps: &[Checkpoint],
    which: Which,
) -> Result<(Vec<&'static str>, Vec<Vec<String>>)> {
    if which == Which::String && spec.kind() != ModelKind::Qlm {
        return Err(RunError::InvalidConfig("string order needs the qlm model".into()));
    }
    let value = |s: &StateVector| -> Result<f64> {
        Ok(match which {
            Which::String => string_order(spec, s)?,
            _ => imbalance(s),
        })
    };
    let psi = reference_state(cfg, spec)?;
    let mut rows = Vec::new();
    if !cfg.times.is_empty() {
        validate_times(&cfg.times)?;
        let prop = Propagator::new(spec)?;
        for (t, s) in cfg.times.iter().zip(exact_states(&prop, &psi, &cfg.times)?) {
            rows.push(vec!["exact".into(), String::new(), fmt_time(*t), num(value(&s)?)]);
        }
    }
    for cp in cps {
        let s = evaluate_state(&cp.template_at(spec.n_qubits())?, &cp.params, &psi)?;
        rows.push(vec!["circuit".into(), cp.arch.clone(), fmt_time(cp.t), num(value(&s)?)]);
    }
    Ok((vec!["source", "arch", "t", "value"], rows))
}

fn otoc(
    cfg: &RunConfig,
    spec: &ModelSpec,
    cps: &[Checkpoint],
    center: Option<usize>,
) -> Result<(Vec<&'static str>, Vec<Vec<String>>)> {
    let l = spec.n_qubits();
    let center = center.unwrap_or(l / 2);
    if center >= l {
        return Err(RunError::InvalidConfig(format!("center {center} outside a chain of {l}")));
    }
    let table = sector_table(spec)?;
    let block = &table.largest().indices;
    let mut ops: Vec<(String, String, f64, DenseOperator)> = Vec::new();
    if cps.is_empty() {
        validate_times(&cfg.times)?;
        let prop = Propagator::new(spec)?;
        for &t in &cfg.times {
            ops.push(("exact".into(), String::new(), t, prop.unitary(t)));
        }
    }
    for cp in cps {
        ops.push(("circuit".into(), cp.arch.clone(), cp.t, circuit_op(cp, l)?));
    }
    let mut rows = Vec::new();
    for (source, arch, t, op) in ops {
        let a = heisenberg_z(&op, center)?;
        for j in 0..l {
            rows.push(vec![
                source.clone(),
                arch.clone(),
                fmt_time(t),
                j.to_string(),
                periodic_distance(l, center, j).to_string(),
                num(otoc_value(&a, j, block)),
            ]);
        }
    }
    Ok((vec!["source", "arch", "t", "j", "distance", "value"], rows))
}

fn single(cps: &[Checkpoint]) -> Result<&Checkpoint> {
    match cps {
        [cp] => Ok(cp),
        _ => Err(RunError::InvalidConfig("this analysis needs exactly one checkpoint".into())),
    }
}

/// Entrywise squared error `|C − U|²`, with the sector of each index.
fn errormap(spec: &ModelSpec, cps: &[Checkpoint]) -> Result<(Vec<&'static str>, Vec<Vec<String>>)> {
    let cp = single(cps)?;
    let l = spec.n_qubits();
    let u = Propagator::new(spec)?.unitary(cp.t);
    let map = error_map(&circuit_op(cp, l)?, &u)?;
    let sector = sector_table(spec)?.sector_of();
    let d = spec.dim();
    let rows = map
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let (r, c) = (k / d, k % d);
            vec![r.to_string(), c.to_string(), sector[r].to_string(), sector[c].to_string(), num(*v)]
        })
        .collect();
    Ok((vec!["row", "col", "row_sector", "col_sector", "value"], rows))
}

/// The four restricted distances per checkpoint, or the sector table when no
/// checkpoint is given.
fn blocks(spec: &ModelSpec, cps: &[Checkpoint]) -> Result<(Vec<&'static str>, Vec<Vec<String>>)> {
    let table = sector_table(spec)?;
    if cps.is_empty() {
        let rows = table
            .sectors()
            .iter()
            .enumerate()
            .map(|(k, s)| {
                let label: Vec<String> = s.label.iter().map(|q| q.to_string()).collect();
                vec![k.to_string(), label.join(" "), s.dim().to_string()]
            })
            .collect();
        return Ok((vec!["sector", "label", "dim"], rows));
    }
    let prop = Propagator::new(spec)?;
    let mut rows = Vec::new();
    for cp in cps {
        let c = circuit_op(cp, spec.n_qubits())?;
        let u = prop.unitary(cp.t);
        let r = restricted_distance_report(&c, &u, &table)?;
        rows.push(vec![
            cp.arch.clone(),
            cp.depth.to_string(),
            fmt_time(cp.t),
            num(epsilon_between(&c, &u)?),
            num(r.d1),
            num(r.dr),
            num(r.o1),
            num(r.or),
            num(r.recombined() / (2 * spec.dim()) as f64),
        ]);
    }
    Ok((vec!["arch", "M", "t", "epsilon", "eps_d1", "eps_dr", "eps_o1", "eps_or", "recombined"], rows))
}

/// Eigenphases of the circuit (or exact propagator) with their overlap on the
/// reference state.
fn spectrum(cfg: &RunConfig, spec: &ModelSpec, cps: &[Checkpoint]) -> Result<(Vec<&'static str>, Vec<Vec<String>>)> {
    let psi = reference_state(cfg, spec)?;
    let prop = Propagator::new(spec)?;
    let mut ops: Vec<(String, f64, DenseOperator)> = Vec::new();
    for cp in cps {
        ops.push(("circuit".into(), cp.t, circuit_op(cp, spec.n_qubits())?));
        ops.push(("exact".into(), cp.t, prop.unitary(cp.t)));
    }
    if cps.is_empty() {
        validate_times(&cfg.times)?;
        for &t in &cfg.times {
            ops.push(("exact".into(), t, prop.unitary(t)));
        }
    }
    let mut rows = Vec::new();
    for (source, t, op) in ops {
        for (phase, overlap) in eigen_overlaps(&op, &psi)? {
            rows.push(vec![source.clone(), fmt_time(t), num(phase), num(overlap)]);
        }
    }
    Ok((vec!["source", "t", "phase", "overlap"], rows))
}

/// Sum of rotation angles over distinct parameter slots.
fn angles(cps: &[Checkpoint]) -> Result<(Vec<&'static str>, Vec<Vec<String>>)> {
    if cps.is_empty() {
        return Err(RunError::InvalidConfig("angles needs at least one checkpoint".into()));
    }
    if let Some(cp) = cps.iter().find(|c| c.arch != "blocked_pxp") {
        return Err(RunError::InvalidConfig(format!("angles needs blocked_pxp checkpoints, got {}", cp.arch)));
    }
    let mut rows = Vec::new();
    for cp in cps {
        let s = angle_sum(&cp.template()?, &cp.params)?;
        let params: Vec<String> = cp.params.iter().map(|p| num(*p)).collect();
        rows.push(vec![cp.arch.clone(), cp.depth.to_string(), fmt_time(cp.t), num(s), params.join(" ")]);
    }
    Ok((vec!["arch", "M", "t", "angle_sum", "params"], rows))
}

pub fn analysis_path(out: &Path, which: Which, kind: ModelKind, l: usize) -> PathBuf {
    out.join("analysis").join(format!("{}_{}_L{l}.csv", which.name(), kind.name()))
}
