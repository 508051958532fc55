//! Cost functions, analytic gradients, the Adam optimizer, hyperparameter
//! grids and the sequential time/size schedule.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::circuit::{apply_gate_left, apply_gate_right, build_template, evaluate, initial_params, Arch, CircuitTemplate};
use crate::error::{Error, Result};
use crate::gates::Gate;
use crate::linalg::{masked_sq_norm, BlockMask, DenseOperator, C64};
use crate::model::{sector_table, ModelKind, ModelSpec, Propagator};

/// `ε = 1 − Re Tr[C†U] / 2^L`.
pub fn epsilon_between(c: &DenseOperator, u: &DenseOperator) -> Result<f64> {
    let overlap = crate::linalg::frob_inner(c, u)?;
    Ok(1.0 - overlap.re / c.dim() as f64)
}

/// `Σ_mask |C_ij − U_ij|² / (2 √N_e)`.
pub fn restricted_between(c: &DenseOperator, u: &DenseOperator, mask: &BlockMask) -> Result<f64> {
    let diff = c.sub(u)?;
    let ne = mask.entry_count() as f64;
    Ok(masked_sq_norm(&diff, mask)? / (2.0 * ne.sqrt()))
}

pub fn epsilon(template: &CircuitTemplate, params: &[f64], u: &DenseOperator) -> Result<f64> {
    check_target(template, u)?;
    epsilon_between(&evaluate(template, params)?, u)
}

pub fn epsilon_restricted(template: &CircuitTemplate, params: &[f64], u: &DenseOperator, mask: &BlockMask) -> Result<f64> {
    check_target(template, u)?;
    restricted_between(&evaluate(template, params)?, u, mask)
}

fn check_target(template: &CircuitTemplate, u: &DenseOperator) -> Result<()> {
    if template.n_qubits() != u.n_qubits() {
        return Err(Error::DimensionMismatch { expected: template.dim(), actual: u.dim() });
    }
    Ok(())
}

/// Cost value and gradient with respect to every slot.
///
/// Writing `C = g_n ⋯ g_1`, the cost derivative is `Re Tr[Z ∂C]` with
/// `Z = −U†/2^L` for the full cost and `Z = D†/√N_e`, `D = mask∘(C − U)`,
/// for the restricted one. The sweep keeps `Y_k = (g_{k−1} ⋯ g_1) Z (g_n ⋯ g_{k+1})`
/// and contracts its partial trace over each gate's qubits with the gate
/// derivative.
pub fn value_and_gradient(
    template: &CircuitTemplate,
    params: &[f64],
    u: &DenseOperator,
    mask: Option<&BlockMask>,
) -> Result<(f64, Vec<f64>)> {
    template.check_params(params)?;
    check_target(template, u)?;
    let gates: Vec<&Gate> = template.gates().collect();
    let mut grad = vec![0.0; template.param_count()];
    let d = u.dim() as f64;

    let (mut y, value) = match mask {
        None => (u.dagger().scale(C64::new(-1.0 / d, 0.0)), None),
        Some(mask) => {
            let c = evaluate(template, params)?;
            let diff = c.sub(u)?;
            let ne = mask.entry_count() as f64;
            let value = masked_sq_norm(&diff, mask)? / (2.0 * ne.sqrt());
            let masked = mask_entries(&diff, mask);
            (masked.dagger().scale(C64::new(1.0 / ne.sqrt(), 0.0)), Some(value))
        }
    };
    let Some((_, rest)) = gates.split_last() else {
        // Empty circuit: C is the identity.
        let value = match value {
            Some(v) => v,
            None => 1.0 + y.trace().re,
        };
        return Ok((value, grad));
    };
    for g in rest {
        apply_gate_left(&mut y, g, params)?;
    }
    let mut value = value;
    for k in (0..gates.len()).rev() {
        let g = gates[k];
        let bindings = g.bindings();
        let needs_trace = value.is_none() || bindings.iter().any(|b| !b.is_constant());
        if needs_trace {
            let qubits = g.qubits();
            let t = y.partial_trace_onto(&qubits)?;
            if value.is_none() && k == gates.len() - 1 {
                value = Some(1.0 + contract(&t, &g.matrix(params)));
            }
            for (which, b) in bindings.iter().enumerate() {
                if let Some(slot) = b.slot {
                    let dg = g.derivative(params, which)?;
                    grad[slot] += b.sign * contract(&t, &dg);
                }
            }
        }
        if k > 0 {
            let prev = gates[k - 1];
            apply_gate_left(&mut y, &dagger_gate(prev, params), params)?;
            apply_gate_right(&mut y, g, params)?;
        }
    }
    Ok((value.unwrap_or(f64::NAN), grad))
}

/// `Re Σ_ab T_ab G_ba`.
fn contract(t: &crate::linalg::LocalMatrix, g: &crate::linalg::LocalMatrix) -> f64 {
    let n = t.dim();
    let (ts, gs) = (t.as_slice(), g.as_slice());
    let mut acc = 0.0;
    for a in 0..n {
        for b in 0..n {
            acc += (ts[a * n + b] * gs[b * n + a]).re;
        }
    }
    acc
}

fn mask_entries(a: &DenseOperator, mask: &BlockMask) -> DenseOperator {
    let d = a.dim();
    let mut out = DenseOperator::zeros(a.n_qubits());
    for (rows, cols) in mask.blocks() {
        for &r in rows {
            for &c in cols {
                out[(r, c)] = a.as_slice()[r * d + c];
            }
        }
    }
    out
}

/// A gate whose matrix is the adjoint of `gate` at `params`.
fn dagger_gate(gate: &Gate, params: &[f64]) -> Gate {
    use crate::gates::AngleBinding as B;
    match gate {
        Gate::Cnot { .. } => gate.clone(),
        Gate::Su2 { qubit, angles } => {
            // u(θ,φ,χ)† = u(−θ, −φ, χ)
            let [t, p, x] = angles.map(|a| a.value(params));
            Gate::su2(*qubit, B::constant(-t), B::constant(-p), B::constant(x))
        }
        Gate::Xxz2 { qubits, angles } => {
            let [t, p] = angles.map(|a| a.value(params));
            Gate::xxz2(qubits[0], qubits[1], B::constant(-t), B::constant(-p))
        }
    }
}

pub fn gradient(template: &CircuitTemplate, params: &[f64], u: &DenseOperator, mask: Option<&BlockMask>) -> Result<Vec<f64>> {
    Ok(value_and_gradient(template, params, u, mask)?.1)
}

/// Adam hyperparameters; `delta` is the regularizer added to `√v*`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AdamHyperparams {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub delta: f64,
    pub iterations: usize,
}

impl AdamHyperparams {
    pub fn validate(&self) -> Result<()> {
        let unit = |b: f64| b > 0.0 && b < 1.0;
        if !(self.lr > 0.0 && unit(self.beta1) && unit(self.beta2) && self.delta > 0.0) {
            return Err(Error::InvalidHyperparams(format!("{self:?}")));
        }
        Ok(())
    }

    pub fn with_iterations(self, iterations: usize) -> Self {
        Self { iterations, ..self }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub i: usize,
}

impl AdamState {
    pub fn new(n: usize) -> Self {
        Self { m: vec![0.0; n], v: vec![0.0; n], i: 0 }
    }

    /// One update of `params` given the gradient at `params`.
    pub fn step(&mut self, params: &mut [f64], grad: &[f64], h: &AdamHyperparams) {
        self.i += 1;
        let c1 = 1.0 - h.beta1.powi(self.i as i32);
        let c2 = 1.0 - h.beta2.powi(self.i as i32);
        for k in 0..params.len() {
            self.m[k] = h.beta1 * self.m[k] + (1.0 - h.beta1) * grad[k];
            self.v[k] = h.beta2 * self.v[k] + (1.0 - h.beta2) * grad[k] * grad[k];
            let m_hat = self.m[k] / c1;
            let v_hat = self.v[k] / c2;
            params[k] -= h.lr * m_hat / (v_hat.sqrt() + h.delta);
        }
    }
}

/// Outcome of one Adam run; keeps the best iterate seen.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OptimizationRun {
    pub hyper: AdamHyperparams,
    pub seed: u64,
    pub initial_epsilon: f64,
    pub best_epsilon: f64,
    pub best_params: Vec<f64>,
    /// Cost at the start of each iteration, then once after the last update.
    pub trace: Vec<f64>,
    /// Set when the run stopped on a non-finite or diverging cost.
    pub aborted_at: Option<usize>,
}

impl OptimizationRun {
    pub fn best_so_far(&self) -> Vec<f64> {
        let mut best = f64::INFINITY;
        self.trace
            .iter()
            .map(|&e| {
                if e < best {
                    best = e;
                }
                best
            })
            .collect()
    }

    /// Score used to rank runs; aborted runs rank last.
    pub fn score(&self) -> f64 {
        if self.aborted_at.is_some() {
            f64::INFINITY
        } else {
            self.best_epsilon
        }
    }
}

/// Costs above this (or non-finite) abort a run.
pub const DIVERGENCE_LIMIT: f64 = 2.5;

/// Adam on an arbitrary objective returning `(value, gradient)`.
pub fn adam_minimize_fn<F>(mut objective: F, init: &[f64], hyper: &AdamHyperparams, seed: u64) -> Result<OptimizationRun>
where
    F: FnMut(&[f64]) -> Result<(f64, Vec<f64>)>,
{
    hyper.validate()?;
    let mut params = init.to_vec();
    let mut state = AdamState::new(params.len());
    let mut trace = Vec::with_capacity(hyper.iterations + 1);
    let mut best = (f64::INFINITY, params.clone());
    let mut aborted_at = None;
    for i in 0..=hyper.iterations {
        let (value, grad) = objective(&params)?;
        if !value.is_finite() || value > DIVERGENCE_LIMIT || grad.iter().any(|g| !g.is_finite()) {
            aborted_at = Some(i);
            trace.push(value);
            break;
        }
        trace.push(value);
        if value < best.0 {
            best = (value, params.clone());
        }
        if i == hyper.iterations {
            break;
        }
        state.step(&mut params, &grad, hyper);
    }
    Ok(OptimizationRun {
        hyper: *hyper,
        seed,
        initial_epsilon: trace[0],
        best_epsilon: best.0,
        best_params: best.1,
        trace,
        aborted_at,
    })
}

/// Adam on the circuit cost (full when `mask` is `None`).
pub fn adam_minimize(
    template: &CircuitTemplate,
    u: &DenseOperator,
    init: &[f64],
    hyper: &AdamHyperparams,
    mask: Option<&BlockMask>,
    seed: u64,
) -> Result<OptimizationRun> {
    template.check_params(init)?;
    adam_minimize_fn(|p| value_and_gradient(template, p, u, mask), init, hyper, seed)
}

/// Cartesian hyperparameter grid, enumerated in lexicographic order of
/// `(lr, beta1, beta2, delta)` as listed.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HyperGrid {
    pub lr: Vec<f64>,
    pub beta1: Vec<f64>,
    pub beta2: Vec<f64>,
    pub delta: Vec<f64>,
}

impl HyperGrid {
    /// The full grid for blocked or TIVB circuits.
    pub fn paper(blocked: bool) -> Self {
        let lr = if blocked {
            vec![0.5, 0.2, 0.1, 0.01, 0.001, 0.0001]
        } else {
            vec![1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6]
        };
        Self {
            lr,
            beta1: vec![0.9, 0.99, 0.999, 0.9999],
            beta2: vec![0.9, 0.99, 0.999, 0.9999],
            delta: vec![1e-2, 1e-4, 1e-8, 1e-12],
        }
    }

    /// A 24-point subset of [`HyperGrid::paper`] for desk-scale runs.
    pub fn reduced(blocked: bool) -> Self {
        let lr = if blocked { vec![0.1, 0.01, 0.001] } else { vec![1e-2, 1e-3, 1e-4] };
        Self {
            lr,
            beta1: vec![0.9, 0.99],
            beta2: vec![0.999, 0.9999],
            delta: vec![1e-8, 1e-4],
        }
    }

    pub fn single(h: AdamHyperparams) -> Self {
        Self { lr: vec![h.lr], beta1: vec![h.beta1], beta2: vec![h.beta2], delta: vec![h.delta] }
    }

    pub fn points(&self, iterations: usize) -> Vec<AdamHyperparams> {
        let mut out = Vec::with_capacity(self.len());
        for &lr in &self.lr {
            for &beta1 in &self.beta1 {
                for &beta2 in &self.beta2 {
                    for &delta in &self.delta {
                        out.push(AdamHyperparams { lr, beta1, beta2, delta, iterations });
                    }
                }
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.lr.len() * self.beta1.len() * self.beta2.len() * self.delta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Runs independent tasks; implementations may run them in parallel but must
/// return results in input order.
pub trait TaskMap: Sync {
    fn map<T: Sync, R: Send>(&self, items: &[T], f: &(dyn Fn(&T) -> R + Sync)) -> Vec<R>;
}

/// In-order, single-threaded execution.
#[derive(Debug, Clone, Copy, Default)]
pub struct Serial;

impl TaskMap for Serial {
    fn map<T: Sync, R: Send>(&self, items: &[T], f: &(dyn Fn(&T) -> R + Sync)) -> Vec<R> {
        items.iter().map(f).collect()
    }
}

/// Index of the best run: lowest score, ties to the earliest grid point.
pub fn select_best(runs: &[OptimizationRun]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (k, r) in runs.iter().enumerate() {
        match best {
            Some(b) if runs[b].score() <= r.score() => {}
            _ => best = Some(k),
        }
    }
    best
}

/// Adam from `init` for every grid point; returns all runs (grid order) and
/// the index of the best one.
pub fn grid_search<E: TaskMap>(
    template: &CircuitTemplate,
    u: &DenseOperator,
    init: &[f64],
    points: &[AdamHyperparams],
    mask: Option<&BlockMask>,
    seed: u64,
    exec: &E,
) -> Result<(Vec<OptimizationRun>, usize)> {
    if points.is_empty() {
        return Err(Error::InvalidHyperparams(String::from("empty grid")));
    }
    let results = exec.map(points, &|h| adam_minimize(template, u, init, h, mask, seed));
    let runs = results.into_iter().collect::<Result<Vec<_>>>()?;
    let best = select_best(&runs).expect("nonempty grid");
    Ok((runs, best))
}

/// Which cost the schedule minimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum CostKind {
    Full,
    /// Largest diagonal block plus its off-diagonal rectangles.
    RestrictedD1O1,
}

/// Exact targets and masks per chain length.
#[derive(Debug, Clone)]
pub struct Targets {
    kind: ModelKind,
    entries: Vec<(usize, Propagator, BlockMask)>,
}

impl Targets {
    pub fn new(kind: ModelKind, sizes: &[usize]) -> Result<Self> {
        let entries = sizes
            .iter()
            .map(|&l| {
                let spec = ModelSpec::new(kind, l)?;
                let mask = sector_table(&spec)?.mask_d1_o1()?;
                Ok((l, Propagator::new(&spec)?, mask))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { kind, entries })
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    fn entry(&self, l: usize) -> Result<&(usize, Propagator, BlockMask)> {
        self.entries
            .iter()
            .find(|e| e.0 == l)
            .ok_or_else(|| Error::InvalidSize(format!("no target prepared for L={l}")))
    }

    pub fn unitary(&self, l: usize, t: f64) -> Result<DenseOperator> {
        Ok(self.entry(l)?.1.unitary(t))
    }

    pub fn mask(&self, l: usize) -> Result<&BlockMask> {
        Ok(&self.entry(l)?.2)
    }
}

/// Settings of [`sequential_schedule`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleConfig {
    pub ladder: Vec<usize>,
    pub iterations: Vec<usize>,
    pub grid: HyperGrid,
    pub cost: CostKind,
    pub seed: u64,
}

impl ScheduleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.ladder.is_empty() || self.ladder.len() != self.iterations.len() {
            return Err(Error::InvalidHyperparams(String::from("ladder and iteration budgets must be nonempty and of equal length")));
        }
        if self.ladder.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSize(String::from("size ladder must increase")));
        }
        if self.grid.is_empty() {
            return Err(Error::InvalidHyperparams(String::from("empty grid")));
        }
        Ok(())
    }
}

/// One optimization stage at a fixed chain length.
#[derive(Debug, Clone, PartialEq)]
pub struct StageResult {
    pub n_qubits: usize,
    pub run: OptimizationRun,
    /// Full-cost ε of the best parameters at this size.
    pub epsilon: f64,
}

/// All stages for one time.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeResult {
    pub t: f64,
    pub best_hyper: AdamHyperparams,
    pub stages: Vec<StageResult>,
}

impl TimeResult {
    pub fn final_stage(&self) -> &StageResult {
        self.stages.last().expect("at least one stage")
    }
}

/// Optimize one time: grid search at the smallest size, then re-optimize up
/// the ladder with the winning hyperparameters.
pub fn schedule_step<E: TaskMap>(
    targets: &Targets,
    arch: Arch,
    depth: usize,
    t: f64,
    init: &[f64],
    cfg: &ScheduleConfig,
    exec: &E,
) -> Result<TimeResult> {
    cfg.validate()?;
    let mut stages = Vec::with_capacity(cfg.ladder.len());
    let mut params = init.to_vec();
    let mut best_hyper = None;
    for (k, (&l, &iters)) in cfg.ladder.iter().zip(&cfg.iterations).enumerate() {
        let template = build_template(arch, l, depth)?;
        let u = targets.unitary(l, t)?;
        let mask = match cfg.cost {
            CostKind::Full => None,
            CostKind::RestrictedD1O1 => Some(targets.mask(l)?),
        };
        let run = if k == 0 {
            let points = cfg.grid.points(iters);
            let (mut runs, best) = grid_search(&template, &u, &params, &points, mask, cfg.seed, exec)?;
            best_hyper = Some(points[best]);
            runs.swap_remove(best)
        } else {
            let h = best_hyper.expect("set at the first stage").with_iterations(iters);
            adam_minimize(&template, &u, &params, &h, mask, cfg.seed)?
        };
        if run.aborted_at.is_some() && !run.best_epsilon.is_finite() {
            return Err(Error::Diverged { iteration: run.aborted_at.unwrap_or(0), epsilon: run.best_epsilon });
        }
        params = run.best_params.clone();
        let epsilon = epsilon_between(&evaluate(&template, &params)?, &u)?;
        stages.push(StageResult { n_qubits: l, run, epsilon });
    }
    Ok(TimeResult { t, best_hyper: best_hyper.expect("nonempty ladder"), stages })
}

/// Outcome per time; failures are kept and the next time warm-starts from
/// the last successful parameters.
pub type ScheduleOutcome = Vec<(f64, Result<TimeResult>)>;

/// Sequential warm-started optimization over increasing times.
pub fn sequential_schedule<E: TaskMap>(
    targets: &Targets,
    arch: Arch,
    depth: usize,
    times: &[f64],
    cfg: &ScheduleConfig,
    exec: &E,
) -> Result<ScheduleOutcome> {
    cfg.validate()?;
    if times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidHyperparams(String::from("times must increase")));
    }
    let template = build_template(arch, cfg.ladder[0], depth)?;
    let mut params = initial_params(&template, cfg.seed);
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        let result = schedule_step(targets, arch, depth, t, &params, cfg, exec);
        if let Ok(r) = &result {
            params = r.final_stage().run.best_params.clone();
        }
        out.push((t, result));
    }
    Ok(out)
}
