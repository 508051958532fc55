//! Diagnostics on circuits and exact propagators.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::format;
use alloc::vec::Vec;

use crate::circuit::{apply_gate_left, apply_gate_right, evaluate, lift_size, CircuitTemplate};
use crate::compress::epsilon_between;
use crate::eigen::general_eig_unitary;
use crate::error::{Error, Result};
use crate::gates::Gate;
use crate::linalg::{bit_of, masked_sq_norm, DenseOperator, StateVector, C64, OPERATOR_CEILING};
use crate::model::{ModelKind, ModelSpec, Propagator, SectorTable};

pub use crate::circuit::angle_sum;

/// `P = Σ_j (−1)^j ⟨σ^z_j⟩` with `j` counted from 0.
pub fn imbalance(state: &StateVector) -> f64 {
    (0..state.n_qubits())
        .map(|j| if j % 2 == 0 { 1.0 } else { -1.0 } * state.z_expectation(j))
        .sum()
}

/// Mean `⟨σ^z⟩` over the gauge qubits (odd indices) of a QLM chain.
pub fn string_order(spec: &ModelSpec, state: &StateVector) -> Result<f64> {
    if spec.kind() != ModelKind::Qlm {
        return Err(Error::Unsupported(format!("string order needs a QLM chain, got {}", spec.kind().name())));
    }
    if state.n_qubits() != spec.n_qubits() {
        return Err(Error::DimensionMismatch { expected: spec.dim(), actual: state.dim() });
    }
    let links = spec.n_qubits() / 2;
    Ok((0..links).map(|m| state.z_expectation(2 * m + 1)).sum::<f64>() / links as f64)
}

/// A time series of an observable.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

/// `U(t)|ψ⟩` for each time, evaluated from the exact propagator.
pub fn exact_states(prop: &Propagator, psi: &StateVector, times: &[f64]) -> Result<Vec<StateVector>> {
    times.iter().map(|&t| psi.apply_operator(&prop.unitary(t))).collect()
}

/// `σ^z_q(t) = O† σ^z_q O`.
pub fn heisenberg_z(op: &DenseOperator, q: usize) -> Result<DenseOperator> {
    let n = op.n_qubits();
    let mut zo = op.clone();
    let d = op.dim();
    for r in 0..d {
        if bit_of(n, r, q) == 0 {
            for x in &mut zo.as_mut_slice()[r * d..(r + 1) * d] {
                *x = -*x;
            }
        }
    }
    op.dagger().matmul(&zo)
}

/// `σ^z_q(t) = C† σ^z_q C` by conjugating gate by gate.
pub fn heisenberg_z_circuit(template: &CircuitTemplate, params: &[f64], q: usize) -> Result<DenseOperator> {
    template.check_params(params)?;
    let n = template.n_qubits();
    if n > OPERATOR_CEILING {
        return Err(Error::SizeCeiling { n_qubits: n, ceiling: OPERATOR_CEILING });
    }
    let diag: Vec<C64> = (0..template.dim())
        .map(|b| C64::new(if bit_of(n, b, q) == 1 { 1.0 } else { -1.0 }, 0.0))
        .collect();
    let mut a = DenseOperator::from_diagonal(n, &diag)?;
    let gates: Vec<&Gate> = template.gates().collect();
    for g in gates.iter().rev() {
        apply_gate_right(&mut a, g, params)?;
        apply_gate_left(&mut a, &adjoint(g, params), params)?;
    }
    Ok(a)
}

fn adjoint(gate: &Gate, params: &[f64]) -> Gate {
    use crate::gates::AngleBinding as B;
    match gate {
        Gate::Cnot { .. } => gate.clone(),
        Gate::Su2 { qubit, angles } => {
            let [t, p, x] = angles.map(|a| a.value(params));
            Gate::su2(*qubit, B::constant(-t), B::constant(-p), B::constant(x))
        }
        Gate::Xxz2 { qubits, angles } => {
            let [t, p] = angles.map(|a| a.value(params));
            Gate::xxz2(qubits[0], qubits[1], B::constant(-t), B::constant(-p))
        }
    }
}

/// `‖P [A, σ^z_j] P‖_F² / dim(P)` for `A = σ^z_i(t)` and `P` the projector on
/// the basis states in `block`.
pub fn otoc_value(a: &DenseOperator, j: usize, block: &[usize]) -> f64 {
    let n = a.n_qubits();
    let d = a.dim();
    let data = a.as_slice();
    let mut s = 0.0;
    for &r in block {
        let zr = bit_of(n, r, j);
        for &c in block {
            if bit_of(n, c, j) != zr {
                s += 4.0 * data[r * d + c].norm_sqr();
            }
        }
    }
    s / block.len() as f64
}

/// OTOC values `C_{i,j}(t)` on a grid of sites and times.
#[derive(Debug, Clone, PartialEq)]
pub struct OtocGrid {
    pub center: usize,
    pub sites: Vec<usize>,
    pub times: Vec<f64>,
    /// `values[t][j]`.
    pub values: Vec<Vec<f64>>,
}

/// OTOC grid for propagators `ops[k]` at `times[k]`, with `σ^z` at `center`.
pub fn otoc_grid(ops: &[(f64, DenseOperator)], center: usize, block: &[usize]) -> Result<OtocGrid> {
    let n = ops.first().map_or(0, |o| o.1.n_qubits());
    let mut values = Vec::with_capacity(ops.len());
    for (_, op) in ops {
        let a = heisenberg_z(op, center)?;
        values.push((0..n).map(|j| otoc_value(&a, j, block)).collect());
    }
    Ok(OtocGrid {
        center,
        sites: (0..n).collect(),
        times: ops.iter().map(|o| o.0).collect(),
        values,
    })
}

/// Periodic distance between two sites.
pub fn periodic_distance(n: usize, i: usize, j: usize) -> usize {
    let d = i.abs_diff(j);
    d.min(n - d)
}

/// Entrywise `|C_ij − U_ij|²`, row-major.
pub fn error_map(c: &DenseOperator, u: &DenseOperator) -> Result<Vec<f64>> {
    let diff = c.sub(u)?;
    Ok(diff.as_slice().iter().map(|x| x.norm_sqr()).collect())
}

/// Distances restricted to the four mask families of a sector table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RestrictedReport {
    pub d1: f64,
    pub dr: f64,
    pub o1: f64,
    pub or: f64,
    /// `N_e` of each mask, same order.
    pub entries: [usize; 4],
}

impl RestrictedReport {
    /// `Σ_X 2√N_e(X) ε_X`, which equals `‖C − U‖_F² = 2^{L+1} ε`.
    pub fn recombined(&self) -> f64 {
        [self.d1, self.dr, self.o1, self.or]
            .iter()
            .zip(self.entries)
            .map(|(e, n)| 2.0 * (n as f64).sqrt() * e)
            .sum()
    }
}

pub fn restricted_distance_report(c: &DenseOperator, u: &DenseOperator, table: &SectorTable) -> Result<RestrictedReport> {
    let diff = c.sub(u)?;
    let masks = [table.mask_d1()?, table.mask_dr()?, table.mask_o1()?, table.mask_or()?];
    let mut vals = [0.0; 4];
    let mut entries = [0; 4];
    for (k, m) in masks.iter().enumerate() {
        entries[k] = m.entry_count();
        vals[k] = masked_sq_norm(&diff, m)? / (2.0 * (entries[k] as f64).sqrt());
    }
    Ok(RestrictedReport { d1: vals[0], dr: vals[1], o1: vals[2], or: vals[3], entries })
}

/// Largest size for eigen-overlap analysis.
pub const OVERLAP_CEILING: usize = 10;

/// `(arg λ, |⟨λ|ref⟩|)` for every eigenpair, sorted by `arg λ ∈ (−π, π]`.
pub fn eigen_overlaps(op: &DenseOperator, reference: &StateVector) -> Result<Vec<(f64, f64)>> {
    if op.n_qubits() > OVERLAP_CEILING {
        return Err(Error::SizeCeiling { n_qubits: op.n_qubits(), ceiling: OVERLAP_CEILING });
    }
    if reference.n_qubits() != op.n_qubits() {
        return Err(Error::DimensionMismatch { expected: op.dim(), actual: reference.dim() });
    }
    let (values, vectors) = general_eig_unitary(op)?;
    let d = op.dim();
    let amps = reference.amplitudes();
    let mut out: Vec<(f64, f64)> = (0..d)
        .map(|k| {
            let overlap: C64 = (0..d).map(|r| vectors[(r, k)].conj() * amps[r]).sum();
            let mut arg = values[k].arg();
            if arg <= -core::f64::consts::PI {
                arg += 2.0 * core::f64::consts::PI;
            }
            (arg, overlap.norm())
        })
        .collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(out)
}

/// `ε` of the lifted circuit against the exact propagator at each size.
pub fn size_extrapolation_report(
    template: &CircuitTemplate,
    params: &[f64],
    kind: ModelKind,
    t: f64,
    sizes: &[usize],
) -> Result<Vec<(usize, f64)>> {
    sizes
        .iter()
        .map(|&l| {
            let spec = ModelSpec::new(kind, l)?;
            if l > OPERATOR_CEILING {
                return Err(Error::SizeCeiling { n_qubits: l, ceiling: OPERATOR_CEILING });
            }
            let (lifted, p) = lift_size(template, params, l)?;
            let u = Propagator::new(&spec)?.unitary(t);
            Ok((l, epsilon_between(&evaluate(&lifted, &p)?, &u)?))
        })
        .collect()
}

/// Imbalance series of states.
pub fn imbalance_series(times: &[f64], states: &[StateVector]) -> ObservableSeries {
    ObservableSeries { times: times.to_vec(), values: states.iter().map(imbalance).collect() }
}

/// Sum of the entries of an error map restricted to a list of rows and columns.
pub fn map_mass(map: &[f64], dim: usize, rows: &[usize], cols: &[usize]) -> f64 {
    rows.iter()
        .map(|&r| cols.iter().map(|&c| map[r * dim + c]).sum::<f64>())
        .sum()
}
