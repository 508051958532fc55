//! Circuit templates with shared parameters, their evaluation, stacking and
//! lifting to larger chains.
//!
//! Slot order is layer-major. TIVB templates use slot
//! `(layer * cell + position) * 3 + angle` where `layer` runs over the
//! single-qubit layers, `position = qubit % cell`, and `angle` is θ, φ, χ.
//! Blocked XXZ uses `(θ_l, φ_l)` per brickwall layer; blocked PXP and QLM use
//! one angle per mirror pair of sweeps.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gates::{pxp_block_gates, qlm_gauge_gates, AngleBinding, Gate};
use crate::linalg::{DenseOperator, StateVector, OPERATOR_CEILING, STATE_CEILING};
use crate::model::{ModelKind, ModelSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Arch {
    /// Translation-invariant brickwall, two distinct single-qubit gates per layer.
    Tivb2,
    /// Translation-invariant brickwall, four distinct single-qubit gates per layer.
    Tivb4,
    BlockedXxz,
    BlockedPxp,
    BlockedQlm,
    /// Second-order Trotter layout of the blocked circuit for a model; the
    /// depth is the number of Trotter steps.
    Trotter2(ModelKind),
}

impl Arch {
    pub fn name(&self) -> String {
        match self {
            Arch::Tivb2 => "tivb2".into(),
            Arch::Tivb4 => "tivb4".into(),
            Arch::BlockedXxz => "blocked_xxz".into(),
            Arch::BlockedPxp => "blocked_pxp".into(),
            Arch::BlockedQlm => "blocked_qlm".into(),
            Arch::Trotter2(k) => format!("trotter2_{}", k.name()),
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        let lower = name.to_ascii_lowercase();
        match lower.as_str() {
            "tivb2" => Some(Arch::Tivb2),
            "tivb4" => Some(Arch::Tivb4),
            "blocked_xxz" => Some(Arch::BlockedXxz),
            "blocked_pxp" => Some(Arch::BlockedPxp),
            "blocked_qlm" => Some(Arch::BlockedQlm),
            _ => lower
                .strip_prefix("trotter2_")
                .and_then(ModelKind::parse)
                .map(Arch::Trotter2),
        }
    }

    /// Translation period of the template in qubits.
    pub fn unit_cell(&self) -> usize {
        match self {
            Arch::Tivb4 | Arch::BlockedQlm | Arch::Trotter2(ModelKind::Qlm) => 4,
            _ => 2,
        }
    }

    pub fn is_blocked(&self) -> bool {
        !matches!(self, Arch::Tivb2 | Arch::Tivb4)
    }

    /// The blocked architecture native to a model.
    pub fn blocked_for(kind: ModelKind) -> Self {
        match kind {
            ModelKind::Xxz => Arch::BlockedXxz,
            ModelKind::Pxp => Arch::BlockedPxp,
            ModelKind::Qlm => Arch::BlockedQlm,
        }
    }
}

/// A layered circuit whose gate angles are bound to a shared parameter vector.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitTemplate {
    arch: Arch,
    n_qubits: usize,
    depth: usize,
    repeats: usize,
    layers: Vec<Vec<Gate>>,
    param_count: usize,
    slot_labels: Vec<String>,
}

impl CircuitTemplate {
    pub fn arch(&self) -> Arch {
        self.arch
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    /// Layer count `M` (or `M̃` for blocked XXZ/QLM, steps for Trotter layouts).
    pub fn depth(&self) -> usize {
        self.depth
    }

    /// How many copies of the base circuit are stacked.
    pub fn repeats(&self) -> usize {
        self.repeats
    }

    pub fn layers(&self) -> &[Vec<Gate>] {
        &self.layers
    }

    pub fn param_count(&self) -> usize {
        self.param_count
    }

    pub fn slot_labels(&self) -> &[String] {
        &self.slot_labels
    }

    pub fn gates(&self) -> impl DoubleEndedIterator<Item = &Gate> + Clone {
        self.layers.iter().flatten()
    }

    pub fn gate_count(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }

    /// CNOTs in a hardware decomposition (three per XXZ gate).
    pub fn cnot_count(&self) -> usize {
        self.gates().map(Gate::cnot_cost).sum()
    }

    pub fn check_params(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.param_count {
            return Err(Error::ParamLength { expected: self.param_count, actual: params.len() });
        }
        Ok(())
    }
}

fn check_size(arch: Arch, n_qubits: usize, depth: usize) -> Result<()> {
    if n_qubits < 4 || !n_qubits.is_multiple_of(2) {
        return Err(Error::InvalidSize(format!("templates need an even chain with L >= 4, got L={n_qubits}")));
    }
    if !n_qubits.is_multiple_of(arch.unit_cell()) {
        return Err(Error::InvalidSize(format!(
            "{} needs L divisible by {}, got L={n_qubits}",
            arch.name(),
            arch.unit_cell()
        )));
    }
    if arch == Arch::BlockedPxp && !depth.is_multiple_of(4) {
        return Err(Error::InvalidSize(format!("blocked_pxp needs M divisible by 4, got M={depth}")));
    }
    if n_qubits > STATE_CEILING {
        return Err(Error::SizeCeiling { n_qubits, ceiling: STATE_CEILING });
    }
    Ok(())
}

/// Build a template on a periodic chain.
pub fn build_template(arch: Arch, n_qubits: usize, depth: usize) -> Result<CircuitTemplate> {
    check_size(arch, n_qubits, depth)?;
    let (layers, param_count, slot_labels) = match arch {
        Arch::Tivb2 => tivb_layers(n_qubits, depth, 2),
        Arch::Tivb4 => tivb_layers(n_qubits, depth, 4),
        Arch::BlockedXxz => {
            let halves: Vec<(usize, usize)> = (0..2 * depth).map(|h| (h % 2, h / 2)).collect();
            xxz_layers(n_qubits, &halves, depth)
        }
        Arch::BlockedPxp => {
            let sweeps = depth / 2;
            sweep_layers(n_qubits, sweeps, mirror(sweeps), pxp_sweep)
        }
        Arch::BlockedQlm => {
            let sweeps = 2 * depth;
            sweep_layers(n_qubits, sweeps, mirror(sweeps), qlm_sweep)
        }
        Arch::Trotter2(kind) => {
            let count = 2 * depth + 1;
            match kind {
                ModelKind::Xxz => {
                    let halves: Vec<(usize, usize)> = (0..count).map(|h| (h % 2, h.min(count - 1 - h))).collect();
                    xxz_layers(n_qubits, &halves, depth + 1)
                }
                ModelKind::Pxp => sweep_layers(n_qubits, count, mirror(count), pxp_sweep),
                ModelKind::Qlm => sweep_layers(n_qubits, count, mirror(count), qlm_sweep),
            }
        }
    };
    Ok(CircuitTemplate { arch, n_qubits, depth, repeats: 1, layers, param_count, slot_labels })
}

type Layers = (Vec<Vec<Gate>>, usize, Vec<String>);

fn tivb_layers(n: usize, depth: usize, cell: usize) -> Layers {
    let sq_layer = |s: usize| -> Vec<Gate> {
        (0..n)
            .map(|q| {
                let base = (s * cell + q % cell) * 3;
                Gate::su2(q, AngleBinding::slot(base), AngleBinding::slot(base + 1), AngleBinding::slot(base + 2))
            })
            .collect()
    };
    let bonds = |parity: usize| -> Vec<Gate> {
        (0..n / 2)
            .map(|i| {
                let a = 2 * i + parity;
                Gate::cnot(a, (a + 1) % n)
            })
            .collect()
    };
    let mut layers = Vec::with_capacity(4 * depth + 1);
    for l in 0..depth {
        layers.push(sq_layer(2 * l));
        layers.push(bonds(0));
        layers.push(sq_layer(2 * l + 1));
        layers.push(bonds(1));
    }
    layers.push(sq_layer(2 * depth));
    let count = (2 * depth + 1) * cell * 3;
    let mut labels = Vec::with_capacity(count);
    for s in 0..=2 * depth {
        for p in 0..cell {
            for a in ["theta", "phi", "chi"] {
                labels.push(format!("sq{s}.u{p}.{a}"));
            }
        }
    }
    (layers, count, labels)
}

/// Half-layers of XXZ gates; each entry is `(bond parity, slot pair)`.
fn xxz_layers(n: usize, halves: &[(usize, usize)], pairs: usize) -> Layers {
    let layers = halves
        .iter()
        .map(|&(parity, pair)| {
            (0..n / 2)
                .map(|i| {
                    let a = 2 * i + parity;
                    Gate::xxz2(a, (a + 1) % n, AngleBinding::slot(2 * pair), AngleBinding::slot(2 * pair + 1))
                })
                .collect()
        })
        .collect();
    let labels = (0..pairs)
        .flat_map(|p| [format!("layer{p}.theta"), format!("layer{p}.phi")])
        .collect();
    (layers, 2 * pairs, labels)
}

/// Slot of each sweep under the mirror symmetry `θ_s = θ_{S−1−s}`.
fn mirror(sweeps: usize) -> Vec<usize> {
    (0..sweeps).map(|s| s.min(sweeps - 1 - s)).collect()
}

fn pxp_sweep(n: usize, parity: usize, theta: AngleBinding) -> Vec<Gate> {
    (0..n / 2)
        .flat_map(|i| {
            let j = 2 * i + parity;
            pxp_block_gates((j + n - 1) % n, j, (j + 1) % n, theta)
        })
        .collect()
}

fn qlm_sweep(n: usize, parity: usize, theta: AngleBinding) -> Vec<Gate> {
    (0..n / 4)
        .flat_map(|i| {
            let m = 2 * i + parity;
            qlm_gauge_gates(2 * m, 2 * m + 1, (2 * m + 2) % n, theta)
        })
        .collect()
}

fn sweep_layers(n: usize, sweeps: usize, slots: Vec<usize>, sweep: fn(usize, usize, AngleBinding) -> Vec<Gate>) -> Layers {
    let layers = (0..sweeps)
        .map(|s| sweep(n, s % 2, AngleBinding::slot(slots[s])))
        .collect();
    let count = slots.iter().max().map_or(0, |m| m + 1);
    let labels = (0..count).map(|k| format!("sweep{k}.theta")).collect();
    (layers, count, labels)
}

/// Trotter circuit for `exp(−itH)` in the blocked layout with fixed angles.
///
/// Order 1 returns the blocked template itself (`steps` layers for XXZ and
/// QLM, `4 * steps` brickwall layers for PXP). Order 2 returns the
/// [`Arch::Trotter2`] layout, which carries one extra half step.
pub fn build_trotter(spec: &ModelSpec, order: usize, steps: usize, t: f64) -> Result<(CircuitTemplate, Vec<f64>)> {
    if steps == 0 {
        return Err(Error::Unsupported(String::from("Trotter circuits need at least one step")));
    }
    let n = spec.n_qubits();
    let tau = t / steps as f64;
    // Angles realizing exp(−iτ h) per local term h.
    let (full, half): (Vec<f64>, Vec<f64>) = match spec.kind() {
        ModelKind::Xxz => (vec![-tau / 4.0, -tau / 8.0], vec![-tau / 8.0, -tau / 16.0]),
        ModelKind::Pxp => (vec![tau / 4.0], vec![tau / 8.0]),
        ModelKind::Qlm => (vec![tau / 8.0], vec![tau / 16.0]),
    };
    match order {
        1 => {
            let arch = Arch::blocked_for(spec.kind());
            let depth = if spec.kind() == ModelKind::Pxp { 4 * steps } else { steps };
            let template = build_template(arch, n, depth)?;
            let params = full.iter().copied().cycle().take(template.param_count()).collect();
            Ok((template, params))
        }
        2 => {
            let template = build_template(Arch::Trotter2(spec.kind()), n, steps)?;
            let mut params: Vec<f64> = full.iter().copied().cycle().take(template.param_count()).collect();
            params[..half.len()].copy_from_slice(&half);
            Ok((template, params))
        }
        other => Err(Error::Unsupported(format!("Trotter order {other}"))),
    }
}

pub(crate) fn apply_gate_left(op: &mut DenseOperator, gate: &Gate, params: &[f64]) -> Result<()> {
    match gate {
        Gate::Cnot { control, target } => op.apply_cnot(*control, *target),
        Gate::Su2 { qubit, .. } => op.apply_gate(&gate.matrix(params), &[*qubit]),
        Gate::Xxz2 { qubits, .. } => op.apply_gate(&gate.matrix(params), qubits),
    }
}

pub(crate) fn apply_gate_right(op: &mut DenseOperator, gate: &Gate, params: &[f64]) -> Result<()> {
    match gate {
        Gate::Cnot { control, target } => op.apply_cnot_right(*control, *target),
        Gate::Su2 { qubit, .. } => op.apply_gate_right(&gate.matrix(params), &[*qubit]),
        Gate::Xxz2 { qubits, .. } => op.apply_gate_right(&gate.matrix(params), qubits),
    }
}

/// The circuit unitary: gates applied in template order.
pub fn evaluate(template: &CircuitTemplate, params: &[f64]) -> Result<DenseOperator> {
    template.check_params(params)?;
    if template.n_qubits > OPERATOR_CEILING {
        return Err(Error::SizeCeiling { n_qubits: template.n_qubits, ceiling: OPERATOR_CEILING });
    }
    let mut op = DenseOperator::identity(template.n_qubits);
    for gate in template.gates() {
        apply_gate_left(&mut op, gate, params)?;
    }
    Ok(op)
}

/// Apply the circuit to a state.
pub fn evaluate_state(template: &CircuitTemplate, params: &[f64], psi: &StateVector) -> Result<StateVector> {
    template.check_params(params)?;
    if psi.n_qubits() != template.n_qubits {
        return Err(Error::DimensionMismatch { expected: template.n_qubits, actual: psi.n_qubits() });
    }
    let mut out = psi.clone();
    for gate in template.gates() {
        match gate {
            Gate::Cnot { control, target } => out.apply_cnot(*control, *target)?,
            Gate::Su2 { qubit, .. } => out.apply_gate(&gate.matrix(params), &[*qubit])?,
            Gate::Xxz2 { qubits, .. } => out.apply_gate(&gate.matrix(params), qubits)?,
        }
    }
    Ok(out)
}

/// The circuit repeated `n` times with the same parameters.
pub fn stack(template: &CircuitTemplate, params: &[f64], n: usize) -> Result<(CircuitTemplate, Vec<f64>)> {
    template.check_params(params)?;
    if n == 0 {
        return Err(Error::Unsupported(String::from("stacking needs n >= 1")));
    }
    let mut out = template.clone();
    out.layers = (0..n).flat_map(|_| template.layers.iter().cloned()).collect();
    out.repeats = template.repeats * n;
    Ok((out, params.to_vec()))
}

/// Rebuild the template on `n_qubits` and reuse the parameters unchanged.
pub fn lift_size(template: &CircuitTemplate, params: &[f64], n_qubits: usize) -> Result<(CircuitTemplate, Vec<f64>)> {
    template.check_params(params)?;
    let base = build_template(template.arch, n_qubits, template.depth)?;
    let (lifted, _) = stack(&base, params, template.repeats)?;
    Ok((lifted, params.to_vec()))
}

/// Starting parameters: TIVB angles uniform in `[−0.01, 0.01)` from the seed,
/// blocked templates exactly zero (the identity circuit).
pub fn initial_params(template: &CircuitTemplate, seed: u64) -> Vec<f64> {
    if template.arch.is_blocked() {
        return vec![0.0; template.param_count];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..template.param_count).map(|_| rng.gen_range(-1e-2..1e-2)).collect()
}

/// Sum of the distinct blocked PXP angles, one per mirror pair of sweeps.
pub fn angle_sum(template: &CircuitTemplate, params: &[f64]) -> Result<f64> {
    if template.arch != Arch::BlockedPxp {
        return Err(Error::Unsupported(format!("angle sum needs blocked_pxp, got {}", template.arch.name())));
    }
    template.check_params(params)?;
    Ok(params.iter().sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameter_and_cnot_counts() {
        let t = build_template(Arch::Tivb2, 8, 2).unwrap();
        assert_eq!((t.param_count(), t.cnot_count()), (30, 16));
        let t = build_template(Arch::Tivb4, 8, 1).unwrap();
        assert_eq!(t.param_count(), 36);
        let t = build_template(Arch::BlockedPxp, 8, 8).unwrap();
        assert_eq!((t.param_count(), t.cnot_count()), (2, 64));
        let t = build_template(Arch::BlockedXxz, 8, 1).unwrap();
        assert_eq!((t.param_count(), t.cnot_count()), (2, 3 * 8));
        let t = build_template(Arch::BlockedQlm, 8, 2).unwrap();
        assert_eq!((t.param_count(), t.cnot_count()), (2, 6 * 2 * 8));
        assert_eq!(t.slot_labels().len(), 2);
    }

    #[test]
    fn size_violations() {
        assert!(build_template(Arch::BlockedPxp, 8, 6).is_err());
        assert!(build_template(Arch::Tivb4, 6, 1).is_err());
        assert!(build_template(Arch::Tivb2, 3, 1).is_err());
        assert!(build_template(Arch::BlockedQlm, 6, 1).is_err());
    }

    #[test]
    fn arch_names_round_trip() {
        for a in [
            Arch::Tivb2,
            Arch::Tivb4,
            Arch::BlockedXxz,
            Arch::BlockedPxp,
            Arch::BlockedQlm,
            Arch::Trotter2(ModelKind::Pxp),
        ] {
            assert_eq!(Arch::parse(&a.name()), Some(a));
        }
    }

    #[test]
    fn trotter2_layouts() {
        let spec = ModelSpec::new(ModelKind::Pxp, 8).unwrap();
        let (tpl, p) = build_trotter(&spec, 2, 2, 1.0).unwrap();
        assert_eq!(tpl.layers().len(), 5);
        assert_eq!(p.len(), 3);
        assert!((p[0] - 1.0 / 16.0).abs() < 1e-15 && (p[1] - 1.0 / 8.0).abs() < 1e-15);
        assert!(build_trotter(&spec, 3, 1, 1.0).is_err());
        assert!(build_trotter(&spec, 1, 0, 1.0).is_err());
    }

    #[test]
    fn tivb_init_is_small_and_seeded() {
        let t = build_template(Arch::Tivb2, 4, 1).unwrap();
        let a = initial_params(&t, 7);
        assert_eq!(a, initial_params(&t, 7));
        assert!(a.iter().all(|x| x.abs() < 1e-2));
        let b = build_template(Arch::BlockedXxz, 4, 2).unwrap();
        assert!(initial_params(&b, 7).iter().all(|&x| x == 0.0));
    }
}
