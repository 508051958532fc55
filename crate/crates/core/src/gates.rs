//! Parametrized gates, their angle derivatives, and the constrained
//! three-qubit sub-circuits used by the blocked PXP and QLM templates.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_4;

use crate::error::{Error, Result};
use crate::linalg::{c, LocalMatrix, C64};

/// The kinds of gate a template may contain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum GateKind {
    /// `u(θ, φ, χ)` with bound angles.
    Su2,
    Cnot,
    /// `exp(iθ(XX+YY) + iφZZ)`.
    Xxz2,
    /// `u(θ, φ, χ)` with constant angles only.
    FixedSu2,
}

/// Effective angle `sign * params[slot] + offset`; constant bindings carry no slot.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AngleBinding {
    pub slot: Option<usize>,
    pub sign: f64,
    pub offset: f64,
}

impl AngleBinding {
    pub fn slot(slot: usize) -> Self {
        Self { slot: Some(slot), sign: 1.0, offset: 0.0 }
    }

    pub fn signed(slot: usize, sign: f64) -> Self {
        Self { slot: Some(slot), sign, offset: 0.0 }
    }

    pub fn constant(value: f64) -> Self {
        Self { slot: None, sign: 1.0, offset: value }
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn value(&self, params: &[f64]) -> f64 {
        match self.slot {
            Some(s) => self.sign * params[s] + self.offset,
            None => self.offset,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.slot.is_none()
    }

    fn shifted(self, by: usize) -> Self {
        Self { slot: self.slot.map(|s| s + by), ..self }
    }
}

/// A gate instance placed on concrete qubits.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Gate {
    Su2 { qubit: usize, angles: [AngleBinding; 3] },
    Cnot { control: usize, target: usize },
    Xxz2 { qubits: [usize; 2], angles: [AngleBinding; 2] },
}

impl Gate {
    pub fn su2(qubit: usize, theta: AngleBinding, phi: AngleBinding, chi: AngleBinding) -> Self {
        Gate::Su2 { qubit, angles: [theta, phi, chi] }
    }

    pub fn fixed_su2(qubit: usize, theta: f64, phi: f64, chi: f64) -> Self {
        Gate::su2(
            qubit,
            AngleBinding::constant(theta),
            AngleBinding::constant(phi),
            AngleBinding::constant(chi),
        )
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Gate::Cnot { control, target }
    }

    pub fn xxz2(a: usize, b: usize, theta: AngleBinding, phi: AngleBinding) -> Self {
        Gate::Xxz2 { qubits: [a, b], angles: [theta, phi] }
    }

    pub fn kind(&self) -> GateKind {
        match self {
            Gate::Su2 { angles, .. } if angles.iter().all(AngleBinding::is_constant) => {
                GateKind::FixedSu2
            }
            Gate::Su2 { .. } => GateKind::Su2,
            Gate::Cnot { .. } => GateKind::Cnot,
            Gate::Xxz2 { .. } => GateKind::Xxz2,
        }
    }

    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::Su2 { qubit, .. } => vec![*qubit],
            Gate::Cnot { control, target } => vec![*control, *target],
            Gate::Xxz2 { qubits, .. } => qubits.to_vec(),
        }
    }

    pub fn bindings(&self) -> &[AngleBinding] {
        match self {
            Gate::Su2 { angles, .. } => angles,
            Gate::Cnot { .. } => &[],
            Gate::Xxz2 { angles, .. } => angles,
        }
    }

    /// Number of CNOTs this gate stands for in a hardware decomposition.
    pub fn cnot_cost(&self) -> usize {
        match self {
            Gate::Su2 { .. } => 0,
            Gate::Cnot { .. } => 1,
            Gate::Xxz2 { .. } => 3,
        }
    }

    pub fn matrix(&self, params: &[f64]) -> LocalMatrix {
        match self {
            Gate::Su2 { angles, .. } => {
                let [t, p, x] = angles.map(|a| a.value(params));
                su2_matrix(t, p, x)
            }
            Gate::Cnot { .. } => cnot_matrix(),
            Gate::Xxz2 { angles, .. } => {
                let [t, p] = angles.map(|a| a.value(params));
                xxz2_matrix(t, p)
            }
        }
    }

    /// Derivative of the matrix with respect to its `which`-th angle.
    pub fn derivative(&self, params: &[f64], which: usize) -> Result<LocalMatrix> {
        match self {
            Gate::Su2 { angles, .. } => {
                let [t, p, x] = angles.map(|a| a.value(params));
                su2_derivative(t, p, x, which)
            }
            Gate::Cnot { .. } => Err(Error::InvalidAngle(which)),
            Gate::Xxz2 { angles, .. } => {
                let [t, p] = angles.map(|a| a.value(params));
                xxz2_derivative(t, p, which)
            }
        }
    }

    /// Same gate with qubit indices mapped through `f`.
    pub fn remapped(&self, f: impl Fn(usize) -> usize) -> Self {
        match self {
            Gate::Su2 { qubit, angles } => Gate::Su2 { qubit: f(*qubit), angles: *angles },
            Gate::Cnot { control, target } => Gate::Cnot { control: f(*control), target: f(*target) },
            Gate::Xxz2 { qubits, angles } => Gate::Xxz2 { qubits: qubits.map(&f), angles: *angles },
        }
    }

    /// Same gate with every slot index moved by `by`.
    pub fn with_slot_offset(&self, by: usize) -> Self {
        match self {
            Gate::Su2 { qubit, angles } => Gate::Su2 { qubit: *qubit, angles: angles.map(|a| a.shifted(by)) },
            Gate::Cnot { .. } => self.clone(),
            Gate::Xxz2 { qubits, angles } => Gate::Xxz2 { qubits: *qubits, angles: angles.map(|a| a.shifted(by)) },
        }
    }
}

/// `u(θ,φ,χ) = [[e^{iφ}cos θ, e^{iχ}sin θ], [−e^{−iχ}sin θ, e^{−iφ}cos θ]]`.
pub fn su2_matrix(theta: f64, phi: f64, chi: f64) -> LocalMatrix {
    let (s, co) = theta.sin_cos();
    let data = vec![
        C64::from_polar(co, phi),
        C64::from_polar(s, chi),
        -C64::from_polar(s, -chi),
        C64::from_polar(co, -phi),
    ];
    LocalMatrix::new(1, data).expect("2x2")
}

/// Entrywise derivative of [`su2_matrix`] in angle 0 (θ), 1 (φ) or 2 (χ).
pub fn su2_derivative(theta: f64, phi: f64, chi: f64, which: usize) -> Result<LocalMatrix> {
    let (s, co) = theta.sin_cos();
    let i = c(0.0, 1.0);
    let data = match which {
        0 => vec![
            C64::from_polar(-s, phi),
            C64::from_polar(co, chi),
            -C64::from_polar(co, -chi),
            C64::from_polar(-s, -phi),
        ],
        1 => vec![
            i * C64::from_polar(co, phi),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            -i * C64::from_polar(co, -phi),
        ],
        2 => vec![
            C64::new(0.0, 0.0),
            i * C64::from_polar(s, chi),
            i * C64::from_polar(s, -chi),
            C64::new(0.0, 0.0),
        ],
        other => return Err(Error::InvalidAngle(other)),
    };
    LocalMatrix::new(1, data)
}

pub fn cnot_matrix() -> LocalMatrix {
    let one = c(1.0, 0.0);
    let mut data = vec![C64::new(0.0, 0.0); 16];
    data[0] = one;
    data[5] = one;
    data[11] = one;
    data[14] = one;
    LocalMatrix::new(2, data).expect("4x4")
}

/// `exp(iθ(σ^x⊗σ^x + σ^y⊗σ^y) + iφ σ^z⊗σ^z)`.
pub fn xxz2_matrix(theta: f64, phi: f64) -> LocalMatrix {
    let (s, co) = (2.0 * theta).sin_cos();
    let outer = C64::from_polar(1.0, phi);
    let inner = C64::from_polar(1.0, -phi);
    let mut data = vec![C64::new(0.0, 0.0); 16];
    data[0] = outer;
    data[15] = outer;
    data[5] = inner * co;
    data[10] = inner * co;
    data[6] = inner * c(0.0, s);
    data[9] = inner * c(0.0, s);
    LocalMatrix::new(2, data).expect("4x4")
}

/// Derivative of [`xxz2_matrix`] in angle 0 (θ) or 1 (φ).
pub fn xxz2_derivative(theta: f64, phi: f64, which: usize) -> Result<LocalMatrix> {
    let (s, co) = (2.0 * theta).sin_cos();
    let i = c(0.0, 1.0);
    let outer = C64::from_polar(1.0, phi);
    let inner = C64::from_polar(1.0, -phi);
    let mut data = vec![C64::new(0.0, 0.0); 16];
    match which {
        0 => {
            data[5] = inner * (-2.0 * s);
            data[10] = inner * (-2.0 * s);
            data[6] = inner * c(0.0, 2.0 * co);
            data[9] = inner * c(0.0, 2.0 * co);
        }
        1 => {
            data[0] = i * outer;
            data[15] = i * outer;
            data[5] = -i * inner * co;
            data[10] = -i * inner * co;
            data[6] = -i * inner * c(0.0, s);
            data[9] = -i * inner * c(0.0, s);
        }
        other => return Err(Error::InvalidAngle(other)),
    }
    LocalMatrix::new(2, data)
}

/// Blocked PXP rotation on `(left, middle, right)`: the middle qubit is
/// rotated by `exp(−i·4θ·σ^x)` only when both neighbours are `|0⟩`.
///
/// Gate order (time order): gray `u(0,π/4,0)` on the middle qubit, then four
/// rounds of blue `u(θ,0,0)` followed by a CNOT onto the middle qubit with
/// controls left, right, left, right, then gray `u(0,−π/4,0)`. The gray pair
/// turns the `σ^y` rotation into a `σ^x` rotation with no leftover phase.
pub fn pxp_block_gates(left: usize, middle: usize, right: usize, theta: AngleBinding) -> Vec<Gate> {
    let zero = AngleBinding::zero();
    let mut gates = Vec::with_capacity(10);
    gates.push(Gate::fixed_su2(middle, 0.0, FRAC_PI_4, 0.0));
    for control in [left, right, left, right] {
        gates.push(Gate::su2(middle, theta, zero, zero));
        gates.push(Gate::cnot(control, middle));
    }
    gates.push(Gate::fixed_su2(middle, 0.0, -FRAC_PI_4, 0.0));
    gates
}

/// [`pxp_block_gates`] on qubits `(0, 1, 2)` with a fixed angle.
pub fn pxp_block_subcircuit(theta: f64) -> Vec<Gate> {
    pxp_block_gates(0, 1, 2, AngleBinding::constant(theta))
}

/// Gauge-invariant QLM coupling on `(matter, gauge, matter)`, equal to
/// `exp(i·8θ·(σ⁺ s⁺ σ⁻ + h.c.))`.
///
/// The two outer CNOTs (gauge as control) map the coupled pair
/// `|001⟩ ↔ |110⟩` onto a flip of the gauge qubit conditioned on
/// `left = 0, right = 1`. That flip is built from two blocks of four
/// rotations with signs `(+, +, −, −)` interleaved with CNOTs from the left
/// and right qubits, inside a phase frame on the gauge qubit.
pub fn qlm_gauge_gates(left: usize, gauge: usize, right: usize, theta: AngleBinding) -> Vec<Gate> {
    let zero = AngleBinding::zero();
    let minus = AngleBinding { sign: -theta.sign, offset: -theta.offset, ..theta };
    let mut gates = Vec::with_capacity(22);
    gates.push(Gate::cnot(gauge, left));
    gates.push(Gate::cnot(gauge, right));
    gates.push(Gate::fixed_su2(gauge, 0.0, -FRAC_PI_4, 0.0));
    for _ in 0..2 {
        for (angle, control) in [(theta, left), (theta, right), (minus, left), (minus, right)] {
            gates.push(Gate::su2(gauge, angle, zero, zero));
            gates.push(Gate::cnot(control, gauge));
        }
    }
    gates.push(Gate::fixed_su2(gauge, 0.0, FRAC_PI_4, 0.0));
    gates.push(Gate::cnot(gauge, right));
    gates.push(Gate::cnot(gauge, left));
    gates
}

/// [`qlm_gauge_gates`] on qubits `(0, 1, 2)` with a fixed angle.
pub fn qlm_gauge_subcircuit(theta: f64) -> Vec<Gate> {
    qlm_gauge_gates(0, 1, 2, AngleBinding::constant(theta))
}
