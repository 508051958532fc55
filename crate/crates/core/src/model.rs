//! Hamiltonians, conserved charges, sector tables, exact propagators and
//! named initial states for the XXZ, PXP and quantum link models.
//!
//! All chains are periodic. For the quantum link model qubit `2m` is matter
//! site `m` and qubit `2m + 1` is the gauge spin on link `(m, m + 1)`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::eigen::hermitian_eigen;
use crate::error::{Error, Result};
use crate::linalg::{bit_of, BlockMask, DenseOperator, StateVector, C64, OPERATOR_CEILING, STATE_CEILING};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ModelKind {
    Xxz,
    Pxp,
    Qlm,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Xxz => "xxz",
            ModelKind::Pxp => "pxp",
            ModelKind::Qlm => "qlm",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "xxz" => Some(ModelKind::Xxz),
            "pxp" => Some(ModelKind::Pxp),
            "qlm" => Some(ModelKind::Qlm),
            _ => None,
        }
    }
}

/// A model on a periodic chain of `n_qubits` qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ModelSpec {
    kind: ModelKind,
    n_qubits: usize,
}

impl ModelSpec {
    /// XXZ needs even `L >= 2`, PXP even `L >= 4`, QLM `L % 4 == 0`.
    pub fn new(kind: ModelKind, n_qubits: usize) -> Result<Self> {
        let ok = n_qubits.is_multiple_of(2)
            && match kind {
                ModelKind::Xxz => n_qubits >= 2,
                ModelKind::Pxp => n_qubits >= 4,
                ModelKind::Qlm => n_qubits >= 4 && n_qubits.is_multiple_of(4),
            };
        if !ok {
            return Err(Error::InvalidSize(format!(
                "{} needs an even chain{}; got L={n_qubits}",
                kind.name(),
                if kind == ModelKind::Qlm { " with L divisible by 4" } else { "" }
            )));
        }
        if n_qubits > STATE_CEILING {
            return Err(Error::SizeCeiling { n_qubits, ceiling: STATE_CEILING });
        }
        Ok(Self { kind, n_qubits })
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    fn bonds(&self) -> Vec<(usize, usize)> {
        let l = self.n_qubits;
        if l == 2 {
            return vec![(0, 1)];
        }
        (0..l).map(|i| (i, (i + 1) % l)).collect()
    }

    /// Nonzero entries `(row, value)` of column `b` of the Hamiltonian.
    pub fn hamiltonian_column(&self, b: usize) -> Vec<(usize, f64)> {
        let l = self.n_qubits;
        let mask = |q: usize| 1usize << (l - 1 - q);
        let mut out = Vec::new();
        match self.kind {
            ModelKind::Xxz => {
                let mut diag = 0.0;
                for (i, j) in self.bonds() {
                    let (bi, bj) = (bit_of(l, b, i), bit_of(l, b, j));
                    if bi == bj {
                        diag += 0.125;
                    } else {
                        diag -= 0.125;
                        out.push((b ^ mask(i) ^ mask(j), 0.5));
                    }
                }
                if diag != 0.0 {
                    out.push((b, diag));
                }
            }
            ModelKind::Pxp => {
                for j in 0..l {
                    let left = (j + l - 1) % l;
                    let right = (j + 1) % l;
                    if bit_of(l, b, left) == 0 && bit_of(l, b, right) == 0 {
                        out.push((b ^ mask(j), 1.0));
                    }
                }
            }
            ModelKind::Qlm => {
                for m in 0..l / 2 {
                    let (a, g, c) = (2 * m, 2 * m + 1, (2 * m + 2) % l);
                    let bits = (bit_of(l, b, a), bit_of(l, b, g), bit_of(l, b, c));
                    if bits == (0, 0, 1) || bits == (1, 1, 0) {
                        out.push((b ^ mask(a) ^ mask(g) ^ mask(c), -1.0));
                    }
                }
            }
        }
        out
    }

    /// Charge eigenvalues of basis state `b`, in site order.
    ///
    /// XXZ: the total `Q = Σ S^z`. PXP: `Q_j = 1` iff qubits `j` and `j+1`
    /// are both excited. QLM: the Gauss-law charges
    /// `Q_m = (σ^z_m + s^z_{m−1,m} − s^z_{m,m+1} + (−1)^m) / 2`.
    pub fn charge_label(&self, b: usize) -> Vec<i32> {
        let l = self.n_qubits;
        let z = |q: usize| 2 * bit_of(l, b, q) as i32 - 1;
        match self.kind {
            ModelKind::Xxz => vec![(0..l).map(z).sum::<i32>() / 2],
            ModelKind::Pxp => (0..l)
                .map(|j| (bit_of(l, b, j) & bit_of(l, b, (j + 1) % l)) as i32)
                .collect(),
            ModelKind::Qlm => {
                let sites = l / 2;
                (0..sites)
                    .map(|m| {
                        let stagger = if m % 2 == 0 { 1 } else { -1 };
                        let left_link = 2 * ((m + sites - 1) % sites) + 1;
                        (z(2 * m) + z(left_link) - z(2 * m + 1) + stagger) / 2
                    })
                    .collect()
            }
        }
    }

    fn check_operator_size(&self) -> Result<()> {
        if self.n_qubits > OPERATOR_CEILING {
            return Err(Error::SizeCeiling { n_qubits: self.n_qubits, ceiling: OPERATOR_CEILING });
        }
        Ok(())
    }
}

/// The Hamiltonian as a dense operator. XXZ uses `S = σ/2`.
pub fn hamiltonian(spec: &ModelSpec) -> Result<DenseOperator> {
    spec.check_operator_size()?;
    let mut h = DenseOperator::zeros(spec.n_qubits());
    for b in 0..spec.dim() {
        for (r, v) in spec.hamiltonian_column(b) {
            h[(r, b)] += C64::new(v, 0.0);
        }
    }
    Ok(h)
}

/// The conserved charges as dense diagonal operators.
pub fn charges(spec: &ModelSpec) -> Result<Vec<DenseOperator>> {
    spec.check_operator_size()?;
    let labels: Vec<Vec<i32>> = (0..spec.dim()).map(|b| spec.charge_label(b)).collect();
    let count = labels[0].len();
    (0..count)
        .map(|k| {
            let diag: Vec<C64> = labels.iter().map(|lab| C64::new(lab[k] as f64, 0.0)).collect();
            DenseOperator::from_diagonal(spec.n_qubits(), &diag)
        })
        .collect()
}

/// One block of joint charge eigenvalues.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Sector {
    pub label: Vec<i32>,
    pub indices: Vec<usize>,
}

impl Sector {
    pub fn dim(&self) -> usize {
        self.indices.len()
    }
}

/// Sectors ordered by decreasing dimension; `sectors[0]` is the largest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectorTable {
    n_qubits: usize,
    sectors: Vec<Sector>,
}

/// Group basis states by joint charge eigenvalues.
///
/// Ties in dimension are broken by the smallest contained basis index, except
/// that the all-zero label wins a tie for the largest block.
pub fn sector_table(spec: &ModelSpec) -> Result<SectorTable> {
    spec.check_operator_size()?;
    let mut groups: BTreeMap<Vec<i32>, Vec<usize>> = BTreeMap::new();
    for b in 0..spec.dim() {
        groups.entry(spec.charge_label(b)).or_default().push(b);
    }
    let mut sectors: Vec<Sector> = groups
        .into_iter()
        .map(|(label, indices)| Sector { label, indices })
        .collect();
    sectors.sort_by(|a, b| b.dim().cmp(&a.dim()).then(a.indices[0].cmp(&b.indices[0])));
    let top = sectors[0].dim();
    if let Some(pos) = sectors
        .iter()
        .take_while(|s| s.dim() == top)
        .position(|s| s.label.iter().all(|&q| q == 0))
    {
        let zero = sectors.remove(pos);
        sectors.insert(0, zero);
    }
    Ok(SectorTable { n_qubits: spec.n_qubits(), sectors })
}

impl SectorTable {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn sectors(&self) -> &[Sector] {
        &self.sectors
    }

    pub fn largest(&self) -> &Sector {
        &self.sectors[0]
    }

    /// Sector index of every basis state.
    pub fn sector_of(&self) -> Vec<usize> {
        let mut out = vec![0; 1 << self.n_qubits];
        for (k, s) in self.sectors.iter().enumerate() {
            for &i in &s.indices {
                out[i] = k;
            }
        }
        out
    }

    fn rest(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.sectors[1..].iter().flat_map(|s| s.indices.iter().copied()).collect();
        v.sort_unstable();
        v
    }

    /// Largest diagonal block.
    pub fn mask_d1(&self) -> Result<BlockMask> {
        let idx = self.sectors[0].indices.clone();
        BlockMask::new(self.n_qubits, vec![(idx.clone(), idx)])
    }

    /// Remaining diagonal blocks.
    pub fn mask_dr(&self) -> Result<BlockMask> {
        let blocks = self.sectors[1..]
            .iter()
            .map(|s| (s.indices.clone(), s.indices.clone()))
            .collect();
        BlockMask::new(self.n_qubits, blocks)
    }

    /// Off-diagonal rectangles in the rows and columns of the largest block.
    pub fn mask_o1(&self) -> Result<BlockMask> {
        let big = self.sectors[0].indices.clone();
        let rest = self.rest();
        BlockMask::new(self.n_qubits, vec![(big.clone(), rest.clone()), (rest, big)])
    }

    /// Off-diagonal rectangles not touching the largest block.
    pub fn mask_or(&self) -> Result<BlockMask> {
        let sector_of = self.sector_of();
        let blocks = self.sectors[1..]
            .iter()
            .enumerate()
            .map(|(k, s)| {
                let cols = (0..sector_of.len())
                    .filter(|&i| sector_of[i] != 0 && sector_of[i] != k + 1)
                    .collect();
                (s.indices.clone(), cols)
            })
            .collect();
        BlockMask::new(self.n_qubits, blocks)
    }

    /// Largest diagonal block plus its off-diagonal rectangles.
    pub fn mask_d1_o1(&self) -> Result<BlockMask> {
        let big = self.sectors[0].indices.clone();
        let rest = self.rest();
        BlockMask::new(
            self.n_qubits,
            vec![(big.clone(), big.clone()), (big.clone(), rest.clone()), (rest, big)],
        )
    }

    /// Squared Frobenius norm of all entries coupling different sectors.
    pub fn off_block_sq_norm(&self, op: &DenseOperator) -> f64 {
        let sector_of = self.sector_of();
        let d = op.dim();
        let mut s = 0.0;
        for r in 0..d {
            let row = op.row(r);
            for (col, x) in row.iter().enumerate() {
                if sector_of[r] != sector_of[col] {
                    s += x.norm_sqr();
                }
            }
        }
        s
    }
}

/// Dense Hamiltonian block on the given sorted basis indices.
pub fn hamiltonian_block(spec: &ModelSpec, indices: &[usize]) -> Vec<C64> {
    let n = indices.len();
    let mut block = vec![C64::new(0.0, 0.0); n * n];
    for (col, &b) in indices.iter().enumerate() {
        for (r, v) in spec.hamiltonian_column(b) {
            if let Ok(row) = indices.binary_search(&r) {
                block[row * n + col] += C64::new(v, 0.0);
            }
        }
    }
    block
}

/// Exact propagator built from per-sector eigendecompositions, reusable
/// across times.
#[derive(Debug, Clone)]
pub struct Propagator {
    spec: ModelSpec,
    blocks: Vec<(Vec<usize>, Vec<f64>, Vec<C64>)>,
}

impl Propagator {
    pub fn new(spec: &ModelSpec) -> Result<Self> {
        let table = sector_table(spec)?;
        let blocks = table
            .sectors()
            .iter()
            .map(|s| {
                let h = hamiltonian_block(spec, &s.indices);
                let eig = hermitian_eigen(&h, s.dim());
                (s.indices.clone(), eig.values, eig.vectors)
            })
            .collect();
        Ok(Self { spec: *spec, blocks })
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    /// All eigenvalues of the Hamiltonian, ascending.
    pub fn spectrum(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.blocks.iter().flat_map(|b| b.1.iter().copied()).collect();
        v.sort_by(|a, b| a.total_cmp(b));
        v
    }

    /// `U(t) = exp(−itH)`.
    pub fn unitary(&self, t: f64) -> DenseOperator {
        let mut u = DenseOperator::zeros(self.spec.n_qubits());
        for (indices, values, vectors) in &self.blocks {
            let n = indices.len();
            let phases: Vec<C64> = values.iter().map(|&l| C64::from_polar(1.0, -l * t)).collect();
            for (r, &gr) in indices.iter().enumerate() {
                let vr = &vectors[r * n..(r + 1) * n];
                let scaled: Vec<C64> = vr.iter().zip(&phases).map(|(v, p)| v * p).collect();
                for (col, &gc) in indices.iter().enumerate() {
                    let vc = &vectors[col * n..(col + 1) * n];
                    let mut acc = C64::new(0.0, 0.0);
                    for (x, y) in scaled.iter().zip(vc) {
                        acc += x * y.conj();
                    }
                    u[(gr, gc)] = acc;
                }
            }
        }
        u
    }
}

/// `exp(−itH)` for the model, exact up to diagonalization round-off.
pub fn exact_propagator(spec: &ModelSpec, t: f64) -> Result<DenseOperator> {
    Ok(Propagator::new(spec)?.unitary(t))
}

/// Named product states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedState {
    /// `|1010…⟩`: even qubits up.
    Neel,
    /// Matter sites alternate down/up starting from site 0, gauge spins all down.
    NeelQlm,
}

impl NamedState {
    pub fn parse(name: &str) -> Result<Self> {
        match name.to_ascii_uppercase().as_str() {
            "NEEL" => Ok(NamedState::Neel),
            "NEEL_QLM" => Ok(NamedState::NeelQlm),
            _ => Err(Error::UnknownState(String::from(name))),
        }
    }
}

/// Basis index of a named product state.
pub fn named_index(spec: &ModelSpec, state: NamedState) -> Result<usize> {
    let l = spec.n_qubits();
    let up = |q: usize| 1usize << (l - 1 - q);
    match state {
        NamedState::Neel => Ok((0..l).step_by(2).map(up).sum()),
        NamedState::NeelQlm => {
            if spec.kind() != ModelKind::Qlm {
                return Err(Error::Unsupported(String::from("NEEL_QLM needs a QLM chain")));
            }
            Ok((0..l / 2).filter(|m| m % 2 == 1).map(|m| up(2 * m)).sum())
        }
    }
}

pub fn named_state(spec: &ModelSpec, state: NamedState) -> Result<StateVector> {
    Ok(StateVector::basis(spec.n_qubits(), named_index(spec, state)?))
}
