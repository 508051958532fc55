//! Dense complex linear algebra on `2^L`-dimensional qubit spaces.
//!
//! Basis convention used throughout the crate: basis index `b` stores qubit `j`
//! in bit `L - 1 - j`, so qubit 0 is the most significant bit. A set bit means
//! spin up (σ^z eigenvalue +1).

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;
use num_traits::Zero;
// f64 math methods come from std when it is linked.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Largest L for which dense operators are built.
pub const OPERATOR_CEILING: usize = 14;
/// Largest L for which dense states are built.
pub const STATE_CEILING: usize = 20;

#[inline]
pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Bit mask of qubit `q` in an `n`-qubit basis index.
#[inline]
pub fn qubit_bit(n_qubits: usize, q: usize) -> usize {
    1usize << (n_qubits - 1 - q)
}

/// Value (0 or 1) of qubit `q` in basis index `b`.
#[inline]
pub fn bit_of(n_qubits: usize, b: usize, q: usize) -> usize {
    (b >> (n_qubits - 1 - q)) & 1
}

fn check_support(n_qubits: usize, qubits: &[usize]) -> Result<()> {
    for (i, &q) in qubits.iter().enumerate() {
        if q >= n_qubits {
            return Err(Error::QubitOutOfRange { qubit: q, n_qubits });
        }
        if qubits[..i].contains(&q) {
            return Err(Error::RepeatedQubit { qubit: q });
        }
    }
    Ok(())
}

/// Row offsets of the `2^k` local basis states of `qubits`; the first listed
/// qubit is the most significant local bit.
fn local_offsets(n_qubits: usize, qubits: &[usize]) -> Vec<usize> {
    let k = qubits.len();
    (0..1usize << k)
        .map(|a| {
            qubits
                .iter()
                .enumerate()
                .filter(|(i, _)| (a >> (k - 1 - i)) & 1 == 1)
                .fold(0, |acc, (_, &q)| acc | qubit_bit(n_qubits, q))
        })
        .collect()
}

/// Basis indices with all bits of `qubits` cleared.
fn base_indices(n_qubits: usize, qubits: &[usize]) -> impl Iterator<Item = usize> {
    let mask = qubits.iter().fold(0usize, |m, &q| m | qubit_bit(n_qubits, q));
    (0..1usize << n_qubits).filter(move |b| b & mask == 0)
}

/// A small gate matrix acting on `k` qubits, row-major `2^k x 2^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalMatrix {
    k: usize,
    data: Vec<C64>,
}

impl LocalMatrix {
    pub fn new(k: usize, data: Vec<C64>) -> Result<Self> {
        let d = 1usize << k;
        if data.len() != d * d {
            return Err(Error::DimensionMismatch {
                expected: d * d,
                actual: data.len(),
            });
        }
        Ok(Self { k, data })
    }

    pub fn identity(k: usize) -> Self {
        let d = 1usize << k;
        let mut data = vec![C64::zero(); d * d];
        for i in 0..d {
            data[i * d + i] = C64::new(1.0, 0.0);
        }
        Self { k, data }
    }

    pub fn n_qubits(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        1 << self.k
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn dagger(&self) -> Self {
        let d = self.dim();
        let mut data = vec![C64::zero(); d * d];
        for i in 0..d {
            for j in 0..d {
                data[j * d + i] = self.data[i * d + j].conj();
            }
        }
        Self { k: self.k, data }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let d = self.dim();
        let mut data = vec![C64::zero(); d * d];
        for i in 0..d {
            for l in 0..d {
                let a = self.data[i * d + l];
                for j in 0..d {
                    data[i * d + j] += a * other.data[l * d + j];
                }
            }
        }
        Self { k: self.k, data }
    }

    /// `‖G†G − 1‖_F`.
    pub fn unitarity_defect(&self) -> f64 {
        let p = self.dagger().matmul(self);
        let d = self.dim();
        let mut s = 0.0;
        for i in 0..d {
            for j in 0..d {
                let target = if i == j { 1.0 } else { 0.0 };
                s += (p.data[i * d + j] - C64::new(target, 0.0)).norm_sqr();
            }
        }
        s.sqrt()
    }

    pub fn to_operator(&self) -> DenseOperator {
        DenseOperator {
            n_qubits: self.k,
            data: self.data.clone(),
        }
    }
}

impl Index<(usize, usize)> for LocalMatrix {
    type Output = C64;
    fn index(&self, (r, col): (usize, usize)) -> &C64 {
        &self.data[r * self.dim() + col]
    }
}

/// A `2^L x 2^L` complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    n_qubits: usize,
    data: Vec<C64>,
}

impl DenseOperator {
    pub fn zeros(n_qubits: usize) -> Self {
        let d = 1usize << n_qubits;
        Self {
            n_qubits,
            data: vec![C64::zero(); d * d],
        }
    }

    pub fn identity(n_qubits: usize) -> Self {
        let mut m = Self::zeros(n_qubits);
        let d = m.dim();
        for i in 0..d {
            m.data[i * d + i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_diagonal(n_qubits: usize, diag: &[C64]) -> Result<Self> {
        let mut m = Self::zeros(n_qubits);
        let d = m.dim();
        if diag.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: diag.len(),
            });
        }
        for (i, &v) in diag.iter().enumerate() {
            m.data[i * d + i] = v;
        }
        Ok(m)
    }

    pub fn from_vec(n_qubits: usize, data: Vec<C64>) -> Result<Self> {
        let d = 1usize << n_qubits;
        if data.len() != d * d {
            return Err(Error::DimensionMismatch {
                expected: d * d,
                actual: data.len(),
            });
        }
        Ok(Self { n_qubits, data })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn row(&self, r: usize) -> &[C64] {
        let d = self.dim();
        &self.data[r * d..(r + 1) * d]
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(())
    }

    pub fn dagger(&self) -> Self {
        let d = self.dim();
        let mut data = vec![C64::zero(); d * d];
        for i in 0..d {
            for j in 0..d {
                data[j * d + i] = self.data[i * d + j].conj();
            }
        }
        Self {
            n_qubits: self.n_qubits,
            data,
        }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let d = self.dim();
        let mut out = vec![C64::zero(); d * d];
        for i in 0..d {
            let orow = &mut out[i * d..(i + 1) * d];
            for l in 0..d {
                let a = self.data[i * d + l];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let brow = &other.data[l * d..(l + 1) * d];
                for (o, b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        Ok(Self {
            n_qubits: self.n_qubits,
            data: out,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(Self {
            n_qubits: self.n_qubits,
            data,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(Self {
            n_qubits: self.n_qubits,
            data,
        })
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            n_qubits: self.n_qubits,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn add_assign_scaled(&mut self, other: &Self, s: C64) -> Result<()> {
        self.check_same_shape(other)?;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * s;
        }
        Ok(())
    }

    /// `AB − BA`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.matmul(other)?.sub(&other.matmul(self)?)
    }

    pub fn trace(&self) -> C64 {
        let d = self.dim();
        (0..d).map(|i| self.data[i * d + i]).sum()
    }

    pub fn frob_norm_sq(&self) -> f64 {
        self.data.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn frob_norm(&self) -> f64 {
        self.frob_norm_sq().sqrt()
    }

    /// `‖A − A†‖_F`.
    pub fn hermiticity_defect(&self) -> f64 {
        let d = self.dim();
        let mut s = 0.0;
        for i in 0..d {
            for j in 0..d {
                s += (self.data[i * d + j] - self.data[j * d + i].conj()).norm_sqr();
            }
        }
        s.sqrt()
    }

    /// `‖O†O − 1‖_F / 2^{L/2}`.
    pub fn unitarity_defect(&self) -> f64 {
        let p = self.dagger().matmul(self).expect("same shape");
        let d = self.dim();
        let mut s = 0.0;
        for i in 0..d {
            for j in 0..d {
                let target = if i == j { 1.0 } else { 0.0 };
                s += (p.data[i * d + j] - C64::new(target, 0.0)).norm_sqr();
            }
        }
        s.sqrt() / (d as f64).sqrt()
    }

    /// Multiplies `(gate ⊗ 1)` from the left.
    pub fn apply_gate(&mut self, gate: &LocalMatrix, qubits: &[usize]) -> Result<()> {
        check_gate(self.n_qubits, gate, qubits)?;
        let d = self.dim();
        apply_rows(&mut self.data, d, self.n_qubits, gate, qubits);
        Ok(())
    }

    /// Multiplies `(gate ⊗ 1)` from the right.
    pub fn apply_gate_right(&mut self, gate: &LocalMatrix, qubits: &[usize]) -> Result<()> {
        check_gate(self.n_qubits, gate, qubits)?;
        let n = self.n_qubits;
        let d = self.dim();
        if qubits.len() == 1 {
            let stride = qubit_bit(n, qubits[0]);
            let (g00, g01, g10, g11) = (gate.data[0], gate.data[1], gate.data[2], gate.data[3]);
            for row in self.data.chunks_exact_mut(d) {
                for block in row.chunks_exact_mut(2 * stride) {
                    let (lo, hi) = block.split_at_mut(stride);
                    for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                        let (a, b) = (*x, *y);
                        *x = a * g00 + b * g10;
                        *y = a * g01 + b * g11;
                    }
                }
            }
            return Ok(());
        }
        let offs = local_offsets(n, qubits);
        let bases: Vec<usize> = base_indices(n, qubits).collect();
        let ld = gate.dim();
        let mut buf = vec![C64::zero(); ld];
        for row in self.data.chunks_exact_mut(d) {
            for &b in &bases {
                for (a, v) in buf.iter_mut().enumerate() {
                    *v = row[b | offs[a]];
                }
                for col in 0..ld {
                    let mut acc = C64::zero();
                    for (a, v) in buf.iter().enumerate() {
                        acc += v * gate.data[a * ld + col];
                    }
                    row[b | offs[col]] = acc;
                }
            }
        }
        Ok(())
    }

    /// Left multiplication by a CNOT (row permutation).
    pub fn apply_cnot(&mut self, control: usize, target: usize) -> Result<()> {
        check_support(self.n_qubits, &[control, target])?;
        let n = self.n_qubits;
        let d = self.dim();
        let cb = qubit_bit(n, control);
        let tb = qubit_bit(n, target);
        for r in 0..d {
            if r & cb != 0 && r & tb == 0 {
                let s = r | tb;
                let (lo, hi) = self.data.split_at_mut(s * d);
                lo[r * d..(r + 1) * d].swap_with_slice(&mut hi[..d]);
            }
        }
        Ok(())
    }

    /// Right multiplication by a CNOT (column permutation).
    pub fn apply_cnot_right(&mut self, control: usize, target: usize) -> Result<()> {
        check_support(self.n_qubits, &[control, target])?;
        let n = self.n_qubits;
        let d = self.dim();
        let cb = qubit_bit(n, control);
        let tb = qubit_bit(n, target);
        let pairs: Vec<usize> = (0..d).filter(|c| c & cb != 0 && c & tb == 0).collect();
        for row in self.data.chunks_exact_mut(d) {
            for &col in &pairs {
                row.swap(col, col | tb);
            }
        }
        Ok(())
    }

    /// `T_ab = Σ_r A[(a,r),(b,r)]`: the operator traced over every qubit
    /// outside `qubits`.
    pub fn partial_trace_onto(&self, qubits: &[usize]) -> Result<LocalMatrix> {
        check_support(self.n_qubits, qubits)?;
        let n = self.n_qubits;
        let d = self.dim();
        let offs = local_offsets(n, qubits);
        let ld = offs.len();
        let mut t = vec![C64::zero(); ld * ld];
        for base in base_indices(n, qubits) {
            for (a, &oa) in offs.iter().enumerate() {
                let r = base | oa;
                let row = &self.data[r * d..(r + 1) * d];
                for (bcol, &ob) in offs.iter().enumerate() {
                    t[a * ld + bcol] += row[base | ob];
                }
            }
        }
        LocalMatrix::new(qubits.len(), t)
    }

    /// Cyclic translation `T` with `T|q_0 … q_{L-1}⟩ = |q_{L-s} … ⟩`:
    /// qubit `j` moves to `j + shift (mod L)`. Returns `T A T†`.
    pub fn translated(&self, shift: usize) -> Self {
        let n = self.n_qubits;
        let d = self.dim();
        let perm: Vec<usize> = (0..d).map(|b| translate_index(n, b, shift)).collect();
        let mut data = vec![C64::zero(); d * d];
        for i in 0..d {
            for j in 0..d {
                data[perm[i] * d + perm[j]] = self.data[i * d + j];
            }
        }
        Self { n_qubits: n, data }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Extracts the sub-matrix `A[rows, cols]` row-major.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Vec<C64> {
        let d = self.dim();
        let mut out = Vec::with_capacity(rows.len() * cols.len());
        for &r in rows {
            for &col in cols {
                out.push(self.data[r * d + col]);
            }
        }
        out
    }
}

impl Index<(usize, usize)> for DenseOperator {
    type Output = C64;
    fn index(&self, (r, col): (usize, usize)) -> &C64 {
        &self.data[r * self.dim() + col]
    }
}

impl IndexMut<(usize, usize)> for DenseOperator {
    fn index_mut(&mut self, (r, col): (usize, usize)) -> &mut C64 {
        let d = self.dim();
        &mut self.data[r * d + col]
    }
}

/// Basis index after moving every qubit `j` to `j + shift (mod L)`.
pub fn translate_index(n_qubits: usize, b: usize, shift: usize) -> usize {
    let mut out = 0;
    for j in 0..n_qubits {
        if bit_of(n_qubits, b, j) == 1 {
            out |= qubit_bit(n_qubits, (j + shift) % n_qubits);
        }
    }
    out
}

fn check_gate(n_qubits: usize, gate: &LocalMatrix, qubits: &[usize]) -> Result<()> {
    if gate.k != qubits.len() {
        return Err(Error::DimensionMismatch {
            expected: 1 << qubits.len(),
            actual: gate.dim(),
        });
    }
    check_support(n_qubits, qubits)
}

/// Left action of `gate` on a row-major block of `2^n` rows of width `width`.
fn apply_rows(data: &mut [C64], width: usize, n: usize, gate: &LocalMatrix, qubits: &[usize]) {
    if qubits.len() == 1 {
        let stride = qubit_bit(n, qubits[0]) * width;
        let (g00, g01, g10, g11) = (gate.data[0], gate.data[1], gate.data[2], gate.data[3]);
        for block in data.chunks_exact_mut(2 * stride) {
            let (lo, hi) = block.split_at_mut(stride);
            for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                let (a, b) = (*x, *y);
                *x = g00 * a + g01 * b;
                *y = g10 * a + g11 * b;
            }
        }
        return;
    }
    let offs = local_offsets(n, qubits);
    let ld = offs.len();
    let mut buf = vec![C64::zero(); ld];
    for base in base_indices(n, qubits) {
        for col in 0..width {
            for (a, v) in buf.iter_mut().enumerate() {
                *v = data[(base | offs[a]) * width + col];
            }
            for r in 0..ld {
                let mut acc = C64::zero();
                for (a, v) in buf.iter().enumerate() {
                    acc += gate.data[r * ld + a] * v;
                }
                data[(base | offs[r]) * width + col] = acc;
            }
        }
    }
}

/// A `2^L` complex amplitude vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<C64>,
}

impl StateVector {
    pub fn zeros(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            amps: vec![C64::zero(); 1 << n_qubits],
        }
    }

    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut s = Self::zeros(n_qubits);
        s.amps[index] = C64::new(1.0, 0.0);
        s
    }

    pub fn from_vec(n_qubits: usize, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != 1 << n_qubits {
            return Err(Error::DimensionMismatch {
                expected: 1 << n_qubits,
                actual: amps.len(),
            });
        }
        Ok(Self { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &Self) -> Result<C64> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn apply_gate(&mut self, gate: &LocalMatrix, qubits: &[usize]) -> Result<()> {
        check_gate(self.n_qubits, gate, qubits)?;
        apply_rows(&mut self.amps, 1, self.n_qubits, gate, qubits);
        Ok(())
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) -> Result<()> {
        check_support(self.n_qubits, &[control, target])?;
        let cb = qubit_bit(self.n_qubits, control);
        let tb = qubit_bit(self.n_qubits, target);
        for b in 0..self.dim() {
            if b & cb != 0 && b & tb == 0 {
                self.amps.swap(b, b | tb);
            }
        }
        Ok(())
    }

    /// `O |ψ⟩` for a dense operator.
    pub fn apply_operator(&self, op: &DenseOperator) -> Result<Self> {
        if op.n_qubits != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: op.dim(),
            });
        }
        let d = self.dim();
        let amps = (0..d)
            .map(|r| op.row(r).iter().zip(&self.amps).map(|(a, b)| a * b).sum())
            .collect();
        Ok(Self {
            n_qubits: self.n_qubits,
            amps,
        })
    }

    /// `⟨σ^z_q⟩`.
    pub fn z_expectation(&self, q: usize) -> f64 {
        let n = self.n_qubits;
        self.amps
            .iter()
            .enumerate()
            .map(|(b, a)| {
                let sign = if bit_of(n, b, q) == 1 { 1.0 } else { -1.0 };
                sign * a.norm_sqr()
            })
            .sum()
    }
}

/// `Tr[A†B]`.
pub fn frob_inner(a: &DenseOperator, b: &DenseOperator) -> Result<C64> {
    a.check_same_shape(b)?;
    Ok(a.data.iter().zip(&b.data).map(|(x, y)| x.conj() * y).sum())
}

/// A set of matrix entries given as a union of `rows x cols` rectangles.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMask {
    n_qubits: usize,
    blocks: Vec<(Vec<usize>, Vec<usize>)>,
}

impl BlockMask {
    pub fn new(n_qubits: usize, blocks: Vec<(Vec<usize>, Vec<usize>)>) -> Result<Self> {
        let d = 1usize << n_qubits;
        for (rows, cols) in &blocks {
            if let Some(&bad) = rows.iter().chain(cols).find(|&&i| i >= d) {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    actual: bad + 1,
                });
            }
        }
        let mask = Self { n_qubits, blocks };
        if mask.entry_count() == 0 {
            return Err(Error::EmptyMask);
        }
        Ok(mask)
    }

    pub fn full(n_qubits: usize) -> Self {
        let all: Vec<usize> = (0..1 << n_qubits).collect();
        Self {
            n_qubits,
            blocks: vec![(all.clone(), all)],
        }
    }

    pub fn diagonal(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            blocks: (0..1 << n_qubits).map(|i| (vec![i], vec![i])).collect(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn blocks(&self) -> &[(Vec<usize>, Vec<usize>)] {
        &self.blocks
    }

    /// `N_e`, the number of included entries.
    pub fn entry_count(&self) -> usize {
        self.blocks.iter().map(|(r, c)| r.len() * c.len()).sum()
    }

    /// Dense 0/1 indicator of the mask.
    pub fn indicator(&self) -> Vec<bool> {
        let d = 1usize << self.n_qubits;
        let mut ind = vec![false; d * d];
        for (rows, cols) in &self.blocks {
            for &r in rows {
                for &col in cols {
                    ind[r * d + col] = true;
                }
            }
        }
        ind
    }
}

/// `Σ_{(i,j) ∈ mask} |A_ij|²`.
pub fn masked_sq_norm(a: &DenseOperator, mask: &BlockMask) -> Result<f64> {
    if mask.n_qubits != a.n_qubits {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            actual: 1 << mask.n_qubits,
        });
    }
    if mask.entry_count() == 0 {
        return Err(Error::EmptyMask);
    }
    let d = a.dim();
    let mut s = 0.0;
    for (rows, cols) in &mask.blocks {
        for &r in rows {
            let row = &a.data[r * d..(r + 1) * d];
            s += cols.iter().map(|&col| row[col].norm_sqr()).sum::<f64>();
        }
    }
    Ok(s)
}

/// `exp(-i t H) = V e^{-iλt} V†` from an eigendecomposition.
pub fn unitary_from_spectrum(values: &[f64], vectors: &DenseOperator, t: f64) -> DenseOperator {
    let d = vectors.dim();
    let phases: Vec<C64> = values.iter().map(|&l| C64::from_polar(1.0, -l * t)).collect();
    let mut scaled = vectors.clone();
    for r in 0..d {
        for (k, p) in phases.iter().enumerate() {
            scaled.data[r * d + k] *= p;
        }
    }
    scaled.matmul(&vectors.dagger()).expect("same shape")
}
