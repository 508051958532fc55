//! Independent dense-matrix oracle: Kronecker products of 2x2 blocks and a
//! Taylor-series matrix exponential. Shares no code with the crate beyond the
//! complex type.
#![allow(dead_code)]

use qcompress_core::model::ModelKind;
use qcompress_core::{DenseOperator, C64};

#[derive(Debug, Clone)]
pub struct Mat {
    pub n: usize,
    pub d: Vec<C64>,
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

impl Mat {
    pub fn zeros(n: usize) -> Self {
        Mat { n, d: vec![c(0.0, 0.0); n * n] }
    }

    pub fn eye(n: usize) -> Self {
        let mut m = Mat::zeros(n);
        for i in 0..n {
            m.d[i * n + i] = c(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[&[C64]]) -> Self {
        let n = rows.len();
        Mat { n, d: rows.iter().flat_map(|r| r.iter().copied()).collect() }
    }

    pub fn at(&self, r: usize, k: usize) -> C64 {
        self.d[r * self.n + k]
    }

    pub fn mul(&self, o: &Mat) -> Mat {
        let n = self.n;
        let mut out = Mat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.d[i * n + k];
                if a == c(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.d[i * n + j] += a * o.d[k * n + j];
                }
            }
        }
        out
    }

    pub fn add(&self, o: &Mat) -> Mat {
        Mat { n: self.n, d: self.d.iter().zip(&o.d).map(|(a, b)| a + b).collect() }
    }

    pub fn scale(&self, s: C64) -> Mat {
        Mat { n: self.n, d: self.d.iter().map(|a| a * s).collect() }
    }

    pub fn dagger(&self) -> Mat {
        let n = self.n;
        let mut out = Mat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.d[j * n + i] = self.d[i * n + j].conj();
            }
        }
        out
    }

    pub fn kron(&self, o: &Mat) -> Mat {
        let n = self.n * o.n;
        let mut out = Mat::zeros(n);
        for i in 0..self.n {
            for j in 0..self.n {
                let a = self.at(i, j);
                for k in 0..o.n {
                    for l in 0..o.n {
                        out.d[(i * o.n + k) * n + j * o.n + l] = a * o.at(k, l);
                    }
                }
            }
        }
        out
    }

    pub fn norm1(&self) -> f64 {
        (0..self.n).map(|j| (0..self.n).map(|i| self.at(i, j).norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    /// `exp(A)` by scaling and squaring with a 30-term Taylor series.
    pub fn expm(&self) -> Mat {
        let mut s = 0;
        let mut scaled = self.clone();
        while scaled.norm1() > 0.25 {
            scaled = scaled.scale(c(0.5, 0.0));
            s += 1;
        }
        let mut sum = Mat::eye(self.n);
        let mut term = Mat::eye(self.n);
        for k in 1..30 {
            term = term.mul(&scaled).scale(c(1.0 / k as f64, 0.0));
            sum = sum.add(&term);
        }
        for _ in 0..s {
            sum = sum.mul(&sum);
        }
        sum
    }

    pub fn to_op(&self) -> DenseOperator {
        let l = self.n.trailing_zeros() as usize;
        DenseOperator::from_vec(l, self.d.clone()).unwrap()
    }

    pub fn from_op(op: &DenseOperator) -> Mat {
        Mat { n: op.dim(), d: op.as_slice().to_vec() }
    }

    pub fn max_diff(&self, o: &Mat) -> f64 {
        self.d.iter().zip(&o.d).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn max_diff_op(&self, o: &DenseOperator) -> f64 {
        assert_eq!(self.n, o.dim());
        self.max_diff(&Mat::from_op(o))
    }
}

pub fn id2() -> Mat {
    Mat::eye(2)
}
pub fn x() -> Mat {
    Mat::from_rows(&[&[c(0.0, 0.0), c(1.0, 0.0)], &[c(1.0, 0.0), c(0.0, 0.0)]])
}
pub fn y() -> Mat {
    Mat::from_rows(&[&[c(0.0, 0.0), c(0.0, -1.0)], &[c(0.0, 1.0), c(0.0, 0.0)]])
}
/// `σ^z` in the `|0⟩ = down, |1⟩ = up` ordering: `diag(−1, +1)`.
pub fn z() -> Mat {
    Mat::from_rows(&[&[c(-1.0, 0.0), c(0.0, 0.0)], &[c(0.0, 0.0), c(1.0, 0.0)]])
}
/// `|a⟩⟨b|`.
pub fn ket_bra(a: usize, b: usize) -> Mat {
    let mut m = Mat::zeros(2);
    m.d[a * 2 + b] = c(1.0, 0.0);
    m
}

/// `⊗_j ops[j]` over `n` qubits, identity where not given. Qubit 0 is the
/// leftmost factor.
pub fn embed(n: usize, ops: &[(usize, Mat)]) -> Mat {
    let mut out = Mat::eye(1);
    for q in 0..n {
        let f = ops.iter().find(|(p, _)| *p == q).map(|(_, m)| m.clone()).unwrap_or_else(id2);
        out = out.kron(&f);
    }
    out
}

/// A `k`-qubit matrix (row-major, first listed qubit most significant)
/// placed on `qubits` of an `n`-qubit register.
pub fn embed_local(n: usize, qubits: &[usize], local: &[C64]) -> Mat {
    let k = qubits.len();
    let dk = 1 << k;
    let mut out = Mat::zeros(1 << n);
    for r in 0..dk {
        for col in 0..dk {
            let v = local[r * dk + col];
            if v == c(0.0, 0.0) {
                continue;
            }
            let ops: Vec<(usize, Mat)> = qubits
                .iter()
                .enumerate()
                .map(|(i, &q)| (q, ket_bra((r >> (k - 1 - i)) & 1, (col >> (k - 1 - i)) & 1)))
                .collect();
            out = out.add(&embed(n, &ops).scale(v));
        }
    }
    out
}

/// Deterministic pseudo-random numbers in (−1, 1).
pub struct Lcg(pub u64);

impl Lcg {
    pub fn next(&mut self) -> f64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((self.0 >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    }

    pub fn matrix(&mut self, n: usize) -> Mat {
        Mat { n, d: (0..n * n).map(|_| c(self.next(), self.next())).collect() }
    }
}

/// Hermitian `Σ_terms coeff · ⊗ paulis` on `n` qubits.
pub fn pauli_sum(n: usize, terms: &[(f64, Vec<(usize, Mat)>)]) -> Mat {
    terms.iter().fold(Mat::zeros(1 << n), |acc, (w, ops)| acc.add(&embed(n, ops).scale(c(*w, 0.0))))
}

/// `exp(−i t H)`.
pub fn evolve(h: &Mat, t: f64) -> Mat {
    h.scale(c(0.0, -t)).expm()
}

/// XXZ chain `Σ_bonds (XX + YY)/4 + ZZ/8`, periodic for `n > 2`.
pub fn xxz_oracle(n: usize) -> Mat {
    let bonds: Vec<(usize, usize)> = if n == 2 { vec![(0, 1)] } else { (0..n).map(|i| (i, (i + 1) % n)).collect() };
    let mut terms = Vec::new();
    for (i, j) in bonds {
        terms.push((0.25, vec![(i, x()), (j, x())]));
        terms.push((0.25, vec![(i, y()), (j, y())]));
        terms.push((0.125, vec![(i, z()), (j, z())]));
    }
    pauli_sum(n, &terms)
}

/// `Σ_j P_{j−1} X_j P_{j+1}` with `P = |0⟩⟨0|`, periodic.
pub fn pxp_oracle(n: usize) -> Mat {
    let p = ket_bra(0, 0);
    let terms: Vec<(f64, Vec<(usize, Mat)>)> = (0..n)
        .map(|j| (1.0, vec![((j + n - 1) % n, p.clone()), (j, x()), ((j + 1) % n, p.clone())]))
        .collect();
    pauli_sum(n, &terms)
}

/// `−Σ_m (σ⁺_{2m} σ⁺_{2m+1} σ⁻_{2m+2} + h.c.)`, periodic.
pub fn qlm_oracle(n: usize) -> Mat {
    let up = ket_bra(1, 0);
    let down = ket_bra(0, 1);
    let mut terms = Vec::new();
    for m in 0..n / 2 {
        let (a, g, b) = (2 * m, 2 * m + 1, (2 * m + 2) % n);
        terms.push((-1.0, vec![(a, up.clone()), (g, up.clone()), (b, down.clone())]));
        terms.push((-1.0, vec![(a, down.clone()), (g, down.clone()), (b, up.clone())]));
    }
    pauli_sum(n, &terms)
}

/// The model Hamiltonian split into its even (`[0]`) and odd (`[1]`) bond
/// terms, as used by the Trotter circuits.
pub fn split_hamiltonian(kind: ModelKind, n: usize) -> Vec<Mat> {
    match kind {
        ModelKind::Xxz => (0..2)
            .map(|parity| {
                let terms: Vec<_> = (0..n / 2)
                    .flat_map(|i| {
                        let (a, b) = (2 * i + parity, (2 * i + parity + 1) % n);
                        [
                            (0.25, vec![(a, x()), (b, x())]),
                            (0.25, vec![(a, y()), (b, y())]),
                            (0.125, vec![(a, z()), (b, z())]),
                        ]
                    })
                    .collect();
                pauli_sum(n, &terms)
            })
            .collect(),
        ModelKind::Pxp => (0..2)
            .map(|parity| {
                let terms: Vec<_> = (0..n / 2)
                    .map(|i| {
                        let j = 2 * i + parity;
                        (1.0, vec![((j + n - 1) % n, ket_bra(0, 0)), (j, x()), ((j + 1) % n, ket_bra(0, 0))])
                    })
                    .collect();
                pauli_sum(n, &terms)
            })
            .collect(),
        ModelKind::Qlm => (0..2)
            .map(|parity| {
                let mut terms = Vec::new();
                for i in 0..n / 4 {
                    let m = 2 * i + parity;
                    let (a, g, b) = (2 * m, 2 * m + 1, (2 * m + 2) % n);
                    terms.push((-1.0, vec![(a, ket_bra(1, 0)), (g, ket_bra(1, 0)), (b, ket_bra(0, 1))]));
                    terms.push((-1.0, vec![(a, ket_bra(0, 1)), (g, ket_bra(0, 1)), (b, ket_bra(1, 0))]));
                }
                pauli_sum(n, &terms)
            })
            .collect(),
    }
}
