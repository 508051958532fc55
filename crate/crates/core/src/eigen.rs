//! Eigensolvers for Hermitian and unitary matrices.
//!
//! Hermitian matrices go through a complex Householder reduction to a real
//! symmetric tridiagonal matrix followed by implicit QL iterations. Unitary
//! (more generally normal) matrices are diagonalized through the Hermitian
//! pencil `(U + U†)/2 + c (U − U†)/2i`, whose eigenvectors are shared with `U`;
//! near-degenerate clusters of the pencil are re-split with another `c`.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{DenseOperator, C64};

/// Eigendecomposition of a square matrix of arbitrary size `n`; eigenvector
/// `i` is column `i` of the row-major `vectors`.
#[derive(Debug, Clone)]
pub struct Eigen<T> {
    pub n: usize,
    pub values: Vec<T>,
    pub vectors: Vec<C64>,
}

impl<T: Copy> Eigen<T> {
    pub fn vector(&self, i: usize) -> Vec<C64> {
        (0..self.n).map(|r| self.vectors[r * self.n + i]).collect()
    }
}

/// Hermitian eigendecomposition of a row-major `n x n` matrix. Only the lower
/// triangle is read. Eigenvalues ascend.
pub fn hermitian_eigen(matrix: &[C64], n: usize) -> Eigen<f64> {
    assert_eq!(matrix.len(), n * n);
    if n == 0 {
        return Eigen {
            n,
            values: Vec::new(),
            vectors: Vec::new(),
        };
    }
    let mut a = matrix.to_vec();
    // Hermitize from the lower triangle.
    for i in 0..n {
        a[i * n + i] = C64::new(a[i * n + i].re, 0.0);
        for j in 0..i {
            a[j * n + i] = a[i * n + j].conj();
        }
    }
    let mut q = vec![C64::zero(); n * n];
    for i in 0..n {
        q[i * n + i] = C64::new(1.0, 0.0);
    }
    let mut v = vec![C64::zero(); n];
    let mut w = vec![C64::zero(); n];

    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        let off = k + 1;
        let tail: f64 = (off + 1..n).map(|i| a[i * n + k].norm_sqr()).sum();
        if tail == 0.0 {
            continue;
        }
        let x0 = a[off * n + k];
        let xnorm = (tail + x0.norm_sqr()).sqrt();
        let phase = if x0.norm() > 0.0 {
            x0 / x0.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        let alpha = -phase * xnorm;
        for i in 0..m {
            v[i] = a[(off + i) * n + k];
        }
        v[0] -= alpha;
        let vnorm2: f64 = v[..m].iter().map(|x| x.norm_sqr()).sum();
        let tau = 2.0 / vnorm2;

        // w = tau * S v on the trailing block S = a[off.., off..]
        for i in 0..m {
            let row = &a[(off + i) * n + off..(off + i) * n + n];
            let mut acc = C64::zero();
            for (x, y) in row.iter().zip(&v[..m]) {
                acc += x * y;
            }
            w[i] = acc * tau;
        }
        let vw: C64 = v[..m].iter().zip(&w[..m]).map(|(x, y)| x.conj() * y).sum();
        let half = 0.5 * tau * vw.re;
        for i in 0..m {
            w[i] -= v[i] * half;
        }
        // S <- S - v w† - w v†
        for i in 0..m {
            let (vi, wi) = (v[i], w[i]);
            let row = &mut a[(off + i) * n + off..(off + i) * n + n];
            for (j, s) in row.iter_mut().enumerate() {
                *s -= vi * w[j].conj() + wi * v[j].conj();
            }
        }
        a[off * n + k] = alpha;
        a[k * n + off] = alpha.conj();
        for i in off + 1..n {
            a[i * n + k] = C64::zero();
            a[k * n + i] = C64::zero();
        }
        // Q <- Q (1 - tau v v†)
        for r in 0..n {
            let row = &mut q[r * n + off..r * n + n];
            let mut p = C64::zero();
            for (x, y) in row.iter().zip(&v[..m]) {
                p += x * y;
            }
            p *= tau;
            for (x, y) in row.iter_mut().zip(&v[..m]) {
                *x -= p * y.conj();
            }
        }
    }

    let mut diag: Vec<f64> = (0..n).map(|i| a[i * n + i].re).collect();
    let mut sub = vec![0.0; n];
    let mut phase = vec![C64::new(1.0, 0.0); n];
    for k in 0..n - 1 {
        let e = a[(k + 1) * n + k];
        let mag = e.norm();
        sub[k] = mag;
        phase[k + 1] = if mag > 0.0 { phase[k] * (e / mag) } else { phase[k] };
    }

    // zt[i] holds eigenvector i of the real tridiagonal matrix.
    let mut zt = vec![0.0; n * n];
    for i in 0..n {
        zt[i * n + i] = 1.0;
    }
    tridiagonal_ql(&mut diag, &mut sub, &mut zt, n);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap_or(core::cmp::Ordering::Equal));

    // V = Q D Z
    for r in 0..n {
        for (j, p) in phase.iter().enumerate() {
            q[r * n + j] *= p;
        }
    }
    let mut vectors = vec![C64::zero(); n * n];
    for r in 0..n {
        let qrow = &q[r * n..(r + 1) * n];
        for (col, &i) in order.iter().enumerate() {
            let z = &zt[i * n..(i + 1) * n];
            let mut acc = C64::zero();
            for (x, &y) in qrow.iter().zip(z) {
                acc += x * y;
            }
            vectors[r * n + col] = acc;
        }
    }
    Eigen {
        n,
        values: order.iter().map(|&i| diag[i]).collect(),
        vectors,
    }
}

/// Implicit QL on a symmetric tridiagonal matrix (`d` diagonal, `e[i]`
/// coupling `i` and `i+1`). Rotations are accumulated into the rows of `zt`.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], zt: &mut [f64], n: usize) {
    if n < 2 {
        return;
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd || e[m] == 0.0 {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > 200 {
                // Accept the current approximation; this has not been observed
                // for Hermitian input of the sizes used here.
                break;
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + if g >= 0.0 { r.abs() } else { -r.abs() });
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let (lo, hi) = zt.split_at_mut((i + 1) * n);
                let zi = &mut lo[i * n..(i + 1) * n];
                let zi1 = &mut hi[..n];
                for (x, y) in zi.iter_mut().zip(zi1.iter_mut()) {
                    let f = *y;
                    *y = s * *x + c * f;
                    *x = c * *x - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}

/// Eigendecomposition of a Hermitian operator, checked against
/// `‖H − H†‖_F < 1e-10`.
pub fn herm_eig(h: &DenseOperator) -> Result<(Vec<f64>, DenseOperator)> {
    let defect = h.hermiticity_defect();
    if defect >= 1e-10 {
        return Err(Error::NotHermitian { defect });
    }
    let eig = hermitian_eigen(h.as_slice(), h.dim());
    Ok((eig.values, DenseOperator::from_vec(h.n_qubits(), eig.vectors)?))
}

const PENCIL_MIX: [f64; 5] = [
    0.618_033_988_749_894_9,
    core::f64::consts::SQRT_2,
    core::f64::consts::FRAC_1_PI,
    core::f64::consts::E,
    0.137_035_999_084,
];
const MAX_SPLIT_DEPTH: usize = 8;

/// Eigendecomposition of a normal matrix (unitary input in practice).
/// Eigenvectors form a unitary matrix.
pub fn normal_eigen(matrix: &[C64], n: usize) -> Eigen<C64> {
    normal_eigen_at(matrix, n, 0)
}

fn normal_eigen_at(b: &[C64], n: usize, depth: usize) -> Eigen<C64> {
    if n == 1 {
        return Eigen {
            n,
            values: vec![b[0]],
            vectors: vec![C64::new(1.0, 0.0)],
        };
    }
    let mean = (0..n).map(|i| b[i * n + i]).sum::<C64>() / n as f64;
    let spread: f64 = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| {
            let target = if i == j { mean } else { C64::zero() };
            (b[i * n + j] - target).norm_sqr()
        })
        .sum::<f64>()
        .sqrt();
    let scale = b.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt().max(1e-300);
    if spread <= 1e-13 * scale {
        let mut vectors = vec![C64::zero(); n * n];
        for i in 0..n {
            vectors[i * n + i] = C64::new(1.0, 0.0);
        }
        return Eigen {
            n,
            values: (0..n).map(|i| b[i * n + i]).collect(),
            vectors,
        };
    }

    let mix = PENCIL_MIX[depth % PENCIL_MIX.len()];
    let i_unit = C64::new(0.0, 1.0);
    let mut pencil = vec![C64::zero(); n * n];
    for i in 0..n {
        for j in 0..n {
            let x = b[i * n + j];
            let y = b[j * n + i].conj();
            pencil[i * n + j] = (x + y) * 0.5 + (x - y) / (i_unit * 2.0) * mix;
        }
    }
    let herm = hermitian_eigen(&pencil, n);
    let mut vectors = herm.vectors;

    let top = herm.values.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    let tol = 1e-7 * top;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && herm.values[end] - herm.values[end - 1] < tol {
            end += 1;
        }
        let k = end - start;
        if k > 1 && depth < MAX_SPLIT_DEPTH {
            // B restricted to the cluster: Vc† B Vc
            let mut bv = vec![C64::zero(); n * k];
            for r in 0..n {
                for cc in 0..k {
                    let mut acc = C64::zero();
                    for l in 0..n {
                        acc += b[r * n + l] * vectors[l * n + start + cc];
                    }
                    bv[r * k + cc] = acc;
                }
            }
            let mut small = vec![C64::zero(); k * k];
            for i in 0..k {
                for j in 0..k {
                    let mut acc = C64::zero();
                    for r in 0..n {
                        acc += vectors[r * n + start + i].conj() * bv[r * k + j];
                    }
                    small[i * k + j] = acc;
                }
            }
            let sub = normal_eigen_at(&small, k, depth + 1);
            for r in 0..n {
                let old: Vec<C64> = (0..k).map(|cc| vectors[r * n + start + cc]).collect();
                for j in 0..k {
                    let mut acc = C64::zero();
                    for (i, o) in old.iter().enumerate() {
                        acc += o * sub.vectors[i * k + j];
                    }
                    vectors[r * n + start + j] = acc;
                }
            }
        }
        start = end;
    }

    let values = (0..n)
        .map(|i| {
            let mut acc = C64::zero();
            for r in 0..n {
                let mut bv = C64::zero();
                for l in 0..n {
                    bv += b[r * n + l] * vectors[l * n + i];
                }
                acc += vectors[r * n + i].conj() * bv;
            }
            acc
        })
        .collect();
    Eigen { n, values, vectors }
}

/// Eigendecomposition of a unitary operator; input must be unitary within
/// `1e-8` and the returned eigenpairs satisfy `‖U v − λ v‖ < 1e-6`.
pub fn general_eig_unitary(u: &DenseOperator) -> Result<(Vec<C64>, DenseOperator)> {
    let defect = u.unitarity_defect();
    if defect >= 1e-8 {
        return Err(Error::NotUnitary { defect });
    }
    let eig = normal_eigen(u.as_slice(), u.dim());
    let vecs = DenseOperator::from_vec(u.n_qubits(), eig.vectors)?;
    let uv = u.matmul(&vecs)?;
    let d = u.dim();
    let mut worst: f64 = 0.0;
    for i in 0..d {
        let r: f64 = (0..d)
            .map(|row| (uv[(row, i)] - vecs[(row, i)] * eig.values[i]).norm_sqr())
            .sum::<f64>()
            .sqrt();
        worst = worst.max(r);
    }
    if worst > 1e-6 {
        return Err(Error::DefectiveEigenbasis { condition: worst });
    }
    Ok((eig.values, vecs))
}
