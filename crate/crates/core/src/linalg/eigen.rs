//! Cyclic Jacobi eigensolver for complex Hermitian matrices.

use std::cmp::Ordering;

use super::{c, Cplx, DenseMatrix};
use crate::error::{Error, Result};

/// Sweep cap for the cyclic Jacobi iteration.
pub const MAX_SWEEPS: usize = 100;

/// Off-diagonal mass, relative to `‖M‖_F`, at which the iteration stops.
const OFF_DIAGONAL_TOL: f64 = 1e-13;

/// Relative Hermitian defect accepted on input.
const HERMITIAN_TOL: f64 = 1e-10;

/// Eigenvalues in descending order with matching unit eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    pub vectors: DenseMatrix,
}

impl EigenSystem {
    pub fn vector(&self, j: usize) -> Vec<Cplx> {
        self.vectors.column(j)
    }

    pub fn max_value(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    /// `Q Λ Q*`.
    pub fn reconstruct(&self) -> DenseMatrix {
        let n = self.vectors.rows();
        let q = &self.vectors;
        DenseMatrix::from_fn_unchecked(n, n, |i, j| {
            (0..self.values.len())
                .map(|l| q[(i, l)] * self.values[l] * q[(j, l)].conj())
                .sum()
        })
    }
}

pub fn hermitian_eigensystem(m: &DenseMatrix) -> Result<EigenSystem> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    let norm = m.frobenius_norm();
    let defect = m.hermitian_defect();
    if defect > HERMITIAN_TOL * norm.max(1.0) {
        return Err(Error::NotHermitian { defect });
    }

    // Symmetrize so rounding in the input cannot leak into the rotations.
    let mut a: Vec<Cplx> = (0..n * n)
        .map(|idx| {
            let (i, j) = (idx / n, idx % n);
            (m[(i, j)] + m[(j, i)].conj()) * 0.5
        })
        .collect();
    let mut v: Vec<Cplx> = DenseMatrix::identity(n).entries().to_vec();

    let mut converged = false;
    for _ in 0..=MAX_SWEEPS {
        if off_diagonal(&a, n) <= OFF_DIAGONAL_TOL * norm {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, n, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut pairs: Vec<(f64, Vec<Cplx>)> = (0..n)
        .map(|j| (a[j * n + j].re, (0..n).map(|i| v[i * n + j]).collect()))
        .collect();
    pairs.sort_by(|x, y| {
        y.0.partial_cmp(&x.0)
            .unwrap_or(Ordering::Equal)
            .then_with(|| lexicographic(&x.1, &y.1))
    });
    let values = pairs.iter().map(|p| p.0).collect();
    let columns: Vec<Vec<Cplx>> = pairs.into_iter().map(|p| p.1).collect();
    Ok(EigenSystem {
        values,
        vectors: DenseMatrix::from_columns(n, &columns),
    })
}

fn lexicographic(x: &[Cplx], y: &[Cplx]) -> Ordering {
    for (a, b) in x.iter().zip(y) {
        let ord = a
            .re
            .partial_cmp(&b.re)
            .unwrap_or(Ordering::Equal)
            .then(a.im.partial_cmp(&b.im).unwrap_or(Ordering::Equal));
        if ord != Ordering::Equal {
            return ord;
        }
    }
    Ordering::Equal
}

/// Annihilates `a[p][q]` with the unitary `diag(1, e^{-iφ}) · [[c, s], [-s, c]]`
/// acting on coordinates `p, q`, where `a[p][q] = |a[p][q]| e^{iφ}`.
///
/// `a` is row-major `n × n` Hermitian; rows `p, q` are written as the
/// conjugates of the updated columns so the iterate stays exactly Hermitian.
fn rotate(a: &mut [Cplx], v: &mut [Cplx], n: usize, p: usize, q: usize) {
    let b = a[p * n + q];
    let modulus = b.norm();
    if modulus == 0.0 {
        return;
    }
    let app = a[p * n + p].re;
    let aqq = a[q * n + q].re;
    let phase = b / modulus;

    let theta = (aqq - app) / (2.0 * modulus);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
        sign / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let cs = 1.0 / (t * t + 1.0).sqrt();
    let sn = t * cs;

    let u_qp = -phase.conj() * sn;
    let u_qq = phase.conj() * cs;

    for r in 0..n {
        if r == p || r == q {
            continue;
        }
        let x = a[r * n + p];
        let y = a[r * n + q];
        let new_p = x * cs + y * u_qp;
        let new_q = x * sn + y * u_qq;
        a[r * n + p] = new_p;
        a[r * n + q] = new_q;
        a[p * n + r] = new_p.conj();
        a[q * n + r] = new_q.conj();
    }
    a[p * n + q] = c(0.0, 0.0);
    a[q * n + p] = c(0.0, 0.0);
    a[p * n + p] = c(app - t * modulus, 0.0);
    a[q * n + q] = c(aqq + t * modulus, 0.0);

    for r in 0..n {
        let x = v[r * n + p];
        let y = v[r * n + q];
        v[r * n + p] = x * cs + y * u_qp;
        v[r * n + q] = x * sn + y * u_qq;
    }
}

fn off_diagonal(a: &[Cplx], n: usize) -> f64 {
    let mut acc = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            acc += a[i * n + j].norm_sqr();
        }
    }
    (2.0 * acc).sqrt()
}
