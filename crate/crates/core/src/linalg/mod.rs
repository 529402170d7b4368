//! Dense complex matrices sized for the small blocks this crate works with.
//!
//! Storage is row-major. Every public constructor rejects NaN and infinite
//! entries, so downstream tolerances can assume finite arithmetic.

mod eigen;
mod krylov;

pub use eigen::{hermitian_eigensystem, EigenSystem, MAX_SWEEPS};
pub use krylov::{orthonormal_closure, DEFAULT_DROP_TOL};

use std::fmt;
use std::ops::{Add, Index, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex scalar used throughout the crate.
pub type Cplx = Complex64;

pub const I: Cplx = Cplx::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> Cplx {
    Cplx::new(re, im)
}

/// `e^{i t}`.
#[inline]
pub fn cis(t: f64) -> Cplx {
    Cplx::from_polar(1.0, t)
}

#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Cplx>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Cplx>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::EntryCount {
                expected: rows * cols,
                got: entries.len(),
            });
        }
        if let Some(pos) = entries.iter().position(|z| !z.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / cols.max(1),
                col: pos % cols.max(1),
            });
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    /// Builds a matrix from row slices. All rows must share one length.
    pub fn from_rows<R: AsRef<[Cplx]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::EntryCount {
                    expected: cols,
                    got: r.len(),
                });
            }
            entries.extend_from_slice(r);
        }
        Self::new(rows.len(), cols, entries)
    }

    /// Real-valued convenience constructor.
    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let complex: Vec<Vec<Cplx>> = rows
            .iter()
            .map(|r| r.as_ref().iter().map(|&x| c(x, 0.0)).collect())
            .collect();
        Self::from_rows(&complex)
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> Cplx) -> Result<Self> {
        let m = Self::from_fn_unchecked(rows, cols, f);
        Self::new(m.rows, m.cols, m.entries)
    }

    pub(crate) fn from_fn_unchecked(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Cplx,
    ) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self {
            rows,
            cols,
            entries,
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Cplx::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn_unchecked(n, n, |i, j| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) })
    }

    pub fn diagonal(values: &[Cplx]) -> Self {
        let n = values.len();
        Self::from_fn_unchecked(n, n, |i, j| if i == j { values[i] } else { c(0.0, 0.0) })
    }

    pub fn from_columns(rows: usize, columns: &[Vec<Cplx>]) -> Self {
        debug_assert!(columns.iter().all(|col| col.len() == rows));
        Self::from_fn_unchecked(rows, columns.len(), |i, j| columns[j][i])
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Cplx] {
        &self.entries
    }

    pub fn column(&self, j: usize) -> Vec<Cplx> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Cplx>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn row(&self, i: usize) -> &[Cplx] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn_unchecked(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn_unchecked(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                op: "matmul",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self[(i, l)];
                if a == Cplx::new(0.0, 0.0) {
                    continue;
                }
                let orow = other.row(l);
                let dst = &mut out.entries[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[Cplx]) -> Result<Vec<Cplx>> {
        if self.cols != x.len() {
            return Err(Error::DimensionMismatch {
                op: "mul_vec",
                left: self.shape(),
                right: (x.len(), 1),
            });
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "add", |a, b| a + b)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "sub", |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, op: &'static str, f: impl Fn(Cplx, Cplx) -> Cplx) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch {
                op,
                left: self.shape(),
                right: other.shape(),
            });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn scale(&self, s: Cplx) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(c(s, 0.0))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> Cplx {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// `‖M − M*‖_F`, zero exactly for Hermitian input.
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut acc = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                acc += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// Frobenius norm of the strictly off-diagonal part.
    pub fn off_diagonal_norm(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                if i != j {
                    acc += self[(i, j)].norm_sqr();
                }
            }
        }
        acc.sqrt()
    }

    /// Rows `r0..r1`, columns `c0..c1`.
    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        Self::from_fn_unchecked(r1 - r0, c1 - c0, |i, j| self[(r0 + i, c0 + j)])
    }

    /// Maximum entrywise modulus of `self − other`; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.shape() != other.shape() {
            return f64::INFINITY;
        }
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = Cplx;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Cplx {
        debug_assert!(i < self.rows && j < self.cols);
        &self.entries[i * self.cols + j]
    }
}

impl Mul for &DenseMatrix {
    type Output = DenseMatrix;

    /// Panics on incompatible shapes; use [`DenseMatrix::matmul`] to get an error instead.
    fn mul(self, rhs: &DenseMatrix) -> DenseMatrix {
        self.matmul(rhs).expect("matrix product shape mismatch")
    }
}

impl Add for &DenseMatrix {
    type Output = DenseMatrix;

    fn add(self, rhs: &DenseMatrix) -> DenseMatrix {
        self.try_add(rhs).expect("matrix sum shape mismatch")
    }
}

impl Sub for &DenseMatrix {
    type Output = DenseMatrix;

    fn sub(self, rhs: &DenseMatrix) -> DenseMatrix {
        self.try_sub(rhs).expect("matrix difference shape mismatch")
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:>10.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

pub fn adjoint(m: &DenseMatrix) -> DenseMatrix {
    m.adjoint()
}

pub fn matmul(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    a.matmul(b)
}

/// Splits a square matrix into `(Re X, Im X)` with `Re X = (X + X*)/2` and
/// `Im X = (X − X*)/(2i)`, so that `X = Re X + i Im X`.
pub fn hermitian_components(x: &DenseMatrix) -> Result<(DenseMatrix, DenseMatrix)> {
    if !x.is_square() {
        return Err(Error::NotSquare {
            rows: x.rows(),
            cols: x.cols(),
        });
    }
    let n = x.rows();
    let re = DenseMatrix::from_fn_unchecked(n, n, |i, j| (x[(i, j)] + x[(j, i)].conj()) * 0.5);
    let im = DenseMatrix::from_fn_unchecked(n, n, |i, j| {
        (x[(i, j)] - x[(j, i)].conj()) / c(0.0, 2.0)
    });
    Ok((re, im))
}

/// `⟨x, y⟩ = y* x`, linear in the first argument.
pub fn inner(x: &[Cplx], y: &[Cplx]) -> Cplx {
    x.iter().zip(y).map(|(a, b)| a * b.conj()).sum()
}

pub fn vec_norm(x: &[Cplx]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `x* M x` for a column vector `x`.
pub fn rayleigh(m: &DenseMatrix, x: &[Cplx]) -> Cplx {
    let mx = m.mul_vec(x).expect("rayleigh: shape mismatch");
    inner(&mx, x)
}

/// Solves the square system `a x = b` by Gaussian elimination with partial
/// pivoting. Returns `None` when a pivot falls below `1e-13` of the largest
/// entry.
pub fn solve_linear(a: &DenseMatrix, b: &[Cplx]) -> Option<Vec<Cplx>> {
    let n = a.rows();
    if !a.is_square() || b.len() != n {
        return None;
    }
    let scale = a.entries().iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return None;
    }
    let mut m: Vec<Vec<Cplx>> = (0..n).map(|i| a.row(i).to_vec()).collect();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| m[i][col].norm().total_cmp(&m[j][col].norm()))?;
        if m[pivot][col].norm() <= 1e-13 * scale {
            return None;
        }
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in (col + 1)..n {
            let f = m[row][col] / m[col][col];
            for j in col..n {
                let v = m[col][j];
                m[row][j] -= f * v;
            }
            let v = rhs[col];
            rhs[row] -= f * v;
        }
    }
    let mut x = vec![c(0.0, 0.0); n];
    for row in (0..n).rev() {
        let tail: Cplx = ((row + 1)..n).map(|j| m[row][j] * x[j]).sum();
        x[row] = (rhs[row] - tail) / m[row][row];
    }
    Some(x)
}

/// Minimum-norm solution of the underdetermined system `a x = b`, where
/// `a` has full row rank: `x = a* (a a*)⁻¹ b`.
pub fn min_norm_solution(a: &DenseMatrix, b: &[Cplx]) -> Option<Vec<Cplx>> {
    let gram = a * &a.adjoint();
    let y = solve_linear(&gram, b)?;
    a.adjoint().mul_vec(&y).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: &[&[f64]]) -> DenseMatrix {
        DenseMatrix::from_real_rows(rows).unwrap()
    }

    #[test]
    fn adjoint_of_scalar_conjugates() {
        let x = DenseMatrix::from_rows(&[[I]]).unwrap();
        assert_eq!(x.adjoint()[(0, 0)], -I);
    }

    #[test]
    fn adjoint_of_identity_and_real_transpose() {
        assert_eq!(DenseMatrix::identity(2).adjoint(), DenseMatrix::identity(2));
        let x = m(&[&[0.0, 2.0], &[1.0, 0.0]]);
        assert_eq!(x.adjoint(), m(&[&[0.0, 1.0], &[2.0, 0.0]]));
    }

    #[test]
    fn products_of_the_commuting_example_blocks() {
        let cm = m(&[&[4.0, -0.5], &[-2.0, 0.5]]);
        let dm = m(&[&[1.0, 1.0], &[1.0, 2.0]]);
        let dc = &dm * &cm;
        assert!(dc.max_abs_diff(&m(&[&[2.0, 0.0], &[0.0, 0.5]])) < 1e-15);
        let cd = &cm * &dm;
        assert!(cd.max_abs_diff(&m(&[&[3.5, 3.0], &[-1.5, -1.0]])) < 1e-15);
        assert_eq!(&cd * &DenseMatrix::identity(2), cd);
    }

    #[test]
    fn matmul_rejects_bad_shapes() {
        let a = DenseMatrix::zeros(2, 3);
        let b = DenseMatrix::zeros(2, 3);
        assert!(matches!(a.matmul(&b), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn hermitian_components_of_a_real_nonsymmetric_matrix() {
        let x = m(&[&[0.0, 2.0], &[1.0, 0.0]]);
        let (re, im) = hermitian_components(&x).unwrap();
        assert!(re.max_abs_diff(&m(&[&[0.0, 1.5], &[1.5, 0.0]])) < 1e-15);
        let expected = DenseMatrix::from_rows(&[[c(0.0, 0.0), c(0.0, -0.5)], [c(0.0, 0.5), c(0.0, 0.0)]]).unwrap();
        assert!(im.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn hermitian_components_of_hermitian_and_skew_inputs() {
        let h = DenseMatrix::from_rows(&[[c(2.0, 0.0), c(1.0, -1.0)], [c(1.0, 1.0), c(-3.0, 0.0)]]).unwrap();
        let (re, im) = hermitian_components(&h).unwrap();
        assert_eq!(re, h);
        assert_eq!(im.frobenius_norm(), 0.0);

        let s = h.scale(I);
        let (re, im) = hermitian_components(&s).unwrap();
        assert!(re.frobenius_norm() < 1e-15);
        assert!(im.max_abs_diff(&h) < 1e-15);
    }

    #[test]
    fn hermitian_components_requires_square() {
        assert!(matches!(
            hermitian_components(&DenseMatrix::zeros(2, 3)),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn construction_rejects_non_finite() {
        let err = DenseMatrix::new(1, 2, vec![c(0.0, 0.0), c(f64::NAN, 0.0)]).unwrap_err();
        assert_eq!(err, Error::NonFinite { row: 0, col: 1 });
        assert!(DenseMatrix::from_rows(&[[c(f64::INFINITY, 0.0)]]).is_err());
        assert!(DenseMatrix::new(2, 2, vec![c(0.0, 0.0)]).is_err());
    }

    fn arb_matrix() -> impl Strategy<Value = DenseMatrix> {
        (1usize..5, 1usize..5).prop_flat_map(|(r, k)| {
            prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), r * k)
                .prop_map(move |v| DenseMatrix::new(r, k, v.into_iter().map(|(a, b)| c(a, b)).collect()).unwrap())
        })
    }

    proptest! {
        #[test]
        fn adjoint_is_an_involution(x in arb_matrix()) {
            prop_assert_eq!(x.adjoint().adjoint(), x);
        }

        #[test]
        fn hermitian_components_reassemble(x in arb_matrix()) {
            prop_assume!(x.is_square());
            let (re, im) = hermitian_components(&x).unwrap();
            prop_assert!(re.hermitian_defect() < 1e-15);
            prop_assert!(im.hermitian_defect() < 1e-15);
            let back = &re + &im.scale(I);
            prop_assert!(back.max_abs_diff(&x) < 1e-15);
        }

        #[test]
        fn min_norm_solution_solves_wide_systems(x in arb_matrix(), rhs in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 4)) {
            prop_assume!(x.rows() < x.cols());
            let b: Vec<Cplx> = rhs.iter().take(x.rows()).map(|&(r, i)| c(r, i)).collect();
            if let Some(sol) = min_norm_solution(&x, &b) {
                let back = x.mul_vec(&sol).unwrap();
                for (u, v) in back.iter().zip(&b) {
                    prop_assert!((u - v).norm() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn solve_linear_small_systems() {
        let a = DenseMatrix::from_rows(&[[c(0.0, 0.0), c(1.0, 0.0)], [c(2.0, 0.0), I]]).unwrap();
        let x = solve_linear(&a, &[c(3.0, 0.0), c(1.0, 1.0)]).unwrap();
        assert!((x[1] - c(3.0, 0.0)).norm() < 1e-15);
        assert!((x[0] - c(0.5, -1.0)).norm() < 1e-15);
        assert!(solve_linear(&DenseMatrix::zeros(2, 2), &[c(1.0, 0.0); 2]).is_none());
        let singular = m(&[&[1.0, 2.0], &[2.0, 4.0]]);
        assert!(solve_linear(&singular, &[c(1.0, 0.0); 2]).is_none());
    }
}
