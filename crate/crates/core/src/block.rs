//! Block matrices `[[αI, C], [D, βI]]` and the spectra of `Im(e^{-iθ}A)`.
//!
//! For `k ≤ n/2` the spectrum of `Im(e^{-iθ}A)` is `Im(e^{-iθ}α)` with
//! multiplicity `n − 2k` plus the `2k` values
//!
//! ```text
//! ½ ( Im(e^{-iθ}(α+β)) ± sqrt( Im(e^{-iθ}(α−β))² + μ_j(θ) ) )
//! ```
//!
//! where `μ_j(θ)` are the eigenvalues of `M(θ) = H − 2 Re(e^{-2iθ} Z)`,
//! `H = C*C + DD*` and `Z = DC`. [`support_value`] uses that route and
//! [`support_value_oracle`] eigensolves the assembled `n × n` matrix.

use crate::error::{Error, Result};
use crate::linalg::{c, cis, hermitian_components, hermitian_eigensystem, Cplx, DenseMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct BlockMatrix {
    alpha: Cplx,
    beta: Cplx,
    c_block: DenseMatrix,
    d_block: DenseMatrix,
}

impl BlockMatrix {
    /// `c_block` is `(n−k)×k` and `d_block` is `k×(n−k)`, both nonempty.
    pub fn new(alpha: Cplx, beta: Cplx, c_block: DenseMatrix, d_block: DenseMatrix) -> Result<Self> {
        if !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::InvalidBlock("alpha and beta must be finite".into()));
        }
        let (m, k) = c_block.shape();
        if m == 0 || k == 0 {
            return Err(Error::InvalidBlock(format!("C block must be nonempty, got {m}x{k}")));
        }
        if d_block.shape() != (k, m) {
            return Err(Error::InvalidBlock(format!(
                "D block must be {k}x{m} to match C ({m}x{k}), got {}x{}",
                d_block.rows(),
                d_block.cols()
            )));
        }
        Ok(Self {
            alpha,
            beta,
            c_block,
            d_block,
        })
    }

    pub fn alpha(&self) -> Cplx {
        self.alpha
    }

    pub fn beta(&self) -> Cplx {
        self.beta
    }

    pub fn c_block(&self) -> &DenseMatrix {
        &self.c_block
    }

    pub fn d_block(&self) -> &DenseMatrix {
        &self.d_block
    }

    /// Total size.
    pub fn n(&self) -> usize {
        self.c_block.rows() + self.c_block.cols()
    }

    /// Size of the lower diagonal block.
    pub fn k(&self) -> usize {
        self.c_block.cols()
    }

    /// `(α − β)/2`, invariant under shifts.
    pub fn gamma(&self) -> Cplx {
        (self.alpha - self.beta) * 0.5
    }

    /// `(α + β)/2`, the center of symmetry of the numerical range.
    pub fn center(&self) -> Cplx {
        (self.alpha + self.beta) * 0.5
    }

    /// The trace-centered matrix `A − ((α+β)/2) I`.
    pub fn centered(&self) -> Self {
        let s = self.center();
        Self {
            alpha: self.alpha - s,
            beta: self.beta - s,
            c_block: self.c_block.clone(),
            d_block: self.d_block.clone(),
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let m = self.c_block.rows();
        let n = self.n();
        DenseMatrix::from_fn_unchecked(n, n, |i, j| match (i < m, j < m) {
            (true, true) => {
                if i == j {
                    self.alpha
                } else {
                    c(0.0, 0.0)
                }
            }
            (true, false) => self.c_block[(i, j - m)],
            (false, true) => self.d_block[(i - m, j)],
            (false, false) => {
                if i == j {
                    self.beta
                } else {
                    c(0.0, 0.0)
                }
            }
        })
    }

    pub fn frobenius_norm(&self) -> f64 {
        let m = self.c_block.rows() as f64;
        let k = self.k() as f64;
        (m * self.alpha.norm_sqr()
            + k * self.beta.norm_sqr()
            + self.c_block.frobenius_norm().powi(2)
            + self.d_block.frobenius_norm().powi(2))
        .sqrt()
    }

    /// `Im(e^{-iθ}A)` assembled as an `n × n` Hermitian matrix.
    pub fn rotated_imaginary_part(&self, theta: f64) -> DenseMatrix {
        let rotated = self.to_dense().scale(cis(-theta));
        hermitian_components(&rotated).expect("square by construction").1
    }
}

/// Applies the permutation similarity that swaps the diagonal blocks when
/// `k > n/2`, so the result always has `k ≤ n/2`. The numerical range is
/// unchanged.
pub fn normalize_orientation(a: &BlockMatrix) -> BlockMatrix {
    if 2 * a.k() > a.n() {
        BlockMatrix {
            alpha: a.beta,
            beta: a.alpha,
            c_block: a.d_block.clone(),
            d_block: a.c_block.clone(),
        }
    } else {
        a.clone()
    }
}

/// `H = C*C + DD*` and `Z = DC`, both `k × k`.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuralPair {
    pub h: DenseMatrix,
    pub z: DenseMatrix,
}

impl StructuralPair {
    pub fn k(&self) -> usize {
        self.h.rows()
    }
}

pub fn structural_matrices(a: &BlockMatrix) -> StructuralPair {
    let cm = &a.c_block;
    let dm = &a.d_block;
    let h = &(&cm.adjoint() * cm) + &(dm * &dm.adjoint());
    let z = dm * cm;
    StructuralPair { h, z }
}

/// `M(θ) = H − 2 Re(e^{-2iθ} Z) = H − e^{-2iθ}Z − e^{2iθ}Z*`.
pub fn m_theta(p: &StructuralPair, theta: f64) -> DenseMatrix {
    let w = cis(-2.0 * theta);
    let k = p.k();
    DenseMatrix::from_fn_unchecked(k, k, |i, j| p.h[(i, j)] - w * p.z[(i, j)] - (w * p.z[(j, i)]).conj())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumAtAngle {
    pub theta: f64,
    /// `Im(e^{-iθ}α)` of the orientation-normalized matrix.
    pub scalar_eigenvalue: f64,
    /// Multiplicity of `scalar_eigenvalue`, `n − 2k`.
    pub scalar_multiplicity: usize,
    /// The `2k` remaining eigenvalues, descending.
    pub paired_eigenvalues: Vec<f64>,
}

impl SpectrumAtAngle {
    pub fn max(&self) -> f64 {
        let paired = self.paired_eigenvalues.first().copied().unwrap_or(f64::NEG_INFINITY);
        if self.scalar_multiplicity > 0 {
            paired.max(self.scalar_eigenvalue)
        } else {
            paired
        }
    }

    /// Full multiset, descending.
    pub fn all(&self) -> Vec<f64> {
        let mut v = self.paired_eigenvalues.clone();
        v.extend(std::iter::repeat(self.scalar_eigenvalue).take(self.scalar_multiplicity));
        v.sort_by(|a, b| b.partial_cmp(a).unwrap());
        v
    }
}

/// Spectrum of `Im(e^{-iθ}A)` through the `k × k` matrix `M(θ)`.
///
/// Inputs with `k > n/2` are orientation-normalized first.
pub fn spectrum_at_angle(a: &BlockMatrix, theta: f64) -> Result<SpectrumAtAngle> {
    let a = normalize_orientation(a);
    let p = structural_matrices(&a);
    spectrum_from_pair(&a, &p, theta)
}

pub(crate) fn spectrum_from_pair(a: &BlockMatrix, p: &StructuralPair, theta: f64) -> Result<SpectrumAtAngle> {
    let rot = cis(-theta);
    let im_sum = (rot * (a.alpha + a.beta)).im;
    let im_diff = (rot * (a.alpha - a.beta)).im;
    let m = m_theta(p, theta);
    let mus = hermitian_eigensystem(&m)?.values;
    let floor = 1e-10 * m.frobenius_norm().max(1.0);

    let mut paired = Vec::with_capacity(2 * mus.len());
    for mu in &mus {
        let disc = im_diff * im_diff + mu;
        if disc < -floor {
            return Err(Error::NegativeDiscriminant { theta, value: disc });
        }
        let root = disc.max(0.0).sqrt();
        paired.push(0.5 * (im_sum + root));
        paired.push(0.5 * (im_sum - root));
    }
    paired.sort_by(|x, y| y.partial_cmp(x).unwrap());
    Ok(SpectrumAtAngle {
        theta,
        scalar_eigenvalue: (rot * a.alpha).im,
        scalar_multiplicity: a.n() - 2 * a.k(),
        paired_eigenvalues: paired,
    })
}

/// `λ_max(Im(e^{-iθ}A))`, the support of `W(A)` in direction `e^{i(θ+π/2)}`.
pub fn support_value(a: &BlockMatrix, theta: f64) -> Result<f64> {
    Ok(spectrum_at_angle(a, theta)?.max())
}

/// Same quantity as [`support_value`], from a direct eigensolve of the
/// assembled `n × n` matrix.
pub fn support_value_oracle(a: &BlockMatrix, theta: f64) -> Result<f64> {
    Ok(hermitian_eigensystem(&a.rotated_imaginary_part(theta))?.max_value())
}

/// Direct spectrum of `Im(e^{-iθ}A)`, descending.
pub fn direct_spectrum(a: &BlockMatrix, theta: f64) -> Result<Vec<f64>> {
    Ok(hermitian_eigensystem(&a.rotated_imaginary_part(theta))?.values)
}
