//! Structural criteria on `(H, Z)` and the closed-form ellipses they imply.
//!
//! [`predict_numerical_range`] runs the detectors in the order
//! scalar `DC`, commuting normal pair, nilpotent with invariant subspace,
//! and finally the `k = 2` analysis. The first detector that applies fills
//! in the prediction.

mod detect;
mod k2;

pub use detect::{
    detect_nilpotent_invariant, detect_scalar_dc, detect_commuting_normal, joint_diagonalization, NilpotentDetection,
    ScalarDcDetection, TriDetection,
};
pub use k2::{analyze_k2, classify_nestedness, AbcTriple, K2Data};

use std::fmt;

use crate::block::{normalize_orientation, spectrum_from_pair, structural_matrices, BlockMatrix, StructuralPair};
use crate::boundary::{grid_angle, DEFAULT_SAMPLES};
use crate::ellipse::{active_partition, hull_support, EllipseHull};
use crate::error::{Error, Result};
use crate::linalg::{Cplx, DenseMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    TheoremTri,
    ScalarDC,
    EssentiallyHermitianPair,
    NilpotentInvariant,
    K2CaseI,
    K2CaseII,
    K2CaseIII,
    NoneDetected,
}

impl Classification {
    pub fn name(self) -> &'static str {
        match self {
            Self::TheoremTri => "TheoremTri",
            Self::ScalarDC => "ScalarDC",
            Self::EssentiallyHermitianPair => "EssentiallyHermitianPair",
            Self::NilpotentInvariant => "NilpotentInvariant",
            Self::K2CaseI => "K2_CaseI",
            Self::K2CaseII => "K2_CaseII",
            Self::K2CaseIII => "K2_CaseIII",
            Self::NoneDetected => "NoneDetected",
        }
    }

    pub fn is_k2_case(self) -> bool {
        matches!(self, Self::K2CaseI | Self::K2CaseII | Self::K2CaseIII)
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Nestedness {
    Nested,
    NonNested,
}

impl Nestedness {
    pub fn name(self) -> &'static str {
        match self {
            Self::Nested => "Nested",
            Self::NonNested => "NonNested",
        }
    }
}

impl fmt::Display for Nestedness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Evidence backing a classification. Only the fields relevant to the
/// detected case are populated.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Witnesses {
    /// Simultaneous unitary eigenbasis of `H` and `Z`, as columns.
    pub eigenbasis: Option<DenseMatrix>,
    /// Eigenvalue pairs `(h_j, z_j)` sharing an eigenvector.
    pub pairs: Vec<(f64, Cplx)>,
    /// `c` with `DC = cI`.
    pub scalar: Option<Cplx>,
    /// Orthonormal basis of an `H`-invariant `L` with `range Z ⊆ L ⊆ ker Z`.
    pub subspace: Option<DenseMatrix>,
    /// Unit eigenvector shared by `Z` and `H`.
    pub common_eigenvector: Option<Vec<Cplx>>,
    pub k2: Option<K2Data>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StructureReport {
    pub classification: Classification,
    pub witnesses: Witnesses,
    pub predicted: Option<EllipseHull>,
    pub nested: Option<Nestedness>,
    pub notes: Vec<String>,
}

impl StructureReport {
    pub fn none_detected(witnesses: Witnesses) -> Self {
        Self {
            classification: Classification::NoneDetected,
            witnesses,
            predicted: None,
            nested: None,
            notes: Vec::new(),
        }
    }
}

/// Tolerances shared by the detectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorConfig {
    /// Relative tolerance for normality, commutation, scalar and nilpotent tests.
    pub structural: f64,
    /// Relative tolerance for witness residuals and the closed-form equations.
    pub witness: f64,
    /// Predictions whose support deviates from the eigenvalue formula by more
    /// than this (relative to `1 + ‖A‖_F`) are demoted.
    pub safety_net: f64,
    pub safety_samples: usize,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            structural: 1e-9,
            witness: 1e-8,
            safety_net: 1e-6,
            safety_samples: DEFAULT_SAMPLES,
        }
    }
}

/// `‖Z*Z − ZZ*‖_F ≤ tol · max(1, ‖Z‖_F²)`.
pub fn is_normal(z: &DenseMatrix, tol: f64) -> bool {
    if !z.is_square() {
        return false;
    }
    let zs = z.adjoint();
    let comm = &(&zs * z) - &(z * &zs);
    comm.frobenius_norm() <= tol * z.frobenius_norm().powi(2).max(1.0)
}

/// `‖XY − YX‖_F ≤ tol · max(1, ‖X‖_F ‖Y‖_F)`.
pub fn commutes(x: &DenseMatrix, y: &DenseMatrix, tol: f64) -> Result<bool> {
    if !x.is_square() || x.shape() != y.shape() {
        return Err(Error::DimensionMismatch {
            op: "commutes",
            left: x.shape(),
            right: y.shape(),
        });
    }
    let comm = x.matmul(y)?.try_sub(&y.matmul(x)?)?;
    Ok(comm.frobenius_norm() <= tol * (x.frobenius_norm() * y.frobenius_norm()).max(1.0))
}

/// `X − (tr X / k) I`, the traceless part.
pub(crate) fn scalar_defect(x: &DenseMatrix) -> (Cplx, f64) {
    let k = x.rows();
    let mean = x.trace() / k as f64;
    let mut off = 0.0;
    for i in 0..k {
        for j in 0..k {
            let target = if i == j { mean } else { Cplx::new(0.0, 0.0) };
            off += (x[(i, j)] - target).norm_sqr();
        }
    }
    (mean, off.sqrt())
}

pub(crate) fn is_scalar(x: &DenseMatrix, tol: f64) -> bool {
    scalar_defect(x).1 <= tol * x.frobenius_norm().max(1.0)
}

/// Whether the points lie on one line through the complex plane.
pub(crate) fn collinear(points: &[Cplx], tol: f64) -> bool {
    let Some(&first) = points.first() else {
        return true;
    };
    let scale = points.iter().map(|p| p.norm()).fold(1.0, f64::max);
    let far = points
        .iter()
        .copied()
        .max_by(|a, b| (a - first).norm().total_cmp(&(b - first).norm()))
        .unwrap();
    let dir = far - first;
    if dir.norm() <= tol * scale {
        return true;
    }
    let unit = dir / dir.norm();
    points.iter().all(|p| ((p - first) * unit.conj()).im.abs() <= tol * scale)
}

/// Classifies `a` and predicts `W(a)` as a hull of co-centered ellipses
/// when one of the structural criteria holds.
pub fn predict_numerical_range(a: &BlockMatrix) -> StructureReport {
    predict_with(a, &DetectorConfig::default())
}

pub fn predict_with(a: &BlockMatrix, cfg: &DetectorConfig) -> StructureReport {
    let a = normalize_orientation(a);
    let pair = structural_matrices(&a);
    let (alpha, beta) = (a.alpha(), a.beta());
    let k2 = (pair.k() == 2).then(|| analyze_k2(&pair, alpha, beta, cfg).expect("k = 2"));

    let mut report = if let Some(hit) = detect_scalar_dc(&pair, alpha, beta, cfg) {
        StructureReport {
            classification: Classification::ScalarDC,
            witnesses: Witnesses {
                scalar: Some(hit.scalar),
                ..Witnesses::default()
            },
            predicted: Some(hit.hull),
            nested: None,
            notes: Vec::new(),
        }
    } else if let Some(hit) = detect_commuting_normal(&pair, alpha, beta, cfg) {
        let zs: Vec<Cplx> = hit.pairs.iter().map(|p| p.1).collect();
        let essentially_hermitian = is_scalar(&pair.h, cfg.structural) && collinear(&zs, cfg.structural);
        StructureReport {
            classification: if essentially_hermitian {
                Classification::EssentiallyHermitianPair
            } else {
                Classification::TheoremTri
            },
            witnesses: Witnesses {
                eigenbasis: Some(hit.basis),
                pairs: hit.pairs,
                ..Witnesses::default()
            },
            predicted: Some(hit.hull),
            nested: essentially_hermitian.then_some(Nestedness::NonNested),
            notes: Vec::new(),
        }
    } else if let Some(hit) = detect_nilpotent_invariant(&pair, alpha, beta, cfg) {
        StructureReport {
            classification: Classification::NilpotentInvariant,
            witnesses: Witnesses {
                subspace: Some(hit.subspace),
                ..Witnesses::default()
            },
            predicted: Some(hit.hull),
            nested: None,
            notes: Vec::new(),
        }
    } else if let Some(r) = k2.clone() {
        r
    } else {
        StructureReport::none_detected(Witnesses::default())
    };

    if let Some(r) = k2 {
        report.witnesses.k2 = r.witnesses.k2;
        if report.witnesses.common_eigenvector.is_none() {
            report.witnesses.common_eigenvector = r.witnesses.common_eigenvector;
        }
    }

    if let Some(hull) = report.predicted.as_mut() {
        if 2 * a.k() < a.n() {
            hull.isolated_points.push(alpha);
        }
    }

    if let Some(hull) = &report.predicted {
        let dev = formula_deviation(&a, &pair, hull, cfg.safety_samples);
        let bound = cfg.safety_net * (1.0 + a.frobenius_norm());
        if !(dev <= bound) {
            let mut demoted = StructureReport::none_detected(report.witnesses.clone());
            demoted.notes.push(format!(
                "{} prediction demoted: support deviation {dev:.3e} exceeds {bound:.3e}",
                report.classification
            ));
            return demoted;
        }
    }

    if report.predicted.is_some() {
        report.nested = match classify_nestedness(&report) {
            Ok(n) => Some(n),
            Err(_) => report.nested.or_else(|| {
                let hull = report.predicted.as_ref().unwrap();
                active_partition(hull, cfg.safety_samples)
                    .ok()
                    .map(|p| if p.active_count() <= 1 { Nestedness::Nested } else { Nestedness::NonNested })
            }),
        };
    }
    report
}

/// Largest gap between the predicted hull support and the eigenvalue-formula
/// support over a uniform grid.
fn formula_deviation(a: &BlockMatrix, pair: &StructuralPair, hull: &EllipseHull, samples: usize) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..samples {
        let theta = grid_angle(i, samples);
        let Ok(spec) = spectrum_from_pair(a, pair, theta) else {
            return f64::INFINITY;
        };
        let Ok(h) = hull_support(hull, theta) else {
            return f64::INFINITY;
        };
        worst = worst.max((h - spec.max()).abs());
    }
    worst
}
