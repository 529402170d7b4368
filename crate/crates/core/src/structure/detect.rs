use crate::block::StructuralPair;
use crate::ellipse::{ellipse_from_trig, Ellipse, EllipseHull, TrigCoefficients};
use crate::linalg::{hermitian_components, hermitian_eigensystem, orthonormal_closure, rayleigh, Cplx, DenseMatrix};

use super::{commutes, is_normal, scalar_defect, DetectorConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct TriDetection {
    pub hull: EllipseHull,
    pub basis: DenseMatrix,
    pub pairs: Vec<(f64, Cplx)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarDcDetection {
    pub hull: EllipseHull,
    pub scalar: Cplx,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NilpotentDetection {
    pub hull: EllipseHull,
    pub subspace: DenseMatrix,
}

/// Centered trig form `|γ|²/2 + h/4 − ½ Re(w e^{-2iθ})` of `λ²`, where `w = γ² + z`.
fn pair_trig(gamma: Cplx, h: f64, z: Cplx) -> TrigCoefficients {
    let w = gamma * gamma + z;
    TrigCoefficients::new(-0.5 * w.re, -0.5 * w.im, 0.5 * gamma.norm_sqr() + 0.25 * h)
}

/// `DC = cI`: one ellipse with full axes `sqrt(‖H‖ + 2|γ|² ± 2|γ² + c|)`.
pub fn detect_scalar_dc(p: &StructuralPair, alpha: Cplx, beta: Cplx, cfg: &DetectorConfig) -> Option<ScalarDcDetection> {
    let (scalar, defect) = scalar_defect(&p.z);
    if defect > cfg.structural * p.z.frobenius_norm().max(1.0) {
        return None;
    }
    let h_norm = hermitian_eigensystem(&p.h).ok()?.max_value();
    let gamma = (alpha - beta) * 0.5;
    let e = ellipse_from_trig(&pair_trig(gamma, h_norm, scalar), (alpha + beta) * 0.5).ok()?;
    Some(ScalarDcDetection {
        hull: EllipseHull::new(vec![e]),
        scalar,
    })
}

/// `Z` normal and commuting with `H`: one ellipse per joint eigenpair `(h_j, z_j)`.
pub fn detect_commuting_normal(p: &StructuralPair, alpha: Cplx, beta: Cplx, cfg: &DetectorConfig) -> Option<TriDetection> {
    if !is_normal(&p.z, cfg.structural) || !commutes(&p.h, &p.z, cfg.structural).ok()? {
        return None;
    }
    let (basis, pairs) = joint_diagonalization(p, cfg.structural)?;
    let gamma = (alpha - beta) * 0.5;
    let center = (alpha + beta) * 0.5;
    let ellipses = pairs
        .iter()
        .map(|&(h, z)| ellipse_from_trig(&pair_trig(gamma, h, z), center).ok())
        .collect::<Option<Vec<Ellipse>>>()?;
    Some(TriDetection {
        hull: EllipseHull::new(ellipses),
        basis,
        pairs,
    })
}

/// Unitary `U` diagonalizing `H`, `Re Z` and `Im Z` at once, with the
/// diagonal pairs `(h_j, z_j)` sorted by `h` descending, then `(Re z, Im z)`
/// descending. Assumes the three commute.
pub fn joint_diagonalization(p: &StructuralPair, tol: f64) -> Option<(DenseMatrix, Vec<(f64, Cplx)>)> {
    let k = p.k();
    let (re_z, im_z) = hermitian_components(&p.z).ok()?;
    let ops = [p.h.clone(), re_z, im_z];
    let mut columns = Vec::with_capacity(k);
    refine(&DenseMatrix::identity(k), &ops, tol, &mut columns)?;

    let mut labeled: Vec<(f64, Cplx, Vec<Cplx>)> = columns
        .into_iter()
        .map(|u| (rayleigh(&p.h, &u).re, rayleigh(&p.z, &u), u))
        .collect();
    labeled.sort_by(|x, y| {
        y.0.total_cmp(&x.0)
            .then(y.1.re.total_cmp(&x.1.re))
            .then(y.1.im.total_cmp(&x.1.im))
    });
    let pairs = labeled.iter().map(|l| (l.0, l.1)).collect();
    let cols: Vec<Vec<Cplx>> = labeled.into_iter().map(|l| l.2).collect();
    Some((DenseMatrix::from_columns(k, &cols), pairs))
}

/// Diagonalizes `ops[0]` compressed to the span of `basis`, then recurses on
/// each eigenvalue cluster with the remaining operators.
fn refine(basis: &DenseMatrix, ops: &[DenseMatrix], tol: f64, out: &mut Vec<Vec<Cplx>>) -> Option<()> {
    let r = basis.cols();
    if ops.is_empty() || r == 1 {
        out.extend(basis.columns());
        return Some(());
    }
    let op = &ops[0];
    let compressed = &(&basis.adjoint() * op) * basis;
    let es = hermitian_eigensystem(&compressed).ok()?;
    let rotated = basis * &es.vectors;
    let cluster_tol = tol * op.frobenius_norm().max(1.0);

    let mut start = 0;
    while start < r {
        let mut end = start + 1;
        while end < r && es.values[end - 1] - es.values[end] <= cluster_tol {
            end += 1;
        }
        let block = rotated.submatrix(0, rotated.rows(), start, end);
        refine(&block, &ops[1..], tol, out)?;
        start = end;
    }
    Some(())
}

/// `Z² = 0` with an `H`-invariant `L` such that `range Z ⊆ L ⊆ ker Z`:
/// one ellipse with full axes `sqrt(μ + 4|γ|²)` and `sqrt(μ)`, where
/// `μ = λ_max(H − 2 Re Z)`, major axis along `γ`.
pub fn detect_nilpotent_invariant(
    p: &StructuralPair,
    alpha: Cplx,
    beta: Cplx,
    cfg: &DetectorConfig,
) -> Option<NilpotentDetection> {
    let z_norm = p.z.frobenius_norm();
    let z2 = &p.z * &p.z;
    if z2.frobenius_norm() > cfg.structural * (z_norm * z_norm).max(1.0) {
        return None;
    }
    let drop_tol = 1e-10 * p.h.frobenius_norm().max(1.0);
    let subspace = orthonormal_closure(&p.z, &p.h, drop_tol);
    let kernel_defect = (&p.z * &subspace).frobenius_norm();
    if kernel_defect > cfg.witness * z_norm.max(1.0) {
        return None;
    }
    let (re_z, _) = hermitian_components(&p.z).ok()?;
    let mu = hermitian_eigensystem(&(&p.h - &re_z.scale_real(2.0))).ok()?.max_value().max(0.0);
    let gamma = (alpha - beta) * 0.5;
    let major = 0.5 * (mu + 4.0 * gamma.norm_sqr()).sqrt();
    let minor = 0.5 * mu.sqrt();
    let angle = if gamma.norm() == 0.0 { 0.0 } else { gamma.arg() };
    Some(NilpotentDetection {
        hull: EllipseHull::new(vec![Ellipse::new((alpha + beta) * 0.5, major, minor, angle)]),
        subspace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::block::structural_matrices;
    use crate::linalg::{c, I};
    use crate::verify::fixtures;
    use std::f64::consts::FRAC_PI_4;

    const O: Cplx = Cplx::new(0.0, 0.0);

    fn cfg() -> DetectorConfig {
        DetectorConfig::default()
    }

    fn pair(h: &[&[f64]], z: DenseMatrix) -> StructuralPair {
        StructuralPair {
            h: DenseMatrix::from_real_rows(h).unwrap(),
            z,
        }
    }

    #[test]
    fn commuting_example_gives_two_axis_aligned_ellipses() {
        let p = structural_matrices(&fixtures::commuting_pair(O, O));
        let hit = detect_commuting_normal(&p, O, O, &cfg()).unwrap();
        assert_eq!(hit.pairs.len(), 2);
        assert!((hit.pairs[0].0 - 22.0).abs() < 1e-12 && (hit.pairs[0].1 - c(2.0, 0.0)).norm() < 1e-12);
        assert!((hit.pairs[1].0 - 5.5).abs() < 1e-12 && (hit.pairs[1].1 - c(0.5, 0.0)).norm() < 1e-12);
        let want = [(6.5f64.sqrt(), 4.5f64.sqrt()), (1.625f64.sqrt(), 1.125f64.sqrt())];
        for (e, (p, q)) in hit.hull.ellipses.iter().zip(want) {
            assert!((e.semi_major - p).abs() < 1e-12);
            assert!((e.semi_minor - q).abs() < 1e-12);
            assert!(e.axis_angle.abs() < 1e-12);
            assert_eq!(e.center, O);
        }
    }

    #[test]
    fn zero_dc_is_always_commuting() {
        let z = DenseMatrix::zeros(2, 2);
        let p = pair(&[&[3.0, 1.0], &[1.0, 2.0]], z);
        let hit = detect_commuting_normal(&p, O, O, &cfg()).unwrap();
        for e in &hit.hull.ellipses {
            assert!((e.semi_major - e.semi_minor).abs() < 1e-12);
        }
    }

    #[test]
    fn non_normal_z_is_rejected() {
        let p = pair(&[&[1.0, 0.0], &[0.0, 1.0]], DenseMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]]).unwrap());
        assert!(detect_commuting_normal(&p, O, O, &cfg()).is_none());
    }

    #[test]
    fn joint_basis_diagonalizes_both() {
        // H has a repeated eigenvalue, so Z must split the eigenspace.
        let h = DenseMatrix::diagonal(&[c(2.0, 0.0), c(2.0, 0.0), c(1.0, 0.0)]);
        let s = 0.5f64.sqrt();
        let u = DenseMatrix::from_rows(&[[c(s, 0.0), c(s, 0.0), O], [c(0.0, s), c(0.0, -s), O], [O, O, c(1.0, 0.0)]]).unwrap();
        let z = &(&u * &DenseMatrix::diagonal(&[I, -I, c(0.5, 0.0)])) * &u.adjoint();
        let p = StructuralPair { h, z };
        let (basis, pairs) = joint_diagonalization(&p, 1e-9).unwrap();
        let hd = &(&basis.adjoint() * &p.h) * &basis;
        let zd = &(&basis.adjoint() * &p.z) * &basis;
        assert!(hd.off_diagonal_norm() + zd.off_diagonal_norm() < 1e-12);
        assert!((pairs[0].1 - I).norm() < 1e-12);
        assert!((pairs[1].1 + I).norm() < 1e-12);
        assert!((pairs[2].0 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn scalar_dc_two_by_two() {
        let p = structural_matrices(&fixtures::two_by_two(O, O, c(2.0, 0.0), c(1.0, 0.0)));
        let hit = detect_scalar_dc(&p, O, O, &cfg()).unwrap();
        let e = hit.hull.ellipses[0];
        assert!((e.semi_major - 1.5).abs() < 1e-14);
        assert!((e.semi_minor - 0.5).abs() < 1e-14);
        assert_eq!(hit.scalar, c(2.0, 0.0));
    }

    #[test]
    fn scalar_dc_zero_product_is_a_circle_when_centered() {
        let p = pair(&[&[3.0, 0.0], &[0.0, 1.0]], DenseMatrix::zeros(2, 2));
        let e = detect_scalar_dc(&p, O, O, &cfg()).unwrap().hull.ellipses[0];
        assert!((e.semi_major - 0.5 * 3f64.sqrt()).abs() < 1e-14);
        assert!((e.semi_minor - e.semi_major).abs() < 1e-14);
    }

    #[test]
    fn scalar_dc_rejects_commuting_example() {
        let p = structural_matrices(&fixtures::commuting_pair(O, O));
        assert!(detect_scalar_dc(&p, O, O, &cfg()).is_none());
    }

    #[test]
    fn nilpotent_example() {
        let mu = (55.0 + 433f64.sqrt()) / 12.0;
        let p = structural_matrices(&fixtures::nilpotent_pair(O, O));
        let hit = detect_nilpotent_invariant(&p, O, O, &cfg()).unwrap();
        assert_eq!(hit.subspace.cols(), 1);
        assert!((hit.subspace[(0, 0)].norm() - 1.0).abs() < 1e-10);
        let e = hit.hull.ellipses[0];
        assert!((e.semi_major - 0.5 * mu.sqrt()).abs() < 1e-12);
        assert!((e.semi_minor - 0.5 * mu.sqrt()).abs() < 1e-12);

        let alpha = c(1.0, 1.0);
        let hit = detect_nilpotent_invariant(&p, alpha, -alpha, &cfg()).unwrap();
        let e = hit.hull.ellipses[0];
        assert!((2.0 * e.semi_major - (mu + 8.0).sqrt()).abs() < 1e-12);
        assert!((2.0 * e.semi_minor - mu.sqrt()).abs() < 1e-12);
        assert!((e.axis_angle - FRAC_PI_4).abs() < 1e-12);
    }

    #[test]
    fn nilpotent_rejects_identity_and_missing_invariance() {
        let p = pair(&[&[1.0, 0.0], &[0.0, 2.0]], DenseMatrix::identity(2));
        assert!(detect_nilpotent_invariant(&p, O, O, &cfg()).is_none());
        // Z² = 0 but H mixes range Z with its complement.
        let p = pair(&[&[1.0, 1.0], &[1.0, 2.0]], DenseMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]]).unwrap());
        assert!(detect_nilpotent_invariant(&p, O, O, &cfg()).is_none());
    }
}
