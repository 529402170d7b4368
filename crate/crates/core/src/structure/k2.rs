//! The `k = 2` criterion.
//!
//! In an orthonormal eigenbasis of `H = diag(h₁, h₂)` write `Z = [z_ij]`
//! with eigenvalues `z₁, z₂`. The eigenvalues of `M(θ)` are
//!
//! ```text
//! μ₁,₂ = ½ (h₁ + h₂ − 2 Re(e^{-2iθ}(z₁₁ + z₂₂)) ± √Δ)
//! Δ    = (h₁ − h₂ − 2 Re(e^{-2iθ}(z₁₁ − z₂₂)))² + 4 |e^{-2iθ}z₁₂ + e^{2iθ} z̄₂₁|²
//! ```
//!
//! and the generating curve is two co-centered ellipses exactly when
//! `√Δ = a cos 2θ + b sin 2θ + c` for a real triple solving
//!
//! ```text
//! a + ib = ±2(z₁ − z₂)
//! (a + ib) c = 2(h₁ − h₂)(z₂₂ − z₁₁)
//! c² = (h₁ − h₂)² + 2|z₂₂ − z₁₁|² + 4|z₁₂|² + 4|z₂₁|² − 2|z₁ − z₂|²
//! ```

use crate::block::StructuralPair;
use crate::ellipse::{ellipse_from_trig, EllipseHull, TrigCoefficients};
use crate::error::{Error, Result};
use crate::linalg::{c, cis, hermitian_eigensystem, vec_norm, Cplx, DenseMatrix};

use super::detect::{detect_commuting_normal, joint_diagonalization};
use super::{commutes, is_normal, is_scalar, Classification, DetectorConfig, Nestedness, StructureReport, Witnesses};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbcTriple {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct K2Data {
    pub h1: f64,
    pub h2: f64,
    /// Orthonormal eigenbasis of `H` as columns; when `H` is scalar, a Schur
    /// basis of `Z` instead, so that `z_entries` is upper triangular.
    pub basis: DenseMatrix,
    /// `Z` expressed in `basis`.
    pub z_entries: DenseMatrix,
    pub z1: Cplx,
    pub z2: Cplx,
    /// `z₁ = z₂` within tolerance; both then hold `tr Z / 2`.
    pub coincident: bool,
    pub abc: Option<AbcTriple>,
}

impl K2Data {
    pub fn from_pair(p: &StructuralPair, cfg: &DetectorConfig) -> Result<Self> {
        if p.k() != 2 {
            return Err(Error::WrongBlockSize(p.k()));
        }
        let (z1, z2, coincident) = ordered_eigenvalues(&p.z, cfg.structural);
        let es = hermitian_eigensystem(&p.h)?;
        let basis = if is_scalar(&p.h, cfg.structural) {
            schur_basis(&p.z, z1)
        } else {
            es.vectors.clone()
        };
        let z_entries = &(&basis.adjoint() * &p.z) * &basis;
        let mut data = Self {
            h1: es.values[0],
            h2: es.values[1],
            basis,
            z_entries,
            z1,
            z2,
            coincident,
            abc: None,
        };
        data.abc = data.solve_abc(cfg.witness);
        Ok(data)
    }

    pub fn z(&self, i: usize, j: usize) -> Cplx {
        self.z_entries[(i, j)]
    }

    /// `max(1, |h₁| + |h₂| + ‖Z‖_F)`.
    pub fn scale(&self) -> f64 {
        (self.h1.abs() + self.h2.abs() + self.z_entries.frobenius_norm()).max(1.0)
    }

    fn z_gap(&self) -> Cplx {
        if self.coincident {
            c(0.0, 0.0)
        } else {
            self.z1 - self.z2
        }
    }

    /// Right-hand side of the `c²` equation.
    pub fn c_squared(&self) -> f64 {
        let dh = self.h1 - self.h2;
        (dh * dh + 2.0 * (self.z(1, 1) - self.z(0, 0)).norm_sqr() + 4.0 * self.z(0, 1).norm_sqr()
            + 4.0 * self.z(1, 0).norm_sqr())
            - 2.0 * self.z_gap().norm_sqr()
    }

    /// Residuals of the three equations for a candidate triple.
    pub fn abc_residuals(&self, t: &AbcTriple) -> [f64; 3] {
        let ab = c(t.a, t.b);
        let d = self.z_gap();
        let dh = self.h1 - self.h2;
        let dz = self.z(1, 1) - self.z(0, 0);
        [
            (ab - 2.0 * d).norm().min((ab + 2.0 * d).norm()),
            (ab * t.c - 2.0 * dh * dz).norm(),
            (t.c * t.c - self.c_squared()).abs(),
        ]
    }

    fn abc_holds(&self, t: &AbcTriple, tol: f64) -> bool {
        let s = self.scale();
        let r = self.abc_residuals(t);
        r[0] <= tol * s && r[1] <= tol * s * s && r[2] <= tol * s * s
    }

    /// Solves the `(a, b, c)` system, normalized to `c ≥ 0`.
    fn solve_abc(&self, tol: f64) -> Option<AbcTriple> {
        let s = self.scale();
        let dh = self.h1 - self.h2;
        let dz = self.z(1, 1) - self.z(0, 0);
        let triple = if self.coincident {
            let c2 = self.c_squared();
            if c2 < -tol * s * s {
                return None;
            }
            AbcTriple {
                a: 0.0,
                b: 0.0,
                c: c2.max(0.0).sqrt(),
            }
        } else {
            let d = self.z1 - self.z2;
            let cc = dh * dz / d;
            let ab = 2.0 * d;
            if cc.re < 0.0 {
                AbcTriple {
                    a: -ab.re,
                    b: -ab.im,
                    c: -cc.re,
                }
            } else {
                AbcTriple {
                    a: ab.re,
                    b: ab.im,
                    c: cc.re,
                }
            }
        };
        self.abc_holds(&triple, tol).then_some(triple)
    }

    /// `√Δ(θ)` from the entries.
    pub fn sqrt_delta(&self, theta: f64) -> f64 {
        let w = cis(-2.0 * theta);
        let diff = (self.h1 - self.h2) - 2.0 * (w * (self.z(0, 0) - self.z(1, 1))).re;
        let off = w * self.z(0, 1) + (w * self.z(1, 0)).conj();
        (diff * diff + 4.0 * off.norm_sqr()).sqrt()
    }

    /// Closed-form `(μ₁, μ₂)` with `μ₁ ≥ μ₂`.
    pub fn closed_form_mus(&self, theta: f64) -> (f64, f64) {
        let w = cis(-2.0 * theta);
        let tr = self.h1 + self.h2 - 2.0 * (w * (self.z(0, 0) + self.z(1, 1))).re;
        let root = self.sqrt_delta(theta);
        (0.5 * (tr + root), 0.5 * (tr - root))
    }

    /// `|LHS − RHS|` and the comparison scale for
    /// `−(h₁ − h₂)² z₁₂z₂₁ / (z₁ − z₂)² = (|z₁₂| + |z₂₁|)²`.
    pub fn case_three_defect(&self) -> Option<(f64, f64)> {
        if self.coincident {
            return None;
        }
        let d = self.z1 - self.z2;
        let dh = self.h1 - self.h2;
        let lhs = -dh * dh * self.z(0, 1) * self.z(1, 0) / (d * d);
        let rhs = (self.z(0, 1).norm() + self.z(1, 0).norm()).powi(2);
        Some(((lhs - rhs).norm(), lhs.norm().max(rhs).max(1.0)))
    }

    /// `z₁₂ z₂₁ / (z₁ − z₂)²`, real and non-positive whenever the
    /// case-three identity holds.
    pub fn off_diagonal_ratio(&self) -> Option<Cplx> {
        (!self.coincident).then(|| {
            let d = self.z1 - self.z2;
            self.z(0, 1) * self.z(1, 0) / (d * d)
        })
    }

    /// Centered `λ²` trig forms of the two branches, `+` first.
    pub fn branch_coefficients(&self, gamma: Cplx) -> Option<[TrigCoefficients; 2]> {
        let t = self.abc?;
        let g2 = gamma * gamma;
        let sz = self.z(0, 0) + self.z(1, 1);
        let branch = |sign: f64| {
            TrigCoefficients::new(
                -0.5 * g2.re + (-2.0 * sz.re + sign * t.a) / 8.0,
                -0.5 * g2.im + (-2.0 * sz.im + sign * t.b) / 8.0,
                0.5 * gamma.norm_sqr() + (self.h1 + self.h2 + sign * t.c) / 8.0,
            )
        };
        Some([branch(1.0), branch(-1.0)])
    }
}

/// Eigenvalues of a 2×2 matrix ordered by modulus, then `(Re, Im)`, both
/// descending. Coincidence is decided on the discriminant, which for a
/// defective matrix is far better conditioned than the gap itself.
fn ordered_eigenvalues(z: &DenseMatrix, tol: f64) -> (Cplx, Cplx, bool) {
    let tr = z[(0, 0)] + z[(1, 1)];
    let disc = (z[(0, 0)] - z[(1, 1)]).powi(2) + 4.0 * z[(0, 1)] * z[(1, 0)];
    let scale = z.frobenius_norm().max(1.0);
    if disc.norm() <= tol * scale * scale {
        return (tr * 0.5, tr * 0.5, true);
    }
    let root = disc.sqrt();
    let (mut z1, mut z2) = ((tr + root) * 0.5, (tr - root) * 0.5);
    let key = |x: Cplx| (x.norm(), x.re, x.im);
    let (k1, k2) = (key(z1), key(z2));
    let swap = k2.0 > k1.0 || (k2.0 == k1.0 && (k2.1 > k1.1 || (k2.1 == k1.1 && k2.2 > k1.2)));
    if swap {
        std::mem::swap(&mut z1, &mut z2);
    }
    (z1, z2, false)
}

/// Unit null vector of a 2×2 matrix, from its larger row; `None` if the
/// matrix vanishes.
fn null_vector(m: [[Cplx; 2]; 2]) -> Option<Vec<Cplx>> {
    let norm0 = m[0][0].norm_sqr() + m[0][1].norm_sqr();
    let norm1 = m[1][0].norm_sqr() + m[1][1].norm_sqr();
    let row = if norm0 >= norm1 { m[0] } else { m[1] };
    let v = vec![row[1], -row[0]];
    let n = vec_norm(&v);
    (n > 0.0).then(|| v.into_iter().map(|x| x / n).collect())
}

fn shifted(z: &DenseMatrix, s: Cplx) -> [[Cplx; 2]; 2] {
    [[z[(0, 0)] - s, z[(0, 1)]], [z[(1, 0)], z[(1, 1)] - s]]
}

/// `[v, v⊥]` with `v` a unit eigenvector of `z` for `z1`.
fn schur_basis(z: &DenseMatrix, z1: Cplx) -> DenseMatrix {
    let v = null_vector(shifted(z, z1)).unwrap_or_else(|| vec![c(1.0, 0.0), c(0.0, 0.0)]);
    let w = vec![-v[1].conj(), v[0].conj()];
    DenseMatrix::from_columns(2, &[v, w])
}

fn eigen_residual(m: &DenseMatrix, v: &[Cplx]) -> f64 {
    let mv = m.mul_vec(v).expect("2x2");
    let lambda: Cplx = mv.iter().zip(v).map(|(a, b)| a * b.conj()).sum();
    let r: Vec<Cplx> = mv.iter().zip(v).map(|(a, b)| a - lambda * b).collect();
    vec_norm(&r)
}

/// A unit eigenvector of `Z` that is also an eigenvector of `H`.
fn common_eigenvector(p: &StructuralPair, z_value: Cplx, tol: f64) -> Option<Vec<Cplx>> {
    let mut candidates = Vec::new();
    if let Some(v) = null_vector(shifted(&p.z, z_value)) {
        candidates.push(v);
    }
    if let Ok(es) = hermitian_eigensystem(&p.h) {
        candidates.push(es.vector(0));
        candidates.push(es.vector(1));
    }
    let z_tol = tol * p.z.frobenius_norm().max(1.0);
    let h_tol = tol * p.h.frobenius_norm();
    candidates
        .into_iter()
        .find(|v| eigen_residual(&p.z, v) <= z_tol && eigen_residual(&p.h, v) <= h_tol)
}

/// Decides which of the three `k = 2` conditions holds, if any, and builds
/// the predicted ellipses from the `(a, b, c)` triple.
pub fn analyze_k2(p: &StructuralPair, alpha: Cplx, beta: Cplx, cfg: &DetectorConfig) -> Result<StructureReport> {
    let data = K2Data::from_pair(p, cfg)?;
    let gamma = (alpha - beta) * 0.5;
    let center = (alpha + beta) * 0.5;
    let mut witnesses = Witnesses::default();

    let classification = if is_normal(&p.z, cfg.structural) && commutes(&p.h, &p.z, cfg.structural)? {
        if let Some((basis, pairs)) = joint_diagonalization(p, cfg.structural) {
            witnesses.eigenbasis = Some(basis);
            witnesses.pairs = pairs;
        }
        Classification::K2CaseI
    } else if let Some(v) = data
        .coincident
        .then(|| common_eigenvector(p, data.z1, cfg.witness))
        .flatten()
    {
        witnesses.common_eigenvector = Some(v);
        Classification::K2CaseII
    } else if data
        .case_three_defect()
        .is_some_and(|(defect, scale)| defect <= cfg.witness * scale)
    {
        Classification::K2CaseIII
    } else {
        Classification::NoneDetected
    };

    let mut notes = Vec::new();
    let predicted = if classification == Classification::NoneDetected {
        None
    } else if let Some(branches) = data.branch_coefficients(gamma) {
        branches
            .iter()
            .map(|t| ellipse_from_trig(t, center))
            .collect::<Result<Vec<_>>>()
            .ok()
            .map(EllipseHull::new)
    } else if classification == Classification::K2CaseI {
        detect_commuting_normal(p, alpha, beta, cfg).map(|t| t.hull)
    } else {
        None
    };

    witnesses.k2 = Some(data);
    let mut report = match predicted {
        Some(hull) => StructureReport {
            classification,
            witnesses,
            predicted: Some(hull),
            nested: None,
            notes: Vec::new(),
        },
        None => {
            if classification != Classification::NoneDetected {
                notes.push(format!("{classification} holds but no consistent (a, b, c) triple was found"));
            }
            StructureReport::none_detected(witnesses)
        }
    };
    report.notes.extend(notes);
    if report.predicted.is_some() {
        report.nested = classify_nestedness(&report).ok();
    }
    Ok(report)
}

/// Nested iff `a² + b² ≤ c²`, i.e. `μ₁ − μ₂` keeps its sign.
pub fn classify_nestedness(report: &StructureReport) -> Result<Nestedness> {
    let data = report.witnesses.k2.as_ref().ok_or(Error::MissingWitness("k = 2 data"))?;
    let t = data.abc.ok_or(Error::MissingWitness("(a, b, c) triple"))?;
    let lhs = t.a * t.a + t.b * t.b;
    let rhs = t.c * t.c;
    Ok(if lhs <= rhs + 1e-9 * (lhs + rhs).max(1.0) {
        Nestedness::Nested
    } else {
        Nestedness::NonNested
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::block::{m_theta, structural_matrices};
    use crate::boundary::grid_angle;
    use crate::ellipse::active_partition;
    use crate::verify::fixtures;
    use std::f64::consts::{FRAC_PI_4, PI};

    const O: Cplx = Cplx::new(0.0, 0.0);

    fn cfg() -> DetectorConfig {
        DetectorConfig::default()
    }

    fn pair(h: [[f64; 2]; 2], z: [[Cplx; 2]; 2]) -> StructuralPair {
        StructuralPair {
            h: DenseMatrix::from_real_rows(&h).unwrap(),
            z: DenseMatrix::from_rows(&z).unwrap(),
        }
    }

    fn r(x: f64) -> Cplx {
        c(x, 0.0)
    }

    #[test]
    fn commuting_example_is_case_one_and_nested() {
        let p = structural_matrices(&fixtures::commuting_pair(O, O));
        let rep = analyze_k2(&p, O, O, &cfg()).unwrap();
        assert_eq!(rep.classification, Classification::K2CaseI);
        assert_eq!(rep.nested, Some(Nestedness::Nested));
        let data = rep.witnesses.k2.as_ref().unwrap();
        assert_eq!((data.h1, data.h2), (22.0, 5.5));
        assert!((data.z1 - r(2.0)).norm() < 1e-14 && (data.z2 - r(0.5)).norm() < 1e-14);
        let t = data.abc.unwrap();
        // (a, b, c) = (2(z₂₂ − z₁₁), 0, h₁ − h₂) up to the overall sign.
        assert!((t.a + 3.0).abs() < 1e-12 && t.b.abs() < 1e-12 && (t.c - 16.5).abs() < 1e-12);
        let hull = rep.predicted.unwrap();
        assert!((hull.ellipses[0].semi_major - 6.5f64.sqrt()).abs() < 1e-12);
        assert!((hull.ellipses[0].semi_minor - 4.5f64.sqrt()).abs() < 1e-12);
        // min μ₁ = 18 exceeds max μ₂ = 6.5
        let lo = (0..720).map(|i| data.closed_form_mus(grid_angle(i, 720)).0).fold(f64::INFINITY, f64::min);
        let hi = (0..720).map(|i| data.closed_form_mus(grid_angle(i, 720)).1).fold(f64::NEG_INFINITY, f64::max);
        assert!((lo - 18.0).abs() < 1e-9 && (hi - 6.5).abs() < 1e-9);
    }

    #[test]
    fn nilpotent_example_is_case_two() {
        let p = structural_matrices(&fixtures::nilpotent_pair(O, O));
        let rep = analyze_k2(&p, O, O, &cfg()).unwrap();
        assert_eq!(rep.classification, Classification::K2CaseII);
        assert_eq!(rep.nested, Some(Nestedness::Nested));
        let data = rep.witnesses.k2.as_ref().unwrap();
        assert!(data.coincident && data.z1.norm() < 1e-15);
        let v = rep.witnesses.common_eigenvector.unwrap();
        assert!((v[0].norm() - 1.0).abs() < 1e-12);
        assert!(eigen_residual(&p.h, &v) <= 1e-8 * p.h.frobenius_norm());
    }

    #[test]
    fn defective_counterexample_is_not_detected() {
        let p = pair([[1.0, 0.0], [0.0, 2.0]], [[r(2.0), r(1.0)], [r(-1.0), r(0.0)]]);
        let rep = analyze_k2(&p, O, O, &cfg()).unwrap();
        assert_eq!(rep.classification, Classification::NoneDetected);
        assert!(rep.predicted.is_none());
        let data = rep.witnesses.k2.unwrap();
        assert!(data.coincident);
        assert!(data.abc.is_none());
    }

    #[test]
    fn perpendicular_segments_are_non_nested() {
        let p = pair([[4.0, 0.0], [0.0, 4.0]], [[c(0.0, -2.0), O], [O, c(0.0, 2.0)]]);
        let rep = analyze_k2(&p, O, O, &cfg()).unwrap();
        assert_eq!(rep.classification, Classification::K2CaseI);
        assert_eq!(rep.nested, Some(Nestedness::NonNested));
        let hull = rep.predicted.unwrap();
        let mut angles: Vec<f64> = hull.ellipses.iter().map(|e| e.axis_angle).collect();
        angles.sort_by(f64::total_cmp);
        assert!((angles[0] - FRAC_PI_4).abs() < 1e-12);
        assert!((angles[1] - 3.0 * FRAC_PI_4).abs() < 1e-12);
        for e in &hull.ellipses {
            assert!((e.semi_major - 2f64.sqrt()).abs() < 1e-12);
            assert!(e.semi_minor < 1e-7);
        }
        assert_eq!(active_partition(&hull, 720).unwrap().flat_portions(), 4);
    }

    #[test]
    fn wrong_block_size() {
        let p = StructuralPair {
            h: DenseMatrix::identity(3),
            z: DenseMatrix::zeros(3, 3),
        };
        assert_eq!(analyze_k2(&p, O, O, &cfg()).unwrap_err(), Error::WrongBlockSize(3));
    }

    #[test]
    fn nestedness_needs_the_triple() {
        let rep = StructureReport::none_detected(Witnesses::default());
        assert!(matches!(classify_nestedness(&rep), Err(Error::MissingWitness(_))));
    }

    #[test]
    fn case_three_instance() {
        // With z₁₁ = 1, z₂₂ = 0, z₁₂ = q, z₂₁ = −q (q real), the identity
        // reads (h₁−h₂)² q² / (1 − 4q²) = 4q², i.e. (h₁−h₂)² = 4 − 16q².
        // The common shift of H keeps M(θ) positive.
        let q = 0.25;
        let dh = (4.0f64 - 16.0 * q * q).sqrt();
        let p = pair([[dh + 5.0, 0.0], [0.0, 5.0]], [[r(1.0), r(q)], [r(-q), r(0.0)]]);
        let rep = analyze_k2(&p, O, O, &cfg()).unwrap();
        assert_eq!(rep.classification, Classification::K2CaseIII);
        assert_eq!(rep.nested, Some(Nestedness::Nested));
        let data = rep.witnesses.k2.unwrap();
        let ratio = data.off_diagonal_ratio().unwrap();
        assert!(ratio.re <= 1e-8 && ratio.im.abs() <= 1e-8);
        let t = data.abc.unwrap();
        for i in 0..720 {
            let th = grid_angle(i, 720);
            let trig = t.a * (2.0 * th).cos() + t.b * (2.0 * th).sin() + t.c;
            assert!((data.sqrt_delta(th) - trig.abs()).abs() < 1e-8);
        }
    }

    #[test]
    fn closed_form_matches_direct_eigensolve() {
        let p = pair([[3.0, 0.5], [0.5, 1.0]], [[c(1.0, 0.5), c(-0.3, 0.2)], [c(0.7, 0.0), c(0.0, -1.0)]]);
        let data = K2Data::from_pair(&p, &cfg()).unwrap();
        for i in 0..64 {
            let th = PI * i as f64 / 32.0;
            let (m1, m2) = data.closed_form_mus(th);
            let direct = hermitian_eigensystem(&m_theta(&p, th)).unwrap().values;
            assert!((m1 - direct[0]).abs() < 1e-12 && (m2 - direct[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn eigenvalue_ordering_is_by_modulus() {
        let z = DenseMatrix::diagonal(&[r(0.5), c(0.0, -2.0)]);
        let (z1, z2, co) = ordered_eigenvalues(&z, 1e-9);
        assert!(!co);
        assert!((z1 - c(0.0, -2.0)).norm() < 1e-15 && (z2 - r(0.5)).norm() < 1e-15);
        let (z1, z2, _) = ordered_eigenvalues(&DenseMatrix::diagonal(&[r(-1.0), r(1.0)]), 1e-9);
        assert_eq!((z1, z2), (r(1.0), r(-1.0)));
    }
}
