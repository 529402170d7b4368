//! Seeded property suites, one per end-to-end check.

use crate::block::{normalize_orientation, structural_matrices, BlockMatrix};
use crate::linalg::{c, hermitian_eigensystem, Cplx, DenseMatrix};
use crate::structure::{
    analyze_k2, detect_nilpotent_invariant, predict_numerical_range, Classification, DetectorConfig, Nestedness,
};

use super::generators::{self, seeded, Family};
use super::{
    check_central_symmetry, check_eigenvalue_formula, check_k2_closed_form, fixtures, full_circle_trig_residual,
    nestedness_oracle, verify_prediction, DEFAULT_TOL,
};

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub label: &'static str,
    pub passed: bool,
    pub summary: String,
}

impl Outcome {
    fn new(label: &'static str, passed: bool, summary: String) -> Self {
        Self { label, passed, summary }
    }
}

/// Instance counts for the randomized suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteSizes {
    pub two_by_two: usize,
    pub spectra: usize,
    pub spectra_angles: usize,
    pub k2_pairs: usize,
    pub per_family: usize,
    pub hermitian: usize,
}

impl SuiteSizes {
    pub fn full() -> Self {
        Self {
            two_by_two: 1000,
            spectra: 500,
            spectra_angles: 64,
            k2_pairs: 1000,
            per_family: 200,
            hermitian: 1000,
        }
    }

    pub fn quick() -> Self {
        Self {
            two_by_two: 100,
            spectra: 50,
            spectra_angles: 64,
            k2_pairs: 100,
            per_family: 20,
            hermitian: 100,
        }
    }
}

const SAMPLES: usize = 720;

fn close(a: &DenseMatrix, b: &DenseMatrix, tol: f64) -> bool {
    a.shape() == b.shape() && a.max_abs_diff(b) <= tol
}

fn real(rows: &[&[f64]]) -> DenseMatrix {
    DenseMatrix::from_real_rows(rows).unwrap()
}

pub fn golden_commuting_products() -> Outcome {
    let a = fixtures::commuting_pair(c(0.0, 0.0), c(0.0, 0.0));
    let dc = a.d_block() * a.c_block();
    let cd = a.c_block() * a.d_block();
    let cds = cd.adjoint();
    let comm = &(&cds * &cd) - &(&cd * &cds);
    let h = structural_matrices(&a).h;
    let checks = [
        ("DC", close(&dc, &real(&[&[2.0, 0.0], &[0.0, 0.5]]), 1e-12)),
        ("CD", close(&cd, &real(&[&[3.5, 3.0], &[-1.5, -1.0]]), 1e-12)),
        ("commutator", close(&comm, &real(&[&[-6.75, 20.25], &[20.25, 6.75]]), 1e-12)),
        ("H", close(&h, &real(&[&[22.0, 0.0], &[0.0, 5.5]]), 1e-12)),
    ];
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    Outcome::new(
        "commuting pair structural matrices",
        failed.is_empty(),
        if failed.is_empty() {
            "DC, CD, commutator and H within 1e-12".into()
        } else {
            format!("mismatch in {}", failed.join(", "))
        },
    )
}

pub fn golden_nilpotent_structure() -> Outcome {
    let a = fixtures::nilpotent_pair(c(0.0, 0.0), c(0.0, 0.0));
    let p = structural_matrices(&a);
    let z_ok = close(&p.z, &real(&[&[0.0, 1.0], &[0.0, 0.0]]), 1e-12);
    let h_ok = close(&p.h, &real(&[&[19.0 / 6.0, 0.0], &[0.0, 6.0]]), 1e-12);
    let hit = detect_nilpotent_invariant(&p, a.alpha(), a.beta(), &DetectorConfig::default());
    let overlap = hit
        .as_ref()
        .filter(|h| h.subspace.cols() == 1)
        .map(|h| h.subspace[(0, 0)].norm())
        .unwrap_or(0.0);
    let passed = z_ok && h_ok && overlap >= 1.0 - 1e-10;
    Outcome::new(
        "nilpotent pair structure and invariant subspace",
        passed,
        format!("Z ok: {z_ok}, H ok: {h_ok}, |<q, e1>| = {overlap:.15}"),
    )
}

pub fn figure_agreement() -> Outcome {
    let mut worst_ratio = 0.0f64;
    let mut failures = Vec::new();
    for (name, a) in fixtures::figure_configurations() {
        let report = predict_numerical_range(&a);
        let bound = DEFAULT_TOL * (1.0 + a.frobenius_norm());
        match verify_prediction(&a, &report, SAMPLES, DEFAULT_TOL) {
            Ok(v) => {
                worst_ratio = worst_ratio.max(v.max_support_deviation / bound);
                if v.max_support_deviation > bound {
                    failures.push(name);
                }
            }
            Err(_) => failures.push(name),
        }
    }
    Outcome::new(
        "prediction matches brute force on the four shifted configurations",
        failures.is_empty(),
        format!("worst deviation / bound = {worst_ratio:.3e}; failures: {failures:?}"),
    )
}

/// Eigenvalues `s ± sqrt(γ² + cd)` of `[[α, c], [d, β]]`.
fn two_by_two_eigenvalues(a: &BlockMatrix) -> [Cplx; 2] {
    let root = (a.gamma() * a.gamma() + a.c_block()[(0, 0)] * a.d_block()[(0, 0)]).sqrt();
    [a.center() + root, a.center() - root]
}

pub fn elliptical_range_foci(seed: u64, count: usize) -> Outcome {
    let mut rng = seeded(seed);
    let mut worst = 0.0f64;
    let mut misclassified = 0;
    for _ in 0..count {
        let a = generators::random_two_by_two(&mut rng);
        let report = predict_numerical_range(&a);
        let Some(e) = report.predicted.as_ref().and_then(|h| h.ellipses.first()) else {
            misclassified += 1;
            continue;
        };
        if report.classification != Classification::ScalarDC {
            misclassified += 1;
        }
        let f = e.foci();
        let ev = two_by_two_eigenvalues(&a);
        let direct = (f[0] - ev[0]).norm().max((f[1] - ev[1]).norm());
        let swapped = (f[0] - ev[1]).norm().max((f[1] - ev[0]).norm());
        worst = worst.max(direct.min(swapped));
    }
    Outcome::new(
        "2x2 ellipse foci are the eigenvalues",
        misclassified == 0 && worst <= 1e-8,
        format!("worst focus error {worst:.3e} over {count} matrices (bound 1e-8), misclassified {misclassified}"),
    )
}

fn random_spectra_instances(seed: u64, count: usize) -> Vec<BlockMatrix> {
    let mut rng = seeded(seed);
    (0..count).map(|_| generators::random_block_any(&mut rng, 10)).collect()
}

pub fn spectral_formula(seed: u64, count: usize, angles: usize) -> Outcome {
    let mut worst = 0.0f64;
    let mut errors = 0;
    for a in random_spectra_instances(seed, count) {
        match check_eigenvalue_formula(&a, angles) {
            Ok(d) => worst = worst.max(d),
            Err(_) => errors += 1,
        }
    }
    Outcome::new(
        "formula spectrum equals direct spectrum",
        errors == 0 && worst <= 1e-10,
        format!("worst {worst:.3e} over {count} instances x {angles} angles (bound 1e-10), errors {errors}"),
    )
}

pub fn central_symmetry(seed: u64, count: usize) -> Outcome {
    let mut worst = 0.0f64;
    let mut errors = 0;
    for a in random_spectra_instances(seed, count) {
        match check_central_symmetry(&a, SAMPLES) {
            Ok(d) => worst = worst.max(d),
            Err(_) => errors += 1,
        }
    }
    Outcome::new(
        "support is centrally symmetric about (alpha+beta)/2",
        errors == 0 && worst <= 1e-10,
        format!("worst {worst:.3e} over {count} instances (bound 1e-10), errors {errors}"),
    )
}

pub fn k2_closed_form(seed: u64, count: usize) -> Outcome {
    let mut rng = seeded(seed);
    let mut worst = 0.0f64;
    let mut errors = 0;
    for _ in 0..count {
        let a = generators::random_k2(&mut rng);
        match check_k2_closed_form(&structural_matrices(&a), SAMPLES) {
            Ok(d) => worst = worst.max(d),
            Err(_) => errors += 1,
        }
    }
    Outcome::new(
        "closed-form k = 2 eigenvalues of M(theta)",
        errors == 0 && worst <= 1e-9,
        format!("worst {worst:.3e} over {count} pairs x {SAMPLES} angles (bound 1e-9), errors {errors}"),
    )
}

fn family_seed(seed: u64, family: Family) -> u64 {
    let offset = match family {
        Family::CommutingNormal => 0x11,
        Family::SharedEigenvector => 0x22,
        Family::PerpendicularPair => 0x33,
        Family::DefectiveCounterexample => 0x44,
    };
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(offset)
}

pub fn family_instances(seed: u64, family: Family, count: usize) -> Vec<BlockMatrix> {
    let mut rng = seeded(family_seed(seed, family));
    (0..count).map(|_| family.generate(&mut rng)).collect()
}

fn claims(family: Family, k2: Classification, dispatched: Classification) -> bool {
    use Classification::*;
    match family {
        Family::CommutingNormal => k2 == K2CaseI && dispatched == TheoremTri,
        Family::SharedEigenvector => k2 == K2CaseII && matches!(dispatched, K2CaseII | NilpotentInvariant),
        Family::PerpendicularPair => k2 == K2CaseI && dispatched == EssentiallyHermitianPair,
        Family::DefectiveCounterexample => k2 == NoneDetected && dispatched == NoneDetected,
    }
}

pub fn constructed_families(seed: u64, per_family: usize) -> Outcome {
    let cfg = DetectorConfig::default();
    let mut lines = Vec::new();
    let mut passed = true;
    for family in Family::all() {
        let mut wrong = 0;
        let mut worst_ratio = 0.0f64;
        let mut min_residual = f64::INFINITY;
        for a in family_instances(seed, family, per_family) {
            let n = normalize_orientation(&a);
            let p = structural_matrices(&n);
            let k2 = analyze_k2(&p, n.alpha(), n.beta(), &cfg).map(|r| r.classification);
            let report = predict_numerical_range(&a);
            if !k2.is_ok_and(|k| claims(family, k, report.classification)) {
                wrong += 1;
                continue;
            }
            if family == Family::DefectiveCounterexample {
                match full_circle_trig_residual(&a, SAMPLES) {
                    Ok(r) => min_residual = min_residual.min(r),
                    Err(_) => wrong += 1,
                }
                continue;
            }
            let bound = DEFAULT_TOL * (1.0 + a.frobenius_norm());
            match verify_prediction(&a, &report, SAMPLES, DEFAULT_TOL) {
                Ok(v) => worst_ratio = worst_ratio.max(v.max_support_deviation / bound),
                Err(_) => wrong += 1,
            }
        }
        let ok = if family == Family::DefectiveCounterexample {
            wrong == 0 && min_residual > 1e-4
        } else {
            wrong == 0 && worst_ratio <= 1.0
        };
        passed &= ok;
        lines.push(if family == Family::DefectiveCounterexample {
            format!("{}: {wrong} misclassified, min fit residual {min_residual:.3e}", family.name())
        } else {
            format!("{}: {wrong} misclassified, worst deviation / bound {worst_ratio:.3e}", family.name())
        });
    }
    Outcome::new(
        "constructed families classify as claimed and agree with brute force",
        passed,
        lines.join("; "),
    )
}

pub fn nestedness_agreement(seed: u64, per_family: usize) -> Outcome {
    let mut disagreements = 0;
    let mut missing = 0;
    let mut counts = [0usize; 2];
    let mut total = 0;
    for family in [Family::CommutingNormal, Family::SharedEigenvector, Family::PerpendicularPair] {
        for a in family_instances(seed, family, per_family) {
            total += 1;
            let report = predict_numerical_range(&a);
            let p = structural_matrices(&normalize_orientation(&a));
            match (report.nested, nestedness_oracle(&p, SAMPLES)) {
                (Some(n), Ok(o)) => {
                    counts[(n == Nestedness::NonNested) as usize] += 1;
                    if n != o {
                        disagreements += 1;
                    }
                }
                _ => missing += 1,
            }
        }
    }

    let a = fixtures::commuting_pair(c(0.0, 0.0), c(0.0, 0.0));
    let commuting_nested = predict_numerical_range(&a).nested == Some(Nestedness::Nested);
    let seg = fixtures::perpendicular_segments();
    let seg_report = predict_numerical_range(&seg);
    let flats = verify_prediction(&seg, &seg_report, SAMPLES, DEFAULT_TOL)
        .ok()
        .and_then(|v| v.flat_portion_count);
    let seg_ok = seg_report.nested == Some(Nestedness::NonNested) && flats == Some(4);

    Outcome::new(
        "nestedness matches the branch sign-change oracle",
        disagreements == 0 && missing == 0 && commuting_nested && seg_ok,
        format!(
            "{disagreements} disagreements, {missing} unclassified of {total} ({} nested, {} non-nested); \
             commuting pair nested: {commuting_nested}; segments non-nested with {flats:?} flat portions",
            counts[0], counts[1]
        ),
    )
}

pub fn off_center_control() -> Outcome {
    let mut lines = Vec::new();
    let mut passed = true;
    for param in fixtures::off_center_parameters() {
        let a = fixtures::off_center_pair(param);
        let report = predict_numerical_range(&a);
        let sym = check_central_symmetry(&a, SAMPLES).unwrap_or(f64::INFINITY);
        let formula = check_eigenvalue_formula(&a, SAMPLES).unwrap_or(f64::INFINITY);
        let ok = report.classification == Classification::NoneDetected && sym <= 1e-10 && formula <= 1e-10;
        passed &= ok;
        lines.push(format!(
            "a = {}{:+}i: {}, symmetry {sym:.3e}, formula {formula:.3e}",
            param.re, param.im, report.classification
        ));
    }
    Outcome::new("off-center ellipse pair is not predicted", passed, lines.join("; "))
}

pub fn eigensolver_floor(seed: u64, count: usize) -> Outcome {
    use rand::Rng;
    let mut rng = seeded(seed);
    let mut worst = 0.0f64;
    let mut errors = 0;
    for _ in 0..count {
        let n = rng.gen_range(2..=12);
        let m = generators::random_hermitian(&mut rng, n);
        match hermitian_eigensystem(&m) {
            Ok(es) => {
                let err = (&m - &es.reconstruct()).frobenius_norm() / m.frobenius_norm().max(1.0);
                worst = worst.max(err);
            }
            Err(_) => errors += 1,
        }
    }
    Outcome::new(
        "Hermitian eigensolver reconstruction",
        errors == 0 && worst <= 1e-11,
        format!("worst relative error {worst:.3e} over {count} matrices (bound 1e-11), errors {errors}"),
    )
}

/// Every suite in order.
pub fn run_all(seed: u64, sizes: SuiteSizes) -> Vec<Outcome> {
    vec![
        golden_commuting_products(),
        golden_nilpotent_structure(),
        figure_agreement(),
        elliptical_range_foci(seed, sizes.two_by_two),
        spectral_formula(seed.wrapping_add(1), sizes.spectra, sizes.spectra_angles),
        central_symmetry(seed.wrapping_add(1), sizes.spectra),
        k2_closed_form(seed.wrapping_add(2), sizes.k2_pairs),
        constructed_families(seed, sizes.per_family),
        nestedness_agreement(seed, sizes.per_family),
        off_center_control(),
        eigensolver_floor(seed.wrapping_add(3), sizes.hermitian),
    ]
}
