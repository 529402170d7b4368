//! Brute-force checks of the closed forms and of every prediction.

pub mod fixtures;
pub mod generators;
pub mod suites;

use crate::block::{direct_spectrum, m_theta, spectrum_at_angle, support_value_oracle, BlockMatrix, StructuralPair};
use crate::boundary::{grid_angle, sample_boundary};
use crate::ellipse::{active_partition, fit_trig, hull_support};
use crate::error::{Error, Result};
use crate::linalg::{cis, hermitian_eigensystem, inner, Cplx};
use crate::structure::{DetectorConfig, K2Data, Nestedness, StructureReport};

/// Support agreement tolerance, relative to `1 + ‖A‖_F`.
pub const DEFAULT_TOL: f64 = 1e-8;
/// Tolerance for the symmetry and eigenvalue-formula checks, relative to `max(1, ‖A‖_F)`.
pub const STRICT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub seed: Option<u64>,
    pub max_support_deviation: f64,
    pub symmetry_deviation: f64,
    pub formula_vs_direct_deviation: f64,
    pub trig_fit_residual: Option<f64>,
    pub flat_portion_count: Option<usize>,
    pub passed: bool,
    pub notes: Vec<String>,
}

/// Compares the predicted hull with a brute-force boundary trace and runs
/// the symmetry, eigenvalue-formula and per-arc trig-fit checks.
pub fn verify_prediction(a: &BlockMatrix, report: &StructureReport, samples: usize, tol: f64) -> Result<VerificationReport> {
    let hull = report.predicted.as_ref().ok_or(Error::NoPrediction)?;
    let norm = a.frobenius_norm();
    let trace = sample_boundary(a, samples)?;
    let mut notes = Vec::new();

    let mut max_dev = 0.0f64;
    for s in &trace.samples {
        max_dev = max_dev.max((hull_support(hull, s.theta)? - s.support).abs());
    }

    let even = samples + samples % 2;
    let symmetry = check_central_symmetry(a, even)?;
    let formula = check_eigenvalue_formula(a, samples)?;

    let (trig_fit_residual, flat_portion_count) = match active_partition(hull, samples) {
        Ok(partition) => {
            let center = a.center();
            let mut worst: Option<f64> = None;
            let mut indices: Vec<usize> = partition.per_sample.clone();
            indices.sort_unstable();
            indices.dedup();
            for j in indices {
                let arc: Vec<(f64, f64)> = trace
                    .samples
                    .iter()
                    .zip(&partition.per_sample)
                    .filter(|(_, &idx)| idx == j)
                    .map(|(s, _)| (s.theta, (s.support - (center * cis(-s.theta)).im).powi(2)))
                    .collect();
                match fit_trig(&arc) {
                    Ok((_, res)) => worst = Some(worst.map_or(res, |w| w.max(res))),
                    Err(_) => notes.push(format!("arc of ellipse {j} too short to fit ({} samples)", arc.len())),
                }
            }
            (worst, Some(partition.flat_portions()))
        }
        Err(e) => {
            notes.push(format!("no arc partition: {e}"));
            (None, None)
        }
    };

    let support_ok = max_dev <= tol * (1.0 + norm);
    let strict = STRICT_TOL * norm.max(1.0);
    let symmetry_ok = symmetry <= strict;
    let formula_ok = formula <= strict;
    let fit_ok = trig_fit_residual.map_or(true, |r| r <= tol * (1.0 + norm).powi(2));
    if !support_ok {
        notes.push(format!("support deviation {max_dev:.3e} exceeds {:.3e}", tol * (1.0 + norm)));
    }
    if !symmetry_ok {
        notes.push(format!("symmetry deviation {symmetry:.3e} exceeds {strict:.3e}"));
    }
    if !formula_ok {
        notes.push(format!("formula deviation {formula:.3e} exceeds {strict:.3e}"));
    }
    if !fit_ok {
        notes.push("trig fit residual exceeds tolerance".to_string());
    }

    Ok(VerificationReport {
        seed: None,
        max_support_deviation: max_dev,
        symmetry_deviation: symmetry,
        formula_vs_direct_deviation: formula,
        trig_fit_residual,
        flat_portion_count,
        passed: support_ok && symmetry_ok && formula_ok && fit_ok,
        notes,
    })
}

/// `max_θ |h₀(θ + π) − h₀(θ)|` for the trace-centered matrix, on a grid of
/// `samples` angles (which must be even).
pub fn check_central_symmetry(a: &BlockMatrix, samples: usize) -> Result<f64> {
    if samples % 2 == 1 {
        return Err(Error::OddSampleCount(samples));
    }
    let a0 = a.centered();
    let half = samples / 2;
    let mut worst = 0.0f64;
    for i in 0..half {
        let s = support_value_oracle(&a0, grid_angle(i, samples))?;
        let t = support_value_oracle(&a0, grid_angle(i + half, samples))?;
        worst = worst.max((s - t).abs());
    }
    Ok(worst)
}

/// Largest distance between the formula-path and direct spectra, matched
/// in sorted order, over a uniform grid.
pub fn check_eigenvalue_formula(a: &BlockMatrix, samples: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    for i in 0..samples {
        let theta = grid_angle(i, samples);
        let formula = spectrum_at_angle(a, theta)?.all();
        let direct = direct_spectrum(a, theta)?;
        for (x, y) in formula.iter().zip(&direct) {
            worst = worst.max((x - y).abs());
        }
    }
    Ok(worst)
}

/// Largest gap between the closed-form `μ₁,₂(θ)` and a direct eigensolve of
/// `M(θ)`, both branches.
pub fn check_k2_closed_form(p: &StructuralPair, samples: usize) -> Result<f64> {
    if p.k() != 2 {
        return Err(Error::WrongBlockSize(p.k()));
    }
    let data = K2Data::from_pair(p, &DetectorConfig::default())?;
    let mut worst = 0.0f64;
    for i in 0..samples {
        let theta = grid_angle(i, samples);
        let (m1, m2) = data.closed_form_mus(theta);
        let direct = hermitian_eigensystem(&m_theta(p, theta))?.values;
        worst = worst.max((m1 - direct[0]).abs()).max((m2 - direct[1]).abs());
    }
    Ok(worst)
}

/// Nestedness decided without the closed forms: follow the two eigenvalue
/// branches of `M(θ)` around the circle by eigenvector overlap and report
/// whether their difference changes sign.
pub fn nestedness_oracle(p: &StructuralPair, samples: usize) -> Result<Nestedness> {
    if p.k() != 2 {
        return Err(Error::WrongBlockSize(p.k()));
    }
    let gap_tol = 1e-9 * (p.h.frobenius_norm() + 2.0 * p.z.frobenius_norm()).max(1.0);
    let mut branches: Option<(Vec<Cplx>, Vec<Cplx>)> = None;
    let (mut pos, mut neg) = (false, false);
    for i in 0..samples {
        let es = hermitian_eigensystem(&m_theta(p, grid_angle(i, samples)))?;
        if es.values[0] - es.values[1] <= gap_tol {
            continue;
        }
        let (top, bottom) = (es.vector(0), es.vector(1));
        branches = Some(match branches {
            None => {
                pos = true;
                (top, bottom)
            }
            Some((first, second)) => {
                if inner(&top, &first).norm() >= inner(&top, &second).norm() {
                    pos = true;
                    (top, bottom)
                } else {
                    neg = true;
                    (bottom, top)
                }
            }
        });
    }
    Ok(if pos && neg {
        Nestedness::NonNested
    } else {
        Nestedness::Nested
    })
}

/// Max residual of a single `{cos 2θ, sin 2θ, 1}` fit to the centered
/// `λ²_max` over the whole circle.
pub fn full_circle_trig_residual(a: &BlockMatrix, samples: usize) -> Result<f64> {
    let a0 = a.centered();
    let pts = (0..samples)
        .map(|i| {
            let theta = grid_angle(i, samples);
            support_value_oracle(&a0, theta).map(|s| (theta, s * s))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(fit_trig(&pts)?.1)
}
