//! Brute-force boundary sampling of `W(A)`.

use std::f64::consts::TAU;

use crate::block::BlockMatrix;
use crate::error::{Error, Result};
use crate::linalg::{cis, hermitian_components, hermitian_eigensystem, rayleigh, Cplx};

pub const DEFAULT_SAMPLES: usize = 720;

/// One supporting line of `W(A)` and its tangency point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySample {
    pub theta: f64,
    /// `λ_max(Im(e^{-iθ}A))`, support in direction `e^{i(θ+π/2)}`.
    pub support: f64,
    pub point: Cplx,
}

impl BoundarySample {
    /// Distance from `point` to the supporting line.
    pub fn line_defect(&self) -> f64 {
        ((self.point * cis(-self.theta)).im - self.support).abs()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryTrace {
    pub samples: Vec<BoundarySample>,
    /// `α` and `β`, which always belong to `W(A)`.
    pub anchors: [Cplx; 2],
}

/// `i`-th angle of a uniform `samples`-point grid on `[0, 2π)`.
///
/// Written as `2π · (i/samples)` so that doubling the grid reproduces every
/// original angle bit for bit.
#[inline]
pub fn grid_angle(i: usize, samples: usize) -> f64 {
    TAU * (i as f64 / samples as f64)
}

/// Samples the boundary on a uniform grid.
///
/// The matrix is analyzed trace-centered and the shift `(α+β)/2` is added
/// back at the end. The point for each angle is the Rayleigh point of the
/// first ordered top eigenvector; on a flat portion that choice is
/// deterministic but otherwise arbitrary within the segment.
pub fn sample_boundary(a: &BlockMatrix, samples: usize) -> Result<BoundaryTrace> {
    if samples < 4 {
        return Err(Error::InsufficientSamples { min: 4, got: samples });
    }
    let shift = a.center();
    let a0 = a.centered().to_dense();
    let mut out = Vec::with_capacity(samples);
    for i in 0..samples {
        let theta = grid_angle(i, samples);
        let im = hermitian_components(&a0.scale(cis(-theta)))?.1;
        let es = hermitian_eigensystem(&im)?;
        let x = es.vector(0);
        let point0 = rayleigh(&a0, &x);
        out.push(BoundarySample {
            theta,
            support: es.values[0] + (cis(-theta) * shift).im,
            point: point0 + shift,
        });
    }
    Ok(BoundaryTrace {
        samples: out,
        anchors: [a.alpha(), a.beta()],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, DenseMatrix};

    #[test]
    fn two_by_two_support_values() {
        let a = BlockMatrix::new(
            c(0.0, 0.0),
            c(0.0, 0.0),
            DenseMatrix::from_real_rows(&[[2.0]]).unwrap(),
            DenseMatrix::from_real_rows(&[[1.0]]).unwrap(),
        )
        .unwrap();
        let trace = sample_boundary(&a, 4).unwrap();
        let supports: Vec<f64> = trace.samples.iter().map(|s| s.support).collect();
        for (got, want) in supports.iter().zip([0.5, 1.5, 0.5, 1.5]) {
            assert!((got - want).abs() < 1e-14, "{supports:?}");
        }
        assert!(trace.samples.iter().all(|s| s.line_defect() < 1e-12));
    }

    #[test]
    fn zero_matrix_collapses_to_origin() {
        let a = BlockMatrix::new(c(0.0, 0.0), c(0.0, 0.0), DenseMatrix::zeros(1, 1), DenseMatrix::zeros(1, 1)).unwrap();
        let trace = sample_boundary(&a, 8).unwrap();
        assert!(trace.samples.iter().all(|s| s.point.norm() == 0.0 && s.support == 0.0));
    }

    #[test]
    fn too_few_samples() {
        let a = BlockMatrix::new(c(0.0, 0.0), c(0.0, 0.0), DenseMatrix::zeros(1, 1), DenseMatrix::zeros(1, 1)).unwrap();
        assert_eq!(
            sample_boundary(&a, 3).unwrap_err(),
            Error::InsufficientSamples { min: 4, got: 3 }
        );
    }

    #[test]
    fn doubled_grid_is_nested() {
        for i in 0..720 {
            assert_eq!(grid_angle(i, 720), grid_angle(2 * i, 1440));
        }
    }

    #[test]
    fn shifted_matrix_points_stay_in_every_half_plane() {
        let a = BlockMatrix::new(
            c(1.0, 2.0),
            c(-0.5, 0.3),
            DenseMatrix::from_rows(&[[c(0.3, -0.2), c(1.0, 0.5)], [c(-0.7, 0.1), c(0.2, 0.2)], [c(0.0, 1.0), c(0.4, -0.9)]]).unwrap(),
            DenseMatrix::from_rows(&[[c(0.1, 0.0), c(0.5, 0.5), c(-0.3, 0.2)], [c(0.9, -0.1), c(0.0, 0.0), c(0.6, 0.6)]]).unwrap(),
        )
        .unwrap();
        let trace = sample_boundary(&a, 90).unwrap();
        for p in &trace.samples {
            assert!(p.line_defect() < 1e-8);
            for line in &trace.samples {
                assert!((p.point * cis(-line.theta)).im <= line.support + 1e-8);
            }
        }
        for anchor in trace.anchors {
            for line in &trace.samples {
                assert!((anchor * cis(-line.theta)).im <= line.support + 1e-8);
            }
        }
    }
}
