//! Ellipses, their support functions, and hulls of co-centered ellipse families.
//!
//! Supports are measured in direction `e^{i(θ+π/2)}`, the same convention
//! used for `λ_max(Im(e^{-iθ}A))`. A centered ellipse with semi-axes
//! `p ≥ q` and major axis at angle `φ` then has squared support
//!
//! ```text
//! h(θ)² = (p² + q²)/2 − (p² − q²)/2 · cos(2θ − 2φ)
//! ```
//!
//! which is the form `a cos 2θ + b sin 2θ + c` handled by [`ellipse_from_trig`].

use std::collections::BTreeSet;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::boundary::grid_angle;
use crate::error::{Error, Result};
use crate::linalg::{cis, Cplx};

/// Admissibility slack for `c ≥ sqrt(a² + b²)`.
const ADMISSIBLE_SLACK: f64 = 1e-9;

/// Supports within this relative distance of the maximum count as ties.
const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ellipse {
    pub center: Cplx,
    pub semi_major: f64,
    pub semi_minor: f64,
    /// Direction of the major axis, in `[0, π)`.
    pub axis_angle: f64,
}

impl Ellipse {
    /// Canonicalizes the axis order and reduces the angle mod π.
    pub fn new(center: Cplx, semi_a: f64, semi_b: f64, axis_angle: f64) -> Self {
        let (major, minor, angle) = if semi_b > semi_a {
            (semi_b, semi_a, axis_angle + FRAC_PI_2)
        } else {
            (semi_a, semi_b, axis_angle)
        };
        Self {
            center,
            semi_major: major.max(0.0),
            semi_minor: minor.max(0.0),
            axis_angle: reduce_mod_pi(angle),
        }
    }

    pub fn circle(center: Cplx, radius: f64) -> Self {
        Self::new(center, radius, radius, 0.0)
    }

    pub fn is_segment(&self) -> bool {
        self.semi_minor == 0.0
    }

    /// Distance from the center to each focus.
    pub fn focal_distance(&self) -> f64 {
        ((self.semi_major - self.semi_minor) * (self.semi_major + self.semi_minor))
            .max(0.0)
            .sqrt()
    }

    pub fn foci(&self) -> [Cplx; 2] {
        let d = cis(self.axis_angle) * self.focal_distance();
        [self.center + d, self.center - d]
    }

    /// Boundary point at parameter `t`.
    pub fn point_at(&self, t: f64) -> Cplx {
        self.center + cis(self.axis_angle) * Cplx::new(self.semi_major * t.cos(), self.semi_minor * t.sin())
    }

    pub fn support(&self, theta: f64) -> f64 {
        ellipse_support(self, theta)
    }

    /// Trigonometric form of the squared support of the centered ellipse.
    pub fn trig_coefficients(&self) -> TrigCoefficients {
        let p2 = self.semi_major * self.semi_major;
        let q2 = self.semi_minor * self.semi_minor;
        let r = 0.5 * (p2 - q2);
        TrigCoefficients {
            a_coef: -r * (2.0 * self.axis_angle).cos(),
            b_coef: -r * (2.0 * self.axis_angle).sin(),
            c_coef: 0.5 * (p2 + q2),
        }
    }
}

pub(crate) fn reduce_mod_pi(angle: f64) -> f64 {
    let r = angle.rem_euclid(PI);
    // rem_euclid can round up to exactly π
    if r >= PI {
        0.0
    } else {
        r
    }
}

/// `λ²(θ) = a_coef·cos 2θ + b_coef·sin 2θ + c_coef`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrigCoefficients {
    pub a_coef: f64,
    pub b_coef: f64,
    pub c_coef: f64,
}

impl TrigCoefficients {
    pub fn new(a_coef: f64, b_coef: f64, c_coef: f64) -> Self {
        Self { a_coef, b_coef, c_coef }
    }

    pub fn amplitude(&self) -> f64 {
        self.a_coef.hypot(self.b_coef)
    }

    pub fn eval(&self, theta: f64) -> f64 {
        self.a_coef * (2.0 * theta).cos() + self.b_coef * (2.0 * theta).sin() + self.c_coef
    }
}

/// Recovers the centered ellipse whose squared support is `coeffs`, then
/// translates it to `center`.
///
/// Semi-axes are `sqrt(c ± R)` with `R = sqrt(a² + b²)`; the major axis
/// points along `½·atan2(b, a) + π/2` (mod π). Circles get angle 0.
pub fn ellipse_from_trig(coeffs: &TrigCoefficients, center: Cplx) -> Result<Ellipse> {
    let r = coeffs.amplitude();
    let cc = coeffs.c_coef;
    if cc < r - ADMISSIBLE_SLACK * r.max(1.0) {
        return Err(Error::NotAnEllipse { c: cc, r });
    }
    let major = (cc + r).max(0.0).sqrt();
    let minor = (cc - r).max(0.0).sqrt();
    let angle = if r <= 4.0 * f64::EPSILON * cc.abs() {
        0.0
    } else {
        0.5 * coeffs.b_coef.atan2(coeffs.a_coef) + FRAC_PI_2
    };
    Ok(Ellipse::new(center, major, minor, angle))
}

/// Support of `e` in direction `e^{i(θ+π/2)}`.
pub fn ellipse_support(e: &Ellipse, theta: f64) -> f64 {
    let dir = theta + FRAC_PI_2;
    let offset = (e.center * cis(-dir)).re;
    let rel = dir - e.axis_angle;
    let (s, c) = rel.sin_cos();
    offset + (e.semi_major.powi(2) * c * c + e.semi_minor.powi(2) * s * s).sqrt()
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EllipseHull {
    pub ellipses: Vec<Ellipse>,
    /// Singleton components, such as `α` when the scalar eigenvalue has
    /// positive multiplicity.
    pub isolated_points: Vec<Cplx>,
}

impl EllipseHull {
    pub fn new(ellipses: Vec<Ellipse>) -> Self {
        Self {
            ellipses,
            isolated_points: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.ellipses.is_empty() && self.isolated_points.is_empty()
    }

    /// Shared center, if every ellipse has the same one (within `1e-9·(1 + max |center|)`).
    pub fn common_center(&self) -> Option<Cplx> {
        let first = self.ellipses.first()?.center;
        let scale = 1.0 + self.ellipses.iter().map(|e| e.center.norm()).fold(0.0, f64::max);
        self.ellipses
            .iter()
            .all(|e| (e.center - first).norm() <= 1e-9 * scale)
            .then_some(first)
    }

    pub fn support(&self, theta: f64) -> Result<f64> {
        hull_support(self, theta)
    }
}

/// Support of the convex hull: the maximum over member supports.
pub fn hull_support(h: &EllipseHull, theta: f64) -> Result<f64> {
    if h.is_empty() {
        return Err(Error::EmptyHull);
    }
    let rot = cis(-theta);
    let from_ellipses = h.ellipses.iter().map(|e| ellipse_support(e, theta));
    let from_points = h.isolated_points.iter().map(|p| (p * rot).im);
    Ok(from_ellipses.chain(from_points).fold(f64::NEG_INFINITY, f64::max))
}

/// Least-squares fit of `λ²(θ)` onto `{cos 2θ, sin 2θ, 1}`.
///
/// Returns the coefficients and the maximum absolute fit error.
pub fn fit_trig(samples: &[(f64, f64)]) -> Result<(TrigCoefficients, f64)> {
    let distinct: BTreeSet<i64> = samples
        .iter()
        .map(|(t, _)| ((2.0 * t).rem_euclid(TAU) * 1e9).round() as i64 % (TAU * 1e9).round() as i64)
        .collect();
    if distinct.len() < 3 {
        return Err(Error::DegenerateFit);
    }

    let mut gram = [[0.0f64; 3]; 3];
    let mut rhs = [0.0f64; 3];
    for &(t, y) in samples {
        let basis = [(2.0 * t).cos(), (2.0 * t).sin(), 1.0];
        for i in 0..3 {
            rhs[i] += basis[i] * y;
            for j in 0..3 {
                gram[i][j] += basis[i] * basis[j];
            }
        }
    }
    let sol = solve3(gram, rhs).ok_or(Error::DegenerateFit)?;
    let coeffs = TrigCoefficients::new(sol[0], sol[1], sol[2]);
    let residual = samples
        .iter()
        .map(|&(t, y)| (coeffs.eval(t) - y).abs())
        .fold(0.0, f64::max);
    Ok((coeffs, residual))
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    let scale = a.iter().flatten().map(|x| x.abs()).fold(0.0, f64::max);
    if scale == 0.0 {
        return None;
    }
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())?;
        if a[pivot][col].abs() <= 1e-12 * scale {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in (col + 1)..3 {
            let f = a[row][col] / a[col][col];
            for j in col..3 {
                a[row][j] -= f * a[col][j];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let tail: f64 = ((row + 1)..3).map(|j| a[row][j] * x[j]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    Some(x)
}

/// Which ellipse attains the hull support around the circle.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcPartition {
    pub grid: usize,
    /// Active ellipse index at every grid angle.
    pub per_sample: Vec<usize>,
    /// Grid angles at which the active index differs from the previous
    /// angle (cyclically), sorted.
    pub breakpoints: Vec<f64>,
    /// Active index on `[breakpoints[j], breakpoints[j+1])`; a single entry
    /// when there are no breakpoints.
    pub active_index: Vec<usize>,
}

impl ArcPartition {
    /// Number of flat boundary segments: one per switch of the active ellipse.
    pub fn flat_portions(&self) -> usize {
        self.breakpoints.len()
    }

    /// `m(A)`, the number of distinct ellipses shaping the boundary.
    pub fn active_count(&self) -> usize {
        self.per_sample.iter().collect::<BTreeSet<_>>().len()
    }
}

/// Partitions a `grid`-point angle grid by the ellipse attaining the hull
/// support. Ties go to the lowest index. Isolated points are ignored: for
/// the hulls built in this crate they never exceed the ellipse supports.
pub fn active_partition(h: &EllipseHull, grid: usize) -> Result<ArcPartition> {
    if grid < 8 {
        return Err(Error::InsufficientSamples { min: 8, got: grid });
    }
    if h.ellipses.is_empty() {
        return Err(Error::EmptyHull);
    }
    if h.common_center().is_none() {
        return Err(Error::NotCocentered);
    }

    let per_sample: Vec<usize> = (0..grid)
        .map(|i| {
            let theta = grid_angle(i, grid);
            let supports: Vec<f64> = h.ellipses.iter().map(|e| ellipse_support(e, theta)).collect();
            let best = supports.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let tol = TIE_TOL * (1.0 + best.abs());
            supports.iter().position(|&s| s >= best - tol).unwrap()
        })
        .collect();

    let mut breakpoints = Vec::new();
    let mut active_index = Vec::new();
    for i in 0..grid {
        let prev = per_sample[(i + grid - 1) % grid];
        if per_sample[i] != prev {
            breakpoints.push(grid_angle(i, grid));
            active_index.push(per_sample[i]);
        }
    }
    if active_index.is_empty() {
        active_index.push(per_sample[0]);
    }
    Ok(ArcPartition {
        grid,
        per_sample,
        breakpoints,
        active_index,
    })
}
