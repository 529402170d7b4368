//! Numerical ranges of two-scalar block matrices
//!
//! ```text
//! A = [[α I_{n-k}, C], [D, β I_k]]
//! ```
//!
//! The boundary of `W(A)` is sampled through the support function
//! `θ ↦ λ_max(Im(e^{-iθ}A))`. When the blocks carry enough structure the
//! range is the convex hull of co-centered ellipses given in closed form;
//! [`structure`] detects those cases and [`verify`] checks every prediction
//! against brute force.

pub mod block;
pub mod boundary;
pub mod ellipse;
pub mod error;
pub mod linalg;
pub mod structure;
pub mod verify;

pub use block::{BlockMatrix, SpectrumAtAngle, StructuralPair};
pub use boundary::{sample_boundary, BoundarySample, BoundaryTrace, DEFAULT_SAMPLES};
pub use ellipse::{
    active_partition, ellipse_from_trig, ellipse_support, fit_trig, hull_support, ArcPartition, Ellipse, EllipseHull,
    TrigCoefficients,
};
pub use error::{Error, Result};
pub use linalg::{Cplx, DenseMatrix};
pub use structure::{predict_numerical_range, Classification, Nestedness, StructureReport};
pub use verify::{verify_prediction, VerificationReport};
