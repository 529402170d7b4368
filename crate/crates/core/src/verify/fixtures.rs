//! Hand-built matrices with known numerical ranges.

use crate::block::BlockMatrix;
use crate::linalg::{c, Cplx, DenseMatrix};

/// `DC = diag(2, ½)` normal and commuting with `H = diag(22, 11/2)`, while
/// `CD` is not normal.
pub fn commuting_pair(alpha: Cplx, beta: Cplx) -> BlockMatrix {
    BlockMatrix::new(
        alpha,
        beta,
        DenseMatrix::from_real_rows(&[[4.0, -0.5], [-2.0, 0.5]]).unwrap(),
        DenseMatrix::from_real_rows(&[[1.0, 1.0], [1.0, 2.0]]).unwrap(),
    )
    .unwrap()
}

/// `Z = [[0, 1], [0, 0]]`, `H = diag(19, 36)/6`; `span{e₁}` is invariant
/// under `H` and sits between the range and kernel of `Z`.
pub fn nilpotent_pair(alpha: Cplx, beta: Cplx) -> BlockMatrix {
    BlockMatrix::new(
        alpha,
        beta,
        DenseMatrix::from_rows(&[[c(1.0, 1.0), c(1.0, 1.0)], [c(1.0, 0.0), c(-2.0, 0.0)]]).unwrap(),
        DenseMatrix::from_rows(&[[c(1.0, -1.0), c(-2.0, 0.0)], [c(0.0, 0.0), c(0.0, 0.0)]])
            .unwrap()
            .scale_real(1.0 / 6.0),
    )
    .unwrap()
}

/// `α = β = 0`, `C = B* + I`, `D = B − I` with
/// `B = [[a, 1 − |a|²], [0, a]]`. The range is the hull of two ellipses
/// whose centers are away from the origin.
pub fn off_center_pair(a: Cplx) -> BlockMatrix {
    let off = 1.0 - a.norm_sqr();
    let b = DenseMatrix::from_rows(&[[a, c(off, 0.0)], [c(0.0, 0.0), a]]).unwrap();
    let id = DenseMatrix::identity(2);
    BlockMatrix::new(c(0.0, 0.0), c(0.0, 0.0), &b.adjoint() + &id, &b - &id).unwrap()
}

/// `C = B − I`, `D = I + B*` with the unitary `B = diag(−i, i)`, giving
/// `H = 4I` and `Z = diag(−2i, 2i)`: two perpendicular segments.
pub fn perpendicular_segments() -> BlockMatrix {
    BlockMatrix::new(
        c(0.0, 0.0),
        c(0.0, 0.0),
        DenseMatrix::diagonal(&[c(-1.0, -1.0), c(-1.0, 1.0)]),
        DenseMatrix::diagonal(&[c(1.0, 1.0), c(1.0, -1.0)]),
    )
    .unwrap()
}

/// `[[α, c], [d, β]]`.
pub fn two_by_two(alpha: Cplx, beta: Cplx, c_entry: Cplx, d_entry: Cplx) -> BlockMatrix {
    BlockMatrix::new(
        alpha,
        beta,
        DenseMatrix::from_rows(&[[c_entry]]).unwrap(),
        DenseMatrix::from_rows(&[[d_entry]]).unwrap(),
    )
    .unwrap()
}

/// The two commuting and two nilpotent configurations, centered and shifted.
pub fn figure_configurations() -> Vec<(&'static str, BlockMatrix)> {
    let o = c(0.0, 0.0);
    vec![
        ("commuting pair, alpha = beta = 0", commuting_pair(o, o)),
        ("commuting pair, alpha = -beta = 1+2i", commuting_pair(c(1.0, 2.0), c(-1.0, -2.0))),
        ("nilpotent pair, alpha = beta = 0", nilpotent_pair(o, o)),
        ("nilpotent pair, alpha = -beta = 1+i", nilpotent_pair(c(1.0, 1.0), c(-1.0, -1.0))),
    ]
}

/// Parameters `a = −i/2` and `a = ½ + i/4` of [`off_center_pair`].
pub fn off_center_parameters() -> [Cplx; 2] {
    [c(0.0, -0.5), c(0.5, 0.25)]
}
