use super::{inner, vec_norm, Cplx, DenseMatrix};

pub const DEFAULT_DROP_TOL: f64 = 1e-10;

/// Orthonormal basis of the smallest `operator`-invariant subspace containing
/// the column span of `seed_columns`.
///
/// Seeds are accepted when their residual after projection exceeds
/// `drop_tol` times the largest seed column norm. Images `operator · q` of
/// basis vectors (which are unit vectors) are accepted when their residual
/// exceeds `drop_tol` itself. Projection is modified Gram–Schmidt, applied twice.
pub fn orthonormal_closure(seed_columns: &DenseMatrix, operator: &DenseMatrix, drop_tol: f64) -> DenseMatrix {
    let n = operator.rows();
    debug_assert!(operator.is_square());
    debug_assert_eq!(seed_columns.rows(), n);

    let seeds = seed_columns.columns();
    let seed_scale = seeds.iter().map(|s| vec_norm(s)).fold(0.0, f64::max);
    let mut basis: Vec<Vec<Cplx>> = Vec::new();
    if seed_scale == 0.0 {
        return DenseMatrix::zeros(n, 0);
    }

    for s in seeds {
        push_if_new(&mut basis, s, drop_tol * seed_scale);
    }

    let mut next = 0;
    while next < basis.len() && basis.len() < n {
        let image = operator.mul_vec(&basis[next]).expect("closure: operator shape");
        push_if_new(&mut basis, image, drop_tol);
        next += 1;
    }
    DenseMatrix::from_columns(n, &basis)
}

fn push_if_new(basis: &mut Vec<Vec<Cplx>>, mut w: Vec<Cplx>, threshold: f64) {
    for _ in 0..2 {
        for q in basis.iter() {
            let proj = inner(&w, q);
            for (wi, qi) in w.iter_mut().zip(q) {
                *wi -= proj * qi;
            }
        }
    }
    let norm = vec_norm(&w);
    if norm > threshold {
        for wi in w.iter_mut() {
            *wi /= norm;
        }
        basis.push(w);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, hermitian_eigensystem};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn projector_residual(q: &DenseMatrix, x: &DenseMatrix) -> f64 {
        // ‖(I − QQ*) X‖_F
        let proj = &(q * &q.adjoint()) * x;
        (x - &proj).frobenius_norm()
    }

    #[test]
    fn nilpotent_range_closes_to_first_axis() {
        let z = DenseMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]]).unwrap();
        let h = DenseMatrix::from_real_rows(&[[19.0 / 6.0, 0.0], [0.0, 6.0]]).unwrap();
        let q = orthonormal_closure(&z, &h, DEFAULT_DROP_TOL);
        assert_eq!(q.cols(), 1);
        assert!((q[(0, 0)].norm() - 1.0).abs() < 1e-15);
        assert_eq!(q[(1, 0)].norm(), 0.0);
    }

    #[test]
    fn zero_seed_gives_empty_basis() {
        let q = orthonormal_closure(&DenseMatrix::zeros(3, 2), &DenseMatrix::identity(3), DEFAULT_DROP_TOL);
        assert_eq!(q.shape(), (3, 0));
    }

    #[test]
    fn full_seed_gives_full_basis() {
        let op = DenseMatrix::from_real_rows(&[[1.0, 2.0, 0.0], [0.0, 1.0, 0.0], [3.0, 0.0, 1.0]]).unwrap();
        let q = orthonormal_closure(&DenseMatrix::identity(3), &op, DEFAULT_DROP_TOL);
        assert_eq!(q.cols(), 3);
    }

    #[test]
    fn closure_is_orthonormal_invariant_and_contains_seeds() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let n = rng.gen_range(2..=6);
            // Block-diagonal operator in a random basis so that proper invariant subspaces exist.
            let split = rng.gen_range(1..n);
            let raw = DenseMatrix::from_fn(n, n, |i, j| {
                if (i < split) == (j < split) {
                    c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                } else {
                    c(0.0, 0.0)
                }
            })
            .unwrap();
            let herm = DenseMatrix::from_fn(n, n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).unwrap();
            let u = hermitian_eigensystem(&(&herm + &herm.adjoint())).unwrap().vectors;
            let op = &(&u * &raw) * &u.adjoint();
            let op = op.scale_real(1.0 / op.frobenius_norm().max(1.0));
            let ncols = rng.gen_range(1..=2);
            let seed_local = DenseMatrix::from_fn(n, ncols, |i, _| {
                if i < split {
                    c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                } else {
                    c(0.0, 0.0)
                }
            })
            .unwrap();
            let seed = &u * &seed_local;

            let tol = DEFAULT_DROP_TOL;
            let q = orthonormal_closure(&seed, &op, tol);
            let gram = &q.adjoint() * &q;
            assert!((&gram - &DenseMatrix::identity(q.cols())).frobenius_norm() <= 1e-10);
            assert!(q.cols() <= split);
            let opq = &op * &q;
            assert!(projector_residual(&q, &opq) <= 10.0 * tol);
            let scale = seed.columns().iter().map(|s| vec_norm(s)).fold(0.0, f64::max);
            for s in seed.columns() {
                let sm = DenseMatrix::from_columns(n, &[s]);
                assert!(projector_residual(&q, &sm) <= tol * scale.max(1.0));
            }
        }
    }
}
