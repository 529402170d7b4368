//! Seeded random instances. Complex entries have independent real and
//! imaginary parts uniform on `[−1, 1]`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::block::{structural_matrices, BlockMatrix};
use crate::linalg::{c, cis, hermitian_eigensystem, min_norm_solution, Cplx, DenseMatrix};

pub type InstanceRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> InstanceRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform_complex(rng: &mut impl Rng) -> Cplx {
    c(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| uniform_complex(rng)).unwrap()
}

pub fn random_hermitian(rng: &mut impl Rng, n: usize) -> DenseMatrix {
    let x = random_matrix(rng, n, n);
    (&x + &x.adjoint()).scale_real(0.5)
}

/// Eigenvectors of a random Hermitian matrix, with random column phases.
pub fn random_unitary(rng: &mut impl Rng, n: usize) -> DenseMatrix {
    let q = hermitian_eigensystem(&random_hermitian(rng, n)).unwrap().vectors;
    let phases: Vec<Cplx> = (0..n).map(|_| cis(rng.gen_range(0.0..std::f64::consts::TAU))).collect();
    &q * &DenseMatrix::diagonal(&phases)
}

pub fn random_block(rng: &mut impl Rng, n: usize, k: usize) -> BlockMatrix {
    let m = n - k;
    BlockMatrix::new(
        uniform_complex(rng),
        uniform_complex(rng),
        random_matrix(rng, m, k),
        random_matrix(rng, k, m),
    )
    .unwrap()
}

/// Random size `2 ≤ n ≤ max_n` and split `1 ≤ k < n`.
pub fn random_block_any(rng: &mut impl Rng, max_n: usize) -> BlockMatrix {
    let n = rng.gen_range(2..=max_n);
    let k = rng.gen_range(1..n);
    random_block(rng, n, k)
}

pub fn random_two_by_two(rng: &mut impl Rng) -> BlockMatrix {
    random_block(rng, 2, 1)
}

/// Random block matrix with `k = 2` and `2 ≤ n − k ≤ 4`.
pub fn random_k2(rng: &mut impl Rng) -> BlockMatrix {
    let m = rng.gen_range(2..=4);
    random_block(rng, m + 2, 2)
}

/// Conjugates by `diag(V, U)` with random unitaries, leaving `W(A)` fixed
/// and replacing `(H, Z)` by `(U*HU, U*ZU)`.
pub fn scramble(rng: &mut impl Rng, a: &BlockMatrix) -> BlockMatrix {
    let v = random_unitary(rng, a.n() - a.k());
    let u = random_unitary(rng, a.k());
    let cm = &(&v.adjoint() * a.c_block()) * &u;
    let dm = &(&u.adjoint() * a.d_block()) * &v;
    BlockMatrix::new(a.alpha(), a.beta(), cm, dm).unwrap()
}

/// Random `C` (`m × 2`) and `D` (`2 × m`, `m ≥ 3`) with `DC = z_target` and
/// `C*C + DD*` diagonal, before scrambling.
pub fn realize_pair(rng: &mut impl Rng, z_target: &DenseMatrix, m: usize) -> Option<BlockMatrix> {
    debug_assert!(m >= 3 && z_target.shape() == (2, 2));
    let cm = random_matrix(rng, m, 2);
    let ct = cm.transpose();

    // Row 1 of D: r₁·c₁ = z₁₁, r₁·c₂ = z₁₂, plus a random null-space part.
    let x0 = min_norm_solution(&ct, &[z_target[(0, 0)], z_target[(0, 1)]])?;
    let y: Vec<Cplx> = (0..m).map(|_| uniform_complex(rng)).collect();
    let y_fit = min_norm_solution(&ct, &ct.mul_vec(&y).ok()?)?;
    let r1: Vec<Cplx> = (0..m).map(|l| x0[l] + 0.5 * (y[l] - y_fit[l])).collect();

    // Row 2: r₂·c₁ = z₂₁, r₂·c₂ = z₂₂, and Σ r̄₁ r₂ = −Σ c₁ c̄₂ so that H₁₂ = 0.
    let cross: Cplx = (0..m).map(|l| cm[(l, 0)] * cm[(l, 1)].conj()).sum();
    let mut rows = ct.row(0).to_vec();
    rows.extend_from_slice(ct.row(1));
    rows.extend(r1.iter().map(|x| x.conj()));
    let sys = DenseMatrix::new(3, m, rows).ok()?;
    let r2 = min_norm_solution(&sys, &[z_target[(1, 0)], z_target[(1, 1)], -cross])?;

    let mut d_entries = r1;
    d_entries.extend(r2);
    let dm = DenseMatrix::new(2, m, d_entries).ok()?;
    if dm.frobenius_norm() > 6.0 {
        return None;
    }
    let a = BlockMatrix::new(uniform_complex(rng), uniform_complex(rng), cm, dm).ok()?;
    let p = structural_matrices(&a);
    let ok = p.z.max_abs_diff(z_target) <= 1e-10 && p.h[(0, 1)].norm() <= 1e-10;
    ok.then_some(a)
}

/// Which construction produced an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// `Z` normal and commuting with `H`.
    CommutingNormal,
    /// `z₁ = z₂` and a common eigenvector of `Z` and `H`.
    SharedEigenvector,
    /// `H` scalar and `Z` essentially Hermitian but not scalar.
    PerpendicularPair,
    /// `z₁ = z₂`, `h₁ ≠ h₂`, `z₁₁ ≠ z₂₂`, `z₁₂z₂₁ ≠ 0`: no ellipse pair.
    DefectiveCounterexample,
}

impl Family {
    pub fn all() -> [Family; 4] {
        [
            Family::CommutingNormal,
            Family::SharedEigenvector,
            Family::PerpendicularPair,
            Family::DefectiveCounterexample,
        ]
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::CommutingNormal => "commuting normal",
            Family::SharedEigenvector => "shared eigenvector",
            Family::PerpendicularPair => "perpendicular pair",
            Family::DefectiveCounterexample => "defective counterexample",
        }
    }

    pub fn generate(self, rng: &mut impl Rng) -> BlockMatrix {
        loop {
            let candidate = match self {
                Family::CommutingNormal => commuting_normal(rng),
                Family::SharedEigenvector => shared_eigenvector(rng),
                Family::PerpendicularPair => perpendicular_pair(rng),
                Family::DefectiveCounterexample => defective_counterexample(rng),
            };
            if let Some(a) = candidate {
                return a;
            }
        }
    }
}

fn diag_gap(a: &BlockMatrix) -> f64 {
    let h = structural_matrices(a).h;
    (h[(0, 0)].re - h[(1, 1)].re).abs()
}

fn commuting_normal(rng: &mut impl Rng) -> Option<BlockMatrix> {
    let (z1, z2) = (uniform_complex(rng), uniform_complex(rng));
    if (z1 - z2).norm() < 0.1 {
        return None;
    }
    let m = rng.gen_range(3..=4);
    let a = realize_pair(rng, &DenseMatrix::diagonal(&[z1, z2]), m)?;
    let dh = diag_gap(&a);
    let dz = 2.0 * (z1 - z2).norm();
    if (dh - dz).abs() <= 1e-3 * dh.max(dz) {
        return None;
    }
    Some(scramble(rng, &a))
}

fn shared_eigenvector(rng: &mut impl Rng) -> Option<BlockMatrix> {
    let z0 = if rng.gen_bool(0.125) {
        c(0.0, 0.0)
    } else {
        uniform_complex(rng)
    };
    let t = uniform_complex(rng);
    if t.norm() < 0.1 {
        return None;
    }
    let z = DenseMatrix::from_rows(&[[z0, t], [c(0.0, 0.0), z0]]).unwrap();
    let m = rng.gen_range(3..=4);
    let a = realize_pair(rng, &z, m)?;
    Some(scramble(rng, &a))
}

fn perpendicular_pair(rng: &mut impl Rng) -> Option<BlockMatrix> {
    let b = random_unitary(rng, 2);
    let phase = cis(rng.gen_range(0.0..std::f64::consts::TAU));
    let id = DenseMatrix::identity(2);
    let cm = (&b - &id).scale(phase);
    let dm = &id + &b.adjoint();
    let a = BlockMatrix::new(uniform_complex(rng), uniform_complex(rng), cm, dm).ok()?;
    let z = structural_matrices(&a).z;
    let disc = (z[(0, 0)] - z[(1, 1)]).powi(2) + 4.0 * z[(0, 1)] * z[(1, 0)];
    if disc.norm().sqrt() < 0.1 {
        return None;
    }
    Some(scramble(rng, &a))
}

fn defective_counterexample(rng: &mut impl Rng) -> Option<BlockMatrix> {
    let z0 = uniform_complex(rng);
    let (p, q) = (uniform_complex(rng), uniform_complex(rng));
    if p.norm() < 0.2 || q.norm() < 0.2 {
        return None;
    }
    let r = -p * p / q;
    if r.norm() > 2.0 {
        return None;
    }
    let z = DenseMatrix::from_rows(&[[z0 + p, q], [r, z0 - p]]).unwrap();
    let m = rng.gen_range(3..=4);
    let a = realize_pair(rng, &z, m)?;
    if diag_gap(&a) < 0.5 {
        return None;
    }
    Some(scramble(rng, &a))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unitary_is_unitary() {
        let mut rng = seeded(1);
        for n in 1..6 {
            let u = random_unitary(&mut rng, n);
            assert!((&u.adjoint() * &u).max_abs_diff(&DenseMatrix::identity(n)) < 1e-12);
        }
    }

    #[test]
    fn realized_pairs_hit_their_targets() {
        let mut rng = seeded(2);
        let mut hits = 0;
        for _ in 0..50 {
            let z = random_matrix(&mut rng, 2, 2);
            if let Some(a) = realize_pair(&mut rng, &z, 3) {
                let p = structural_matrices(&a);
                assert!(p.z.max_abs_diff(&z) < 1e-10);
                assert!(p.h[(0, 1)].norm() < 1e-10);
                hits += 1;
            }
        }
        assert!(hits > 20, "only {hits} realizations");
    }

    #[test]
    fn scrambling_preserves_the_spectrum_of_z() {
        let mut rng = seeded(3);
        let a = random_k2(&mut rng);
        let b = scramble(&mut rng, &a);
        let (pa, pb) = (structural_matrices(&a), structural_matrices(&b));
        assert!((pa.z.trace() - pb.z.trace()).norm() < 1e-12);
        assert!((pa.h.trace() - pb.h.trace()).norm() < 1e-12);
    }

    #[test]
    fn generation_is_deterministic() {
        for f in Family::all() {
            let a = f.generate(&mut seeded(9));
            let b = f.generate(&mut seeded(9));
            assert_eq!(a, b);
        }
    }
}
