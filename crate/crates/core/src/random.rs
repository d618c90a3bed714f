//! Seeded random instances: Haar unitaries, densities, hermitian operators,
//! PSD operators and resolutions of identity.
//!
//! Everything is driven by a caller-supplied RNG; certificate searches use
//! one ChaCha stream per candidate so that sampling is reproducible and
//! parallelisable at the same time.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::algebra::{BlockOperator, ResolutionOfIdentity, TracialAlgebra};
use crate::entropy::DensityOperator;
use crate::error::{Error, Result};

use std::sync::Arc;

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the phase
/// fix `Q ← Q · diag(r_jj / |r_jj|)`.
pub fn haar_unitary_matrix<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<Complex64> {
    let mut g = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            g[(i, j)] = Complex64::new(re, im);
        }
    }
    let qr = g.qr();
    let r = qr.r();
    let mut u = qr.q();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..dim {
            u[(i, j)] *= phase;
        }
    }
    u
}

/// Independent Haar unitary on every block.
pub fn haar_unitary<R: Rng + ?Sized>(algebra: &Arc<TracialAlgebra>, rng: &mut R) -> BlockOperator {
    let blocks = algebra
        .blocks()
        .iter()
        .map(|b| haar_unitary_matrix(b.dim, rng))
        .collect();
    BlockOperator::new(algebra.clone(), blocks).expect("shapes match by construction")
}

fn conjugated_diagonal<R: Rng + ?Sized>(
    algebra: &Arc<TracialAlgebra>,
    eigenvalues: &[f64],
    rng: &mut R,
) -> BlockOperator {
    let mut blocks = Vec::with_capacity(algebra.num_blocks());
    let mut offset = 0;
    for b in algebra.blocks() {
        let u = haar_unitary_matrix(b.dim, rng);
        let mut d = DMatrix::zeros(b.dim, b.dim);
        for j in 0..b.dim {
            d[(j, j)] = Complex64::new(eigenvalues[offset + j], 0.0);
        }
        offset += b.dim;
        blocks.push(&u * d * u.adjoint());
    }
    BlockOperator::new(algebra.clone(), blocks).expect("shapes match by construction")
}

/// Normalised random density: a Dirichlet(1,…,1) spectrum scaled by the
/// block weights so that `τ(D) = 1`, conjugated by per-block Haar unitaries.
/// Full support almost surely.
pub fn random_density<R: Rng + ?Sized>(
    algebra: &Arc<TracialAlgebra>,
    rng: &mut R,
) -> DensityOperator {
    let n = algebra.total_dim();
    let mut x: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = x.iter().sum();
    let mut offset = 0;
    for b in algebra.blocks() {
        for j in 0..b.dim {
            x[offset + j] /= total * b.weight;
        }
        offset += b.dim;
    }
    DensityOperator::new(conjugated_diagonal(algebra, &x, rng))
        .expect("spectrum is positive by construction")
}

/// Gaussian hermitian operator `(G + G*)/2` with standard complex normal
/// entries, blockwise.
pub fn random_hermitian<R: Rng + ?Sized>(
    algebra: &Arc<TracialAlgebra>,
    rng: &mut R,
) -> BlockOperator {
    let blocks = algebra
        .blocks()
        .iter()
        .map(|b| {
            let mut g = DMatrix::zeros(b.dim, b.dim);
            for i in 0..b.dim {
                for j in 0..b.dim {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    g[(i, j)] = Complex64::new(re, im);
                }
            }
            (&g + g.adjoint()).map(|z| z * 0.5)
        })
        .collect();
    BlockOperator::new(algebra.clone(), blocks).expect("shapes match by construction")
}

/// Random PSD operator with Exp(1) spectrum conjugated by Haar unitaries.
pub fn random_psd<R: Rng + ?Sized>(algebra: &Arc<TracialAlgebra>, rng: &mut R) -> BlockOperator {
    let n = algebra.total_dim();
    let eigs: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    conjugated_diagonal(algebra, &eigs, rng)
}

/// Coordinate projections conjugated by per-block Haar unitaries and grouped
/// round-robin into `cells` nonempty cells (so every cell has positive trace).
pub fn random_resolution<R: Rng + ?Sized>(
    algebra: &Arc<TracialAlgebra>,
    cells: usize,
    rng: &mut R,
) -> Result<ResolutionOfIdentity> {
    let n = algebra.total_dim();
    if cells == 0 || cells > n {
        return Err(Error::InvalidParameter(format!(
            "cells must lie in 1..={n}, got {cells}"
        )));
    }
    let mut acc: Vec<Option<BlockOperator>> = vec![None; cells];
    let mut k = 0usize;
    for (bi, b) in algebra.blocks().iter().enumerate() {
        let u = haar_unitary_matrix(b.dim, rng);
        for j in 0..b.dim {
            let v = u.column(j).into_owned();
            let mut blocks: Vec<DMatrix<Complex64>> = algebra
                .blocks()
                .iter()
                .map(|bb| DMatrix::zeros(bb.dim, bb.dim))
                .collect();
            blocks[bi] = &v * v.adjoint();
            let rank_one = BlockOperator::new(algebra.clone(), blocks)?;
            let cell = k % cells;
            acc[cell] = Some(match acc[cell].take() {
                None => rank_one,
                Some(p) => p.add(&rank_one)?,
            });
            k += 1;
        }
    }
    let projections: Vec<BlockOperator> = acc.into_iter().map(|p| p.expect("cells <= n")).collect();
    ResolutionOfIdentity::new(projections)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::TOL_PROJ;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn alg() -> Arc<TracialAlgebra> {
        TracialAlgebra::new([(2, 1.0), (3, 0.5)]).unwrap().shared()
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let u = haar_unitary(&alg(), &mut rng);
        let uu = u.multiply(&u.adjoint()).unwrap();
        let id = BlockOperator::identity(alg());
        assert!(uu.max_abs_diff(&id).unwrap() < 1e-12);
    }

    #[test]
    fn random_density_is_normalised() {
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        for _ in 0..10 {
            let d = random_density(&alg(), &mut rng);
            assert!(d.is_normalised());
            assert!(d.spectral().min_eigenvalue() > 0.0);
        }
    }

    #[test]
    fn random_hermitian_is_hermitian() {
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        let h = random_hermitian(&alg(), &mut rng);
        assert!(h.herm_residual() < 1e-14);
    }

    #[test]
    fn random_psd_is_psd() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let h = random_psd(&alg(), &mut rng);
        let spec = crate::spectral::eigendecompose(&h, crate::spectral::DEFAULT_CLUSTER_TOL)
            .unwrap();
        assert!(spec.min_eigenvalue() >= -1e-12);
    }

    #[test]
    fn random_resolution_is_valid() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        for cells in 1..=5 {
            let r = random_resolution(&alg(), cells, &mut rng).unwrap();
            assert_eq!(r.len(), cells);
            assert!(r.validate(TOL_PROJ).is_empty(), "cells={cells}");
        }
    }

    #[test]
    fn random_resolution_rejects_bad_cell_counts() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        assert!(random_resolution(&alg(), 0, &mut rng).is_err());
        assert!(random_resolution(&alg(), 6, &mut rng).is_err());
    }

    #[test]
    fn seeded_generation_is_deterministic() {
        let a = random_density(&alg(), &mut ChaCha12Rng::seed_from_u64(42));
        let b = random_density(&alg(), &mut ChaCha12Rng::seed_from_u64(42));
        assert_eq!(a.operator().max_abs_diff(b.operator()).unwrap(), 0.0);
    }
}
