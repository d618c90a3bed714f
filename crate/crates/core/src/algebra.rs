//! Finite-dimensional tracial algebras and block operators.
//!
//! The ambient algebra is a finite direct sum of full matrix blocks
//! `⊕_b M_{d_b}(ℂ)` carrying the weighted trace `τ(x) = Σ_b w_b · tr(x_b)`
//! with strictly positive weights (so τ is faithful). Every operator,
//! projection and density in this crate lives in such an algebra; the
//! weights are how semifinite (non-normalised) traces are modelled at
//! finite scale.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Hermiticity / projection tolerance in operator norm, relative to `1 + ‖x‖`.
pub const TOL_HERM: f64 = 1e-9;
pub const TOL_PROJ: f64 = 1e-9;

/// One full matrix block `M_dim(ℂ)` with its trace weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Block {
    pub dim: usize,
    pub weight: f64,
}

/// A direct sum of matrix blocks with a faithful weighted trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TracialAlgebra {
    blocks: Vec<Block>,
}

impl TracialAlgebra {
    pub fn new(blocks: impl IntoIterator<Item = (usize, f64)>) -> Result<Self> {
        let blocks: Vec<Block> = blocks
            .into_iter()
            .map(|(dim, weight)| Block { dim, weight })
            .collect();
        if blocks.is_empty() {
            return Err(Error::InvalidAlgebra("no blocks".into()));
        }
        for b in &blocks {
            if b.dim == 0 {
                return Err(Error::InvalidAlgebra("block of dimension 0".into()));
            }
            if b.weight <= 0.0 || !b.weight.is_finite() {
                return Err(Error::InvalidAlgebra(format!(
                    "non-positive block weight {}",
                    b.weight
                )));
            }
        }
        Ok(TracialAlgebra { blocks })
    }

    /// Full matrix algebra `M_n` with the unnormalised trace (weight 1).
    pub fn full(n: usize) -> Arc<Self> {
        Arc::new(Self::new([(n, 1.0)]).expect("n >= 1"))
    }

    pub fn shared(self) -> Arc<Self> {
        Arc::new(self)
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Total Hilbert-space dimension `Σ_b d_b`.
    pub fn total_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.dim).sum()
    }

    /// `τ(1) = Σ_b w_b d_b`.
    pub fn trace_of_identity(&self) -> f64 {
        self.blocks.iter().map(|b| b.weight * b.dim as f64).sum()
    }
}

/// A block-diagonal operator over a [`TracialAlgebra`].
///
/// Operators are immutable values: all arithmetic returns fresh operators,
/// so a certificate can hold on to the exact witness it was built from.
/// Hermiticity is *not* a construction invariant (unitaries and products of
/// hermitian operators live here too); operations with a hermitian
/// precondition check it explicitly.
#[derive(Debug, Clone)]
pub struct BlockOperator {
    algebra: Arc<TracialAlgebra>,
    blocks: Vec<DMatrix<Complex64>>,
}

impl BlockOperator {
    /// Wrap per-block matrices, checking shapes against the algebra.
    pub fn new(algebra: Arc<TracialAlgebra>, blocks: Vec<DMatrix<Complex64>>) -> Result<Self> {
        if blocks.len() != algebra.num_blocks() {
            return Err(Error::BlockCountMismatch {
                expected: algebra.num_blocks(),
                got: blocks.len(),
            });
        }
        for (i, (m, b)) in blocks.iter().zip(algebra.blocks()).enumerate() {
            if m.nrows() != b.dim || m.ncols() != b.dim {
                return Err(Error::ShapeMismatch {
                    block: i,
                    dim: b.dim,
                    rows: m.nrows(),
                    cols: m.ncols(),
                });
            }
        }
        Ok(BlockOperator { algebra, blocks })
    }

    /// Like [`BlockOperator::new`] but additionally requires hermiticity
    /// within [`TOL_HERM`] relative to `1 + ‖x‖`.
    pub fn hermitian(algebra: Arc<TracialAlgebra>, blocks: Vec<DMatrix<Complex64>>) -> Result<Self> {
        let op = Self::new(algebra, blocks)?;
        op.require_hermitian()?;
        Ok(op)
    }

    pub fn zero(algebra: Arc<TracialAlgebra>) -> Self {
        let blocks = algebra
            .blocks()
            .iter()
            .map(|b| DMatrix::zeros(b.dim, b.dim))
            .collect();
        BlockOperator { algebra, blocks }
    }

    pub fn identity(algebra: Arc<TracialAlgebra>) -> Self {
        let blocks = algebra
            .blocks()
            .iter()
            .map(|b| DMatrix::identity(b.dim, b.dim))
            .collect();
        BlockOperator { algebra, blocks }
    }

    /// Diagonal operator from real entries listed block by block.
    pub fn from_real_diagonal(algebra: Arc<TracialAlgebra>, entries: &[f64]) -> Result<Self> {
        if entries.len() != algebra.total_dim() {
            return Err(Error::InvalidParameter(format!(
                "diagonal of length {} for total dimension {}",
                entries.len(),
                algebra.total_dim()
            )));
        }
        let mut blocks = Vec::with_capacity(algebra.num_blocks());
        let mut offset = 0;
        for b in algebra.blocks() {
            let mut m = DMatrix::zeros(b.dim, b.dim);
            for j in 0..b.dim {
                m[(j, j)] = Complex64::new(entries[offset + j], 0.0);
            }
            offset += b.dim;
            blocks.push(m);
        }
        Ok(BlockOperator {
            algebra,
            blocks,
        })
    }

    pub fn algebra(&self) -> &Arc<TracialAlgebra> {
        &self.algebra
    }

    pub fn blocks(&self) -> &[DMatrix<Complex64>] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &DMatrix<Complex64> {
        &self.blocks[i]
    }

    fn same_algebra(&self, other: &Self) -> Result<()> {
        if self.algebra == other.algebra {
            Ok(())
        } else {
            Err(Error::AlgebraMismatch)
        }
    }

    fn zip_blocks(
        &self,
        other: &Self,
        f: impl Fn(&DMatrix<Complex64>, &DMatrix<Complex64>) -> DMatrix<Complex64>,
    ) -> Result<Self> {
        self.same_algebra(other)?;
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| f(a, b))
            .collect();
        Ok(BlockOperator {
            algebra: self.algebra.clone(),
            blocks,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_blocks(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_blocks(other, |a, b| a - b)
    }

    /// Blockwise matrix product.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.zip_blocks(other, |a, b| a * b)
    }

    pub fn scale(&self, s: f64) -> Self {
        self.scale_complex(Complex64::new(s, 0.0))
    }

    pub fn scale_complex(&self, s: Complex64) -> Self {
        let blocks = self.blocks.iter().map(|m| m.map(|z| z * s)).collect();
        BlockOperator {
            algebra: self.algebra.clone(),
            blocks,
        }
    }

    /// Blockwise conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let blocks = self.blocks.iter().map(|m| m.adjoint()).collect();
        BlockOperator {
            algebra: self.algebra.clone(),
            blocks,
        }
    }

    /// The weighted trace `τ(x) = Σ_b w_b tr(x_b)`, with a fixed
    /// block-by-block summation order so results are deterministic.
    pub fn trace(&self) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, b) in self.blocks.iter().zip(self.algebra.blocks()) {
            let mut t = Complex64::new(0.0, 0.0);
            for j in 0..b.dim {
                t += m[(j, j)];
            }
            acc += t * b.weight;
        }
        acc
    }

    /// Real part of the trace; the full trace for hermitian operators and
    /// for products of two hermitian operators.
    pub fn re_trace(&self) -> f64 {
        self.trace().re
    }

    /// `τ(x* y)`, the L²(τ) inner product.
    pub fn tau_inner(&self, other: &Self) -> Result<Complex64> {
        Ok(self.adjoint().multiply(other)?.trace())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.blocks
            .iter()
            .map(|m| m.iter().map(|z| z.norm_sqr()).sum::<f64>())
            .sum::<f64>()
            .sqrt()
    }

    /// Operator norm: the largest singular value over all blocks.
    pub fn operator_norm(&self) -> f64 {
        self.blocks
            .iter()
            .map(|m| {
                m.clone()
                    .singular_values()
                    .iter()
                    .fold(0.0f64, |a, &s| a.max(s))
            })
            .fold(0.0f64, f64::max)
    }

    /// `‖x − x*‖` in operator norm.
    pub fn herm_residual(&self) -> f64 {
        let mut res = 0.0f64;
        for m in &self.blocks {
            let d = m - m.adjoint();
            res = res.max(
                d.singular_values().iter().fold(0.0f64, |a, &s| a.max(s)),
            );
        }
        res
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.herm_residual() <= tol * (1.0 + self.operator_norm())
    }

    pub fn require_hermitian(&self) -> Result<()> {
        let residual = self.herm_residual();
        if residual <= TOL_HERM * (1.0 + self.operator_norm()) {
            Ok(())
        } else {
            Err(Error::NotHermitian { residual })
        }
    }

    /// The hermitian part `(x + x*)/2`.
    pub fn hermitized(&self) -> Self {
        let blocks = self
            .blocks
            .iter()
            .map(|m| (m + m.adjoint()).map(|z| z * 0.5))
            .collect();
        BlockOperator {
            algebra: self.algebra.clone(),
            blocks,
        }
    }

    /// Max entry-wise distance to another operator, for exact-ish comparisons.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.same_algebra(other)?;
        let mut d = 0.0f64;
        for (a, b) in self.blocks.iter().zip(&other.blocks) {
            for (x, y) in a.iter().zip(b.iter()) {
                d = d.max((x - y).norm());
            }
        }
        Ok(d)
    }
}

/// A failed [`ResolutionOfIdentity`] invariant, with the residual norm.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub invariant: String,
    pub residual: f64,
}

impl Violation {
    fn new(invariant: impl Into<String>, residual: f64) -> Self {
        Violation {
            invariant: invariant.into(),
            residual,
        }
    }
}

/// A finite family of projections `p_1, …, p_k` intended to satisfy
/// `Σ p_i = 1`, mutual orthogonality and `τ(p_i) > 0`.
///
/// Construction only checks structure (shapes, shared algebra); the
/// mathematical invariants are reported by [`ResolutionOfIdentity::validate`]
/// so that defective families can be inspected rather than rejected blindly.
#[derive(Debug, Clone)]
pub struct ResolutionOfIdentity {
    algebra: Arc<TracialAlgebra>,
    projections: Vec<BlockOperator>,
}

impl ResolutionOfIdentity {
    pub fn new(projections: Vec<BlockOperator>) -> Result<Self> {
        let first = projections
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty resolution".into()))?;
        let algebra = first.algebra().clone();
        for p in &projections[1..] {
            if p.algebra() != &algebra {
                return Err(Error::AlgebraMismatch);
            }
        }
        Ok(ResolutionOfIdentity {
            algebra,
            projections,
        })
    }

    /// Construct and require validity within [`TOL_PROJ`].
    pub fn validated(projections: Vec<BlockOperator>) -> Result<Self> {
        let r = Self::new(projections)?;
        let violations = r.validate(TOL_PROJ);
        if violations.is_empty() {
            Ok(r)
        } else {
            Err(Error::InvalidResolution(violations))
        }
    }

    /// The single-cell resolution `{1}`.
    pub fn trivial(algebra: Arc<TracialAlgebra>) -> Self {
        let identity = BlockOperator::identity(algebra.clone());
        ResolutionOfIdentity {
            algebra,
            projections: vec![identity],
        }
    }

    /// All rank-one coordinate projections, listed block by block.
    pub fn coordinates(algebra: Arc<TracialAlgebra>) -> Self {
        let mut projections = Vec::new();
        for (bi, b) in algebra.blocks().iter().enumerate() {
            for j in 0..b.dim {
                let mut blocks: Vec<DMatrix<Complex64>> = algebra
                    .blocks()
                    .iter()
                    .map(|bb| DMatrix::zeros(bb.dim, bb.dim))
                    .collect();
                blocks[bi][(j, j)] = Complex64::new(1.0, 0.0);
                projections.push(BlockOperator {
                    algebra: algebra.clone(),
                    blocks,
                });
            }
        }
        ResolutionOfIdentity {
            algebra,
            projections,
        }
    }

    pub fn algebra(&self) -> &Arc<TracialAlgebra> {
        &self.algebra
    }

    pub fn projections(&self) -> &[BlockOperator] {
        &self.projections
    }

    pub fn len(&self) -> usize {
        self.projections.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projections.is_empty()
    }

    /// Check every invariant and return one entry per failure (empty = valid).
    ///
    /// Reported invariants: `hermitian`, `idempotent`, `mutual_orthogonality`,
    /// `sum_to_identity`, `positive_trace`.
    pub fn validate(&self, tol: f64) -> Vec<Violation> {
        let mut violations = Vec::new();
        for (i, p) in self.projections.iter().enumerate() {
            let scale = 1.0 + p.operator_norm();
            let herm = p.herm_residual();
            if herm > tol * scale {
                violations.push(Violation::new(format!("hermitian[{i}]"), herm));
            }
            let idem = p
                .multiply(p)
                .and_then(|pp| pp.sub(p))
                .map(|d| d.operator_norm())
                .unwrap_or(f64::INFINITY);
            if idem > tol * scale {
                violations.push(Violation::new(format!("idempotent[{i}]"), idem));
            }
            let t = p.re_trace();
            if t <= tol {
                violations.push(Violation::new(format!("positive_trace[{i}]"), t));
            }
        }
        for i in 0..self.projections.len() {
            for j in (i + 1)..self.projections.len() {
                let prod = self.projections[i]
                    .multiply(&self.projections[j])
                    .map(|m| m.operator_norm())
                    .unwrap_or(f64::INFINITY);
                if prod > tol * 2.0 {
                    violations.push(Violation::new(
                        format!("mutual_orthogonality[{i},{j}]"),
                        prod,
                    ));
                }
            }
        }
        let mut sum = BlockOperator::zero(self.algebra.clone());
        for p in &self.projections {
            sum = sum.add(p).expect("same algebra");
        }
        let id_res = sum
            .sub(&BlockOperator::identity(self.algebra.clone()))
            .expect("same algebra")
            .operator_norm();
        if id_res > tol * 2.0 {
            violations.push(Violation::new("sum_to_identity", id_res));
        }
        violations
    }

    pub fn is_valid(&self, tol: f64) -> bool {
        self.validate(tol).is_empty()
    }
}
