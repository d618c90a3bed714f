//! Hermitian spectral calculus.
//!
//! Eigendecomposition per block with eigenvalue clustering, matrix functions
//! `f(h) = Σ f(λ_j) p_j`, and spectral interval partitions. The clustered
//! decomposition is the finite realization of a spectral measure: the scalar
//! measure behind `τ(f(h))` is the list of pairs `(λ_j, τ(p_j))`.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::algebra::{BlockOperator, ResolutionOfIdentity, TracialAlgebra};
use crate::error::{Error, Result};

/// Default eigenvalue clustering tolerance: separates genuine degeneracy
/// from eigensolver noise at double precision.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-8;

/// Reconstruction tolerance factor for `Σ λ_j p_j ≈ h`.
pub const TOL_RECON: f64 = 1e-8;

/// Clamping window for nominally positive operators: eigenvalues in
/// `[-tol_psd(h), 0)` are treated as 0.
pub fn tol_psd(operator_norm: f64) -> f64 {
    1e-10 * (1.0 + operator_norm)
}

/// Convexity declaration for a scalar function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convexity {
    Convex,
    Concave,
    Neither,
}

/// Scalar functions applied through the spectral calculus.
///
/// The catalog covers the functionals used throughout: `t·log t` (0·log 0 = 0),
/// powers `t^α`, the restricted logarithm (`log t` for t > 0, 0 at t = 0),
/// `exp`, and the identity. `Custom` carries a user-asserted convexity flag;
/// the library spot-checks midpoint convexity on the spectrum it is applied
/// to and logs a warning on violation, but does not decide convexity itself.
#[derive(Clone)]
pub enum ScalarFunction {
    TLogT,
    Power(f64),
    LogRestricted,
    Exp,
    Identity,
    Custom {
        name: String,
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        convexity: Convexity,
        nonnegative_domain: bool,
    },
}

impl fmt::Debug for ScalarFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ScalarFunction({})", self.name())
    }
}

impl ScalarFunction {
    pub fn power(alpha: f64) -> Result<Self> {
        if alpha <= 0.0 || alpha == 1.0 || !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "power exponent must be positive and != 1, got {alpha}"
            )));
        }
        Ok(ScalarFunction::Power(alpha))
    }

    pub fn name(&self) -> String {
        match self {
            ScalarFunction::TLogT => "t_log_t".into(),
            ScalarFunction::Power(a) => format!("power({a})"),
            ScalarFunction::LogRestricted => "log_restricted".into(),
            ScalarFunction::Exp => "exp".into(),
            ScalarFunction::Identity => "identity".into(),
            ScalarFunction::Custom { name, .. } => format!("custom({name})"),
        }
    }

    /// Parse a catalog name: `t_log_t`, `exp`, `identity`, `log_restricted`,
    /// or a power spelled `power2`, `power0.5`, `power:2`, `power(2)`.
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "t_log_t" => Ok(ScalarFunction::TLogT),
            "exp" => Ok(ScalarFunction::Exp),
            "identity" => Ok(ScalarFunction::Identity),
            "log_restricted" => Ok(ScalarFunction::LogRestricted),
            _ => {
                let rest = name
                    .strip_prefix("power:")
                    .or_else(|| name.strip_prefix("power"))
                    .ok_or_else(|| {
                        Error::InvalidParameter(format!(
                            "unknown function '{name}' (t_log_t, exp, identity, powerA)"
                        ))
                    })?;
                let alpha: f64 = rest.trim_matches(['(', ')']).parse().map_err(|_| {
                    Error::InvalidParameter(format!("cannot parse power exponent in '{name}'"))
                })?;
                ScalarFunction::power(alpha)
            }
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            ScalarFunction::TLogT => {
                if t == 0.0 {
                    0.0
                } else {
                    t * t.ln()
                }
            }
            ScalarFunction::Power(a) => t.powf(*a),
            ScalarFunction::LogRestricted => {
                if t > 0.0 {
                    t.ln()
                } else {
                    0.0
                }
            }
            ScalarFunction::Exp => t.exp(),
            ScalarFunction::Identity => t,
            ScalarFunction::Custom { f, .. } => f(t),
        }
    }

    pub fn convexity(&self) -> Convexity {
        match self {
            ScalarFunction::TLogT => Convexity::Convex,
            ScalarFunction::Power(a) => {
                if *a > 1.0 {
                    Convexity::Convex
                } else {
                    Convexity::Concave
                }
            }
            // log t with the 0 ↦ 0 convention is neither convex nor concave
            // on [0, ∞); it is a spectral transform, not a Jensen function.
            ScalarFunction::LogRestricted => Convexity::Neither,
            ScalarFunction::Exp => Convexity::Convex,
            ScalarFunction::Identity => Convexity::Convex,
            ScalarFunction::Custom { convexity, .. } => *convexity,
        }
    }

    /// Whether the function is only defined on `[0, ∞)`. Integer powers
    /// extend to the whole line (t², t³ are plain polynomials); fractional
    /// powers do not.
    pub fn nonnegative_domain(&self) -> bool {
        match self {
            ScalarFunction::TLogT | ScalarFunction::LogRestricted => true,
            ScalarFunction::Power(a) => a.fract() != 0.0,
            ScalarFunction::Exp | ScalarFunction::Identity => false,
            ScalarFunction::Custom {
                nonnegative_domain, ..
            } => *nonnegative_domain,
        }
    }

    /// Midpoint convexity spot-check for `Custom` entries over `[lo, hi]`.
    /// Warns (does not fail): the flag is a hypothesis the caller asserts.
    pub fn spot_check_convexity(&self, lo: f64, hi: f64) {
        let ScalarFunction::Custom {
            name, f, convexity, ..
        } = self
        else {
            return;
        };
        if hi <= lo || *convexity == Convexity::Neither {
            return;
        }
        let n = 8;
        for i in 0..n {
            for j in (i + 1)..=n {
                let a = lo + (hi - lo) * i as f64 / n as f64;
                let b = lo + (hi - lo) * j as f64 / n as f64;
                let mid = f(0.5 * (a + b));
                let chord = 0.5 * (f(a) + f(b));
                let slack = 1e-9 * (1.0 + mid.abs() + chord.abs());
                let violated = match convexity {
                    Convexity::Convex => mid > chord + slack,
                    Convexity::Concave => mid < chord - slack,
                    Convexity::Neither => false,
                };
                if violated {
                    log::warn!(
                        "custom function {name}: declared {convexity:?} but midpoint check fails on [{a}, {b}]"
                    );
                    return;
                }
            }
        }
    }
}

/// One eigenvalue with its (possibly degenerate) spectral projection.
#[derive(Debug, Clone)]
pub struct Eigenpair {
    pub value: f64,
    pub projection: BlockOperator,
}

/// A finite spectral decomposition `h = Σ λ_j p_j` with strictly increasing
/// eigenvalues; the projections form a resolution of identity.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    algebra: Arc<TracialAlgebra>,
    pairs: Vec<Eigenpair>,
    cluster_tol: f64,
    operator_norm: f64,
}

impl SpectralDecomposition {
    pub fn algebra(&self) -> &Arc<TracialAlgebra> {
        &self.algebra
    }

    pub fn pairs(&self) -> &[Eigenpair] {
        &self.pairs
    }

    pub fn eigenvalues(&self) -> impl Iterator<Item = f64> + '_ {
        self.pairs.iter().map(|p| p.value)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.pairs.first().map(|p| p.value).unwrap_or(0.0)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.pairs.last().map(|p| p.value).unwrap_or(0.0)
    }

    pub fn cluster_tol(&self) -> f64 {
        self.cluster_tol
    }

    /// Operator norm of the decomposed operator (max |λ| before clustering).
    pub fn operator_norm(&self) -> f64 {
        self.operator_norm
    }

    /// The scalar spectral measure: pairs `(λ_j, τ(p_j))`.
    pub fn scalar_measure(&self) -> Vec<(f64, f64)> {
        self.pairs
            .iter()
            .map(|p| (p.value, p.projection.re_trace()))
            .collect()
    }

    pub fn resolution(&self) -> ResolutionOfIdentity {
        ResolutionOfIdentity::new(self.pairs.iter().map(|p| p.projection.clone()).collect())
            .expect("spectral projections share the algebra")
    }

    /// `Σ λ_j p_j`.
    pub fn reconstruct(&self) -> BlockOperator {
        let mut acc = BlockOperator::zero(self.algebra.clone());
        for p in &self.pairs {
            acc = acc
                .add(&p.projection.scale(p.value))
                .expect("same algebra");
        }
        acc
    }

    /// `Σ f(λ_j) p_j`, with domain clamping for nonnegative-domain functions:
    /// eigenvalues in `[-tol_psd, 0)` are clamped to 0, anything lower is a
    /// domain error naming the offending eigenvalue.
    pub fn apply(&self, f: &ScalarFunction) -> Result<BlockOperator> {
        let values = self.domain_checked_values(f)?;
        f.spot_check_convexity(self.min_eigenvalue().max(0.0), self.max_eigenvalue());
        let mut acc = BlockOperator::zero(self.algebra.clone());
        for (p, v) in self.pairs.iter().zip(values) {
            acc = acc.add(&p.projection.scale(f.eval(v))).expect("same algebra");
        }
        Ok(acc)
    }

    /// `Σ f(λ_j) τ(p_j)`: the trace of `apply(f)` computed on the scalar
    /// measure directly.
    pub fn trace_of_function(&self, f: &ScalarFunction) -> Result<f64> {
        let values = self.domain_checked_values(f)?;
        Ok(self
            .pairs
            .iter()
            .zip(values)
            .map(|(p, v)| f.eval(v) * p.projection.re_trace())
            .sum())
    }

    fn domain_checked_values(&self, f: &ScalarFunction) -> Result<Vec<f64>> {
        let clamp = tol_psd(self.operator_norm);
        self.pairs
            .iter()
            .map(|p| {
                if f.nonnegative_domain() && p.value < 0.0 {
                    if p.value >= -clamp {
                        Ok(0.0)
                    } else {
                        Err(Error::DomainViolation {
                            function: f.name(),
                            eigenvalue: p.value,
                        })
                    }
                } else {
                    Ok(p.value)
                }
            })
            .collect()
    }

    /// Clamp eigenvalues in `[-tol_psd, 0)` to zero, merging the clamped
    /// clusters with an exact zero cluster if one exists. Values below the
    /// clamp window are left untouched; callers reject those beforehand.
    pub fn clamp_nonnegative(&self) -> SpectralDecomposition {
        let clamp = tol_psd(self.operator_norm);
        let mut pairs: Vec<Eigenpair> = Vec::with_capacity(self.pairs.len());
        for p in &self.pairs {
            let value = if p.value < 0.0 && p.value >= -clamp {
                0.0
            } else {
                p.value
            };
            match pairs.last_mut() {
                Some(last) if last.value == value => {
                    last.projection = last.projection.add(&p.projection).expect("same algebra");
                }
                _ => pairs.push(Eigenpair {
                    value,
                    projection: p.projection.clone(),
                }),
            }
        }
        SpectralDecomposition {
            algebra: self.algebra.clone(),
            pairs,
            cluster_tol: self.cluster_tol,
            operator_norm: self.operator_norm,
        }
    }

    /// Projection onto the kernel (eigenvalue 0 after clamping), if any.
    pub fn kernel_projection(&self, clamp: f64) -> Option<BlockOperator> {
        let mut acc: Option<BlockOperator> = None;
        for p in &self.pairs {
            if p.value.abs() <= clamp {
                acc = Some(match acc {
                    None => p.projection.clone(),
                    Some(a) => a.add(&p.projection).expect("same algebra"),
                });
            }
        }
        acc
    }

    /// Projection onto the support (eigenvalues above the clamp).
    pub fn support_projection(&self, clamp: f64) -> BlockOperator {
        let mut acc = BlockOperator::zero(self.algebra.clone());
        for p in &self.pairs {
            if p.value.abs() > clamp {
                acc = acc.add(&p.projection).expect("same algebra");
            }
        }
        acc
    }
}

/// Eigendecompose a hermitian block operator, merging eigenvalues that lie
/// within `cluster_tol · (1 + ‖h‖)` of each other into a single eigenvalue
/// (their trace-weighted mean) with summed projection.
pub fn eigendecompose(h: &BlockOperator, cluster_tol: f64) -> Result<SpectralDecomposition> {
    h.require_hermitian()?;
    let algebra = h.algebra().clone();

    // raw (eigenvalue, block, eigenvector) triples, hermitized per block to
    // shave off roundoff before the solver
    let mut raw: Vec<(f64, usize, nalgebra::DVector<Complex64>)> = Vec::new();
    for (bi, m) in h.blocks().iter().enumerate() {
        let sym = (m + m.adjoint()).map(|z| z * 0.5);
        let eig = SymmetricEigen::new(sym);
        for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
            raw.push((lambda, bi, eig.eigenvectors.column(k).into_owned()));
        }
    }
    raw.sort_by(|a, b| a.0.total_cmp(&b.0));

    let norm = raw
        .iter()
        .map(|(l, _, _)| l.abs())
        .fold(0.0f64, f64::max);
    let gap = cluster_tol * (1.0 + norm);

    let mut pairs: Vec<Eigenpair> = Vec::new();
    let mut i = 0;
    while i < raw.len() {
        let mut j = i + 1;
        while j < raw.len() && raw[j].0 - raw[j - 1].0 <= gap {
            j += 1;
        }
        // cluster raw[i..j]: trace-weighted mean eigenvalue, summed projection
        let mut blocks: Vec<DMatrix<Complex64>> = algebra
            .blocks()
            .iter()
            .map(|b| DMatrix::zeros(b.dim, b.dim))
            .collect();
        let mut weighted = 0.0;
        let mut total_weight = 0.0;
        for (lambda, bi, v) in &raw[i..j] {
            let w = algebra.blocks()[*bi].weight;
            weighted += lambda * w;
            total_weight += w;
            let outer = v * v.adjoint();
            blocks[*bi] += outer;
        }
        let projection = BlockOperator::new(algebra.clone(), blocks)?;
        pairs.push(Eigenpair {
            value: weighted / total_weight,
            projection,
        });
        i = j;
    }

    Ok(SpectralDecomposition {
        algebra,
        pairs,
        cluster_tol,
        operator_norm: norm,
    })
}

/// `f(h)` through the spectral calculus at the default clustering tolerance.
pub fn apply_function(f: &ScalarFunction, h: &BlockOperator) -> Result<BlockOperator> {
    eigendecompose(h, DEFAULT_CLUSTER_TOL)?.apply(f)
}

/// Split a projection into rank-one pieces `v v*` over its range, in
/// block-then-eigenvector order. The number of pieces is the rank.
pub fn rank_one_projections(p: &BlockOperator) -> Result<Vec<BlockOperator>> {
    p.require_hermitian()?;
    let algebra = p.algebra().clone();
    let mut out = Vec::new();
    for (bi, m) in p.blocks().iter().enumerate() {
        let sym = (m + m.adjoint()).map(|z| z * 0.5);
        let eig = SymmetricEigen::new(sym);
        for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
            if lambda > 0.5 {
                let v = eig.eigenvectors.column(k).into_owned();
                let mut blocks: Vec<DMatrix<Complex64>> = algebra
                    .blocks()
                    .iter()
                    .map(|b| DMatrix::zeros(b.dim, b.dim))
                    .collect();
                blocks[bi] = &v * v.adjoint();
                out.push(BlockOperator::new(algebra.clone(), blocks)?);
            }
        }
    }
    Ok(out)
}

/// Group the spectral projections of `d` by the intervals
/// `[0, b_1), [b_1, b_2), …, [b_k, ∞)` cut by sorted `boundaries`.
/// Intervals capturing no eigenvalue are dropped, so every returned
/// projection has positive trace.
pub fn spectral_interval_partition(
    d: &SpectralDecomposition,
    boundaries: &[f64],
) -> Result<ResolutionOfIdentity> {
    if boundaries.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(
            "interval boundaries must be strictly increasing".into(),
        ));
    }
    let clamp = tol_psd(d.operator_norm());
    let mut cells: Vec<Option<BlockOperator>> = vec![None; boundaries.len() + 1];
    for p in d.pairs() {
        let lambda = p.value;
        if lambda < -clamp {
            return Err(Error::DomainViolation {
                function: "interval partition of [0, ∞)".into(),
                eigenvalue: lambda,
            });
        }
        let lambda = lambda.max(0.0);
        let cell = boundaries.partition_point(|&b| b <= lambda);
        cells[cell] = Some(match cells[cell].take() {
            None => p.projection.clone(),
            Some(a) => a.add(&p.projection)?,
        });
    }
    let projections: Vec<BlockOperator> = cells.into_iter().flatten().collect();
    ResolutionOfIdentity::new(projections)
}
