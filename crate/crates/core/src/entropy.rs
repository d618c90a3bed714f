//! Entropy-like trace functionals for density operators.
//!
//! The entropy `H(ω) = τ(D log D)` follows the sign convention without a
//! leading minus, so for the unnormalised trace it is typically negative.
//! Relative entropy is `S(ω, φ) = τ(D_ω log D_ω − D_ω log D_φ)` and requires
//! the support of `D_ω` to be dominated by the support of `D_φ`; instead of
//! returning +∞ on violation the library fails loudly. Rényi entropies are
//! `R_α = (α−1)⁻¹ log τ(D^α)` for normalised states.

use std::sync::Arc;

use serde::Serialize;

use crate::algebra::{BlockOperator, TracialAlgebra};
use crate::error::{Error, Result};
use crate::spectral::{
    eigendecompose, tol_psd, ScalarFunction, SpectralDecomposition, DEFAULT_CLUSTER_TOL,
};

/// Normalisation tolerance `|τ(D) − 1| ≤ TOL_NORM`.
pub const TOL_NORM: f64 = 1e-9;

/// A positive semidefinite block operator with cached spectral data.
///
/// Construction clamps eigenvalues in the roundoff window `[-tol_psd, 0)`
/// to zero and rebuilds the operator from the clamped decomposition, so the
/// stored operator and spectrum agree exactly.
#[derive(Debug, Clone)]
pub struct DensityOperator {
    op: BlockOperator,
    spectral: SpectralDecomposition,
    trace: f64,
    normalised: bool,
}

impl DensityOperator {
    pub fn new(op: BlockOperator) -> Result<Self> {
        Self::with_cluster_tol(op, DEFAULT_CLUSTER_TOL)
    }

    pub fn with_cluster_tol(op: BlockOperator, cluster_tol: f64) -> Result<Self> {
        let raw = eigendecompose(&op, cluster_tol)?;
        let clamp = tol_psd(raw.operator_norm());
        if raw.min_eigenvalue() < -clamp {
            return Err(Error::NotPositive {
                eigenvalue: raw.min_eigenvalue(),
            });
        }
        // rebuild with clamped eigenvalues so op == Σ λ p exactly
        let clamped = raw.clamp_nonnegative();
        let op = clamped.reconstruct();
        let trace: f64 = clamped
            .scalar_measure()
            .iter()
            .map(|(l, t)| l * t)
            .sum();
        if trace <= 0.0 || trace.is_nan() {
            return Err(Error::InvalidParameter(format!(
                "density has non-positive trace {trace}"
            )));
        }
        let normalised = (trace - 1.0).abs() <= TOL_NORM;
        Ok(DensityOperator {
            op,
            spectral: clamped,
            trace,
            normalised,
        })
    }

    pub fn operator(&self) -> &BlockOperator {
        &self.op
    }

    pub fn algebra(&self) -> &Arc<TracialAlgebra> {
        self.op.algebra()
    }

    pub fn spectral(&self) -> &SpectralDecomposition {
        &self.spectral
    }

    /// `τ(D)`, cached at construction.
    pub fn trace(&self) -> f64 {
        self.trace
    }

    pub fn is_normalised(&self) -> bool {
        self.normalised
    }

    pub fn require_normalised(&self) -> Result<()> {
        if self.normalised {
            Ok(())
        } else {
            Err(Error::NotNormalised { trace: self.trace })
        }
    }

    /// Spectral projection onto the strictly positive part of the spectrum.
    pub fn support_projection(&self) -> BlockOperator {
        self.spectral.support_projection(0.0)
    }

    /// Spectral projection onto the kernel, if the kernel is nontrivial.
    pub fn kernel_projection(&self) -> Option<BlockOperator> {
        self.spectral.kernel_projection(0.0)
    }
}

/// `H(ω) = τ(D log D) = Σ λ_j log λ_j · τ(p_j)` with `0 log 0 = 0`.
pub fn segal_entropy(d: &DensityOperator) -> f64 {
    d.spectral()
        .scalar_measure()
        .iter()
        .map(|&(l, t)| if l > 0.0 { l * l.ln() * t } else { 0.0 })
        .sum()
}

/// `S(ω, φ) = τ(D_ω log D_ω − D_ω log D_φ)`.
///
/// Requires the support of `D_ω` to be dominated by the support of `D_φ`:
/// the part of `D_ω`'s support orthogonal to `D_φ`'s support must have
/// operator norm at most 1e-8, otherwise `support_not_dominated` is raised.
pub fn relative_entropy(omega: &DensityOperator, phi: &DensityOperator) -> Result<f64> {
    if omega.algebra() != phi.algebra() {
        return Err(Error::AlgebraMismatch);
    }
    let phi_support = phi.support_projection();
    let complement = BlockOperator::identity(omega.algebra().clone())
        .sub(&phi_support)
        .expect("same algebra");
    let leak = complement
        .multiply(&omega.support_projection())
        .expect("same algebra")
        .operator_norm();
    if leak > 1e-8 {
        return Err(Error::SupportNotDominated { residual: leak });
    }
    let log_phi = phi.spectral().apply(&ScalarFunction::LogRestricted)?;
    let cross = omega.operator().multiply(&log_phi)?.re_trace();
    Ok(segal_entropy(omega) - cross)
}

/// `R_α(ω) = (α−1)⁻¹ log τ(D^α)` for a normalised state and
/// `α ∈ (0,1) ∪ (1,∞)`.
pub fn renyi_entropy(d: &DensityOperator, alpha: f64) -> Result<f64> {
    check_renyi_alpha(alpha)?;
    d.require_normalised()?;
    let power_trace: f64 = d
        .spectral()
        .scalar_measure()
        .iter()
        .map(|&(l, t)| if l > 0.0 { l.powf(alpha) * t } else { 0.0 })
        .sum();
    Ok(power_trace.ln() / (alpha - 1.0))
}

pub fn check_renyi_alpha(alpha: f64) -> Result<()> {
    if alpha <= 0.0 || alpha == 1.0 || !alpha.is_finite() {
        Err(Error::InvalidParameter(format!(
            "Rényi order must lie in (0,1) ∪ (1,∞), got {alpha}"
        )))
    } else {
        Ok(())
    }
}

/// `τ(f(h)) = Σ f(λ_j) τ(p_j)` for hermitian `h` with spectrum in the
/// domain of `f`.
pub fn trace_functional(f: &ScalarFunction, h: &BlockOperator) -> Result<f64> {
    eigendecompose(h, DEFAULT_CLUSTER_TOL)?.trace_of_function(f)
}

/// A serialisable record of one functional evaluation.
#[derive(Debug, Clone, Serialize)]
pub struct EntropyReport {
    pub functional: String,
    pub value: f64,
    pub alpha: Option<f64>,
    pub f: Option<String>,
    pub input_digest: String,
}

impl EntropyReport {
    pub fn new(functional: &str, value: f64, input_digest: String) -> Self {
        EntropyReport {
            functional: functional.into(),
            value,
            alpha: None,
            f: None,
            input_digest,
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = Some(alpha);
        self
    }

    pub fn with_function(mut self, f: &ScalarFunction) -> Self {
        self.f = Some(f.name());
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::TracialAlgebra;
    use crate::oracle::oracle_entropy_commuting;

    fn density(blocks: &[(usize, f64)], diag: &[f64]) -> DensityOperator {
        let alg = TracialAlgebra::new(blocks.iter().copied()).unwrap().shared();
        DensityOperator::new(BlockOperator::from_real_diagonal(alg, diag).unwrap()).unwrap()
    }

    #[test]
    fn pure_state_has_zero_entropy() {
        let d = density(&[(2, 1.0)], &[1.0, 0.0]);
        assert_eq!(segal_entropy(&d), 0.0);
    }

    #[test]
    fn uniform_state_entropy() {
        let d = density(&[(2, 1.0)], &[0.5, 0.5]);
        let expected = oracle_entropy_commuting(&[(0.5, 1.0), (0.5, 1.0)]).unwrap();
        assert!((segal_entropy(&d) - expected).abs() < 1e-14);
        assert!((segal_entropy(&d) + std::f64::consts::LN_2).abs() < 1e-14);
    }

    #[test]
    fn skewed_state_entropy() {
        let d = density(&[(2, 1.0)], &[0.75, 0.25]);
        let expected = oracle_entropy_commuting(&[(0.75, 1.0), (0.25, 1.0)]).unwrap();
        assert!((segal_entropy(&d) - expected).abs() < 1e-14);
        assert!((segal_entropy(&d) - (-0.5623351446188083)).abs() < 1e-12);
    }

    #[test]
    fn weighted_block_entropy() {
        // one block of dim 1 with weight 2; D = 0.5 has τ(D) = 1
        let d = density(&[(1, 2.0)], &[0.5]);
        assert!(d.is_normalised());
        let expected = oracle_entropy_commuting(&[(0.5, 2.0)]).unwrap();
        assert!((segal_entropy(&d) - expected).abs() < 1e-14);
    }

    #[test]
    fn relative_entropy_of_identical_states_vanishes() {
        let d = density(&[(2, 1.0)], &[0.75, 0.25]);
        let s = relative_entropy(&d, &d).unwrap();
        assert!(s.abs() <= 1e-12, "S(ω,ω) = {s}");
    }

    #[test]
    fn relative_entropy_commuting_closed_form() {
        let omega = density(&[(2, 1.0)], &[0.75, 0.25]);
        let phi = density(&[(2, 1.0)], &[0.5, 0.5]);
        let s = relative_entropy(&omega, &phi).unwrap();
        // Σ λ_i log(λ_i/μ_i), frozen from scalar arithmetic
        assert!((s - 0.13081203594113697).abs() < 1e-12, "s={s}");
    }

    #[test]
    fn disjoint_supports_rejected() {
        let omega = density(&[(2, 1.0)], &[1.0, 0.0]);
        let phi = density(&[(2, 1.0)], &[0.0, 1.0]);
        assert!(matches!(
            relative_entropy(&omega, &phi),
            Err(Error::SupportNotDominated { .. })
        ));
    }

    #[test]
    fn renyi_uniform_alpha_2() {
        let d = density(&[(2, 1.0)], &[0.5, 0.5]);
        let r = renyi_entropy(&d, 2.0).unwrap();
        assert!((r - (-std::f64::consts::LN_2)).abs() < 1e-14);
    }

    #[test]
    fn renyi_skewed_alpha_2() {
        let d = density(&[(2, 1.0)], &[0.75, 0.25]);
        let r = renyi_entropy(&d, 2.0).unwrap();
        assert!((r - (-0.4700036292457356)).abs() < 1e-12);
    }

    #[test]
    fn renyi_pure_state_is_zero() {
        let d = density(&[(2, 1.0)], &[1.0, 0.0]);
        for alpha in [0.5, 2.0, 3.0] {
            assert!(renyi_entropy(&d, alpha).unwrap().abs() < 1e-14);
        }
    }

    #[test]
    fn renyi_parameter_checks() {
        let d = density(&[(2, 1.0)], &[0.5, 0.5]);
        assert!(renyi_entropy(&d, 1.0).is_err());
        assert!(renyi_entropy(&d, 0.0).is_err());
        assert!(renyi_entropy(&d, -1.0).is_err());
        let unnormalised = density(&[(2, 1.0)], &[0.5, 0.25]);
        assert!(matches!(
            renyi_entropy(&unnormalised, 2.0),
            Err(Error::NotNormalised { .. })
        ));
    }

    #[test]
    fn trace_functional_closed_forms() {
        let alg = TracialAlgebra::full(2);
        let h = BlockOperator::from_real_diagonal(alg, &[0.75, 0.25]).unwrap();
        let sqrt = trace_functional(&ScalarFunction::power(0.5).unwrap(), &h).unwrap();
        assert!((sqrt - 1.3660254037844386).abs() < 1e-12);

        let d = density(&[(2, 1.0)], &[0.75, 0.25]);
        let tlogt = trace_functional(&ScalarFunction::TLogT, d.operator()).unwrap();
        assert!((tlogt - segal_entropy(&d)).abs() < 1e-12);

        let id = trace_functional(&ScalarFunction::Identity, &h).unwrap();
        assert!((id - h.re_trace()).abs() < 1e-14);
    }

    #[test]
    fn density_rejects_indefinite_operators() {
        let alg = TracialAlgebra::full(2);
        let x = BlockOperator::from_real_diagonal(alg, &[1.0, -0.5]).unwrap();
        assert!(matches!(
            DensityOperator::new(x),
            Err(Error::NotPositive { .. })
        ));
    }

    #[test]
    fn density_clamps_roundoff_negatives() {
        let alg = TracialAlgebra::full(2);
        let x = BlockOperator::from_real_diagonal(alg, &[1.0, -1e-13]).unwrap();
        let d = DensityOperator::new(x).unwrap();
        assert!(d.spectral().min_eigenvalue() >= 0.0);
        assert!((d.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn entropy_report_serialises() {
        let report = EntropyReport::new("segal", -0.5, "abcd".into()).with_alpha(2.0);
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains("\"functional\":\"segal\""));
        assert!(json.contains("\"alpha\":2.0") || json.contains("\"alpha\":2"));
        assert!(json.contains("\"f\":null"));
    }
}
