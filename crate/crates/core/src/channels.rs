//! Trace-preserving positive unital maps: pinchings (conditional
//! expectations onto the abelian subalgebra generated by a resolution of
//! identity) and mixtures of unitary conjugations, plus state restriction.
//!
//! Both implemented classes are kept self-adjoint with respect to τ —
//! pinchings are automatically, unitary mixtures by closing the family
//! under adjoints — so the density of a composed state `ω ∘ Φ` is simply
//! `Φ(D_ω)`.

use crate::algebra::{BlockOperator, ResolutionOfIdentity};
use crate::entropy::DensityOperator;
use crate::error::{Error, Result};

/// `E_A h = Σ_i α_i p_i` with `α_i = τ(p_i h) / τ(p_i)`: the τ-preserving
/// conditional expectation onto the abelian algebra generated by `r`.
/// The output commutes with every `p_i`.
pub fn conditional_expectation(
    r: &ResolutionOfIdentity,
    h: &BlockOperator,
) -> Result<BlockOperator> {
    if r.algebra() != h.algebra() {
        return Err(Error::AlgebraMismatch);
    }
    let mut acc = BlockOperator::zero(r.algebra().clone());
    for p in r.projections() {
        let t = p.re_trace();
        if t <= 0.0 || t.is_nan() {
            return Err(Error::InvalidResolution(vec![crate::algebra::Violation {
                invariant: "positive_trace".into(),
                residual: t,
            }]));
        }
        let alpha = p.multiply(h)?.re_trace() / t;
        acc = acc.add(&p.scale(alpha))?;
    }
    Ok(acc)
}

/// The restricted state as classical data: pairs `(ω(p_i), τ(p_i))`.
pub fn restrict_state(d: &DensityOperator, r: &ResolutionOfIdentity) -> Result<Vec<(f64, f64)>> {
    if r.algebra() != d.algebra() {
        return Err(Error::AlgebraMismatch);
    }
    r.projections()
        .iter()
        .map(|p| Ok((p.multiply(d.operator())?.re_trace(), p.re_trace())))
        .collect()
}

/// Conditional expectation onto the abelian algebra of a resolution,
/// packaged as a map.
#[derive(Debug, Clone)]
pub struct PinchingMap {
    resolution: ResolutionOfIdentity,
}

impl PinchingMap {
    /// Requires a valid resolution (all invariants within tolerance).
    pub fn new(resolution: ResolutionOfIdentity) -> Result<Self> {
        let violations = resolution.validate(crate::algebra::TOL_PROJ);
        if !violations.is_empty() {
            return Err(Error::InvalidResolution(violations));
        }
        Ok(PinchingMap { resolution })
    }

    pub fn resolution(&self) -> &ResolutionOfIdentity {
        &self.resolution
    }

    pub fn apply(&self, x: &BlockOperator) -> Result<BlockOperator> {
        conditional_expectation(&self.resolution, x)
    }
}

/// `Φ(x) = Σ_k c_k u_k x u_k*` for unitaries `u_k` and a probability
/// vector `c`.
#[derive(Debug, Clone)]
pub struct UnitaryMixtureMap {
    terms: Vec<(BlockOperator, f64)>,
}

impl UnitaryMixtureMap {
    /// Validates unitarity of each `u_k` (within 1e-9) and that the weights
    /// form a probability vector (within 1e-12).
    pub fn new(terms: Vec<(BlockOperator, f64)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidParameter("empty unitary mixture".into()));
        }
        let algebra = terms[0].0.algebra().clone();
        let identity = BlockOperator::identity(algebra.clone());
        let mut total = 0.0;
        for (u, c) in &terms {
            if u.algebra() != &algebra {
                return Err(Error::AlgebraMismatch);
            }
            if *c < 0.0 {
                return Err(Error::InvalidParameter(format!("negative weight {c}")));
            }
            total += c;
            let res = u.multiply(&u.adjoint())?.sub(&identity)?.operator_norm();
            if res > 1e-9 {
                return Err(Error::InvalidParameter(format!(
                    "map term is not unitary (residual {res:.3e})"
                )));
            }
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        Ok(UnitaryMixtureMap { terms })
    }

    /// Close a family under adjoints, halving the weights. The resulting
    /// map satisfies `τ(Φ(x) y) = τ(x Φ(y))`.
    pub fn symmetrized(terms: Vec<(BlockOperator, f64)>) -> Result<Self> {
        let mut sym = Vec::with_capacity(terms.len() * 2);
        for (u, c) in terms {
            let adj = u.adjoint();
            sym.push((u, 0.5 * c));
            sym.push((adj, 0.5 * c));
        }
        Self::new(sym)
    }

    pub fn terms(&self) -> &[(BlockOperator, f64)] {
        &self.terms
    }

    pub fn apply(&self, x: &BlockOperator) -> Result<BlockOperator> {
        let mut acc = BlockOperator::zero(x.algebra().clone());
        for (u, c) in &self.terms {
            let conj = u.multiply(x)?.multiply(&u.adjoint())?;
            acc = acc.add(&conj.scale(*c))?;
        }
        Ok(acc)
    }
}

/// Either of the two implemented trace-preserving positive unital maps.
#[derive(Debug, Clone)]
pub enum Channel {
    Pinching(PinchingMap),
    UnitaryMixture(UnitaryMixtureMap),
}

pub fn apply_channel(channel: &Channel, x: &BlockOperator) -> Result<BlockOperator> {
    match channel {
        Channel::Pinching(p) => p.apply(x),
        Channel::UnitaryMixture(m) => m.apply(x),
    }
}
