//! # tracevar
//!
//! Entropy-like trace functionals and their variational certificates on
//! finite-dimensional tracial algebras.
//!
//! The ambient object is a direct sum of matrix blocks with a faithful
//! weighted trace τ. On top of it the crate computes the entropy
//! `H(ω) = τ(D log D)` of a state with density `D`, the relative entropy
//! `S(ω, φ)`, Rényi entropies `R_α`, and generic functionals `τ(f(h))` for
//! convex or concave `f` — and then *certifies* the variational formulae
//! these functionals satisfy:
//!
//! * **Gibbs duality** — `H(ω) = sup_h { τ(D h) − log τ(e^h) }`, with an
//!   explicit near-optimal witness built from `log D` (an ε-correction on
//!   the kernel gives value `H − log(1 + ε(1 − 2^{-k}))`), and a numerical
//!   route by gradient ascent on the concave dual objective.
//! * **Partition formulae** — `τ(f(h))` is the sup (convex `f`) or inf
//!   (concave `f`) of `Σ f(τ(p_i h)/τ(p_i)) τ(p_i)` over finite resolutions
//!   of identity; the spectral resolution of `h` attains the bound, dyadic
//!   coarsenings and Haar-random resolutions must respect it.
//! * **Entropy over abelian subalgebras** — `H(ω)` is the sup of the
//!   classical entropies of restricted states, and pinching a density never
//!   increases its entropy (data processing).
//!
//! A [`variational::VariationalCertificate`] packages the target value, the
//! best candidate found, the signed gap and the witness; certificates
//! serialise to JSON deterministically (17 significant digits, fixed
//! candidate order, seeded sampling), so a rerun with the same seed is
//! byte-identical.
//!
//! Independent scalar oracles (direct summation, exhaustive set-partition
//! enumeration, grid search) live in [`oracle`] and are used by the test
//! suite to pin expected values before trusting the matrix path.

pub mod algebra;
pub mod channels;
pub mod entropy;
pub mod error;
pub mod json;
pub mod oracle;
pub mod random;
pub mod spectral;
pub mod variational;

pub use algebra::{Block, BlockOperator, ResolutionOfIdentity, TracialAlgebra, Violation};
pub use channels::{
    apply_channel, conditional_expectation, restrict_state, Channel, PinchingMap,
    UnitaryMixtureMap,
};
pub use entropy::{
    relative_entropy, renyi_entropy, segal_entropy, trace_functional, DensityOperator,
    EntropyReport,
};
pub use error::{Error, Result};
pub use spectral::{
    apply_function, eigendecompose, spectral_interval_partition, Convexity, ScalarFunction,
    SpectralDecomposition,
};
pub use variational::{
    constructive_gibbs_witness, default_kernel_split, entropy_over_subalgebras, gibbs_ascent,
    gibbs_certificate, gibbs_gradient, gibbs_objective, partition_search, partition_value,
    renyi_certificate, segal_partition_certificate, AscentOptions, CertificateParams, Derivation,
    Direction, GibbsCandidate, VariationalCertificate, Witness,
};
