//! Python bindings for the tracevar library.
//!
//! Exposes the block algebra, operators, densities and resolutions together
//! with the entropy functionals and the certificate searches. Certificates
//! come back as JSON strings, identical to what the CLI emits, so Python
//! callers can audit and archive them directly.

use std::sync::Arc;

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use tracevar as tv;
use tracevar::spectral::ScalarFunction;

fn err(e: tv::Error) -> PyErr {
    match e {
        tv::Error::PropertyViolation(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// A direct sum of matrix blocks with a weighted trace.
#[pyclass(frozen, skip_from_py_object)]
#[derive(Clone)]
struct Algebra {
    inner: Arc<tv::TracialAlgebra>,
}

#[pymethods]
impl Algebra {
    /// Algebra(blocks): blocks is a list of (dim, weight) pairs.
    #[new]
    fn new(blocks: Vec<(usize, f64)>) -> PyResult<Self> {
        Ok(Algebra {
            inner: tv::TracialAlgebra::new(blocks).map_err(err)?.shared(),
        })
    }

    #[getter]
    fn blocks(&self) -> Vec<(usize, f64)> {
        self.inner.blocks().iter().map(|b| (b.dim, b.weight)).collect()
    }

    fn total_dim(&self) -> usize {
        self.inner.total_dim()
    }

    fn trace_of_identity(&self) -> f64 {
        self.inner.trace_of_identity()
    }

    fn __repr__(&self) -> String {
        format!("Algebra(blocks={:?})", self.blocks())
    }
}

/// A block-diagonal operator. Arithmetic returns fresh operators.
#[pyclass(frozen, from_py_object)]
#[derive(Clone)]
struct Operator {
    inner: tv::BlockOperator,
}

fn matrices_from_python(
    blocks: Vec<Vec<Vec<Complex64>>>,
) -> PyResult<Vec<nalgebra::DMatrix<Complex64>>> {
    let mut out = Vec::with_capacity(blocks.len());
    for (bi, rows) in blocks.iter().enumerate() {
        let n = rows.len();
        let mut m = nalgebra::DMatrix::zeros(n, n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(PyValueError::new_err(format!(
                    "block {bi} row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (j, &z) in row.iter().enumerate() {
                m[(i, j)] = z;
            }
        }
        out.push(m);
    }
    Ok(out)
}

#[pymethods]
impl Operator {
    /// Operator(algebra, blocks): blocks is one square nested list of
    /// complex numbers per algebra block.
    #[new]
    #[pyo3(signature = (algebra, blocks, symmetrize=false))]
    fn new(algebra: &Algebra, blocks: Vec<Vec<Vec<Complex64>>>, symmetrize: bool) -> PyResult<Self> {
        let mats = matrices_from_python(blocks)?;
        let op = tv::BlockOperator::new(algebra.inner.clone(), mats).map_err(err)?;
        let op = if symmetrize {
            op.hermitized()
        } else {
            op.require_hermitian().map_err(err)?;
            op
        };
        Ok(Operator { inner: op })
    }

    /// Parse the operator JSON schema used by the CLI.
    #[staticmethod]
    #[pyo3(signature = (text, symmetrize=false))]
    fn from_json(text: &str, symmetrize: bool) -> PyResult<Self> {
        Ok(Operator {
            inner: tv::json::parse_operator(text, symmetrize).map_err(err)?,
        })
    }

    #[staticmethod]
    fn identity(algebra: &Algebra) -> Self {
        Operator {
            inner: tv::BlockOperator::identity(algebra.inner.clone()),
        }
    }

    #[staticmethod]
    fn diagonal(algebra: &Algebra, entries: Vec<f64>) -> PyResult<Self> {
        Ok(Operator {
            inner: tv::BlockOperator::from_real_diagonal(algebra.inner.clone(), &entries)
                .map_err(err)?,
        })
    }

    fn to_json(&self) -> String {
        tv::json::operator_to_json(&self.inner)
    }

    fn digest(&self) -> String {
        tv::json::operator_digest(&self.inner)
    }

    #[getter]
    fn algebra(&self) -> Algebra {
        Algebra {
            inner: self.inner.algebra().clone(),
        }
    }

    fn blocks(&self) -> Vec<Vec<Vec<Complex64>>> {
        self.inner
            .blocks()
            .iter()
            .map(|m| {
                (0..m.nrows())
                    .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
                    .collect()
            })
            .collect()
    }

    fn trace(&self) -> Complex64 {
        self.inner.trace()
    }

    fn add(&self, other: &Operator) -> PyResult<Operator> {
        Ok(Operator {
            inner: self.inner.add(&other.inner).map_err(err)?,
        })
    }

    fn multiply(&self, other: &Operator) -> PyResult<Operator> {
        Ok(Operator {
            inner: self.inner.multiply(&other.inner).map_err(err)?,
        })
    }

    fn scale(&self, s: f64) -> Operator {
        Operator {
            inner: self.inner.scale(s),
        }
    }

    fn adjoint(&self) -> Operator {
        Operator {
            inner: self.inner.adjoint(),
        }
    }

    fn is_hermitian(&self) -> bool {
        self.inner.is_hermitian(tv::algebra::TOL_HERM)
    }

    fn operator_norm(&self) -> f64 {
        self.inner.operator_norm()
    }

    /// Eigenvalues with their trace weights: a list of (λ, τ(p_λ)) pairs.
    fn spectrum(&self) -> PyResult<Vec<(f64, f64)>> {
        Ok(tv::eigendecompose(&self.inner, tv::spectral::DEFAULT_CLUSTER_TOL)
            .map_err(err)?
            .scalar_measure())
    }

    fn __repr__(&self) -> String {
        format!(
            "Operator(dims={:?}, trace={})",
            self.inner
                .algebra()
                .blocks()
                .iter()
                .map(|b| b.dim)
                .collect::<Vec<_>>(),
            self.inner.trace()
        )
    }
}

/// A positive semidefinite operator with cached spectral data.
#[pyclass(frozen, skip_from_py_object)]
#[derive(Clone)]
struct Density {
    inner: tv::DensityOperator,
}

#[pymethods]
impl Density {
    #[new]
    fn new(op: &Operator) -> PyResult<Self> {
        Ok(Density {
            inner: tv::DensityOperator::new(op.inner.clone()).map_err(err)?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (text, symmetrize=false))]
    fn from_json(text: &str, symmetrize: bool) -> PyResult<Self> {
        let op = tv::json::parse_operator(text, symmetrize).map_err(err)?;
        Ok(Density {
            inner: tv::DensityOperator::new(op).map_err(err)?,
        })
    }

    fn trace(&self) -> f64 {
        self.inner.trace()
    }

    fn is_normalised(&self) -> bool {
        self.inner.is_normalised()
    }

    fn operator(&self) -> Operator {
        Operator {
            inner: self.inner.operator().clone(),
        }
    }

    fn spectrum(&self) -> Vec<(f64, f64)> {
        self.inner.spectral().scalar_measure()
    }

    fn __repr__(&self) -> String {
        format!(
            "Density(trace={}, normalised={})",
            self.trace(),
            self.is_normalised()
        )
    }
}

/// Mutually orthogonal projections summing to the identity.
#[pyclass(frozen, skip_from_py_object)]
#[derive(Clone)]
struct Resolution {
    inner: tv::ResolutionOfIdentity,
}

#[pymethods]
impl Resolution {
    #[new]
    fn new(projections: Vec<Operator>) -> PyResult<Self> {
        Ok(Resolution {
            inner: tv::ResolutionOfIdentity::new(
                projections.into_iter().map(|p| p.inner).collect(),
            )
            .map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Resolution {
            inner: tv::json::parse_resolution(text).map_err(err)?,
        })
    }

    #[staticmethod]
    fn coordinates(algebra: &Algebra) -> Self {
        Resolution {
            inner: tv::ResolutionOfIdentity::coordinates(algebra.inner.clone()),
        }
    }

    fn to_json(&self) -> PyResult<String> {
        tv::json::to_canonical_json(&tv::json::resolution_to_file(&self.inner)).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    /// Invariant violations as (name, residual) pairs; empty means valid.
    fn validate(&self) -> Vec<(String, f64)> {
        self.inner
            .validate(tv::algebra::TOL_PROJ)
            .into_iter()
            .map(|v| (v.invariant, v.residual))
            .collect()
    }

    /// Conditional expectation (pinching) of an operator onto the abelian
    /// algebra generated by this resolution.
    fn pinch(&self, x: &Operator) -> PyResult<Operator> {
        Ok(Operator {
            inner: tv::conditional_expectation(&self.inner, &x.inner).map_err(err)?,
        })
    }

    /// Restricted state: list of (ω(p_i), τ(p_i)) pairs.
    fn restrict(&self, d: &Density) -> PyResult<Vec<(f64, f64)>> {
        tv::restrict_state(&d.inner, &self.inner).map_err(err)
    }
}

#[pyfunction]
fn segal_entropy(d: &Density) -> f64 {
    tv::segal_entropy(&d.inner)
}

#[pyfunction]
fn relative_entropy(omega: &Density, phi: &Density) -> PyResult<f64> {
    tv::relative_entropy(&omega.inner, &phi.inner).map_err(err)
}

#[pyfunction]
fn renyi_entropy(d: &Density, alpha: f64) -> PyResult<f64> {
    tv::renyi_entropy(&d.inner, alpha).map_err(err)
}

/// τ(f(h)) for a catalog function name (t_log_t, exp, identity, powerA).
#[pyfunction]
fn trace_functional(f: &str, h: &Operator) -> PyResult<f64> {
    let f = ScalarFunction::parse(f).map_err(err)?;
    tv::trace_functional(&f, &h.inner).map_err(err)
}

/// f(h) through the spectral calculus, for a catalog function name.
#[pyfunction]
fn apply_function(f: &str, h: &Operator) -> PyResult<Operator> {
    let f = ScalarFunction::parse(f).map_err(err)?;
    Ok(Operator {
        inner: tv::apply_function(&f, &h.inner).map_err(err)?,
    })
}

#[pyfunction]
#[pyo3(signature = (d, eps=0.1, method="constructive", max_iter=500_000, tol=1e-7))]
fn certify_gibbs(d: &Density, eps: f64, method: &str, max_iter: usize, tol: f64) -> PyResult<String> {
    let certificate = match method {
        "constructive" => {
            let split = tv::default_kernel_split(&d.inner);
            let witness = tv::constructive_gibbs_witness(&d.inner, eps, &split).map_err(err)?;
            tv::gibbs_certificate(
                &d.inner,
                witness,
                tv::CertificateParams {
                    eps: Some(eps),
                    ..Default::default()
                },
            )
        }
        "ascent" => {
            let init = tv::BlockOperator::zero(d.inner.algebra().clone());
            let opts = tv::AscentOptions {
                max_iter,
                grad_tol: tol,
                ..Default::default()
            };
            let witness = tv::gibbs_ascent(&d.inner, &init, &opts).map_err(err)?;
            tv::gibbs_certificate(&d.inner, witness, tv::CertificateParams::default())
        }
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown gibbs method '{other}' (use constructive or ascent)"
            )))
        }
    };
    Ok(certificate.to_json())
}

#[pyfunction]
#[pyo3(signature = (f, h, depth=4, samples=1000, seed=0))]
fn certify_partition(f: &str, h: &Operator, depth: u32, samples: u32, seed: u64) -> PyResult<String> {
    let f = ScalarFunction::parse(f).map_err(err)?;
    Ok(tv::partition_search(&f, &h.inner, depth, samples, seed)
        .map_err(err)?
        .to_json())
}

#[pyfunction]
#[pyo3(signature = (d, depth=4, samples=1000, seed=0))]
fn certify_segal(d: &Density, depth: u32, samples: u32, seed: u64) -> PyResult<String> {
    Ok(tv::segal_partition_certificate(&d.inner, depth, samples, seed)
        .map_err(err)?
        .to_json())
}

#[pyfunction]
#[pyo3(signature = (d, alpha, depth=4, samples=1000, seed=0))]
fn certify_renyi(d: &Density, alpha: f64, depth: u32, samples: u32, seed: u64) -> PyResult<String> {
    Ok(tv::renyi_certificate(&d.inner, alpha, depth, samples, seed)
        .map_err(err)?
        .to_json())
}

#[pyfunction]
#[pyo3(signature = (d, depth=4, samples=1000, seed=0))]
fn certify_subalgebras(d: &Density, depth: u32, samples: u32, seed: u64) -> PyResult<String> {
    Ok(tv::entropy_over_subalgebras(&d.inner, depth, samples, seed)
        .map_err(err)?
        .to_json())
}

#[pyfunction]
#[pyo3(signature = (blocks, seed=0))]
fn gen_density(blocks: Vec<(usize, f64)>, seed: u64) -> PyResult<Density> {
    let alg = tv::TracialAlgebra::new(blocks).map_err(err)?.shared();
    let mut rng = <rand_chacha::ChaCha12Rng as rand::SeedableRng>::seed_from_u64(seed);
    Ok(Density {
        inner: tv::random::random_density(&alg, &mut rng),
    })
}

#[pyfunction]
#[pyo3(signature = (blocks, seed=0))]
fn gen_hermitian(blocks: Vec<(usize, f64)>, seed: u64) -> PyResult<Operator> {
    let alg = tv::TracialAlgebra::new(blocks).map_err(err)?.shared();
    let mut rng = <rand_chacha::ChaCha12Rng as rand::SeedableRng>::seed_from_u64(seed);
    Ok(Operator {
        inner: tv::random::random_hermitian(&alg, &mut rng),
    })
}

#[pyfunction]
#[pyo3(signature = (blocks, cells, seed=0))]
fn gen_resolution(blocks: Vec<(usize, f64)>, cells: usize, seed: u64) -> PyResult<Resolution> {
    let alg = tv::TracialAlgebra::new(blocks).map_err(err)?.shared();
    let mut rng = <rand_chacha::ChaCha12Rng as rand::SeedableRng>::seed_from_u64(seed);
    Ok(Resolution {
        inner: tv::random::random_resolution(&alg, cells, &mut rng).map_err(err)?,
    })
}

/// Entropy of a commuting (diagonal) instance by direct scalar summation.
#[pyfunction]
fn oracle_entropy(entries: Vec<(f64, f64)>) -> PyResult<f64> {
    tv::oracle::oracle_entropy_commuting(&entries).map_err(err)
}

/// Exhaustive set-partition extremum for (eigenvalue, weight) entries with
/// n ≤ 4. Returns (best_value, best_partition).
#[pyfunction]
fn oracle_partition(
    f: &str,
    entries: Vec<(f64, f64)>,
    maximize: bool,
) -> PyResult<(f64, Vec<Vec<usize>>)> {
    let f = ScalarFunction::parse(f).map_err(err)?;
    let scan = tv::oracle::oracle_partition_exhaustive(|t| f.eval(t), &entries, maximize)
        .map_err(err)?;
    Ok((scan.best_value, scan.best_partition))
}

#[pymodule]
fn tracevar_py(_py: Python<'_>, m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Algebra>()?;
    m.add_class::<Operator>()?;
    m.add_class::<Density>()?;
    m.add_class::<Resolution>()?;
    m.add_function(wrap_pyfunction!(segal_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(relative_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(renyi_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(trace_functional, m)?)?;
    m.add_function(wrap_pyfunction!(apply_function, m)?)?;
    m.add_function(wrap_pyfunction!(certify_gibbs, m)?)?;
    m.add_function(wrap_pyfunction!(certify_partition, m)?)?;
    m.add_function(wrap_pyfunction!(certify_segal, m)?)?;
    m.add_function(wrap_pyfunction!(certify_renyi, m)?)?;
    m.add_function(wrap_pyfunction!(certify_subalgebras, m)?)?;
    m.add_function(wrap_pyfunction!(gen_density, m)?)?;
    m.add_function(wrap_pyfunction!(gen_hermitian, m)?)?;
    m.add_function(wrap_pyfunction!(gen_resolution, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_partition, m)?)?;
    Ok(())
}
