//! JSON schemas and canonical serialisation.
//!
//! Operator files carry the algebra and the per-block matrices in row-major
//! `[re, im]` pairs:
//!
//! ```json
//! { "algebra":  { "blocks": [ {"dim": 2, "weight": 1.0} ] },
//!   "operator": { "blocks": [ [[0.5, 0.0], [0.0, 0.0], [0.0, 0.0], [0.5, 0.0]] ] } }
//! ```
//!
//! Floats are always written with 17 significant digits so that serialised
//! doubles round-trip exactly and identical inputs produce byte-identical
//! output. Parsing rejects non-hermitian operator input unless symmetrisation
//! is requested, in which case `x ← (x + x*)/2`.

use std::io;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::algebra::{BlockOperator, ResolutionOfIdentity, TracialAlgebra};
use crate::entropy::EntropyReport;
use crate::error::Result;
use crate::variational::{CertificateParams, VariationalCertificate, Witness};

/// Writes every `f64` with 17 significant digits (`%.16e`), enough for an
/// exact double round-trip.
#[derive(Clone, Debug, Default)]
pub struct SigDigitFormatter;

impl serde_json::ser::Formatter for SigDigitFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

/// Serialise with the 17-significant-digit float format.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SigDigitFormatter);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(out).expect("serde_json emits utf-8"))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlockDto {
    pub dim: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgebraDto {
    pub blocks: Vec<BlockDto>,
}

/// Per-block row-major matrices of `[re, im]` pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OperatorBody {
    pub blocks: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OperatorFile {
    pub algebra: AlgebraDto,
    pub operator: OperatorBody,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResolutionFile {
    pub algebra: AlgebraDto,
    pub projections: Vec<Vec<Vec<[f64; 2]>>>,
}

fn algebra_to_dto(algebra: &TracialAlgebra) -> AlgebraDto {
    AlgebraDto {
        blocks: algebra
            .blocks()
            .iter()
            .map(|b| BlockDto {
                dim: b.dim,
                weight: b.weight,
            })
            .collect(),
    }
}

fn algebra_from_dto(dto: &AlgebraDto) -> Result<TracialAlgebra> {
    TracialAlgebra::new(dto.blocks.iter().map(|b| (b.dim, b.weight)))
}

fn matrix_to_pairs(m: &DMatrix<Complex64>) -> Vec<[f64; 2]> {
    let n = m.nrows();
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let z = m[(i, j)];
            out.push([z.re, z.im]);
        }
    }
    out
}

fn matrix_from_pairs(dim: usize, pairs: &[[f64; 2]], block: usize) -> Result<DMatrix<Complex64>> {
    if pairs.len() != dim * dim {
        return Err(crate::error::Error::InvalidParameter(format!(
            "block {block}: expected {} row-major [re, im] pairs for a {dim}x{dim} matrix, got {}",
            dim * dim,
            pairs.len()
        )));
    }
    let mut m = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            let [re, im] = pairs[i * dim + j];
            m[(i, j)] = Complex64::new(re, im);
        }
    }
    Ok(m)
}

pub fn operator_to_file(op: &BlockOperator) -> OperatorFile {
    OperatorFile {
        algebra: algebra_to_dto(op.algebra()),
        operator: OperatorBody {
            blocks: op.blocks().iter().map(matrix_to_pairs).collect(),
        },
    }
}

/// Build the operator from a parsed file. Rejects non-hermitian input
/// unless `symmetrize` is set.
pub fn operator_from_file(file: &OperatorFile, symmetrize: bool) -> Result<BlockOperator> {
    let algebra = algebra_from_dto(&file.algebra)?.shared();
    if file.operator.blocks.len() != algebra.num_blocks() {
        return Err(crate::error::Error::BlockCountMismatch {
            expected: algebra.num_blocks(),
            got: file.operator.blocks.len(),
        });
    }
    let blocks = file
        .operator
        .blocks
        .iter()
        .zip(algebra.blocks())
        .enumerate()
        .map(|(i, (pairs, b))| matrix_from_pairs(b.dim, pairs, i))
        .collect::<Result<Vec<_>>>()?;
    let op = BlockOperator::new(algebra, blocks)?;
    if symmetrize {
        Ok(op.hermitized())
    } else {
        op.require_hermitian()?;
        Ok(op)
    }
}

pub fn parse_operator(json: &str, symmetrize: bool) -> Result<BlockOperator> {
    let file: OperatorFile = serde_json::from_str(json)?;
    operator_from_file(&file, symmetrize)
}

pub fn operator_to_json(op: &BlockOperator) -> String {
    to_canonical_json(&operator_to_file(op)).expect("operator serialisation cannot fail")
}

pub fn resolution_to_file(r: &ResolutionOfIdentity) -> ResolutionFile {
    ResolutionFile {
        algebra: algebra_to_dto(r.algebra()),
        projections: r
            .projections()
            .iter()
            .map(|p| p.blocks().iter().map(matrix_to_pairs).collect())
            .collect(),
    }
}

pub fn resolution_from_file(file: &ResolutionFile) -> Result<ResolutionOfIdentity> {
    let algebra = algebra_from_dto(&file.algebra)?.shared();
    let projections = file
        .projections
        .iter()
        .map(|blocks| {
            let mats = blocks
                .iter()
                .zip(algebra.blocks())
                .enumerate()
                .map(|(i, (pairs, b))| matrix_from_pairs(b.dim, pairs, i))
                .collect::<Result<Vec<_>>>()?;
            BlockOperator::new(algebra.clone(), mats)
        })
        .collect::<Result<Vec<_>>>()?;
    ResolutionOfIdentity::new(projections)
}

pub fn parse_resolution(json: &str) -> Result<ResolutionOfIdentity> {
    let file: ResolutionFile = serde_json::from_str(json)?;
    resolution_from_file(&file)
}

/// SHA-256 of the canonical operator JSON, as lowercase hex.
pub fn operator_digest(op: &BlockOperator) -> String {
    let json = operator_to_json(op);
    let hash = Sha256::digest(json.as_bytes());
    hash.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn report_to_json(report: &EntropyReport) -> String {
    to_canonical_json(report).expect("report serialisation cannot fail")
}

#[derive(Debug, Clone, Serialize)]
struct ParamsDto {
    eps: Option<f64>,
    depth: Option<u32>,
    samples: Option<u32>,
    seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
struct WitnessDto {
    kind: &'static str,
    algebra: AlgebraDto,
    #[serde(skip_serializing_if = "Option::is_none")]
    operator: Option<OperatorBody>,
    #[serde(skip_serializing_if = "Option::is_none")]
    projections: Option<Vec<Vec<Vec<[f64; 2]>>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    derivation: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
struct CertificateDto {
    target: f64,
    achieved: f64,
    gap: f64,
    direction: &'static str,
    witness: WitnessDto,
    params: ParamsDto,
}

fn witness_to_dto(witness: &Witness) -> WitnessDto {
    match witness {
        Witness::Gibbs(candidate) => WitnessDto {
            kind: "operator",
            algebra: algebra_to_dto(candidate.h.algebra()),
            operator: Some(OperatorBody {
                blocks: candidate.h.blocks().iter().map(matrix_to_pairs).collect(),
            }),
            projections: None,
            derivation: Some(format!("{:?}", candidate.derivation)),
        },
        Witness::Resolution(r) => WitnessDto {
            kind: "resolution",
            algebra: algebra_to_dto(r.algebra()),
            operator: None,
            projections: Some(resolution_to_file(r).projections),
            derivation: None,
        },
    }
}

fn params_to_dto(params: &CertificateParams) -> ParamsDto {
    ParamsDto {
        eps: params.eps,
        depth: params.depth,
        samples: params.samples,
        seed: params.seed,
    }
}

pub fn certificate_to_json(cert: &VariationalCertificate) -> String {
    let dto = CertificateDto {
        target: cert.target,
        achieved: cert.achieved,
        gap: cert.gap,
        direction: cert.direction.as_str(),
        witness: witness_to_dto(&cert.witness),
        params: params_to_dto(&cert.params),
    };
    to_canonical_json(&dto).expect("certificate serialisation cannot fail")
}
