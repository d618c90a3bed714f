//! `tracevar` — entropy functionals and variational certificates from the
//! command line.
//!
//! Exit codes: 0 success, 2 input/validation error, 3 domain error
//! (e.g. `support_not_dominated`), 4 property violation (a candidate on the
//! wrong side of a certified bound).

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use tracevar::entropy::{
    relative_entropy, renyi_entropy, segal_entropy, DensityOperator, EntropyReport,
};
use tracevar::error::Error as CoreError;
use tracevar::json;
use tracevar::oracle::{
    oracle_entropy_commuting, oracle_gibbs_grid, oracle_partition_exhaustive, OracleResult,
};
use tracevar::random::{random_density, random_hermitian, random_resolution};
use tracevar::spectral::{Convexity, ScalarFunction};
use tracevar::variational::{
    constructive_gibbs_witness, default_kernel_split, entropy_over_subalgebras, gibbs_ascent,
    gibbs_certificate, partition_search, renyi_certificate, segal_partition_certificate,
    AscentOptions, CertificateParams, VariationalCertificate,
};
use tracevar::{BlockOperator, TracialAlgebra};

#[derive(Parser)]
#[command(name = "tracevar", version, about = "Entropy-like trace functionals and variational certificates on finite tracial algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Segal entropy τ(D log D) of a density operator
    Entropy(EntropyArgs),
    /// Rényi entropy (α−1)⁻¹ log τ(D^α) of a normalised density
    Renyi(RenyiArgs),
    /// Relative entropy S(ω, φ) = τ(D_ω log D_ω − D_ω log D_φ)
    Relative(RelativeArgs),
    /// Produce a variational certificate
    #[command(subcommand)]
    Certify(CertifyCommand),
    /// Generate random instances as operator JSON
    #[command(subcommand)]
    Gen(GenCommand),
    /// Brute-force oracles for small diagonal instances
    #[command(subcommand)]
    Oracle(OracleCommand),
}

#[derive(Args)]
struct InputArgs {
    /// Operator JSON file
    #[arg(long)]
    input: PathBuf,
    /// Replace the input by its hermitian part (x + x*)/2 instead of
    /// rejecting non-hermitian files
    #[arg(long)]
    symmetrize: bool,
    /// Write the report here instead of stdout
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct EntropyArgs {
    #[command(flatten)]
    input: InputArgs,
}

#[derive(Args)]
struct RenyiArgs {
    /// Rényi order in (0,1) ∪ (1,∞)
    #[arg(long)]
    alpha: f64,
    #[command(flatten)]
    input: InputArgs,
}

#[derive(Args)]
struct RelativeArgs {
    /// Density of ω
    #[arg(long)]
    omega: PathBuf,
    /// Density of φ
    #[arg(long)]
    phi: PathBuf,
    #[arg(long)]
    symmetrize: bool,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SearchArgs {
    /// Dyadic refinement depth for interval coarsenings
    #[arg(long, default_value_t = 4)]
    depth: u32,
    /// Number of Haar-random resolutions to test
    #[arg(long, default_value_t = 1000)]
    samples: u32,
    /// RNG seed (64-bit)
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum CertifyCommand {
    /// Gibbs dual witness: constructive ε-witness or gradient ascent
    Gibbs {
        #[command(flatten)]
        input: InputArgs,
        /// ε for the constructive kernel witness
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        /// Witness construction: "constructive" or "ascent"
        #[arg(long, default_value = "constructive")]
        method: String,
        /// Maximum accepted ascent steps
        #[arg(long, default_value_t = 500_000)]
        max_iter: usize,
        /// Gradient-norm stopping tolerance for ascent
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
    },
    /// τ(f(h)) = sup/inf of partition values over finite resolutions
    Partition {
        #[command(flatten)]
        input: InputArgs,
        /// Catalog function: t_log_t, exp, identity, powerA (e.g. power2, power0.5)
        #[arg(long)]
        f: String,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Segal entropy as a sup over restricted states
    Segal {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Rényi entropy via partition values of the power function
    Renyi {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        alpha: f64,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// H(ω) as a sup over abelian subalgebras / pinched densities
    Subalgebras {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        search: SearchArgs,
    },
}

#[derive(Subcommand)]
enum GenCommand {
    /// Normalised random density (Dirichlet spectrum, Haar basis)
    Density(GenArgs),
    /// Gaussian hermitian operator
    Hermitian(GenArgs),
    /// Haar-rotated coordinate resolution
    Resolution {
        #[command(flatten)]
        common: GenArgs,
        /// Number of cells
        #[arg(long, default_value_t = 2)]
        cells: usize,
    },
}

#[derive(Args)]
struct GenArgs {
    /// Block structure as dim:weight pairs, e.g. "2:1.0,3:0.5"
    #[arg(long)]
    blocks: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file (stdout when omitted)
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Entropy of a diagonal density by direct scalar summation
    Entropy {
        #[command(flatten)]
        input: InputArgs,
    },
    /// Exhaustive set-partition extremum for diagonal h with n ≤ 4
    Partition {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        f: String,
    },
    /// Grid search of the Gibbs dual for a diagonal 2×2 density
    Gibbs {
        #[command(flatten)]
        input: InputArgs,
    },
}

fn main() -> ExitCode {
    env_logger::init();
    if let Ok(threads) = std::env::var("TRACEVAR_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => fail(&err),
    }
}

fn exit_code_for(err: &CoreError) -> u8 {
    match err {
        CoreError::SupportNotDominated { .. } | CoreError::DomainViolation { .. } => 3,
        CoreError::PropertyViolation(_) => 4,
        _ => 2,
    }
}

fn fail(err: &CoreError) -> ExitCode {
    let code = exit_code_for(err);
    let kind = match err {
        CoreError::SupportNotDominated { .. } => "support_not_dominated",
        CoreError::DomainViolation { .. } => "domain",
        CoreError::PropertyViolation(_) => "property_violation",
        CoreError::Json(_) => "parse",
        _ => "input",
    };
    eprintln!(
        "{}",
        serde_json::json!({
            "error": err.to_string(),
            "kind": kind,
            "exit_code": code,
        })
    );
    ExitCode::from(code)
}

fn run(cli: Cli) -> Result<ExitCode, CoreError> {
    match cli.command {
        Command::Entropy(args) => {
            let op = read_operator(&args.input)?;
            let digest = json::operator_digest(&op);
            let d = DensityOperator::new(op)?;
            let report = EntropyReport::new("segal", segal_entropy(&d), digest);
            emit(&args.input.output, &json::report_to_json(&report))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Renyi(args) => {
            let op = read_operator(&args.input)?;
            let digest = json::operator_digest(&op);
            let d = DensityOperator::new(op)?;
            let value = renyi_entropy(&d, args.alpha)?;
            let report = EntropyReport::new("renyi", value, digest).with_alpha(args.alpha);
            emit(&args.input.output, &json::report_to_json(&report))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Relative(args) => {
            let omega_op = parse_file(&args.omega, args.symmetrize)?;
            let phi_op = parse_file(&args.phi, args.symmetrize)?;
            let digest = format!(
                "{}:{}",
                json::operator_digest(&omega_op),
                json::operator_digest(&phi_op)
            );
            let omega = DensityOperator::new(omega_op)?;
            let phi = DensityOperator::new(phi_op)?;
            let value = relative_entropy(&omega, &phi)?;
            let report = EntropyReport::new("relative", value, digest);
            emit(&args.output, &json::report_to_json(&report))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Certify(cmd) => run_certify(cmd),
        Command::Gen(cmd) => run_gen(cmd),
        Command::Oracle(cmd) => run_oracle(cmd),
    }
}

fn run_certify(cmd: CertifyCommand) -> Result<ExitCode, CoreError> {
    let (output, certificate) = match cmd {
        CertifyCommand::Gibbs {
            input,
            eps,
            method,
            max_iter,
            tol,
        } => {
            let d = DensityOperator::new(read_operator(&input)?)?;
            let certificate = match method.as_str() {
                "constructive" => {
                    let split = default_kernel_split(&d);
                    let witness = constructive_gibbs_witness(&d, eps, &split)?;
                    gibbs_certificate(
                        &d,
                        witness,
                        CertificateParams {
                            eps: Some(eps),
                            ..Default::default()
                        },
                    )
                }
                "ascent" => {
                    let init = BlockOperator::zero(d.algebra().clone());
                    let opts = AscentOptions {
                        max_iter,
                        grad_tol: tol,
                        ..Default::default()
                    };
                    let witness = gibbs_ascent(&d, &init, &opts)?;
                    gibbs_certificate(&d, witness, CertificateParams::default())
                }
                other => {
                    return Err(CoreError::InvalidParameter(format!(
                        "unknown gibbs method '{other}' (use constructive or ascent)"
                    )))
                }
            };
            (input.output, certificate)
        }
        CertifyCommand::Partition { input, f, search } => {
            let h = read_operator(&input)?;
            let f = parse_function(&f)?;
            let cert = partition_search(&f, &h, search.depth, search.samples, search.seed)?;
            (input.output, cert)
        }
        CertifyCommand::Segal { input, search } => {
            let d = DensityOperator::new(read_operator(&input)?)?;
            let cert = segal_partition_certificate(&d, search.depth, search.samples, search.seed)?;
            (input.output, cert)
        }
        CertifyCommand::Renyi {
            input,
            alpha,
            search,
        } => {
            let d = DensityOperator::new(read_operator(&input)?)?;
            let cert = renyi_certificate(&d, alpha, search.depth, search.samples, search.seed)?;
            (input.output, cert)
        }
        CertifyCommand::Subalgebras { input, search } => {
            let d = DensityOperator::new(read_operator(&input)?)?;
            let cert = entropy_over_subalgebras(&d, search.depth, search.samples, search.seed)?;
            (input.output, cert)
        }
    };
    emit_certificate(&output, &certificate)
}

fn run_gen(cmd: GenCommand) -> Result<ExitCode, CoreError> {
    match cmd {
        GenCommand::Density(args) => {
            let alg = parse_blocks(&args.blocks)?;
            let mut rng = ChaCha12Rng::seed_from_u64(args.seed);
            let d = random_density(&alg, &mut rng);
            emit(&args.out, &json::operator_to_json(d.operator()))?;
            Ok(ExitCode::SUCCESS)
        }
        GenCommand::Hermitian(args) => {
            let alg = parse_blocks(&args.blocks)?;
            let mut rng = ChaCha12Rng::seed_from_u64(args.seed);
            let h = random_hermitian(&alg, &mut rng);
            emit(&args.out, &json::operator_to_json(&h))?;
            Ok(ExitCode::SUCCESS)
        }
        GenCommand::Resolution { common, cells } => {
            let alg = parse_blocks(&common.blocks)?;
            let mut rng = ChaCha12Rng::seed_from_u64(common.seed);
            let r = random_resolution(&alg, cells, &mut rng)?;
            let file = json::resolution_to_file(&r);
            emit(&common.out, &json::to_canonical_json(&file)?)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn run_oracle(cmd: OracleCommand) -> Result<ExitCode, CoreError> {
    match cmd {
        OracleCommand::Entropy { input } => {
            let op = read_operator(&input)?;
            let entries = diagonal_entries(&op)?;
            let value = oracle_entropy_commuting(&entries)?;
            let result = OracleResult {
                quantity: "segal_entropy".into(),
                value,
                method: "direct scalar summation of λ log λ · w".into(),
                input_digest: json::operator_digest(&op),
            };
            emit(&input.output, &json::to_canonical_json(&result)?)?;
            Ok(ExitCode::SUCCESS)
        }
        OracleCommand::Partition { input, f } => {
            let op = read_operator(&input)?;
            let entries = diagonal_entries(&op)?;
            let f = parse_function(&f)?;
            let maximize = match f.convexity() {
                Convexity::Convex => true,
                Convexity::Concave => false,
                Convexity::Neither => {
                    return Err(CoreError::InvalidParameter(format!(
                        "{} has no declared convexity direction",
                        f.name()
                    )))
                }
            };
            let scan = oracle_partition_exhaustive(|t| f.eval(t), &entries, maximize)?;
            let result = OracleResult {
                quantity: format!("partition_extremum[{}]", f.name()),
                value: scan.best_value,
                method: format!(
                    "exhaustive enumeration of {} set partitions; best cells {:?}",
                    scan.values.len(),
                    scan.best_partition
                ),
                input_digest: json::operator_digest(&op),
            };
            emit(&input.output, &json::to_canonical_json(&result)?)?;
            Ok(ExitCode::SUCCESS)
        }
        OracleCommand::Gibbs { input } => {
            let op = read_operator(&input)?;
            let entries = diagonal_entries(&op)?;
            if entries.len() != 2 {
                return Err(CoreError::InvalidParameter(format!(
                    "gibbs grid oracle handles 2 diagonal entries, got {}",
                    entries.len()
                )));
            }
            let trace: f64 = entries.iter().map(|&(l, w)| l * w).sum();
            if (trace - 1.0).abs() > 1e-9 {
                return Err(CoreError::NotNormalised { trace });
            }
            let value = oracle_gibbs_grid(entries[0].0, entries[1].0, entries[0].1, entries[1].1);
            let result = OracleResult {
                quantity: "gibbs_dual_grid_max".into(),
                value,
                method: "grid search over diagonal candidates, a,b in [-20,5] step 0.01".into(),
                input_digest: json::operator_digest(&op),
            };
            emit(&input.output, &json::to_canonical_json(&result)?)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn read_operator(args: &InputArgs) -> Result<BlockOperator, CoreError> {
    parse_file(&args.input, args.symmetrize)
}

fn parse_file(path: &PathBuf, symmetrize: bool) -> Result<BlockOperator, CoreError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CoreError::InvalidParameter(format!("cannot read {}: {e}", path.display())))?;
    json::parse_operator(&text, symmetrize)
}

fn emit(output: &Option<PathBuf>, body: &str) -> Result<(), CoreError> {
    match output {
        Some(path) => fs::write(path, format!("{body}\n"))
            .map_err(|e| CoreError::InvalidParameter(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{body}");
            Ok(())
        }
    }
}

fn emit_certificate(
    output: &Option<PathBuf>,
    certificate: &VariationalCertificate,
) -> Result<ExitCode, CoreError> {
    emit(output, &certificate.to_json())?;
    if certificate.respects_direction(tracevar::variational::VERIFY_TOL) {
        Ok(ExitCode::SUCCESS)
    } else {
        Err(CoreError::PropertyViolation(format!(
            "certificate gap {} violates the {} direction",
            certificate.gap,
            certificate.direction.as_str()
        )))
    }
}

fn parse_blocks(spec: &str) -> Result<std::sync::Arc<TracialAlgebra>, CoreError> {
    let mut blocks = Vec::new();
    for part in spec.split(',') {
        let part = part.trim();
        let (dim, weight) = match part.split_once(':') {
            Some((d, w)) => (
                d.trim().parse::<usize>().map_err(|_| bad_blocks(spec))?,
                w.trim().parse::<f64>().map_err(|_| bad_blocks(spec))?,
            ),
            None => (part.parse::<usize>().map_err(|_| bad_blocks(spec))?, 1.0),
        };
        blocks.push((dim, weight));
    }
    Ok(TracialAlgebra::new(blocks)?.shared())
}

fn bad_blocks(spec: &str) -> CoreError {
    CoreError::InvalidParameter(format!(
        "cannot parse block spec '{spec}' (expected dim:weight pairs like 2:1.0,3:0.5)"
    ))
}

fn parse_function(name: &str) -> Result<ScalarFunction, CoreError> {
    ScalarFunction::parse(name)
}

/// Diagonal `(entry, weight)` pairs of a diagonal operator; rejects
/// operators with off-diagonal mass.
fn diagonal_entries(op: &BlockOperator) -> Result<Vec<(f64, f64)>, CoreError> {
    let mut entries = Vec::new();
    for (m, b) in op.blocks().iter().zip(op.algebra().blocks()) {
        for i in 0..b.dim {
            for j in 0..b.dim {
                let z = m[(i, j)];
                if i != j && z.norm() > 1e-12 {
                    return Err(CoreError::InvalidParameter(
                        "oracle commands require a diagonal operator".into(),
                    ));
                }
                if i == j {
                    if z.im.abs() > 1e-12 {
                        return Err(CoreError::InvalidParameter(
                            "oracle commands require a real diagonal".into(),
                        ));
                    }
                    entries.push((z.re, b.weight));
                }
            }
        }
    }
    Ok(entries)
}
