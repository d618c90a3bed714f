//! Acceptance gate: one test per criterion, each printing a PASS/FAIL line.
//!
//! Run with `cargo test -p tracevar --test acceptance -- --nocapture` to see
//! the per-criterion lines and timings.

use std::sync::Arc;
use std::time::Instant;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

use tracevar::algebra::{BlockOperator, TracialAlgebra};
use tracevar::channels::{
    apply_channel, restrict_state, Channel, PinchingMap, UnitaryMixtureMap,
};
use tracevar::entropy::{relative_entropy, renyi_entropy, segal_entropy, trace_functional, DensityOperator};
use tracevar::oracle::oracle_partition_exhaustive;
use tracevar::random::{haar_unitary, random_density, random_psd, random_resolution};
use tracevar::spectral::{eigendecompose, Convexity, ScalarFunction, DEFAULT_CLUSTER_TOL};
use tracevar::variational::{
    constructive_gibbs_witness, default_kernel_split, entropy_over_subalgebras, gibbs_ascent,
    partition_search, renyi_certificate, segal_partition_certificate, AscentOptions,
};

// Tolerances and budgets, pinned per criterion.
const GIBBS_VALUE_TOL: f64 = 1e-6;
const WEAK_DUALITY_TOL: f64 = 1e-9;
const GIBBS_BUDGET_SECS: f64 = 60.0;
const CONSTRUCTIVE_TOL: f64 = 1e-10;
const CONSTRUCTIVE_BUDGET_SECS: f64 = 5.0;
const ATTAINMENT_TOL: f64 = 1e-10;
const DIRECTION_TOL: f64 = 1e-9;
const PARTITION_BUDGET_SECS: f64 = 120.0;
const SEGAL_GAP_TOL: f64 = 1e-10;
const EQUALITY_CASE_TOL: f64 = 1e-10;
const RENYI_TOL: f64 = 1e-9;
const JENSEN_STRONG_TOL: f64 = 1e-9;
const DATA_PROCESSING_TOL: f64 = 1e-9;
const REL_ENTROPY_FLOOR: f64 = -1e-10;
const SELF_RELATIVE_TOL: f64 = 1e-12;
const ENTROPY_VS_TRACE_TOL: f64 = 1e-10;

fn conclude(name: &str, started: Instant, budget: Option<f64>, violations: Vec<String>) {
    let elapsed = started.elapsed().as_secs_f64();
    let mut violations = violations;
    if let Some(limit) = budget {
        if elapsed > limit {
            violations.push(format!("runtime {elapsed:.1}s exceeded budget {limit}s"));
        }
    }
    if violations.is_empty() {
        println!("[PASS] {name} ({elapsed:.2}s)");
    } else {
        println!(
            "[FAIL] {name} ({elapsed:.2}s): {} violation(s); first: {}",
            violations.len(),
            violations[0]
        );
        panic!("{name}: {violations:?}");
    }
}

fn gibbs_patterns() -> Vec<Arc<TracialAlgebra>> {
    vec![
        TracialAlgebra::full(2),
        TracialAlgebra::full(3),
        TracialAlgebra::new([(2, 0.5), (2, 2.0)]).unwrap().shared(),
    ]
}

#[test]
fn criterion_01_gibbs_duality() {
    let started = Instant::now();
    let mut violations = Vec::new();
    let patterns = gibbs_patterns();
    let opts = AscentOptions::default();
    for i in 0..100u64 {
        let alg = &patterns[(i % 3) as usize];
        let mut rng = ChaCha12Rng::seed_from_u64(1000 + i);
        let d = random_density(alg, &mut rng);
        let entropy = segal_entropy(&d);
        let init = BlockOperator::zero(alg.clone());
        match gibbs_ascent(&d, &init, &opts) {
            Ok(candidate) => {
                if (candidate.value - entropy).abs() > GIBBS_VALUE_TOL {
                    violations.push(format!(
                        "instance {i}: |g - H| = {:.3e}",
                        (candidate.value - entropy).abs()
                    ));
                }
                if candidate.value > entropy + WEAK_DUALITY_TOL {
                    violations.push(format!("instance {i}: candidate exceeded H"));
                }
            }
            Err(e) => violations.push(format!("instance {i}: {e}")),
        }
    }
    conclude(
        "criterion 01 gibbs duality (ascent reaches H, never exceeds it)",
        started,
        Some(GIBBS_BUDGET_SECS),
        violations,
    );
}

#[test]
fn criterion_02_constructive_witness() {
    let started = Instant::now();
    let mut violations = Vec::new();
    for &eps in &[1.0, 0.1, 0.01] {
        for kernel_rank in 1..=8usize {
            let dim = 2 + kernel_rank;
            let mut diag = vec![0.0; dim];
            diag[0] = 0.6;
            diag[1] = 0.4;
            let alg = TracialAlgebra::full(dim);
            let d = DensityOperator::new(
                BlockOperator::from_real_diagonal(alg, &diag).unwrap(),
            )
            .unwrap();
            let entropy = segal_entropy(&d);
            let split = default_kernel_split(&d);
            if split.len() != kernel_rank {
                violations.push(format!(
                    "eps={eps} k={kernel_rank}: split has {} cells",
                    split.len()
                ));
                continue;
            }
            match constructive_gibbs_witness(&d, eps, &split) {
                Ok(w) => {
                    let expected =
                        entropy - (1.0 + eps * (1.0 - 2f64.powi(-(kernel_rank as i32)))).ln();
                    if (w.value - expected).abs() > CONSTRUCTIVE_TOL {
                        violations.push(format!(
                            "eps={eps} k={kernel_rank}: |achieved - closed form| = {:.3e}",
                            (w.value - expected).abs()
                        ));
                    }
                    // H − log(1+ε) ≥ H − ε
                    if entropy - (1.0 + eps).ln() < entropy - eps - 1e-12 {
                        violations.push(format!("eps={eps}: log(1+eps) bound failed"));
                    }
                }
                Err(e) => violations.push(format!("eps={eps} k={kernel_rank}: {e}")),
            }
        }
    }
    conclude(
        "criterion 02 constructive ε-witness (gap = log(1 + ε(1 − 2^-k)))",
        started,
        Some(CONSTRUCTIVE_BUDGET_SECS),
        violations,
    );
}

fn partition_catalog() -> Vec<ScalarFunction> {
    vec![
        ScalarFunction::TLogT,
        ScalarFunction::power(2.0).unwrap(),
        ScalarFunction::power(3.0).unwrap(),
        ScalarFunction::power(0.5).unwrap(),
        ScalarFunction::power(0.9).unwrap(),
    ]
}

fn partition_algebras() -> Vec<Arc<TracialAlgebra>> {
    vec![
        TracialAlgebra::full(3),
        TracialAlgebra::full(4),
        TracialAlgebra::new([(2, 0.5), (2, 2.0)]).unwrap().shared(),
    ]
}

#[test]
fn criterion_03_partition_formulae() {
    let started = Instant::now();
    let mut violations = Vec::new();
    let algebras = partition_algebras();
    for (fi, f) in partition_catalog().iter().enumerate() {
        for i in 0..100u64 {
            let alg = &algebras[(i % 3) as usize];
            let mut rng = ChaCha12Rng::seed_from_u64(3000 + 100 * fi as u64 + i);
            let h = random_psd(alg, &mut rng);
            // partition_search verifies every candidate against the bound
            // and fails with a property violation if any crosses it
            match partition_search(f, &h, 4, 1000, 3000 + i) {
                Ok(cert) => {
                    if cert.gap.abs() > ATTAINMENT_TOL {
                        violations.push(format!(
                            "{} instance {i}: spectral witness gap {:.3e}",
                            f.name(),
                            cert.gap.abs()
                        ));
                    }
                    if !cert.respects_direction(DIRECTION_TOL) {
                        violations.push(format!("{} instance {i}: direction violated", f.name()));
                    }
                }
                Err(e) => violations.push(format!("{} instance {i}: {e}", f.name())),
            }
        }
    }
    conclude(
        "criterion 03 partition formulae (spectral attains; 1000 random + dyadic respect direction)",
        started,
        Some(PARTITION_BUDGET_SECS),
        violations,
    );
}

#[test]
fn criterion_04_exhaustive_oracle() {
    let started = Instant::now();
    let mut violations = Vec::new();
    let mut rng = ChaCha12Rng::seed_from_u64(4000);
    for instance in 0..50usize {
        let n = 2 + instance % 3; // dimensions 2..=4
        let entries: Vec<(f64, f64)> = (0..n)
            .map(|_| {
                let lambda = 0.05 + 2.0 * (rng.next_u32() as f64 / u32::MAX as f64);
                let weight = [1.0, 0.5, 2.0][(rng.next_u32() % 3) as usize];
                (lambda, weight)
            })
            .collect();
        // same instance as a block algebra of 1-dim blocks for the matrix path
        let alg =
            TracialAlgebra::new(entries.iter().map(|&(_, w)| (1usize, w))).unwrap().shared();
        let diag: Vec<f64> = entries.iter().map(|&(l, _)| l).collect();
        let h = BlockOperator::from_real_diagonal(alg, &diag).unwrap();

        for f in partition_catalog() {
            let maximize = f.convexity() == Convexity::Convex;
            let scan =
                oracle_partition_exhaustive(|t| f.eval(t), &entries, maximize).unwrap();
            let target = trace_functional(&f, &h).unwrap();
            if (scan.finest_value - target).abs() > 1e-10 {
                violations.push(format!(
                    "instance {instance} {}: finest {} vs τ(f(h)) {}",
                    f.name(),
                    scan.finest_value,
                    target
                ));
            }
            if (scan.best_value - scan.finest_value).abs() > 1e-10 {
                violations.push(format!(
                    "instance {instance} {}: extremum not at the finest partition",
                    f.name()
                ));
            }
            for &v in &scan.values {
                let crossed = if maximize {
                    v > target + DIRECTION_TOL
                } else {
                    v < target - DIRECTION_TOL
                };
                if crossed {
                    violations.push(format!(
                        "instance {instance} {}: partition value {v} crossed {target}",
                        f.name()
                    ));
                }
            }
        }
    }
    conclude(
        "criterion 04 exhaustive oracle equivalence (all set partitions, n ≤ 4)",
        started,
        None,
        violations,
    );
}

#[test]
fn criterion_05_segal_certificate() {
    let started = Instant::now();
    let mut violations = Vec::new();

    // spectral witness attains the sup
    for i in 0..10u64 {
        let alg = &partition_algebras()[(i % 3) as usize];
        let mut rng = ChaCha12Rng::seed_from_u64(5000 + i);
        let d = random_density(alg, &mut rng);
        match segal_partition_certificate(&d, 4, 500, 5000 + i) {
            Ok(cert) => {
                if cert.gap.abs() > SEGAL_GAP_TOL {
                    violations.push(format!("instance {i}: gap {:.3e}", cert.gap.abs()));
                }
            }
            Err(e) => violations.push(format!("instance {i}: {e}")),
        }
    }

    // equality case: D = I/3 on M₃ gives −log 3 for every resolution
    let alg = TracialAlgebra::full(3);
    let d = DensityOperator::new(
        BlockOperator::identity(alg.clone()).scale(1.0 / 3.0),
    )
    .unwrap();
    let expected = -(3.0f64).ln();
    let mut rng = ChaCha12Rng::seed_from_u64(5100);
    for s in 0..200usize {
        let cells = 1 + s % 3;
        let r = random_resolution(&alg, cells, &mut rng).unwrap();
        let value: f64 = restrict_state(&d, &r)
            .unwrap()
            .iter()
            .map(|&(w, t)| if w > 0.0 { w * (w.ln() - t.ln()) } else { 0.0 })
            .sum();
        if (value - expected).abs() > EQUALITY_CASE_TOL {
            violations.push(format!(
                "equality case sample {s}: value {value} differs from −log 3"
            ));
        }
    }

    conclude(
        "criterion 05 segal certificate (spectral gap ≤ 1e-10; equality case constant)",
        started,
        None,
        violations,
    );
}

#[test]
fn criterion_06_renyi_certificates() {
    let started = Instant::now();
    let mut violations = Vec::new();
    let algebras = partition_algebras();
    for &alpha in &[0.5, 2.0, 3.0] {
        for i in 0..50u64 {
            let alg = &algebras[(i % 3) as usize];
            let mut rng = ChaCha12Rng::seed_from_u64(6000 + i);
            let d = random_density(alg, &mut rng);
            let reference = renyi_entropy(&d, alpha).unwrap();
            match renyi_certificate(&d, alpha, 3, 300, 6000 + i) {
                Ok(cert) => {
                    if (cert.achieved - reference).abs() > RENYI_TOL {
                        violations.push(format!(
                            "alpha={alpha} instance {i}: |achieved - R| = {:.3e}",
                            (cert.achieved - reference).abs()
                        ));
                    }
                    if !cert.respects_direction(DIRECTION_TOL) {
                        violations.push(format!("alpha={alpha} instance {i}: direction violated"));
                    }
                }
                Err(e) => violations.push(format!("alpha={alpha} instance {i}: {e}")),
            }
        }
    }
    conclude(
        "criterion 06 Rényi certificates (value matches Rényi entropy, oracle-fixed orientation)",
        started,
        None,
        violations,
    );
}

#[test]
fn criterion_07_jensen_suite() {
    let started = Instant::now();
    let mut violations = Vec::new();
    let operator_convex = [
        ScalarFunction::power(1.5).unwrap(),
        ScalarFunction::power(2.0).unwrap(),
        ScalarFunction::TLogT,
    ];
    let full_catalog = {
        let mut fs = partition_catalog();
        fs.push(ScalarFunction::Exp);
        fs.push(ScalarFunction::Identity);
        fs
    };
    let algebras = partition_algebras();
    let mut rng = ChaCha12Rng::seed_from_u64(7000);
    for i in 0..200usize {
        let alg = &algebras[i % 3];
        let h = random_psd(alg, &mut rng);
        let cells = 1 + (rng.next_u32() as usize) % alg.total_dim();
        let pinch = PinchingMap::new(random_resolution(alg, cells, &mut rng).unwrap()).unwrap();
        let pinched_h = pinch.apply(&h).unwrap();

        // strong form: Φ(f(h)) − f(Φ(h)) is PSD for operator-convex f
        for f in &operator_convex {
            let lhs = pinch
                .apply(&tracevar::apply_function(f, &h).unwrap())
                .unwrap();
            let rhs = tracevar::apply_function(f, &pinched_h).unwrap();
            let min_eig = eigendecompose(&lhs.sub(&rhs).unwrap(), DEFAULT_CLUSTER_TOL)
                .unwrap()
                .min_eigenvalue();
            if min_eig < -JENSEN_STRONG_TOL {
                violations.push(format!(
                    "pinching {i} {}: strong form eigenvalue {min_eig:.3e}",
                    f.name()
                ));
            }
        }

        // weak form for the whole catalog, both convexity directions
        for f in &full_catalog {
            let lhs = trace_functional(f, &pinched_h).unwrap();
            let rhs = trace_functional(f, &h).unwrap();
            let crossed = match f.convexity() {
                Convexity::Convex => lhs > rhs + DIRECTION_TOL,
                Convexity::Concave => lhs < rhs - DIRECTION_TOL,
                Convexity::Neither => false,
            };
            if crossed {
                violations.push(format!(
                    "pinching {i} {}: weak form τ(f(Φh)) = {lhs} vs τ(f(h)) = {rhs}",
                    f.name()
                ));
            }
        }
    }
    conclude(
        "criterion 07 Jensen suite (strong form PSD for operator-convex; weak form for catalog)",
        started,
        None,
        violations,
    );
}

#[test]
fn criterion_08_data_processing() {
    let started = Instant::now();
    let mut violations = Vec::new();
    let algebras = partition_algebras();
    let mut rng = ChaCha12Rng::seed_from_u64(8000);
    for i in 0..500usize {
        let alg = &algebras[i % 3];
        let d = random_density(alg, &mut rng);
        let channel = if i % 2 == 0 {
            let cells = 1 + (rng.next_u32() as usize) % alg.total_dim();
            Channel::Pinching(
                PinchingMap::new(random_resolution(alg, cells, &mut rng).unwrap()).unwrap(),
            )
        } else {
            Channel::UnitaryMixture(
                UnitaryMixtureMap::symmetrized(vec![
                    (haar_unitary(alg, &mut rng), 0.4),
                    (haar_unitary(alg, &mut rng), 0.6),
                ])
                .unwrap(),
            )
        };
        let image = DensityOperator::new(apply_channel(&channel, d.operator()).unwrap()).unwrap();
        if segal_entropy(&image) > segal_entropy(&d) + DATA_PROCESSING_TOL {
            violations.push(format!(
                "map {i}: H(Φ(D)) = {} > H(D) = {}",
                segal_entropy(&image),
                segal_entropy(&d)
            ));
        }
    }

    // the subalgebra certificate reaches H(ω)
    for i in 0..10u64 {
        let alg = &algebras[(i % 3) as usize];
        let mut rng = ChaCha12Rng::seed_from_u64(8100 + i);
        let d = random_density(alg, &mut rng);
        match entropy_over_subalgebras(&d, 3, 300, 8100 + i) {
            Ok(cert) => {
                if cert.gap.abs() > DATA_PROCESSING_TOL {
                    violations.push(format!("subalgebras {i}: gap {:.3e}", cert.gap.abs()));
                }
            }
            Err(e) => violations.push(format!("subalgebras {i}: {e}")),
        }
    }
    conclude(
        "criterion 08 data processing (500 maps; subalgebra sup equals H)",
        started,
        None,
        violations,
    );
}

#[test]
fn criterion_09_relative_entropy() {
    let started = Instant::now();
    let mut violations = Vec::new();
    let algebras = partition_algebras();
    let mut rng = ChaCha12Rng::seed_from_u64(9000);
    for i in 0..500usize {
        let alg = &algebras[i % 3];
        let mut omega = random_density(alg, &mut rng);
        if i % 4 == 0 {
            // introduce a kernel: zero the smallest eigenvalue, renormalise
            let pairs = omega.spectral().pairs();
            let mut acc = BlockOperator::zero(alg.clone());
            for p in &pairs[1..] {
                acc = acc.add(&p.projection.scale(p.value)).unwrap();
            }
            let trace = acc.re_trace();
            omega = DensityOperator::new(acc.scale(1.0 / trace)).unwrap();
        }
        let phi = if i % 3 == 0 {
            // commuting pair: mix with the identity in the same basis
            let identity = BlockOperator::identity(alg.clone());
            let blend = omega
                .operator()
                .scale(0.6)
                .add(&identity.scale(0.4 / alg.trace_of_identity()))
                .unwrap();
            DensityOperator::new(blend).unwrap()
        } else {
            random_density(alg, &mut rng)
        };
        match relative_entropy(&omega, &phi) {
            Ok(s) => {
                if s < REL_ENTROPY_FLOOR {
                    violations.push(format!("pair {i}: S = {s}"));
                }
            }
            Err(e) => violations.push(format!("pair {i}: {e}")),
        }
        if i % 10 == 0 {
            let s_self = relative_entropy(&omega, &omega).unwrap();
            if s_self.abs() > SELF_RELATIVE_TOL {
                violations.push(format!("pair {i}: S(ω,ω) = {s_self}"));
            }
        }
    }

    // H(ω) = S(ω, τ) on a normalised trace
    let alg = TracialAlgebra::new([(2, 0.25), (2, 0.25)]).unwrap().shared();
    let tau = DensityOperator::new(BlockOperator::identity(alg.clone())).unwrap();
    for i in 0..50u64 {
        let mut rng = ChaCha12Rng::seed_from_u64(9500 + i);
        let d = random_density(&alg, &mut rng);
        let s = relative_entropy(&d, &tau).unwrap();
        if (segal_entropy(&d) - s).abs() > ENTROPY_VS_TRACE_TOL {
            violations.push(format!(
                "instance {i}: |H - S(ω,τ)| = {:.3e}",
                (segal_entropy(&d) - s).abs()
            ));
        }
    }
    conclude(
        "criterion 09 relative entropy (nonnegative; S(ω,ω) ≈ 0; H = S(ω,τ))",
        started,
        None,
        violations,
    );
}

#[test]
fn criterion_10_determinism() {
    let started = Instant::now();
    let mut violations = Vec::new();
    let alg = TracialAlgebra::new([(2, 0.5), (2, 2.0)]).unwrap().shared();
    let mut rng = ChaCha12Rng::seed_from_u64(10_000);
    let d = random_density(&alg, &mut rng);
    let h = random_psd(&alg, &mut rng);

    let runs: Vec<(&str, Box<dyn Fn() -> String>)> = vec![
        (
            "segal",
            Box::new({
                let d = d.clone();
                move || segal_partition_certificate(&d, 3, 250, 7).unwrap().to_json()
            }),
        ),
        (
            "renyi",
            Box::new({
                let d = d.clone();
                move || renyi_certificate(&d, 2.0, 3, 250, 7).unwrap().to_json()
            }),
        ),
        (
            "partition",
            Box::new({
                let h = h.clone();
                move || {
                    partition_search(&ScalarFunction::power(2.0).unwrap(), &h, 3, 250, 7)
                        .unwrap()
                        .to_json()
                }
            }),
        ),
        (
            "subalgebras",
            Box::new({
                let d = d.clone();
                move || entropy_over_subalgebras(&d, 3, 250, 7).unwrap().to_json()
            }),
        ),
        (
            "gibbs",
            Box::new({
                let d = d.clone();
                move || {
                    let witness = constructive_gibbs_witness(&d, 0.1, &[]).unwrap();
                    tracevar::gibbs_certificate(
                        &d,
                        witness,
                        tracevar::CertificateParams {
                            eps: Some(0.1),
                            ..Default::default()
                        },
                    )
                    .to_json()
                }
            }),
        ),
    ];
    for (name, run) in runs {
        let first = run();
        let second = run();
        if first != second {
            violations.push(format!("{name}: reruns differ"));
        }
        if first.is_empty() {
            violations.push(format!("{name}: empty certificate"));
        }
    }
    conclude(
        "criterion 10 determinism (same seed, byte-identical certificate JSON)",
        started,
        None,
        violations,
    );
}
