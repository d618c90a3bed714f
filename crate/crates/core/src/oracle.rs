//! Independent brute-force oracles for small commuting instances.
//!
//! These share no code with the matrix path: everything here is plain
//! scalar arithmetic over `(eigenvalue, weight)` lists, set-partition
//! enumeration, and grid search. They exist to pin expected values down
//! before trusting the spectral machinery, and to cross-check certificates
//! on instances small enough to enumerate.

use serde::Serialize;

use crate::error::{Error, Result};

/// A reproducible record of one oracle evaluation.
#[derive(Debug, Clone, Serialize)]
pub struct OracleResult {
    pub quantity: String,
    pub value: f64,
    pub method: String,
    pub input_digest: String,
}

/// `Σ λ log λ · w` with the `0 log 0 = 0` convention, by direct summation.
pub fn oracle_entropy_commuting(eigs: &[(f64, f64)]) -> Result<f64> {
    let mut acc = 0.0;
    for &(lambda, weight) in eigs {
        if lambda < 0.0 {
            return Err(Error::NotPositive { eigenvalue: lambda });
        }
        if weight <= 0.0 || weight.is_nan() {
            return Err(Error::InvalidParameter(format!(
                "non-positive weight {weight}"
            )));
        }
        if lambda > 0.0 {
            acc += lambda * lambda.ln() * weight;
        }
    }
    Ok(acc)
}

/// Enumerate all set partitions of `{0, …, n-1}` (restricted growth strings).
pub fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let mut assignment = vec![0usize; n];
    fn rec(assignment: &mut Vec<usize>, i: usize, max_cell: usize, out: &mut Vec<Vec<Vec<usize>>>) {
        let n = assignment.len();
        if i == n {
            let cells = max_cell + 1;
            let mut partition = vec![Vec::new(); cells];
            for (idx, &c) in assignment.iter().enumerate() {
                partition[c].push(idx);
            }
            out.push(partition);
            return;
        }
        for c in 0..=max_cell + 1 {
            assignment[i] = c;
            rec(assignment, i + 1, max_cell.max(c), out);
        }
    }
    if n == 0 {
        return vec![vec![]];
    }
    assignment[0] = 0;
    rec(&mut assignment, 1, 0, &mut out);
    out
}

/// Exhaustive scan over coordinate partitions of a diagonal operator.
#[derive(Debug, Clone)]
pub struct PartitionScan {
    /// Extremal value over all partitions (max if `maximize`, else min).
    pub best_value: f64,
    /// A partition attaining the extremum (cells of coordinate indices).
    pub best_partition: Vec<Vec<usize>>,
    /// Value of every enumerated partition, in enumeration order.
    pub values: Vec<f64>,
    /// Value of the finest (all-singletons) partition.
    pub finest_value: f64,
}

/// Evaluate `Σ_cells f(α_cell) τ(p_cell)` with `α_cell = Σ λ w / Σ w` for
/// every set partition of the coordinates of a diagonal operator given as
/// `(eigenvalue, weight)` entries. Refuses `n > 4` (combinatorial blowup).
pub fn oracle_partition_exhaustive(
    f: impl Fn(f64) -> f64,
    entries: &[(f64, f64)],
    maximize: bool,
) -> Result<PartitionScan> {
    let n = entries.len();
    if n == 0 || n > 4 {
        return Err(Error::InvalidParameter(format!(
            "exhaustive oracle handles 1..=4 coordinates, got {n}"
        )));
    }
    for &(lambda, weight) in entries {
        if weight <= 0.0 || weight.is_nan() {
            return Err(Error::InvalidParameter(format!(
                "non-positive weight {weight}"
            )));
        }
        if lambda < 0.0 {
            return Err(Error::NotPositive { eigenvalue: lambda });
        }
    }

    let value_of = |partition: &[Vec<usize>]| -> f64 {
        partition
            .iter()
            .map(|cell| {
                let t: f64 = cell.iter().map(|&i| entries[i].1).sum();
                let alpha: f64 = cell.iter().map(|&i| entries[i].0 * entries[i].1).sum::<f64>() / t;
                f(alpha) * t
            })
            .sum()
    };

    let partitions = set_partitions(n);
    let mut values = Vec::with_capacity(partitions.len());
    let mut best: Option<(f64, usize)> = None;
    let mut finest_value = f64::NAN;
    for (idx, partition) in partitions.iter().enumerate() {
        let v = value_of(partition);
        values.push(v);
        if partition.len() == n {
            finest_value = v;
        }
        let better = match best {
            None => true,
            Some((bv, _)) => {
                if maximize {
                    v > bv
                } else {
                    v < bv
                }
            }
        };
        if better {
            best = Some((v, idx));
        }
    }
    let (best_value, best_idx) = best.expect("at least one partition");
    Ok(PartitionScan {
        best_value,
        best_partition: partitions[best_idx].clone(),
        values,
        finest_value,
    })
}

/// Grid search of the dual objective `Σ w d h − log Σ w e^h` over diagonal
/// candidates `h = diag(a, b)`, `a, b ∈ [−20, 5]` in steps of 0.01, for a
/// diagonal rank-≤2 density with eigenvalues `(d1, d2)` and block weights
/// `(w1, w2)`. Returns the grid maximum.
pub fn oracle_gibbs_grid(d1: f64, d2: f64, w1: f64, w2: f64) -> f64 {
    let lo = -20.0f64;
    let hi = 5.0f64;
    let steps = ((hi - lo) / 0.01).round() as usize;
    let mut best = f64::NEG_INFINITY;
    for i in 0..=steps {
        let a = lo + 0.01 * i as f64;
        let ea = w1 * a.exp();
        let da = w1 * d1 * a;
        for j in 0..=steps {
            let b = lo + 0.01 * j as f64;
            let g = da + w2 * d2 * b - (ea + w2 * b.exp()).ln();
            if g > best {
                best = g;
            }
        }
    }
    best
}
