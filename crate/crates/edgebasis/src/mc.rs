//! Parallel Monte Carlo runs and CSV sweeps.

use std::fmt::Write as _;

use edgebasis_core::probability::{chunk_count, chunk_len, monte_carlo_chunk};
use edgebasis_core::{BasisArity, McEstimate, ProbabilityParams};
use rayon::prelude::*;

/// Same estimate as the sequential core routine, with chunks spread over threads.
pub fn parallel_monte_carlo(
    params: &ProbabilityParams,
    arity: BasisArity,
    trials: u64,
    seed: u64,
) -> edgebasis_core::Result<McEstimate> {
    if trials == 0 {
        return Err(edgebasis_core::Error::Domain("at least one trial is required"));
    }
    let misses = (0..chunk_count(trials))
        .into_par_iter()
        .map(|c| monte_carlo_chunk(params, arity, seed, c, chunk_len(trials, c)))
        .collect::<edgebasis_core::Result<Vec<u64>>>()?
        .into_iter()
        .sum();
    Ok(McEstimate::from_counts(misses, trials))
}

pub const CSV_HEADER: &str = "p,m,closed_form,mc_estimate,stderr";

/// One row per (p, m), p varying slowest. Row `r` uses seed `seed + r`.
pub fn sweep_csv(
    ps: &[f64],
    ms: &[u32],
    arity: BasisArity,
    trials: u64,
    seed: u64,
    parallel: bool,
) -> edgebasis_core::Result<String> {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    let mut row = 0u64;
    for &p in ps {
        for &m in ms {
            let params = ProbabilityParams::new(p, m)?;
            let exact = arity.miss_probability(&params)?;
            let row_seed = seed.wrapping_add(row);
            let est = if parallel {
                parallel_monte_carlo(&params, arity, trials, row_seed)?
            } else {
                edgebasis_core::monte_carlo_miss(&params, arity, trials, row_seed)?
            };
            writeln!(out, "{p},{m},{exact:.6e},{:.6e},{:.6e}", est.estimate, est.stderr).expect("write to String");
            row += 1;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_equals_sequential() {
        let params = ProbabilityParams::new(0.3, 4).unwrap();
        for trials in [1, 1000, 65536, 65537, 300_000] {
            let seq = edgebasis_core::monte_carlo_miss(&params, BasisArity::Two, trials, 9).unwrap();
            assert_eq!(parallel_monte_carlo(&params, BasisArity::Two, trials, 9).unwrap(), seq);
        }
    }

    #[test]
    fn sweep_rows() {
        let csv = sweep_csv(&[0.25], &[20], BasisArity::Two, 1000, 1, true).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(&row[..2], &["0.25", "20"]);
        assert_eq!(row[2], "6.600262e-8");
        assert_eq!(csv, sweep_csv(&[0.25], &[20], BasisArity::Two, 1000, 1, false).unwrap());
    }
}
