//! Paired two-tailed t-test over behaviour-count pairs.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("a paired t-test needs at least two pairs, got {0}")]
    TooFewPairs(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TTest {
    pub t: f64,
    pub p: f64,
    pub df: usize,
    /// All differences were equal, so the statistic is undefined. `p` is 1
    /// when the common difference is zero and 0 otherwise; `t` is 0 or
    /// signed infinity accordingly.
    pub degenerate: bool,
}

/// Paired t-test on `d_i = a_i - b_i`: `t = mean(d) / (sd(d) / sqrt(n))`,
/// `df = n - 1`, two-tailed `p`.
pub fn paired_t_test(pairs: &[(f64, f64)]) -> Result<TTest, StatsError> {
    let n = pairs.len();
    if n < 2 {
        return Err(StatsError::TooFewPairs(n));
    }
    let d: Vec<f64> = pairs.iter().map(|(a, b)| a - b).collect();
    let mean = d.iter().sum::<f64>() / n as f64;
    let var = d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let df = n - 1;
    if d.iter().all(|&x| x == d[0]) {
        return Ok(TTest {
            t: if mean == 0.0 { 0.0 } else { f64::INFINITY.copysign(mean) },
            p: if mean == 0.0 { 1.0 } else { 0.0 },
            df,
            degenerate: true,
        });
    }
    let t = mean / (var.sqrt() / (n as f64).sqrt());
    let dist = StudentsT::new(0.0, 1.0, df as f64).expect("df is positive");
    let p = (2.0 * dist.cdf(-t.abs())).min(1.0);
    Ok(TTest {
        t,
        p,
        df,
        degenerate: false,
    })
}

/// Convenience wrapper for integer counts.
pub fn paired_t_test_counts(pairs: &[(usize, usize)]) -> Result<TTest, StatsError> {
    let pairs: Vec<(f64, f64)> = pairs.iter().map(|&(a, b)| (a as f64, b as f64)).collect();
    paired_t_test(&pairs)
}
