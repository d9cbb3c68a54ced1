//! Generate a seeded grid suite, run both modes across several k, and
//! compare behaviour counts with a paired t-test.
//!
//! Run with `cargo run --release --example suite_benchmark`.

use std::time::Duration;

use divsim::bench::{generate_grid_suite, run_suite, write_grid_suite, write_report, Features, GridSuiteParams, SuiteConfig};
use divsim::{NoveltyConfig, SearchLimits};

fn main() -> anyhow::Result<()> {
    let dir = tempfile::tempdir()?;
    let params = GridSuiteParams::default();
    let suite = generate_grid_suite(7, 12, &params);
    write_grid_suite(dir.path(), &suite)?;
    println!("{} instances in {}", suite.len(), dir.path().display());

    let config = SuiteConfig {
        k_list: vec![2, 5],
        features: Features { goal_order: true, cost: true },
        novelty: NoveltyConfig::trace_local(2),
        limits: SearchLimits {
            cost_bound: params.cost_bound + 4,
            time_budget: Duration::from_secs(30),
            node_budget: 5_000_000,
        },
        ..SuiteConfig::default()
    };
    let report = run_suite(dir.path(), &config)?;
    let out = dir.path().join("results.csv");
    write_report(&report, &out)?;

    for a in &report.aggregates {
        print!(
            "k={:<3} coverage {}/{}  BC fbi {:>3}  naive {:>3}",
            a.k, a.coverage_fbi, a.coverage_naive, a.bc_fbi, a.bc_naive
        );
        match a.t_test {
            Some(t) => println!("  t={:.3} p={:.2e} df={}", t.t, t.p, t.df),
            None => println!("  (too few common instances for a t-test)"),
        }
    }
    println!("rows:\n{}", std::fs::read_to_string(&out)?);
    Ok(())
}
