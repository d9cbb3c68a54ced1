//! Cross-check the planner against exhaustive enumeration on a tiny grid.
//!
//! Run with `cargo run --example oracle_check`.

use std::collections::BTreeSet;

use divsim::domains::GridProblem;
use divsim::{brute_force_behaviours, fbi, BehaviourSpace, NoveltyConfig, SearchLimits, SimulatorProblem};

fn main() -> anyhow::Result<()> {
    let problem = GridProblem::parse("T.T\n.S.\n.T.\n")?;
    let max_len = 8;
    let space = BehaviourSpace::for_problem(&problem, None, true)?;

    let oracle = brute_force_behaviours(&problem, &space, max_len, Some(max_len as u64))?;
    println!("oracle: {} behaviour(s)", oracle.len());
    for (b, witness) in &oracle {
        println!(
            "  {:?}  e.g. {}",
            b.to_record(problem.symbols()).goal_order.unwrap_or_default(),
            witness.names(&problem).join(" ")
        );
    }

    // Ask for more plans than there are behaviours; phase one finds them all.
    let result = fbi(
        &problem,
        &space,
        oracle.len() + 3,
        &NoveltyConfig::trace_local(2),
        &SearchLimits::with_cost_bound(max_len as u64),
    )?;
    let planner: BTreeSet<_> = result.behaviours[..result.behaviour_phase].iter().collect();
    let expected: BTreeSet<_> = oracle.keys().collect();
    println!(
        "planner: {} behaviour(s) in phase one, {} plan(s) total; sets equal: {}",
        planner.len(),
        result.plans.len(),
        planner == expected
    );
    Ok(())
}
