//! Puzznic physics and frame-by-frame playback of diverse plans.
//!
//! Run with `cargo run --example puzznic_playback`.

use divsim::domains::PuzznicProblem;
use divsim::render::render_puzznic;
use divsim::{fbi, BehaviourSpace, NoveltyConfig, SearchLimits, SimulatorProblem};

// Two pairs; pushing left or right decides which pair clears first.
const LEVEL: &str = "\
#######
#a.@.b#
##a#b##
#######
";

fn main() -> anyhow::Result<()> {
    let problem = PuzznicProblem::parse(LEVEL)?;
    println!("{}", problem.level());

    let bound = 10;
    let space = BehaviourSpace::for_problem(&problem, None, true)?;
    let result = fbi(
        &problem,
        &space,
        2,
        &NoveltyConfig::trace_local(2),
        &SearchLimits::with_cost_bound(bound),
    )?;

    for (i, plan) in result.plans.iter().enumerate() {
        let order = result.behaviours[i].to_record(problem.symbols()).goal_order;
        println!("plan {i}: {}  behaviour {:?}", plan.names(&problem).join(" "), order);
        print!("{}", render_puzznic(&problem, plan)?);
        println!();
    }
    Ok(())
}
