//! Diverse plans on a small grid: behaviour forbidding against the
//! plan-forbidding baseline.
//!
//! Run with `cargo run --example grid_diverse_plans`.

use divsim::domains::GridProblem;
use divsim::{
    behaviour_formula, fbi, fbi_naive, format_formula, BehaviourSpace, NoveltyConfig, PlanSetResult,
    SearchLimits, SimulatorProblem,
};

const LEVEL: &str = "\
T..T
.S..
....
...T
";

fn show(label: &str, p: &GridProblem, r: &PlanSetResult) {
    println!("{label}: {} plan(s), {} distinct behaviour(s)", r.plans.len(), r.behaviour_count);
    for (plan, b) in r.plans.iter().zip(&r.behaviours) {
        let record = b.to_record(p.symbols());
        println!(
            "  cost {:>2}  order {:?}\n    {}",
            record.cost.unwrap_or_default(),
            record.goal_order.unwrap_or_default(),
            plan.names(p).join(" ")
        );
    }
}

fn main() -> anyhow::Result<()> {
    let problem = GridProblem::parse(LEVEL)?;
    let bound = 12;
    // Goal order plus final cost, with costs up to the bound.
    let space = BehaviourSpace::for_problem(&problem, Some(bound), true)?;
    let novelty = NoveltyConfig::trace_local(2);
    let limits = SearchLimits::with_cost_bound(bound);

    let diverse = fbi(&problem, &space, 6, &novelty, &limits)?;
    let naive = fbi_naive(&problem, &space, 6, &novelty, &limits)?;
    show("behaviour forbidding", &problem, &diverse);
    show("plan forbidding", &problem, &naive);

    let first = &diverse.behaviours[0];
    println!(
        "first behaviour as LTLf: {}",
        format_formula(&behaviour_formula(problem.symbols(), first))
    );
    Ok(())
}
