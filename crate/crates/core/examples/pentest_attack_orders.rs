//! Network penetration scenarios: distinct attack paths by cost and by the
//! order in which sensitive hosts fall.
//!
//! Run with `cargo run --example pentest_attack_orders`.

use divsim::domains::PentestProblem;
use divsim::{fbi, plan_cost, BehaviourSpace, NoveltyConfig, SearchLimits, SimulatorProblem};

const SCENARIO: &str = r#"{
  "subnets": [{"id": "dmz", "internet": true}, {"id": "lan"}, {"id": "vault"}],
  "topology": [["dmz", "lan"], ["lan", "vault"]],
  "hosts": [
    {"id": "web", "subnet": "dmz", "services": ["http"]},
    {"id": "mail", "subnet": "dmz", "services": ["smtp"]},
    {"id": "app", "subnet": "lan", "services": ["ssh"], "sensitive": true},
    {"id": "db", "subnet": "vault", "services": ["sql"], "sensitive": true}
  ],
  "exploits": [
    {"service": "http", "cost": 1},
    {"service": "smtp", "cost": 3},
    {"service": "ssh", "cost": 2},
    {"service": "sql", "cost": 2}
  ]
}"#;

fn main() -> anyhow::Result<()> {
    let problem = PentestProblem::parse(SCENARIO)?;
    println!("actions:");
    for a in problem.actions() {
        println!("  {:<20} cost {}", a.name(), a.cost());
    }

    let bound = 8;
    let space = BehaviourSpace::for_problem(&problem, Some(bound), true)?;
    let result = fbi(
        &problem,
        &space,
        5,
        &NoveltyConfig::trace_local(2),
        &SearchLimits::with_cost_bound(bound),
    )?;
    println!(
        "{} plan(s), {} behaviour(s){}",
        result.plans.len(),
        result.behaviour_count,
        if result.exhausted { ", search space exhausted" } else { "" }
    );
    for (plan, b) in result.plans.iter().zip(&result.behaviours) {
        println!(
            "  cost {}: {}  {}",
            plan_cost(&problem, plan)?,
            plan.names(&problem).join(", "),
            serde_json::to_string(&b.to_record(problem.symbols()))?
        );
    }
    Ok(())
}
