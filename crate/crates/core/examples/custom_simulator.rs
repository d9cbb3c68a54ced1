//! Plugging in your own simulator: a tiny kitchen where the kettle and the
//! toast can be finished in either order, and the planner reports both.
//!
//! Run with `cargo run --example custom_simulator`.

use divsim::{
    fbi, Action, ActionId, BehaviourSpace, NoveltyConfig, Predicate, SearchLimits, SimulatorProblem,
    State, Symbols,
};

#[derive(Clone, Copy, Default)]
struct Kitchen {
    water: bool,
    boiled: bool,
    bread: bool,
    toasted: bool,
}

struct Breakfast {
    symbols: Symbols,
    actions: Vec<Action>,
    goals: Vec<Predicate>,
    preds: [Predicate; 2],
}

impl Breakfast {
    fn new() -> anyhow::Result<Self> {
        let mut symbols = Symbols::new();
        let goals = vec![symbols.intern("tea-ready"), symbols.intern("toast-ready")];
        let preds = [symbols.intern("kettle-full"), symbols.intern("bread-in")];
        let actions = vec![
            Action::new("fill-kettle", 1)?,
            Action::new("boil", 3)?,
            Action::new("slice-bread", 1)?,
            Action::new("toast", 2)?,
        ];
        Ok(Breakfast {
            symbols,
            actions,
            goals,
            preds,
        })
    }
}

impl SimulatorProblem for Breakfast {
    type World = Kitchen;

    fn symbols(&self) -> &Symbols {
        &self.symbols
    }

    fn actions(&self) -> &[Action] {
        &self.actions
    }

    fn initial(&self) -> Kitchen {
        Kitchen::default()
    }

    fn observe(&self, k: &Kitchen) -> State {
        let mut s = State::new();
        for (on, p) in [
            (k.boiled, self.goals[0]),
            (k.toasted, self.goals[1]),
            (k.water, self.preds[0]),
            (k.bread, self.preds[1]),
        ] {
            if on {
                s.insert(p);
            }
        }
        s
    }

    fn applicable(&self, k: &Kitchen) -> Vec<ActionId> {
        [!k.water, k.water && !k.boiled, !k.bread, k.bread && !k.toasted]
            .into_iter()
            .enumerate()
            .filter(|(_, ok)| *ok)
            .map(|(i, _)| ActionId(i as u32))
            .collect()
    }

    fn simulate(&self, k: &Kitchen, a: ActionId) -> Option<Kitchen> {
        if !self.applicable(k).contains(&a) {
            return None;
        }
        let mut next = *k;
        match a.0 {
            0 => next.water = true,
            1 => next.boiled = true,
            2 => next.bread = true,
            _ => next.toasted = true,
        }
        Some(next)
    }

    fn is_goal(&self, k: &Kitchen) -> bool {
        k.boiled && k.toasted
    }

    fn goal_predicates(&self) -> &[Predicate] {
        &self.goals
    }
}

fn main() -> anyhow::Result<()> {
    let problem = Breakfast::new()?;
    let space = BehaviourSpace::for_problem(&problem, None, true)?;
    let result = fbi(
        &problem,
        &space,
        3,
        &NoveltyConfig::trace_local(2),
        &SearchLimits::with_cost_bound(20),
    )?;
    for (plan, b) in result.plans.iter().zip(&result.behaviours) {
        println!(
            "{:<45} {:?}",
            plan.names(&problem).join(" "),
            b.to_record(problem.symbols()).goal_order.unwrap_or_default()
        );
    }
    println!(
        "{} plan(s), {} behaviour(s); the first {} came from behaviour forbidding",
        result.plans.len(),
        result.behaviour_count,
        result.behaviour_phase
    );
    Ok(())
}
