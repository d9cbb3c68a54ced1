//! Reference IW(1..N): returns the first goal plan met by breadth-first search
//! with novelty pruning and duplicate detection on raw state plus latched goals.

use std::collections::{BTreeSet, HashSet, VecDeque};

use super::novelty::{is_novel_in_history, GlobalNovelty};
use super::{NoveltyConfig, NoveltyScope, SearchLimits};
use crate::model::{ActionId, Plan, Predicate, SimulatorProblem, State};

struct Entry<W> {
    world: W,
    states: Vec<State>,
    actions: Vec<ActionId>,
    cost: u64,
    latched: BTreeSet<Predicate>,
}

/// Plain iterated width. Ignores the time and node budgets.
pub fn iterated_width<P: SimulatorProblem + ?Sized>(
    problem: &P,
    novelty: &NoveltyConfig,
    limits: &SearchLimits,
) -> Option<Plan> {
    let latch = |set: &BTreeSet<Predicate>, s: &State| -> BTreeSet<Predicate> {
        let mut out = set.clone();
        out.extend(problem.goal_predicates().iter().filter(|&&g| s.contains(g)));
        out
    };
    for width in 1..=novelty.max_width {
        let world = problem.initial();
        if problem.is_goal(&world) {
            return Some(Plan::empty());
        }
        let raw = problem.observe(&world);
        let latched = latch(&BTreeSet::new(), &raw);
        let mut global = GlobalNovelty::new();
        global.record(&raw, width);
        let mut visited = HashSet::from([(raw.clone(), latched.clone())]);
        let mut queue = VecDeque::from([Entry {
            world,
            states: vec![raw],
            actions: vec![],
            cost: 0,
            latched,
        }]);
        while let Some(entry) = queue.pop_front() {
            for a in problem.applicable(&entry.world) {
                let cost = entry.cost + problem.action(a).cost();
                if cost > limits.cost_bound {
                    continue;
                }
                let Some(next) = problem.simulate(&entry.world, a) else {
                    continue;
                };
                let raw = problem.observe(&next);
                let latched = latch(&entry.latched, &raw);
                let key = (raw.clone(), latched.clone());
                if visited.contains(&key) {
                    continue;
                }
                let novel = match novelty.scope {
                    NoveltyScope::TraceLocal => is_novel_in_history(entry.states.iter(), &raw, width),
                    NoveltyScope::Global => global.check_and_record(&raw, width),
                };
                if !novel {
                    continue;
                }
                let mut actions = entry.actions.clone();
                actions.push(a);
                if problem.is_goal(&next) {
                    return Some(Plan::new(actions));
                }
                visited.insert(key);
                let mut states = entry.states.clone();
                states.push(raw);
                queue.push_back(Entry {
                    world: next,
                    states,
                    actions,
                    cost,
                    latched,
                });
            }
        }
    }
    None
}
