//! Exhaustive behaviour enumeration for small instances.
//!
//! Depth-first over every action sequence up to a length limit, with no
//! novelty pruning and no duplicate detection. A sequence stops at its first
//! goal state, matching the planners, which never extend a goal node.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::behaviour::{Behaviour, BehaviourSpace};
use crate::model::{ActionId, Plan, SimulatorProblem};

/// Node guard: enumeration aborts once it has generated this many nodes.
pub const ORACLE_NODE_LIMIT: u64 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("oracle enumeration exceeded {limit} nodes")]
pub struct OracleTooLarge {
    pub limit: u64,
}

/// Every distinct behaviour of a goal-reaching plan of at most `max_len`
/// actions, with the shortest (then lexicographically least) witness plan.
///
/// Plans are limited to the space's cost bound when it has one, and to
/// `cost_limit` when given.
pub fn brute_force_behaviours<P: SimulatorProblem + ?Sized>(
    problem: &P,
    space: &BehaviourSpace,
    max_len: usize,
    cost_limit: Option<u64>,
) -> Result<BTreeMap<Behaviour, Plan>, OracleTooLarge> {
    brute_force_with_limit(problem, space, max_len, cost_limit, ORACLE_NODE_LIMIT)
}

pub fn brute_force_with_limit<P: SimulatorProblem + ?Sized>(
    problem: &P,
    space: &BehaviourSpace,
    max_len: usize,
    cost_limit: Option<u64>,
    node_limit: u64,
) -> Result<BTreeMap<Behaviour, Plan>, OracleTooLarge> {
    let bound = match (space.cost_bound(), cost_limit) {
        (Some(a), Some(b)) => a.min(b),
        (a, b) => a.or(b).unwrap_or(u64::MAX),
    };
    let mut walk = Walk {
        problem,
        space,
        max_len,
        bound,
        node_limit,
        nodes: 0,
        goals: problem.goal_predicates().to_vec(),
        latch: Vec::new(),
        path: Vec::new(),
        found: BTreeMap::new(),
    };
    let world = problem.initial();
    let raw = problem.observe(&world);
    walk.latch = walk.goals.iter().map(|&g| raw.contains(g).then_some(0)).collect();
    walk.visit(&world, 0)?;
    Ok(walk.found)
}

struct Walk<'a, P: SimulatorProblem + ?Sized> {
    problem: &'a P,
    space: &'a BehaviourSpace,
    max_len: usize,
    bound: u64,
    node_limit: u64,
    nodes: u64,
    goals: Vec<crate::model::Predicate>,
    latch: Vec<Option<usize>>,
    path: Vec<ActionId>,
    found: BTreeMap<Behaviour, Plan>,
}

impl<P: SimulatorProblem + ?Sized> Walk<'_, P> {
    fn visit(&mut self, world: &P::World, cost: u64) -> Result<(), OracleTooLarge> {
        self.nodes += 1;
        if self.nodes > self.node_limit {
            return Err(OracleTooLarge {
                limit: self.node_limit,
            });
        }
        if self.problem.is_goal(world) {
            let goals = &self.goals;
            let latch = &self.latch;
            let b = self.space.value(cost, |p| {
                goals.iter().position(|&g| g == p).and_then(|i| latch[i])
            });
            let plan = Plan::new(self.path.clone());
            let better = |old: &Plan| {
                (plan.len(), plan.actions()) < (old.len(), old.actions())
            };
            match self.found.get(&b) {
                Some(old) if !better(old) => {}
                _ => {
                    self.found.insert(b, plan);
                }
            }
            return Ok(());
        }
        if self.path.len() == self.max_len {
            return Ok(());
        }
        for a in self.problem.applicable(world) {
            let next_cost = cost + self.problem.action(a).cost();
            if next_cost > self.bound {
                continue;
            }
            let Some(next) = self.problem.simulate(world, a) else {
                continue;
            };
            let raw = self.problem.observe(&next);
            let depth = self.path.len() + 1;
            let saved = self.latch.clone();
            for (slot, &g) in self.latch.iter_mut().zip(&self.goals) {
                if slot.is_none() && raw.contains(g) {
                    *slot = Some(depth);
                }
            }
            self.path.push(a);
            let result = self.visit(&next, next_cost);
            self.path.pop();
            self.latch = saved;
            result?;
        }
        Ok(())
    }
}
