//! Behaviour spaces and behaviour extraction.
//!
//! A behaviour is the tuple of per-feature values of a plan: its final cost
//! (cost-bound feature) and the order in which goal predicates were first
//! achieved (goal-order feature). Two plans are semantically the same iff their
//! behaviours are equal. Each behaviour also renders to an LTLf conjunction
//! over the atoms produced by [`trace_view`](crate::model::trace_view).

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ltlf::Formula;
use crate::model::{
    cost_atom, latch_atom, replay, ModelError, Plan, Predicate, SimulatorProblem, Symbols, Trace,
    GOAL_STATE_ATOM,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BehaviourError {
    #[error("a behaviour space needs at least one feature")]
    NoFeatures,
    #[error("cost bound must be at least 1")]
    ZeroCostBound,
    #[error("goal-order feature needs at least one goal predicate")]
    NoGoals,
    #[error("goal predicate listed twice in the goal-order feature")]
    DuplicateGoal,
    #[error("feature kind declared twice")]
    DuplicateFeature,
    #[error("goal-order predicate `{0}` is not a goal predicate of the problem")]
    UnknownGoal(String),
    #[error("plan does not end in a goal state")]
    NotAGoalPlan,
    #[error("plan cost {cost} exceeds the cost bound {bound}")]
    CostBoundExceeded { cost: u64, bound: u64 },
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feature {
    /// Distinguishes plans by final cost, for costs up to the bound.
    CostBound(u64),
    /// Distinguishes plans by the order their goal predicates first hold.
    GoalOrder(Vec<Predicate>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BehaviourSpace {
    features: Vec<Feature>,
}

impl BehaviourSpace {
    pub fn new(features: Vec<Feature>) -> Result<Self, BehaviourError> {
        if features.is_empty() {
            return Err(BehaviourError::NoFeatures);
        }
        let (mut cb, mut go) = (0, 0);
        for f in &features {
            match f {
                Feature::CostBound(c) => {
                    cb += 1;
                    if *c == 0 {
                        return Err(BehaviourError::ZeroCostBound);
                    }
                }
                Feature::GoalOrder(goals) => {
                    go += 1;
                    if goals.is_empty() {
                        return Err(BehaviourError::NoGoals);
                    }
                    let unique: HashSet<_> = goals.iter().collect();
                    if unique.len() != goals.len() {
                        return Err(BehaviourError::DuplicateGoal);
                    }
                }
            }
        }
        if cb > 1 || go > 1 {
            return Err(BehaviourError::DuplicateFeature);
        }
        Ok(BehaviourSpace { features })
    }

    /// The usual space for a problem: goal order over all of its goal
    /// predicates and/or a cost bound.
    pub fn for_problem<P: SimulatorProblem + ?Sized>(
        problem: &P,
        cost_bound: Option<u64>,
        goal_order: bool,
    ) -> Result<Self, BehaviourError> {
        let mut features = Vec::new();
        if goal_order {
            features.push(Feature::GoalOrder(problem.goal_predicates().to_vec()));
        }
        if let Some(c) = cost_bound {
            features.push(Feature::CostBound(c));
        }
        Self::new(features)
    }

    pub fn features(&self) -> &[Feature] {
        &self.features
    }

    pub fn cost_bound(&self) -> Option<u64> {
        self.features.iter().find_map(|f| match f {
            Feature::CostBound(c) => Some(*c),
            _ => None,
        })
    }

    pub fn goal_order(&self) -> Option<&[Predicate]> {
        self.features.iter().find_map(|f| match f {
            Feature::GoalOrder(g) => Some(g.as_slice()),
            _ => None,
        })
    }

    /// Checks that every goal-order predicate is latched by `problem`.
    pub fn check<P: SimulatorProblem + ?Sized>(&self, problem: &P) -> Result<(), BehaviourError> {
        if let Some(goals) = self.goal_order() {
            for g in goals {
                if !problem.goal_predicates().contains(g) {
                    return Err(BehaviourError::UnknownGoal(problem.symbols().name(*g).into()));
                }
            }
        }
        Ok(())
    }

    /// Behaviour value for a final cost and first-latch positions.
    pub(crate) fn value(&self, cost: u64, first_latch: impl Fn(Predicate) -> Option<usize>) -> Behaviour {
        Behaviour {
            cost: self.cost_bound().map(|_| cost),
            goal_order: self.goal_order().map(|goals| group_by_position(goals, first_latch)),
        }
    }
}

/// Groups goals by the position they first held, earliest first. Goals that
/// never held are left out.
fn group_by_position(
    goals: &[Predicate],
    first_latch: impl Fn(Predicate) -> Option<usize>,
) -> Vec<BTreeSet<Predicate>> {
    let mut hits: Vec<(usize, Predicate)> = goals
        .iter()
        .filter_map(|&g| first_latch(g).map(|pos| (pos, g)))
        .collect();
    hits.sort();
    let mut groups: Vec<BTreeSet<Predicate>> = Vec::new();
    let mut last = None;
    for (pos, g) in hits {
        if last == Some(pos) {
            groups.last_mut().expect("group exists").insert(g);
        } else {
            groups.push(BTreeSet::from([g]));
            last = Some(pos);
        }
    }
    groups
}

/// Canonical per-feature values of a plan.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Behaviour {
    /// Final plan cost; present iff the space has a cost-bound feature.
    pub cost: Option<u64>,
    /// Achievement groups, earliest first; present iff the space has a
    /// goal-order feature.
    pub goal_order: Option<Vec<BTreeSet<Predicate>>>,
}

impl Behaviour {
    pub fn to_record(&self, symbols: &Symbols) -> BehaviourRecord {
        BehaviourRecord {
            cost: self.cost,
            goal_order: self.goal_order.as_ref().map(|groups| {
                groups
                    .iter()
                    .map(|g| {
                        let mut names: Vec<String> =
                            g.iter().map(|&p| symbols.name(p).to_string()).collect();
                        names.sort();
                        names
                    })
                    .collect()
            }),
        }
    }
}

/// Serialized form: `{"cost": 5, "goal_order": [["g1"], ["g2", "g3"]]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BehaviourRecord {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cost: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub goal_order: Option<Vec<Vec<String>>>,
}

/// Behaviour of a (possibly unfinished) trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialBehaviour {
    pub value: Behaviour,
    /// The trace ends in a goal state with every goal predicate latched.
    pub complete: bool,
}

fn behaviour_of_trace(space: &BehaviourSpace, goals: &[Predicate], trace: &Trace) -> Behaviour {
    let positions = trace.first_latch_positions(goals);
    space.value(trace.last().cost, |p| {
        goals
            .iter()
            .position(|&g| g == p)
            .and_then(|i| positions[i])
    })
}

/// Behaviour of a goal-reaching plan.
pub fn extract_behaviour<P: SimulatorProblem + ?Sized>(
    space: &BehaviourSpace,
    problem: &P,
    plan: &Plan,
) -> Result<Behaviour, BehaviourError> {
    let trace = replay(problem, plan)?;
    let last = trace.last();
    if !last.goal {
        return Err(BehaviourError::NotAGoalPlan);
    }
    if let Some(bound) = space.cost_bound() {
        if last.cost > bound {
            return Err(BehaviourError::CostBoundExceeded {
                cost: last.cost,
                bound,
            });
        }
    }
    Ok(behaviour_of_trace(space, problem.goal_predicates(), &trace))
}

/// Behaviour established so far along `trace`.
pub fn partial_behaviour<P: SimulatorProblem + ?Sized>(
    space: &BehaviourSpace,
    problem: &P,
    trace: &Trace,
) -> PartialBehaviour {
    let last = trace.last();
    let complete = last.goal
        && problem
            .goal_predicates()
            .iter()
            .all(|g| last.latched.contains(g));
    PartialBehaviour {
        value: behaviour_of_trace(space, problem.goal_predicates(), trace),
        complete,
    }
}

/// LTLf rendering of a behaviour.
///
/// The cost value becomes `F G (cost-X & goal-state)`; every pair of goals in
/// strictly ordered groups becomes `(!first-later U first-earlier)`. Goals that
/// share a group are left unconstrained.
pub fn behaviour_formula(symbols: &Symbols, behaviour: &Behaviour) -> Formula {
    let mut parts = Vec::new();
    if let Some(cost) = behaviour.cost {
        parts.push(Formula::eventually(Formula::always(Formula::and(
            Formula::atom(cost_atom(cost)),
            Formula::atom(GOAL_STATE_ATOM),
        ))));
    }
    if let Some(groups) = &behaviour.goal_order {
        for (i, earlier) in groups.iter().enumerate() {
            for later in &groups[i + 1..] {
                for &a in earlier {
                    for &b in later {
                        parts.push(Formula::until(
                            Formula::not(Formula::atom(latch_atom(symbols.name(b)))),
                            Formula::atom(latch_atom(symbols.name(a))),
                        ));
                    }
                }
            }
        }
    }
    Formula::conjunction(parts)
}

/// Number of distinct behaviours among `plans`.
pub fn behaviour_count<'a, P, I>(
    space: &BehaviourSpace,
    problem: &P,
    plans: I,
) -> Result<usize, BehaviourError>
where
    P: SimulatorProblem + ?Sized,
    I: IntoIterator<Item = &'a Plan>,
{
    let mut seen = HashSet::new();
    for plan in plans {
        seen.insert(extract_behaviour(space, problem, plan)?);
    }
    Ok(seen.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltlf::{evaluate, format_formula};
    use crate::model::toy::Toggle;
    use crate::model::trace_view;

    fn plan(p: &Toggle, names: &[&str]) -> Plan {
        Plan::from_names(p, names).unwrap()
    }

    fn goals(p: &Toggle) -> (Predicate, Predicate) {
        (p.symbols().get("g1").unwrap(), p.symbols().get("g2").unwrap())
    }

    #[test]
    fn space_validation() {
        let p = Toggle::new();
        let (g1, _) = goals(&p);
        assert_eq!(BehaviourSpace::new(vec![]), Err(BehaviourError::NoFeatures));
        assert_eq!(
            BehaviourSpace::new(vec![Feature::CostBound(0)]),
            Err(BehaviourError::ZeroCostBound)
        );
        assert_eq!(
            BehaviourSpace::new(vec![Feature::GoalOrder(vec![g1, g1])]),
            Err(BehaviourError::DuplicateGoal)
        );
        assert_eq!(
            BehaviourSpace::new(vec![Feature::CostBound(3), Feature::CostBound(4)]),
            Err(BehaviourError::DuplicateFeature)
        );
    }

    #[test]
    fn ordered_goals_and_cost() {
        let p = Toggle::new();
        let (g1, g2) = goals(&p);
        let space = BehaviourSpace::for_problem(&p, Some(10), true).unwrap();
        let b = extract_behaviour(&space, &p, &plan(&p, &["set-g1", "set-g2", "finish"])).unwrap();
        assert_eq!(b.cost, Some(4));
        assert_eq!(b.goal_order, Some(vec![BTreeSet::from([g1]), BTreeSet::from([g2])]));
        let f = behaviour_formula(p.symbols(), &b);
        assert_eq!(format_formula(&f), "F G (cost-4 & goal-state) & (!first-g2 U first-g1)");
    }

    #[test]
    fn non_goal_plan_rejected() {
        let p = Toggle::new();
        let space = BehaviourSpace::for_problem(&p, Some(10), true).unwrap();
        assert_eq!(
            extract_behaviour(&space, &p, &plan(&p, &["set-g1"])),
            Err(BehaviourError::NotAGoalPlan)
        );
        let tight = BehaviourSpace::for_problem(&p, Some(3), true).unwrap();
        assert!(matches!(
            extract_behaviour(&tight, &p, &plan(&p, &["set-g1", "set-g2", "finish"])),
            Err(BehaviourError::CostBoundExceeded { cost: 4, bound: 3 })
        ));
    }

    #[test]
    fn shared_group_adds_no_conjunct() {
        let p = Toggle::new();
        let (g1, g2) = goals(&p);
        let b = Behaviour {
            cost: None,
            goal_order: Some(vec![BTreeSet::from([g1, g2])]),
        };
        assert_eq!(behaviour_formula(p.symbols(), &b), Formula::True);
    }

    #[test]
    fn three_groups_give_three_pairs() {
        let mut symbols = Symbols::new();
        let gs: Vec<_> = ["g1", "g2", "g3"].iter().map(|n| symbols.intern(*n)).collect();
        let b = Behaviour {
            cost: None,
            goal_order: Some(gs.iter().map(|&g| BTreeSet::from([g])).collect()),
        };
        let f = behaviour_formula(&symbols, &b);
        match f {
            Formula::And(parts) => {
                assert_eq!(parts.len(), 3);
                assert!(parts.iter().all(|p| matches!(p, Formula::Until(..))));
            }
            other => panic!("expected a conjunction, got {other}"),
        }
    }

    #[test]
    fn partial_behaviour_progression() {
        let p = Toggle::new();
        let (g1, _) = goals(&p);
        let space = BehaviourSpace::for_problem(&p, Some(10), true).unwrap();
        let t0 = replay(&p, &Plan::empty()).unwrap();
        let pb = partial_behaviour(&space, &p, &t0);
        assert_eq!(pb.value.cost, Some(0));
        assert_eq!(pb.value.goal_order, Some(vec![]));
        assert!(!pb.complete);

        let t1 = replay(&p, &plan(&p, &["set-g1", "unset-g1"])).unwrap();
        let pb = partial_behaviour(&space, &p, &t1);
        assert_eq!(pb.value.goal_order, Some(vec![BTreeSet::from([g1])]));
        assert!(!pb.complete);

        let full = plan(&p, &["set-g1", "unset-g1", "set-g2", "finish"]);
        let pb = partial_behaviour(&space, &p, &replay(&p, &full).unwrap());
        assert!(pb.complete);
        assert_eq!(pb.value, extract_behaviour(&space, &p, &full).unwrap());
    }

    #[test]
    fn formula_holds_on_own_trace_despite_undo() {
        let p = Toggle::new();
        let space = BehaviourSpace::for_problem(&p, Some(10), true).unwrap();
        let full = plan(&p, &["set-g1", "unset-g1", "set-g2", "finish"]);
        let b = extract_behaviour(&space, &p, &full).unwrap();
        let view = trace_view(p.symbols(), &replay(&p, &full).unwrap(), 10).unwrap();
        assert!(evaluate(&behaviour_formula(p.symbols(), &b), &view, 0));
    }

    #[test]
    fn count_is_set_cardinality() {
        let p = Toggle::new();
        let space = BehaviourSpace::for_problem(&p, None, true).unwrap();
        let a = plan(&p, &["set-g1", "set-g2", "finish"]);
        let b = plan(&p, &["set-g1", "unset-g1", "set-g2", "finish"]);
        let c = plan(&p, &["set-g2", "set-g1", "finish"]);
        assert_eq!(behaviour_count(&space, &p, []).unwrap(), 0);
        assert_eq!(behaviour_count(&space, &p, [&a, &b]).unwrap(), 1);
        assert_eq!(behaviour_count(&space, &p, [&a, &b, &c]).unwrap(), 2);
    }

    #[test]
    fn record_sorts_group_members() {
        let p = Toggle::new();
        let (g1, g2) = goals(&p);
        let b = Behaviour {
            cost: Some(3),
            goal_order: Some(vec![BTreeSet::from([g2, g1])]),
        };
        let json = serde_json::to_string(&b.to_record(p.symbols())).unwrap();
        assert_eq!(json, r#"{"cost":3,"goal_order":[["g1","g2"]]}"#);
    }
}
