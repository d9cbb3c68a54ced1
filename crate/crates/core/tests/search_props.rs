mod common;

use std::collections::{BTreeSet, HashSet};

use divsim::search::{behaviour_generator, plan_generator, BudgetKind};
use divsim::{
    brute_force_behaviours, extract_behaviour, fbi, fbi_naive, fbi_with, replay, with_instance, Action,
    ActionId, Behaviour, BehaviourSpace, FbiOptions, Feature, NoveltyConfig, NoveltyScope, Predicate,
    SearchError, SearchLimits, SimulatorProblem, State, Symbols,
};
use proptest::prelude::*;

use common::{load_micro, micro_setup, MICRO};

/// Two switches that may be flipped back off, and a door that only opens
/// once both are on. Both switches latch before the goal, so interior
/// pruning has something to prune.
struct Lamps {
    symbols: Symbols,
    actions: Vec<Action>,
    goals: Vec<Predicate>,
    door: Predicate,
}

impl Lamps {
    fn new() -> Self {
        let mut symbols = Symbols::new();
        let goals = vec![symbols.intern("on-a"), symbols.intern("on-b")];
        let door = symbols.intern("open");
        let actions = ["toggle-a", "toggle-b", "open"]
            .into_iter()
            .map(Action::unit)
            .collect();
        Lamps {
            symbols,
            actions,
            goals,
            door,
        }
    }
}

impl SimulatorProblem for Lamps {
    type World = (bool, bool, bool);

    fn symbols(&self) -> &Symbols {
        &self.symbols
    }

    fn actions(&self) -> &[Action] {
        &self.actions
    }

    fn initial(&self) -> Self::World {
        (false, false, false)
    }

    fn observe(&self, &(a, b, open): &Self::World) -> State {
        [(a, self.goals[0]), (b, self.goals[1]), (open, self.door)]
            .into_iter()
            .filter(|(on, _)| *on)
            .map(|(_, p)| p)
            .collect()
    }

    fn applicable(&self, &(a, b, _): &Self::World) -> Vec<ActionId> {
        let mut out = vec![ActionId(0), ActionId(1)];
        if a && b {
            out.push(ActionId(2));
        }
        out
    }

    fn simulate(&self, &(a, b, open): &Self::World, action: ActionId) -> Option<Self::World> {
        match action.0 {
            0 => Some((!a, b, open)),
            1 => Some((a, !b, open)),
            2 if a && b => Some((a, b, true)),
            _ => None,
        }
    }

    fn is_goal(&self, &(a, b, open): &Self::World) -> bool {
        a && b && open
    }

    fn goal_predicates(&self) -> &[Predicate] {
        &self.goals
    }
}

fn go_space<P: SimulatorProblem>(p: &P) -> BehaviourSpace {
    BehaviourSpace::new(vec![Feature::GoalOrder(p.goal_predicates().to_vec())]).unwrap()
}

#[test]
fn interior_pruning_fires_and_keeps_behaviours() {
    let p = Lamps::new();
    let space = go_space(&p);
    let limits = SearchLimits::with_cost_bound(6);
    let novelty = NoveltyConfig::trace_local(2);
    let on = fbi_with(&p, &space, 10, &novelty, &limits, FbiOptions { interior_pruning: true }).unwrap();
    let off = fbi_with(&p, &space, 10, &novelty, &limits, FbiOptions { interior_pruning: false }).unwrap();
    let set = |r: &divsim::PlanSetResult| -> BTreeSet<Behaviour> {
        r.behaviours[..r.behaviour_phase].iter().cloned().collect()
    };
    assert_eq!(set(&on), set(&off));
    assert!(on.stats.pruned_interior > 0);
    assert_eq!(off.stats.pruned_interior, 0);
    let oracle = brute_force_behaviours(&p, &space, 6, None).unwrap();
    assert_eq!(set(&on), oracle.into_keys().collect());
}

#[test]
fn fbi_k1_is_the_first_generated_plan() {
    for m in MICRO {
        let instance = load_micro(m);
        with_instance!(&instance, p => {
            let (space, bound) = micro_setup(p, m.max_len, m.file.ends_with(".json"));
            let limits = SearchLimits::with_cost_bound(bound);
            let novelty = NoveltyConfig::default();
            let one = fbi(p, &space, 1, &novelty, &limits).unwrap();
            let first = behaviour_generator(p, &space, &HashSet::new(), &novelty, &limits).unwrap();
            assert_eq!(one.plans.first(), first.as_ref().map(|g| &g.plan), "{}", m.file);
        });
    }
}

#[test]
fn planner_behaviours_are_a_subset_of_the_oracle() {
    for m in MICRO {
        let instance = load_micro(m);
        with_instance!(&instance, p => {
            let (space, bound) = micro_setup(p, m.max_len, m.file.ends_with(".json"));
            let oracle = brute_force_behaviours(p, &space, m.max_len, Some(bound)).unwrap();
            for scope in [NoveltyScope::TraceLocal, NoveltyScope::Global] {
                for width in [1, 2] {
                    let novelty = NoveltyConfig::new(width, scope);
                    let r = fbi(p, &space, 3, &novelty, &SearchLimits::with_cost_bound(bound)).unwrap();
                    for b in &r.behaviours {
                        assert!(oracle.contains_key(b), "{} {scope:?} w{width}", m.file);
                    }
                    let distinct: HashSet<_> = r.plans.iter().collect();
                    assert_eq!(distinct.len(), r.plans.len());
                }
            }
        });
    }
}

#[test]
fn naive_plans_are_distinct_valid_goal_plans() {
    for m in MICRO {
        let instance = load_micro(m);
        with_instance!(&instance, p => {
            let (space, bound) = micro_setup(p, m.max_len, m.file.ends_with(".json"));
            let r = fbi_naive(p, &space, 6, &NoveltyConfig::default(), &SearchLimits::with_cost_bound(bound))
                .unwrap();
            let distinct: HashSet<_> = r.plans.iter().collect();
            assert_eq!(distinct.len(), r.plans.len());
            assert_eq!(r.behaviour_phase, 0);
            for (plan, b) in r.plans.iter().zip(&r.behaviours) {
                let t = replay(p, plan).unwrap();
                assert!(t.last().goal && t.last().cost <= bound);
                assert_eq!(&extract_behaviour(&space, p, plan).unwrap(), b);
            }
            assert!(r.behaviour_count <= r.plans.len());
            assert_eq!(r.exhausted, r.plans.len() < 6);
        });
    }
}

#[test]
fn plan_generator_skips_known_plans() {
    let p = common::load(&common::fixture_dir("micro").join("grid-open3.grid"));
    with_instance!(&p, p => {
        let limits = SearchLimits::with_cost_bound(8);
        let novelty = NoveltyConfig::default();
        let mut known = HashSet::new();
        for _ in 0..4 {
            let (plan, _) = plan_generator(p, &known, &novelty, &limits).unwrap().unwrap();
            assert!(known.insert(plan));
        }
    });
}

#[test]
fn node_budget_returns_partial_result() {
    let m = MICRO.iter().find(|m| m.file == "grid-room.grid").unwrap();
    let instance = load_micro(m);
    with_instance!(&instance, p => {
        let (space, bound) = micro_setup(p, m.max_len, false);
        let full = fbi(p, &space, 6, &NoveltyConfig::default(), &SearchLimits::with_cost_bound(bound)).unwrap();
        let limits = SearchLimits {
            node_budget: full.stats.nodes_generated / 2,
            ..SearchLimits::with_cost_bound(bound)
        };
        match fbi(p, &space, 6, &NoveltyConfig::default(), &limits) {
            Err(SearchError::BudgetExceeded { kind, partial }) => {
                assert_eq!(kind, BudgetKind::Nodes);
                assert!(partial.plans.len() < full.plans.len());
                assert_eq!(partial.plans[..], full.plans[..partial.plans.len()]);
            }
            other => panic!("expected a budget error, got {other:?}"),
        }
    });
}

#[test]
fn invalid_arguments() {
    let p = Lamps::new();
    let space = go_space(&p);
    let n = NoveltyConfig::default();
    let l = SearchLimits::default();
    assert!(matches!(fbi(&p, &space, 0, &n, &l), Err(SearchError::InvalidK)));
    assert!(matches!(
        fbi(&p, &space, 1, &NoveltyConfig::trace_local(0), &l),
        Err(SearchError::InvalidConfig(_))
    ));
    let foreign = BehaviourSpace::new(vec![Feature::GoalOrder(vec![p.door])]).unwrap();
    assert!(matches!(fbi(&p, &foreign, 1, &n, &l), Err(SearchError::Behaviour(_))));
}

#[test]
fn search_is_deterministic() {
    let m = &MICRO[3];
    let instance = load_micro(m);
    with_instance!(&instance, p => {
        let (space, bound) = micro_setup(p, m.max_len, false);
        let run = || fbi(p, &space, 8, &NoveltyConfig::default(), &SearchLimits::with_cost_bound(bound)).unwrap();
        let (a, b) = (run(), run());
        assert_eq!(a.plans, b.plans);
        assert_eq!(a.stats.counters(), b.stats.counters());
    });
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// On random small grids, every fbi behaviour is one the oracle finds and
    /// phase-one behaviours are distinct. Goal-order behaviours are all found;
    /// cost behaviours that need a detour through already visited cells can
    /// be cut by novelty pruning, so those only have to be a subset.
    #[test]
    fn random_grids_match_oracle(seed in 0u64..10_000) {
        let params = divsim::bench::GridSuiteParams {
            width: 3,
            height: 3,
            targets: 2,
            max_walls: 2,
            oracle_len: 8,
            cost_bound: 8,
        };
        let suite = divsim::bench::generate_grid_suite(seed, 1, &params);
        prop_assume!(!suite.is_empty());
        let p = divsim::domains::GridProblem::parse(&suite[0].1).unwrap();
        let go = Feature::GoalOrder(p.goal_predicates().to_vec());
        for with_cost in [false, true] {
            let mut features = vec![go.clone()];
            if with_cost {
                features.push(Feature::CostBound(8));
            }
            let space = BehaviourSpace::new(features).unwrap();
            let oracle: BTreeSet<Behaviour> =
                brute_force_behaviours(&p, &space, 8, Some(8)).unwrap().into_keys().collect();
            let r = fbi(&p, &space, oracle.len() + 3, &NoveltyConfig::default(), &SearchLimits::with_cost_bound(8))
                .unwrap();
            let phase: Vec<&Behaviour> = r.behaviours[..r.behaviour_phase].iter().collect();
            let distinct: BTreeSet<Behaviour> = phase.iter().map(|b| (*b).clone()).collect();
            prop_assert_eq!(distinct.len(), phase.len());
            prop_assert!(distinct.is_subset(&oracle));
            if !with_cost {
                prop_assert_eq!(distinct, oracle);
            }
        }
    }
}
