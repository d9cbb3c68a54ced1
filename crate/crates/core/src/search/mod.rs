//! Width-based search with behaviour forbidding.
//!
//! [`behaviour_generator`] finds a plan whose behaviour is not yet forbidden,
//! [`plan_generator`] finds a plan not yet known, and [`fbi`] alternates them
//! to collect `k` plans that are as behaviourally diverse as the problem
//! allows. [`fbi_naive`] is the plain top-k baseline that keeps accumulating
//! goal nodes from one frontier.

mod bfs;
mod iw;
pub mod novelty;

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::time::Duration;

use serde::Serialize;
use thiserror::Error;

use crate::behaviour::{behaviour_formula, extract_behaviour, Behaviour, BehaviourError, BehaviourSpace};
use crate::ltlf::{evaluate, is_latch_monotone, Formula};
use crate::model::{latch_atom, Plan, SimulatorProblem};
use bfs::{Budget, End, Hooks, KeyMode, Skeleton, Tree, Verdict};

pub use iw::iterated_width;
pub use novelty::{is_novel_in_history, GlobalNovelty};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoveltyScope {
    /// Novel relative to the node's own ancestors.
    #[default]
    TraceLocal,
    /// Novel relative to everything generated in the width iteration.
    Global,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NoveltyConfig {
    pub max_width: usize,
    pub scope: NoveltyScope,
}

impl NoveltyConfig {
    pub fn new(max_width: usize, scope: NoveltyScope) -> Self {
        NoveltyConfig { max_width, scope }
    }

    pub fn trace_local(max_width: usize) -> Self {
        Self::new(max_width, NoveltyScope::TraceLocal)
    }
}

impl Default for NoveltyConfig {
    fn default() -> Self {
        Self::trace_local(2)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchLimits {
    pub cost_bound: u64,
    pub time_budget: Duration,
    /// Maximum number of generated nodes over a whole run.
    pub node_budget: u64,
}

impl SearchLimits {
    pub fn with_cost_bound(cost_bound: u64) -> Self {
        SearchLimits {
            cost_bound,
            ..Self::default()
        }
    }
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            cost_bound: 1000,
            time_budget: Duration::from_secs(30 * 60),
            node_budget: 50_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BudgetKind {
    Time,
    Nodes,
}

impl fmt::Display for BudgetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BudgetKind::Time => "time",
            BudgetKind::Nodes => "nodes",
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SearchStats {
    pub nodes_expanded: u64,
    pub nodes_generated: u64,
    pub pruned_by_novelty: u64,
    /// Goal nodes dropped because their behaviour (or plan) was forbidden.
    pub pruned_by_behaviour: u64,
    /// Interior nodes cut because every completion has a forbidden behaviour.
    pub pruned_interior: u64,
    pub pruned_by_visited: u64,
    pub pruned_by_cost: u64,
    /// Wall time spent in each width iteration, summed over generator calls.
    pub width_secs: Vec<f64>,
    pub total_secs: f64,
}

impl SearchStats {
    fn add_width_time(&mut self, width_index: usize, elapsed: Duration) {
        if self.width_secs.len() <= width_index {
            self.width_secs.resize(width_index + 1, 0.0);
        }
        self.width_secs[width_index] += elapsed.as_secs_f64();
    }

    pub fn merge(&mut self, other: &SearchStats) {
        self.nodes_expanded += other.nodes_expanded;
        self.nodes_generated += other.nodes_generated;
        self.pruned_by_novelty += other.pruned_by_novelty;
        self.pruned_by_behaviour += other.pruned_by_behaviour;
        self.pruned_interior += other.pruned_interior;
        self.pruned_by_visited += other.pruned_by_visited;
        self.pruned_by_cost += other.pruned_by_cost;
        for (i, t) in other.width_secs.iter().enumerate() {
            if self.width_secs.len() <= i {
                self.width_secs.resize(i + 1, 0.0);
            }
            self.width_secs[i] += t;
        }
        self.total_secs += other.total_secs;
    }

    /// The counters only, for comparisons that must ignore wall time.
    pub fn counters(&self) -> [u64; 7] {
        [
            self.nodes_expanded,
            self.nodes_generated,
            self.pruned_by_novelty,
            self.pruned_by_behaviour,
            self.pruned_interior,
            self.pruned_by_visited,
            self.pruned_by_cost,
        ]
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PlanSetResult {
    pub plans: Vec<Plan>,
    /// Behaviour of each plan, parallel to `plans`.
    pub behaviours: Vec<Behaviour>,
    pub behaviour_count: usize,
    pub stats: SearchStats,
    /// Fewer than `k` plans exist in the search space.
    pub exhausted: bool,
    /// How many leading plans came from behaviour forbidding (the rest from
    /// plan forbidding). Zero for the naive baseline, which has no behaviour
    /// phase.
    pub behaviour_phase: usize,
}

impl PlanSetResult {
    fn push(&mut self, plan: Plan, behaviour: Behaviour) {
        self.plans.push(plan);
        self.behaviours.push(behaviour);
        self.behaviour_count = self.behaviours.iter().collect::<HashSet<_>>().len();
    }

    /// Distinct behaviours in first-found order.
    pub fn distinct_behaviours(&self) -> Vec<&Behaviour> {
        let mut seen = HashSet::new();
        self.behaviours.iter().filter(|b| seen.insert(*b)).collect()
    }
}

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("{kind} budget exceeded after {} plan(s)", partial.plans.len())]
    BudgetExceeded {
        kind: BudgetKind,
        partial: Box<PlanSetResult>,
    },
    #[error("k must be at least 1")]
    InvalidK,
    #[error("invalid search configuration: {0}")]
    InvalidConfig(&'static str),
    #[error(transparent)]
    Behaviour(#[from] BehaviourError),
}

fn validate(novelty: &NoveltyConfig, limits: &SearchLimits) -> Result<(), SearchError> {
    if novelty.max_width == 0 {
        return Err(SearchError::InvalidConfig("max width must be at least 1"));
    }
    if limits.cost_bound == 0 {
        return Err(SearchError::InvalidConfig("cost bound must be at least 1"));
    }
    if limits.node_budget == 0 || limits.time_budget.is_zero() {
        return Err(SearchError::InvalidConfig("budgets must be positive"));
    }
    Ok(())
}

/// Options that do not change which behaviours can be found.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FbiOptions {
    /// Prune interior nodes whose goal order is already final and forbidden.
    /// Only applies to spaces without a cost-bound feature.
    pub interior_pruning: bool,
}

impl Default for FbiOptions {
    fn default() -> Self {
        FbiOptions {
            interior_pruning: true,
        }
    }
}

/// A plan found by [`behaviour_generator`].
#[derive(Debug, Clone, PartialEq)]
pub struct Generated {
    pub plan: Plan,
    pub behaviour: Behaviour,
    pub stats: SearchStats,
}

/// Forbidden behaviours: goal nodes are rejected on membership, interior
/// nodes on a satisfied latch-monotone formula once their goal order is final.
struct ForbidBehaviours<'a> {
    space: &'a BehaviourSpace,
    forbidden: &'a HashSet<Behaviour>,
    monotone: Vec<(&'a Behaviour, Formula)>,
    accepted: Option<Behaviour>,
}

impl<'a> ForbidBehaviours<'a> {
    fn new<P: SimulatorProblem + ?Sized>(
        problem: &P,
        space: &'a BehaviourSpace,
        forbidden: &'a HashSet<Behaviour>,
        options: FbiOptions,
    ) -> Self {
        let monotone = if options.interior_pruning && space.cost_bound().is_none() {
            let symbols = problem.symbols();
            let latches: BTreeSet<String> = problem
                .goal_predicates()
                .iter()
                .map(|&g| latch_atom(symbols.name(g)))
                .collect();
            forbidden
                .iter()
                .map(|b| (b, behaviour_formula(symbols, b)))
                .filter(|(_, f)| is_latch_monotone(f, &latches))
                .collect()
        } else {
            Vec::new()
        };
        ForbidBehaviours {
            space,
            forbidden,
            monotone,
            accepted: None,
        }
    }

    fn behaviour<P: SimulatorProblem + ?Sized>(&self, tree: &Tree<'_, P>, at: usize) -> Behaviour {
        self.space
            .value(tree.node(at).cost, |g| tree.first_latch(at, g))
    }
}

impl<P: SimulatorProblem + ?Sized> Hooks<P> for ForbidBehaviours<'_> {
    fn on_goal(&mut self, tree: &Tree<'_, P>, at: usize) -> Verdict {
        let b = self.behaviour(tree, at);
        if self.forbidden.contains(&b) {
            Verdict::Reject
        } else {
            self.accepted = Some(b);
            Verdict::Accept
        }
    }

    fn prune_interior(&mut self, tree: &Tree<'_, P>, at: usize) -> bool {
        if self.monotone.is_empty() || !tree.all_latched(at) {
            return false;
        }
        // Every goal is latched, so the goal order of any completion is the
        // current one.
        let b = self.behaviour(tree, at);
        let mut candidates = self.monotone.iter().filter(|(fb, _)| **fb == b).peekable();
        if candidates.peek().is_none() {
            return false;
        }
        let view = tree.view(at);
        candidates.any(|(_, f)| evaluate(f, &view, 0))
    }
}

struct ForbidPlans<'a> {
    known: &'a HashSet<Plan>,
}

impl<P: SimulatorProblem + ?Sized> Hooks<P> for ForbidPlans<'_> {
    fn on_goal(&mut self, tree: &Tree<'_, P>, at: usize) -> Verdict {
        if self.known.contains(&tree.plan(at)) {
            Verdict::Reject
        } else {
            Verdict::Accept
        }
    }
}

struct Accumulate {
    k: usize,
    seen: HashSet<Plan>,
    plans: Vec<Plan>,
}

impl<P: SimulatorProblem + ?Sized> Hooks<P> for Accumulate {
    fn on_goal(&mut self, tree: &Tree<'_, P>, at: usize) -> Verdict {
        let plan = tree.plan(at);
        if !self.seen.insert(plan.clone()) {
            return Verdict::Reject;
        }
        self.plans.push(plan);
        if self.plans.len() >= self.k {
            Verdict::Stop
        } else {
            Verdict::Collect
        }
    }
}

fn behaviour_keys(space: &BehaviourSpace) -> KeyMode {
    KeyMode {
        order: space.goal_order().is_some(),
        cost: space.cost_bound().is_some(),
    }
}

fn effective_bound(space: &BehaviourSpace, limits: &SearchLimits) -> u64 {
    space
        .cost_bound()
        .map_or(limits.cost_bound, |c| c.min(limits.cost_bound))
}

fn budget_error(kind: BudgetKind, partial: PlanSetResult) -> SearchError {
    SearchError::BudgetExceeded {
        kind,
        partial: Box::new(partial),
    }
}

fn stats_only(stats: SearchStats) -> PlanSetResult {
    PlanSetResult {
        stats,
        ..PlanSetResult::default()
    }
}

#[allow(clippy::too_many_arguments)]
fn run_behaviour_search<P: SimulatorProblem + ?Sized>(
    problem: &P,
    space: &BehaviourSpace,
    forbidden: &HashSet<Behaviour>,
    novelty: &NoveltyConfig,
    limits: &SearchLimits,
    options: FbiOptions,
    budget: &mut Budget,
    stats: &mut SearchStats,
) -> Result<Option<(Plan, Behaviour)>, BudgetKind> {
    let skeleton = Skeleton {
        novelty,
        cost_bound: effective_bound(space, limits),
        keys: behaviour_keys(space),
    };
    let mut hooks = ForbidBehaviours::new(problem, space, forbidden, options);
    match skeleton.run(problem, &mut hooks, budget, stats)? {
        End::Found(plan) => Ok(Some((plan, hooks.accepted.expect("accepted goal")))),
        End::Stopped | End::Exhausted => Ok(None),
    }
}

fn run_plan_search<P: SimulatorProblem + ?Sized>(
    problem: &P,
    known: &HashSet<Plan>,
    novelty: &NoveltyConfig,
    cost_bound: u64,
    budget: &mut Budget,
    stats: &mut SearchStats,
) -> Result<Option<Plan>, BudgetKind> {
    let skeleton = Skeleton {
        novelty,
        cost_bound,
        keys: KeyMode::LATCHED_SET,
    };
    match skeleton.run(problem, &mut ForbidPlans { known }, budget, stats)? {
        End::Found(plan) => Ok(Some(plan)),
        End::Stopped | End::Exhausted => Ok(None),
    }
}

/// Finds a goal plan whose behaviour is not in `forbidden`.
///
/// Returns `Ok(None)` when every width iteration is exhausted.
pub fn behaviour_generator<P: SimulatorProblem + ?Sized>(
    problem: &P,
    space: &BehaviourSpace,
    forbidden: &HashSet<Behaviour>,
    novelty: &NoveltyConfig,
    limits: &SearchLimits,
) -> Result<Option<Generated>, SearchError> {
    behaviour_generator_with(problem, space, forbidden, novelty, limits, FbiOptions::default())
}

pub fn behaviour_generator_with<P: SimulatorProblem + ?Sized>(
    problem: &P,
    space: &BehaviourSpace,
    forbidden: &HashSet<Behaviour>,
    novelty: &NoveltyConfig,
    limits: &SearchLimits,
    options: FbiOptions,
) -> Result<Option<Generated>, SearchError> {
    validate(novelty, limits)?;
    space.check(problem)?;
    let mut budget = Budget::new(limits);
    let mut stats = SearchStats::default();
    match run_behaviour_search(
        problem, space, forbidden, novelty, limits, options, &mut budget, &mut stats,
    ) {
        Ok(found) => Ok(found.map(|(plan, behaviour)| Generated {
            plan,
            behaviour,
            stats,
        })),
        Err(kind) => Err(budget_error(kind, stats_only(stats))),
    }
}

/// Finds a goal plan that is not in `known` (exact action-sequence equality).
pub fn plan_generator<P: SimulatorProblem + ?Sized>(
    problem: &P,
    known: &HashSet<Plan>,
    novelty: &NoveltyConfig,
    limits: &SearchLimits,
) -> Result<Option<(Plan, SearchStats)>, SearchError> {
    validate(novelty, limits)?;
    let mut budget = Budget::new(limits);
    let mut stats = SearchStats::default();
    match run_plan_search(problem, known, novelty, limits.cost_bound, &mut budget, &mut stats) {
        Ok(found) => Ok(found.map(|plan| (plan, stats))),
        Err(kind) => Err(budget_error(kind, stats_only(stats))),
    }
}

/// Collects up to `k` plans, forbidding each found behaviour in turn and then,
/// once no new behaviour exists, forbidding individual plans.
pub fn fbi<P: SimulatorProblem + ?Sized>(
    problem: &P,
    space: &BehaviourSpace,
    k: usize,
    novelty: &NoveltyConfig,
    limits: &SearchLimits,
) -> Result<PlanSetResult, SearchError> {
    fbi_with(problem, space, k, novelty, limits, FbiOptions::default())
}

pub fn fbi_with<P: SimulatorProblem + ?Sized>(
    problem: &P,
    space: &BehaviourSpace,
    k: usize,
    novelty: &NoveltyConfig,
    limits: &SearchLimits,
    options: FbiOptions,
) -> Result<PlanSetResult, SearchError> {
    if k == 0 {
        return Err(SearchError::InvalidK);
    }
    validate(novelty, limits)?;
    space.check(problem)?;
    let mut budget = Budget::new(limits);
    let mut result = PlanSetResult::default();

    let mut forbidden = HashSet::new();
    while result.plans.len() < k {
        let mut stats = SearchStats::default();
        let found = run_behaviour_search(
            problem, space, &forbidden, novelty, limits, options, &mut budget, &mut stats,
        );
        result.stats.merge(&stats);
        match found {
            Ok(Some((plan, behaviour))) => {
                log::debug!("behaviour {} found by plan {plan}", result.plans.len() + 1);
                forbidden.insert(behaviour.clone());
                result.push(plan, behaviour);
            }
            Ok(None) => break,
            Err(kind) => return Err(budget_error(kind, result)),
        }
    }
    result.behaviour_phase = result.plans.len();

    let cost_bound = effective_bound(space, limits);
    let mut known: HashSet<Plan> = result.plans.iter().cloned().collect();
    while result.plans.len() < k {
        let mut stats = SearchStats::default();
        let found = run_plan_search(problem, &known, novelty, cost_bound, &mut budget, &mut stats);
        result.stats.merge(&stats);
        match found {
            Ok(Some(plan)) => {
                let behaviour = extract_behaviour(space, problem, &plan)?;
                known.insert(plan.clone());
                result.push(plan, behaviour);
            }
            Ok(None) => break,
            Err(kind) => return Err(budget_error(kind, result)),
        }
    }
    result.exhausted = result.plans.len() < k;
    Ok(result)
}

/// Top-k baseline: one search per width that keeps every new goal plan it
/// meets until `k` are collected. `space` is only used to report behaviours.
pub fn fbi_naive<P: SimulatorProblem + ?Sized>(
    problem: &P,
    space: &BehaviourSpace,
    k: usize,
    novelty: &NoveltyConfig,
    limits: &SearchLimits,
) -> Result<PlanSetResult, SearchError> {
    if k == 0 {
        return Err(SearchError::InvalidK);
    }
    validate(novelty, limits)?;
    space.check(problem)?;
    let cost_bound = effective_bound(space, limits);
    let skeleton = Skeleton {
        novelty,
        cost_bound,
        keys: KeyMode::LATCHED_SET,
    };
    let mut hooks = Accumulate {
        k,
        seen: HashSet::new(),
        plans: Vec::new(),
    };
    let mut budget = Budget::new(limits);
    let mut stats = SearchStats::default();
    let outcome = skeleton.run(problem, &mut hooks, &mut budget, &mut stats);

    let mut result = PlanSetResult {
        stats,
        ..PlanSetResult::default()
    };
    for plan in hooks.plans {
        let behaviour = extract_behaviour(space, problem, &plan)?;
        result.push(plan, behaviour);
    }
    result.exhausted = result.plans.len() < k;
    match outcome {
        Ok(_) => Ok(result),
        Err(kind) => {
            result.exhausted = false;
            Err(budget_error(kind, result))
        }
    }
}
