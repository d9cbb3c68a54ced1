//! Simulator-facing planning model: interned predicates, predicate-set states,
//! actions, plans, and the traces a plan induces.
//!
//! A [`SimulatorProblem`] is a black box. The planner only ever sees the
//! predicate projection of a world ([`SimulatorProblem::observe`]); the world
//! value itself is opaque and only handed back to the simulator.
//!
//! Traces are augmented with derived bookkeeping (accumulated cost, goal flag,
//! goal latches). These derived atoms are rendered by [`trace_view`] for the
//! LTLf evaluator and never leak into raw states.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

/// Atom emitted at every position whose raw state satisfies the goal test.
pub const GOAL_STATE_ATOM: &str = "goal-state";

/// Name of the cost atom for accumulated cost `x`.
pub fn cost_atom(x: u64) -> String {
    format!("cost-{x}")
}

/// Name of the latch atom for a goal predicate.
pub fn latch_atom(goal: &str) -> String {
    format!("first-{goal}")
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("action {action} at plan index {index} is not applicable")]
    InapplicableAction { index: usize, action: String },
    #[error("unknown action `{0}`")]
    UnknownAction(String),
    #[error("action id {0} is outside the action universe")]
    UnknownActionId(usize),
    #[error("cost {cost} at trace position {position} exceeds the bound {bound}")]
    CostBoundExceeded {
        position: usize,
        cost: u64,
        bound: u64,
    },
    #[error("action `{0}` must have a positive cost")]
    NonPositiveCost(String),
}

/// Interned boolean predicate. Ids follow declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Predicate(u32);

impl Predicate {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Symbol table for predicates.
#[derive(Debug, Clone, Default)]
pub struct Symbols {
    names: Vec<String>,
    ids: HashMap<String, Predicate>,
}

impl Symbols {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the existing id for `name` or allocates the next one.
    pub fn intern(&mut self, name: impl Into<String>) -> Predicate {
        let name = name.into();
        if let Some(&p) = self.ids.get(&name) {
            return p;
        }
        let p = Predicate(self.names.len() as u32);
        self.ids.insert(name.clone(), p);
        self.names.push(name);
        p
    }

    pub fn get(&self, name: &str) -> Option<Predicate> {
        self.ids.get(name).copied()
    }

    pub fn name(&self, p: Predicate) -> &str {
        &self.names[p.index()]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

/// The set of predicates true in a state. Stored sorted and deduplicated.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct State(Vec<Predicate>);

impl State {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn contains(&self, p: Predicate) -> bool {
        self.0.binary_search(&p).is_ok()
    }

    pub fn insert(&mut self, p: Predicate) -> bool {
        match self.0.binary_search(&p) {
            Ok(_) => false,
            Err(at) => {
                self.0.insert(at, p);
                true
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = Predicate> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[Predicate] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// True iff every predicate of `tuple` (sorted) is in this state.
    pub fn contains_all(&self, tuple: &[Predicate]) -> bool {
        tuple.iter().all(|&p| self.contains(p))
    }

    pub fn names<'a>(&'a self, symbols: &'a Symbols) -> impl Iterator<Item = &'a str> + 'a {
        self.iter().map(move |p| symbols.name(p))
    }
}

impl FromIterator<Predicate> for State {
    fn from_iter<I: IntoIterator<Item = Predicate>>(iter: I) -> Self {
        let mut v: Vec<Predicate> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        State(v)
    }
}

/// Index into a problem's action universe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActionId(pub u32);

impl ActionId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Action {
    name: String,
    cost: u64,
}

impl Action {
    pub fn new(name: impl Into<String>, cost: u64) -> Result<Self, ModelError> {
        let name = name.into();
        if cost == 0 {
            return Err(ModelError::NonPositiveCost(name));
        }
        Ok(Action { name, cost })
    }

    /// Unit-cost action.
    pub fn unit(name: impl Into<String>) -> Self {
        Action {
            name: name.into(),
            cost: 1,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn cost(&self) -> u64 {
        self.cost
    }
}

/// An ordered sequence of actions. May be empty.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Plan(Vec<ActionId>);

impl Plan {
    pub fn new(actions: Vec<ActionId>) -> Self {
        Plan(actions)
    }

    pub fn empty() -> Self {
        Plan(Vec::new())
    }

    pub fn actions(&self) -> &[ActionId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Resolves action names against `problem`'s action universe.
    pub fn from_names<P, S>(problem: &P, names: &[S]) -> Result<Self, ModelError>
    where
        P: SimulatorProblem + ?Sized,
        S: AsRef<str>,
    {
        names
            .iter()
            .map(|n| {
                problem
                    .action_id(n.as_ref())
                    .ok_or_else(|| ModelError::UnknownAction(n.as_ref().to_string()))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Plan)
    }

    pub fn names<P: SimulatorProblem + ?Sized>(&self, problem: &P) -> Vec<String> {
        self.0
            .iter()
            .map(|&a| problem.action(a).name().to_string())
            .collect()
    }
}

impl fmt::Display for Plan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", a.0)?;
        }
        write!(f, "]")
    }
}

/// Black-box planning problem backed by a deterministic simulator.
///
/// `applicable` must return ids in action-universe order; search tie-breaking
/// depends on it. `simulate` must be deterministic and return `Some` for every
/// applicable action.
pub trait SimulatorProblem {
    /// Opaque simulator state.
    type World: Clone;

    fn symbols(&self) -> &Symbols;
    fn actions(&self) -> &[Action];
    fn initial(&self) -> Self::World;
    /// Predicate projection of a world.
    fn observe(&self, world: &Self::World) -> State;
    fn applicable(&self, world: &Self::World) -> Vec<ActionId>;
    fn simulate(&self, world: &Self::World, action: ActionId) -> Option<Self::World>;
    fn is_goal(&self, world: &Self::World) -> bool;
    /// Predicates tracked by goal latches, in declaration order.
    fn goal_predicates(&self) -> &[Predicate];

    fn action(&self, id: ActionId) -> &Action {
        &self.actions()[id.index()]
    }

    fn action_id(&self, name: &str) -> Option<ActionId> {
        self.actions()
            .iter()
            .position(|a| a.name() == name)
            .map(|i| ActionId(i as u32))
    }
}

/// A raw state plus trace-derived bookkeeping.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AugmentedState {
    pub raw: State,
    pub cost: u64,
    pub goal: bool,
    /// Goal predicates that have held at some position up to and including this one.
    pub latched: BTreeSet<Predicate>,
}

impl AugmentedState {
    pub fn initial<P: SimulatorProblem + ?Sized>(problem: &P, world: &P::World) -> Self {
        Self::successor(problem, world, 0, &BTreeSet::new())
    }

    pub(crate) fn successor<P: SimulatorProblem + ?Sized>(
        problem: &P,
        world: &P::World,
        cost: u64,
        prev_latched: &BTreeSet<Predicate>,
    ) -> Self {
        let raw = problem.observe(world);
        let mut latched = prev_latched.clone();
        latched.extend(
            problem
                .goal_predicates()
                .iter()
                .copied()
                .filter(|&g| raw.contains(g)),
        );
        AugmentedState {
            raw,
            cost,
            goal: problem.is_goal(world),
            latched,
        }
    }
}

/// The finite state sequence induced by a plan. `states.len() == plan.len() + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub states: Vec<AugmentedState>,
    pub plan: Plan,
}

impl Trace {
    pub fn last(&self) -> &AugmentedState {
        self.states.last().expect("traces are non-empty")
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Position at which each goal predicate first held, if it ever did.
    pub fn first_latch_positions(&self, goals: &[Predicate]) -> Vec<Option<usize>> {
        goals
            .iter()
            .map(|g| self.states.iter().position(|s| s.latched.contains(g)))
            .collect()
    }
}

/// Replays `plan` from the initial state, returning the final world and trace.
pub fn replay_world<P: SimulatorProblem + ?Sized>(
    problem: &P,
    plan: &Plan,
) -> Result<(P::World, Trace), ModelError> {
    let mut world = problem.initial();
    let mut states = Vec::with_capacity(plan.len() + 1);
    states.push(AugmentedState::initial(problem, &world));
    for (index, &a) in plan.actions().iter().enumerate() {
        if a.index() >= problem.actions().len() {
            return Err(ModelError::UnknownActionId(a.index()));
        }
        let inapplicable = || ModelError::InapplicableAction {
            index,
            action: problem.action(a).name().to_string(),
        };
        if !problem.applicable(&world).contains(&a) {
            return Err(inapplicable());
        }
        world = problem.simulate(&world, a).ok_or_else(inapplicable)?;
        let prev = states.last().expect("non-empty");
        let next = AugmentedState::successor(
            problem,
            &world,
            prev.cost + problem.action(a).cost(),
            &prev.latched,
        );
        states.push(next);
    }
    Ok((
        world,
        Trace {
            states,
            plan: plan.clone(),
        },
    ))
}

/// Replays `plan`, producing the augmented trace.
pub fn replay<P: SimulatorProblem + ?Sized>(problem: &P, plan: &Plan) -> Result<Trace, ModelError> {
    replay_world(problem, plan).map(|(_, t)| t)
}

/// Sum of action costs, without simulating.
pub fn plan_cost<P: SimulatorProblem + ?Sized>(problem: &P, plan: &Plan) -> Result<u64, ModelError> {
    plan.actions().iter().try_fold(0u64, |acc, &a| {
        problem
            .actions()
            .get(a.index())
            .map(|action| acc + action.cost())
            .ok_or(ModelError::UnknownActionId(a.index()))
    })
}

/// Renders a trace as the per-position atom sets consumed by the LTLf evaluator.
///
/// Each position carries its raw truths, exactly one `cost-X` atom, `goal-state`
/// when the goal test holds, and `first-g` for every latched goal predicate.
pub fn trace_view(
    symbols: &Symbols,
    trace: &Trace,
    cost_bound: u64,
) -> Result<Vec<BTreeSet<String>>, ModelError> {
    trace
        .states
        .iter()
        .enumerate()
        .map(|(position, s)| {
            if s.cost > cost_bound {
                return Err(ModelError::CostBoundExceeded {
                    position,
                    cost: s.cost,
                    bound: cost_bound,
                });
            }
            Ok(view_letter(symbols, s))
        })
        .collect()
}

pub(crate) fn view_letter(symbols: &Symbols, s: &AugmentedState) -> BTreeSet<String> {
    let mut letter: BTreeSet<String> = s.raw.names(symbols).map(str::to_string).collect();
    letter.insert(cost_atom(s.cost));
    if s.goal {
        letter.insert(GOAL_STATE_ATOM.to_string());
    }
    for &g in &s.latched {
        letter.insert(latch_atom(symbols.name(g)));
    }
    letter
}

#[cfg(test)]
pub(crate) mod toy {
    //! A two-goal toy problem whose simulator can undo goal `g1`.
    use super::*;

    /// Worlds are (g1, g2, done). Actions: set-g1, unset-g1, set-g2 (cost 2), finish.
    pub struct Toggle {
        symbols: Symbols,
        actions: Vec<Action>,
        goals: Vec<Predicate>,
    }

    impl Toggle {
        pub fn new() -> Self {
            let mut symbols = Symbols::new();
            let g1 = symbols.intern("g1");
            let g2 = symbols.intern("g2");
            symbols.intern("done");
            Toggle {
                symbols,
                actions: vec![
                    Action::unit("set-g1"),
                    Action::unit("unset-g1"),
                    Action::new("set-g2", 2).unwrap(),
                    Action::unit("finish"),
                ],
                goals: vec![g1, g2],
            }
        }
    }

    impl SimulatorProblem for Toggle {
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
        fn observe(&self, w: &Self::World) -> State {
            let names = [(w.0, "g1"), (w.1, "g2"), (w.2, "done")];
            names
                .iter()
                .filter(|(on, _)| *on)
                .map(|(_, n)| self.symbols.get(n).unwrap())
                .collect()
        }
        fn applicable(&self, w: &Self::World) -> Vec<ActionId> {
            let mut out = Vec::new();
            if w.2 {
                return out;
            }
            if !w.0 {
                out.push(ActionId(0));
            } else {
                out.push(ActionId(1));
            }
            if !w.1 {
                out.push(ActionId(2));
            }
            if w.1 {
                out.push(ActionId(3));
            }
            out
        }
        fn simulate(&self, w: &Self::World, a: ActionId) -> Option<Self::World> {
            let mut w = *w;
            match a.0 {
                0 => w.0 = true,
                1 => w.0 = false,
                2 => w.1 = true,
                3 => w.2 = true,
                _ => return None,
            }
            Some(w)
        }
        fn is_goal(&self, w: &Self::World) -> bool {
            w.2
        }
        fn goal_predicates(&self) -> &[Predicate] {
            &self.goals
        }
    }
}

#[cfg(test)]
mod tests {
    use super::toy::Toggle;
    use super::*;

    fn plan(p: &Toggle, names: &[&str]) -> Plan {
        Plan::from_names(p, names).unwrap()
    }

    #[test]
    fn interning_is_injective_and_ordered() {
        let mut s = Symbols::new();
        let a = s.intern("a");
        let b = s.intern("b");
        assert_eq!(s.intern("a"), a);
        assert_ne!(a, b);
        assert!(a < b);
        assert_eq!(s.name(b), "b");
    }

    #[test]
    fn state_set_semantics() {
        let mut s = Symbols::new();
        let (a, b) = (s.intern("a"), s.intern("b"));
        let x: State = [b, a, b].into_iter().collect();
        let y: State = [a, b].into_iter().collect();
        assert_eq!(x, y);
        assert_eq!(x.len(), 2);
    }

    #[test]
    fn zero_cost_rejected() {
        assert!(Action::new("a", 0).is_err());
    }

    #[test]
    fn empty_plan_replays_to_initial() {
        let p = Toggle::new();
        let t = replay(&p, &Plan::empty()).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.states[0].cost, 0);
        assert!(!t.states[0].goal);
    }

    #[test]
    fn inapplicable_action_reports_index() {
        let p = Toggle::new();
        let err = replay(&p, &plan(&p, &["set-g1", "set-g1"])).unwrap_err();
        assert!(matches!(err, ModelError::InapplicableAction { index: 1, .. }));
    }

    #[test]
    fn plan_cost_sums() {
        let p = Toggle::new();
        assert_eq!(plan_cost(&p, &Plan::empty()).unwrap(), 0);
        assert_eq!(plan_cost(&p, &plan(&p, &["set-g1", "set-g2"])).unwrap(), 3);
        assert!(plan_cost(&p, &Plan::new(vec![ActionId(9)])).is_err());
    }

    #[test]
    fn latch_survives_undo() {
        let p = Toggle::new();
        // g1 at step 1, undone at step 2, g2 at step 3, finish at 4.
        let t = replay(&p, &plan(&p, &["set-g1", "unset-g1", "set-g2", "finish"])).unwrap();
        let view = trace_view(p.symbols(), &t, 10).unwrap();
        assert!(!view[0].contains("first-g1"));
        for letter in &view[1..] {
            assert!(letter.contains("first-g1"));
        }
        assert!(!view[2].contains("g1"));
        assert!(view[4].contains("goal-state"));
        assert!(view[4].contains("cost-5"));
        for letter in &view {
            assert_eq!(letter.iter().filter(|a| a.starts_with("cost-")).count(), 1);
        }
    }

    #[test]
    fn view_rejects_cost_over_bound() {
        let p = Toggle::new();
        let t = replay(&p, &plan(&p, &["set-g2", "finish"])).unwrap();
        assert!(matches!(
            trace_view(p.symbols(), &t, 2),
            Err(ModelError::CostBoundExceeded { position: 2, cost: 3, .. })
        ));
    }
}
