//! Behaviour-diverse planning over black-box simulators.
//!
//! A problem is anything implementing [`SimulatorProblem`]: an initial world,
//! applicable actions, a deterministic successor function, and a projection
//! of worlds onto sets of interned predicates. Plans are found by iterated
//! width search; [`fbi`] collects `k` plans whose behaviours (final cost,
//! order of first goal achievement) differ as much as the problem allows,
//! with behaviours rendered as LTLf formulas over the plan trace.
//!
//! See the crate's `examples/` directory for runnable walkthroughs.

pub mod behaviour;
pub mod bench;
pub mod domains;
pub mod ltlf;
pub mod model;
pub mod oracle;
pub mod render;
pub mod search;
pub mod stats;

pub use behaviour::{
    behaviour_count, behaviour_formula, extract_behaviour, Behaviour, BehaviourError, BehaviourRecord,
    BehaviourSpace, Feature,
};
pub use ltlf::{evaluate, format_formula, parse_formula, Formula};
pub use model::{
    plan_cost, replay, trace_view, Action, ActionId, ModelError, Plan, Predicate, SimulatorProblem,
    State, Symbols, Trace,
};
pub use oracle::{brute_force_behaviours, OracleTooLarge};
pub use search::{
    behaviour_generator, fbi, fbi_naive, fbi_with, iterated_width, plan_generator, FbiOptions,
    NoveltyConfig, NoveltyScope, PlanSetResult, SearchError, SearchLimits, SearchStats,
};
pub use stats::{paired_t_test, TTest};
