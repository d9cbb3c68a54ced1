//! Breadth-first skeleton shared by every generator.
//!
//! One FIFO search per width `1..=max_width`. A successor survives only if it
//! is within the cost bound, its visited key is new for this width iteration,
//! it passes the novelty test, and the hooks do not reject it. Goal nodes are
//! never expanded and never enter the visited set; the hooks decide whether
//! to return them, collect them, or drop them.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::time::Instant;

use super::novelty::{is_novel_in_history, GlobalNovelty};
use super::{BudgetKind, NoveltyConfig, NoveltyScope, SearchLimits, SearchStats};
use crate::model::{view_letter, ActionId, AugmentedState, Plan, Predicate, SimulatorProblem, State};

pub(crate) struct Budget {
    started: Instant,
    limits: SearchLimits,
    generated: u64,
}

impl Budget {
    pub(crate) fn new(limits: &SearchLimits) -> Self {
        Budget {
            started: Instant::now(),
            limits: limits.clone(),
            generated: 0,
        }
    }

    fn charge(&mut self) -> Result<(), BudgetKind> {
        if self.generated >= self.limits.node_budget {
            return Err(BudgetKind::Nodes);
        }
        self.generated += 1;
        if self.generated.is_multiple_of(256) && self.started.elapsed() > self.limits.time_budget {
            return Err(BudgetKind::Time);
        }
        Ok(())
    }
}

pub(crate) struct Node<W> {
    world: Option<W>,
    pub raw: State,
    pub parent: Option<usize>,
    pub action: Option<ActionId>,
    pub cost: u64,
    pub depth: u32,
    pub goal: bool,
    /// First-latch position per problem goal predicate.
    pub latch: Box<[Option<u32>]>,
}

/// Which trace facts distinguish otherwise equal raw states in the visited set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct KeyMode {
    pub order: bool,
    pub cost: bool,
}

impl KeyMode {
    pub(crate) const LATCHED_SET: KeyMode = KeyMode {
        order: false,
        cost: false,
    };
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct VisitedKey {
    raw: State,
    latch: Vec<Option<u32>>,
    cost: Option<u64>,
}

impl VisitedKey {
    fn of<W>(node: &Node<W>, mode: KeyMode) -> Self {
        let latch = if mode.order {
            // Replace positions by their rank so equal orders compare equal.
            let mut distinct: Vec<u32> = node.latch.iter().flatten().copied().collect();
            distinct.sort_unstable();
            distinct.dedup();
            node.latch
                .iter()
                .map(|p| p.map(|p| distinct.binary_search(&p).expect("present") as u32))
                .collect()
        } else {
            node.latch.iter().map(|p| p.map(|_| 0)).collect()
        };
        VisitedKey {
            raw: node.raw.clone(),
            latch,
            cost: mode.cost.then_some(node.cost),
        }
    }
}

pub(crate) struct Tree<'p, P: SimulatorProblem + ?Sized> {
    pub problem: &'p P,
    pub nodes: Vec<Node<P::World>>,
}

#[derive(Clone)]
struct Ancestors<'a, W> {
    nodes: &'a [Node<W>],
    at: Option<usize>,
}

impl<'a, W> Iterator for Ancestors<'a, W> {
    type Item = &'a State;

    fn next(&mut self) -> Option<&'a State> {
        let node = &self.nodes[self.at?];
        self.at = node.parent;
        Some(&node.raw)
    }
}

impl<P: SimulatorProblem + ?Sized> Tree<'_, P> {
    pub fn plan(&self, mut at: usize) -> Plan {
        let mut actions = Vec::new();
        while let Some(a) = self.nodes[at].action {
            actions.push(a);
            at = self.nodes[at].parent.expect("non-root nodes have parents");
        }
        actions.reverse();
        Plan::new(actions)
    }

    pub fn node(&self, at: usize) -> &Node<P::World> {
        &self.nodes[at]
    }

    /// First-latch position of a goal predicate at node `at`.
    pub fn first_latch(&self, at: usize, goal: Predicate) -> Option<usize> {
        let goals = self.problem.goal_predicates();
        goals
            .iter()
            .position(|&g| g == goal)
            .and_then(|i| self.nodes[at].latch[i])
            .map(|p| p as usize)
    }

    pub fn all_latched(&self, at: usize) -> bool {
        self.nodes[at].latch.iter().all(Option::is_some)
    }

    /// Trace view (see [`crate::model::trace_view`]) of the path to `at`.
    pub fn view(&self, at: usize) -> Vec<BTreeSet<String>> {
        let mut path = vec![at];
        while let Some(p) = self.nodes[*path.last().expect("non-empty")].parent {
            path.push(p);
        }
        path.reverse();
        let goals = self.problem.goal_predicates();
        path.iter()
            .enumerate()
            .map(|(pos, &i)| {
                let n = &self.nodes[i];
                let latched = goals
                    .iter()
                    .zip(self.nodes[at].latch.iter())
                    .filter(|(_, p)| p.is_some_and(|p| p as usize <= pos))
                    .map(|(&g, _)| g)
                    .collect();
                let s = AugmentedState {
                    raw: n.raw.clone(),
                    cost: n.cost,
                    goal: n.goal,
                    latched,
                };
                view_letter(self.problem.symbols(), &s)
            })
            .collect()
    }
}

pub(crate) enum Verdict {
    /// Return this goal node's plan.
    Accept,
    /// Drop this goal node.
    Reject,
    /// Keep searching; the hooks recorded the node.
    Collect,
    /// Stop searching; the hooks have what they need.
    Stop,
}

pub(crate) trait Hooks<P: SimulatorProblem + ?Sized> {
    fn on_goal(&mut self, tree: &Tree<'_, P>, node: usize) -> Verdict;

    fn prune_interior(&mut self, _tree: &Tree<'_, P>, _node: usize) -> bool {
        false
    }
}

pub(crate) enum End {
    Found(Plan),
    Stopped,
    Exhausted,
}

pub(crate) struct Skeleton<'a> {
    pub novelty: &'a NoveltyConfig,
    pub cost_bound: u64,
    pub keys: KeyMode,
}

impl Skeleton<'_> {
    pub(crate) fn run<P, H>(
        &self,
        problem: &P,
        hooks: &mut H,
        budget: &mut Budget,
        stats: &mut SearchStats,
    ) -> Result<End, BudgetKind>
    where
        P: SimulatorProblem + ?Sized,
        H: Hooks<P>,
    {
        let started = Instant::now();
        for width in 1..=self.novelty.max_width {
            let width_started = Instant::now();
            let end = self.run_width(problem, width, hooks, budget, stats);
            stats.add_width_time(width - 1, width_started.elapsed());
            match end {
                Ok(End::Exhausted) => continue,
                other => {
                    stats.total_secs += started.elapsed().as_secs_f64();
                    return other;
                }
            }
        }
        stats.total_secs += started.elapsed().as_secs_f64();
        Ok(End::Exhausted)
    }

    fn run_width<P, H>(
        &self,
        problem: &P,
        width: usize,
        hooks: &mut H,
        budget: &mut Budget,
        stats: &mut SearchStats,
    ) -> Result<End, BudgetKind>
    where
        P: SimulatorProblem + ?Sized,
        H: Hooks<P>,
    {
        let goals = problem.goal_predicates();
        let world = problem.initial();
        let raw = problem.observe(&world);
        let root = Node {
            latch: goals
                .iter()
                .map(|&g| raw.contains(g).then_some(0))
                .collect(),
            goal: problem.is_goal(&world),
            world: Some(world),
            raw,
            parent: None,
            action: None,
            cost: 0,
            depth: 0,
        };
        let mut global = GlobalNovelty::new();
        if self.novelty.scope == NoveltyScope::Global {
            global.record(&root.raw, width);
        }
        let mut visited = HashSet::new();
        visited.insert(VisitedKey::of(&root, self.keys));
        let root_is_goal = root.goal;
        let mut tree = Tree {
            problem,
            nodes: vec![root],
        };
        if root_is_goal {
            return Ok(match hooks.on_goal(&tree, 0) {
                Verdict::Accept => End::Found(Plan::empty()),
                Verdict::Stop => End::Stopped,
                Verdict::Reject | Verdict::Collect => End::Exhausted,
            });
        }

        let mut queue = VecDeque::from([0usize]);
        while let Some(at) = queue.pop_front() {
            let world = tree.nodes[at].world.take().expect("queued nodes keep their world");
            stats.nodes_expanded += 1;
            let depth = tree.nodes[at].depth + 1;
            for action in problem.applicable(&world) {
                budget.charge()?;
                stats.nodes_generated += 1;
                let cost = tree.nodes[at].cost + problem.action(action).cost();
                if cost > self.cost_bound {
                    stats.pruned_by_cost += 1;
                    continue;
                }
                let Some(next) = problem.simulate(&world, action) else {
                    continue;
                };
                let raw = problem.observe(&next);
                let latch = tree.nodes[at]
                    .latch
                    .iter()
                    .zip(goals)
                    .map(|(p, &g)| p.or_else(|| raw.contains(g).then_some(depth)))
                    .collect();
                let node = Node {
                    goal: problem.is_goal(&next),
                    world: Some(next),
                    raw,
                    parent: Some(at),
                    action: Some(action),
                    cost,
                    depth,
                    latch,
                };
                let key = VisitedKey::of(&node, self.keys);
                if visited.contains(&key) {
                    stats.pruned_by_visited += 1;
                    continue;
                }
                let novel = match self.novelty.scope {
                    NoveltyScope::TraceLocal => {
                        let history = Ancestors {
                            nodes: &tree.nodes,
                            at: Some(at),
                        };
                        is_novel_in_history(history, &node.raw, width)
                    }
                    NoveltyScope::Global => global.check_and_record(&node.raw, width),
                };
                if !novel {
                    stats.pruned_by_novelty += 1;
                    continue;
                }
                let is_goal = node.goal;
                tree.nodes.push(node);
                let id = tree.nodes.len() - 1;
                if is_goal {
                    match hooks.on_goal(&tree, id) {
                        Verdict::Accept => return Ok(End::Found(tree.plan(id))),
                        Verdict::Stop => return Ok(End::Stopped),
                        Verdict::Reject => stats.pruned_by_behaviour += 1,
                        Verdict::Collect => {}
                    }
                    tree.nodes[id].world = None;
                    continue;
                }
                if hooks.prune_interior(&tree, id) {
                    stats.pruned_interior += 1;
                    tree.nodes[id].world = None;
                    continue;
                }
                visited.insert(key);
                queue.push_back(id);
            }
        }
        Ok(End::Exhausted)
    }
}
