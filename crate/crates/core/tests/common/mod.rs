//! Shared fixtures and independent reference implementations for tests.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use divsim::bench::{Domain, Instance};
use divsim::ltlf::Formula;
use divsim::{BehaviourSpace, Feature, SimulatorProblem};
use rand::Rng;

pub fn fixture_dir(group: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(group)
}

/// A micro instance with the oracle depth needed to see all its behaviours.
pub struct Micro {
    pub file: &'static str,
    pub max_len: usize,
}

pub const MICRO: &[Micro] = &[
    Micro { file: "grid-line.grid", max_len: 8 },
    Micro { file: "grid-open3.grid", max_len: 8 },
    Micro { file: "grid-room.grid", max_len: 8 },
    Micro { file: "grid-three.grid", max_len: 13 },
    Micro { file: "grid-wall.grid", max_len: 13 },
    Micro { file: "pzl-single.pzl", max_len: 6 },
    Micro { file: "pzl-swap.pzl", max_len: 8 },
    Micro { file: "pzl-three.pzl", max_len: 11 },
    Micro { file: "pt-chain.json", max_len: 4 },
    Micro { file: "pt-fork.json", max_len: 4 },
    Micro { file: "pt-two-doors.json", max_len: 4 },
];

pub fn load(path: &Path) -> Instance {
    let domain = Domain::from_path(path).expect("known extension");
    Instance::load(domain, path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn load_micro(m: &Micro) -> Instance {
    load(&fixture_dir("micro").join(m.file))
}

pub fn corridors() -> Vec<PathBuf> {
    let mut out: Vec<PathBuf> = std::fs::read_dir(fixture_dir("corridors"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    out.sort();
    out
}

/// Behaviour space and cost bound used for a micro instance: goal order with
/// the cost bound equal to the depth for unit-cost domains, goal order plus
/// cost bound (sum of every action cost) for pentest.
pub fn micro_setup<P: SimulatorProblem + ?Sized>(
    problem: &P,
    max_len: usize,
    weighted: bool,
) -> (BehaviourSpace, u64) {
    let go = Feature::GoalOrder(problem.goal_predicates().to_vec());
    if weighted {
        let total: u64 = problem.actions().iter().map(|a| a.cost()).sum();
        (BehaviourSpace::new(vec![Feature::CostBound(total), go]).unwrap(), total)
    } else {
        (BehaviourSpace::new(vec![go]).unwrap(), max_len as u64)
    }
}

/// Letter of a hand-built trace.
pub type Letter = BTreeSet<String>;

/// Direct recursive LTLf semantics, written from the textbook definitions.
pub fn holds(f: &Formula, trace: &[Letter], i: usize) -> bool {
    let n = trace.len();
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Atom(a) => trace[i].contains(a),
        Formula::Not(g) => !holds(g, trace, i),
        Formula::And(gs) => gs.iter().all(|g| holds(g, trace, i)),
        Formula::Or(gs) => gs.iter().any(|g| holds(g, trace, i)),
        Formula::Next(g) => i + 1 < n && holds(g, trace, i + 1),
        Formula::Eventually(g) => (i..n).any(|j| holds(g, trace, j)),
        Formula::Always(g) => (i..n).all(|j| holds(g, trace, j)),
        Formula::Until(a, b) => {
            (i..n).any(|j| holds(b, trace, j) && (i..j).all(|k| holds(a, trace, k)))
        }
        Formula::Release(a, b) => {
            (i..n).all(|j| holds(b, trace, j) || (i..j).any(|k| holds(a, trace, k)))
        }
    }
}

pub const ATOMS: [&str; 3] = ["p", "q", "r"];

pub fn random_formula<R: Rng>(rng: &mut R, depth: usize) -> Formula {
    let leaf = depth == 0 || rng.random_bool(0.25);
    if leaf {
        return match rng.random_range(0..8) {
            0 => Formula::True,
            1 => Formula::False,
            _ => Formula::atom(ATOMS[rng.random_range(0..ATOMS.len())]),
        };
    }
    let sub = |rng: &mut R| random_formula(rng, depth - 1);
    match rng.random_range(0..9) {
        0 => Formula::not(sub(rng)),
        1 => Formula::and(sub(rng), sub(rng)),
        2 => Formula::or(sub(rng), sub(rng)),
        3 => Formula::next(sub(rng)),
        4 => Formula::eventually(sub(rng)),
        5 => Formula::always(sub(rng)),
        6 => Formula::until(sub(rng), sub(rng)),
        7 => Formula::release(sub(rng), sub(rng)),
        _ => Formula::And(vec![sub(rng), sub(rng), sub(rng)]),
    }
}

pub fn random_trace<R: Rng>(rng: &mut R, max_len: usize) -> Vec<Letter> {
    let len = rng.random_range(1..=max_len);
    (0..len)
        .map(|_| {
            ATOMS
                .iter()
                .filter(|_| rng.random_bool(0.5))
                .map(|a| a.to_string())
                .collect()
        })
        .collect()
}
