use std::collections::{BTreeSet, HashSet};

use super::Formula;

/// One position of a finite trace: answers whether an atom holds there.
/// Atoms a letter does not know about are false.
pub trait Letter {
    fn holds(&self, atom: &str) -> bool;
}

impl Letter for BTreeSet<String> {
    fn holds(&self, atom: &str) -> bool {
        self.contains(atom)
    }
}

impl Letter for HashSet<String> {
    fn holds(&self, atom: &str) -> bool {
        self.contains(atom)
    }
}

impl Letter for BTreeSet<&str> {
    fn holds(&self, atom: &str) -> bool {
        self.contains(atom)
    }
}

impl Letter for Vec<&str> {
    fn holds(&self, atom: &str) -> bool {
        self.contains(&atom)
    }
}

/// Satisfaction of `formula` at `position` of `view` (strong next: `X φ` is
/// false at the last position).
///
/// # Panics
/// If `position >= view.len()`.
pub fn evaluate<L: Letter>(formula: &Formula, view: &[L], position: usize) -> bool {
    assert!(
        position < view.len(),
        "position {position} outside trace of length {}",
        view.len()
    );
    satisfaction(formula, view)[position]
}

/// Satisfaction of `formula` at every position of `view`, computed backwards
/// from the end of the trace.
pub fn satisfaction<L: Letter>(formula: &Formula, view: &[L]) -> Vec<bool> {
    let n = view.len();
    match formula {
        Formula::True => vec![true; n],
        Formula::False => vec![false; n],
        Formula::Atom(a) => view.iter().map(|l| l.holds(a)).collect(),
        Formula::Not(f) => satisfaction(f, view).into_iter().map(|b| !b).collect(),
        Formula::And(parts) => parts.iter().fold(vec![true; n], |acc, p| {
            acc.into_iter()
                .zip(satisfaction(p, view))
                .map(|(x, y)| x && y)
                .collect()
        }),
        Formula::Or(parts) => parts.iter().fold(vec![false; n], |acc, p| {
            acc.into_iter()
                .zip(satisfaction(p, view))
                .map(|(x, y)| x || y)
                .collect()
        }),
        Formula::Next(f) => {
            let inner = satisfaction(f, view);
            (0..n).map(|i| i + 1 < n && inner[i + 1]).collect()
        }
        Formula::Eventually(f) => {
            let inner = satisfaction(f, view);
            backward(n, false, |i, later| inner[i] || later)
        }
        Formula::Always(f) => {
            let inner = satisfaction(f, view);
            backward(n, true, |i, later| inner[i] && later)
        }
        Formula::Until(a, b) => {
            let (lhs, rhs) = (satisfaction(a, view), satisfaction(b, view));
            backward(n, false, |i, later| rhs[i] || (lhs[i] && later))
        }
        Formula::Release(a, b) => {
            let (lhs, rhs) = (satisfaction(a, view), satisfaction(b, view));
            backward(n, true, |i, later| rhs[i] && (lhs[i] || later))
        }
    }
}

/// Fills positions `n-1..=0` from `step(i, value at i+1)`, seeding position `n`
/// with `beyond`.
fn backward(n: usize, beyond: bool, step: impl Fn(usize, bool) -> bool) -> Vec<bool> {
    let mut out = vec![false; n];
    let mut later = beyond;
    for i in (0..n).rev() {
        later = step(i, later);
        out[i] = later;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::parse_formula;
    use super::*;

    fn view(sets: &[&[&str]]) -> Vec<BTreeSet<String>> {
        sets.iter()
            .map(|s| s.iter().map(|a| a.to_string()).collect())
            .collect()
    }

    fn eval(text: &str, v: &[BTreeSet<String>], i: usize) -> bool {
        evaluate(&parse_formula(text).unwrap(), v, i)
    }

    #[test]
    fn always_holds_everywhere() {
        assert!(eval("G p", &view(&[&["p"], &["p"]]), 0));
    }

    #[test]
    fn strong_next_at_end() {
        assert!(!eval("X p", &view(&[&["p"]]), 0));
    }

    #[test]
    fn until_unfolds() {
        assert!(eval("!q U p", &view(&[&[], &["p"], &["q"]]), 0));
        assert!(!eval("!q U p", &view(&[&[], &["q"], &["p"]]), 0));
    }

    #[test]
    fn cost_goal_latches_at_end() {
        let mut sets: Vec<&[&str]> = vec![&["cost-0"], &["cost-1"], &["cost-2"], &["cost-3"], &["cost-4"]];
        sets.push(&["cost-5", "goal-state"]);
        let v = view(&sets);
        assert!(eval("F G (cost-5 & goal-state)", &v, 0));
        assert!(!eval("F G (cost-4 & goal-state)", &v, 0));
        // Holds from any position.
        assert!(eval("F G (cost-5 & goal-state)", &v, 5));
    }

    #[test]
    fn unknown_atoms_are_false() {
        assert!(!eval("nope", &view(&[&["p"]]), 0));
        assert!(eval("!nope", &view(&[&["p"]]), 0));
    }

    #[test]
    #[should_panic]
    fn position_out_of_range_panics() {
        eval("p", &view(&[&["p"]]), 1);
    }
}
