//! Linear temporal logic over finite traces.
//!
//! Formulas are plain trees. Equality used by the rest of the crate is
//! canonical-structural: nested conjunctions and disjunctions are flattened and
//! their operands sorted (see [`Formula::canonical`]).
//!
//! Concrete syntax, lowest to highest precedence:
//!
//! ```text
//! a U b, a R b        right associative
//! a | b
//! a & b
//! !a, X a, F a, G a
//! atom, true, false, ( ... )
//! ```
//!
//! Atoms match `[A-Za-z0-9_-]+` and may not be one of the keywords
//! `X F G U R true false`.

mod eval;
mod parse;

use std::collections::BTreeSet;
use std::fmt;

pub use eval::{evaluate, satisfaction, Letter};
pub use parse::{parse_formula, ParseError};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    True,
    False,
    Atom(String),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Next(Box<Formula>),
    Eventually(Box<Formula>),
    Always(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    Release(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Self {
        Formula::Atom(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(vec![a, b])
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(vec![a, b])
    }

    pub fn next(f: Formula) -> Self {
        Formula::Next(Box::new(f))
    }

    pub fn eventually(f: Formula) -> Self {
        Formula::Eventually(Box::new(f))
    }

    pub fn always(f: Formula) -> Self {
        Formula::Always(Box::new(f))
    }

    pub fn until(a: Formula, b: Formula) -> Self {
        Formula::Until(Box::new(a), Box::new(b))
    }

    pub fn release(a: Formula, b: Formula) -> Self {
        Formula::Release(Box::new(a), Box::new(b))
    }

    /// Conjunction of any number of formulas; `true` when empty.
    pub fn conjunction(parts: impl IntoIterator<Item = Formula>) -> Self {
        Formula::And(parts.into_iter().collect()).canonical()
    }

    /// Flattens nested `&`/`|`, sorts their operands, and collapses empty and
    /// singleton operand lists.
    pub fn canonical(&self) -> Formula {
        use Formula::*;
        match self {
            True | False | Atom(_) => self.clone(),
            Not(f) => Formula::not(f.canonical()),
            Next(f) => Formula::next(f.canonical()),
            Eventually(f) => Formula::eventually(f.canonical()),
            Always(f) => Formula::always(f.canonical()),
            Until(a, b) => Formula::until(a.canonical(), b.canonical()),
            Release(a, b) => Formula::release(a.canonical(), b.canonical()),
            And(parts) => flatten(parts, true),
            Or(parts) => flatten(parts, false),
        }
    }

    /// Canonical-structural equality.
    pub fn same_as(&self, other: &Formula) -> bool {
        self.canonical() == other.canonical()
    }

    pub fn depth(&self) -> usize {
        use Formula::*;
        match self {
            True | False | Atom(_) => 0,
            Not(f) | Next(f) | Eventually(f) | Always(f) => 1 + f.depth(),
            Until(a, b) | Release(a, b) => 1 + a.depth().max(b.depth()),
            And(ps) | Or(ps) => 1 + ps.iter().map(Formula::depth).max().unwrap_or(0),
        }
    }

    /// All atom names mentioned in the formula.
    pub fn atoms(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        use Formula::*;
        match self {
            True | False => {}
            Atom(a) => {
                out.insert(a);
            }
            Not(f) | Next(f) | Eventually(f) | Always(f) => f.collect_atoms(out),
            Until(a, b) | Release(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
            And(ps) | Or(ps) => ps.iter().for_each(|p| p.collect_atoms(out)),
        }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, top: bool) -> fmt::Result {
        use Formula::*;
        match self {
            True => write!(f, "true"),
            False => write!(f, "false"),
            Atom(a) => write!(f, "{a}"),
            Not(x) => {
                write!(f, "!")?;
                x.write(f, false)
            }
            Next(x) => {
                write!(f, "X ")?;
                x.write(f, false)
            }
            Eventually(x) => {
                write!(f, "F ")?;
                x.write(f, false)
            }
            Always(x) => {
                write!(f, "G ")?;
                x.write(f, false)
            }
            Until(a, b) | Release(a, b) => {
                let op = if matches!(self, Until(..)) { "U" } else { "R" };
                write!(f, "(")?;
                a.write(f, false)?;
                write!(f, " {op} ")?;
                b.write(f, false)?;
                write!(f, ")")
            }
            And(ps) | Or(ps) => {
                // Empty operand lists only appear in non-canonical trees.
                if ps.is_empty() {
                    return write!(f, "{}", if matches!(self, And(_)) { "true" } else { "false" });
                }
                let sep = if matches!(self, And(_)) { " & " } else { " | " };
                if !top {
                    write!(f, "(")?;
                }
                for (i, p) in ps.iter().enumerate() {
                    if i > 0 {
                        write!(f, "{sep}")?;
                    }
                    p.write(f, false)?;
                }
                if !top {
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

fn flatten(parts: &[Formula], conj: bool) -> Formula {
    let mut out = Vec::with_capacity(parts.len());
    for p in parts {
        match (p.canonical(), conj) {
            (Formula::And(inner), true) | (Formula::Or(inner), false) => out.extend(inner),
            (c, _) => out.push(c),
        }
    }
    out.sort();
    match out.len() {
        0 if conj => Formula::True,
        0 => Formula::False,
        1 => out.pop().expect("one element"),
        _ if conj => Formula::And(out),
        _ => Formula::Or(out),
    }
}

/// Prints the tree as is. Use [`format_formula`] for canonical text.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, true)
    }
}

/// Canonical text of a formula; parsing it yields `formula.canonical()`.
pub fn format_formula(formula: &Formula) -> String {
    formula.canonical().to_string()
}

/// True for formulas built only from latch atoms, `(!a U b)` over latch atoms,
/// and conjunctions thereof.
///
/// Such a formula, once satisfied at position 0 of a trace prefix, stays
/// satisfied on every extension along which latch atoms never turn false.
pub fn is_latch_monotone<S: AsRef<str> + Ord>(formula: &Formula, latch_atoms: &BTreeSet<S>) -> bool {
    let is_latch = |a: &str| latch_atoms.iter().any(|l| l.as_ref() == a);
    match formula {
        Formula::True => true,
        Formula::Atom(a) => is_latch(a),
        Formula::Until(lhs, rhs) => match (lhs.as_ref(), rhs.as_ref()) {
            (Formula::Not(inner), Formula::Atom(b)) => {
                matches!(inner.as_ref(), Formula::Atom(a) if is_latch(a)) && is_latch(b)
            }
            _ => false,
        },
        Formula::And(parts) => parts.iter().all(|p| is_latch_monotone(p, latch_atoms)),
        _ => false,
    }
}
