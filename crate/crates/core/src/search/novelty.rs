//! Novelty tests for width-based search.
//!
//! A state is novel at width `i` when some tuple of at most `i` of its raw
//! predicates has never been true together before. "Before" is either the
//! state's own ancestors (trace-local) or everything generated so far in the
//! current width iteration (global).

use std::collections::HashSet;

use itertools::Itertools;

use crate::model::{Predicate, State};

/// Tuples of size `1..=width` of `state`'s predicates, each sorted.
pub(crate) fn tuples(state: &State, width: usize) -> impl Iterator<Item = Vec<Predicate>> + '_ {
    (1..=width.min(state.len())).flat_map(move |size| state.iter().combinations(size))
}

/// Trace-local novelty: true iff some tuple of `candidate` is not contained in
/// any state of `history`.
pub fn is_novel_in_history<'a, I>(history: I, candidate: &State, width: usize) -> bool
where
    I: IntoIterator<Item = &'a State>,
    I::IntoIter: Clone,
{
    let history = history.into_iter();
    tuples(candidate, width).any(|t| !history.clone().any(|s| s.contains_all(&t)))
}

/// Global novelty table for one width iteration.
#[derive(Debug, Default, Clone)]
pub struct GlobalNovelty {
    seen: HashSet<Vec<Predicate>>,
}

impl GlobalNovelty {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records every tuple of `state` without testing it.
    pub fn record(&mut self, state: &State, width: usize) {
        self.seen.extend(tuples(state, width));
    }

    /// Tests `candidate`; on success its tuples are recorded.
    pub fn check_and_record(&mut self, candidate: &State, width: usize) -> bool {
        let novel = tuples(candidate, width).any(|t| !self.seen.contains(&t));
        if novel {
            self.record(candidate, width);
        }
        novel
    }

    pub fn len(&self) -> usize {
        self.seen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seen.is_empty()
    }
}
