use itertools::Itertools;
use divsim::search::{is_novel_in_history, GlobalNovelty};
use divsim::{State, Symbols};
use proptest::prelude::*;

fn universe() -> (Symbols, Vec<divsim::Predicate>) {
    let mut sym = Symbols::new();
    let preds = (0..6).map(|i| sym.intern(format!("p{i}"))).collect();
    (sym, preds)
}

fn state_strategy() -> impl Strategy<Value = Vec<usize>> {
    proptest::sample::subsequence((0..6).collect::<Vec<_>>(), 0..=6)
}

fn to_state(preds: &[divsim::Predicate], idx: &[usize]) -> State {
    idx.iter().map(|&i| preds[i]).collect()
}

/// Novel iff some tuple of at most `width` predicates of the candidate never
/// appeared together in one earlier state.
fn novel_by_definition(history: &[State], candidate: &State, width: usize) -> bool {
    let atoms: Vec<_> = candidate.iter().collect();
    (1..=width).any(|size| {
        atoms.iter().combinations(size).any(|tuple| {
            !history
                .iter()
                .any(|s| tuple.iter().all(|&&p| s.contains(p)))
        })
    })
}

proptest! {
    #[test]
    fn trace_local_matches_definition(
        history in proptest::collection::vec(state_strategy(), 0..5),
        candidate in state_strategy(),
        width in 1usize..=3,
    ) {
        let (_, preds) = universe();
        let history: Vec<State> = history.iter().map(|h| to_state(&preds, h)).collect();
        let candidate = to_state(&preds, &candidate);
        prop_assert_eq!(
            is_novel_in_history(history.iter(), &candidate, width),
            novel_by_definition(&history, &candidate, width)
        );
    }

    #[test]
    fn global_matches_definition_over_accepted_states(
        stream in proptest::collection::vec(state_strategy(), 1..8),
        width in 1usize..=2,
    ) {
        let (_, preds) = universe();
        let mut table = GlobalNovelty::new();
        let mut accepted: Vec<State> = Vec::new();
        for s in &stream {
            let s = to_state(&preds, s);
            let expected = novel_by_definition(&accepted, &s, width);
            prop_assert_eq!(table.check_and_record(&s, width), expected);
            if expected {
                accepted.push(s);
            }
        }
    }

    #[test]
    fn wider_is_never_less_novel(
        history in proptest::collection::vec(state_strategy(), 0..5),
        candidate in state_strategy(),
    ) {
        let (_, preds) = universe();
        let history: Vec<State> = history.iter().map(|h| to_state(&preds, h)).collect();
        let candidate = to_state(&preds, &candidate);
        if is_novel_in_history(history.iter(), &candidate, 1) {
            prop_assert!(is_novel_in_history(history.iter(), &candidate, 2));
        }
    }
}

#[test]
fn empty_state_is_never_novel() {
    let empty = State::new();
    assert!(!is_novel_in_history(std::iter::empty(), &empty, 2));
}
