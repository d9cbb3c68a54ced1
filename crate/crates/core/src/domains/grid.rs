//! Grid navigation with ordered targets. Small enough to enumerate, so it
//! doubles as the oracle domain in tests.
//!
//! Map format: `#` wall, `.` floor, `S` start, `T` target. Targets are named
//! `t1`, `t2`, ... in reading order. Lines starting with `;` are comments.

use std::collections::BTreeSet;

use super::{map_lines, parse_error, DomainError};
use crate::model::{Action, ActionId, Predicate, SimulatorProblem, State, Symbols};

pub type Cell = (usize, usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    Up,
    Down,
    Left,
    Right,
}

impl Move {
    pub const ALL: [Move; 4] = [Move::Up, Move::Down, Move::Left, Move::Right];

    pub fn name(self) -> &'static str {
        match self {
            Move::Up => "up",
            Move::Down => "down",
            Move::Left => "left",
            Move::Right => "right",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridWorld {
    pub width: usize,
    pub height: usize,
    pub walls: BTreeSet<Cell>,
    pub start: Cell,
    pub targets: Vec<Cell>,
}

/// Agent position plus which targets have been entered.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GridState {
    pub at: Cell,
    pub visited: Vec<bool>,
}

impl GridWorld {
    pub fn parse(text: &str) -> Result<Self, DomainError> {
        let rows: Vec<(usize, &str)> = map_lines(text).collect();
        if rows.is_empty() {
            return Err(parse_error(1, "empty grid"));
        }
        let width = rows[0].1.chars().count();
        let mut walls = BTreeSet::new();
        let mut start = None;
        let mut targets = Vec::new();
        for (r, (line, row)) in rows.iter().enumerate() {
            if row.chars().count() != width {
                return Err(parse_error(*line, "grid rows must have equal width"));
            }
            for (c, ch) in row.chars().enumerate() {
                match ch {
                    '#' => {
                        walls.insert((r, c));
                    }
                    '.' => {}
                    'S' if start.is_some() => return Err(parse_error(*line, "second start cell")),
                    'S' => start = Some((r, c)),
                    'T' => targets.push((r, c)),
                    other => return Err(parse_error(*line, format!("unexpected `{other}`"))),
                }
            }
        }
        let world = GridWorld {
            width,
            height: rows.len(),
            walls,
            start: start.ok_or_else(|| parse_error(rows[0].0, "missing start cell `S`"))?,
            targets,
        };
        world.validate()?;
        Ok(world)
    }

    fn validate(&self) -> Result<(), DomainError> {
        let bad = |m: &str| Err(DomainError::LevelInvalid(m.to_string()));
        if self.targets.is_empty() {
            return bad("at least one target is required");
        }
        if self.walls.contains(&self.start) || self.targets.iter().any(|t| self.walls.contains(t)) {
            return bad("start and targets must not be walls");
        }
        let unique: BTreeSet<_> = self.targets.iter().collect();
        if unique.len() != self.targets.len() {
            return bad("duplicate target");
        }
        Ok(())
    }

    pub fn is_open(&self, cell: Cell) -> bool {
        cell.0 < self.height && cell.1 < self.width && !self.walls.contains(&cell)
    }

    fn destination(&self, from: Cell, m: Move) -> Option<Cell> {
        let (r, c) = from;
        let to = match m {
            Move::Up => (r.checked_sub(1)?, c),
            Move::Down => (r + 1, c),
            Move::Left => (r, c.checked_sub(1)?),
            Move::Right => (r, c + 1),
        };
        self.is_open(to).then_some(to)
    }

    pub fn initial(&self) -> GridState {
        let mut s = GridState {
            at: self.start,
            visited: vec![false; self.targets.len()],
        };
        self.mark(&mut s);
        s
    }

    fn mark(&self, s: &mut GridState) {
        if let Some(i) = self.targets.iter().position(|&t| t == s.at) {
            s.visited[i] = true;
        }
    }

    /// Moves the agent one cell. Entering a target marks it visited for good.
    pub fn step(&self, s: &GridState, m: Move) -> Result<GridState, DomainError> {
        let to = self
            .destination(s.at, m)
            .ok_or_else(|| DomainError::InapplicableAction(m.name().to_string()))?;
        let mut next = GridState {
            at: to,
            visited: s.visited.clone(),
        };
        self.mark(&mut next);
        Ok(next)
    }
}

/// [`GridWorld`] as a [`SimulatorProblem`] with unit-cost moves.
#[derive(Debug, Clone)]
pub struct GridProblem {
    world: GridWorld,
    symbols: Symbols,
    actions: Vec<Action>,
    at: Vec<Option<Predicate>>,
    visited: Vec<Predicate>,
}

impl GridProblem {
    pub fn new(world: GridWorld) -> Self {
        let mut symbols = Symbols::new();
        let mut at = vec![None; world.width * world.height];
        for r in 0..world.height {
            for c in 0..world.width {
                if world.is_open((r, c)) {
                    at[r * world.width + c] = Some(symbols.intern(format!("at-{r}-{c}")));
                }
            }
        }
        let visited = (1..=world.targets.len())
            .map(|i| symbols.intern(format!("visited-t{i}")))
            .collect();
        GridProblem {
            actions: Move::ALL.iter().map(|m| Action::unit(m.name())).collect(),
            world,
            symbols,
            at,
            visited,
        }
    }

    pub fn parse(text: &str) -> Result<Self, DomainError> {
        GridWorld::parse(text).map(Self::new)
    }

    pub fn world(&self) -> &GridWorld {
        &self.world
    }
}

impl SimulatorProblem for GridProblem {
    type World = GridState;

    fn symbols(&self) -> &Symbols {
        &self.symbols
    }

    fn actions(&self) -> &[Action] {
        &self.actions
    }

    fn initial(&self) -> GridState {
        self.world.initial()
    }

    fn observe(&self, s: &GridState) -> State {
        let at = self.at[s.at.0 * self.world.width + s.at.1].expect("agent stands on floor");
        std::iter::once(at)
            .chain(
                s.visited
                    .iter()
                    .zip(&self.visited)
                    .filter(|(v, _)| **v)
                    .map(|(_, &p)| p),
            )
            .collect()
    }

    fn applicable(&self, s: &GridState) -> Vec<ActionId> {
        Move::ALL
            .iter()
            .enumerate()
            .filter(|(_, &m)| self.world.destination(s.at, m).is_some())
            .map(|(i, _)| ActionId(i as u32))
            .collect()
    }

    fn simulate(&self, s: &GridState, a: ActionId) -> Option<GridState> {
        let m = *Move::ALL.get(a.index())?;
        self.world.step(s, m).ok()
    }

    fn is_goal(&self, s: &GridState) -> bool {
        s.visited.iter().all(|&v| v)
    }

    fn goal_predicates(&self) -> &[Predicate] {
        &self.visited
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{replay, Plan};

    #[test]
    fn corridor_two_rights() {
        let p = GridProblem::parse("S.T\n").unwrap();
        let plan = Plan::from_names(&p, &["right", "right"]).unwrap();
        let t = replay(&p, &plan).unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t.last().cost, 2);
        assert!(t.last().goal);
    }

    #[test]
    fn wall_blocks_move() {
        let w = GridWorld::parse("S#T\n...\n").unwrap();
        let s = w.initial();
        assert!(matches!(w.step(&s, Move::Right), Err(DomainError::InapplicableAction(_))));
        assert!(w.step(&s, Move::Up).is_err());
        assert!(w.step(&s, Move::Down).is_ok());
    }

    #[test]
    fn visited_latches() {
        let w = GridWorld::parse("ST.\n").unwrap();
        let s = w.step(&w.initial(), Move::Right).unwrap();
        assert_eq!(s.visited, vec![true]);
        let s = w.step(&s, Move::Right).unwrap();
        assert_eq!(s.visited, vec![true]);
    }

    #[test]
    fn parse_errors() {
        assert!(GridWorld::parse("S..\n").is_err());
        assert!(GridWorld::parse("S.T\n..\n").is_err());
        assert!(GridWorld::parse("SxT\n").is_err());
        assert!(GridWorld::parse("; only a comment\n").is_err());
        assert!(GridWorld::parse("S.T\n").is_ok());
    }

    #[test]
    fn start_on_target_is_visited() {
        let p = GridProblem::parse("T.S.T\n").unwrap();
        assert!(!p.is_goal(&p.initial()));
        let p = GridProblem::parse("..T\n").unwrap_err();
        assert!(matches!(p, DomainError::Parse { .. }));
    }
}
