//! Puzznic: push blocks sideways, let them fall, clear touching pairs.
//!
//! Level format: `#` wall, `.` empty, `a`..`z` block, `@` cursor on an empty
//! cell, `A`..`Z` cursor on a block of the lowercase pattern. Lines starting
//! with `;` are comments (`; name: ...` is conventional).
//!
//! Scoring: every clearing wave of a push adds `100 * cleared * wave`, where
//! `wave` counts from 1 for the first clear caused by that push.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{map_lines, parse_error, DomainError};
use crate::model::{Action, ActionId, Predicate, SimulatorProblem, State, Symbols};

pub const DEFAULT_BAND_WIDTH: u64 = 100;
const POINTS_PER_BLOCK: u64 = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cell {
    Wall,
    Empty,
    Block(u8),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PuzznicAction {
    CursorUp,
    CursorDown,
    CursorLeft,
    CursorRight,
    PushLeft,
    PushRight,
}

impl PuzznicAction {
    pub const ALL: [PuzznicAction; 6] = [
        PuzznicAction::CursorUp,
        PuzznicAction::CursorDown,
        PuzznicAction::CursorLeft,
        PuzznicAction::CursorRight,
        PuzznicAction::PushLeft,
        PuzznicAction::PushRight,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PuzznicAction::CursorUp => "up",
            PuzznicAction::CursorDown => "down",
            PuzznicAction::CursorLeft => "left",
            PuzznicAction::CursorRight => "right",
            PuzznicAction::PushLeft => "push-left",
            PuzznicAction::PushRight => "push-right",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.name() == name)
    }
}

/// What happened during one step, for playback.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameKind {
    Initial,
    Move,
    Push,
    Fall,
    Clear { wave: u32, blocks: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PuzznicLevel {
    width: usize,
    height: usize,
    cells: Vec<Cell>,
    cursor: (usize, usize),
    score: u64,
}

impl PuzznicLevel {
    pub fn parse(text: &str) -> Result<Self, DomainError> {
        let rows: Vec<(usize, &str)> = map_lines(text).collect();
        if rows.is_empty() {
            return Err(parse_error(1, "empty level"));
        }
        let width = rows[0].1.chars().count();
        let mut cells = Vec::with_capacity(width * rows.len());
        let mut cursor = None;
        for (r, (line, row)) in rows.iter().enumerate() {
            if row.chars().count() != width {
                return Err(parse_error(*line, "level rows must have equal width"));
            }
            for (c, ch) in row.chars().enumerate() {
                let cell = match ch {
                    '#' => Cell::Wall,
                    '.' | '@' => Cell::Empty,
                    'a'..='z' => Cell::Block(ch as u8),
                    'A'..='Z' => Cell::Block(ch.to_ascii_lowercase() as u8),
                    other => return Err(parse_error(*line, format!("unexpected `{other}`"))),
                };
                if ch == '@' || ch.is_ascii_uppercase() {
                    if cursor.is_some() {
                        return Err(parse_error(*line, "more than one cursor"));
                    }
                    cursor = Some((r, c));
                }
                cells.push(cell);
            }
        }
        let level = PuzznicLevel {
            width,
            height: rows.len(),
            cells,
            cursor: cursor.ok_or_else(|| parse_error(rows[0].0, "missing cursor"))?,
            score: 0,
        };
        if !level.is_settled() {
            return Err(DomainError::LevelInvalid("unsettled".into()));
        }
        if !level.match_groups().is_empty() {
            return Err(DomainError::LevelInvalid("initial matches".into()));
        }
        for warning in level.warnings() {
            log::warn!("{warning}");
        }
        Ok(level)
    }

    /// Sanity warnings that do not stop loading, such as an odd pattern count.
    pub fn warnings(&self) -> Vec<String> {
        self.block_counts()
            .into_iter()
            .filter(|&(_, n)| n % 2 == 1)
            .map(|(p, n)| format!("odd pattern count: `{}` occurs {n} times", p as char))
            .collect()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn cursor(&self) -> (usize, usize) {
        self.cursor
    }

    pub fn score(&self) -> u64 {
        self.score
    }

    pub fn cell(&self, r: usize, c: usize) -> Cell {
        self.cells[r * self.width + c]
    }

    fn set(&mut self, r: usize, c: usize, cell: Cell) {
        self.cells[r * self.width + c] = cell;
    }

    pub fn block_counts(&self) -> BTreeMap<u8, usize> {
        let mut counts = BTreeMap::new();
        for cell in &self.cells {
            if let Cell::Block(p) = cell {
                *counts.entry(*p).or_default() += 1;
            }
        }
        counts
    }

    pub fn block_count(&self) -> usize {
        self.cells.iter().filter(|c| matches!(c, Cell::Block(_))).count()
    }

    pub fn patterns(&self) -> BTreeSet<u8> {
        self.block_counts().into_keys().collect()
    }

    pub fn is_cleared(&self) -> bool {
        self.block_count() == 0
    }

    pub fn is_settled(&self) -> bool {
        (0..self.height.saturating_sub(1)).all(|r| {
            (0..self.width).all(|c| {
                !matches!(self.cell(r, c), Cell::Block(_)) || self.cell(r + 1, c) != Cell::Empty
            })
        })
    }

    fn neighbour(&self, (r, c): (usize, usize), a: PuzznicAction) -> Option<(usize, usize)> {
        let to = match a {
            PuzznicAction::CursorUp => (r.checked_sub(1)?, c),
            PuzznicAction::CursorDown => (r + 1, c),
            PuzznicAction::CursorLeft | PuzznicAction::PushLeft => (r, c.checked_sub(1)?),
            PuzznicAction::CursorRight | PuzznicAction::PushRight => (r, c + 1),
        };
        (to.0 < self.height && to.1 < self.width).then_some(to)
    }

    pub fn is_applicable(&self, a: PuzznicAction) -> bool {
        let Some((r, c)) = self.neighbour(self.cursor, a) else {
            return false;
        };
        match a {
            PuzznicAction::PushLeft | PuzznicAction::PushRight => {
                matches!(self.cell(self.cursor.0, self.cursor.1), Cell::Block(_))
                    && self.cell(r, c) == Cell::Empty
            }
            _ => self.cell(r, c) != Cell::Wall,
        }
    }

    pub fn step(&self, a: PuzznicAction) -> Result<PuzznicLevel, DomainError> {
        let mut next = self.clone();
        next.apply(a, &mut |_, _| {})?;
        Ok(next)
    }

    /// Like [`step`](Self::step) but also returns every intermediate grid.
    pub fn step_frames(&self, a: PuzznicAction) -> Result<Vec<(FrameKind, PuzznicLevel)>, DomainError> {
        let mut frames = Vec::new();
        let mut next = self.clone();
        next.apply(a, &mut |kind, level| frames.push((kind, level.clone())))?;
        Ok(frames)
    }

    fn apply(
        &mut self,
        a: PuzznicAction,
        frame: &mut dyn FnMut(FrameKind, &PuzznicLevel),
    ) -> Result<(), DomainError> {
        if !self.is_applicable(a) {
            return Err(DomainError::InapplicableAction(a.name().to_string()));
        }
        let to = self.neighbour(self.cursor, a).expect("checked above");
        match a {
            PuzznicAction::PushLeft | PuzznicAction::PushRight => {
                let block = self.cell(self.cursor.0, self.cursor.1);
                self.set(self.cursor.0, self.cursor.1, Cell::Empty);
                self.set(to.0, to.1, block);
                self.cursor = to;
                frame(FrameKind::Push, self);
                self.settle(frame);
            }
            _ => {
                self.cursor = to;
                frame(FrameKind::Move, self);
            }
        }
        Ok(())
    }

    /// Gravity, then clears, repeated until nothing changes.
    fn settle(&mut self, frame: &mut dyn FnMut(FrameKind, &PuzznicLevel)) {
        let mut wave = 0u32;
        loop {
            if self.apply_gravity() {
                frame(FrameKind::Fall, self);
            }
            let groups = self.match_groups();
            if groups.is_empty() {
                return;
            }
            wave += 1;
            let cleared: usize = groups.iter().map(Vec::len).sum();
            for &(r, c) in groups.iter().flatten() {
                self.set(r, c, Cell::Empty);
            }
            self.score += POINTS_PER_BLOCK * cleared as u64 * u64::from(wave);
            frame(FrameKind::Clear { wave, blocks: cleared }, self);
        }
    }

    /// Drops blocks one cell per pass, scanning rows bottom-up. Returns whether
    /// any block moved.
    fn apply_gravity(&mut self) -> bool {
        let mut any = false;
        loop {
            let mut moved = false;
            for r in (0..self.height.saturating_sub(1)).rev() {
                for c in 0..self.width {
                    if matches!(self.cell(r, c), Cell::Block(_)) && self.cell(r + 1, c) == Cell::Empty {
                        let block = self.cell(r, c);
                        self.set(r + 1, c, block);
                        self.set(r, c, Cell::Empty);
                        moved = true;
                    }
                }
            }
            if !moved {
                return any;
            }
            any = true;
        }
    }

    /// Maximal orthogonally connected same-pattern groups of size two or more.
    fn match_groups(&self) -> Vec<Vec<(usize, usize)>> {
        let mut seen = vec![false; self.cells.len()];
        let mut groups = Vec::new();
        for start in 0..self.cells.len() {
            let Cell::Block(p) = self.cells[start] else {
                continue;
            };
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut group = Vec::new();
            let mut stack = vec![(start / self.width, start % self.width)];
            while let Some((r, c)) = stack.pop() {
                group.push((r, c));
                let around = [
                    (r.wrapping_sub(1), c),
                    (r + 1, c),
                    (r, c.wrapping_sub(1)),
                    (r, c + 1),
                ];
                for (nr, nc) in around {
                    if nr < self.height && nc < self.width {
                        let i = nr * self.width + nc;
                        if !seen[i] && self.cells[i] == Cell::Block(p) {
                            seen[i] = true;
                            stack.push((nr, nc));
                        }
                    }
                }
            }
            if group.len() >= 2 {
                groups.push(group);
            }
        }
        groups
    }
}

impl fmt::Display for PuzznicLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.height {
            for c in 0..self.width {
                let here = (r, c) == self.cursor;
                let ch = match self.cell(r, c) {
                    Cell::Wall => '#',
                    Cell::Empty if here => '@',
                    Cell::Empty => '.',
                    Cell::Block(p) if here => (p as char).to_ascii_uppercase(),
                    Cell::Block(p) => p as char,
                };
                write!(f, "{ch}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// [`PuzznicLevel`] as a [`SimulatorProblem`]. Every action costs 1.
#[derive(Debug, Clone)]
pub struct PuzznicProblem {
    level: PuzznicLevel,
    band_width: u64,
    symbols: Symbols,
    actions: Vec<Action>,
    cursor: Vec<Option<Predicate>>,
    blocks: BTreeMap<u8, Vec<Option<Predicate>>>,
    bands: Vec<Predicate>,
    cleared: Vec<(u8, Predicate)>,
    goals: Vec<Predicate>,
}

impl PuzznicProblem {
    pub fn new(level: PuzznicLevel) -> Self {
        Self::with_band_width(level, DEFAULT_BAND_WIDTH)
    }

    pub fn with_band_width(level: PuzznicLevel, band_width: u64) -> Self {
        assert!(band_width > 0, "score band width must be positive");
        let mut symbols = Symbols::new();
        let open = |r, c| level.cell(r, c) != Cell::Wall;
        let mut cursor = vec![None; level.cells.len()];
        for r in 0..level.height {
            for c in 0..level.width {
                if open(r, c) {
                    cursor[r * level.width + c] = Some(symbols.intern(format!("cursor-{r}-{c}")));
                }
            }
        }
        let mut blocks = BTreeMap::new();
        for p in level.patterns() {
            let mut table = vec![None; level.cells.len()];
            for r in 0..level.height {
                for c in 0..level.width {
                    if open(r, c) {
                        table[r * level.width + c] =
                            Some(symbols.intern(format!("block-{}-{r}-{c}", p as char)));
                    }
                }
            }
            blocks.insert(p, table);
        }
        // Each block clears once, in a wave no later than the number of pairs.
        let n = level.block_count() as u64;
        let max_score = POINTS_PER_BLOCK * n * n.div_ceil(2).max(1);
        let bands = (0..=max_score / band_width)
            .map(|b| symbols.intern(format!("score-band-{b}")))
            .collect();
        let cleared: Vec<(u8, Predicate)> = level
            .patterns()
            .into_iter()
            .map(|p| (p, symbols.intern(format!("cleared-{}", p as char))))
            .collect();
        let goals = cleared.iter().map(|&(_, g)| g).collect();
        PuzznicProblem {
            actions: PuzznicAction::ALL.iter().map(|a| Action::unit(a.name())).collect(),
            level,
            band_width,
            symbols,
            cursor,
            blocks,
            bands,
            cleared,
            goals,
        }
    }

    pub fn parse(text: &str) -> Result<Self, DomainError> {
        PuzznicLevel::parse(text).map(Self::new)
    }

    pub fn level(&self) -> &PuzznicLevel {
        &self.level
    }

    pub fn band_width(&self) -> u64 {
        self.band_width
    }
}

impl SimulatorProblem for PuzznicProblem {
    type World = PuzznicLevel;

    fn symbols(&self) -> &Symbols {
        &self.symbols
    }

    fn actions(&self) -> &[Action] {
        &self.actions
    }

    fn initial(&self) -> PuzznicLevel {
        self.level.clone()
    }

    fn observe(&self, level: &PuzznicLevel) -> State {
        let w = level.width;
        let mut state = State::new();
        state.insert(self.cursor[level.cursor.0 * w + level.cursor.1].expect("cursor on open cell"));
        let mut present = BTreeSet::new();
        for (i, cell) in level.cells.iter().enumerate() {
            if let Cell::Block(p) = cell {
                present.insert(*p);
                state.insert(self.blocks[p][i].expect("blocks sit on open cells"));
            }
        }
        let band = (level.score / self.band_width) as usize;
        state.insert(self.bands[band.min(self.bands.len() - 1)]);
        for &(p, g) in &self.cleared {
            if !present.contains(&p) {
                state.insert(g);
            }
        }
        state
    }

    fn applicable(&self, level: &PuzznicLevel) -> Vec<ActionId> {
        PuzznicAction::ALL
            .iter()
            .enumerate()
            .filter(|(_, &a)| level.is_applicable(a))
            .map(|(i, _)| ActionId(i as u32))
            .collect()
    }

    fn simulate(&self, level: &PuzznicLevel, a: ActionId) -> Option<PuzznicLevel> {
        level.step(*PuzznicAction::ALL.get(a.index())?).ok()
    }

    fn is_goal(&self, level: &PuzznicLevel) -> bool {
        level.is_cleared()
    }

    fn goal_predicates(&self) -> &[Predicate] {
        &self.goals
    }
}
