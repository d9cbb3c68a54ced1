//! ASCII playback of Puzznic plans.

use std::fmt;

use thiserror::Error;

use crate::domains::puzznic::{FrameKind, PuzznicAction, PuzznicLevel, PuzznicProblem};
use crate::domains::DomainError;
use crate::model::{Plan, SimulatorProblem};

#[derive(Debug, Error)]
#[error("action {index} ({action}): {source}")]
pub struct RenderError {
    /// Zero-based index of the failing action in the plan.
    pub index: usize,
    pub action: String,
    #[source]
    pub source: DomainError,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    /// Index of the action that produced this frame; `None` for the start.
    pub step: Option<usize>,
    pub kind: FrameKind,
    pub level: PuzznicLevel,
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self.kind {
            FrameKind::Initial => "start".to_string(),
            FrameKind::Move => "cursor move".to_string(),
            FrameKind::Push => "push".to_string(),
            FrameKind::Fall => "fall".to_string(),
            FrameKind::Clear { wave, blocks } => format!("clear {blocks} (wave {wave})"),
        };
        match self.step {
            Some(i) => writeln!(f, "[{}] {what}, score {}", i + 1, self.level.score())?,
            None => writeln!(f, "[0] {what}, score {}", self.level.score())?,
        }
        write!(f, "{}", self.level)
    }
}

/// Full playback of a plan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Playback {
    pub frames: Vec<Frame>,
    /// Patterns in the order their last block disappeared.
    pub clear_order: Vec<char>,
}

impl Playback {
    pub fn final_score(&self) -> u64 {
        self.frames.last().map_or(0, |f| f.level.score())
    }
}

impl fmt::Display for Playback {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for frame in &self.frames {
            writeln!(f, "{frame}")?;
        }
        let order: Vec<String> = self.clear_order.iter().map(char::to_string).collect();
        writeln!(
            f,
            "final score {}; clear order: {}",
            self.final_score(),
            if order.is_empty() { "-".to_string() } else { order.join(" < ") }
        )
    }
}

/// One frame for the start, then one per action plus one per fall or clear.
pub fn render_puzznic(problem: &PuzznicProblem, plan: &Plan) -> Result<Playback, RenderError> {
    let mut level = problem.initial();
    let mut frames = vec![Frame {
        step: None,
        kind: FrameKind::Initial,
        level: level.clone(),
    }];
    let mut clear_order = Vec::new();
    for (index, &a) in plan.actions().iter().enumerate() {
        let name = problem.action(a).name().to_string();
        let action = PuzznicAction::from_name(&name).expect("puzznic action names round-trip");
        let before = level.patterns();
        let steps = level.step_frames(action).map_err(|source| RenderError {
            index,
            action: name.clone(),
            source,
        })?;
        for (kind, next) in steps {
            frames.push(Frame {
                step: Some(index),
                kind,
                level: next.clone(),
            });
            level = next;
        }
        let after = level.patterns();
        clear_order.extend(before.difference(&after).map(|&p| p as char));
    }
    Ok(Playback { frames, clear_order })
}
