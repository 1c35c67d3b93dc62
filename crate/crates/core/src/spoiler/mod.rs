//! Spoiler strategies.
//!
//! A strategy is advanced by alternating calls: each call receives the
//! Algorithm's reply to the previous presentation and returns the next move.
//! Strategies may assume a legal opponent; the arena referee enforces legality.

mod doubler;
mod golden;
mod ik;
mod random;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arena::Mode;
use crate::order::{PointId, SemiOrder};
use crate::partition::{ChainId, ChainPartition};

pub use doubler::DoublerSpoiler;
pub use golden::{GoldenSpoiler, PointRole};
pub use ik::{floor_phi_minus_one, game_value, solve_ik, violated_rows, IkSolution};
pub use random::{random_general_presentation, random_upgrowing_presentation, RandomSpoiler};

pub const GOLDEN: &str = "golden";
pub const DOUBLER: &str = "doubler";
pub const RANDOM: &str = "random";
pub const SPOILER_NAMES: [&str; 3] = [GOLDEN, DOUBLER, RANDOM];

/// The Algorithm's answer to the last presented point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Assignment {
    pub point: PointId,
    pub chain: ChainId,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpoilerMove {
    Present {
        down: Vec<PointId>,
        up: Vec<PointId>,
    },
    Done,
}

impl SpoilerMove {
    pub fn present(down: Vec<PointId>) -> Self {
        SpoilerMove::Present {
            down,
            up: Vec::new(),
        }
    }
}

impl fmt::Display for SpoilerMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpoilerMove::Present { down, up } => write!(f, "present(down={down:?}, up={up:?})"),
            SpoilerMove::Done => f.write_str("done"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize, Deserialize)]
#[serde(tag = "code", rename_all = "snake_case")]
pub enum StrategyError {
    #[error(
        "reply does not reference the point just presented (expected {expected:?}, got {got:?})"
    )]
    InconsistentReply {
        expected: Option<PointId>,
        got: Option<Assignment>,
    },
    #[error("forcing path exceeded {cap} points")]
    PathOverflow { cap: usize },
    #[error("strategy invariant broken: {0}")]
    Internal(String),
}

pub trait Spoiler: Send + Sync {
    fn name(&self) -> &str;

    /// Whether the strategy presents points that are not maximal.
    fn requires_general(&self) -> bool {
        false
    }

    fn next(
        &mut self,
        order: &SemiOrder,
        partition: &ChainPartition,
        last: Option<Assignment>,
    ) -> Result<SpoilerMove, StrategyError>;

    fn clone_box(&self) -> Box<dyn Spoiler>;

    /// Exact encoding of everything that determines future moves apart from
    /// the order and the partition. Used as a memoization key.
    fn state_key(&self, out: &mut Vec<u64>);
}

impl Clone for Box<dyn Spoiler> {
    fn clone(&self) -> Self {
        self.clone_box()
    }
}

/// Checks the reply against the point the strategy presented last.
pub(crate) fn check_reply(
    presented: Option<PointId>,
    partition: &ChainPartition,
    last: Option<Assignment>,
) -> Result<(), StrategyError> {
    let ok = match (presented, last) {
        (None, None) => true,
        (Some(p), Some(a)) => a.point == p && partition.chain_of(p) == Some(a.chain),
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        Err(StrategyError::InconsistentReply {
            expected: presented,
            got: last,
        })
    }
}

pub(crate) fn push_ids(out: &mut Vec<u64>, ids: &[PointId]) {
    out.push(ids.len() as u64);
    out.extend(ids.iter().map(|p| p.0 as u64));
}

/// Builds a strategy by name. `points` is the presentation length for `random`.
pub fn spoiler_by_name(
    name: &str,
    mode: Mode,
    w: usize,
    seed: u64,
    points: Option<usize>,
) -> Option<Box<dyn Spoiler>> {
    match name.trim().to_ascii_lowercase().as_str() {
        GOLDEN => Some(Box::new(GoldenSpoiler::new(w as u64))),
        DOUBLER => Some(Box::new(DoublerSpoiler::new(w))),
        RANDOM => {
            let n = points.unwrap_or(10 * w);
            Some(Box::new(RandomSpoiler::new(mode, w, n, seed)))
        }
        _ => None,
    }
}
