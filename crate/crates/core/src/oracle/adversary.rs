//! Game-tree minimum over every legal Algorithm.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arena::Mode;
use crate::order::SemiOrder;
use crate::partition::{ChainChoice, ChainPartition};
use crate::spoiler::{spoiler_by_name, Assignment, Spoiler, SpoilerMove, StrategyError};

pub const DEFAULT_NODE_CAP: u64 = 100_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum AdversaryError {
    #[error("search visited more than {cap} nodes")]
    BudgetExceeded { cap: u64 },
    #[error("unknown strategy {name:?}")]
    UnknownStrategy { name: String },
    #[error("{strategy} cannot play in {mode} mode")]
    ModeMismatch { strategy: String, mode: Mode },
    #[error("spoiler made an illegal move after {points} points: {reason}")]
    IllegalSpoilerMove { points: usize, reason: String },
    #[error(transparent)]
    Strategy(#[from] StrategyError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdversaryResult {
    /// Fewest chains any Algorithm can end with.
    pub min_chains: usize,
    /// Search nodes visited.
    pub nodes: u64,
    /// Distinct memoized states.
    pub states: usize,
}

/// Minimum final chain count over all legal Algorithm reply sequences
/// against the named Spoiler, under the default node cap.
pub fn exhaustive_adversary(spoiler: &str, w: usize, mode: Mode) -> Result<usize, AdversaryError> {
    let strategy = spoiler_by_name(spoiler, mode, w, 0, None).ok_or_else(|| {
        AdversaryError::UnknownStrategy {
            name: spoiler.to_string(),
        }
    })?;
    Ok(exhaustive_adversary_with(strategy, w, mode, DEFAULT_NODE_CAP)?.min_chains)
}

pub fn exhaustive_adversary_with(
    spoiler: Box<dyn Spoiler>,
    w: usize,
    mode: Mode,
    node_cap: u64,
) -> Result<AdversaryResult, AdversaryError> {
    if mode == Mode::UpGrowing && spoiler.requires_general() {
        return Err(AdversaryError::ModeMismatch {
            strategy: spoiler.name().to_string(),
            mode,
        });
    }
    let mut search = Search {
        mode,
        w,
        cap: node_cap,
        nodes: 0,
        memo: HashMap::new(),
    };
    let mut order = SemiOrder::new();
    let mut partition = ChainPartition::new();
    let min_chains = search.visit(spoiler.as_ref(), &mut order, &mut partition, None)?;
    Ok(AdversaryResult {
        min_chains,
        nodes: search.nodes,
        states: search.memo.len(),
    })
}

struct Search {
    mode: Mode,
    w: usize,
    cap: u64,
    nodes: u64,
    memo: HashMap<Vec<u64>, usize>,
}

impl Search {
    // In up-growing mode a new point may only extend a chain through its top,
    // so the set of tops (plus the order) decides the future; chain labels
    // and interior members do not. General mode keys on the full partition.
    fn key(
        &self,
        spoiler: &dyn Spoiler,
        order: &SemiOrder,
        partition: &ChainPartition,
        last: Option<Assignment>,
    ) -> Vec<u64> {
        let mut key = Vec::new();
        spoiler.state_key(&mut key);
        key.push(last.map_or(u64::MAX, |a| a.point.0 as u64));
        for p in order.points() {
            let down = order.down(p);
            key.push(down.count_ones(..) as u64);
            key.extend(down.ones().map(|q| q as u64));
        }
        match self.mode {
            Mode::UpGrowing => {
                let mut tops: Vec<u64> = partition.tops().map(|p| p.0 as u64).collect();
                tops.sort_unstable();
                key.push(tops.len() as u64);
                key.extend(tops);
            }
            Mode::General => {
                for chain in partition.chains() {
                    key.push(chain.len() as u64);
                    key.extend(chain.iter().map(|p| p.0 as u64));
                }
            }
        }
        key
    }

    fn visit(
        &mut self,
        spoiler: &dyn Spoiler,
        order: &mut SemiOrder,
        partition: &mut ChainPartition,
        last: Option<Assignment>,
    ) -> Result<usize, AdversaryError> {
        self.nodes += 1;
        if self.nodes > self.cap {
            return Err(AdversaryError::BudgetExceeded { cap: self.cap });
        }
        let key = self.key(spoiler, order, partition, last);
        if let Some(&known) = self.memo.get(&key) {
            return Ok(known);
        }
        let mut next = spoiler.clone_box();
        let (down, up) = match next.next(order, partition, last)? {
            SpoilerMove::Done => {
                let chains = partition.chain_count();
                self.memo.insert(key, chains);
                return Ok(chains);
            }
            SpoilerMove::Present { down, up } => (down, up),
        };
        let points = order.len();
        let illegal = |reason: String| AdversaryError::IllegalSpoilerMove { points, reason };
        if self.mode == Mode::UpGrowing && !up.is_empty() {
            return Err(illegal(
                "point below earlier points in up-growing mode".to_string(),
            ));
        }
        let p = order
            .add_point(&down, &up)
            .map_err(|e| illegal(e.to_string()))?;
        if order.width() > self.w {
            order.pop();
            return Err(illegal(format!("width exceeds {}", self.w)));
        }

        let mut choices: Vec<ChainChoice> = partition
            .valid_chains(order, p)
            .into_iter()
            .map(ChainChoice::Existing)
            .collect();
        choices.push(ChainChoice::New);
        let mut best = usize::MAX;
        let mut outcome = Ok(());
        for choice in choices {
            let chain = partition.assign(order, p, choice).expect("valid chain");
            let result = self.visit(
                next.as_ref(),
                order,
                partition,
                Some(Assignment { point: p, chain }),
            );
            partition.unassign_last(p, chain, choice == ChainChoice::New);
            match result {
                Ok(v) => best = best.min(v),
                Err(e) => {
                    outcome = Err(e);
                    break;
                }
            }
        }
        order.pop();
        outcome?;
        self.memo.insert(key, best);
        Ok(best)
    }
}
