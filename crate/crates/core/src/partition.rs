//! On-line chain partitions and the algorithms that build them.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::order::{PointId, SemiOrder};

pub type ChainId = usize;

/// Where the Algorithm puts the newest point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainChoice {
    Existing(ChainId),
    New,
}

impl fmt::Display for ChainChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChainChoice::Existing(c) => write!(f, "chain {c}"),
            ChainChoice::New => f.write_str("new chain"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize, Deserialize)]
#[serde(tag = "code", rename_all = "snake_case")]
pub enum PartitionError {
    #[error("{point} cannot join chain {chain}: incomparable to {conflict}")]
    InvalidChain {
        point: PointId,
        chain: ChainId,
        conflict: PointId,
    },
    #[error("chain {chain} does not exist")]
    UnknownChain { chain: ChainId },
    #[error("{point} is already assigned")]
    AlreadyAssigned { point: PointId },
    #[error("{point} is not in the order")]
    UnknownPoint { point: PointId },
}

/// The chain assignment built so far. Chain ids are dense and handed out in
/// creation order; each chain lists its members in increasing order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ChainPartition {
    assignment: Vec<Option<ChainId>>,
    chains: Vec<Vec<PointId>>,
}

impl ChainPartition {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a partition from explicit chains, checking each is totally ordered
    /// and that the chains are disjoint. Members are sorted bottom-up.
    pub fn from_chains(
        order: &SemiOrder,
        chains: Vec<Vec<PointId>>,
    ) -> Result<Self, PartitionError> {
        let mut partition = ChainPartition::new();
        for chain in chains {
            let mut members = chain;
            members.sort_by_key(|&p| order.down_size(p));
            let id = partition.chains.len();
            partition.chains.push(Vec::new());
            for p in members {
                partition.assign(order, p, ChainChoice::Existing(id))?;
            }
        }
        Ok(partition)
    }

    pub fn chain_count(&self) -> usize {
        self.chains.len()
    }

    pub fn chains(&self) -> &[Vec<PointId>] {
        &self.chains
    }

    pub fn chain(&self, c: ChainId) -> &[PointId] {
        &self.chains[c]
    }

    pub fn chain_of(&self, p: PointId) -> Option<ChainId> {
        self.assignment.get(p.0).copied().flatten()
    }

    pub fn top(&self, c: ChainId) -> Option<PointId> {
        self.chains.get(c).and_then(|ch| ch.last().copied())
    }

    pub fn bottom(&self, c: ChainId) -> Option<PointId> {
        self.chains.get(c).and_then(|ch| ch.first().copied())
    }

    pub fn tops(&self) -> impl Iterator<Item = PointId> + '_ {
        self.chains.iter().filter_map(|ch| ch.last().copied())
    }

    pub fn is_top(&self, p: PointId) -> bool {
        self.chain_of(p).and_then(|c| self.top(c)) == Some(p)
    }

    fn position(&self, p: PointId) -> Option<(ChainId, usize)> {
        let c = self.chain_of(p)?;
        let idx = self.chains[c].iter().position(|&q| q == p)?;
        Some((c, idx))
    }

    /// The member directly below `p` in its chain.
    pub fn predecessor(&self, p: PointId) -> Option<PointId> {
        let (c, idx) = self.position(p)?;
        idx.checked_sub(1).map(|i| self.chains[c][i])
    }

    /// The member directly above `p` in its chain.
    pub fn successor(&self, p: PointId) -> Option<PointId> {
        let (c, idx) = self.position(p)?;
        self.chains[c].get(idx + 1).copied()
    }

    fn conflict(&self, order: &SemiOrder, c: ChainId, p: PointId) -> Option<PointId> {
        let members = &self.chains[c];
        if order.up_size(p) == 0 {
            // p is maximal: the chain is valid iff its top is below p.
            let top = *members.last()?;
            return (!order.less(top, p)).then_some(top);
        }
        members.iter().copied().find(|&q| !order.comparable(q, p))
    }

    /// Chains that `p` may extend: those whose members are all comparable to `p`.
    pub fn valid_chains(&self, order: &SemiOrder, p: PointId) -> Vec<ChainId> {
        (0..self.chains.len())
            .filter(|&c| self.conflict(order, c, p).is_none())
            .collect()
    }

    /// Irrevocably assigns `p`. Returns the chain id used.
    pub fn assign(
        &mut self,
        order: &SemiOrder,
        p: PointId,
        choice: ChainChoice,
    ) -> Result<ChainId, PartitionError> {
        if p.0 >= order.len() {
            return Err(PartitionError::UnknownPoint { point: p });
        }
        if self.chain_of(p).is_some() {
            return Err(PartitionError::AlreadyAssigned { point: p });
        }
        let chain = match choice {
            ChainChoice::New => {
                self.chains.push(Vec::new());
                self.chains.len() - 1
            }
            ChainChoice::Existing(c) => {
                if c >= self.chains.len() {
                    return Err(PartitionError::UnknownChain { chain: c });
                }
                if let Some(conflict) = self.conflict(order, c, p) {
                    return Err(PartitionError::InvalidChain {
                        point: p,
                        chain: c,
                        conflict,
                    });
                }
                c
            }
        };
        let members = &mut self.chains[chain];
        let at = members.iter().take_while(|&&q| order.less(q, p)).count();
        members.insert(at, p);
        if self.assignment.len() <= p.0 {
            self.assignment.resize(p.0 + 1, None);
        }
        self.assignment[p.0] = Some(chain);
        Ok(chain)
    }

    /// Undoes the assignment of the most recently assigned point when it is
    /// the top of its chain and its chain is the last one if it was new.
    pub(crate) fn unassign_last(&mut self, p: PointId, chain: ChainId, was_new: bool) {
        self.chains[chain].retain(|&q| q != p);
        if was_new {
            debug_assert!(self.chains[chain].is_empty() && chain + 1 == self.chains.len());
            self.chains.pop();
        }
        self.assignment[p.0] = None;
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize, Deserialize)]
#[serde(tag = "code", rename_all = "snake_case")]
pub enum AlgorithmError {
    #[error("{point} is not maximal; this algorithm only runs on up-growing input")]
    NotMaximal { point: PointId },
}

/// An on-line chain partitioning strategy. Decisions depend only on the
/// visible prefix and the seed, so games replay deterministically.
pub trait OnlineAlgorithm: Send + Sync {
    fn name(&self) -> &str;

    /// Whether the algorithm accepts points that are not maximal.
    fn supports_general(&self) -> bool {
        true
    }

    fn choose(
        &self,
        order: &SemiOrder,
        partition: &ChainPartition,
        p: PointId,
        seed: u64,
    ) -> Result<ChainChoice, AlgorithmError>;
}

/// Greedy up-growing algorithm: among valid chains, take one whose top has
/// the smallest up-set in the current order; ties go to the smallest chain id.
#[derive(Clone, Copy, Debug, Default)]
pub struct Alg;

/// Smallest valid chain id, else a new chain.
#[derive(Clone, Copy, Debug, Default)]
pub struct FirstFit;

/// Uniform over the valid chains plus a new chain. Not greedy.
#[derive(Clone, Copy, Debug, Default)]
pub struct RandomValid;

pub const ALG: &str = "alg";
pub const FIRST_FIT: &str = "first_fit";
pub const RANDOM_VALID: &str = "random_valid";
pub const ALGORITHM_NAMES: [&str; 3] = [ALG, FIRST_FIT, RANDOM_VALID];

pub fn alg_choose(
    order: &SemiOrder,
    partition: &ChainPartition,
    p: PointId,
) -> Result<ChainChoice, AlgorithmError> {
    if !order.is_maximal(p) {
        return Err(AlgorithmError::NotMaximal { point: p });
    }
    // Up-sets are linearly ordered, so the smallest one by size is contained
    // in every other.
    let best = partition
        .valid_chains(order, p)
        .into_iter()
        .map(|c| {
            let top = partition.top(c).expect("valid chains are non-empty");
            (order.up_size(top), c)
        })
        .min();
    Ok(best.map_or(ChainChoice::New, |(_, c)| ChainChoice::Existing(c)))
}

pub fn first_fit_choose(order: &SemiOrder, partition: &ChainPartition, p: PointId) -> ChainChoice {
    partition
        .valid_chains(order, p)
        .first()
        .map_or(ChainChoice::New, |&c| ChainChoice::Existing(c))
}

pub fn random_valid_choose(
    order: &SemiOrder,
    partition: &ChainPartition,
    p: PointId,
    seed: u64,
) -> ChainChoice {
    let valid = partition.valid_chains(order, p);
    let mut rng =
        ChaCha8Rng::seed_from_u64(seed ^ (p.0 as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let pick = rng.random_range(0..=valid.len());
    valid
        .get(pick)
        .map_or(ChainChoice::New, |&c| ChainChoice::Existing(c))
}

impl OnlineAlgorithm for Alg {
    fn name(&self) -> &str {
        ALG
    }

    fn supports_general(&self) -> bool {
        false
    }

    fn choose(
        &self,
        order: &SemiOrder,
        partition: &ChainPartition,
        p: PointId,
        _seed: u64,
    ) -> Result<ChainChoice, AlgorithmError> {
        alg_choose(order, partition, p)
    }
}

impl OnlineAlgorithm for FirstFit {
    fn name(&self) -> &str {
        FIRST_FIT
    }

    fn choose(
        &self,
        order: &SemiOrder,
        partition: &ChainPartition,
        p: PointId,
        _seed: u64,
    ) -> Result<ChainChoice, AlgorithmError> {
        Ok(first_fit_choose(order, partition, p))
    }
}

impl OnlineAlgorithm for RandomValid {
    fn name(&self) -> &str {
        RANDOM_VALID
    }

    fn choose(
        &self,
        order: &SemiOrder,
        partition: &ChainPartition,
        p: PointId,
        seed: u64,
    ) -> Result<ChainChoice, AlgorithmError> {
        Ok(random_valid_choose(order, partition, p, seed))
    }
}

/// Normalizes `first-fit` style spellings to the canonical snake_case name.
pub fn canonical_algorithm_name(name: &str) -> String {
    let name = name.trim().to_ascii_lowercase().replace('-', "_");
    match name.as_str() {
        "random" => RANDOM_VALID.to_string(),
        _ => name,
    }
}

pub fn algorithm_by_name(name: &str) -> Option<Box<dyn OnlineAlgorithm>> {
    match canonical_algorithm_name(name).as_str() {
        ALG => Some(Box::new(Alg)),
        FIRST_FIT => Some(Box::new(FirstFit)),
        RANDOM_VALID => Some(Box::new(RandomValid)),
        _ => None,
    }
}
