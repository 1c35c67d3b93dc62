#![allow(dead_code)]

use chainpart_core::partition::AlgorithmError;
use chainpart_core::{ChainChoice, ChainPartition, OnlineAlgorithm, PointId, SemiOrder};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn down_closure(order: &SemiOrder, seeds: &[PointId]) -> Vec<PointId> {
    let mut set: Vec<PointId> = seeds
        .iter()
        .flat_map(|&p| order.down_ids(p))
        .chain(seeds.iter().copied())
        .collect();
    set.sort_unstable();
    set.dedup();
    set
}

fn up_closure(order: &SemiOrder, seeds: &[PointId]) -> Vec<PointId> {
    let mut set: Vec<PointId> = seeds
        .iter()
        .flat_map(|&p| order.up_ids(p))
        .chain(seeds.iter().copied())
        .collect();
    set.sort_unstable();
    set.dedup();
    set
}

/// A candidate extension. Usually closed (so only the forbidden-pattern
/// checks decide), sometimes raw. `allow_up` permits points below old ones.
pub fn random_candidate(
    order: &SemiOrder,
    rng: &mut impl Rng,
    allow_up: bool,
) -> (Vec<PointId>, Vec<PointId>) {
    let n = order.len();
    let pick = |rng: &mut dyn rand::RngCore, k: usize| -> Vec<PointId> {
        (0..k)
            .filter_map(|_| (n > 0).then(|| PointId(rng.random_range(0..n))))
            .collect()
    };
    let kd = rng.random_range(0..=3);
    let ku = if allow_up { rng.random_range(0..=2) } else { 0 };
    let mut down = pick(rng, kd);
    let mut up = pick(rng, ku);
    if rng.random_bool(0.85) {
        down = down_closure(order, &down);
        up = up_closure(order, &up);
    } else {
        down.sort_unstable();
        down.dedup();
        up.sort_unstable();
        up.dedup();
    }
    (down, up)
}

/// Grows a semi-order by accepted random candidates.
pub fn random_order(n: usize, rng: &mut impl Rng, allow_up: bool) -> SemiOrder {
    let mut order = SemiOrder::new();
    let mut tries = 0;
    while order.len() < n && tries < 50 * n + 50 {
        tries += 1;
        let (down, up) = random_candidate(&order, rng, allow_up);
        let _ = order.add_point(&down, &up);
    }
    order
}

/// Greedy with random tie-breaking: a uniformly random valid chain, a new
/// chain only when none is valid.
pub struct GreedyRandom;

impl OnlineAlgorithm for GreedyRandom {
    fn name(&self) -> &str {
        "greedy_random"
    }

    fn choose(
        &self,
        order: &SemiOrder,
        partition: &ChainPartition,
        p: PointId,
        seed: u64,
    ) -> Result<ChainChoice, AlgorithmError> {
        let valid = partition.valid_chains(order, p);
        let mut r = rng(seed ^ (p.0 as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        Ok(valid
            .choose(&mut r)
            .map_or(ChainChoice::New, |&c| ChainChoice::Existing(c)))
    }
}
