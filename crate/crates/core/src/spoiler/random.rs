//! Seeded random semi-order presentations, built from integer unit intervals.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{check_reply, Assignment, Spoiler, SpoilerMove, StrategyError, RANDOM};
use crate::arena::Mode;
use crate::order::{PointId, SemiOrder};
use crate::partition::ChainPartition;

/// Interval length in integer units. Intervals are closed; `p < q` iff
/// `l(p) + LEN < l(q)`.
const LEN: i64 = 8;

/// Whether adding `[l, l + LEN]` keeps every overlap at most `w`, given that
/// `lefts` already does. Only depths inside the new interval change, and the
/// deepest point there is `l` or another left endpoint.
fn fits(lefts: &[i64], l: i64, w: usize) -> bool {
    std::iter::once(l)
        .chain(lefts.iter().copied().filter(|&x| l <= x && x <= l + LEN))
        .all(|x| 1 + lefts.iter().filter(|&&y| y <= x && x <= y + LEN).count() <= w)
}

fn relations(lefts: &[i64], order: &[usize]) -> Vec<(Vec<PointId>, Vec<PointId>)> {
    // order[t] is the interval presented at step t; ids are presentation steps.
    (0..order.len())
        .map(|t| {
            let me = lefts[order[t]];
            let mut down = Vec::new();
            let mut up = Vec::new();
            for (s, &iv) in order[..t].iter().enumerate() {
                let other = lefts[iv];
                if other + LEN < me {
                    down.push(PointId(s));
                } else if me + LEN < other {
                    up.push(PointId(s));
                }
            }
            (down, up)
        })
        .collect()
}

/// `n` points, each maximal on arrival, width at most `w`.
pub fn random_upgrowing_presentation(
    n: usize,
    w: usize,
    seed: u64,
) -> Vec<(Vec<PointId>, Vec<PointId>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lefts: Vec<i64> = Vec::with_capacity(n);
    // Per-instance drift makes some orders tall and some wide.
    let drift = rng.random_range(0..=2 * LEN);
    for _ in 0..n {
        let max = lefts.iter().copied().max().unwrap_or(0);
        // Maximal on arrival: no earlier interval lies entirely to the right.
        let mut l = max - LEN + rng.random_range(0..=LEN + drift);
        while !fits(&lefts, l, w.max(1)) {
            l += 1;
        }
        lefts.push(l);
    }
    let order: Vec<usize> = (0..n).collect();
    relations(&lefts, &order)
}

/// `n` points in random presentation order (not necessarily up-growing), width at most `w`.
pub fn random_general_presentation(
    n: usize,
    w: usize,
    seed: u64,
) -> Vec<(Vec<PointId>, Vec<PointId>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let span = rng.random_range(LEN..=LEN * (n as i64).max(2));
    let mut lefts: Vec<i64> = Vec::with_capacity(n);
    for _ in 0..n {
        let mut l = rng.random_range(0..=span);
        while !fits(&lefts, l, w.max(1)) {
            l += 1;
        }
        lefts.push(l);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    relations(&lefts, &order)
}

/// Replays a pre-generated random presentation, ignoring the Algorithm's replies.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RandomSpoiler {
    moves: Vec<(Vec<PointId>, Vec<PointId>)>,
    next: usize,
}

impl RandomSpoiler {
    pub fn new(mode: Mode, w: usize, n_target: usize, seed: u64) -> Self {
        let moves = match mode {
            Mode::UpGrowing => random_upgrowing_presentation(n_target, w, seed),
            Mode::General => random_general_presentation(n_target, w, seed),
        };
        RandomSpoiler { moves, next: 0 }
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }
}

impl Spoiler for RandomSpoiler {
    fn name(&self) -> &str {
        RANDOM
    }

    fn requires_general(&self) -> bool {
        self.moves.iter().any(|(_, up)| !up.is_empty())
    }

    fn next(
        &mut self,
        _order: &SemiOrder,
        partition: &ChainPartition,
        last: Option<Assignment>,
    ) -> Result<SpoilerMove, StrategyError> {
        let presented = self.next.checked_sub(1).map(PointId);
        let presented = presented.filter(|_| self.next <= self.moves.len());
        check_reply(presented, partition, last)?;
        match self.moves.get(self.next) {
            Some((down, up)) => {
                self.next += 1;
                Ok(SpoilerMove::Present {
                    down: down.clone(),
                    up: up.clone(),
                })
            }
            None => {
                self.next = self.moves.len() + 1;
                Ok(SpoilerMove::Done)
            }
        }
    }

    fn clone_box(&self) -> Box<dyn Spoiler> {
        Box::new(self.clone())
    }

    fn state_key(&self, out: &mut Vec<u64>) {
        out.push(self.next as u64);
        out.push(self.moves.len() as u64);
    }
}
