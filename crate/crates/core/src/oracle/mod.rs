//! Brute-force ground truth, kept independent of the fast engine paths.
//!
//! Nothing here reuses the linear-inclusion shortcuts of [`SemiOrder`]; the
//! oracles only ask "is `p < q`?".

mod adversary;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::arena::Transcript;
use crate::order::{PointId, SemiOrder};
use crate::partition::ChainPartition;

pub use adversary::{
    exhaustive_adversary, exhaustive_adversary_with, AdversaryError, AdversaryResult,
    DEFAULT_NODE_CAP,
};

/// A strict relation on points `0..size()`.
pub trait StrictRelation {
    fn size(&self) -> usize;
    fn less(&self, p: usize, q: usize) -> bool;

    fn incomparable(&self, p: usize, q: usize) -> bool {
        p != q && !self.less(p, q) && !self.less(q, p)
    }
}

impl StrictRelation for SemiOrder {
    fn size(&self) -> usize {
        self.len()
    }

    fn less(&self, p: usize, q: usize) -> bool {
        SemiOrder::less(self, PointId(p), PointId(q))
    }
}

/// Adjacency-matrix relation. Can hold relations that are not semi-orders,
/// e.g. a candidate extension the engine rejected.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseRelation {
    n: usize,
    less: Vec<bool>,
}

impl DenseRelation {
    pub fn new(n: usize) -> Self {
        DenseRelation {
            n,
            less: vec![false; n * n],
        }
    }

    pub fn from_order(order: &SemiOrder) -> Self {
        let mut rel = DenseRelation::new(order.len());
        for p in order.points() {
            for q in order.up_ids(p) {
                rel.set(p.0, q.0);
            }
        }
        rel
    }

    /// `order` plus one new point with exactly the declared relations.
    pub fn with_candidate(order: &SemiOrder, down: &[PointId], up: &[PointId]) -> Self {
        let n = order.len();
        let mut rel = DenseRelation::new(n + 1);
        for p in order.points() {
            for q in order.up_ids(p) {
                rel.set(p.0, q.0);
            }
        }
        for d in down {
            rel.set(d.0, n);
        }
        for u in up {
            rel.set(n, u.0);
        }
        rel
    }

    pub fn set(&mut self, p: usize, q: usize) {
        self.less[p * self.n + q] = true;
    }

    /// Irreflexive and transitive.
    pub fn is_strict_order(&self) -> bool {
        let n = self.n;
        (0..n).all(|p| !self.less(p, p))
            && (0..n).all(|p| {
                (0..n).all(|q| {
                    !self.less(p, q) || (0..n).all(|r| !self.less(q, r) || self.less(p, r))
                })
            })
    }
}

impl StrictRelation for DenseRelation {
    fn size(&self) -> usize {
        self.n
    }

    fn less(&self, p: usize, q: usize) -> bool {
        self.less[p * self.n + q]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatternKind {
    /// `points = [a, b, c, d]` with `a < b`, `c < d`, `a || d`, `c || b`.
    TwoPlusTwo,
    /// `points = [e, f, g, h]` with `e < f < g` and `h` incomparable to all three.
    ThreePlusOne,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PatternWitness {
    pub kind: PatternKind,
    pub points: [PointId; 4],
}

impl PatternWitness {
    /// Re-checks the defining relations on `rel`.
    pub fn holds_in(&self, rel: &impl StrictRelation) -> bool {
        let [x, y, z, t] = self.points.map(|p| p.0);
        match self.kind {
            PatternKind::TwoPlusTwo => {
                rel.less(x, y) && rel.less(z, t) && rel.incomparable(x, t) && rel.incomparable(z, y)
            }
            PatternKind::ThreePlusOne => {
                rel.less(x, y)
                    && rel.less(y, z)
                    && rel.incomparable(t, x)
                    && rel.incomparable(t, y)
                    && rel.incomparable(t, z)
            }
        }
    }
}

/// First forbidden configuration over all ordered 4-tuples of distinct
/// points in lexicographic order; at each tuple (2+2) is tried before (3+1).
pub fn brute_forbidden(rel: &impl StrictRelation) -> Option<PatternWitness> {
    let n = rel.size();
    for a in 0..n {
        for b in 0..n {
            if b == a {
                continue;
            }
            for c in 0..n {
                if c == a || c == b {
                    continue;
                }
                for d in 0..n {
                    if d == a || d == b || d == c {
                        continue;
                    }
                    let points = [a, b, c, d].map(PointId);
                    for kind in [PatternKind::TwoPlusTwo, PatternKind::ThreePlusOne] {
                        let w = PatternWitness { kind, points };
                        if w.holds_in(rel) {
                            return Some(w);
                        }
                    }
                }
            }
        }
    }
    None
}

/// Maximum antichain by subset enumeration. Intended for `n <= 20`.
pub fn brute_width(rel: &impl StrictRelation) -> usize {
    let n = rel.size();
    assert!(
        n <= 24,
        "brute_width enumerates 2^n subsets; n = {n} is too large"
    );
    let comparable: Vec<u32> = (0..n)
        .map(|p| {
            (0..n)
                .filter(|&q| rel.less(p, q) || rel.less(q, p))
                .fold(0u32, |m, q| m | 1 << q)
        })
        .collect();
    let mut antichain = vec![false; 1 << n];
    antichain[0] = true;
    let mut best = 0;
    for mask in 1usize..1 << n {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        if antichain[rest] && comparable[low] & rest as u32 == 0 {
            antichain[mask] = true;
            best = best.max(mask.count_ones() as usize);
        }
    }
    best
}

/// A minimum chain partition via maximum bipartite matching (Kuhn).
///
/// Matching `p -> q` with `p < q` links `p` directly below `q` in a chain;
/// the chain count is `n` minus the matching size.
pub fn min_chain_partition(order: &SemiOrder) -> ChainPartition {
    let n = order.len();
    let succ: Vec<Vec<usize>> = (0..n)
        .map(|p| order.up_ids(PointId(p)).into_iter().map(|q| q.0).collect())
        .collect();
    let mut match_right: Vec<Option<usize>> = vec![None; n];

    fn augment(
        p: usize,
        succ: &[Vec<usize>],
        seen: &mut [bool],
        match_right: &mut [Option<usize>],
    ) -> bool {
        for &q in &succ[p] {
            if seen[q] {
                continue;
            }
            seen[q] = true;
            if match_right[q].is_none_or(|r| augment(r, succ, seen, match_right)) {
                match_right[q] = Some(p);
                return true;
            }
        }
        false
    }

    for p in 0..n {
        let mut seen = vec![false; n];
        augment(p, &succ, &mut seen, &mut match_right);
    }
    let mut next: Vec<Option<usize>> = vec![None; n];
    for (q, p) in match_right.iter().enumerate() {
        if let Some(p) = *p {
            next[p] = Some(q);
        }
    }
    let mut chains = Vec::new();
    for bottom in (0..n).filter(|&q| match_right[q].is_none()) {
        let mut chain = vec![PointId(bottom)];
        let mut cur = bottom;
        while let Some(q) = next[cur] {
            chain.push(PointId(q));
            cur = q;
        }
        chains.push(chain);
    }
    ChainPartition::from_chains(order, chains).expect("matched pairs are comparable")
}

/// Largest `x_0` over all integer vectors `x_0 >= ... >= x_k >= x_{k+1} = 0`
/// (any `k`) with `x_0 + ... + x_{j-1} + 2 x_j - x_{j+1} <= w` for all `j`.
pub fn max_x0(w: u64) -> u64 {
    max_x0_certificate(w).0
}

/// [`max_x0`] together with a vector attaining it (trailing zero included).
/// Each later entry is taken as large as feasibility allows.
pub fn max_x0_certificate(w: u64) -> (u64, Vec<u64>) {
    let mut memo = HashMap::new();
    for x0 in (0..=w).rev() {
        if let Some(xs) = completion(w, 0, x0, &mut memo) {
            return (x0, xs);
        }
    }
    unreachable!("x_0 = 0 is always feasible")
}

// Completes (prefix sum, x_j) to a feasible tail starting with x_j.
fn completion(
    w: u64,
    prefix: u64,
    xj: u64,
    memo: &mut HashMap<(u64, u64), bool>,
) -> Option<Vec<u64>> {
    if !feasible(w, prefix, xj, memo) {
        return None;
    }
    let mut xs = vec![xj];
    let (mut prefix, mut xj) = (prefix, xj);
    while xj > 0 {
        let lo = (prefix + 2 * xj).saturating_sub(w);
        let next = (lo..=xj)
            .rev()
            .find(|&x| feasible(w, prefix + xj, x, memo))
            .expect("feasible state has a successor");
        prefix += xj;
        xj = next;
        xs.push(xj);
    }
    Some(xs)
}

fn feasible(w: u64, prefix: u64, xj: u64, memo: &mut HashMap<(u64, u64), bool>) -> bool {
    // Row j needs x_{j+1} >= prefix + 2 x_j - w, and x_{j+1} <= x_j.
    if prefix + xj > w {
        return false;
    }
    if xj == 0 {
        return prefix <= w;
    }
    if let Some(&known) = memo.get(&(prefix, xj)) {
        return known;
    }
    let lo = (prefix + 2 * xj).saturating_sub(w);
    let ok = lo <= xj && (lo..=xj).any(|x| feasible(w, prefix + xj, x, memo));
    memo.insert((prefix, xj), ok);
    ok
}

/// Chain count against the trivial lower bound of the final order's width.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OnlineCheck {
    pub ok: bool,
    pub chains_used: usize,
    pub width: usize,
}

/// `ok` iff `chains_used >= width`. The transcript is replayed as far as it is
/// legal; the width is computed by matching, not by the engine.
pub fn brute_optimal_online_check(transcript: &Transcript) -> OnlineCheck {
    let (referee, _) = crate::arena::replay_events(transcript);
    let width = min_chain_partition(referee.order()).chain_count();
    OnlineCheck {
        ok: transcript.chains_used >= width,
        chains_used: transcript.chains_used,
        width,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arena::{run_game, GameConfig, Mode};
    use crate::spoiler::{floor_phi_minus_one, game_value, violated_rows};

    fn p(i: usize) -> PointId {
        PointId(i)
    }

    fn relation(n: usize, pairs: &[(usize, usize)]) -> DenseRelation {
        let mut rel = DenseRelation::new(n);
        for &(a, b) in pairs {
            rel.set(a, b);
        }
        rel
    }

    fn five_points() -> SemiOrder {
        let mut o = SemiOrder::new();
        for _ in 0..3 {
            o.add_point(&[], &[]).unwrap();
        }
        o.add_point(&[p(0), p(1)], &[]).unwrap();
        o.add_point(&[p(0), p(1), p(2)], &[]).unwrap();
        o
    }

    #[test]
    fn forbidden_patterns_on_the_patterns_themselves() {
        let three_plus_one = relation(4, &[(0, 1), (1, 2), (0, 2)]);
        assert_eq!(
            brute_forbidden(&three_plus_one),
            Some(PatternWitness {
                kind: PatternKind::ThreePlusOne,
                points: [p(0), p(1), p(2), p(3)]
            })
        );
        let two_plus_two = relation(4, &[(0, 1), (2, 3)]);
        assert_eq!(
            brute_forbidden(&two_plus_two),
            Some(PatternWitness {
                kind: PatternKind::TwoPlusTwo,
                points: [p(0), p(1), p(2), p(3)]
            })
        );
        assert_eq!(brute_forbidden(&five_points()), None);
    }

    #[test]
    fn rejected_candidates_contain_the_reported_pattern() {
        let mut chain = SemiOrder::new();
        chain.add_point(&[], &[]).unwrap();
        chain.add_point(&[p(0)], &[]).unwrap();
        chain.add_point(&[p(0), p(1)], &[]).unwrap();
        let rel = DenseRelation::with_candidate(&chain, &[], &[]);
        let w = brute_forbidden(&rel).unwrap();
        assert_eq!(w.kind, PatternKind::ThreePlusOne);
        assert_eq!(w.points, [p(0), p(1), p(2), p(3)]);

        let mut o = SemiOrder::new();
        o.add_point(&[], &[]).unwrap();
        o.add_point(&[p(0)], &[]).unwrap();
        o.add_point(&[], &[]).unwrap();
        let rel = DenseRelation::with_candidate(&o, &[p(2)], &[]);
        assert_eq!(brute_forbidden(&rel).unwrap().kind, PatternKind::TwoPlusTwo);
    }

    #[test]
    fn widths() {
        let antichain = DenseRelation::new(4);
        assert_eq!(brute_width(&antichain), 4);
        let chain = relation(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        assert_eq!(brute_width(&chain), 1);
        assert_eq!(brute_width(&five_points()), 3);
        assert_eq!(brute_width(&DenseRelation::new(0)), 0);
    }

    #[test]
    fn minimum_partitions() {
        let mut antichain = SemiOrder::new();
        for _ in 0..5 {
            antichain.add_point(&[], &[]).unwrap();
        }
        assert_eq!(min_chain_partition(&antichain).chain_count(), 5);

        let mut chain = SemiOrder::new();
        for i in 0..5 {
            let down: Vec<PointId> = (0..i).map(PointId).collect();
            chain.add_point(&down, &[]).unwrap();
        }
        assert_eq!(
            min_chain_partition(&chain).chains(),
            &[(0..5).map(PointId).collect::<Vec<_>>()]
        );

        let part = min_chain_partition(&five_points());
        assert_eq!(part.chain_count(), 3);
        assert!(part.chains().iter().flatten().count() == 5);
    }

    #[test]
    fn max_x0_examples() {
        assert_eq!(max_x0(1), 0);
        assert_eq!(max_x0_certificate(5), (3, vec![3, 1, 0]));
        assert_eq!(max_x0_certificate(4), (2, vec![2, 1, 0]));
    }

    #[test]
    fn max_x0_meets_the_golden_value() {
        for w in 1..=60u64 {
            let (x0, xs) = max_x0_certificate(w);
            assert_eq!(x0, game_value(w) - w, "w={w}");
            assert_eq!(x0, floor_phi_minus_one(w));
            assert!(violated_rows(&xs, w).is_empty(), "w={w}: {xs:?}");
            assert!(xs.windows(2).all(|p| p[0] >= p[1]));
        }
    }

    #[test]
    fn online_check() {
        let t = run_game(&GameConfig::new(Mode::UpGrowing, 5, "golden", "alg")).unwrap();
        let check = brute_optimal_online_check(&t);
        assert_eq!(
            check,
            OnlineCheck {
                ok: true,
                chains_used: 8,
                width: 5
            }
        );
    }
}
