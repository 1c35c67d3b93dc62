//! Incremental semi-order storage.
//!
//! Points arrive one at a time together with their complete strict down-set
//! and up-set. Every insertion is checked against the semi-order axioms and
//! the order is only mutated when all checks pass.

use std::fmt;

use fixedbitset::FixedBitSet;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Dense point identifier: the i-th presented point has id `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PointId(pub usize);

impl PointId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for PointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p{}", self.0)
    }
}

impl From<usize> for PointId {
    fn from(i: usize) -> Self {
        PointId(i)
    }
}

/// Reasons an insertion is refused.
///
/// Pattern witnesses use the role order of the forbidden configuration:
/// `TwoPlusTwo { a, b, c, d }` has `a < b`, `c < d`, `a || d`, `c || b`;
/// `ThreePlusOne { e, f, g, h }` has `e < f < g` with `h` incomparable to all three.
/// The new point carries the id it would have received.
#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize, Deserialize)]
#[serde(tag = "code", rename_all = "snake_case")]
pub enum OrderError {
    #[error("unknown point {point}")]
    UnknownPoint { point: PointId },
    #[error("{point} is declared both below and above the new point")]
    DownUpOverlap { point: PointId },
    #[error("down-set is not downward closed: {missing} < {point} is missing")]
    NotDownwardClosed { point: PointId, missing: PointId },
    #[error("up-set is not upward closed: {point} < {missing} is missing")]
    NotUpwardClosed { point: PointId, missing: PointId },
    #[error("declared relations are not transitive: {below} < new < {above} but {below} is not below {above}")]
    NotTransitive { below: PointId, above: PointId },
    #[error("(2+2) configuration {a} < {b}, {c} < {d}")]
    TwoPlusTwo {
        a: PointId,
        b: PointId,
        c: PointId,
        d: PointId,
    },
    #[error("(3+1) configuration {e} < {f} < {g} with {h} incomparable")]
    ThreePlusOne {
        e: PointId,
        f: PointId,
        g: PointId,
        h: PointId,
    },
}

impl OrderError {
    /// snake_case name used on the wire.
    pub fn code(&self) -> &'static str {
        match self {
            OrderError::UnknownPoint { .. } => "unknown_point",
            OrderError::DownUpOverlap { .. } => "down_up_overlap",
            OrderError::NotDownwardClosed { .. } => "not_downward_closed",
            OrderError::NotUpwardClosed { .. } => "not_upward_closed",
            OrderError::NotTransitive { .. } => "not_transitive",
            OrderError::TwoPlusTwo { .. } => "two_plus_two",
            OrderError::ThreePlusOne { .. } => "three_plus_one",
        }
    }
}

/// Raised by [`SemiOrder::interval_representation`] only if the engine is broken.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("difference constraints are infeasible; the stored order is not a semi-order")]
pub struct InternalInfeasible;

/// An on-line semi-order. Relations are strict; reflexivity is never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SemiOrder {
    down: Vec<FixedBitSet>,
    up: Vec<FixedBitSet>,
    down_len: Vec<usize>,
    up_len: Vec<usize>,
}

fn to_set(ids: &[PointId], n: usize) -> Result<FixedBitSet, OrderError> {
    let mut set = FixedBitSet::with_capacity(n);
    for &id in ids {
        if id.0 >= n {
            return Err(OrderError::UnknownPoint { point: id });
        }
        set.insert(id.0);
    }
    Ok(set)
}

fn ids(set: &FixedBitSet) -> impl Iterator<Item = PointId> + '_ {
    set.ones().map(PointId)
}

impl SemiOrder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.down.len()
    }

    pub fn is_empty(&self) -> bool {
        self.down.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = PointId> {
        (0..self.len()).map(PointId)
    }

    /// Strict down-set of `p`.
    pub fn down(&self, p: PointId) -> &FixedBitSet {
        &self.down[p.0]
    }

    /// Strict up-set of `p`.
    pub fn up(&self, p: PointId) -> &FixedBitSet {
        &self.up[p.0]
    }

    pub fn down_ids(&self, p: PointId) -> Vec<PointId> {
        ids(&self.down[p.0]).collect()
    }

    pub fn up_ids(&self, p: PointId) -> Vec<PointId> {
        ids(&self.up[p.0]).collect()
    }

    pub fn down_size(&self, p: PointId) -> usize {
        self.down_len[p.0]
    }

    pub fn up_size(&self, p: PointId) -> usize {
        self.up_len[p.0]
    }

    /// `p < q`.
    #[inline]
    pub fn less(&self, p: PointId, q: PointId) -> bool {
        self.down[q.0].contains(p.0)
    }

    #[inline]
    pub fn comparable(&self, p: PointId, q: PointId) -> bool {
        self.less(p, q) || self.less(q, p)
    }

    #[inline]
    pub fn incomparable(&self, p: PointId, q: PointId) -> bool {
        p != q && !self.comparable(p, q)
    }

    /// Appends a point with exactly the declared strict relations.
    ///
    /// The declared sets must already be closed; nothing is inferred.
    pub fn add_point(&mut self, down: &[PointId], up: &[PointId]) -> Result<PointId, OrderError> {
        let n = self.len();
        let new = PointId(n);
        let down_set = to_set(down, n)?;
        let up_set = to_set(up, n)?;

        if let Some(p) = down_set.intersection(&up_set).next() {
            return Err(OrderError::DownUpOverlap { point: PointId(p) });
        }
        for q in down_set.ones() {
            if let Some(missing) = self.down[q].difference(&down_set).next() {
                return Err(OrderError::NotDownwardClosed {
                    point: PointId(q),
                    missing: PointId(missing),
                });
            }
        }
        for u in up_set.ones() {
            if let Some(missing) = self.up[u].difference(&up_set).next() {
                return Err(OrderError::NotUpwardClosed {
                    point: PointId(u),
                    missing: PointId(missing),
                });
            }
            if let Some(below) = down_set.difference(&self.down[u]).next() {
                return Err(OrderError::NotTransitive {
                    below: PointId(below),
                    above: PointId(u),
                });
            }
        }

        self.check_two_plus_two(&down_set, &up_set, new)?;
        self.check_three_plus_one(&down_set, &up_set, new)?;

        let cap = n + 1;
        for set in self.down.iter_mut().chain(self.up.iter_mut()) {
            set.grow(cap);
        }
        for d in down_set.ones() {
            self.up[d].insert(n);
            self.up_len[d] += 1;
        }
        for u in up_set.ones() {
            self.down[u].insert(n);
            self.down_len[u] += 1;
        }
        let (mut down_set, mut up_set) = (down_set, up_set);
        down_set.grow(cap);
        up_set.grow(cap);
        self.down_len.push(down_set.count_ones(..));
        self.up_len.push(up_set.count_ones(..));
        self.down.push(down_set);
        self.up.push(up_set);
        Ok(new)
    }

    /// Removes the most recent point. Used by the referee to roll back a
    /// tentatively accepted move.
    pub(crate) fn pop(&mut self) -> Option<PointId> {
        let last = self.len().checked_sub(1)?;
        let down = self.down.pop().expect("non-empty");
        let up = self.up.pop().expect("non-empty");
        self.down_len.pop();
        self.up_len.pop();
        for d in down.ones() {
            self.up[d].set(last, false);
            self.up_len[d] -= 1;
        }
        for u in up.ones() {
            self.down[u].set(last, false);
            self.down_len[u] -= 1;
        }
        Some(PointId(last))
    }

    // Down-sets of the extended order must be linearly ordered by inclusion.
    // Only the new point's set and the sets of its declared upper points change.
    fn check_two_plus_two(
        &self,
        down_set: &FixedBitSet,
        up_set: &FixedBitSet,
        new: PointId,
    ) -> Result<(), OrderError> {
        let n = self.len();
        let mut patched: Vec<Option<FixedBitSet>> = vec![None; n];
        for u in up_set.ones() {
            let mut s = self.down[u].clone();
            s.grow(n + 1);
            s.insert(n);
            patched[u] = Some(s);
        }
        let get = |i: usize| -> &FixedBitSet {
            if i == n {
                down_set
            } else {
                patched[i].as_ref().unwrap_or(&self.down[i])
            }
        };
        let mut by_size: Vec<(usize, usize)> = (0..=n)
            .map(|i| {
                let len = if i == n {
                    down_set.count_ones(..)
                } else if up_set.contains(i) {
                    self.down_len[i] + 1
                } else {
                    self.down_len[i]
                };
                (len, i)
            })
            .collect();
        by_size.sort_unstable();
        for pair in by_size.windows(2) {
            let (p, q) = (pair[0].1, pair[1].1);
            let (sp, sq) = (get(p), get(q));
            if !sp.is_subset(sq) {
                // a < p with a || q, c < q with c || p
                let a = sp.difference(sq).next().expect("not a subset");
                let c = sq.difference(sp).next().unwrap_or_else(|| {
                    unreachable!("equal-size sets with one not contained in the other")
                });
                let id = |i: usize| if i == n { new } else { PointId(i) };
                return Err(OrderError::TwoPlusTwo {
                    a: id(a),
                    b: id(p),
                    c: id(c),
                    d: id(q),
                });
            }
        }
        Ok(())
    }

    // For an interval order, a (3+1) exists iff some h, f have
    // down(h) strictly inside down(f) and up(h) strictly inside up(f).
    // Down-sets and up-sets are linear, so sizes decide inclusion.
    fn check_three_plus_one(
        &self,
        down_set: &FixedBitSet,
        up_set: &FixedBitSet,
        new: PointId,
    ) -> Result<(), OrderError> {
        let n = self.len();
        let dsize = |i: usize| {
            if i == n {
                down_set.count_ones(..)
            } else {
                self.down_len[i] + usize::from(up_set.contains(i))
            }
        };
        let usz = |i: usize| {
            if i == n {
                up_set.count_ones(..)
            } else {
                self.up_len[i] + usize::from(down_set.contains(i))
            }
        };
        let mut by_down: Vec<(usize, usize, usize)> =
            (0..=n).map(|i| (dsize(i), usz(i), i)).collect();
        by_down.sort_unstable();

        let mut best: Option<(usize, usize)> = None; // (up size, id) minimum among strictly smaller down sizes
        let mut group_start = 0;
        while group_start < by_down.len() {
            let size = by_down[group_start].0;
            let mut group_end = group_start;
            while group_end < by_down.len() && by_down[group_end].0 == size {
                group_end += 1;
            }
            if let Some((h_up, h)) = best {
                for &(_, f_up, f) in &by_down[group_start..group_end] {
                    if h_up < f_up {
                        return Err(self.three_plus_one_witness(h, f, down_set, up_set, new));
                    }
                }
            }
            for &(_, u, i) in &by_down[group_start..group_end] {
                if best.is_none_or(|(b, _)| u < b) {
                    best = Some((u, i));
                }
            }
            group_start = group_end;
        }
        Ok(())
    }

    fn three_plus_one_witness(
        &self,
        h: usize,
        f: usize,
        down_set: &FixedBitSet,
        up_set: &FixedBitSet,
        new: PointId,
    ) -> OrderError {
        let n = self.len();
        let id = |i: usize| if i == n { new } else { PointId(i) };
        let below = |i: usize, x: usize| -> bool {
            // x < i in the extended order
            if i == n {
                down_set.contains(x)
            } else if x == n {
                up_set.contains(i)
            } else {
                self.down[i].contains(x)
            }
        };
        let e = (0..=n)
            .find(|&x| below(f, x) && !below(h, x))
            .expect("down(h) strictly inside down(f)");
        let g = (0..=n)
            .find(|&x| below(x, f) && !below(x, h))
            .expect("up(h) strictly inside up(f)");
        OrderError::ThreePlusOne {
            e: id(e),
            f: id(f),
            g: id(g),
            h: id(h),
        }
    }

    /// Size of a maximum antichain.
    ///
    /// For each `p`, the points whose down-set is contained in `down(p)` and
    /// which are not below `p` form an antichain, and every antichain is
    /// contained in one of these (take its member with the largest down-set).
    /// Linearity of down-sets turns containment into a size comparison.
    pub fn width(&self) -> usize {
        let mut sizes = self.down_len.clone();
        sizes.sort_unstable();
        let mut best = 0;
        let mut i = 0;
        while i < sizes.len() {
            let mut j = i;
            while j < sizes.len() && sizes[j] == sizes[i] {
                j += 1;
            }
            best = best.max(j - sizes[i]);
            i = j;
        }
        best
    }

    pub fn incomparables(&self, p: PointId) -> Vec<PointId> {
        self.points().filter(|&q| self.incomparable(p, q)).collect()
    }

    pub fn maximal_points(&self) -> Vec<PointId> {
        self.points().filter(|&p| self.up_len[p.0] == 0).collect()
    }

    pub fn is_maximal(&self, p: PointId) -> bool {
        self.up_len[p.0] == 0
    }

    /// Unit interval representation with exact rational left endpoints.
    ///
    /// Solves `l(q) - l(p) >= 1 + eps` for `p < q` and `|l(p) - l(q)| <= 1`
    /// for incomparable pairs with `eps = 1/(n+1)` by Bellman-Ford relaxation,
    /// working in integer units of `eps`. The result is shifted so the
    /// smallest endpoint is zero.
    pub fn interval_representation(&self) -> Result<IntervalRepresentation, InternalInfeasible> {
        let n = self.len();
        if n == 0 {
            return Ok(IntervalRepresentation { left: Vec::new() });
        }
        let unit = (n + 1) as i64;
        let mut dist = vec![0i64; n];
        // Sweeping in order of down-set size converges in few passes.
        let mut sweep: Vec<usize> = (0..n).collect();
        sweep.sort_by_key(|&i| (self.down_len[i], i));

        let mut converged = false;
        for _ in 0..=n {
            let mut changed = false;
            for &v in &sweep {
                for u in 0..n {
                    if u == v {
                        continue;
                    }
                    // Edge u -> v encodes dist[v] <= dist[u] + weight.
                    let weight = if self.down[u].contains(v) {
                        -(unit + 1)
                    } else if self.down[v].contains(u) {
                        continue;
                    } else {
                        unit
                    };
                    let cand = dist[u] + weight;
                    if cand < dist[v] {
                        dist[v] = cand;
                        changed = true;
                    }
                }
            }
            if !changed {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(InternalInfeasible);
        }
        let min = *dist.iter().min().expect("non-empty");
        let left = dist
            .into_iter()
            .map(|d| Ratio::new(d - min, unit))
            .collect();
        Ok(IntervalRepresentation { left })
    }
}

/// Left endpoints of unit intervals `[l, l+1]`; touching intervals are incomparable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalRepresentation {
    pub left: Vec<Ratio<i64>>,
}

impl IntervalRepresentation {
    /// `p < q` in the represented order.
    pub fn less(&self, p: PointId, q: PointId) -> bool {
        self.left[p.0] + 1 < self.left[q.0]
    }

    /// Rebuilds the order relation as per-point down-sets.
    pub fn down_sets(&self) -> Vec<Vec<PointId>> {
        let n = self.left.len();
        (0..n)
            .map(|q| {
                (0..n)
                    .map(PointId)
                    .filter(|&p| self.less(p, PointId(q)))
                    .collect()
            })
            .collect()
    }
}
