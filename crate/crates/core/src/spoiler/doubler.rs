//! General-mode Spoiler forcing `2w - 1` chains.
//!
//! Two antichains `A < B` of size `w` come first. If the Algorithm shares
//! `k >= 2` chains between them, points `x_1..x_{k-1}` with
//! `{a_1..a_i} < x_i < {b_{i+1}..b_k}` (incomparable to everything else)
//! each need a fresh chain.

use super::{check_reply, push_ids, Assignment, Spoiler, SpoilerMove, StrategyError, DOUBLER};
use crate::order::{PointId, SemiOrder};
use crate::partition::ChainPartition;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DoublerSpoiler {
    w: usize,
    a: Vec<PointId>,
    b: Vec<PointId>,
    pairs: Option<Vec<(PointId, PointId)>>,
    emitted: usize,
    presented: Option<PointId>,
    done: bool,
}

impl DoublerSpoiler {
    pub fn new(w: usize) -> Self {
        DoublerSpoiler {
            w,
            a: Vec::new(),
            b: Vec::new(),
            pairs: None,
            emitted: 0,
            presented: None,
            done: false,
        }
    }

    /// Shared-chain pairs `(a_i, b_i)` in increasing chain-id order, once known.
    pub fn pairs(&self) -> Option<&[(PointId, PointId)]> {
        self.pairs.as_deref()
    }

    fn emit(&mut self, order: &SemiOrder, down: Vec<PointId>, up: Vec<PointId>) -> SpoilerMove {
        self.presented = Some(PointId(order.len()));
        SpoilerMove::Present { down, up }
    }

    fn finish(&mut self) -> SpoilerMove {
        self.done = true;
        self.presented = None;
        SpoilerMove::Done
    }
}

impl Spoiler for DoublerSpoiler {
    fn name(&self) -> &str {
        DOUBLER
    }

    fn requires_general(&self) -> bool {
        true
    }

    fn next(
        &mut self,
        order: &SemiOrder,
        partition: &ChainPartition,
        last: Option<Assignment>,
    ) -> Result<SpoilerMove, StrategyError> {
        check_reply(self.presented, partition, last)?;
        if self.done {
            return Ok(SpoilerMove::Done);
        }
        if self.a.len() < self.w {
            self.a.push(PointId(order.len()));
            return Ok(self.emit(order, Vec::new(), Vec::new()));
        }
        if self.b.len() < self.w {
            self.b.push(PointId(order.len()));
            let down = self.a.clone();
            return Ok(self.emit(order, down, Vec::new()));
        }
        if self.pairs.is_none() {
            if partition.chain_count() + 1 >= 2 * self.w {
                return Ok(self.finish());
            }
            let mut pairs = Vec::new();
            for chain in partition.chains() {
                let a = chain.iter().find(|p| self.a.contains(p));
                let b = chain.iter().find(|p| self.b.contains(p));
                if let (Some(&a), Some(&b)) = (a, b) {
                    pairs.push((a, b));
                }
            }
            if pairs.len() < 2 {
                return Err(StrategyError::Internal(format!(
                    "{} chains used but only {} shared between A and B",
                    partition.chain_count(),
                    pairs.len()
                )));
            }
            self.pairs = Some(pairs);
        }
        let pairs = self.pairs.as_ref().expect("pairs computed");
        let k = pairs.len();
        if self.emitted + 1 >= k {
            return Ok(self.finish());
        }
        self.emitted += 1;
        let i = self.emitted;
        let mut down: Vec<PointId> = pairs[..i].iter().map(|&(a, _)| a).collect();
        let mut up: Vec<PointId> = pairs[i..].iter().map(|&(_, b)| b).collect();
        down.sort_unstable();
        up.sort_unstable();
        Ok(self.emit(order, down, up))
    }

    fn clone_box(&self) -> Box<dyn Spoiler> {
        Box::new(self.clone())
    }

    fn state_key(&self, out: &mut Vec<u64>) {
        out.push(self.emitted as u64);
        out.push(u64::from(self.done));
        out.push(self.presented.map_or(u64::MAX, |p| p.0 as u64));
        push_ids(out, &self.a);
        push_ids(out, &self.b);
        match &self.pairs {
            None => out.push(u64::MAX),
            Some(pairs) => {
                out.push(pairs.len() as u64);
                for &(a, b) in pairs {
                    out.push(a.0 as u64);
                    out.push(b.0 as u64);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::{first_fit_choose, ChainChoice};

    fn run(
        w: usize,
        reply: impl Fn(&SemiOrder, &ChainPartition, PointId) -> ChainChoice,
    ) -> (SemiOrder, ChainPartition) {
        let mut s = DoublerSpoiler::new(w);
        let mut order = SemiOrder::new();
        let mut part = ChainPartition::new();
        let mut last = None;
        while let SpoilerMove::Present { down, up } = s.next(&order, &part, last).unwrap() {
            let x = order.add_point(&down, &up).unwrap();
            let chain = part.assign(&order, x, reply(&order, &part, x)).unwrap();
            last = Some(Assignment { point: x, chain });
        }
        (order, part)
    }

    #[test]
    fn width_one_stops_after_the_two_antichains() {
        let (order, part) = run(1, first_fit_choose);
        assert_eq!(order.len(), 2);
        assert_eq!(part.chain_count(), 1);
    }

    #[test]
    fn width_two_against_first_fit_forces_three() {
        let (order, part) = run(2, first_fit_choose);
        assert_eq!(order.len(), 5);
        let x = PointId(4);
        assert_eq!(order.down_ids(x), vec![PointId(0)]);
        assert_eq!(order.up_ids(x), vec![PointId(3)]);
        assert_eq!(part.chain_count(), 3);
    }

    #[test]
    fn early_exit_when_b_gets_new_chains() {
        let (order, part) = run(2, |o, p, x| {
            if x.0 >= 2 {
                ChainChoice::New
            } else {
                first_fit_choose(o, p, x)
            }
        });
        assert_eq!(order.len(), 4);
        assert_eq!(part.chain_count(), 4);
    }

    #[test]
    fn first_fit_pays_two_w_minus_one() {
        for w in 1..=12 {
            let (order, part) = run(w, first_fit_choose);
            assert_eq!(part.chain_count(), 2 * w - 1, "w={w}");
            assert_eq!(order.width(), w);
        }
    }
}
