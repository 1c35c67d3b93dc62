//! The golden-ratio Spoiler for up-growing semi-orders.
//!
//! The presentation runs `A, C_0, B_1, C_1, ..., C_k, B_{k+1}`: an antichain
//! `A` of size `w`, then per phase `j` a number of forcing paths (the `C_j`
//! points) followed by the bundle `B_{j+1}` whose points share a down-set
//! inside `A`. Against any Algorithm it forces `w + x_0` chains.

use serde::{Deserialize, Serialize};

use super::{
    check_reply, push_ids, solve_ik, Assignment, IkSolution, Spoiler, SpoilerMove, StrategyError,
    GOLDEN,
};
use crate::order::{PointId, SemiOrder};
use crate::partition::ChainPartition;

/// What part of the construction a presented point belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointRole {
    /// Minimal antichain.
    A,
    /// Bundle `B_i`, `i >= 1`.
    B(usize),
    /// Forcing-path point of phase `j`; `start` marks the first point of its path.
    C { phase: usize, start: bool },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Stage {
    Antichain,
    Paths { phase: usize, left: u64 },
    Bundle { phase: usize, left: u64 },
    Done,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct OpenPath {
    len: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GoldenSpoiler {
    solution: IkSolution,
    roles: Vec<PointRole>,
    a: Vec<PointId>,
    /// `bundles[i - 1]` is `B_i`.
    bundles: Vec<Vec<PointId>>,
    /// `bundle_down[i - 1]` is the common down-set of `B_i` (defined even for empty bundles).
    bundle_down: Vec<Vec<PointId>>,
    /// `d[i - 1]` is `D_i`.
    d: Vec<Vec<PointId>>,
    /// `skip[j]` is `A_j`: bottoms in `A` of chains extended by a path of phase `j`.
    skip: Vec<Vec<PointId>>,
    stage: Stage,
    path: Option<OpenPath>,
    presented: Option<PointId>,
}

impl GoldenSpoiler {
    pub fn new(w: u64) -> Self {
        Self::with_solution(solve_ik(w))
    }

    /// Runs the construction for any feasible monotone solution vector.
    pub fn with_solution(solution: IkSolution) -> Self {
        let phases = solution.k().map_or(0, |k| k + 1);
        GoldenSpoiler {
            roles: Vec::new(),
            a: Vec::new(),
            bundles: Vec::new(),
            bundle_down: Vec::new(),
            d: vec![Vec::new(); phases.saturating_sub(1)],
            skip: vec![Vec::new(); phases],
            stage: Stage::Antichain,
            path: None,
            presented: None,
            solution,
        }
    }

    pub fn solution(&self) -> &IkSolution {
        &self.solution
    }

    pub fn roles(&self) -> &[PointRole] {
        &self.roles
    }

    pub fn antichain(&self) -> &[PointId] {
        &self.a
    }

    /// `B_i` for `i >= 1`.
    pub fn bundle(&self, i: usize) -> &[PointId] {
        self.bundles.get(i - 1).map_or(&[], Vec::as_slice)
    }

    /// Common down-set of `B_i`; empty for `i = 0`.
    pub fn bundle_down(&self, i: usize) -> &[PointId] {
        if i == 0 {
            return &[];
        }
        self.bundle_down.get(i - 1).map_or(&[], Vec::as_slice)
    }

    /// `D_i` for `i >= 1`.
    pub fn d_set(&self, i: usize) -> &[PointId] {
        self.d.get(i - 1).map_or(&[], Vec::as_slice)
    }

    /// `A_j`.
    pub fn skip_bottoms(&self, j: usize) -> &[PointId] {
        self.skip.get(j).map_or(&[], Vec::as_slice)
    }

    pub fn is_done(&self) -> bool {
        self.stage == Stage::Done
    }

    fn w(&self) -> usize {
        self.solution.w as usize
    }

    fn path_cap(&self) -> usize {
        self.solution.k().unwrap_or(0) + 2
    }

    /// `A ∪ B_1 ∪ ... ∪ B_upto` plus `extra`, sorted.
    fn dominated(&self, upto: usize, extra: &[PointId]) -> Vec<PointId> {
        let mut down: Vec<PointId> = self.a.clone();
        for bundle in self.bundles.iter().take(upto) {
            down.extend_from_slice(bundle);
        }
        down.extend_from_slice(extra);
        down.sort_unstable();
        down
    }

    fn emit(&mut self, order: &SemiOrder, role: PointRole, down: Vec<PointId>) -> SpoilerMove {
        let id = PointId(order.len());
        debug_assert_eq!(id.0, self.roles.len());
        self.roles.push(role);
        self.presented = Some(id);
        match role {
            PointRole::A => self.a.push(id),
            PointRole::B(i) => self.bundles[i - 1].push(id),
            PointRole::C { .. } => {}
        }
        SpoilerMove::present(down)
    }

    /// Handles the reply to a path point. Returns the next path point, or
    /// `None` when the path has ended.
    fn continue_path(
        &mut self,
        order: &SemiOrder,
        partition: &ChainPartition,
        q: PointId,
    ) -> Result<Option<SpoilerMove>, StrategyError> {
        let Stage::Paths { phase, .. } = self.stage else {
            return Err(StrategyError::Internal(
                "path reply outside a path phase".into(),
            ));
        };
        let Some(top) = partition.predecessor(q) else {
            return Ok(None);
        };
        match self.roles.get(top.0).copied() {
            Some(PointRole::A) => {
                self.skip[phase].push(top);
                Ok(None)
            }
            Some(PointRole::B(s)) => {
                let path = self.path.as_mut().expect("open path");
                path.len += 1;
                if path.len > self.path_cap() {
                    return Err(StrategyError::PathOverflow {
                        cap: self.path_cap(),
                    });
                }
                let ds = &mut self.d[s - 1];
                if !ds.contains(&top) {
                    ds.push(top);
                    ds.sort_unstable();
                }
                let down = self.dominated(s - 1, &self.d[s - 1].clone());
                Ok(Some(self.emit(
                    order,
                    PointRole::C {
                        phase,
                        start: false,
                    },
                    down,
                )))
            }
            other => Err(StrategyError::Internal(format!(
                "path point {q} extended {top} with role {other:?}"
            ))),
        }
    }

    /// Down-set shared by `B_{phase+1}`: contains `A_phase ∪ B_phase↓`, topped
    /// up with the lowest-id remaining points of `A` to size `x_0 - x_{phase+1}`.
    fn next_bundle_down(&self, phase: usize) -> Result<Vec<PointId>, StrategyError> {
        let target = (self.solution.x0() - self.solution.x(phase + 1)) as usize;
        let mut down: Vec<PointId> = self.bundle_down(phase).to_vec();
        for &a in &self.skip[phase] {
            if !down.contains(&a) {
                down.push(a);
            }
        }
        if down.len() > target {
            return Err(StrategyError::Internal(format!(
                "bundle {} needs {} points below but only {} allowed",
                phase + 1,
                down.len(),
                target
            )));
        }
        for &a in &self.a {
            if down.len() == target {
                break;
            }
            if !down.contains(&a) {
                down.push(a);
            }
        }
        down.sort_unstable();
        Ok(down)
    }
}

impl Spoiler for GoldenSpoiler {
    fn name(&self) -> &str {
        GOLDEN
    }

    fn next(
        &mut self,
        order: &SemiOrder,
        partition: &ChainPartition,
        last: Option<Assignment>,
    ) -> Result<SpoilerMove, StrategyError> {
        check_reply(self.presented, partition, last)?;
        if order.len() != self.roles.len() {
            return Err(StrategyError::Internal(format!(
                "order has {} points but {} were presented",
                order.len(),
                self.roles.len()
            )));
        }

        if self.path.is_some() {
            let q = self.presented.expect("a path point was presented");
            if let Some(mv) = self.continue_path(order, partition, q)? {
                return Ok(mv);
            }
            self.path = None;
            if let Stage::Paths { left, .. } = &mut self.stage {
                *left -= 1;
            }
        }

        loop {
            match self.stage.clone() {
                Stage::Antichain => {
                    if self.a.len() < self.w() {
                        return Ok(self.emit(order, PointRole::A, Vec::new()));
                    }
                    self.stage = match self.solution.k() {
                        None => Stage::Done,
                        Some(_) => Stage::Paths {
                            phase: 0,
                            left: self.solution.x(0) - self.solution.x(1),
                        },
                    };
                }
                Stage::Paths { phase, left } => {
                    if left > 0 {
                        self.path = Some(OpenPath { len: 1 });
                        let down = self.dominated(phase, &[]);
                        return Ok(self.emit(order, PointRole::C { phase, start: true }, down));
                    }
                    let down = self.next_bundle_down(phase)?;
                    self.bundles.push(Vec::new());
                    self.bundle_down.push(down);
                    self.stage = Stage::Bundle {
                        phase,
                        left: self.solution.x(phase) - self.solution.x(phase + 1),
                    };
                }
                Stage::Bundle { phase, left } => {
                    if left > 0 {
                        self.stage = Stage::Bundle {
                            phase,
                            left: left - 1,
                        };
                        let down = self.bundle_down[phase].clone();
                        return Ok(self.emit(order, PointRole::B(phase + 1), down));
                    }
                    let k = self.solution.k().expect("phases exist");
                    self.stage = if phase == k {
                        Stage::Done
                    } else {
                        Stage::Paths {
                            phase: phase + 1,
                            left: self.solution.x(phase + 1) - self.solution.x(phase + 2),
                        }
                    };
                }
                Stage::Done => {
                    self.presented = None;
                    return Ok(SpoilerMove::Done);
                }
            }
        }
    }

    fn clone_box(&self) -> Box<dyn Spoiler> {
        Box::new(self.clone())
    }

    fn state_key(&self, out: &mut Vec<u64>) {
        let stage = match self.stage {
            Stage::Antichain => [0, 0, 0],
            Stage::Paths { phase, left } => [1, phase as u64, left],
            Stage::Bundle { phase, left } => [2, phase as u64, left],
            Stage::Done => [3, 0, 0],
        };
        out.extend_from_slice(&stage);
        out.push(self.path.as_ref().map_or(0, |p| p.len as u64 + 1));
        out.push(self.presented.map_or(u64::MAX, |p| p.0 as u64));
        for set in self
            .d
            .iter()
            .chain(&self.skip)
            .chain(&self.bundles)
            .chain(&self.bundle_down)
        {
            push_ids(out, set);
        }
    }
}
