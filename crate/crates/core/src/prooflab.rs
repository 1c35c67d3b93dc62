//! Instance checks for the upper-bound argument behind [`Alg`](crate::partition::Alg).
//!
//! From a finished up-growing game this module rebuilds the layer
//! decomposition, the alternating paths between ALG's chains and a fixed
//! optimal partition, and the path counts `x_U, x_0, x_1, ...`. Each structural
//! statement the argument relies on is then evaluated on the instance. A
//! failing check on a legal ALG game means a bug here or in the engine.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arena::{replay_events, Event, Mode, Transcript};
use crate::oracle::min_chain_partition;
use crate::order::{PointId, SemiOrder};
use crate::partition::{ChainChoice, ChainPartition};
use crate::spoiler::{floor_phi_minus_one, violated_rows};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ProofLabError {
    #[error("only up-growing games can be analyzed")]
    NotUpGrowing,
    #[error("transcript does not replay cleanly at event {event_index}: {message}")]
    Faulty { event_index: usize, message: String },
    #[error("a point is presented but never assigned")]
    Unfinished,
}

/// Layers `D_1..D_m` cut out by the significant points `e_1..e_{m-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerDecomposition {
    pub significant: Vec<PointId>,
    /// `layers[i - 1]` is `D_i`, members in id order.
    pub layers: Vec<Vec<PointId>>,
    /// 1-based layer index of every point.
    pub layer_of: Vec<usize>,
}

impl LayerDecomposition {
    pub fn m(&self) -> usize {
        self.layers.len()
    }

    pub fn layer(&self, i: usize) -> &[PointId] {
        &self.layers[i - 1]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathKind {
    UpPath,
    DownPath,
}

/// `q_0` is an ALG-chain bottom; odd steps go to the optimal predecessor,
/// even steps to the ALG successor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlternatingPath {
    pub points: Vec<PointId>,
    pub kind: PathKind,
}

impl AlternatingPath {
    pub fn end(&self) -> PointId {
        *self.points.last().expect("paths are non-empty")
    }

    pub fn up_points(&self) -> impl Iterator<Item = PointId> + '_ {
        self.points.iter().copied().step_by(2)
    }

    pub fn down_points(&self) -> impl Iterator<Item = PointId> + '_ {
        self.points.iter().copied().skip(1).step_by(2)
    }

    /// Second-to-last point.
    pub fn penultimate(&self) -> Option<PointId> {
        self.points.len().checked_sub(2).map(|i| self.points[i])
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathStatistics {
    pub x_u: usize,
    /// Layers holding at least one down-path end, increasing (`i_0 < ... < i_s`).
    pub end_layers: Vec<usize>,
    /// `x_j` = down-paths ending in layers `>= i_j`, with the trailing `x_{s+1} = 0`.
    pub xs: Vec<u64>,
}

impl PathStatistics {
    pub fn x0(&self) -> u64 {
        self.xs[0]
    }
}

/// Everything derived from one game.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub transcript: Transcript,
    pub order: SemiOrder,
    pub alg: ChainPartition,
    pub opt: ChainPartition,
    pub layers: LayerDecomposition,
    pub paths: Vec<AlternatingPath>,
    pub stats: PathStatistics,
    /// `good[p]`: the optimal predecessor of `p` exists and was an ALG-top when `p` arrived.
    pub good: Vec<bool>,
    /// Per existing-chain assignment: (point, chosen top, tops of all valid chains).
    choices: Vec<(PointId, PointId, Vec<PointId>)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub witness: Vec<PointId>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn push(&mut self, name: &str, failure: Option<(String, Vec<PointId>)>) {
        let (passed, detail, witness) = match failure {
            None => (true, None, Vec::new()),
            Some((detail, witness)) => (false, Some(detail), witness),
        };
        self.checks.push(Check {
            name: name.to_string(),
            passed,
            detail,
            witness,
        });
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }
}

fn replayed(transcript: &Transcript) -> Result<(SemiOrder, ChainPartition), ProofLabError> {
    if transcript.config.mode != Mode::UpGrowing {
        return Err(ProofLabError::NotUpGrowing);
    }
    let (referee, fault) = replay_events(transcript);
    if let Some((_, fault)) = fault {
        return Err(ProofLabError::Faulty {
            event_index: fault.event_index,
            message: fault.message,
        });
    }
    if referee.pending().is_some() {
        return Err(ProofLabError::Unfinished);
    }
    Ok((referee.order().clone(), referee.partition().clone()))
}

// `q` was maximal just before `p` arrived.
fn maximal_before(order: &SemiOrder, q: PointId, p: PointId) -> bool {
    order.up(q).ones().all(|r| r >= p.0)
}

/// Points whose declared down-set contains a point that was maximal on arrival,
/// in presentation order.
pub fn significant_points(transcript: &Transcript) -> Result<Vec<PointId>, ProofLabError> {
    let (order, _) = replayed(transcript)?;
    Ok(significant_in(&order))
}

fn significant_in(order: &SemiOrder) -> Vec<PointId> {
    order
        .points()
        .filter(|&p| {
            order
                .down(p)
                .ones()
                .any(|q| maximal_before(order, PointId(q), p))
        })
        .collect()
}

pub fn layers(transcript: &Transcript) -> Result<LayerDecomposition, ProofLabError> {
    let (order, _) = replayed(transcript)?;
    Ok(layers_in(&order))
}

fn layers_in(order: &SemiOrder) -> LayerDecomposition {
    let significant = significant_in(order);
    let n = order.len();
    let m = significant.len() + 1;
    let mut layer_of = vec![0; n];
    // Down-sets of successive significant points grow, so the first one
    // containing p fixes its layer.
    for p in order.points() {
        layer_of[p.0] = significant
            .iter()
            .position(|&e| order.less(p, e))
            .map_or(m, |i| i + 1);
    }
    let mut layers = vec![Vec::new(); m];
    for p in order.points() {
        layers[layer_of[p.0] - 1].push(p);
    }
    LayerDecomposition {
        significant,
        layers,
        layer_of,
    }
}

/// One path per ALG chain, in chain-id order.
pub fn alternating_paths(alg: &ChainPartition, opt: &ChainPartition) -> Vec<AlternatingPath> {
    let limit = 2 * alg.chains().iter().map(Vec::len).sum::<usize>() + 2;
    alg.chains()
        .iter()
        .map(|chain| {
            let mut points = vec![chain[0]];
            loop {
                let last = *points.last().expect("non-empty");
                let next = if points.len() % 2 == 1 {
                    opt.predecessor(last)
                } else {
                    alg.successor(last)
                };
                // Same-parity points are distinct, so a legal path is shorter than
                // twice the point count; the cap only stops a broken input.
                match next {
                    Some(q) if points.len() < limit => points.push(q),
                    _ => break,
                }
            }
            let kind = if points.len() % 2 == 1 {
                PathKind::UpPath
            } else {
                PathKind::DownPath
            };
            AlternatingPath { points, kind }
        })
        .collect()
}

pub fn path_statistics(layers: &LayerDecomposition, paths: &[AlternatingPath]) -> PathStatistics {
    let x_u = paths.iter().filter(|p| p.kind == PathKind::UpPath).count();
    let ends: Vec<usize> = paths
        .iter()
        .filter(|p| p.kind == PathKind::DownPath)
        .map(|p| layers.layer_of[p.end().0])
        .collect();
    let mut end_layers = ends.clone();
    end_layers.sort_unstable();
    end_layers.dedup();
    let mut xs: Vec<u64> = end_layers
        .iter()
        .map(|&i| ends.iter().filter(|&&l| l >= i).count() as u64)
        .collect();
    xs.push(0);
    PathStatistics {
        x_u,
        end_layers,
        xs,
    }
}

/// Analyzes the game cut at its last new chain: the argument assumes the final
/// point opens a chain, and a Spoiler could always have stopped there.
pub fn analyze(transcript: &Transcript) -> Result<Analysis, ProofLabError> {
    analyze_exact(&transcript.truncated_to_last_new_chain())
}

/// Analyzes the transcript as given, without truncation.
pub fn analyze_exact(transcript: &Transcript) -> Result<Analysis, ProofLabError> {
    let (order, alg) = replayed(transcript)?;
    let opt = min_chain_partition(&order);
    let layers = layers_in(&order);
    let paths = alternating_paths(&alg, &opt);
    let stats = path_statistics(&layers, &paths);

    // Second replay for time-indexed invariants: ALG-tops when a point arrives.
    let mut good = vec![false; order.len()];
    let mut choices = Vec::new();
    let mut part = ChainPartition::new();
    for event in &transcript.events {
        match event {
            Event::Present { id, .. } => {
                good[id.0] = opt.predecessor(*id).is_some_and(|q| part.is_top(q));
            }
            Event::Assign { id, chain } => {
                if *chain < part.chain_count() {
                    let top = part.top(*chain).expect("chains are non-empty");
                    let valid: Vec<PointId> = part.tops().filter(|&t| order.less(t, *id)).collect();
                    choices.push((*id, top, valid));
                }
                let choice = if *chain == part.chain_count() {
                    ChainChoice::New
                } else {
                    ChainChoice::Existing(*chain)
                };
                part.assign(&order, *id, choice)
                    .expect("transcript already replayed");
            }
        }
    }
    Ok(Analysis {
        transcript: transcript.clone(),
        order,
        alg,
        opt,
        layers,
        paths,
        stats,
        good,
        choices,
    })
}

fn first_failure<T>(
    items: impl IntoIterator<Item = T>,
    fail: impl FnMut(T) -> Option<(String, Vec<PointId>)>,
) -> Option<(String, Vec<PointId>)> {
    items.into_iter().find_map(fail)
}

fn ids(v: &[PointId]) -> String {
    v.iter()
        .map(|p| p.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

/// Evaluates each structural statement on the analyzed game.
pub fn check_invariants(a: &Analysis) -> Report {
    let order = &a.order;
    let lay = &a.layers;
    let m = lay.m();
    let layer = |p: PointId| lay.layer_of[p.0];
    let below_layers = |p: PointId, i: usize| order.down(p).ones().all(|q| lay.layer_of[q] <= i);
    let all: Vec<PointId> = order.points().collect();
    let mut r = Report::default();

    // Up-sets strictly shrink from layer to layer.
    r.push(
        "layer_up_nesting",
        first_failure(
            all.iter().flat_map(|&p| all.iter().map(move |&q| (p, q))),
            |(p, q)| {
                (layer(p) < layer(q)
                    && !(order.up(q).is_subset(order.up(p)) && order.up_size(q) < order.up_size(p)))
                .then(|| {
                    (
                        format!("up({q}) is not strictly inside up({p})"),
                        vec![p, q],
                    )
                })
            },
        ),
    );

    let maximal = order.maximal_points();
    r.push(
        "last_layer_maximal",
        (lay.layer(m) != maximal.as_slice()).then(|| {
            (
                format!(
                    "last layer [{}] but maximal points [{}]",
                    ids(lay.layer(m)),
                    ids(&maximal)
                ),
                Vec::new(),
            )
        }),
    );

    r.push(
        "layers_antichain",
        first_failure(1..=m, |i| comparable_pair(order, lay.layer(i))),
    );

    // A point above a layer-i point sits above all lower layers.
    r.push(
        "layer_down_packing",
        first_failure(
            all.iter().flat_map(|&d| all.iter().map(move |&p| (d, p))),
            |(d, p)| {
                (order.less(d, p)
                    && all
                        .iter()
                        .any(|&x| layer(x) < layer(d) && !order.less(x, p)))
                .then(|| {
                    (
                        format!("{p} is above {d} but misses a lower layer"),
                        vec![d, p],
                    )
                })
            },
        ),
    );

    // A point not above a layer-i point has its down-set in layers up to i.
    r.push(
        "layer_down_containment",
        first_failure(
            all.iter().flat_map(|&d| all.iter().map(move |&p| (d, p))),
            |(d, p)| {
                (!order.less(d, p) && !below_layers(p, layer(d))).then(|| {
                    (
                        format!(
                            "{p} is not above {d} yet its down-set reaches past layer {}",
                            layer(d)
                        ),
                        vec![d, p],
                    )
                })
            },
        ),
    );

    // Points presented before a layer-i point have down-sets in lower layers.
    r.push(
        "earlier_down_containment",
        first_failure(
            all.iter().flat_map(|&d| all.iter().map(move |&p| (d, p))),
            |(d, p)| {
                (p < d && !below_layers(p, layer(d) - 1)).then(|| {
                    (
                        format!(
                            "{p} precedes {d} but its down-set reaches layer {}",
                            layer(d)
                        ),
                        vec![d, p],
                    )
                })
            },
        ),
    );

    // ALG never takes a top from a lower layer than another valid top.
    r.push(
        "alg_layer_preference",
        first_failure(&a.choices, |(x, top, valid)| {
            valid.iter().find(|&&t| layer(t) > layer(*top)).map(|&t| {
                (
                    format!("{x} went onto the chain of {top} (layer {}) while {t} (layer {}) was valid", layer(*top), layer(t)),
                    vec![*x, *top, t],
                )
            })
        }),
    );

    r.push("path_parity_distinct", parity_failure(&a.paths));

    let down_paths: Vec<&AlternatingPath> = a
        .paths
        .iter()
        .filter(|p| p.kind == PathKind::DownPath)
        .collect();
    let end_layers = &a.stats.end_layers;
    let is_alg_top = |p: PointId| a.alg.is_top(p);

    r.push(
        "alg_top_in_end_layers",
        first_failure(end_layers, |&i| {
            (!lay.layer(i).iter().any(|&p| is_alg_top(p)))
                .then(|| (format!("layer {i} holds no ALG-top"), Vec::new()))
        }),
    );

    r.push(
        "middle_layers_antichain",
        end_layers.first().and_then(|&i0| {
            let middle: Vec<PointId> = all
                .iter()
                .copied()
                .filter(|&p| layer(p) > i0 && layer(p) < m)
                .collect();
            comparable_pair(order, &middle)
        }),
    );

    r.push(
        "penultimate_good",
        first_failure(&down_paths, |q| {
            let pen = q.penultimate().expect("down-paths have two points");
            (!a.good[pen.0] || layer(pen) != m).then(|| {
                (
                    format!(
                        "penultimate {pen} good={} layer={}",
                        a.good[pen.0],
                        layer(pen)
                    ),
                    q.points.clone(),
                )
            })
        }),
    );

    let o_minus = |u: PointId| a.opt.predecessor(u);
    r.push(
        "bad_up_points",
        first_failure(&down_paths, |q| {
            let j = end_layers
                .iter()
                .position(|&i| i == layer(q.end()))
                .expect("end layer listed");
            first_failure(&end_layers[..=j], |&ik| {
                let found = q
                    .up_points()
                    .any(|y| !a.good[y.0] && o_minus(y).is_some_and(|o| layer(o) == ik));
                (!found).then(|| {
                    (
                        format!("no bad up-point with predecessor in layer {ik}"),
                        q.points.clone(),
                    )
                })
            })
        }),
    );

    r.push(
        "injection_witness",
        end_layers.first().and_then(|&i0| {
            first_failure(end_layers, |&ij| {
                first_failure(&down_paths, |q| {
                    let found = q.up_points().any(|u| match o_minus(u) {
                        None => false,
                        Some(o) => {
                            (layer(u) > ij && layer(o) == i0)
                                || (a.good[u.0] && layer(o) > i0 && layer(o) < ij)
                        }
                    });
                    (!found).then(|| {
                        (
                            format!("no qualifying up-point for layer {ij}"),
                            q.points.clone(),
                        )
                    })
                })
            })
        }),
    );

    let w = a.transcript.config.w;
    r.push(
        "up_paths_bounded",
        (a.stats.x_u > w || a.stats.x_u > a.opt.chain_count()).then(|| {
            (
                format!(
                    "{} up-paths, width budget {w}, optimal {}",
                    a.stats.x_u,
                    a.opt.chain_count()
                ),
                Vec::new(),
            )
        }),
    );

    let chains = a.alg.chain_count();
    let counted = a.stats.x_u as u64 + a.stats.x0();
    r.push(
        "chain_count_identity",
        (counted != chains as u64).then(|| {
            (
                format!("x_U + x_0 = {counted} but ALG used {chains} chains"),
                Vec::new(),
            )
        }),
    );
    r
}

fn comparable_pair(order: &SemiOrder, set: &[PointId]) -> Option<(String, Vec<PointId>)> {
    set.iter().find_map(|&p| {
        set.iter()
            .find(|&&q| order.less(p, q))
            .map(|&q| (format!("{p} < {q}"), vec![p, q]))
    })
}

fn parity_failure(paths: &[AlternatingPath]) -> Option<(String, Vec<PointId>)> {
    let mut seen: HashSet<(PointId, bool)> = HashSet::new();
    for (c, path) in paths.iter().enumerate() {
        for (i, &p) in path.points.iter().enumerate() {
            if !seen.insert((p, i % 2 == 1)) {
                let parity = if i % 2 == 1 { "odd" } else { "even" };
                return Some((
                    format!("{p} appears twice at {parity} positions (second time in path {c})"),
                    vec![p],
                ));
            }
        }
    }
    None
}

/// The counting inequalities on `x_0, x_1, ...` and the resulting cap on `x_0`.
pub fn check_bounds(stats: &PathStatistics, w: usize) -> Report {
    let w = w as u64;
    let xs = &stats.xs;
    let mut r = Report::default();
    let bad = violated_rows(xs, w);
    let row = |j: usize| -> Option<(String, Vec<PointId>)> {
        bad.contains(&j).then(|| {
            let prefix: u64 = xs[..j].iter().sum();
            let lhs = prefix + 2 * xs[j] - xs.get(j + 1).copied().unwrap_or(0);
            (format!("row {j}: {lhs} > {w} for x = {xs:?}"), Vec::new())
        })
    };
    r.push("first_row", row(0));
    r.push(
        "later_rows",
        first_failure(1..xs.len().saturating_sub(1), row),
    );
    let cap = floor_phi_minus_one(w);
    r.push(
        "x0_golden_cap",
        (stats.x0() > cap).then(|| (format!("x_0 = {} exceeds {cap}", stats.x0()), Vec::new())),
    );
    r
}

/// Both reports for one game, as emitted by the command line.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FullReport {
    pub chains_used: usize,
    pub w: usize,
    pub significant: Vec<PointId>,
    pub layer_count: usize,
    pub stats: PathStatistics,
    pub invariants: Report,
    pub bounds: Report,
}

impl FullReport {
    pub fn passed(&self) -> bool {
        self.invariants.passed() && self.bounds.passed()
    }
}

pub fn full_report(transcript: &Transcript) -> Result<FullReport, ProofLabError> {
    let a = analyze(transcript)?;
    Ok(FullReport {
        chains_used: a.alg.chain_count(),
        w: a.transcript.config.w,
        significant: a.layers.significant.clone(),
        layer_count: a.layers.m(),
        stats: a.stats.clone(),
        invariants: check_invariants(&a),
        bounds: check_bounds(&a.stats, a.transcript.config.w),
    })
}
