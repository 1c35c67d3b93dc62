//! On-line chain partitioning of up-growing semi-orders.
//!
//! A Spoiler presents points of a semi-order one at a time; the Algorithm
//! must irrevocably put each point on a chain. With width `w`, the golden
//! Spoiler forces `floor((1 + sqrt 5) / 2 * w)` chains and the greedy
//! algorithm [`partition::Alg`] never uses more.

pub mod arena;
pub mod oracle;
pub mod order;
pub mod partition;
pub mod prooflab;
pub mod spoiler;

pub use arena::{
    replay, run_game, run_game_with, Event, GameConfig, GameSession, HumanRole, Mode, Outcome,
    Referee, RefereeError, Transcript, Verdict,
};
pub use order::{IntervalRepresentation, OrderError, PointId, SemiOrder};
pub use partition::{algorithm_by_name, ChainChoice, ChainId, ChainPartition, OnlineAlgorithm};
pub use spoiler::{game_value, solve_ik, spoiler_by_name, IkSolution, Spoiler, SpoilerMove};
