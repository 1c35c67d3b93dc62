//! Exact golden-ratio arithmetic and the integer inequality system driving
//! the golden Spoiler.
//!
//! For integer `w` the system asks for `x_0 >= x_1 >= ... >= x_k > x_{k+1} = 0`
//! with `x_0 + ... + x_{j-1} + 2 x_j - x_{j+1} <= w` for every `j` in `0..=k`.

use num_integer::Roots;
use serde::{Deserialize, Serialize};

/// `floor(phi * w)` with `phi = (1 + sqrt 5) / 2`, computed without floats.
pub fn game_value(w: u64) -> u64 {
    (w + (5 * w * w).sqrt()) / 2
}

/// `floor((phi - 1) * z)`.
pub fn floor_phi_minus_one(z: u64) -> u64 {
    ((5 * z * z).sqrt() - z) / 2
}

/// A solution vector `(x_0, ..., x_k, x_{k+1} = 0)` for width budget `w`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IkSolution {
    pub w: u64,
    pub xs: Vec<u64>,
}

impl IkSolution {
    /// Index of the last non-zero entry, or `None` for the degenerate `(0)`.
    pub fn k(&self) -> Option<usize> {
        self.xs.len().checked_sub(2)
    }

    pub fn x0(&self) -> u64 {
        self.xs[0]
    }

    /// `x_j`, with zero past the end.
    pub fn x(&self, j: usize) -> u64 {
        self.xs.get(j).copied().unwrap_or(0)
    }

    /// Every violated inequality index `j` (left side exceeds `w`).
    pub fn violations(&self) -> Vec<usize> {
        violated_rows(&self.xs, self.w)
    }

    /// Monotone shape: non-increasing, strictly positive before the final zero.
    pub fn is_well_shaped(&self) -> bool {
        if self.xs == [0] {
            return true;
        }
        let n = self.xs.len();
        n >= 2
            && self.xs[n - 1] == 0
            && self.xs[..n - 1].iter().all(|&x| x > 0)
            && self.xs.windows(2).all(|p| p[0] >= p[1])
    }
}

/// Rows `j` of the system (over the given vector, whose last entry is the
/// trailing zero) whose left side exceeds `w`.
pub fn violated_rows(xs: &[u64], w: u64) -> Vec<usize> {
    let rows = xs.len().saturating_sub(1).max(1);
    let mut prefix = 0u64;
    let mut bad = Vec::new();
    for j in 0..rows {
        let xj = xs.get(j).copied().unwrap_or(0);
        let next = xs.get(j + 1).copied().unwrap_or(0);
        if (prefix + 2 * xj).saturating_sub(next) > w {
            bad.push(j);
        }
        prefix += xj;
    }
    bad
}

/// The greedy recurrence `x_{j+1} = floor((phi - 1)(w - x_0 - ... - x_j))`,
/// stopped at the first zero.
pub fn solve_ik(w: u64) -> IkSolution {
    let mut xs = vec![floor_phi_minus_one(w)];
    let mut used = xs[0];
    while *xs.last().expect("non-empty") > 0 {
        let next = floor_phi_minus_one(w - used);
        used += next;
        xs.push(next);
    }
    IkSolution { w, xs }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn game_value_examples() {
        assert_eq!(game_value(1), 1);
        assert_eq!(game_value(2), 3);
        assert_eq!(game_value(3), 4);
        assert_eq!(game_value(5), 8);
        assert_eq!(game_value(10), 16);
    }

    #[test]
    fn game_value_matches_float_where_floats_are_safe() {
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        for w in 1..10_000u64 {
            assert_eq!(game_value(w), (phi * w as f64).floor() as u64, "w={w}");
        }
    }

    #[test]
    fn solve_examples() {
        assert_eq!(solve_ik(5).xs, vec![3, 1, 0]);
        assert_eq!(solve_ik(3).xs, vec![1, 1, 0]);
        assert_eq!(solve_ik(1).xs, vec![0]);
        assert_eq!(solve_ik(1).k(), None);
        assert_eq!(solve_ik(5).k(), Some(1));
    }

    #[test]
    fn solutions_are_feasible_and_well_shaped() {
        for w in 1..=200 {
            let s = solve_ik(w);
            assert!(s.is_well_shaped(), "w={w}: {:?}", s.xs);
            assert!(s.violations().is_empty(), "w={w}: {:?}", s.xs);
            assert_eq!(s.x0() + w, game_value(w));
        }
    }

    #[test]
    fn violated_rows_spots_a_bad_vector() {
        // 2*3 - 0 > 5
        assert_eq!(violated_rows(&[3, 0], 5), vec![0]);
        assert!(violated_rows(&[3, 1, 0], 5).is_empty());
    }
}
