use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Finite two-player game. Payoffs are stored row-major; the row player is
/// firm 1, the column player firm 2.
#[derive(Debug, Clone, PartialEq)]
pub struct BimatrixGame {
    rows: usize,
    cols: usize,
    row_payoffs: Vec<f64>,
    col_payoffs: Vec<f64>,
    pub row_labels: Vec<f64>,
    pub col_labels: Vec<f64>,
}

impl BimatrixGame {
    pub fn new(rows: usize, cols: usize, row_payoffs: Vec<f64>, col_payoffs: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid("game", "needs at least one strategy per player"));
        }
        if row_payoffs.len() != rows * cols || col_payoffs.len() != rows * cols {
            return Err(Error::invalid("game", "payoff matrices must be rows x cols"));
        }
        if row_payoffs.iter().chain(&col_payoffs).any(|v| !v.is_finite()) {
            return Err(Error::invalid("game", "payoffs must be finite"));
        }
        Ok(Self {
            rows,
            cols,
            row_payoffs,
            col_payoffs,
            row_labels: (0..rows).map(|i| i as f64).collect(),
            col_labels: (0..cols).map(|j| j as f64).collect(),
        })
    }

    /// Convenience constructor from nested `(row payoff, column payoff)` cells.
    pub fn from_cells(cells: &[&[(f64, f64)]]) -> Result<Self> {
        let rows = cells.len();
        let cols = cells.first().map_or(0, |r| r.len());
        if cells.iter().any(|r| r.len() != cols) {
            return Err(Error::invalid("game", "ragged payoff table"));
        }
        let a = cells.iter().flat_map(|r| r.iter().map(|c| c.0)).collect();
        let b = cells.iter().flat_map(|r| r.iter().map(|c| c.1)).collect();
        Self::new(rows, cols, a, b)
    }

    pub fn with_labels(mut self, row_labels: Vec<f64>, col_labels: Vec<f64>) -> Result<Self> {
        if row_labels.len() != self.rows || col_labels.len() != self.cols {
            return Err(Error::invalid("game", "one label per strategy"));
        }
        self.row_labels = row_labels;
        self.col_labels = col_labels;
        Ok(self)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row_payoff(&self, i: usize, j: usize) -> f64 {
        self.row_payoffs[i * self.cols + j]
    }

    #[inline]
    pub fn col_payoff(&self, i: usize, j: usize) -> f64 {
        self.col_payoffs[i * self.cols + j]
    }

    /// Largest absolute payoff, at least 1.
    pub fn scale(&self) -> f64 {
        self.row_payoffs
            .iter()
            .chain(&self.col_payoffs)
            .fold(1.0f64, |acc, v| acc.max(libm::fabs(*v)))
    }

    /// Expected payoff of every row strategy against column mix `y`.
    pub fn row_values(&self, y: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.row_payoff(i, j) * y[j]).sum())
            .collect()
    }

    /// Expected payoff of every column strategy against row mix `x`.
    pub fn col_values(&self, x: &[f64]) -> Vec<f64> {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self.col_payoff(i, j) * x[i]).sum())
            .collect()
    }

    /// Expected payoffs of both players under `profile`.
    pub fn expected_payoffs(&self, profile: &MixedProfile) -> [f64; 2] {
        let mut a = 0.0;
        let mut b = 0.0;
        for (i, &xi) in profile.row.iter().enumerate() {
            if xi == 0.0 {
                continue;
            }
            for (j, &yj) in profile.col.iter().enumerate() {
                if yj == 0.0 {
                    continue;
                }
                let w = xi * yj;
                a += w * self.row_payoff(i, j);
                b += w * self.col_payoff(i, j);
            }
        }
        [a, b]
    }

    /// Sub-game restricted to the given strategies.
    pub(crate) fn restrict(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut a = Vec::with_capacity(rows.len() * cols.len());
        let mut b = Vec::with_capacity(rows.len() * cols.len());
        for &i in rows {
            for &j in cols {
                a.push(self.row_payoff(i, j));
                b.push(self.col_payoff(i, j));
            }
        }
        Self {
            rows: rows.len(),
            cols: cols.len(),
            row_payoffs: a,
            col_payoffs: b,
            row_labels: rows.iter().map(|&i| self.row_labels[i]).collect(),
            col_labels: cols.iter().map(|&j| self.col_labels[j]).collect(),
        }
    }

    /// Swaps the roles of the players.
    pub fn transpose(&self) -> Self {
        let mut a = vec![0.0; self.rows * self.cols];
        let mut b = vec![0.0; self.rows * self.cols];
        for i in 0..self.rows {
            for j in 0..self.cols {
                a[j * self.rows + i] = self.col_payoff(i, j);
                b[j * self.rows + i] = self.row_payoff(i, j);
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            row_payoffs: a,
            col_payoffs: b,
            row_labels: self.col_labels.clone(),
            col_labels: self.row_labels.clone(),
        }
    }
}

/// A pair of probability vectors, one per player.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedProfile {
    pub row: Vec<f64>,
    pub col: Vec<f64>,
}

impl MixedProfile {
    pub fn pure(rows: usize, cols: usize, i: usize, j: usize) -> Self {
        let mut row = vec![0.0; rows];
        let mut col = vec![0.0; cols];
        row[i] = 1.0;
        col[j] = 1.0;
        Self { row, col }
    }

    pub fn row_support(&self) -> Vec<usize> {
        support(&self.row)
    }

    pub fn col_support(&self) -> Vec<usize> {
        support(&self.col)
    }

    /// Single cell if both players play a pure strategy.
    pub fn as_pure(&self) -> Option<(usize, usize)> {
        let r = self.row_support();
        let c = self.col_support();
        (r.len() == 1 && c.len() == 1).then(|| (r[0], c[0]))
    }

    pub fn is_valid(&self) -> bool {
        let ok = |v: &[f64]| {
            v.iter().all(|p| *p >= 0.0) && libm::fabs(v.iter().sum::<f64>() - 1.0) <= 1e-12
        };
        ok(&self.row) && ok(&self.col)
    }
}

fn support(v: &[f64]) -> Vec<usize> {
    v.iter().enumerate().filter(|(_, p)| **p > 0.0).map(|(i, _)| i).collect()
}

/// Cells where neither player gains strictly by deviating unilaterally.
pub fn pure_nash(game: &BimatrixGame) -> Vec<(usize, usize)> {
    let (m, n) = (game.rows, game.cols);
    let mut col_best = vec![f64::NEG_INFINITY; n];
    for i in 0..m {
        for j in 0..n {
            col_best[j] = col_best[j].max(game.row_payoff(i, j));
        }
    }
    let mut out = Vec::new();
    for i in 0..m {
        let row_best = (0..n).fold(f64::NEG_INFINITY, |acc, j| acc.max(game.col_payoff(i, j)));
        for j in 0..n {
            if game.row_payoff(i, j) >= col_best[j] && game.col_payoff(i, j) >= row_best {
                out.push((i, j));
            }
        }
    }
    out
}

/// Largest gain either player could get by a unilateral pure deviation from
/// `profile`. Zero (or negative rounding noise) certifies an equilibrium.
pub fn max_deviation_gain(game: &BimatrixGame, profile: &MixedProfile) -> f64 {
    let [va, vb] = game.expected_payoffs(profile);
    let best_row = game.row_values(&profile.col).into_iter().fold(f64::NEG_INFINITY, f64::max);
    let best_col = game.col_values(&profile.row).into_iter().fold(f64::NEG_INFINITY, f64::max);
    (best_row - va).max(best_col - vb)
}

/// Spread of expected payoffs across each player's support; zero for an
/// exact mixed equilibrium.
pub fn support_indifference_gap(game: &BimatrixGame, profile: &MixedProfile) -> f64 {
    let spread = |values: Vec<f64>, supp: Vec<usize>| {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for k in supp {
            lo = lo.min(values[k]);
            hi = hi.max(values[k]);
        }
        hi - lo
    };
    spread(game.row_values(&profile.col), profile.row_support())
        .max(spread(game.col_values(&profile.row), profile.col_support()))
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn prisoners_dilemma() -> BimatrixGame {
        BimatrixGame::from_cells(&[&[(3.0, 3.0), (0.0, 5.0)], &[(5.0, 0.0), (1.0, 1.0)]]).unwrap()
    }

    #[test]
    fn pure_examples() {
        assert_eq!(pure_nash(&prisoners_dilemma()), vec![(1, 1)]);
        let pennies =
            BimatrixGame::from_cells(&[&[(1.0, -1.0), (-1.0, 1.0)], &[(-1.0, 1.0), (1.0, -1.0)]])
                .unwrap();
        assert!(pure_nash(&pennies).is_empty());
        let coord =
            BimatrixGame::from_cells(&[&[(1.0, 1.0), (0.0, 0.0)], &[(0.0, 0.0), (1.0, 1.0)]]).unwrap();
        assert_eq!(pure_nash(&coord), vec![(0, 0), (1, 1)]);
    }

    #[test]
    fn validation() {
        assert!(BimatrixGame::new(0, 1, vec![], vec![]).is_err());
        assert!(BimatrixGame::new(1, 2, vec![1.0], vec![1.0, 2.0]).is_err());
        assert!(BimatrixGame::new(1, 1, vec![f64::NAN], vec![1.0]).is_err());
        assert!(BimatrixGame::from_cells(&[&[(1.0, 1.0)], &[]]).is_err());
    }

    #[test]
    fn transpose_swaps_players() {
        let g = prisoners_dilemma();
        let t = g.transpose();
        assert_eq!(t.row_payoff(0, 1), g.col_payoff(1, 0));
        assert_eq!(t.transpose(), g);
    }

    #[test]
    fn deviation_gain_detects_non_equilibrium() {
        let g = prisoners_dilemma();
        assert!(max_deviation_gain(&g, &MixedProfile::pure(2, 2, 1, 1)) <= 0.0);
        assert_eq!(max_deviation_gain(&g, &MixedProfile::pure(2, 2, 0, 0)), 2.0);
    }
}
