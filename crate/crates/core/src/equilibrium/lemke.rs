//! Lemke-Howson complementary pivoting with a lexicographic ratio test.
//!
//! Labels `0..m` belong to row strategies, `m..m+n` to column strategies.
//! Tableau one holds `B^T x + s = 1`, tableau two `A y + r = 1`, with both
//! payoff matrices shifted to be strictly positive. In both tableaus the
//! column index of a variable equals its label.

use alloc::vec;
use alloc::vec::Vec;

use super::game::{BimatrixGame, MixedProfile};

struct Tableau {
    /// `rows x (labels + 1)`; last column is the right-hand side.
    cells: Vec<f64>,
    rows: usize,
    width: usize,
    basis: Vec<usize>,
    /// Labels of the initial slack columns, used for lexicographic ties.
    slack: Vec<usize>,
}

impl Tableau {
    fn at(&self, r: usize, c: usize) -> f64 {
        self.cells[r * self.width + c]
    }

    fn rhs(&self, r: usize) -> f64 {
        self.at(r, self.width - 1)
    }

    /// Row chosen by the lexicographic minimum-ratio rule for `entering`.
    fn leaving_row(&self, entering: usize) -> Option<usize> {
        let mut best: Option<usize> = None;
        for r in 0..self.rows {
            let a = self.at(r, entering);
            if a <= 1e-12 {
                continue;
            }
            best = Some(match best {
                None => r,
                Some(b) => {
                    if self.lex_less(r, b, entering) {
                        r
                    } else {
                        b
                    }
                }
            });
        }
        best
    }

    fn lex_less(&self, r: usize, s: usize, entering: usize) -> bool {
        let (ar, as_) = (self.at(r, entering), self.at(s, entering));
        let keys = core::iter::once(self.width - 1).chain(self.slack.iter().copied());
        for c in keys {
            let x = self.at(r, c) / ar;
            let y = self.at(s, c) / as_;
            let tol = 1e-12 * (1.0 + libm::fabs(x).max(libm::fabs(y)));
            if x < y - tol {
                return true;
            }
            if x > y + tol {
                return false;
            }
        }
        r < s
    }

    /// Pivots `entering` into the basis; returns the label that left.
    fn pivot(&mut self, entering: usize) -> Option<usize> {
        let row = self.leaving_row(entering)?;
        let w = self.width;
        let p = self.at(row, entering);
        for c in 0..w {
            self.cells[row * w + c] /= p;
        }
        for r in 0..self.rows {
            if r == row {
                continue;
            }
            let f = self.at(r, entering);
            if f == 0.0 {
                continue;
            }
            for c in 0..w {
                let v = self.cells[row * w + c];
                self.cells[r * w + c] -= f * v;
            }
            self.cells[r * w + entering] = 0.0;
        }
        Some(core::mem::replace(&mut self.basis[row], entering))
    }

    fn value(&self, label: usize) -> f64 {
        self.basis
            .iter()
            .position(|&b| b == label)
            .map_or(0.0, |r| self.rhs(r).max(0.0))
    }
}

/// Runs the path started by dropping `initial_label`. Returns `None` if the
/// path breaks down numerically.
pub fn lemke_howson(game: &BimatrixGame, initial_label: usize) -> Option<MixedProfile> {
    let (m, n) = (game.rows(), game.cols());
    let labels = m + n;
    if initial_label >= labels {
        return None;
    }
    let min_a = (0..m).flat_map(|i| (0..n).map(move |j| (i, j))).fold(f64::INFINITY, |acc, (i, j)| {
        acc.min(game.row_payoff(i, j))
    });
    let min_b = (0..m).flat_map(|i| (0..n).map(move |j| (i, j))).fold(f64::INFINITY, |acc, (i, j)| {
        acc.min(game.col_payoff(i, j))
    });
    let width = labels + 1;

    // tableau one: rows j, B^T x + s = 1
    let mut one = Tableau {
        cells: vec![0.0; n * width],
        rows: n,
        width,
        basis: (m..labels).collect(),
        slack: (m..labels).collect(),
    };
    for j in 0..n {
        for i in 0..m {
            one.cells[j * width + i] = game.col_payoff(i, j) - min_b + 1.0;
        }
        one.cells[j * width + m + j] = 1.0;
        one.cells[j * width + labels] = 1.0;
    }
    // tableau two: rows i, A y + r = 1
    let mut two = Tableau {
        cells: vec![0.0; m * width],
        rows: m,
        width,
        basis: (0..m).collect(),
        slack: (0..m).collect(),
    };
    for i in 0..m {
        two.cells[i * width + i] = 1.0;
        for j in 0..n {
            two.cells[i * width + m + j] = game.row_payoff(i, j) - min_a + 1.0;
        }
        two.cells[i * width + labels] = 1.0;
    }

    let mut entering = initial_label;
    let mut in_one = entering < m;
    let limit = 50 * labels * labels + 1000;
    for _ in 0..limit {
        let tableau = if in_one { &mut one } else { &mut two };
        let left = tableau.pivot(entering)?;
        if left == initial_label {
            let mut row: Vec<f64> = (0..m).map(|i| one.value(i)).collect();
            let mut col: Vec<f64> = (0..n).map(|j| two.value(m + j)).collect();
            let sr: f64 = row.iter().sum();
            let sc: f64 = col.iter().sum();
            if !(sr > 0.0 && sc > 0.0) {
                return None;
            }
            row.iter_mut().for_each(|p| *p /= sr);
            col.iter_mut().for_each(|p| *p /= sc);
            return Some(MixedProfile { row, col });
        }
        entering = left;
        in_one = !in_one;
    }
    None
}
