//! Support enumeration over equal-size supports.

use alloc::vec;
use alloc::vec::Vec;

use super::game::{BimatrixGame, MixedProfile};
use crate::numeric::solve_linear;

/// Probability mass and best-response slack accepted when checking a
/// candidate profile.
pub const TOLERANCE: f64 = 1e-9;

/// Every equilibrium whose two supports have the same size, in ascending
/// support size, then lexicographic support order.
///
/// Stops before a support size whose enumeration would exceed `budget`
/// support pairs; the boolean reports whether the search was exhaustive.
pub fn enumerate(game: &BimatrixGame, budget: u64) -> (Vec<MixedProfile>, bool) {
    let (m, n) = (game.rows(), game.cols());
    let tol = TOLERANCE * game.scale();
    let mut found: Vec<MixedProfile> = Vec::new();
    let mut spent = 0u64;
    for k in 1..=m.min(n) {
        let pairs = binomial(m as u64, k as u64).saturating_mul(binomial(n as u64, k as u64));
        spent = spent.saturating_add(pairs);
        if spent > budget {
            return (found, false);
        }
        for rows in Combinations::new(m, k) {
            // column mix making the row player indifferent on `rows`
            for cols in Combinations::new(n, k) {
                let Some(y) = indifferent_mix(k, |r, c| game.row_payoff(rows[r], cols[c])) else {
                    continue;
                };
                let Some(x) = indifferent_mix(k, |c, r| game.col_payoff(rows[r], cols[c])) else {
                    continue;
                };
                let mut profile = MixedProfile { row: vec![0.0; m], col: vec![0.0; n] };
                for (r, &i) in rows.iter().enumerate() {
                    profile.row[i] = x[r];
                }
                for (c, &j) in cols.iter().enumerate() {
                    profile.col[j] = y[c];
                }
                if is_best_response_pair(game, &profile, &rows, &cols, tol)
                    && !found.iter().any(|p| same_profile(p, &profile))
                {
                    found.push(profile);
                }
            }
        }
    }
    (found, true)
}

/// Profile of a square game making both players indifferent across all
/// their strategies, if one with positive weights exists.
pub(crate) fn full_support(game: &BimatrixGame) -> Option<MixedProfile> {
    let k = game.rows();
    if game.cols() != k {
        return None;
    }
    let col = indifferent_mix(k, |r, c| game.row_payoff(r, c))?;
    let row = indifferent_mix(k, |c, r| game.col_payoff(r, c))?;
    Some(MixedProfile { row, col })
}

/// Solves `sum_c payoff(r, c) * w_c = v` for every `r` in `0..k` together with
/// `sum w = 1`. Returns the strictly positive weights, or `None`.
fn indifferent_mix(k: usize, payoff: impl Fn(usize, usize) -> f64) -> Option<Vec<f64>> {
    if k == 1 {
        return Some(vec![1.0]);
    }
    let dim = k + 1;
    let mut m = vec![0.0; dim * dim];
    let mut rhs = vec![0.0; dim];
    for r in 0..k {
        for c in 0..k {
            m[r * dim + c] = payoff(r, c);
        }
        m[r * dim + k] = -1.0;
    }
    for c in 0..k {
        m[k * dim + c] = 1.0;
    }
    rhs[k] = 1.0;
    let sol = solve_linear(m, rhs)?;
    let mut w: Vec<f64> = sol[..k].to_vec();
    if w.iter().any(|p| *p <= TOLERANCE) {
        return None;
    }
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|p| *p /= total);
    Some(w)
}

fn is_best_response_pair(
    game: &BimatrixGame,
    profile: &MixedProfile,
    rows: &[usize],
    cols: &[usize],
    tol: f64,
) -> bool {
    let rv = game.row_values(&profile.col);
    let cv = game.col_values(&profile.row);
    let row_best = rv.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let col_best = cv.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    rows.iter().all(|&i| rv[i] >= row_best - tol) && cols.iter().all(|&j| cv[j] >= col_best - tol)
}

fn same_profile(a: &MixedProfile, b: &MixedProfile) -> bool {
    let close = |x: &[f64], y: &[f64]| x.iter().zip(y).all(|(p, q)| libm::fabs(p - q) <= 1e-9);
    close(&a.row, &b.row) && close(&a.col, &b.col)
}

pub(crate) fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// Lexicographic `k`-subsets of `0..n`.
struct Combinations {
    n: usize,
    current: Vec<usize>,
    done: bool,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        Self { n, current: (0..k).collect(), done: k > n || k == 0 }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        let k = self.current.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.current[i] < self.n - k + i {
                self.current[i] += 1;
                for t in i + 1..k {
                    self.current[t] = self.current[t - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}
