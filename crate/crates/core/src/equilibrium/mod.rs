//! Equilibrium of the capacity-then-price game on a discrete grid.
//!
//! For every capacity pair the price stage is a finite bimatrix game. Its
//! selected equilibrium value becomes one cell of the capacity-stage game,
//! which is then solved with the same pipeline: pure equilibria first, mixed
//! equilibria only when no pure one exists, and a deterministic selection
//! rule among several.

pub mod game;
pub mod grid;
pub mod lemke;
pub mod support;

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

pub use game::{max_deviation_gain, pure_nash, support_indifference_gap, BimatrixGame, MixedProfile};
pub use grid::{AxisGrid, StrategyGrid};

use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::market::{firm_profit, MarketConfig, Scratch};

/// Support pairs examined by [`mixed_nash`] before it falls back to
/// complementary pivoting.
pub const SUPPORT_ENUMERATION_BUDGET: u64 = 250_000;

/// Equilibrium of one stage, as indices into that stage's strategy lists.
#[derive(Debug, Clone, PartialEq)]
pub enum StageProfile {
    Pure { row: usize, col: usize },
    Mixed(MixedProfile),
}

impl StageProfile {
    pub fn is_pure(&self) -> bool {
        matches!(self, StageProfile::Pure { .. })
    }

    pub fn to_mixed(&self, rows: usize, cols: usize) -> MixedProfile {
        match self {
            StageProfile::Pure { row, col } => MixedProfile::pure(rows, cols, *row, *col),
            StageProfile::Mixed(p) => p.clone(),
        }
    }

    /// `(row index, column index, probability)` for every cell with positive
    /// weight, row-major.
    pub fn cells(&self) -> Vec<(usize, usize, f64)> {
        match self {
            StageProfile::Pure { row, col } => vec![(*row, *col, 1.0)],
            StageProfile::Mixed(p) => {
                let mut out = Vec::new();
                for i in p.row_support() {
                    for j in p.col_support() {
                        out.push((i, j, p.row[i] * p.col[j]));
                    }
                }
                out
            }
        }
    }

    fn tie_key(&self) -> (Vec<usize>, Vec<usize>) {
        match self {
            StageProfile::Pure { row, col } => (vec![*row], vec![*col]),
            StageProfile::Mixed(p) => (p.row_support(), p.col_support()),
        }
    }
}

/// An equilibrium together with the payoffs it yields.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub profile: StageProfile,
    pub payoffs: [f64; 2],
}

/// Mixed equilibria of `game`.
///
/// Strictly dominated strategies are removed first. The reduced game is
/// searched by support enumeration over equal-size supports; if that search
/// finds nothing within [`SUPPORT_ENUMERATION_BUDGET`], Lemke-Howson paths
/// from every initial label are tried until one yields a verified
/// equilibrium. Pure equilibria come back as one-point profiles.
pub fn mixed_nash(game: &BimatrixGame) -> Result<Vec<MixedProfile>> {
    let (rows, cols) = undominated(game);
    let reduced = game.restrict(&rows, &cols);
    let (mut found, _) = support::enumerate(&reduced, SUPPORT_ENUMERATION_BUDGET);
    if found.is_empty() {
        let tol = support::TOLERANCE * reduced.scale();
        for label in 0..reduced.rows() + reduced.cols() {
            let Some(raw) = lemke::lemke_howson(&reduced, label) else { continue };
            let profile = polish(&reduced, raw);
            if max_deviation_gain(&reduced, &profile) <= tol {
                found.push(profile);
                break;
            }
        }
    }
    if found.is_empty() {
        return Err(Error::NoEquilibrium);
    }
    Ok(found
        .into_iter()
        .map(|p| {
            let mut full = MixedProfile { row: vec![0.0; game.rows()], col: vec![0.0; game.cols()] };
            for (k, &i) in rows.iter().enumerate() {
                full.row[i] = p.row[k];
            }
            for (k, &j) in cols.iter().enumerate() {
                full.col[j] = p.col[k];
            }
            full
        })
        .collect())
}

/// Re-solves the indifference equations on the supports Lemke-Howson found,
/// which removes most of the pivoting round-off.
fn polish(game: &BimatrixGame, raw: MixedProfile) -> MixedProfile {
    let rs = raw.row_support();
    let cs = raw.col_support();
    if rs.len() != cs.len() || rs.len() < 2 {
        return raw;
    }
    let sub = game.restrict(&rs, &cs);
    match support::full_support(&sub) {
        Some(p) => {
            let mut out = MixedProfile { row: vec![0.0; game.rows()], col: vec![0.0; game.cols()] };
            for (k, &i) in rs.iter().enumerate() {
                out.row[i] = p.row[k];
            }
            for (k, &j) in cs.iter().enumerate() {
                out.col[j] = p.col[k];
            }
            if max_deviation_gain(game, &out) <= max_deviation_gain(game, &raw).max(0.0) + 1e-12 {
                out
            } else {
                raw
            }
        }
        None => raw,
    }
}

/// Iterated elimination of pure strategies strictly dominated by another
/// pure strategy. Keeps every Nash equilibrium.
fn undominated(game: &BimatrixGame) -> (Vec<usize>, Vec<usize>) {
    let mut rows: Vec<usize> = (0..game.rows()).collect();
    let mut cols: Vec<usize> = (0..game.cols()).collect();
    loop {
        let before = rows.len() + cols.len();
        let kept_rows: Vec<usize> = rows
            .iter()
            .copied()
            .filter(|&r| {
                !rows.iter().any(|&s| s != r && cols.iter().all(|&c| game.row_payoff(s, c) > game.row_payoff(r, c)))
            })
            .collect();
        rows = kept_rows;
        let kept_cols: Vec<usize> = cols
            .iter()
            .copied()
            .filter(|&c| {
                !cols.iter().any(|&d| d != c && rows.iter().all(|&r| game.col_payoff(r, d) > game.col_payoff(r, c)))
            })
            .collect();
        cols = kept_cols;
        if rows.len() + cols.len() == before {
            return (rows, cols);
        }
    }
}

/// Relative tolerance under which two payoff totals (or splits) count as
/// tied during selection.
pub const SELECTION_TOLERANCE: f64 = 1e-9;

/// Picks one equilibrium: pure beats mixed, then the larger payoff total,
/// then the more even split `|a - b|`, then the lexicographically smallest
/// strategy indices. Totals and splits within [`SELECTION_TOLERANCE`]
/// (relative to the largest payoff) count as equal, so rounding noise never
/// decides between equilibria that tie exactly in real arithmetic. Returns
/// the index of the winner in `candidates`.
pub fn select_equilibrium(candidates: &[Candidate]) -> Result<usize> {
    if candidates.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    let any_pure = candidates.iter().any(|c| c.profile.is_pure());
    let mut pool: Vec<usize> =
        (0..candidates.len()).filter(|&k| candidates[k].profile.is_pure() == any_pure).collect();
    let scale = pool
        .iter()
        .flat_map(|&k| candidates[k].payoffs)
        .fold(1.0f64, |acc, v| acc.max(libm::fabs(v)));
    let tol = SELECTION_TOLERANCE * scale;

    let total = |k: usize| candidates[k].payoffs[0] + candidates[k].payoffs[1];
    let best_total = pool.iter().map(|&k| total(k)).fold(f64::NEG_INFINITY, f64::max);
    pool.retain(|&k| total(k) >= best_total - tol);

    let split = |k: usize| libm::fabs(candidates[k].payoffs[0] - candidates[k].payoffs[1]);
    let best_split = pool.iter().map(|&k| split(k)).fold(f64::INFINITY, f64::min);
    pool.retain(|&k| split(k) <= best_split + tol);

    let best = pool
        .into_iter()
        .min_by(|&a, &b| candidates[a].profile.tie_key().cmp(&candidates[b].profile.tie_key()).then(a.cmp(&b)))
        .expect("pool keeps the best candidate");
    Ok(best)
}

/// Solution of one stage game.
#[derive(Debug, Clone, PartialEq)]
pub struct StageSolution {
    pub profile: StageProfile,
    pub payoffs: [f64; 2],
    /// Number of equilibria found, including the selected one.
    pub equilibria: usize,
}

/// Pure equilibria if any, otherwise mixed ones; then the selection rule.
pub fn solve_subgame(game: &BimatrixGame) -> Result<StageSolution> {
    let pure = pure_nash(game);
    let candidates: Vec<Candidate> = if pure.is_empty() {
        mixed_nash(game)?
            .into_iter()
            .map(|p| {
                let payoffs = game.expected_payoffs(&p);
                let profile = match p.as_pure() {
                    Some((row, col)) => StageProfile::Pure { row, col },
                    None => StageProfile::Mixed(p),
                };
                Candidate { profile, payoffs }
            })
            .collect()
    } else {
        pure.into_iter()
            .map(|(row, col)| Candidate {
                profile: StageProfile::Pure { row, col },
                payoffs: [game.row_payoff(row, col), game.col_payoff(row, col)],
            })
            .collect()
    };
    let equilibria = candidates.len();
    let best = select_equilibrium(&candidates)?;
    let Candidate { profile, payoffs } = candidates.into_iter().nth(best).expect("index from select");
    Ok(StageSolution { profile, payoffs, equilibria })
}

fn require_duopoly(config: &MarketConfig) -> Result<()> {
    if config.firm_count() != 2 {
        return Err(Error::invalid("firms", "the game solver supports exactly two firms"));
    }
    Ok(())
}

/// Price-stage game at fixed capacities: rows are firm 1's grid prices,
/// columns firm 2's, payoffs are profits.
pub fn build_price_subgame(
    config: &MarketConfig,
    quantities: [f64; 2],
    grid: &StrategyGrid,
) -> Result<BimatrixGame> {
    require_duopoly(config)?;
    let prices = grid.price.points();
    config.validate_profile(&quantities, &[prices[0], prices[0]])?;
    let mut scratch = Scratch::new(config);
    Ok(price_subgame(config, quantities, &prices, &mut scratch))
}

fn price_subgame(
    config: &MarketConfig,
    quantities: [f64; 2],
    prices: &[f64],
    scratch: &mut Scratch,
) -> BimatrixGame {
    let n = prices.len();
    let costs = config.costs();
    let mut a = Vec::with_capacity(n * n);
    let mut b = Vec::with_capacity(n * n);
    for &p1 in prices {
        for &p2 in prices {
            let sold = config.sold_into(scratch, &quantities, &[p1, p2]);
            a.push(firm_profit(p1, sold[0], costs[0], quantities[0]));
            b.push(firm_profit(p2, sold[1], costs[1], quantities[1]));
        }
    }
    BimatrixGame::new(n, n, a, b)
        .and_then(|g| g.with_labels(prices.to_vec(), prices.to_vec()))
        .expect("finite payoffs from validated inputs")
}

/// Solver bookkeeping: how often mixed play or multiplicity occurred.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Diagnostics {
    pub pure_subgames: usize,
    pub mixed_subgames: usize,
    /// Equilibria found but not selected, summed over all price subgames.
    pub discarded_subgame_equilibria: usize,
    pub quantity_stage_mixed: bool,
    pub quantity_stage_equilibria: usize,
}

/// One capacity pair in the support of the capacity-stage equilibrium.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportCell {
    pub probability: f64,
    pub quantities: [f64; 2],
    /// Indices into the price grid.
    pub price_profile: StageProfile,
    pub profits: [f64; 2],
    pub revenues: [f64; 2],
    pub expected_prices: [f64; 2],
}

/// Subgame-perfect equilibrium of the capacity-then-price game.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumResult {
    pub quantity_grid: Vec<f64>,
    pub price_grid: Vec<f64>,
    /// Indices into the quantity grid.
    pub quantity_profile: StageProfile,
    pub cells: Vec<SupportCell>,
    /// Expected capacities.
    pub quantities: [f64; 2],
    /// Expected posted prices.
    pub prices: [f64; 2],
    pub profits: [f64; 2],
    pub revenues: [f64; 2],
    pub diagnostics: Diagnostics,
}

impl EquilibriumResult {
    /// Both stages pure.
    pub fn is_pure(&self) -> bool {
        self.quantity_profile.is_pure() && self.cells.iter().all(|c| c.price_profile.is_pure())
    }

    pub fn total_revenue(&self) -> f64 {
        self.revenues[0] + self.revenues[1]
    }
}

/// Backward induction over the capacity grid.
pub fn solve_two_stage<E: Executor>(
    config: &MarketConfig,
    grid: &StrategyGrid,
    executor: &E,
) -> Result<EquilibriumResult> {
    require_duopoly(config)?;
    let qs = grid.quantity.points();
    let ps = grid.price.points();
    let nq = qs.len();

    let solutions = executor.map(nq * nq, |idx| {
        let q = [qs[idx / nq], qs[idx % nq]];
        let mut scratch = Scratch::new(config);
        let game = price_subgame(config, q, &ps, &mut scratch);
        solve_subgame(&game).map_err(|e| Error::Subgame { q1: q[0], q2: q[1], source: Box::new(e) })
    });
    let mut subgames = Vec::with_capacity(solutions.len());
    for s in solutions {
        subgames.push(s?);
    }

    let mut diagnostics = Diagnostics::default();
    for s in &subgames {
        if s.profile.is_pure() {
            diagnostics.pure_subgames += 1;
        } else {
            diagnostics.mixed_subgames += 1;
        }
        diagnostics.discarded_subgame_equilibria += s.equilibria - 1;
    }

    let a = subgames.iter().map(|s| s.payoffs[0]).collect();
    let b = subgames.iter().map(|s| s.payoffs[1]).collect();
    let stage = BimatrixGame::new(nq, nq, a, b)?.with_labels(qs.clone(), qs.clone())?;
    let top = solve_subgame(&stage)?;
    diagnostics.quantity_stage_mixed = !top.profile.is_pure();
    diagnostics.quantity_stage_equilibria = top.equilibria;

    let mut scratch = Scratch::new(config);
    let mut cells = Vec::new();
    for (i, j, w) in top.profile.cells() {
        let sub = &subgames[i * nq + j];
        let q = [qs[i], qs[j]];
        let mut revenues = [0.0; 2];
        let mut expected_prices = [0.0; 2];
        for (a, b, pw) in sub.profile.cells() {
            let p = [ps[a], ps[b]];
            let sold = config.sold_into(&mut scratch, &q, &p);
            for f in 0..2 {
                revenues[f] += pw * p[f] * sold[f];
                expected_prices[f] += pw * p[f];
            }
        }
        cells.push(SupportCell {
            probability: w,
            quantities: q,
            price_profile: sub.profile.clone(),
            profits: sub.payoffs,
            revenues,
            expected_prices,
        });
    }

    let mut quantities = [0.0; 2];
    let mut prices = [0.0; 2];
    let mut revenues = [0.0; 2];
    for c in &cells {
        for f in 0..2 {
            quantities[f] += c.probability * c.quantities[f];
            prices[f] += c.probability * c.expected_prices[f];
            revenues[f] += c.probability * c.revenues[f];
        }
    }
    Ok(EquilibriumResult {
        quantity_grid: qs,
        price_grid: ps,
        quantity_profile: top.profile,
        cells,
        quantities,
        prices,
        profits: top.payoffs,
        revenues,
        diagnostics,
    })
}
