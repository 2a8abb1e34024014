//! Built-in oracle checks run by the `validate` command.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ringtax_core::equilibrium::lemke::lemke_howson;
use ringtax_core::equilibrium::{
    max_deviation_gain, mixed_nash, pure_nash, solve_subgame, solve_two_stage, support_indifference_gap,
    BimatrixGame, MixedProfile, StageProfile, StrategyGrid,
};
use ringtax_core::{Executor, MarketConfig, TaxScheme};
use serde::Serialize;

/// Absolute slack for indifference and no-deviation checks.
pub const ORACLE_TOLERANCE: f64 = 1e-9;
pub const RANDOM_GAME_SEED: u64 = 0x5eed_0004;
pub const RANDOM_GAME_COUNT: usize = 100;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, passed: bool, detail: impl Into<String>) -> Self {
        Self { name, passed, detail: detail.into() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Analytic Cournot outcome of the untaxed market, where every buyer faces
/// the same price and aggregate inverse demand is `u - Q / n`.
pub fn cournot_benchmark(market: &MarketConfig) -> ([f64; 2], [f64; 2]) {
    let n = market.buyer_count() as f64;
    let u = market.u();
    let c = market.costs();
    let q = [n * (u - 2.0 * c[0] + c[1]) / 3.0, n * (u - 2.0 * c[1] + c[0]) / 3.0];
    let q = [q[0].max(0.0), q[1].max(0.0)];
    let price = u - (q[0] + q[1]) / n;
    (q, [(price - c[0]) * q[0], (price - c[1]) * q[1]])
}

/// Untaxed two-stage solve compared with the analytic benchmark. Passes when
/// both capacities are within one quantity step; the profit gap is reported.
pub fn cournot_check<E: Executor>(market: &MarketConfig, grid: &StrategyGrid, executor: &E) -> Check {
    let market = market.with_tax(TaxScheme::none());
    let (q_star, profit_star) = cournot_benchmark(&market);
    match solve_two_stage(&market, grid, executor) {
        Ok(eq) => {
            let step = grid.quantity.step;
            let passed = (0..2).all(|i| (eq.quantities[i] - q_star[i]).abs() <= step + 1e-9);
            let profit_gap = (0..2)
                .map(|i| ((eq.profits[i] - profit_star[i]) / profit_star[i]).abs())
                .fold(0.0, f64::max);
            Check::new(
                "cournot",
                passed,
                format!(
                    "quantities ({}, {}) vs ({:.4}, {:.4}), step {}; profits ({:.4}, {:.4}) vs ({:.4}, {:.4}), relative gap {:.4}",
                    eq.quantities[0],
                    eq.quantities[1],
                    q_star[0],
                    q_star[1],
                    step,
                    eq.profits[0],
                    eq.profits[1],
                    profit_star[0],
                    profit_star[1],
                    profit_gap
                ),
            )
        }
        Err(e) => Check::new("cournot", false, format!("solver error: {e}")),
    }
}

fn game(cells: &[&[(f64, f64)]]) -> BimatrixGame {
    BimatrixGame::from_cells(cells).expect("finite payoffs")
}

pub fn matching_pennies() -> BimatrixGame {
    game(&[&[(1.0, -1.0), (-1.0, 1.0)], &[(-1.0, 1.0), (1.0, -1.0)]])
}

/// Strategy 0 cooperates, 1 defects.
pub fn prisoners_dilemma() -> BimatrixGame {
    game(&[&[(3.0, 3.0), (0.0, 5.0)], &[(5.0, 0.0), (1.0, 1.0)]])
}

pub fn battle_of_the_sexes() -> BimatrixGame {
    game(&[&[(2.0, 1.0), (0.0, 0.0)], &[(0.0, 0.0), (1.0, 2.0)]])
}

fn close(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= ORACLE_TOLERANCE)
}

pub fn pennies_check() -> Check {
    match solve_subgame(&matching_pennies()) {
        Ok(sol) => {
            let m = sol.profile.to_mixed(2, 2);
            let ok = close(&m.row, &[0.5, 0.5]) && close(&m.col, &[0.5, 0.5]);
            Check::new("matching_pennies", ok, format!("row {:?}, col {:?}", m.row, m.col))
        }
        Err(e) => Check::new("matching_pennies", false, format!("solver error: {e}")),
    }
}

pub fn prisoners_dilemma_check() -> Check {
    match solve_subgame(&prisoners_dilemma()) {
        Ok(sol) => {
            let ok = sol.profile == StageProfile::Pure { row: 1, col: 1 };
            Check::new("prisoners_dilemma", ok, format!("{:?}", sol.profile))
        }
        Err(e) => Check::new("prisoners_dilemma", false, format!("solver error: {e}")),
    }
}

/// The two pure equilibria plus the mixed one ((2/3, 1/3), (1/3, 2/3)).
pub fn battle_of_the_sexes_check() -> Check {
    let g = battle_of_the_sexes();
    let pure = pure_nash(&g);
    let mixed = mixed_nash(&g).unwrap_or_default();
    let has_mixed = mixed
        .iter()
        .any(|p| close(&p.row, &[2.0 / 3.0, 1.0 / 3.0]) && close(&p.col, &[1.0 / 3.0, 2.0 / 3.0]));
    let ok = pure == vec![(0, 0), (1, 1)] && has_mixed && mixed.len() == 3;
    Check::new("battle_of_the_sexes", ok, format!("pure {pure:?}, {} equilibria in total", mixed.len()))
}

/// Seeded `rows x cols` game with payoffs uniform in [-1, 1).
pub fn random_game(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> BimatrixGame {
    let mut draw = |k: usize| (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<f64>>();
    let a = draw(rows * cols);
    let b = draw(rows * cols);
    BimatrixGame::new(rows, cols, a, b).expect("finite payoffs")
}

/// Exhaustive no-deviation test of a pure cell.
pub fn is_pure_equilibrium(g: &BimatrixGame, i: usize, j: usize) -> bool {
    (0..g.rows()).all(|k| g.row_payoff(k, j) <= g.row_payoff(i, j))
        && (0..g.cols()).all(|k| g.col_payoff(i, k) <= g.col_payoff(i, j))
}

fn certify_mixed(g: &BimatrixGame, p: &MixedProfile) -> bool {
    p.is_valid()
        && support_indifference_gap(g, p) <= ORACLE_TOLERANCE
        && max_deviation_gain(g, p) <= ORACLE_TOLERANCE
}

/// Failure description for one random game, if any.
pub fn audit_game(g: &BimatrixGame) -> Option<String> {
    let brute: Vec<(usize, usize)> = (0..g.rows())
        .flat_map(|i| (0..g.cols()).map(move |j| (i, j)))
        .filter(|&(i, j)| is_pure_equilibrium(g, i, j))
        .collect();
    let pure = pure_nash(g);
    if pure != brute {
        return Some(format!("pure equilibria {pure:?}, brute force {brute:?}"));
    }
    let all = match mixed_nash(g) {
        Ok(all) => all,
        Err(e) => return Some(format!("mixed search failed: {e}")),
    };
    for p in &all {
        match p.as_pure() {
            Some((i, j)) if !is_pure_equilibrium(g, i, j) => return Some(format!("pure ({i}, {j}) not stable")),
            None if !certify_mixed(g, p) => return Some(format!("mixed {p:?} fails indifference")),
            _ => {}
        }
    }
    // non-degenerate games have an odd number of equilibria
    if all.len() % 2 == 0 {
        return Some(format!("{} equilibria found, expected an odd count", all.len()));
    }
    for label in 0..g.rows() + g.cols() {
        match lemke_howson(g, label) {
            Some(p) if max_deviation_gain(g, &p) <= ORACLE_TOLERANCE => {}
            other => return Some(format!("Lemke-Howson from label {label} gave {other:?}")),
        }
    }
    let sol = match solve_subgame(g) {
        Ok(sol) => sol,
        Err(e) => return Some(format!("selection failed: {e}")),
    };
    let chosen = sol.profile.to_mixed(g.rows(), g.cols());
    if max_deviation_gain(g, &chosen) > ORACLE_TOLERANCE {
        return Some("selected profile is not an equilibrium".into());
    }
    None
}

pub fn random_games_check(seed: u64, count: usize) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mixed = 0;
    let mut failures = Vec::new();
    for k in 0..count {
        let g = random_game(&mut rng, 4, 4);
        if pure_nash(&g).is_empty() {
            mixed += 1;
        }
        if let Some(why) = audit_game(&g) {
            failures.push(format!("game {k}: {why}"));
        }
    }
    let detail = if failures.is_empty() {
        format!("{count} games certified, {mixed} without pure equilibria")
    } else {
        failures.join("; ")
    };
    Check::new("random_4x4_games", failures.is_empty(), detail)
}

/// Game-solver oracles only; independent of any market.
pub fn solver_checks() -> Vec<Check> {
    vec![
        pennies_check(),
        prisoners_dilemma_check(),
        battle_of_the_sexes_check(),
        random_games_check(RANDOM_GAME_SEED, RANDOM_GAME_COUNT),
    ]
}

pub fn validate<E: Executor>(market: &MarketConfig, grid: &StrategyGrid, executor: &E) -> ValidationReport {
    let mut checks = vec![cournot_check(market, grid, executor)];
    checks.extend(solver_checks());
    ValidationReport { passed: checks.iter().all(|c| c.passed), checks }
}
