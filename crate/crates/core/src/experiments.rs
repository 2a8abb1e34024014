//! Comparison scenarios across tax schemes and cost asymmetries.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::equilibrium::{solve_two_stage, EquilibriumResult, StrategyGrid};
use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::market::MarketConfig;
use crate::taxation::{TaxKind, TaxScheme};

/// A dimensionless metric that may be undefined for degenerate inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Metric {
    Value(f64),
    /// Mean profit is not positive, so a relative difference is meaningless.
    NonPositiveMean,
    /// Ratio with a zero denominator.
    Infinite,
}

impl Metric {
    pub fn value(self) -> Option<f64> {
        match self {
            Metric::Value(v) => Some(v),
            _ => None,
        }
    }

    pub fn flag(self) -> Option<&'static str> {
        match self {
            Metric::Value(_) => None,
            Metric::NonPositiveMean => Some("nonpositive_mean"),
            Metric::Infinite => Some("infinite_ratio"),
        }
    }
}

/// `|a - b|` relative to the mean of the two profits.
pub fn relative_profit_difference(profit_1: f64, profit_2: f64) -> Metric {
    if profit_1 == 0.0 && profit_2 == 0.0 {
        return Metric::Value(0.0);
    }
    let mean = (profit_1 + profit_2) / 2.0;
    if mean <= 0.0 {
        return Metric::NonPositiveMean;
    }
    Metric::Value(libm::fabs(profit_1 - profit_2) / mean)
}

/// Revenue of the advantaged firm over the other firm's.
pub fn firm_revenue_ratio(advantaged: f64, other: f64) -> Metric {
    if other == 0.0 {
        return Metric::Infinite;
    }
    Metric::Value(advantaged / other)
}

/// Total revenue relative to a positive baseline.
pub fn normalized_revenue(revenue: f64, baseline: f64) -> Result<f64> {
    if baseline.is_nan() || baseline <= 0.0 {
        return Err(Error::invalid("baseline_revenue", "must be > 0"));
    }
    Ok(revenue / baseline)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub label: String,
    pub tax: TaxScheme,
    pub costs: [f64; 2],
    pub grid: Option<StrategyGrid>,
}

impl Scenario {
    pub fn new(tax: TaxScheme, costs: [f64; 2]) -> Self {
        Self { label: scenario_label(tax.kind(), costs), tax, costs, grid: None }
    }

    /// Index of the lower-cost firm; firm 0 when costs are equal.
    pub fn advantaged_firm(&self) -> usize {
        if self.costs[1] < self.costs[0] {
            1
        } else {
            0
        }
    }
}

pub fn scenario_label(kind: TaxKind, costs: [f64; 2]) -> String {
    format!("{}/{}-{}", kind, costs[0], costs[1])
}

/// Cost pairs of the standard suite: equal, 1% and 20% cheaper firm 1.
pub const SUITE_COSTS: [[f64; 2]; 3] = [[100.0, 100.0], [99.0, 100.0], [80.0, 100.0]];

/// The nine standard scenarios: every tax kind against every cost pair.
/// `lambda` and `gamma` are taken from `base` for the taxed kinds.
pub fn standard_scenarios(base: &TaxScheme) -> Vec<Scenario> {
    let mut out = Vec::with_capacity(9);
    for kind in TaxKind::ALL {
        let tax = TaxScheme::new(kind, base.lambda(), base.gamma()).expect("validated parameters");
        for costs in SUITE_COSTS {
            out.push(Scenario::new(tax, costs));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioRow {
    pub scenario: Scenario,
    pub outcome: core::result::Result<ScenarioMetrics, Error>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioMetrics {
    pub equilibrium: EquilibriumResult,
    pub relative_profit_difference: Metric,
    pub revenue_ratio: Metric,
    pub total_revenue: f64,
    /// `None` when the baseline itself failed or had zero revenue.
    pub normalized_revenue: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub baseline: String,
    pub rows: Vec<ScenarioRow>,
}

impl SuiteReport {
    pub fn row(&self, label: &str) -> Option<&ScenarioRow> {
        self.rows.iter().find(|r| r.scenario.label == label)
    }

    pub fn metrics(&self, kind: TaxKind, costs: [f64; 2]) -> Option<&ScenarioMetrics> {
        self.row(&scenario_label(kind, costs))?.outcome.as_ref().ok()
    }
}

pub fn solve_scenario<E: Executor>(
    base: &MarketConfig,
    grid: &StrategyGrid,
    scenario: &Scenario,
    executor: &E,
) -> Result<EquilibriumResult> {
    let config = base.with_tax(scenario.tax).with_costs(scenario.costs.to_vec())?;
    solve_two_stage(&config, scenario.grid.as_ref().unwrap_or(grid), executor)
}

/// Solves `scenarios` and derives the comparison metrics. The scenario
/// labelled `baseline` provides the revenue normalization.
///
/// A failing scenario becomes an error row; the rest of the suite still runs.
pub fn run_scenarios<E: Executor>(
    base: &MarketConfig,
    grid: &StrategyGrid,
    scenarios: &[Scenario],
    baseline: &str,
    executor: &E,
) -> Result<SuiteReport> {
    for (i, s) in scenarios.iter().enumerate() {
        if scenarios[..i].iter().any(|t| t.label == s.label) {
            return Err(Error::invalid("scenarios", "labels must be unique"));
        }
    }
    if !scenarios.iter().any(|s| s.label == baseline) {
        return Err(Error::invalid("baseline", "must name one of the scenarios"));
    }
    let solved: Vec<Result<EquilibriumResult>> =
        scenarios.iter().map(|s| solve_scenario(base, grid, s, executor)).collect();
    let baseline_revenue = scenarios
        .iter()
        .zip(&solved)
        .find(|(s, _)| s.label == baseline)
        .and_then(|(_, r)| r.as_ref().ok())
        .map(|r| r.total_revenue());

    let rows = scenarios
        .iter()
        .zip(solved)
        .map(|(scenario, result)| {
            let outcome = result.map(|eq| {
                let adv = scenario.advantaged_firm();
                let total_revenue = eq.total_revenue();
                let normalized = if scenario.label == baseline {
                    Some(1.0)
                } else {
                    baseline_revenue.and_then(|b| normalized_revenue(total_revenue, b).ok())
                };
                ScenarioMetrics {
                    relative_profit_difference: relative_profit_difference(eq.profits[0], eq.profits[1]),
                    revenue_ratio: firm_revenue_ratio(eq.revenues[adv], eq.revenues[1 - adv]),
                    total_revenue,
                    normalized_revenue: normalized,
                    equilibrium: eq,
                }
            });
            ScenarioRow { scenario: scenario.clone(), outcome }
        })
        .collect();
    Ok(SuiteReport { baseline: baseline.into(), rows })
}

/// The standard nine-scenario comparison with the untaxed equal-cost market
/// as baseline.
pub fn run_suite<E: Executor>(base: &MarketConfig, grid: &StrategyGrid, executor: &E) -> Result<SuiteReport> {
    let scenarios = standard_scenarios(base.tax());
    let baseline = scenario_label(TaxKind::None, SUITE_COSTS[0]);
    run_scenarios(base, grid, &scenarios, &baseline, executor)
}
