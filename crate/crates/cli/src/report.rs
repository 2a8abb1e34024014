//! JSON and CSV report shapes.

use ringtax_core::equilibrium::{EquilibriumResult, StageProfile};
use ringtax_core::experiments::{
    firm_revenue_ratio, relative_profit_difference, scenario_label, Metric, ScenarioRow, SuiteReport,
};
use ringtax_core::MarketConfig;
use serde::Serialize;
use serde_json::Value;

pub const CSV_COLUMNS: [&str; 16] = [
    "label",
    "tax_kind",
    "c1",
    "c2",
    "q1",
    "q2",
    "p1",
    "p2",
    "profit1",
    "profit2",
    "rel_profit_diff",
    "revenue_total",
    "revenue_normalized",
    "revenue_ratio",
    "equilibrium_kind",
    "flags",
];

/// Fixed six-decimal rendering; negative zero prints as zero.
pub fn fmt_num(v: f64) -> String {
    let s = format!("{:.6}", v);
    if s == "-0.000000" {
        "0.000000".to_string()
    } else {
        s
    }
}

fn metric_json(m: Metric) -> Value {
    match m {
        Metric::Value(v) => Value::from(v),
        other => Value::from(other.flag().unwrap_or("undefined")),
    }
}

fn metric_csv(m: Metric) -> String {
    match m {
        Metric::Value(v) => fmt_num(v),
        other => other.flag().unwrap_or("undefined").to_string(),
    }
}

#[derive(Debug, Serialize)]
pub struct TaxReport {
    pub kind: String,
    pub lambda: f64,
    pub gamma: f64,
}

#[derive(Debug, Serialize)]
pub struct WeightedValue {
    pub value: f64,
    pub probability: f64,
}

#[derive(Debug, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ProfileReport {
    Pure { firm1: f64, firm2: f64 },
    Mixed { firm1: Vec<WeightedValue>, firm2: Vec<WeightedValue> },
}

impl ProfileReport {
    fn new(profile: &StageProfile, rows: &[f64], cols: &[f64]) -> Self {
        match profile {
            StageProfile::Pure { row, col } => ProfileReport::Pure { firm1: rows[*row], firm2: cols[*col] },
            StageProfile::Mixed(p) => {
                let weighted = |probs: &[f64], labels: &[f64]| {
                    probs
                        .iter()
                        .zip(labels)
                        .filter(|(w, _)| **w > 0.0)
                        .map(|(&probability, &value)| WeightedValue { value, probability })
                        .collect()
                };
                ProfileReport::Mixed { firm1: weighted(&p.row, rows), firm2: weighted(&p.col, cols) }
            }
        }
    }
}

#[derive(Debug, Serialize)]
pub struct CellReport {
    pub probability: f64,
    pub quantities: [f64; 2],
    pub prices: ProfileReport,
    pub expected_prices: [f64; 2],
    pub profits: [f64; 2],
    pub revenues: [f64; 2],
}

#[derive(Debug, Serialize)]
pub struct DiagnosticsReport {
    pub pure_subgames: usize,
    pub mixed_subgames: usize,
    pub discarded_subgame_equilibria: usize,
    pub quantity_stage_mixed: bool,
    pub quantity_stage_equilibria: usize,
}

#[derive(Debug, Serialize)]
pub struct EquilibriumReport {
    pub equilibrium_kind: &'static str,
    pub quantities: [f64; 2],
    pub prices: [f64; 2],
    pub profits: [f64; 2],
    pub revenues: [f64; 2],
    pub total_revenue: f64,
    pub quantity_profile: ProfileReport,
    pub support: Vec<CellReport>,
    pub diagnostics: DiagnosticsReport,
}

pub fn equilibrium_kind(eq: &EquilibriumResult) -> &'static str {
    if eq.is_pure() {
        "pure"
    } else {
        "mixed"
    }
}

impl EquilibriumReport {
    pub fn new(eq: &EquilibriumResult) -> Self {
        let d = eq.diagnostics;
        Self {
            equilibrium_kind: equilibrium_kind(eq),
            quantities: eq.quantities,
            prices: eq.prices,
            profits: eq.profits,
            revenues: eq.revenues,
            total_revenue: eq.total_revenue(),
            quantity_profile: ProfileReport::new(&eq.quantity_profile, &eq.quantity_grid, &eq.quantity_grid),
            support: eq
                .cells
                .iter()
                .map(|c| CellReport {
                    probability: c.probability,
                    quantities: c.quantities,
                    prices: ProfileReport::new(&c.price_profile, &eq.price_grid, &eq.price_grid),
                    expected_prices: c.expected_prices,
                    profits: c.profits,
                    revenues: c.revenues,
                })
                .collect(),
            diagnostics: DiagnosticsReport {
                pure_subgames: d.pure_subgames,
                mixed_subgames: d.mixed_subgames,
                discarded_subgame_equilibria: d.discarded_subgame_equilibria,
                quantity_stage_mixed: d.quantity_stage_mixed,
                quantity_stage_equilibria: d.quantity_stage_equilibria,
            },
        }
    }
}

fn equilibrium_flags(eq: &EquilibriumResult) -> Vec<String> {
    let mut flags = Vec::new();
    if eq.diagnostics.quantity_stage_mixed {
        flags.push("mixed_quantity_stage".to_string());
    }
    if eq.cells.iter().any(|c| !c.price_profile.is_pure()) {
        flags.push("mixed_price_stage".to_string());
    }
    if eq.diagnostics.quantity_stage_equilibria > 1 {
        flags.push("multiple_equilibria".to_string());
    }
    flags
}

/// Flat per-scenario record shared by the JSON and CSV writers.
#[derive(Debug, Serialize)]
pub struct RowReport {
    pub label: String,
    pub tax: TaxReport,
    pub costs: [f64; 2],
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub rel_profit_diff: Option<Value>,
    pub revenue_ratio: Option<Value>,
    pub revenue_total: Option<f64>,
    pub revenue_normalized: Option<f64>,
    pub flags: Vec<String>,
    pub equilibrium: Option<EquilibriumReport>,
    #[serde(skip)]
    csv: Vec<String>,
}

struct RowInput<'a> {
    label: &'a str,
    tax: &'a ringtax_core::TaxScheme,
    costs: [f64; 2],
    result: Result<(&'a EquilibriumResult, Metric, Metric, Option<f64>), String>,
    expect_normalized: bool,
}

fn build_row(input: RowInput<'_>) -> RowReport {
    let RowInput { label, tax, costs, result, expect_normalized } = input;
    let tax_report = TaxReport { kind: tax.kind().as_str().to_string(), lambda: tax.lambda(), gamma: tax.gamma() };
    match result {
        Ok((eq, rel, ratio, normalized)) => {
            let mut flags = equilibrium_flags(eq);
            flags.extend(rel.flag().map(|f| format!("rel_profit_diff_{f}")));
            flags.extend(ratio.flag().map(|f| format!("revenue_ratio_{f}")));
            if expect_normalized && normalized.is_none() {
                flags.push("no_baseline".to_string());
            }
            let csv = vec![
                label.to_string(),
                tax_report.kind.clone(),
                fmt_num(costs[0]),
                fmt_num(costs[1]),
                fmt_num(eq.quantities[0]),
                fmt_num(eq.quantities[1]),
                fmt_num(eq.prices[0]),
                fmt_num(eq.prices[1]),
                fmt_num(eq.profits[0]),
                fmt_num(eq.profits[1]),
                metric_csv(rel),
                fmt_num(eq.total_revenue()),
                normalized.map(fmt_num).unwrap_or_default(),
                metric_csv(ratio),
                equilibrium_kind(eq).to_string(),
                flags.join(";"),
            ];
            RowReport {
                label: label.to_string(),
                tax: tax_report,
                costs,
                status: "ok",
                error: None,
                rel_profit_diff: Some(metric_json(rel)),
                revenue_ratio: Some(metric_json(ratio)),
                revenue_total: Some(eq.total_revenue()),
                revenue_normalized: normalized,
                flags,
                equilibrium: Some(EquilibriumReport::new(eq)),
                csv,
            }
        }
        Err(message) => {
            let flags = vec!["solver_error".to_string()];
            let mut csv = vec![label.to_string(), tax_report.kind.clone(), fmt_num(costs[0]), fmt_num(costs[1])];
            csv.extend(std::iter::repeat_n(String::new(), 10));
            csv.push("error".to_string());
            csv.push(flags.join(";"));
            RowReport {
                label: label.to_string(),
                tax: tax_report,
                costs,
                status: "error",
                error: Some(message),
                rel_profit_diff: None,
                revenue_ratio: None,
                revenue_total: None,
                revenue_normalized: None,
                flags,
                equilibrium: None,
                csv,
            }
        }
    }
}

/// Report for a single solved configuration.
pub fn run_row(market: &MarketConfig, eq: &EquilibriumResult) -> RowReport {
    let costs = [market.costs()[0], market.costs()[1]];
    let adv = if costs[1] < costs[0] { 1 } else { 0 };
    build_row(RowInput {
        label: &scenario_label(market.tax().kind(), costs),
        tax: market.tax(),
        costs,
        result: Ok((
            eq,
            relative_profit_difference(eq.profits[0], eq.profits[1]),
            firm_revenue_ratio(eq.revenues[adv], eq.revenues[1 - adv]),
            None,
        )),
        expect_normalized: false,
    })
}

fn suite_row(row: &ScenarioRow) -> RowReport {
    let s = &row.scenario;
    build_row(RowInput {
        label: &s.label,
        tax: &s.tax,
        costs: s.costs,
        result: match &row.outcome {
            Ok(m) => Ok((&m.equilibrium, m.relative_profit_difference, m.revenue_ratio, m.normalized_revenue)),
            Err(e) => Err(e.to_string()),
        },
        expect_normalized: true,
    })
}

#[derive(Debug, Serialize)]
pub struct SuiteJson {
    pub baseline: String,
    pub rows: Vec<RowReport>,
}

pub fn suite_rows(report: &SuiteReport) -> SuiteJson {
    SuiteJson { baseline: report.baseline.clone(), rows: report.rows.iter().map(suite_row).collect() }
}

pub fn rows_to_csv(rows: &[RowReport]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_COLUMNS).expect("in-memory write");
    for r in rows {
        w.write_record(&r.csv).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

pub fn checks_to_csv(checks: &[crate::validate::Check]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["check", "passed", "detail"]).expect("in-memory write");
    for c in checks {
        w.write_record([c.name, if c.passed { "true" } else { "false" }, &c.detail]).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report is serializable");
    s.push('\n');
    s
}
