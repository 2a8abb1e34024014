//! JSON run configuration.
//!
//! Every field is optional. Missing fields fall back to the canonical ring
//! (firms at 0 and 0.5 with unit cost 100, twelve buyers at odd 24ths),
//! `u = 120`, no tax with `lambda = 0.1`, `gamma = 1`, and the default grids.

use ringtax_core::equilibrium::{AxisGrid, StrategyGrid};
use ringtax_core::{Geography, MarketConfig, TaxKind, TaxScheme};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("config parse error at {path}: {message}")]
    Parse { path: String, message: String },
    #[error("invalid config field {path}: {rule}")]
    Invalid { path: String, rule: String },
}

impl ConfigError {
    fn invalid(path: impl Into<String>, rule: impl Into<String>) -> Self {
        ConfigError::Invalid { path: path.into(), rule: rule.into() }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ring_length: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub firms: Option<Vec<FirmDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub buyers: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tax: Option<TaxDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grids: Option<GridsDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FirmDoc {
    pub position: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaxDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridsDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_step: Option<f64>,
}

/// Command-line overrides applied on top of the document.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub tax: Option<TaxKind>,
    pub lambda: Option<f64>,
    pub gamma: Option<f64>,
    pub costs: Option<Vec<f64>>,
    pub q_grid: Option<(f64, f64, f64)>,
    pub p_grid: Option<(f64, f64, f64)>,
}

impl ConfigDoc {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        if text.trim().is_empty() {
            return Ok(Self::default());
        }
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| ConfigError::Parse {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })
    }

    pub fn apply(&mut self, o: &Overrides) {
        if o.tax.is_some() || o.lambda.is_some() || o.gamma.is_some() {
            let tax = self.tax.get_or_insert_with(TaxDoc::default);
            if let Some(kind) = o.tax {
                tax.kind = Some(kind.as_str().to_string());
            }
            if o.lambda.is_some() {
                tax.lambda = o.lambda;
            }
            if o.gamma.is_some() {
                tax.gamma = o.gamma;
            }
        }
        if let Some(costs) = &o.costs {
            let firms = self.firms.get_or_insert_with(|| {
                Geography::canonical()
                    .firm_positions()
                    .iter()
                    .map(|&position| FirmDoc { position, cost: None })
                    .collect()
            });
            for (i, f) in firms.iter_mut().enumerate() {
                if let Some(&c) = costs.get(i) {
                    f.cost = Some(c);
                }
            }
            // surplus costs are caught by validation
            if costs.len() > firms.len() {
                firms.extend(costs[firms.len()..].iter().map(|&c| FirmDoc { position: f64::NAN, cost: Some(c) }));
            }
        }
        if o.q_grid.is_some() || o.p_grid.is_some() {
            let g = self.grids.get_or_insert_with(GridsDoc::default);
            if let Some((a, b, s)) = o.q_grid {
                (g.q_min, g.q_max, g.q_step) = (Some(a), Some(b), Some(s));
            }
            if let Some((a, b, s)) = o.p_grid {
                (g.p_min, g.p_max, g.p_step) = (Some(a), Some(b), Some(s));
            }
        }
    }

    /// Validates the document into a market and a strategy grid.
    pub fn resolve(&self) -> Result<(MarketConfig, StrategyGrid), ConfigError> {
        let canonical = Geography::canonical();
        let ring_length = self.ring_length.unwrap_or(canonical.ring_length());
        if !(ring_length.is_finite() && ring_length > 0.0) {
            return Err(ConfigError::invalid("ring_length", "must be finite and > 0"));
        }
        let (positions, costs): (Vec<f64>, Vec<f64>) = match &self.firms {
            Some(firms) => firms
                .iter()
                .map(|f| (f.position, f.cost.unwrap_or(MarketConfig::DEFAULT_COST)))
                .unzip(),
            None => canonical
                .firm_positions()
                .iter()
                .map(|&p| (p, MarketConfig::DEFAULT_COST))
                .unzip(),
        };
        for (i, p) in positions.iter().enumerate() {
            if !(p.is_finite() && *p >= 0.0 && *p <= ring_length) {
                return Err(ConfigError::invalid(format!("firms[{i}].position"), "must lie in [0, ring_length)"));
            }
        }
        for (i, c) in costs.iter().enumerate() {
            if !(c.is_finite() && *c >= 0.0) {
                return Err(ConfigError::invalid(format!("firms[{i}].cost"), "must be finite and >= 0"));
            }
        }
        let buyers = self.buyers.clone().unwrap_or_else(|| canonical.buyer_positions().to_vec());
        for (i, p) in buyers.iter().enumerate() {
            if !(p.is_finite() && *p >= 0.0 && *p <= ring_length) {
                return Err(ConfigError::invalid(format!("buyers[{i}]"), "must lie in [0, ring_length)"));
            }
        }
        let geography = Geography::new(ring_length, positions, buyers)
            .map_err(|e| core_error("", e))?;

        let tax_doc = self.tax.clone().unwrap_or_default();
        let kind = match tax_doc.kind.as_deref() {
            None => TaxKind::None,
            Some(s) => s
                .parse::<TaxKind>()
                .map_err(|_| ConfigError::invalid("tax.kind", "expected one of none, cardinal, ordinal"))?,
        };
        let lambda = tax_doc.lambda.unwrap_or(TaxScheme::DEFAULT_LAMBDA);
        let gamma = tax_doc.gamma.unwrap_or(TaxScheme::DEFAULT_GAMMA);
        let tax = TaxScheme::new(kind, lambda, gamma).map_err(|e| core_error("tax.", e))?;

        let u = self.u.unwrap_or(MarketConfig::DEFAULT_U);
        let market = MarketConfig::new(geography, tax, u, costs).map_err(|e| core_error("", e))?;
        if market.firm_count() != 2 {
            return Err(ConfigError::invalid("firms", "the equilibrium solver needs exactly two firms"));
        }

        let d = StrategyGrid::default();
        let g = self.grids.clone().unwrap_or_default();
        let quantity = AxisGrid::new(
            "q",
            g.q_min.unwrap_or(d.quantity.min),
            g.q_max.unwrap_or(d.quantity.max),
            g.q_step.unwrap_or(d.quantity.step),
        )
        .map_err(|e| grid_error("grids.q", e))?;
        let price = AxisGrid::new(
            "p",
            g.p_min.unwrap_or(d.price.min),
            g.p_max.unwrap_or(d.price.max),
            g.p_step.unwrap_or(d.price.step),
        )
        .map_err(|e| grid_error("grids.p", e))?;
        Ok((market, StrategyGrid::new(quantity, price)))
    }

    /// Fully explicit document describing `market` and `grid`.
    pub fn describe(market: &MarketConfig, grid: &StrategyGrid) -> Self {
        let geo = market.geography();
        let tax = market.tax();
        Self {
            ring_length: Some(geo.ring_length()),
            firms: Some(
                geo.firm_positions()
                    .iter()
                    .zip(market.costs())
                    .map(|(&position, &cost)| FirmDoc { position, cost: Some(cost) })
                    .collect(),
            ),
            buyers: Some(geo.buyer_positions().to_vec()),
            u: Some(market.u()),
            tax: Some(TaxDoc {
                kind: Some(tax.kind().as_str().to_string()),
                lambda: Some(tax.lambda()),
                gamma: Some(tax.gamma()),
            }),
            grids: Some(GridsDoc {
                q_min: Some(grid.quantity.min),
                q_max: Some(grid.quantity.max),
                q_step: Some(grid.quantity.step),
                p_min: Some(grid.price.min),
                p_max: Some(grid.price.max),
                p_step: Some(grid.price.step),
            }),
        }
    }
}

fn core_error(prefix: &str, e: ringtax_core::Error) -> ConfigError {
    match e {
        ringtax_core::Error::Invalid { field, rule } => ConfigError::invalid(format!("{prefix}{field}"), rule),
        other => ConfigError::invalid(prefix.trim_end_matches('.'), other.to_string()),
    }
}

fn grid_error(prefix: &str, e: ringtax_core::Error) -> ConfigError {
    match e {
        ringtax_core::Error::Invalid { rule, .. } => ConfigError::invalid(prefix, rule),
        other => ConfigError::invalid(prefix, other.to_string()),
    }
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<(MarketConfig, StrategyGrid), ConfigError> {
    ConfigDoc::parse(text)?.resolve()
}

pub fn serialize_config(market: &MarketConfig, grid: &StrategyGrid) -> String {
    serde_json::to_string_pretty(&ConfigDoc::describe(market, grid)).expect("config is serializable")
}
