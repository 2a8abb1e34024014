//! Demand, capacity-constrained allocation and profit.
//!
//! Every buyer has the linear demand curve `q = max(0, u - e)` in the
//! effective price `e` it faces. Allocation runs in passes: in pass `k` each
//! buyer turns to its `k`-th cheapest firm and asks for whatever its demand
//! curve still wants after the units it already holds. A firm whose requests
//! exceed its remaining capacity scales all of them down by the same factor.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geography::Geography;
use crate::numeric::ordered_sum_in_place;
use crate::taxation::{apply_multiplier, TaxScheme};

/// Units demanded by one buyer at effective price `effective`.
pub fn buyer_demand(effective: f64, u: f64) -> Result<f64> {
    if effective.is_nan() || effective < 0.0 {
        return Err(Error::invalid("effective_price", "must be >= 0"));
    }
    if !(u.is_finite() && u > 0.0) {
        return Err(Error::invalid("u", "must be finite and > 0"));
    }
    Ok(demand(effective, u))
}

#[inline]
fn demand(effective: f64, u: f64) -> f64 {
    let q = u - effective;
    if q > 0.0 {
        q
    } else {
        0.0
    }
}

/// Everything that stays fixed while firms vary quantities and prices.
#[derive(Debug, Clone, PartialEq)]
pub struct MarketConfig {
    geography: Geography,
    tax: TaxScheme,
    u: f64,
    costs: Vec<f64>,
    /// Per buyer, per firm price multiplier (row-major, buyers x firms).
    multipliers: Vec<f64>,
    /// Per buyer, per firm ordinal rank.
    ranks: Vec<usize>,
}

impl MarketConfig {
    pub const DEFAULT_U: f64 = 120.0;
    pub const DEFAULT_COST: f64 = 100.0;

    pub fn new(geography: Geography, tax: TaxScheme, u: f64, costs: Vec<f64>) -> Result<Self> {
        if !(u.is_finite() && u > 0.0) {
            return Err(Error::invalid("u", "must be finite and > 0"));
        }
        if costs.len() != geography.firm_count() {
            return Err(Error::invalid("costs", "need exactly one cost per firm"));
        }
        if costs.iter().any(|c| !(c.is_finite() && *c >= 0.0)) {
            return Err(Error::invalid("costs", "must be finite and >= 0"));
        }
        let firms = geography.firm_count();
        let mut multipliers = Vec::with_capacity(firms * geography.buyer_count());
        let mut ranks = Vec::with_capacity(firms * geography.buyer_count());
        for b in 0..geography.buyer_count() {
            let d = geography.cardinal_distances(b)?;
            let r = geography.ordinal_ranks(b)?;
            for i in 0..firms {
                multipliers.push(tax.multiplier(d[i], r[i]));
                ranks.push(r[i]);
            }
        }
        Ok(Self { geography, tax, u, costs, multipliers, ranks })
    }

    /// Canonical arrangement, given tax scheme, `u = 120`, both costs 100.
    pub fn canonical(tax: TaxScheme) -> Self {
        Self::new(
            Geography::canonical(),
            tax,
            Self::DEFAULT_U,
            vec![Self::DEFAULT_COST, Self::DEFAULT_COST],
        )
        .expect("canonical configuration is valid")
    }

    pub fn geography(&self) -> &Geography {
        &self.geography
    }

    pub fn tax(&self) -> &TaxScheme {
        &self.tax
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    pub fn firm_count(&self) -> usize {
        self.costs.len()
    }

    pub fn buyer_count(&self) -> usize {
        self.geography.buyer_count()
    }

    pub fn with_tax(&self, tax: TaxScheme) -> Self {
        Self::new(self.geography.clone(), tax, self.u, self.costs.clone())
            .expect("already validated")
    }

    pub fn with_costs(&self, costs: Vec<f64>) -> Result<Self> {
        Self::new(self.geography.clone(), self.tax, self.u, costs)
    }

    /// Rank of firm `firm` for buyer `buyer`.
    pub fn rank(&self, buyer: usize, firm: usize) -> usize {
        self.ranks[buyer * self.firm_count() + firm]
    }

    /// Effective price buyer `buyer` pays at firm `firm` posting `price`.
    pub fn effective_price(&self, buyer: usize, firm: usize, price: f64) -> f64 {
        apply_multiplier(price, self.multipliers[buyer * self.firm_count() + firm])
    }

    fn check_profile(&self, quantities: &[f64], prices: &[f64]) -> Result<()> {
        let f = self.firm_count();
        if quantities.len() != f {
            return Err(Error::invalid("quantities", "need one quantity per firm"));
        }
        if prices.len() != f {
            return Err(Error::invalid("prices", "need one price per firm"));
        }
        if quantities.iter().any(|q| !(q.is_finite() && *q >= 0.0)) {
            return Err(Error::invalid("quantities", "must be finite and >= 0"));
        }
        if prices.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::invalid("prices", "must be finite and >= 0"));
        }
        Ok(())
    }

    /// Allocate demand given posted capacities and prices.
    pub fn allocate(&self, quantities: &[f64], prices: &[f64]) -> Result<MarketOutcome> {
        self.check_profile(quantities, prices)?;
        let mut scratch = Scratch::new(self);
        scratch.run(self, quantities, prices);
        let f = self.firm_count();
        let revenue: Vec<f64> = (0..f).map(|i| prices[i] * scratch.sold[i]).collect();
        let profit: Vec<f64> = (0..f)
            .map(|i| firm_profit(prices[i], scratch.sold[i], self.costs[i], quantities[i]))
            .collect();
        let mut totals = revenue.clone();
        let total_revenue = ordered_sum_in_place(&mut totals);
        Ok(MarketOutcome {
            firms: f,
            sold: scratch.sold,
            produced: quantities.to_vec(),
            prices: prices.to_vec(),
            revenue,
            profit,
            allocations: scratch.alloc,
            total_revenue,
        })
    }

    /// Sold quantities only, reusing `scratch`. Inputs are assumed valid.
    pub(crate) fn sold_into<'s>(
        &self,
        scratch: &'s mut Scratch,
        quantities: &[f64],
        prices: &[f64],
    ) -> &'s [f64] {
        scratch.run(self, quantities, prices);
        &scratch.sold
    }

    pub(crate) fn validate_profile(&self, quantities: &[f64], prices: &[f64]) -> Result<()> {
        self.check_profile(quantities, prices)
    }
}

#[inline]
pub(crate) fn firm_profit(price: f64, sold: f64, cost: f64, produced: f64) -> f64 {
    price * sold - cost * produced
}

/// Reusable buffers for the allocation passes.
#[derive(Debug, Clone)]
pub(crate) struct Scratch {
    effective: Vec<f64>,
    order: Vec<usize>,
    alloc: Vec<f64>,
    held: Vec<f64>,
    request: Vec<f64>,
    capacity: Vec<f64>,
    sold: Vec<f64>,
    bucket: Vec<f64>,
}

impl Scratch {
    pub(crate) fn new(config: &MarketConfig) -> Self {
        let n = config.buyer_count();
        let f = config.firm_count();
        Self {
            effective: vec![0.0; n * f],
            order: vec![0; n * f],
            alloc: vec![0.0; n * f],
            held: vec![0.0; n],
            request: vec![0.0; n],
            capacity: vec![0.0; f],
            sold: vec![0.0; f],
            bucket: Vec::with_capacity(n),
        }
    }

    fn run(&mut self, config: &MarketConfig, quantities: &[f64], prices: &[f64]) {
        let n = config.buyer_count();
        let f = config.firm_count();
        let u = config.u;

        for b in 0..n {
            let row = b * f;
            for i in 0..f {
                self.effective[row + i] = config.effective_price(b, i, prices[i]);
                self.order[row + i] = i;
            }
            let eff = &self.effective[row..row + f];
            let ranks = &config.ranks[row..row + f];
            self.order[row..row + f].sort_by(|&x, &y| {
                eff[x]
                    .total_cmp(&eff[y])
                    .then(ranks[x].cmp(&ranks[y]))
                    .then(x.cmp(&y))
            });
        }
        self.alloc.iter_mut().for_each(|a| *a = 0.0);
        self.held.iter_mut().for_each(|h| *h = 0.0);
        self.capacity.copy_from_slice(quantities);

        for pass in 0..f {
            let mut any = false;
            for b in 0..n {
                let firm = self.order[b * f + pass];
                let r = if self.capacity[firm] > 0.0 {
                    demand(self.effective[b * f + firm] + self.held[b], u)
                } else {
                    0.0
                };
                any |= r > 0.0;
                self.request[b] = r;
            }
            if !any {
                break;
            }
            for firm in 0..f {
                self.bucket.clear();
                for b in 0..n {
                    if self.order[b * f + pass] == firm && self.request[b] > 0.0 {
                        self.bucket.push(self.request[b]);
                    }
                }
                if self.bucket.is_empty() {
                    continue;
                }
                let total = ordered_sum_in_place(&mut self.bucket);
                let cap = self.capacity[firm];
                let scale = if total <= cap { 1.0 } else { cap / total };
                self.bucket.clear();
                for b in 0..n {
                    if self.order[b * f + pass] == firm && self.request[b] > 0.0 {
                        let grant = if scale == 1.0 { self.request[b] } else { self.request[b] * scale };
                        self.alloc[b * f + firm] = grant;
                        self.held[b] += grant;
                        self.bucket.push(grant);
                    }
                }
                let granted = ordered_sum_in_place(&mut self.bucket);
                self.capacity[firm] = if scale == 1.0 { (cap - granted).max(0.0) } else { 0.0 };
            }
        }

        for firm in 0..f {
            self.bucket.clear();
            self.bucket.extend((0..n).map(|b| self.alloc[b * f + firm]));
            let sold = ordered_sum_in_place(&mut self.bucket);
            self.sold[firm] = sold.min(quantities[firm]);
        }
    }
}

/// Result of one allocation.
#[derive(Debug, Clone, PartialEq)]
pub struct MarketOutcome {
    firms: usize,
    pub sold: Vec<f64>,
    pub produced: Vec<f64>,
    pub prices: Vec<f64>,
    pub revenue: Vec<f64>,
    pub profit: Vec<f64>,
    /// Units bought, row-major by buyer then firm.
    pub allocations: Vec<f64>,
    pub total_revenue: f64,
}

impl MarketOutcome {
    pub fn allocation(&self, buyer: usize, firm: usize) -> f64 {
        self.allocations[buyer * self.firms + firm]
    }

    pub fn buyer_total(&self, buyer: usize) -> f64 {
        self.allocations[buyer * self.firms..(buyer + 1) * self.firms].iter().sum()
    }
}

/// `p_i * sold_i - c_i * produced_i` for firm `firm`.
pub fn profit(config: &MarketConfig, outcome: &MarketOutcome, firm: usize) -> Result<f64> {
    let len = config.firm_count();
    if firm >= len || firm >= outcome.sold.len() {
        return Err(Error::IndexOutOfRange { what: "firm", index: firm, len });
    }
    Ok(firm_profit(
        outcome.prices[firm],
        outcome.sold[firm],
        config.costs[firm],
        outcome.produced[firm],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::taxation::TaxKind;

    fn no_tax() -> MarketConfig {
        MarketConfig::canonical(TaxScheme::none())
    }

    #[test]
    fn demand_examples() {
        assert_eq!(buyer_demand(102.0, 120.0).unwrap(), 18.0);
        assert_eq!(buyer_demand(120.0, 120.0).unwrap(), 0.0);
        assert_eq!(buyer_demand(150.0, 120.0).unwrap(), 0.0);
        assert!(buyer_demand(-1.0, 120.0).is_err());
        assert!(buyer_demand(1.0, 0.0).is_err());
    }

    #[test]
    fn all_buyers_prefer_cheaper_firm() {
        let out = no_tax().allocate(&[300.0, 100.0], &[100.0, 110.0]).unwrap();
        assert_eq!(out.sold, vec![240.0, 0.0]);
        for b in 0..12 {
            assert_eq!(out.allocation(b, 0), 20.0);
            assert_eq!(out.allocation(b, 1), 0.0);
        }
        assert_eq!(out.profit, vec![24000.0 - 30000.0, -10000.0]);
        assert_eq!(profit(&no_tax(), &out, 0).unwrap(), -6000.0);
    }

    #[test]
    fn rationing_spills_over() {
        let cfg = no_tax();
        let out = cfg.allocate(&[60.0, 100.0], &[100.0, 110.0]).unwrap();
        assert!((out.sold[0] - 60.0).abs() < 1e-12);
        assert!((out.sold[1] - 60.0).abs() < 1e-12);
        for b in 0..12 {
            assert!((out.allocation(b, 0) - 5.0).abs() < 1e-12);
            assert!((out.allocation(b, 1) - 5.0).abs() < 1e-12);
        }
        let p = profit(&cfg, &out, 1).unwrap();
        assert!((p - (-3400.0)).abs() < 1e-9);
        assert!(profit(&cfg, &out, 2).is_err());
    }

    #[test]
    fn intercept_price_sells_nothing() {
        let cfg = no_tax();
        let out = cfg.allocate(&[50.0, 70.0], &[120.0, 120.0]).unwrap();
        assert_eq!(out.sold, vec![0.0, 0.0]);
        assert_eq!(out.profit, vec![-5000.0, -7000.0]);
        let zero = cfg.allocate(&[0.0, 0.0], &[100.0, 100.0]).unwrap();
        assert_eq!(profit(&cfg, &zero, 0).unwrap(), 0.0);
    }

    #[test]
    fn equal_prices_split_by_rank() {
        let cfg = no_tax();
        let out = cfg.allocate(&[500.0, 500.0], &[110.0, 110.0]).unwrap();
        assert_eq!(out.sold, vec![60.0, 60.0]);
        assert_eq!(out.total_revenue, 110.0 * 120.0);
        for b in 0..12 {
            let local = if cfg.rank(b, 0) == 0 { 0 } else { 1 };
            assert_eq!(out.allocation(b, local), 10.0);
            assert_eq!(out.allocation(b, 1 - local), 0.0);
        }
    }

    #[test]
    fn rejects_bad_profiles() {
        let cfg = no_tax();
        assert!(cfg.allocate(&[-1.0, 0.0], &[1.0, 1.0]).is_err());
        assert!(cfg.allocate(&[1.0, 0.0], &[-1.0, 1.0]).is_err());
        assert!(cfg.allocate(&[1.0], &[1.0, 1.0]).is_err());
        assert!(MarketConfig::new(Geography::canonical(), TaxScheme::none(), 120.0, vec![1.0]).is_err());
        assert!(MarketConfig::new(Geography::canonical(), TaxScheme::none(), 0.0, vec![1.0, 1.0]).is_err());
        assert!(
            MarketConfig::new(Geography::canonical(), TaxScheme::none(), 120.0, vec![-1.0, 1.0]).is_err()
        );
    }

    #[test]
    fn infinite_ordinal_tax_keeps_buyers_local() {
        let tax = TaxScheme::new(TaxKind::Ordinal, f64::INFINITY, 1.0).unwrap();
        let cfg = MarketConfig::canonical(tax);
        let out = cfg.allocate(&[10.0, 200.0], &[100.0, 90.0]).unwrap();
        for b in 0..12 {
            for i in 0..2 {
                if cfg.rank(b, i) > 0 {
                    assert_eq!(out.allocation(b, i), 0.0);
                }
            }
        }
    }

    #[test]
    fn three_firms_spill_in_price_order() {
        let geo = Geography::new(1.0, vec![0.0, 0.3, 0.6], vec![0.1, 0.5]).unwrap();
        let cfg = MarketConfig::new(geo, TaxScheme::none(), 120.0, vec![0.0; 3]).unwrap();
        // cheapest firm 2 has 4 units, then firm 0 has 4, firm 1 has plenty
        let out = cfg.allocate(&[4.0, 100.0, 4.0], &[105.0, 110.0, 100.0]).unwrap();
        // pass 1: each wants 20 from firm 2, gets 2; pass 2: 120-105-2 = 13 each, rationed to 2;
        // pass 3: 120-110-4 = 6 each from firm 1
        for b in 0..2 {
            assert!((out.allocation(b, 2) - 2.0).abs() < 1e-12);
            assert!((out.allocation(b, 0) - 2.0).abs() < 1e-12);
            assert!((out.allocation(b, 1) - 6.0).abs() < 1e-12);
        }
    }
}
