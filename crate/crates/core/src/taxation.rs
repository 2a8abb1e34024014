//! Transaction-cost schemes.
//!
//! A buyer purchasing from a firm at posted price `p` pays
//! `p * (1 + lambda * x^gamma)`, where `x` is the physical distance to the
//! firm for the cardinal scheme and the firm's distance rank for the ordinal
//! scheme. The surcharge is collected by nobody; firm revenue only ever sees
//! the posted price.

use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TaxKind {
    None,
    Cardinal,
    Ordinal,
}

impl TaxKind {
    pub const ALL: [TaxKind; 3] = [TaxKind::None, TaxKind::Cardinal, TaxKind::Ordinal];

    pub fn as_str(self) -> &'static str {
        match self {
            TaxKind::None => "none",
            TaxKind::Cardinal => "cardinal",
            TaxKind::Ordinal => "ordinal",
        }
    }
}

impl fmt::Display for TaxKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TaxKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(TaxKind::None),
            "cardinal" => Ok(TaxKind::Cardinal),
            "ordinal" => Ok(TaxKind::Ordinal),
            _ => Err(Error::invalid("kind", "expected one of none, cardinal, ordinal")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaxScheme {
    kind: TaxKind,
    lambda: f64,
    gamma: f64,
}

impl TaxScheme {
    pub const DEFAULT_LAMBDA: f64 = 0.1;
    pub const DEFAULT_GAMMA: f64 = 1.0;

    /// `lambda` may be `+inf`; it must not be negative or NaN. `gamma` must be
    /// finite and positive.
    pub fn new(kind: TaxKind, lambda: f64, gamma: f64) -> Result<Self> {
        if lambda.is_nan() || lambda < 0.0 {
            return Err(Error::invalid("lambda", "must be >= 0"));
        }
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::invalid("gamma", "must be finite and > 0"));
        }
        Ok(Self { kind, lambda, gamma })
    }

    pub fn none() -> Self {
        Self { kind: TaxKind::None, lambda: Self::DEFAULT_LAMBDA, gamma: Self::DEFAULT_GAMMA }
    }

    pub fn cardinal(lambda: f64) -> Result<Self> {
        Self::new(TaxKind::Cardinal, lambda, Self::DEFAULT_GAMMA)
    }

    pub fn ordinal(lambda: f64) -> Result<Self> {
        Self::new(TaxKind::Ordinal, lambda, Self::DEFAULT_GAMMA)
    }

    pub fn kind(&self) -> TaxKind {
        self.kind
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Factor applied to the posted price for a buyer at cardinal distance
    /// `distance` whose rank for this firm is `rank`.
    pub fn multiplier(&self, distance: f64, rank: usize) -> f64 {
        match self.kind {
            TaxKind::None => 1.0,
            TaxKind::Cardinal => self.surcharge_factor(distance),
            TaxKind::Ordinal => self.surcharge_factor(rank as f64),
        }
    }

    fn surcharge_factor(&self, x: f64) -> f64 {
        // 0^gamma is 0 so nearest-rank purchases stay untaxed even for lambda = inf
        if x == 0.0 || self.lambda == 0.0 {
            return 1.0;
        }
        1.0 + self.lambda * libm::pow(x, self.gamma)
    }
}

impl Default for TaxScheme {
    fn default() -> Self {
        Self::none()
    }
}

/// Price a buyer actually pays for one unit posted at `price`.
pub fn effective_price(price: f64, distance: f64, rank: usize, scheme: &TaxScheme) -> Result<f64> {
    if price.is_nan() || price < 0.0 {
        return Err(Error::invalid("price", "must be >= 0"));
    }
    if distance.is_nan() || distance < 0.0 {
        return Err(Error::invalid("distance", "must be >= 0"));
    }
    Ok(apply_multiplier(price, scheme.multiplier(distance, rank)))
}

/// `price * multiplier`, with a free good staying free under an infinite
/// surcharge.
#[inline]
pub fn apply_multiplier(price: f64, multiplier: f64) -> f64 {
    if price == 0.0 {
        0.0
    } else {
        price * multiplier
    }
}
