use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Evenly spaced points `min + k * step`, including `max` when it is reached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisGrid {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl AxisGrid {
    pub fn new(field: &'static str, min: f64, max: f64, step: f64) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && step.is_finite()) {
            return Err(Error::invalid(field, "bounds and step must be finite"));
        }
        if step <= 0.0 {
            return Err(Error::invalid(field, "step must be > 0"));
        }
        if min < 0.0 {
            return Err(Error::invalid(field, "min must be >= 0"));
        }
        if min > max {
            return Err(Error::invalid(field, "min must be <= max"));
        }
        let grid = Self { min, max, step };
        if grid.len() > 100_000 {
            return Err(Error::invalid(field, "grid has more than 100000 points"));
        }
        Ok(grid)
    }

    pub fn len(&self) -> usize {
        libm::floor((self.max - self.min) / self.step + 1e-9) as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn point(&self, k: usize) -> f64 {
        self.min + k as f64 * self.step
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.point(k)).collect()
    }
}

/// Discrete strategy spaces for the capacity and price stages.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrategyGrid {
    pub quantity: AxisGrid,
    pub price: AxisGrid,
}

impl StrategyGrid {
    pub fn new(quantity: AxisGrid, price: AxisGrid) -> Self {
        Self { quantity, price }
    }

    pub fn with_price_step(&self, step: f64) -> Result<Self> {
        Ok(Self {
            quantity: self.quantity,
            price: AxisGrid::new("p_step", self.price.min, self.price.max, step)?,
        })
    }
}

impl Default for StrategyGrid {
    /// Capacities 0..=160 in steps of 5, prices 90..=120 in steps of 0.5.
    fn default() -> Self {
        Self {
            quantity: AxisGrid { min: 0.0, max: 160.0, step: 5.0 },
            price: AxisGrid { min: 90.0, max: 120.0, step: 0.5 },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_sizes() {
        let g = StrategyGrid::default();
        assert_eq!(g.quantity.len(), 33);
        assert_eq!(g.price.len(), 61);
        assert_eq!(g.price.point(60), 120.0);
        assert_eq!(g.quantity.points()[16], 80.0);
    }

    #[test]
    fn max_included_only_when_reachable() {
        let g = AxisGrid::new("q", 0.0, 1.0, 0.3).unwrap();
        assert_eq!(g.len(), 4);
        assert!((g.point(3) - 0.9).abs() < 1e-12);
        let g = AxisGrid::new("q", 0.0, 0.9, 0.3).unwrap();
        assert_eq!(g.len(), 4);
        let single = AxisGrid::new("q", 5.0, 5.0, 1.0).unwrap();
        assert_eq!(single.points(), alloc::vec![5.0]);
    }

    #[test]
    fn rejects_invalid() {
        assert!(AxisGrid::new("q", 0.0, 1.0, 0.0).is_err());
        assert!(AxisGrid::new("q", 2.0, 1.0, 0.5).is_err());
        assert!(AxisGrid::new("q", -1.0, 1.0, 0.5).is_err());
        assert!(AxisGrid::new("q", 0.0, f64::INFINITY, 0.5).is_err());
    }
}
