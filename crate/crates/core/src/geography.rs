//! Ring world: positions, shortest-arc distances and distance ranks.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Shortest-arc distance between two points on a ring of length `ring_length`.
///
/// Both positions must lie in `[0, ring_length)`. The result is in
/// `[0, ring_length / 2]`.
pub fn ring_distance(x: f64, y: f64, ring_length: f64) -> Result<f64> {
    check_length(ring_length)?;
    check_position("position", x, ring_length)?;
    check_position("position", y, ring_length)?;
    Ok(arc(x, y, ring_length))
}

#[inline]
fn arc(x: f64, y: f64, ring_length: f64) -> f64 {
    let direct = libm::fabs(x - y);
    let around = ring_length - direct;
    if around < direct {
        around
    } else {
        direct
    }
}

fn check_length(ring_length: f64) -> Result<()> {
    if !(ring_length.is_finite() && ring_length > 0.0) {
        return Err(Error::invalid("ring_length", "must be finite and > 0"));
    }
    Ok(())
}

fn check_position(field: &'static str, x: f64, ring_length: f64) -> Result<()> {
    if !(x.is_finite() && (0.0..ring_length).contains(&x)) {
        return Err(Error::invalid(field, "must lie in [0, ring_length)"));
    }
    Ok(())
}

/// Positions equal to the ring length wrap to 0.
fn normalize(field: &'static str, x: f64, ring_length: f64) -> Result<f64> {
    let x = if x == ring_length { 0.0 } else { x };
    check_position(field, x, ring_length)?;
    Ok(x)
}

/// A ring with firm and buyer locations.
#[derive(Debug, Clone, PartialEq)]
pub struct Geography {
    ring_length: f64,
    firms: Vec<f64>,
    buyers: Vec<f64>,
}

impl Geography {
    pub fn new(ring_length: f64, firms: Vec<f64>, buyers: Vec<f64>) -> Result<Self> {
        check_length(ring_length)?;
        if firms.is_empty() {
            return Err(Error::invalid("firms", "at least one firm is required"));
        }
        if buyers.is_empty() {
            return Err(Error::invalid("buyers", "at least one buyer is required"));
        }
        let firms = firms
            .into_iter()
            .map(|x| normalize("firms", x, ring_length))
            .collect::<Result<Vec<_>>>()?;
        let buyers = buyers
            .into_iter()
            .map(|x| normalize("buyers", x, ring_length))
            .collect::<Result<Vec<_>>>()?;
        for (i, a) in firms.iter().enumerate() {
            if firms[i + 1..].contains(a) {
                return Err(Error::invalid("firms", "firm positions must be pairwise distinct"));
            }
        }
        Ok(Self { ring_length, firms, buyers })
    }

    /// Fixed balanced arrangement used throughout: ring of length 1, firms at
    /// 0 and 1/2, twelve buyers at the odd 24ths.
    ///
    /// Each firm is strictly closest to six buyers and no buyer is
    /// equidistant from the two firms.
    pub fn canonical() -> Self {
        let buyers = (0..12).map(|k| (2 * k + 1) as f64 / 24.0).collect();
        Self { ring_length: 1.0, firms: alloc::vec![0.0, 0.5], buyers }
    }

    pub fn ring_length(&self) -> f64 {
        self.ring_length
    }

    pub fn firm_positions(&self) -> &[f64] {
        &self.firms
    }

    pub fn buyer_positions(&self) -> &[f64] {
        &self.buyers
    }

    pub fn firm_count(&self) -> usize {
        self.firms.len()
    }

    pub fn buyer_count(&self) -> usize {
        self.buyers.len()
    }

    fn buyer(&self, index: usize) -> Result<f64> {
        self.buyers.get(index).copied().ok_or(Error::IndexOutOfRange {
            what: "buyer",
            index,
            len: self.buyers.len(),
        })
    }

    /// Distance from buyer `buyer_index` to every firm, in firm order.
    pub fn cardinal_distances(&self, buyer_index: usize) -> Result<Vec<f64>> {
        let b = self.buyer(buyer_index)?;
        Ok(self.firms.iter().map(|&f| arc(b, f, self.ring_length)).collect())
    }

    /// Rank of every firm by distance from buyer `buyer_index`: 0 for the
    /// closest firm, 1 for the next, and so on. Equidistant firms are ranked
    /// by ascending firm index.
    pub fn ordinal_ranks(&self, buyer_index: usize) -> Result<Vec<usize>> {
        let distances = self.cardinal_distances(buyer_index)?;
        Ok(ranks_from_distances(&distances))
    }
}

/// Ranks implied by a list of distances, ties broken by index.
pub fn ranks_from_distances(distances: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..distances.len()).collect();
    order.sort_by(|&a, &b| distances[a].total_cmp(&distances[b]).then(a.cmp(&b)));
    let mut ranks = alloc::vec![0; distances.len()];
    for (rank, &firm) in order.iter().enumerate() {
        ranks[firm] = rank;
    }
    ranks
}
