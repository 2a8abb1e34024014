//! Small numeric helpers shared across modules.

use alloc::vec::Vec;

/// Sum that depends only on the multiset of inputs, not their order.
///
/// Values are sorted before accumulation, so permuting buyers (for example
/// by mirroring the ring) yields bit-identical totals.
pub fn ordered_sum(values: &[f64]) -> f64 {
    let mut sorted: Vec<f64> = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.iter().fold(0.0, |acc, v| acc + v)
}

/// Same as [`ordered_sum`] but sorts `values` in place.
pub(crate) fn ordered_sum_in_place(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    values.iter().fold(0.0, |acc, v| acc + v)
}

/// Solves the dense square system `m x = rhs` (row-major `m`) by Gaussian
/// elimination with partial pivoting. Returns `None` for a (numerically)
/// singular matrix.
pub fn solve_linear(mut m: Vec<f64>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let n = rhs.len();
    debug_assert_eq!(m.len(), n * n);
    let scale = m.iter().fold(0.0f64, |acc, v| acc.max(libm::fabs(*v))).max(1.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| libm::fabs(m[a * n + col]).total_cmp(&libm::fabs(m[b * n + col])))?;
        if libm::fabs(m[pivot * n + col]) <= 1e-13 * scale {
            return None;
        }
        if pivot != col {
            for k in 0..n {
                m.swap(col * n + k, pivot * n + k);
            }
            rhs.swap(col, pivot);
        }
        let diag = m[col * n + col];
        for row in col + 1..n {
            let factor = m[row * n + col] / diag;
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                m[row * n + k] -= factor * m[col * n + k];
            }
            rhs[row] -= factor * rhs[col];
        }
    }
    let mut x = alloc::vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = rhs[row];
        for k in row + 1..n {
            acc -= m[row * n + k] * x[k];
        }
        x[row] = acc / m[row * n + row];
    }
    Some(x)
}
