//! Center-vortex strengths for prescribed cylinder circulations, and the
//! circulation each generator induces.
//!
//! A unit vortex anywhere in the domain induces `-1/K` around every
//! cylinder. A vortex of strength `G` at center `c_j` induces `G (2K-1)/K`
//! around `L_j`, `-G/K` around the others, and `-G` at infinity. Prescribing
//! circulations `gamma_j` therefore gives the system
//! `(2I - J/K) x = gamma + (sum Gamma + Gamma_inf)/K`.
//!
//! Circulations are positive counterclockwise. The circulation "at infinity"
//! is taken around the point at infinity, i.e. clockwise along a large circle.

use crate::stream::FlowSpec;

/// Solves `(2I - J/K) x = gamma + (vortex_sum + infinity)/K` in closed form.
///
/// With `A = 2I - J/K`, `A^{-1} = (I + J/K) / 2`, so
/// `x_j = (b_j + mean(b)) / 2`.
pub fn solve_center_strengths(gamma: &[f64], vortex_sum: f64, infinity: f64) -> Vec<f64> {
    let k = gamma.len();
    if k == 0 {
        return Vec::new();
    }
    let rhs = system_rhs(gamma, vortex_sum, infinity);
    let mean = rhs.iter().sum::<f64>() / k as f64;
    rhs.iter().map(|b| 0.5 * (b + mean)).collect()
}

/// Right-hand side `gamma_j + vortex_sum/K + infinity/K`.
pub fn system_rhs(gamma: &[f64], vortex_sum: f64, infinity: f64) -> Vec<f64> {
    let k = gamma.len() as f64;
    gamma.iter().map(|g| g + vortex_sum / k + infinity / k).collect()
}

/// Dense matrix of the system: `(2K-1)/K` on the diagonal, `-1/K` elsewhere.
pub fn system_matrix(k: usize) -> Vec<Vec<f64>> {
    let kf = k as f64;
    (0..k)
        .map(|i| {
            (0..k)
                .map(|j| if i == j { (2.0 * kf - 1.0) / kf } else { -1.0 / kf })
                .collect()
        })
        .collect()
}

/// Gaussian elimination with partial pivoting. Returns `None` for a
/// numerically singular matrix.
pub fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < f64::MIN_POSITIVE {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for j in col..n {
                a[row][j] -= f * a[col][j];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| a[i][j] * x[j]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some(x)
}

/// `max_j |(A x - b)_j|` for the center-strength system.
pub fn residual(x: &[f64], rhs: &[f64]) -> f64 {
    let k = x.len() as f64;
    let sum: f64 = x.iter().sum();
    x.iter()
        .zip(rhs)
        .map(|(xj, bj)| (2.0 * xj - sum / k - bj).abs())
        .fold(0.0, f64::max)
}

/// Circulation around each cylinder and around the point at infinity.
#[derive(Debug, Clone, PartialEq)]
pub struct CirculationLedger {
    pub per_cylinder: Vec<f64>,
    pub at_infinity: f64,
}

/// Circulations induced by finite vortices of total strength `vortex_sum`, a
/// vortex at infinity, and center vortices.
pub fn ledger_from_components(vortex_sum: f64, infinity: f64, centers: &[f64]) -> CirculationLedger {
    let k = centers.len();
    if k == 0 {
        return CirculationLedger {
            per_cylinder: Vec::new(),
            at_infinity: -vortex_sum,
        };
    }
    let kf = k as f64;
    let center_sum: f64 = centers.iter().sum();
    let per_cylinder = centers
        .iter()
        .map(|&g| {
            -vortex_sum / kf - infinity / kf + g * (2.0 * kf - 1.0) / kf - (center_sum - g) / kf
        })
        .collect();
    CirculationLedger {
        per_cylinder,
        at_infinity: infinity - center_sum,
    }
}

/// Circulation ledger implied by a flow specification.
pub fn predicted_ledger(spec: &FlowSpec) -> CirculationLedger {
    let centers = spec.center_strengths();
    if spec.domain.is_empty() {
        return CirculationLedger {
            per_cylinder: Vec::new(),
            at_infinity: -spec.vortex_circulation_sum(),
        };
    }
    ledger_from_components(spec.vortex_circulation_sum(), spec.infinity_circulation, &centers)
}
