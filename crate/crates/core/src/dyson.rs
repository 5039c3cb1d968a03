//! Truncated Dyson series by nested left-endpoint Riemann sums.
//!
//! Serves as an oracle for [`crate::dynamics::propagator_ket`] that shares no
//! code with the RK4 path. With nodes `s_j = t0 + j·h`, the n-th term obeys
//!
//! ```text
//! T_0(s_j) = 1,   T_n(s_{j+1}) = T_n(s_j) + h·(−i)H(s_j)·T_{n−1}(s_j)
//! ```
//!
//! so all orders are accumulated in a single sweep over the nodes.

use crate::dynamics::{propagator_ket, TimeDependentOperator, TimeGrid};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};

pub fn dyson_truncation(
    h: &TimeDependentOperator,
    t0: f64,
    t: f64,
    order: usize,
    quadrature_steps: usize,
) -> Result<ComplexMatrix> {
    if quadrature_steps == 0 {
        return Err(Error::InvalidGrid("quadrature_steps must be positive".into()));
    }
    let dim = h.dim();
    // terms[n] = T_n at the current node
    let mut terms: Vec<ComplexMatrix> = (0..=order)
        .map(|n| {
            if n == 0 {
                ComplexMatrix::identity(dim)
            } else {
                ComplexMatrix::zeros(dim)
            }
        })
        .collect();
    let step = (t - t0) / quadrature_steps as f64;
    let weight = C64::new(0.0, -step);
    for j in 0..quadrature_steps {
        let s = t0 + j as f64 * step;
        let hs = h.checked_value_at(s)?.scale(weight);
        for n in (1..=order).rev() {
            let inc = &hs * &terms[n - 1];
            terms[n] = &terms[n] + &inc;
        }
    }
    let mut sum = ComplexMatrix::zeros(dim);
    for term in &terms {
        sum = &sum + term;
    }
    Ok(sum)
}

/// Horizons, in units of `1/‖H‖₁`, used by [`fitted_remainder_order`].
pub const ORDER_FIT_HORIZONS: [f64; 4] = [1.6, 0.8, 0.4, 0.2];

/// Quadrature steps at the shortest horizon for [`fitted_remainder_order`];
/// keeps the Riemann-sum error well below the truncation remainder.
pub const ORDER_FIT_QUADRATURE: usize = 1 << 18;

/// Least-squares slope of `log‖U(τ) − D_n(τ)‖` against `log τ` over
/// `horizons`, where `U` comes from the RK4 propagator and `D_n` is the
/// order-`n` Dyson truncation of the constant generator `h`. An order-`n`
/// truncation should give a slope near `n + 1`.
///
/// The Riemann error of the second-order term scales as `τ²/N` against a
/// remainder of `τ^{n+1}`, so longer horizons get `N·(τ_min/τ)^{n−1}` steps
/// (at least 512).
pub fn fitted_remainder_order(
    h: &ComplexMatrix,
    order: usize,
    horizons: &[f64],
    quadrature_steps: usize,
) -> Result<f64> {
    if horizons.len() < 2 {
        return Err(Error::InvalidGrid("at least two horizons are needed".into()));
    }
    let scale = h.norm_one();
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let op = TimeDependentOperator::constant(h.clone());
    let shortest = horizons.iter().copied().fold(f64::INFINITY, f64::min);
    let mut points = Vec::with_capacity(horizons.len());
    for &x in horizons {
        let ratio = (shortest / x).powi(order.max(1) as i32 - 1);
        let steps = ((quadrature_steps as f64 * ratio) as usize).max(512);
        let tau = x / scale;
        let grid = TimeGrid::new(0.0, tau, tau / 512.0)?;
        let exact = propagator_ket(&op, &grid)?.pop().expect("grid has points");
        let approx = dyson_truncation(&op, 0.0, tau, order, steps)?;
        let err = exact.max_abs_diff(&approx);
        if !(err > 0.0) {
            return Err(Error::InvalidGrid(format!("remainder vanished at horizon {tau}")));
        }
        points.push((tau.ln(), err.ln()));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(sxy / sxx)
}
