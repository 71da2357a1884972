//! High-order finite-difference stencils on uniform grids.
//!
//! Weights come from Fornberg's recursion, so they are exact for polynomials
//! up to the window degree. Interior rows use (near-)centered windows; rows
//! near the boundary reuse the same window size shifted inward, which keeps
//! the formal accuracy order on the full grid. The outermost few points still
//! carry the largest constants in front of the truncation error.

use num_complex::Complex64;

use crate::error::{Result, SusyError};
use crate::grid::SampledFunction;
use crate::tol::ZERO_THRESHOLD_FACTOR;

/// Finite-difference weights for one derivative order at every window offset.
#[derive(Debug, Clone)]
pub struct DerivativeStencil {
    order: usize,
    accuracy: usize,
    window: usize,
    /// `rows[p]` holds the weights for evaluating at offset `p` of the window.
    rows: Vec<Vec<f64>>,
}

/// Fornberg weights for the `m`-th derivative at `x0` over the given nodes.
fn fornberg_weights(x0: f64, nodes: &[f64], m: usize) -> Vec<f64> {
    let n = nodes.len();
    let mut c = vec![vec![0.0f64; m + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.iter().map(|row| row[m]).collect()
}

impl DerivativeStencil {
    /// Builds the stencil table for derivative `order` (1 or 2) with the given
    /// even accuracy (>= 4).
    pub fn new(order: usize, accuracy: usize) -> Result<Self> {
        if order != 1 && order != 2 {
            return Err(SusyError::Invalid(format!(
                "derivative order must be 1 or 2, got {order}"
            )));
        }
        if accuracy < 4 || accuracy % 2 != 0 {
            return Err(SusyError::Invalid(format!(
                "stencil accuracy must be an even integer >= 4, got {accuracy}"
            )));
        }
        let window = order + accuracy;
        let nodes: Vec<f64> = (0..window).map(|i| i as f64).collect();
        let rows = (0..window)
            .map(|p| fornberg_weights(p as f64, &nodes, order))
            .collect();
        Ok(DerivativeStencil {
            order,
            accuracy,
            window,
            rows,
        })
    }

    /// Default accuracy-6 stencil, the workhorse for all residual checks.
    pub fn default_for(order: usize) -> Self {
        DerivativeStencil::new(order, 6).expect("valid default stencil")
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn accuracy(&self) -> usize {
        self.accuracy
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn weights(&self, offset: usize) -> &[f64] {
        &self.rows[offset]
    }

    /// Applies the stencil to sampled data.
    pub fn apply(&self, f: &SampledFunction) -> Result<SampledFunction> {
        let grid = f.grid();
        let n = grid.n_points();
        if n < self.window {
            return Err(SusyError::TooFewPoints {
                min: self.window,
                got: n,
            });
        }
        let scale = grid.spacing().powi(self.order as i32);
        let vals = f.values();
        let half = self.window / 2;
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let start = i.saturating_sub(half).min(n - self.window);
            let p = i - start;
            let mut acc = Complex64::new(0.0, 0.0);
            for (w, &v) in self.rows[p].iter().zip(&vals[start..start + self.window]) {
                acc += *w * v;
            }
            out.push(acc / scale);
        }
        SampledFunction::new(grid, out)
    }
}

/// Derivative of sampled data using the given stencil.
pub fn differentiate(f: &SampledFunction, stencil: &DerivativeStencil) -> Result<SampledFunction> {
    stencil.apply(f)
}

/// `d^2/dx^2 ln W` computed from the ratio form `(W'' W - W'^2)/W^2`, never
/// through a complex logarithm. Rejects a `W` that dips below the zero
/// threshold, reporting the bracketing interval of the crossing.
pub fn second_log_derivative(w: &SampledFunction) -> Result<SampledFunction> {
    let max = w.max_abs();
    let threshold = ZERO_THRESHOLD_FACTOR * max;
    if let Some((x_lo, x_hi)) = first_zero_bracket(w, threshold) {
        return Err(SusyError::WronskianZero { x_lo, x_hi });
    }
    let d1 = DerivativeStencil::default_for(1).apply(w)?;
    let d2 = DerivativeStencil::default_for(2).apply(w)?;
    second_log_derivative_from_parts(w, &d1, &d2)
}

/// Ratio form with externally supplied derivatives (used when `W'`, `W''`
/// are available analytically).
pub fn second_log_derivative_from_parts(
    w: &SampledFunction,
    w_x: &SampledFunction,
    w_xx: &SampledFunction,
) -> Result<SampledFunction> {
    if w.grid() != w_x.grid() || w.grid() != w_xx.grid() {
        return Err(SusyError::GridMismatch);
    }
    let values = w
        .values()
        .iter()
        .zip(w_x.values())
        .zip(w_xx.values())
        .map(|((&wv, &dv), &ddv)| (ddv * wv - dv * dv) / (wv * wv))
        .collect();
    Ok(SampledFunction::new_unchecked(w.grid(), values))
}

/// First interval on which `|W|` dips under `threshold` or the real part of a
/// (numerically real) `W` changes sign.
pub fn first_zero_bracket(w: &SampledFunction, threshold: f64) -> Option<(f64, f64)> {
    let grid = w.grid();
    let vals = w.values();
    for i in 0..vals.len() {
        if vals[i].norm() <= threshold {
            let lo = if i == 0 { 0 } else { i - 1 };
            let hi = (i + 1).min(vals.len() - 1);
            return Some((grid.x(lo), grid.x(hi)));
        }
        if i + 1 < vals.len() && vals[i].re.signum() != vals[i + 1].re.signum() {
            return Some((grid.x(i), grid.x(i + 1)));
        }
    }
    None
}
