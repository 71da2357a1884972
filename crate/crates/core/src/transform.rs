//! The potential deformation V_k = V0 - 2 (ln W_k)'' and the added state
//! psi_k = W_{k-1} / W_k.
//!
//! A Wronskian that crosses zero does not abort the transformation: the
//! result is returned with the crossings bracketed (parameter scans must
//! record singular regions) and the sampled V_k / psi_k simply blow up near
//! the crossing.

use num_complex::Complex64;

use crate::error::{Result, SusyError};
use crate::grid::SampledFunction;
use crate::stencil::DerivativeStencil;
use crate::tol::ZERO_THRESHOLD_FACTOR;
use crate::wronskian::WronskianBundle;

/// Square-integrability classification of an added state over the window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalizability {
    /// decaying tails: counts as an added level
    Physical,
    /// growing or non-convergent tails: a mathematical solution only
    Mathematical,
}

#[derive(Debug, Clone, Default)]
pub struct TransformDiagnostics {
    /// per-link chain-closure residuals (filled by the pipeline)
    pub chain_residuals: Vec<f64>,
    /// worst pairwise method deviation, when several methods were run
    pub method_crosscheck: Option<f64>,
    /// relative Schrodinger residual of psi_k in V_k (non-singular runs only)
    pub psi_residual: Option<f64>,
    /// max |Im V_k| / scale and max |Im psi_k| / scale
    pub max_imag_vk: f64,
    pub max_imag_psi: f64,
    /// min |W_k| / max |W_k| over the grid
    pub min_abs_w_rel: f64,
}

/// Everything a transformation produces.
#[derive(Debug, Clone)]
pub struct TransformResult {
    pub v0: SampledFunction,
    pub vk: SampledFunction,
    pub psi_k: SampledFunction,
    pub w_k: SampledFunction,
    /// bracketing intervals of the Wronskian zeros; empty means non-singular
    pub singularities: Vec<(f64, f64)>,
    pub epsilon: Complex64,
    pub diagnostics: TransformDiagnostics,
}

impl TransformResult {
    pub fn is_singular(&self) -> bool {
        !self.singularities.is_empty()
    }
}

/// All bracketing intervals on which |W| dips under the zero threshold or the
/// real part changes sign. Overlapping brackets are merged.
pub fn zero_brackets(w: &SampledFunction, threshold: f64) -> Vec<(f64, f64)> {
    let grid = w.grid();
    let vals = w.values();
    let n = vals.len();
    let mut raw: Vec<(usize, usize)> = Vec::new();
    for i in 0..n {
        if vals[i].norm() <= threshold {
            raw.push((i.saturating_sub(1), (i + 1).min(n - 1)));
        }
        if i + 1 < n
            && vals[i].norm() > threshold
            && vals[i + 1].norm() > threshold
            && vals[i].re.signum() != vals[i + 1].re.signum()
        {
            raw.push((i, i + 1));
        }
    }
    let mut merged: Vec<(usize, usize)> = Vec::new();
    for (lo, hi) in raw {
        match merged.last_mut() {
            Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
            _ => merged.push((lo, hi)),
        }
    }
    merged.iter().map(|&(a, b)| (grid.x(a), grid.x(b))).collect()
}

/// Applies the deformation. `W'`, `W''` come from the bundle when the reduced
/// route supplied them analytically, otherwise from stencils.
pub fn transform(v0: &SampledFunction, bundle: &WronskianBundle) -> Result<TransformResult> {
    if v0.grid() != bundle.w_k.grid() {
        return Err(SusyError::GridMismatch);
    }
    let w = &bundle.w_k;
    let n = w.len();
    let w_max = w.max_abs();
    let threshold = ZERO_THRESHOLD_FACTOR * w_max;
    let singularities = zero_brackets(w, threshold);

    let wx = match &bundle.w_k_x {
        Some(d) => d.clone(),
        None => DerivativeStencil::default_for(1).apply(w)?,
    };
    let wxx = match &bundle.w_k_xx {
        Some(d) => d.clone(),
        None => DerivativeStencil::default_for(2).apply(w)?,
    };

    let mut vk_vals = Vec::with_capacity(n);
    for i in 0..n {
        let wv = w.value(i);
        let log2 = (wxx.value(i) * wv - wx.value(i) * wx.value(i)) / (wv * wv);
        vk_vals.push(v0.value(i) - 2.0 * log2);
    }
    let vk = SampledFunction::new_unchecked(v0.grid(), vk_vals);
    let psi_k = added_state(bundle)?;

    let vk_scale = finite_max_abs(&vk);
    let psi_scale = finite_max_abs(&psi_k);
    let diagnostics = TransformDiagnostics {
        max_imag_vk: finite_max_imag(&vk) / vk_scale.max(1e-300),
        max_imag_psi: finite_max_imag(&psi_k) / psi_scale.max(1e-300),
        min_abs_w_rel: w.min_abs() / w_max.max(1e-300),
        ..Default::default()
    };

    Ok(TransformResult {
        v0: v0.clone(),
        vk,
        psi_k,
        w_k: w.clone(),
        singularities,
        epsilon: bundle.epsilon,
        diagnostics,
    })
}

fn finite_max_abs(f: &SampledFunction) -> f64 {
    f.values()
        .iter()
        .filter(|v| v.re.is_finite() && v.im.is_finite())
        .fold(0.0f64, |m, v| m.max(v.norm()))
}

fn finite_max_imag(f: &SampledFunction) -> f64 {
    f.values()
        .iter()
        .filter(|v| v.re.is_finite() && v.im.is_finite())
        .fold(0.0f64, |m, v| m.max(v.im.abs()))
}

/// psi_k = W(u_1..u_{k-1}) / W(u_1..u_k), unnormalized.
pub fn added_state(bundle: &WronskianBundle) -> Result<SampledFunction> {
    let vals = (0..bundle.w_k.len())
        .map(|i| bundle.w_km1.value(i) / bundle.w_k.value(i))
        .collect();
    Ok(SampledFunction::new_unchecked(bundle.w_k.grid(), vals))
}

/// Relative Schrodinger residual of psi in the deformed potential:
/// `||(-d2 + V_k - eps) psi||_inf / ||psi||_inf`.
pub fn added_state_residual(
    psi: &SampledFunction,
    vk: &SampledFunction,
    epsilon: Complex64,
) -> Result<f64> {
    let d2 = DerivativeStencil::default_for(2).apply(psi)?;
    let mut worst = 0.0f64;
    for i in 0..psi.len() {
        let r = -d2.value(i) + (vk.value(i) - epsilon) * psi.value(i);
        worst = worst.max(r.norm());
    }
    Ok(worst / psi.max_abs().max(1e-300))
}

/// Tail-mass classification: the trapezoid integral of |psi|^2 over the full
/// window against the inner 80%, plus an endpoint amplitude check.
pub fn normalizability_check(psi: &SampledFunction) -> Normalizability {
    let n = psi.len();
    let h = psi.grid().spacing();
    let weight = |i: usize| if i == 0 || i + 1 == n { 0.5 } else { 1.0 };
    let mut full = 0.0;
    for i in 0..n {
        full += weight(i) * psi.value(i).norm_sqr() * h;
    }
    let margin = n / 10;
    let mut inner = 0.0;
    for i in margin..(n - margin) {
        inner += psi.value(i).norm_sqr() * h;
    }
    let tail_fraction = if full > 0.0 { (full - inner) / full } else { 1.0 };
    let peak = psi.max_abs();
    let endpoint = psi.value(0).norm().max(psi.value(n - 1).norm());
    if tail_fraction < 0.25 && endpoint < 0.2 * peak {
        Normalizability::Physical
    } else {
        Normalizability::Mathematical
    }
}
