//! Seed pairs (u, v) with W(u, v) = 1 and their energy derivatives, for the
//! three families the transformation engine accepts.

mod free;
mod lame;
mod numeric;

pub use free::free_seed;
pub use lame::{bloch_multiplier, delta_on_segment, epsilon_from_delta, lame_bloch_seed,
    lame_delta_from_epsilon, quasimomentum, Segment};
pub use numeric::numeric_seed;

use num_complex::Complex64;

use crate::elliptic::LatticeData;
use crate::error::{Result, SusyError};
use crate::grid::{Grid, SampledFunction};
use crate::stencil::DerivativeStencil;
use crate::tol::SEED_WRONSKIAN_TOL;

/// Which analytic family a seed came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedFamily {
    FreeParticle,
    Lame,
    NumericPotential,
}

/// What to build a seed from.
#[derive(Debug, Clone)]
pub enum FamilySpec {
    /// V0 = 0 on the whole line.
    FreeParticle,
    /// Single-gap Lame potential V0 = 2 m sn^2(x|m).
    Lame { m: f64 },
    /// Arbitrary sampled potential, integrated numerically.
    Numeric { potential: SampledFunction },
}

/// A request for a seed evaluation of chain order `k` (derivatives up to
/// order `k - 1` are produced).
#[derive(Debug, Clone)]
pub struct SeedRequest {
    pub family: FamilySpec,
    pub epsilon: Complex64,
    pub k: usize,
    pub grid: Grid,
}

/// Construction-time cross-checks stored with every seed.
#[derive(Debug, Clone, Default)]
pub struct SeedDiagnostics {
    /// max |W(u, v) - 1| over the grid
    pub wronskian_deviation: f64,
    /// sup-norm Schrodinger residuals of u and v, relative to sup |u|, |v|
    pub residual_u: f64,
    pub residual_v: f64,
    /// Lame only: agreement of the analytic d_delta u with its finite
    /// difference counterpart (relative)
    pub first_derivative_crosscheck: f64,
}

/// Samples of u, v and their x- and epsilon-derivatives up to order k-1.
#[derive(Debug, Clone)]
pub struct SeedEvaluation {
    pub family: SeedFamily,
    pub epsilon: Complex64,
    pub grid: Grid,
    /// `u[j]` holds the j-th epsilon-derivative of u.
    pub u: Vec<SampledFunction>,
    pub v: Vec<SampledFunction>,
    /// x-derivatives of the entries of `u` / `v`, same indexing.
    pub ux: Vec<SampledFunction>,
    pub vx: Vec<SampledFunction>,
    /// Potential samples and their first x-derivative on the grid.
    pub v0: SampledFunction,
    pub v0_x: SampledFunction,
    pub lattice: Option<LatticeData>,
    pub delta: Option<Complex64>,
    pub diagnostics: SeedDiagnostics,
}

impl SeedEvaluation {
    /// Highest available epsilon-derivative order.
    pub fn max_order(&self) -> usize {
        self.u.len() - 1
    }

    pub fn require_order(&self, need: usize) -> Result<()> {
        if self.max_order() < need {
            return Err(SusyError::DerivativeOrderMismatch {
                have: self.max_order(),
                need,
            });
        }
        Ok(())
    }

    /// W(u, v) - 1 deviation plus Schrodinger residuals; called by the family
    /// builders before a seed is released.
    pub(crate) fn validate(&mut self, residual_tol: f64) -> Result<()> {
        let mut dev = 0.0f64;
        for i in 0..self.grid.n_points() {
            let w = self.u[0].value(i) * self.vx[0].value(i)
                - self.ux[0].value(i) * self.v[0].value(i);
            dev = dev.max((w - 1.0).norm());
        }
        self.diagnostics.wronskian_deviation = dev;
        if dev > SEED_WRONSKIAN_TOL {
            return Err(SusyError::WronskianNotUnit(dev));
        }

        self.diagnostics.residual_u = schrodinger_residual(&self.u[0], &self.v0, self.epsilon)?;
        self.diagnostics.residual_v = schrodinger_residual(&self.v[0], &self.v0, self.epsilon)?;
        let worst = self.diagnostics.residual_u.max(self.diagnostics.residual_v);
        if worst > residual_tol {
            return Err(SusyError::ResidualTooLarge {
                residual: worst,
                tol: residual_tol,
            });
        }
        Ok(())
    }
}

/// Sup-norm of `(-d^2/dx^2 + V0 - eps) f` relative to sup |f|, with the
/// second derivative from the default stencil.
pub fn schrodinger_residual(
    f: &SampledFunction,
    v0: &SampledFunction,
    epsilon: Complex64,
) -> Result<f64> {
    let d2 = DerivativeStencil::default_for(2).apply(f)?;
    let mut worst = 0.0f64;
    for i in 0..f.len() {
        let r = -d2.value(i) + (v0.value(i) - epsilon) * f.value(i);
        worst = worst.max(r.norm());
    }
    Ok(worst / f.max_abs().max(1e-300))
}

/// Residual of the parametric chain link `(H - eps) d_eps^j f / j = d_eps^{j-1} f`,
/// relative to the larger of the two sup-norms.
pub fn parametric_link_residual(
    f_j: &SampledFunction,
    f_jm1: &SampledFunction,
    v0: &SampledFunction,
    epsilon: Complex64,
    j: usize,
) -> Result<f64> {
    let d2 = DerivativeStencil::default_for(2).apply(f_j)?;
    let mut worst = 0.0f64;
    for i in 0..f_j.len() {
        let lhs = (-d2.value(i) + (v0.value(i) - epsilon) * f_j.value(i)) / j as f64;
        worst = worst.max((lhs - f_jm1.value(i)).norm());
    }
    Ok(worst / f_j.max_abs().max(f_jm1.max_abs()).max(1e-300))
}

/// Dispatches on the family.
pub fn build_seed(req: &SeedRequest) -> Result<SeedEvaluation> {
    match &req.family {
        FamilySpec::FreeParticle => free_seed(req),
        FamilySpec::Lame { .. } => lame_bloch_seed(req),
        FamilySpec::Numeric { .. } => numeric_seed(req),
    }
}
