//! Free-particle seeds: u = e^{kappa x}, v = -e^{-kappa x}/(2 kappa) with
//! eps = -kappa^2.
//!
//! Every epsilon-derivative is a polynomial in x and 1/kappa times the same
//! exponential, so the derivatives are generated by an exact coefficient
//! recursion (d_eps = -(1/(2 kappa)) d_kappa) instead of finite differences.
//! This family is the precision anchor for the whole pipeline.

use num_complex::Complex64;

use super::{FamilySpec, SeedDiagnostics, SeedEvaluation, SeedFamily, SeedRequest};
use crate::error::{Result, SusyError};
use crate::grid::SampledFunction;
use crate::tol::RESIDUAL_TOL_ANALYTIC;

/// One monomial c * x^xp * kappa^kp attached to e^{sign * kappa * x}.
#[derive(Debug, Clone, Copy)]
struct Term {
    c: f64,
    xp: u32,
    kp: i32,
}

/// f = e^{sign kappa x} * sum of terms. The coefficient arithmetic below only
/// multiplies by integers and powers of 1/2, so it stays exact in f64.
#[derive(Debug, Clone)]
pub(crate) struct ExpPoly {
    sign: f64,
    terms: Vec<Term>,
}

impl ExpPoly {
    fn seed_u() -> Self {
        ExpPoly {
            sign: 1.0,
            terms: vec![Term { c: 1.0, xp: 0, kp: 0 }],
        }
    }

    fn seed_v() -> Self {
        ExpPoly {
            sign: -1.0,
            terms: vec![Term { c: -0.5, xp: 0, kp: -1 }],
        }
    }

    fn collect(mut self) -> Self {
        self.terms.sort_by_key(|t| (t.xp, t.kp));
        let mut merged: Vec<Term> = Vec::with_capacity(self.terms.len());
        for t in self.terms {
            match merged.last_mut() {
                Some(last) if last.xp == t.xp && last.kp == t.kp => last.c += t.c,
                _ => merged.push(t),
            }
        }
        merged.retain(|t| t.c != 0.0);
        ExpPoly {
            sign: self.sign,
            terms: merged,
        }
    }

    fn d_kappa(&self) -> Self {
        let mut terms = Vec::with_capacity(3 * self.terms.len());
        for t in &self.terms {
            if t.xp > 0 {
                // nothing: x-power does not move under d_kappa
            }
            if t.kp != 0 {
                terms.push(Term {
                    c: t.c * t.kp as f64,
                    xp: t.xp,
                    kp: t.kp - 1,
                });
            }
            terms.push(Term {
                c: t.c * self.sign,
                xp: t.xp + 1,
                kp: t.kp,
            });
        }
        ExpPoly {
            sign: self.sign,
            terms,
        }
        .collect()
    }

    /// d_eps = -(1/(2 kappa)) d_kappa
    pub(crate) fn d_eps(&self) -> Self {
        let d = self.d_kappa();
        ExpPoly {
            sign: d.sign,
            terms: d
                .terms
                .iter()
                .map(|t| Term {
                    c: -0.5 * t.c,
                    xp: t.xp,
                    kp: t.kp - 1,
                })
                .collect(),
        }
    }

    pub(crate) fn d_x(&self) -> Self {
        let mut terms = Vec::with_capacity(2 * self.terms.len());
        for t in &self.terms {
            if t.xp > 0 {
                terms.push(Term {
                    c: t.c * t.xp as f64,
                    xp: t.xp - 1,
                    kp: t.kp,
                });
            }
            terms.push(Term {
                c: t.c * self.sign,
                xp: t.xp,
                kp: t.kp + 1,
            });
        }
        ExpPoly {
            sign: self.sign,
            terms,
        }
        .collect()
    }

    pub(crate) fn eval(&self, x: f64, kappa: f64) -> f64 {
        let mut poly = 0.0;
        for t in &self.terms {
            poly += t.c * x.powi(t.xp as i32) * kappa.powi(t.kp);
        }
        poly * (self.sign * kappa * x).exp()
    }
}

/// Builds the free-particle seed with derivatives up to order k-1.
pub fn free_seed(req: &SeedRequest) -> Result<SeedEvaluation> {
    if !matches!(req.family, FamilySpec::FreeParticle) {
        return Err(SusyError::Invalid("free_seed called with a non-free family".into()));
    }
    if req.k < 2 {
        return Err(SusyError::Invalid(format!("chain order must be >= 2, got {}", req.k)));
    }
    if req.epsilon.im.abs() > 1e-12 * req.epsilon.re.abs().max(1.0) || req.epsilon.re >= 0.0 {
        return Err(SusyError::EpsilonNotNegative(req.epsilon.re));
    }
    let kappa = (-req.epsilon.re).sqrt();
    let grid = req.grid;

    let mut u_sym = vec![ExpPoly::seed_u()];
    let mut v_sym = vec![ExpPoly::seed_v()];
    for j in 1..req.k {
        u_sym.push(u_sym[j - 1].d_eps());
        v_sym.push(v_sym[j - 1].d_eps());
    }

    let eval = |p: &ExpPoly| -> Result<SampledFunction> {
        SampledFunction::from_real_fn(grid, |x| p.eval(x, kappa))
    };

    let mut u = Vec::with_capacity(req.k);
    let mut v = Vec::with_capacity(req.k);
    let mut ux = Vec::with_capacity(req.k);
    let mut vx = Vec::with_capacity(req.k);
    for j in 0..req.k {
        u.push(eval(&u_sym[j])?);
        v.push(eval(&v_sym[j])?);
        ux.push(eval(&u_sym[j].d_x())?);
        vx.push(eval(&v_sym[j].d_x())?);
    }

    let v0 = SampledFunction::zeros(grid);
    let v0_x = SampledFunction::zeros(grid);
    let mut seed = SeedEvaluation {
        family: SeedFamily::FreeParticle,
        epsilon: Complex64::new(req.epsilon.re, 0.0),
        grid,
        u,
        v,
        ux,
        vx,
        v0,
        v0_x,
        lattice: None,
        delta: None,
        diagnostics: SeedDiagnostics::default(),
    };
    seed.validate(RESIDUAL_TOL_ANALYTIC)?;
    Ok(seed)
}
