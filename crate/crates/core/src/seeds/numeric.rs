//! Seeds for an arbitrary sampled potential, by direct integration of the
//! Schrodinger equation and its variational chain
//!
//! ```text
//! u'' = (V0 - eps) u
//! (d_eps^j u)'' = (V0 - eps) d_eps^j u - j d_eps^{j-1} u
//! ```
//!
//! v integrates the same second-order equation from initial data chosen so
//! W(u, v) = 1; the Wronskian is then conserved along x by the equation
//! itself (never computed from the quotient integral, which overflows).

use num_complex::Complex64;

use super::{FamilySpec, SeedDiagnostics, SeedEvaluation, SeedFamily, SeedRequest};
use crate::error::{Result, SusyError};
use crate::grid::SampledFunction;
use crate::stencil::DerivativeStencil;
use crate::tol::RESIDUAL_TOL_ANALYTIC;

/// Cubic Lagrange interpolation of potential samples at an off-grid point.
struct PotentialInterp<'a> {
    v: &'a [Complex64],
    x0: f64,
    h: f64,
}

impl<'a> PotentialInterp<'a> {
    fn at(&self, x: f64) -> Complex64 {
        let n = self.v.len();
        let t = (x - self.x0) / self.h;
        let i = (t.floor() as isize).clamp(1, n as isize - 3) as usize;
        let s = t - i as f64;
        // 4-point Lagrange weights on nodes {-1, 0, 1, 2} around i
        let wm1 = -s * (s - 1.0) * (s - 2.0) / 6.0;
        let w0 = (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0;
        let w1 = -(s + 1.0) * s * (s - 2.0) / 2.0;
        let w2 = (s + 1.0) * s * (s - 1.0) / 6.0;
        wm1 * self.v[i - 1] + w0 * self.v[i] + w1 * self.v[i + 1] + w2 * self.v[i + 2]
    }
}

/// State layout: for each of the k chain members of u then of v, a (value,
/// derivative) pair.
fn rhs(state: &[Complex64], vx: Complex64, eps: Complex64, k: usize, out: &mut [Complex64]) {
    let a = vx - eps;
    for half in 0..2 {
        let base = half * 2 * k;
        for j in 0..k {
            let idx = base + 2 * j;
            out[idx] = state[idx + 1];
            out[idx + 1] = a * state[idx]
                - if j > 0 {
                    j as f64 * state[idx - 2]
                } else {
                    Complex64::new(0.0, 0.0)
                };
        }
    }
}

fn rk4_step(
    state: &mut [Complex64],
    x: f64,
    h: f64,
    interp: &PotentialInterp,
    eps: Complex64,
    k: usize,
    scratch: &mut [Vec<Complex64>],
) {
    let n = state.len();
    let (v0, vh, v1) = (interp.at(x), interp.at(x + 0.5 * h), interp.at(x + h));
    let [k1, k2, k3, k4, tmp] = scratch else { unreachable!() };
    rhs(state, v0, eps, k, k1);
    for i in 0..n {
        tmp[i] = state[i] + 0.5 * h * k1[i];
    }
    rhs(tmp, vh, eps, k, k2);
    for i in 0..n {
        tmp[i] = state[i] + 0.5 * h * k2[i];
    }
    rhs(tmp, vh, eps, k, k3);
    for i in 0..n {
        tmp[i] = state[i] + h * k3[i];
    }
    rhs(tmp, v1, eps, k, k4);
    for i in 0..n {
        state[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
}

/// j-th epsilon-derivative of kappa_eff = sqrt(V0(x0) - eps).
fn kappa_derivatives(c_minus_eps: Complex64, k: usize) -> Vec<Complex64> {
    let kappa = c_minus_eps.sqrt();
    let mut out = Vec::with_capacity(k);
    out.push(kappa);
    let mut coeff = Complex64::new(1.0, 0.0);
    for j in 1..k {
        coeff *= 0.5 - (j as f64 - 1.0);
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        out.push(sign * coeff * c_minus_eps.powf(0.5 - j as f64));
    }
    out
}

fn integrate(
    req: &SeedRequest,
    potential: &SampledFunction,
    scale: f64,
) -> Result<(Vec<Vec<Complex64>>, Vec<Vec<Complex64>>)> {
    let grid = req.grid;
    let k = req.k;
    let n = grid.n_points();
    let eps = req.epsilon;
    let interp = PotentialInterp {
        v: potential.values(),
        x0: grid.x_min(),
        h: grid.spacing(),
    };

    // WKB-matched initial data at the left boundary
    let kappa_eff = {
        let c = potential.value(0) - eps;
        let r = c.sqrt();
        if r.re >= 0.0 {
            r
        } else {
            -r
        }
    };
    let kd = kappa_derivatives(potential.value(0) - eps, k);

    let mut state = vec![Complex64::new(0.0, 0.0); 4 * k];
    state[0] = Complex64::new(scale, 0.0); // u(x0)
    state[1] = kappa_eff * scale; // u'(x0)
    for j in 1..k {
        state[2 * j + 1] = kd[j] * scale; // d_eps^j u'(x0)
    }
    let vbase = 2 * k;
    state[vbase + 1] = Complex64::new(1.0 / scale, 0.0); // v'(x0) = 1/u(x0)

    let mut u_rows = vec![Vec::with_capacity(n); 2 * k]; // value+deriv interleave later
    let mut v_rows = vec![Vec::with_capacity(n); 2 * k];
    let mut scratch = vec![vec![Complex64::new(0.0, 0.0); 4 * k]; 5];
    const SUBSTEPS: usize = 2;
    for i in 0..n {
        for (r, row) in u_rows.iter_mut().enumerate() {
            row.push(state[r]);
        }
        for (r, row) in v_rows.iter_mut().enumerate() {
            row.push(state[vbase + r]);
        }
        if i + 1 < n {
            let x = grid.x(i);
            let h = (grid.x(i + 1) - x) / SUBSTEPS as f64;
            for s in 0..SUBSTEPS {
                rk4_step(&mut state, x + s as f64 * h, h, &interp, eps, k, &mut scratch);
            }
            let bad = state.iter().any(|z| !z.re.is_finite() || !z.im.is_finite())
                || state.iter().any(|z| z.norm() > 1e160);
            if bad {
                return Err(SusyError::Overflow);
            }
        }
    }
    Ok((u_rows, v_rows))
}

/// Builds seeds on a sampled potential. On overflow the integration is
/// rescaled once (an overall basis scale drops out of every V_k) and retried.
pub fn numeric_seed(req: &SeedRequest) -> Result<SeedEvaluation> {
    let potential = match &req.family {
        FamilySpec::Numeric { potential } => potential,
        _ => return Err(SusyError::MissingPotential),
    };
    if req.k < 2 {
        return Err(SusyError::Invalid(format!("chain order must be >= 2, got {}", req.k)));
    }
    if potential.grid() != req.grid {
        return Err(SusyError::GridMismatch);
    }
    if !potential.is_finite() {
        return Err(SusyError::NonFinite { index: 0 });
    }

    let attempt = integrate(req, potential, 1.0);
    let (u_rows, v_rows) = match attempt {
        Ok(rows) => rows,
        Err(SusyError::Overflow) => {
            let kappa = (potential.value(0) - req.epsilon).sqrt().norm();
            let scale = (-kappa * 0.5 * (req.grid.x_max() - req.grid.x_min()))
                .exp()
                .max(1e-150);
            integrate(req, potential, scale)?
        }
        Err(e) => return Err(e),
    };

    let grid = req.grid;
    let k = req.k;
    let pack = |rows: Vec<Vec<Complex64>>| -> Result<(Vec<SampledFunction>, Vec<SampledFunction>)> {
        let mut vals = Vec::with_capacity(k);
        let mut ders = Vec::with_capacity(k);
        for (r, row) in rows.into_iter().enumerate() {
            if r % 2 == 0 {
                vals.push(SampledFunction::new(grid, row)?);
            } else {
                ders.push(SampledFunction::new(grid, row)?);
            }
        }
        Ok((vals, ders))
    };
    let (u, ux) = pack(u_rows)?;
    let (v, vx) = pack(v_rows)?;

    let v0_x = DerivativeStencil::default_for(1).apply(potential)?;
    let mut seed = SeedEvaluation {
        family: SeedFamily::NumericPotential,
        epsilon: req.epsilon,
        grid,
        u,
        v,
        ux,
        vx,
        v0: potential.clone(),
        v0_x,
        lattice: None,
        delta: None,
        diagnostics: SeedDiagnostics::default(),
    };
    seed.validate(RESIDUAL_TOL_ANALYTIC.max(1e-6))?;
    Ok(seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use crate::seeds::parametric_link_residual;

    fn flat_request(eps: f64, k: usize) -> SeedRequest {
        let grid = make_grid(-8.0, 8.0, 2001).unwrap();
        SeedRequest {
            family: FamilySpec::Numeric {
                potential: SampledFunction::zeros(grid),
            },
            epsilon: Complex64::new(eps, 0.0),
            k,
            grid,
        }
    }

    #[test]
    fn wronskian_enforced_by_construction() {
        let seed = numeric_seed(&flat_request(-1.0, 3)).unwrap();
        assert!(seed.diagnostics.wronskian_deviation < 1e-8);
    }

    #[test]
    fn reproduces_free_exponential_up_to_normalization() {
        let seed = numeric_seed(&flat_request(-1.0, 2)).unwrap();
        // u should equal e^{x - x0} exactly for V0 = 0
        let x0 = seed.grid.x_min();
        let mut worst = 0.0f64;
        for (i, x) in seed.grid.points().enumerate() {
            let expect = (x - x0).exp();
            worst = worst.max((seed.u[0].value(i).re - expect).abs() / expect);
        }
        assert!(worst < 1e-8, "relative error {worst}");
    }

    #[test]
    fn jordan_residual_of_first_derivative() {
        let seed = numeric_seed(&flat_request(-1.0, 2)).unwrap();
        // ||(H - eps) d_eps u - u|| / ||u|| < 1e-6
        let r = parametric_link_residual(&seed.u[1], &seed.u[0], &seed.v0, seed.epsilon, 1)
            .unwrap();
        assert!(r < 1e-6, "residual {r}");
    }

    #[test]
    fn sech_well_seed_integrates() {
        let grid = make_grid(-10.0, 10.0, 3001).unwrap();
        let pot = SampledFunction::from_real_fn(grid, |x| {
            let s = 1.0 / x.cosh();
            -2.0 * s * s
        })
        .unwrap();
        let req = SeedRequest {
            family: FamilySpec::Numeric { potential: pot },
            epsilon: Complex64::new(-2.25, 0.0),
            k: 3,
            grid,
        };
        let seed = numeric_seed(&req).unwrap();
        assert!(seed.diagnostics.residual_u < 1e-6);
        for j in 1..=2 {
            let r = parametric_link_residual(&seed.u[j], &seed.u[j - 1], &seed.v0, seed.epsilon, j)
                .unwrap();
            assert!(r < 1e-5, "link {j}: {r}");
        }
    }
}
