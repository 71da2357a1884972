//! Bloch seeds for the single-gap Lame potential V0 = 2 m sn^2(x|m).
//!
//! The seed pair is the Bloch solution at displacement delta and its
//! Wronskian-normalized partner,
//!
//! ```text
//! u(x) = sigma(x+w'+d) sigma(w') / (sigma(x+w') sigma(w'+d)) e^{-x zeta(d)}
//! v(x) = -sigma(w'+d) sigma(x+w'-d) / (sigma(w') sigma(d)^2 wp'(d) sigma(x+w')) e^{x zeta(d)}
//! ```
//!
//! normalized so u(0) = 1 and W(u, v) = 1 exactly. With that normalization
//! the pair is real on both gap segments and the analytic displacement
//! derivative is
//!
//! ```text
//! d_delta u = [zeta(x+d+w') - zeta(d+w') + x wp(d)] u .
//! ```
//!
//! The energy and the displacement are linked by eps = (2/3)(m+1) - wp(delta);
//! first epsilon-derivatives are exact via the chain rule, orders 2 and 3 come
//! from Richardson-extrapolated finite differences in delta applied to the
//! analytic first derivative.

use num_complex::Complex64;

use super::{FamilySpec, SeedDiagnostics, SeedEvaluation, SeedFamily, SeedRequest};
use crate::elliptic::{jacobi_sncndn, LatticeData};
use crate::error::{Result, SusyError};
use crate::grid::SampledFunction;
use crate::tol::{BAND_MARGIN, LAME_DELTA_FD_STEP, RESIDUAL_TOL_ANALYTIC};

/// Real-parametrized segments of the fundamental cell on which wp is real.
///
/// The gaps of Sp(H) live on `LowerGap` and `BandGap`; the allowed bands on
/// `Valence` and `Conduction`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Segment {
    /// delta = t, t in (0, omega); wp decreasing from +inf to e1
    LowerGap,
    /// delta = omega + i y; wp in (e2, e1)
    Valence,
    /// delta = omega' + t; wp in (e3, e2)
    BandGap,
    /// delta = i y; wp in (-inf, e3)
    Conduction,
}

impl Segment {
    fn delta_at(&self, lat: &LatticeData, t: f64) -> Complex64 {
        match self {
            Segment::LowerGap => Complex64::new(t, 0.0),
            Segment::Valence => Complex64::new(lat.omega(), t),
            Segment::BandGap => lat.omega_prime() + t,
            Segment::Conduction => Complex64::new(0.0, t),
        }
    }

    fn direction(&self) -> Complex64 {
        match self {
            Segment::LowerGap | Segment::BandGap => Complex64::new(1.0, 0.0),
            Segment::Valence | Segment::Conduction => Complex64::new(0.0, 1.0),
        }
    }

    fn t_max(&self, lat: &LatticeData) -> f64 {
        match self {
            Segment::LowerGap | Segment::BandGap => lat.omega(),
            Segment::Valence | Segment::Conduction => lat.omega_prime().im,
        }
    }

    /// Picks the segment from where the target wp value sits relative to the
    /// branch points.
    pub fn for_wp_target(lat: &LatticeData, target: f64) -> Option<Segment> {
        if target > lat.e1() {
            Some(Segment::LowerGap)
        } else if target > lat.e2() {
            Some(Segment::Valence)
        } else if target > lat.e3() {
            Some(Segment::BandGap)
        } else if target < lat.e3() {
            Some(Segment::Conduction)
        } else {
            None
        }
    }
}

/// Solves wp(delta) = target on the given segment with a bisection-guarded
/// Newton iteration.
pub fn delta_on_segment(
    lat: &LatticeData,
    target: f64,
    segment: Segment,
) -> Result<Complex64> {
    let t_hi = segment.t_max(lat);
    let mut lo = 3e-8;
    let mut hi = t_hi - 3e-8;
    let f = |t: f64| -> Result<f64> { Ok(lat.wp(segment.delta_at(lat, t))?.re - target) };
    let mut f_lo = f(lo)?;
    let f_hi = f(hi)?;
    if f_lo.signum() == f_hi.signum() {
        return Err(SusyError::NewtonNoConvergence {
            iters: 0,
            residual: f_lo.abs().min(f_hi.abs()),
        });
    }
    let mut t = 0.5 * (lo + hi);
    let scale = target.abs().max(1.0);
    for iter in 1..=100 {
        let delta = segment.delta_at(lat, t);
        let ft = lat.wp(delta)?.re - target;
        if ft.abs() < 1e-12 * scale {
            return Ok(delta);
        }
        if ft.signum() == f_lo.signum() {
            lo = t;
            f_lo = ft;
        } else {
            hi = t;
        }
        let df = (lat.wp_prime(delta)? * segment.direction()).re;
        let newton = t - ft / df;
        t = if df != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if iter == 100 {
            return Err(SusyError::NewtonNoConvergence {
                iters: iter,
                residual: ft.abs(),
            });
        }
    }
    unreachable!()
}

/// Displacement for a factorization energy inside one of the two forbidden
/// bands. Energies inside (or within `BAND_MARGIN` of) the spectrum are
/// rejected.
pub fn lame_delta_from_epsilon(epsilon: Complex64, lat: &LatticeData) -> Result<Complex64> {
    if epsilon.im.abs() > 1e-10 * epsilon.re.abs().max(1.0) {
        return Err(SusyError::Invalid(
            "Lame factorization energy must be real".into(),
        ));
    }
    let e = epsilon.re;
    let m = lat.m();
    let segment = if e < m - BAND_MARGIN {
        Segment::LowerGap
    } else if e > 1.0 + BAND_MARGIN && e < 1.0 + m - BAND_MARGIN {
        Segment::BandGap
    } else {
        return Err(SusyError::EpsilonInSpectrum(e));
    };
    let target = 2.0 / 3.0 * (m + 1.0) - e;
    delta_on_segment(lat, target, segment)
}

/// eps = (2/3)(m+1) - wp(delta), the inverse of the displacement map.
pub fn epsilon_from_delta(delta: Complex64, lat: &LatticeData) -> Result<Complex64> {
    Ok(2.0 / 3.0 * (lat.m() + 1.0) - lat.wp(delta)?)
}

/// Bloch multiplier beta = exp[2 delta zeta(omega) - 2 omega zeta(delta)] over
/// one period 2 K(m).
pub fn bloch_multiplier(delta: Complex64, lat: &LatticeData) -> Result<Complex64> {
    Ok((2.0 * delta * lat.eta() - 2.0 * lat.omega() * lat.zeta(delta)?).exp())
}

/// Quasi-momentum kappa = 2i [omega zeta(delta) - delta zeta(omega)], reduced
/// to the strip Im kappa >= 0, Re kappa in [0, 2 pi).
pub fn quasimomentum(delta: Complex64, lat: &LatticeData) -> Result<Complex64> {
    let mut kappa = 2.0 * Complex64::i() * (lat.omega() * lat.zeta(delta)? - delta * lat.eta());
    if kappa.im < 0.0 {
        kappa = -kappa;
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    kappa.re = kappa.re.rem_euclid(two_pi);
    Ok(kappa)
}

/// Per-delta constants of the Bloch pair.
struct BlochCtx {
    delta: Complex64,
    zeta_d: Complex64,
    wp_d: Complex64,
    zeta_od: Complex64,
    wp_pp_over_p: Complex64,
    norm_u: Complex64,
    pref_v: Complex64,
}

impl BlochCtx {
    fn new(lat: &LatticeData, delta: Complex64) -> Result<Self> {
        let op = lat.omega_prime();
        let zeta_d = lat.zeta(delta)?;
        let wp_d = lat.wp(delta)?;
        let wp_p_d = lat.wp_prime(delta)?;
        let wp_pp_d = 6.0 * wp_d * wp_d - 0.5 * lat.g2();
        let sig_d = lat.sigma(delta);
        let sig_od = lat.sigma(op + delta);
        let sig_o = lat.sigma(op);
        Ok(BlochCtx {
            delta,
            zeta_d,
            wp_d,
            zeta_od: lat.zeta(op + delta)?,
            wp_pp_over_p: wp_pp_d / wp_p_d,
            norm_u: sig_o / sig_od,
            pref_v: -sig_od / (sig_o * sig_d * sig_d * wp_p_d),
        })
    }
}

/// u, v and their x- and delta-derivatives at one grid point.
#[derive(Clone, Copy, Default)]
struct BlochPoint {
    u: Complex64,
    v: Complex64,
    u_d: Complex64,
    v_d: Complex64,
    u_x: Complex64,
    v_x: Complex64,
    u_xd: Complex64,
    v_xd: Complex64,
}

fn eval_point(
    lat: &LatticeData,
    ctx: &BlochCtx,
    x: f64,
    sig_xw: Complex64,
    zeta_xw: Complex64,
) -> Result<BlochPoint> {
    let zp = Complex64::new(x, 0.0) + lat.omega_prime() + ctx.delta;
    let zm = Complex64::new(x, 0.0) + lat.omega_prime() - ctx.delta;
    let sig_p = lat.sigma(zp);
    let sig_m = lat.sigma(zm);
    let zeta_p = lat.zeta(zp)?;
    let zeta_m = lat.zeta(zm)?;
    let wp_p = lat.wp(zp)?;
    let wp_m = lat.wp(zm)?;

    let u = ctx.norm_u * sig_p / sig_xw * (-x * ctx.zeta_d).exp();
    let v = ctx.pref_v * sig_m / sig_xw * (x * ctx.zeta_d).exp();

    let bu_d = zeta_p - ctx.zeta_od + x * ctx.wp_d;
    let bu_x = zeta_p - zeta_xw - ctx.zeta_d;
    let bv_d = ctx.zeta_od - zeta_m - 2.0 * ctx.zeta_d - ctx.wp_pp_over_p - x * ctx.wp_d;
    let bv_x = zeta_m - zeta_xw + ctx.zeta_d;

    let u_d = bu_d * u;
    let v_d = bv_d * v;
    Ok(BlochPoint {
        u,
        v,
        u_d,
        v_d,
        u_x: bu_x * u,
        v_x: bv_x * v,
        u_xd: (ctx.wp_d - wp_p) * u + bu_x * u_d,
        v_xd: (wp_m - ctx.wp_d) * v + bv_x * v_d,
    })
}

/// Richardson-extrapolated 4th-order first derivative from samples at
/// offsets {-2h, -h, -h/2, 0, +h/2, +h, +2h} (indices 0..7).
fn rich_d1(s: &[Complex64; 7], h: f64) -> Complex64 {
    let a_h = (s[0] - 8.0 * s[1] + 8.0 * s[5] - s[6]) / (12.0 * h);
    let a_h2 = (s[1] - 8.0 * s[2] + 8.0 * s[4] - s[5]) / (6.0 * h);
    (16.0 * a_h2 - a_h) / 15.0
}

/// Same for the second derivative.
fn rich_d2(s: &[Complex64; 7], h: f64) -> Complex64 {
    let b_h = (-s[6] + 16.0 * s[5] - 30.0 * s[3] + 16.0 * s[1] - s[0]) / (12.0 * h * h);
    let b_h2 = (-s[5] + 16.0 * s[4] - 30.0 * s[3] + 16.0 * s[2] - s[1]) / (3.0 * h * h);
    (16.0 * b_h2 - b_h) / 15.0
}

const OFFSETS: [f64; 7] = [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0];

/// Builds the Lame Bloch seed with derivatives up to order k-1 (k <= 4).
pub fn lame_bloch_seed(req: &SeedRequest) -> Result<SeedEvaluation> {
    let m = match req.family {
        FamilySpec::Lame { m } => m,
        _ => return Err(SusyError::Invalid("lame_bloch_seed needs the Lame family".into())),
    };
    if req.k < 2 {
        return Err(SusyError::Invalid(format!("chain order must be >= 2, got {}", req.k)));
    }
    if req.k > 4 {
        return Err(SusyError::UnsupportedOrder { k: req.k, max: 4 });
    }
    let lat = LatticeData::new(m)?;
    let grid = req.grid;
    let period = 2.0 * lat.omega();
    if grid.x_max() - grid.x_min() < period {
        return Err(SusyError::Invalid(format!(
            "grid must span at least one period 2K = {period:.6}"
        )));
    }

    let delta = lame_delta_from_epsilon(req.epsilon, &lat)?;
    let epsilon = epsilon_from_delta(delta, &lat)?;

    // delta-step for the finite differences, capped away from the segment ends
    let t = delta.re - if delta.im > 0.5 * lat.omega_prime().im { 0.0 } else { 0.0 };
    let t_on_seg = if delta.im.abs() < 1e-12 { delta.re } else { t };
    let margin = t_on_seg.min(lat.omega() - t_on_seg);
    let h = (LAME_DELTA_FD_STEP * delta.norm()).min(margin / 8.0);
    if h < 1e-9 {
        return Err(SusyError::EpsilonInSpectrum(req.epsilon.re));
    }

    let ctxs: Vec<BlochCtx> = OFFSETS
        .iter()
        .map(|mu| BlochCtx::new(&lat, delta + mu * h))
        .collect::<Result<_>>()?;

    let n = grid.n_points();
    let mut pts = vec![[BlochPoint::default(); 7]; n];
    for (i, x) in grid.points().enumerate() {
        let zxw = Complex64::new(x, 0.0) + lat.omega_prime();
        let sig_xw = lat.sigma(zxw);
        let zeta_xw = lat.zeta(zxw)?;
        for (c, ctx) in ctxs.iter().enumerate() {
            pts[i][c] = eval_point(&lat, ctx, x, sig_xw, zeta_xw)?;
        }
    }

    // chain-rule conversion factors from delta- to epsilon-derivatives
    let wp_d = lat.wp(delta)?;
    let wp_p = lat.wp_prime(delta)?;
    let eps_1 = -wp_p; // d eps / d delta
    let eps_2 = -(6.0 * wp_d * wp_d - 0.5 * lat.g2());
    let eps_3 = -12.0 * wp_d * wp_p;
    let d1 = 1.0 / eps_1;
    let d2 = -eps_2 / eps_1.powu(3);
    let d3 = (3.0 * eps_2 * eps_2 - eps_1 * eps_3) / eps_1.powu(5);

    let order = req.k; // number of derivative slots 0..k-1
    let mut u = Vec::with_capacity(order);
    let mut v = Vec::with_capacity(order);
    let mut ux = Vec::with_capacity(order);
    let mut vx = Vec::with_capacity(order);
    let mut crosscheck = 0.0f64;
    let u_d_scale = pts.iter().fold(0.0f64, |a, p| a.max(p[3].u_d.norm()));

    for slot in 0..4usize {
        // slot: 0 = u, 1 = v, 2 = u_x, 3 = v_x
        let center = |p: &[BlochPoint; 7]| match slot {
            0 => p[3].u,
            1 => p[3].v,
            2 => p[3].u_x,
            _ => p[3].v_x,
        };
        let value = |p: &BlochPoint| match slot {
            0 => p.u,
            1 => p.v,
            2 => p.u_x,
            _ => p.v_x,
        };
        let deriv = |p: &BlochPoint| match slot {
            0 => p.u_d,
            1 => p.v_d,
            2 => p.u_xd,
            _ => p.v_xd,
        };

        let mut orders: Vec<Vec<Complex64>> = vec![Vec::with_capacity(n); order];
        for p in &pts {
            let f0 = center(p);
            orders[0].push(f0);
            if order > 1 {
                let fd1 = deriv(&p[3]);
                orders[1].push(d1 * fd1);
                if order > 2 {
                    let dsamples: [Complex64; 7] = std::array::from_fn(|c| deriv(&p[c]));
                    let fdd = rich_d1(&dsamples, h);
                    orders[2].push(d2 * fd1 + d1 * d1 * fdd);
                    if order > 3 {
                        let fddd = rich_d2(&dsamples, h);
                        orders[3].push(d3 * fd1 + 3.0 * d1 * d2 * fdd + d1.powu(3) * fddd);
                    }
                }
                if slot == 0 {
                    // cross-check the analytic first derivative against the
                    // finite difference of the derivative-free Bloch form
                    let vsamples: [Complex64; 7] = std::array::from_fn(|c| value(&p[c]));
                    let fd = rich_d1(&vsamples, h);
                    crosscheck = crosscheck.max((fd - fd1).norm());
                }
            }
        }
        let target = match slot {
            0 => &mut u,
            1 => &mut v,
            2 => &mut ux,
            _ => &mut vx,
        };
        for vals in orders {
            target.push(SampledFunction::new(grid, vals)?);
        }
    }
    crosscheck /= u_d_scale.max(1e-300);

    let mut v0_vals = Vec::with_capacity(n);
    let mut v0x_vals = Vec::with_capacity(n);
    for x in grid.points() {
        let (sn, cn, dn) = jacobi_sncndn(x, m)?;
        v0_vals.push(Complex64::new(2.0 * m * sn * sn, 0.0));
        v0x_vals.push(Complex64::new(4.0 * m * sn * cn * dn, 0.0));
    }

    let mut seed = SeedEvaluation {
        family: SeedFamily::Lame,
        epsilon,
        grid,
        u,
        v,
        ux,
        vx,
        v0: SampledFunction::new(grid, v0_vals)?,
        v0_x: SampledFunction::new(grid, v0x_vals)?,
        lattice: Some(lat),
        delta: Some(delta),
        diagnostics: SeedDiagnostics::default(),
    };
    seed.diagnostics.first_derivative_crosscheck = crosscheck;
    if crosscheck > 1e-6 {
        return Err(SusyError::ResidualTooLarge {
            residual: crosscheck,
            tol: 1e-6,
        });
    }
    seed.validate(RESIDUAL_TOL_ANALYTIC)?;
    Ok(seed)
}
