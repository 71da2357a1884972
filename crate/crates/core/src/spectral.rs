//! Band classification through the quasi-momentum, singularity scans over
//! chain-parameter families, and the Poschl-Teller matcher.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::elliptic::LatticeData;
use crate::error::{Result, SusyError};
use crate::grid::{Grid, SampledFunction};
use crate::params::ChainParameters;
use crate::seeds::{build_seed, delta_on_segment, quasimomentum, FamilySpec, Segment, SeedRequest};
use crate::tol::{BAND_TOL, EDGE_TOL, ZERO_THRESHOLD_FACTOR};
use crate::wronskian::reduced_bundle;

/// Where an energy sits relative to Sp(H) = [m, 1] u [1+m, inf).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandClass {
    AllowedBand,
    BandGap,
    LowerGap,
    /// within EDGE_TOL of a band edge; left unclassified
    Edge,
}

#[derive(Debug, Clone)]
pub struct BandReport {
    pub energy: f64,
    pub delta: Option<Complex64>,
    pub quasimomentum: Option<Complex64>,
    pub classification: BandClass,
}

fn classify_raw(e: f64, lat: &LatticeData) -> Result<(Complex64, Complex64, BandClass)> {
    let target = 2.0 / 3.0 * (lat.m() + 1.0) - e;
    let segment = Segment::for_wp_target(lat, target).ok_or(SusyError::EpsilonInSpectrum(e))?;
    let delta = delta_on_segment(lat, target, segment)?;
    let kappa = quasimomentum(delta, lat)?;
    let class = if kappa.im.abs() < BAND_TOL {
        BandClass::AllowedBand
    } else {
        // gaps: periodic decay pins Re kappa to 0 (mod 2 pi), antiperiodic to pi
        let re = kappa.re;
        let dist_pi = (re - std::f64::consts::PI).abs();
        let dist_0 = re.min((re - 2.0 * std::f64::consts::PI).abs());
        if dist_0 < dist_pi {
            BandClass::LowerGap
        } else {
            BandClass::BandGap
        }
    };
    Ok((delta, kappa, class))
}

/// Classifies an energy by the reality of the quasi-momentum. Energies within
/// `EDGE_TOL` of a band edge are reported as [`BandClass::Edge`].
pub fn classify_energy(e: f64, m: f64) -> Result<BandReport> {
    let lat = LatticeData::new(m)?;
    let edges = [m, 1.0, 1.0 + m];
    if edges.iter().any(|edge| (e - edge).abs() <= EDGE_TOL) {
        return Ok(BandReport {
            energy: e,
            delta: None,
            quasimomentum: None,
            classification: BandClass::Edge,
        });
    }
    let (delta, kappa, class) = classify_raw(e, &lat)?;
    Ok(BandReport {
        energy: e,
        delta: Some(delta),
        quasimomentum: Some(kappa),
        classification: class,
    })
}

/// Band edges found by sweeping `[e_min, e_max]` and bisecting every
/// classification change of the raw (unguarded) classifier to 1e-5.
pub fn detect_band_edges(m: f64, e_min: f64, e_max: f64, n_sweep: usize) -> Result<Vec<f64>> {
    let lat = LatticeData::new(m)?;
    let class_of = |e: f64| classify_raw(e, &lat).map(|(_, _, c)| c);
    let step = (e_max - e_min) / (n_sweep - 1) as f64;
    let mut edges = Vec::new();
    let mut prev: Option<(f64, BandClass)> = None;
    for i in 0..n_sweep {
        let e = e_min + i as f64 * step;
        let c = match class_of(e) {
            Ok(c) => c,
            Err(_) => continue, // numerically right on a branch point
        };
        if let Some((pe, pc)) = prev {
            if pc != c {
                let (mut lo, mut hi) = (pe, e);
                for _ in 0..40 {
                    let mid = 0.5 * (lo + hi);
                    match class_of(mid) {
                        Ok(mc) if mc == pc => lo = mid,
                        _ => hi = mid,
                    }
                    if hi - lo < 1e-6 {
                        break;
                    }
                }
                edges.push(0.5 * (lo + hi));
            }
        }
        prev = Some((e, c));
    }
    Ok(edges)
}

/// One scanned parameter set.
#[derive(Debug, Clone)]
pub struct ScanRecord {
    pub params: ChainParameters,
    pub singular: bool,
    pub n_zeros: usize,
    /// min |W| over the grid, normalized by max |W|
    pub min_abs_w: f64,
    /// seed or evaluation failure, with the scan continuing
    pub error: Option<String>,
}

fn count_zeros(w: &SampledFunction) -> (usize, f64) {
    let max = w.max_abs();
    let threshold = ZERO_THRESHOLD_FACTOR.sqrt() * max; // dip detector, looser than the hard zero
    let vals = w.values();
    let mut zeros = 0usize;
    let mut in_dip = false;
    for i in 0..vals.len() {
        let below = vals[i].norm() <= threshold;
        if below && !in_dip {
            zeros += 1;
            in_dip = true;
        } else if !below {
            if !in_dip
                && i + 1 < vals.len()
                && vals[i + 1].norm() > threshold
                && vals[i].re.signum() != vals[i + 1].re.signum()
            {
                zeros += 1;
            }
            in_dip = false;
        }
    }
    (zeros, w.min_abs() / max.max(1e-300))
}

/// Evaluates W_k for every parameter set and records zero counts. Seeds are
/// rebuilt only when the factorization energy changes; records run in
/// parallel within an epsilon group.
pub fn singularity_scan(
    family: &FamilySpec,
    grid: Grid,
    params_list: &[ChainParameters],
) -> Vec<ScanRecord> {
    let mut records: Vec<Option<ScanRecord>> = vec![None; params_list.len()];
    let mut i = 0;
    while i < params_list.len() {
        let eps = params_list[i].epsilon();
        let k_max = params_list[i..]
            .iter()
            .take_while(|p| p.epsilon() == eps)
            .map(|p| p.k())
            .max()
            .unwrap();
        let group_end = i + params_list[i..]
            .iter()
            .take_while(|p| p.epsilon() == eps)
            .count();
        let seed = build_seed(&SeedRequest {
            family: family.clone(),
            epsilon: eps,
            k: k_max,
            grid,
        });
        match seed {
            Ok(seed) => {
                let group: Vec<ScanRecord> = params_list[i..group_end]
                    .par_iter()
                    .map(|p| match reduced_bundle(&seed, p) {
                        Ok(bundle) => {
                            let (n_zeros, min_abs_w) = count_zeros(&bundle.w_k);
                            ScanRecord {
                                params: p.clone(),
                                singular: n_zeros > 0,
                                n_zeros,
                                min_abs_w,
                                error: None,
                            }
                        }
                        Err(e) => ScanRecord {
                            params: p.clone(),
                            singular: false,
                            n_zeros: 0,
                            min_abs_w: 0.0,
                            error: Some(e.to_string()),
                        },
                    })
                    .collect();
                for (slot, rec) in records[i..group_end].iter_mut().zip(group) {
                    *slot = Some(rec);
                }
            }
            Err(e) => {
                for (slot, p) in records[i..group_end].iter_mut().zip(&params_list[i..group_end]) {
                    *slot = Some(ScanRecord {
                        params: p.clone(),
                        singular: false,
                        n_zeros: 0,
                        min_abs_w: 0.0,
                        error: Some(e.to_string()),
                    });
                }
            }
        }
        i = group_end;
    }
    records.into_iter().map(Option::unwrap).collect()
}

/// Result of reading a Poschl-Teller well off a sampled potential.
#[derive(Debug, Clone, Copy)]
pub struct PoschlTellerFit {
    pub kappa_fit: f64,
    pub x0_fit: f64,
    pub sup_error: f64,
}

/// Fits V(x) ~ -2 a^2 sech^2(a (x + b)) by reading the depth and location of
/// the minimum (parabolic sub-grid refinement), then reports the sup-norm
/// mismatch. A potential with no well is an error; a large `sup_error` is a
/// result, not an error.
pub fn poschl_teller_match(v: &SampledFunction) -> Result<PoschlTellerFit> {
    let n = v.len();
    let grid = v.grid();
    let mut idx = 0;
    let mut vmin = f64::INFINITY;
    for i in 0..n {
        let re = v.value(i).re;
        if re < vmin {
            vmin = re;
            idx = i;
        }
    }
    if vmin >= 0.0 {
        return Err(SusyError::Invalid("potential has no well to fit".into()));
    }
    // parabolic refinement of the minimum
    let (x_star, v_star) = if idx == 0 || idx + 1 == n {
        (grid.x(idx), vmin)
    } else {
        let (ym, y0, yp) = (
            v.value(idx - 1).re,
            v.value(idx).re,
            v.value(idx + 1).re,
        );
        let denom = ym - 2.0 * y0 + yp;
        if denom.abs() < 1e-300 {
            (grid.x(idx), vmin)
        } else {
            let s = 0.5 * (ym - yp) / denom;
            let x = grid.x(idx) + s * grid.spacing();
            let vmin_refined = y0 - 0.25 * (ym - yp) * s;
            (x, vmin_refined)
        }
    };
    let kappa_fit = (-v_star / 2.0).sqrt();
    let x0_fit = -x_star;
    let mut sup_error = 0.0f64;
    for (i, x) in grid.points().enumerate() {
        let pt = -2.0 * kappa_fit * kappa_fit / (kappa_fit * (x + x0_fit)).cosh().powi(2);
        sup_error = sup_error.max((v.value(i).re - pt).abs());
    }
    Ok(PoschlTellerFit {
        kappa_fit,
        x0_fit,
        sup_error,
    })
}
