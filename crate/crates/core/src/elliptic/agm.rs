//! Complete elliptic integral K(m) and Jacobi sn via the arithmetic-geometric
//! mean.

use crate::error::{Result, SusyError};

/// K(m) = integral_0^{pi/2} dtheta / sqrt(1 - m sin^2 theta), for 0 <= m < 1.
pub fn elliptic_k(m: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&m) {
        return Err(SusyError::ModulusOutOfRange(m));
    }
    let mut a = 1.0f64;
    let mut b = (1.0 - m).sqrt();
    for _ in 0..60 {
        if (a - b).abs() <= f64::EPSILON * a {
            break;
        }
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
    }
    Ok(std::f64::consts::FRAC_PI_2 / a)
}

/// Jacobi sn, cn, dn at x for parameter m in (0, 1).
///
/// The argument is folded into `[0, K]` by periodicity and parity before the
/// Gauss transformation (AGM) backward recursion, so accuracy is uniform for
/// large |x|.
pub fn jacobi_sncndn(x: f64, m: f64) -> Result<(f64, f64, f64)> {
    if !(m > 0.0 && m < 1.0) {
        return Err(SusyError::ModulusOutOfRange(m));
    }
    let k = elliptic_k(m)?;

    // parity: sn odd, cn/dn even
    let (x, sn_sign0) = if x < 0.0 { (-x, -1.0) } else { (x, 1.0) };
    // fold by the 4K period, then use sn(t + 2K) = -sn(t), cn(t + 2K) = -cn(t)
    let mut t = x % (4.0 * k);
    let mut sn_sign = sn_sign0;
    let mut cn_sign = 1.0;
    if t > 2.0 * k {
        t -= 2.0 * k;
        sn_sign = -sn_sign;
        cn_sign = -cn_sign;
    }
    // reflect onto [0, K]: sn(2K - t) = sn(t), cn(2K - t) = -cn(t)
    if t > k {
        t = 2.0 * k - t;
        cn_sign = -cn_sign;
    }

    let (sn, cn) = sncn_core(t, m);
    let dn = (1.0 - m * sn * sn).sqrt();
    Ok((sn_sign * sn, cn_sign * cn, dn))
}

/// sn only.
pub fn jacobi_sn(x: f64, m: f64) -> Result<f64> {
    jacobi_sncndn(x, m).map(|(sn, _, _)| sn)
}

/// AGM phi-recursion on the reduced argument t in [0, K].
fn sncn_core(t: f64, m: f64) -> (f64, f64) {
    if t == 0.0 {
        return (0.0, 1.0);
    }
    let mut a = vec![1.0f64];
    let mut c = vec![m.sqrt()];
    let mut b = (1.0 - m).sqrt();
    while c.last().unwrap().abs() > 1e-17 * a.last().unwrap() && a.len() < 40 {
        let an = a.last().unwrap();
        let cn = 0.5 * (an - b);
        let anew = 0.5 * (an + b);
        b = (an * b).sqrt();
        a.push(anew);
        c.push(cn);
    }
    let n = a.len() - 1;
    let mut phi = (1u64 << n) as f64 * a[n] * t;
    for i in (1..=n).rev() {
        let s = (c[i] / a[i] * phi.sin()).clamp(-1.0, 1.0);
        phi = 0.5 * (phi + s.asin());
    }
    (phi.sin(), phi.cos())
}

#[cfg(test)]
mod tests {
    use super::*;

    // descending Landen recursion, the independent oracle for sn
    fn sn_landen(x: f64, m: f64) -> f64 {
        if m < 1e-14 {
            // small-parameter closed form
            return x.sin() - 0.25 * m * (x - x.sin() * x.cos()) * x.cos();
        }
        let kp = (1.0 - m).sqrt();
        let k1 = (1.0 - kp) / (1.0 + kp);
        let v = x / (1.0 + k1);
        let s = sn_landen(v, k1 * k1);
        (1.0 + k1) * s / (1.0 + k1 * s * s)
    }

    #[test]
    fn k_reference_values() {
        // frozen from 40-digit AGM evaluations
        assert!((elliptic_k(0.0).unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert!((elliptic_k(0.5).unwrap() - 1.854074677301371918434).abs() < 1e-14);
        assert!((elliptic_k(0.9).unwrap() - 2.578092113348173188203).abs() < 1e-14);
        assert!((elliptic_k(1e-4).unwrap() - 1.570835598912152236026).abs() < 1e-14);
    }

    #[test]
    fn k_rejects_bad_modulus() {
        assert!(elliptic_k(1.0).is_err());
        assert!(elliptic_k(1.5).is_err());
        assert!(elliptic_k(-0.1).is_err());
    }

    #[test]
    fn k_diverges_toward_one() {
        let a = elliptic_k(0.999).unwrap();
        let b = elliptic_k(0.999999).unwrap();
        assert!(b > a && b > 7.0);
    }

    #[test]
    fn k_matches_quadrature() {
        // independent oracle: composite Simpson on the defining integral
        for &m in &[0.1, 0.5, 0.83] {
            let n = 20_000usize;
            let h = std::f64::consts::FRAC_PI_2 / n as f64;
            let f = |t: f64| 1.0 / (1.0 - m * t.sin().powi(2)).sqrt();
            let mut s = f(0.0) + f(std::f64::consts::FRAC_PI_2);
            for i in 1..n {
                let w = if i % 2 == 1 { 4.0 } else { 2.0 };
                s += w * f(i as f64 * h);
            }
            let quad = s * h / 3.0;
            assert!(
                (elliptic_k(m).unwrap() - quad).abs() < 1e-12,
                "m={m}: AGM {} vs quadrature {quad}",
                elliptic_k(m).unwrap()
            );
        }
    }

    #[test]
    fn dk_dm_cross_check() {
        // derivative of K via AGM versus finite difference of the integral
        let m = 0.5;
        let h = 1e-6;
        let fd = (elliptic_k(m + h).unwrap() - elliptic_k(m - h).unwrap()) / (2.0 * h);
        // analytic: dK/dm = [E - (1-m) K] / (2 m (1-m)); E(0.5) frozen
        let e_half = 1.350643881047675502520;
        let analytic = (e_half - 0.5 * elliptic_k(m).unwrap()) / (2.0 * m * (1.0 - m));
        assert!((fd - analytic).abs() < 1e-7, "fd {fd} vs analytic {analytic}");
    }

    #[test]
    fn sn_special_points() {
        let m = 0.5;
        let k = elliptic_k(m).unwrap();
        assert_eq!(jacobi_sn(0.0, m).unwrap(), 0.0);
        assert!((jacobi_sn(k, m).unwrap() - 1.0).abs() < 1e-13);
        // odd function
        assert!((jacobi_sn(0.7, m).unwrap() + jacobi_sn(-0.7, m).unwrap()).abs() < 1e-15);
        // period 4K
        let x = 1.234;
        assert!((jacobi_sn(x + 4.0 * k, m).unwrap() - jacobi_sn(x, m).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn sn_against_landen_oracle() {
        for &x in &[0.3, 1.1, 2.7] {
            let got = jacobi_sn(x, 0.5).unwrap();
            let want = sn_landen(x, 0.5);
            assert!((got - want).abs() < 1e-12, "x={x}: {got} vs {want}");
        }
    }

    #[test]
    fn sn_reference_values() {
        // frozen from 40-digit evaluations
        assert!((jacobi_sn(0.3, 0.5).unwrap() - 0.2934127331684553878618).abs() < 1e-14);
        assert!((jacobi_sn(1.1, 0.5).unwrap() - 0.8486654795097635587773).abs() < 1e-14);
        assert!((jacobi_sn(2.7, 0.5).unwrap() - 0.8069769895654859050167).abs() < 1e-14);
    }

    #[test]
    fn sncndn_identities() {
        for &x in &[-3.3, 0.45, 1.9, 6.1] {
            let (sn, cn, dn) = jacobi_sncndn(x, 0.7).unwrap();
            assert!((sn * sn + cn * cn - 1.0).abs() < 1e-13);
            assert!((0.7 * sn * sn + dn * dn - 1.0).abs() < 1e-13);
        }
    }
}
