//! Elliptic layer: K(m), Jacobi sn, and the Weierstrass trio on the Lame
//! lattice, with the identity suite the rest of the library leans on.

mod agm;
mod theta;
mod weierstrass;

pub use agm::{elliptic_k, jacobi_sn, jacobi_sncndn};
pub use weierstrass::LatticeData;

use num_complex::Complex64;

use crate::error::Result;

/// Maximum deviations measured for each elliptic identity.
#[derive(Debug, Clone)]
pub struct EllipticIdentityReport {
    /// zeta(z1+z2) - zeta(z1) - zeta(z2) - (wp'(z1)-wp'(z2))/(2(wp(z1)-wp(z2)))
    pub zeta_addition: f64,
    /// sigma(z1+z2) sigma(z1-z2) + sigma^2(z1) sigma^2(z2) (wp(z1)-wp(z2))
    pub sigma_product: f64,
    /// d/dx sigma = sigma zeta (finite differences)
    pub sigma_derivative: f64,
    /// d/dx zeta = -wp (finite differences)
    pub zeta_derivative: f64,
    /// d/dx wp = -sigma(2x)/sigma^4(x)
    pub wp_derivative: f64,
    /// m sn^2(x|m) = wp(x+omega') + (m+1)/3
    pub lame_identity: f64,
}

impl EllipticIdentityReport {
    pub fn max_deviation(&self) -> f64 {
        [
            self.zeta_addition,
            self.sigma_product,
            self.sigma_derivative,
            self.zeta_derivative,
            self.wp_derivative,
            self.lame_identity,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Deterministic low-discrepancy points inside the fundamental cell, kept
/// away from the lattice and from coincident pairs.
fn sample_points(lat: &LatticeData, n: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(n);
    let mut s = 0x2545f4914f6cdd1du64;
    while out.len() < n {
        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let a = ((s >> 11) as f64 / (1u64 << 53) as f64) * 1.6 - 0.8;
        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let b = ((s >> 11) as f64 / (1u64 << 53) as f64) * 1.6 - 0.8;
        let z = Complex64::new(a * lat.omega(), b * lat.omega_prime().im);
        if z.norm() > 0.15 {
            out.push(z);
        }
    }
    out
}

/// Evaluates the identity suite on `pairs` deterministic point pairs.
pub fn identity_report(lat: &LatticeData, pairs: usize) -> Result<EllipticIdentityReport> {
    let pts = sample_points(lat, 2 * pairs);
    let mut zeta_addition = 0.0f64;
    let mut sigma_product = 0.0f64;
    for chunk in pts.chunks(2) {
        let (z1, z2) = (chunk[0], chunk[1]);
        let (p1, p2) = (lat.wp(z1)?, lat.wp(z2)?);
        if (p1 - p2).norm() < 1e-3 {
            continue; // degenerate pair for the addition law denominators
        }
        let lhs = lat.zeta(z1 + z2)? - lat.zeta(z1)? - lat.zeta(z2)?;
        let rhs = 0.5 * (lat.wp_prime(z1)? - lat.wp_prime(z2)?) / (p1 - p2);
        zeta_addition = zeta_addition.max((lhs - rhs).norm());

        let lhs = lat.sigma(z1 + z2) * lat.sigma(z1 - z2);
        let rhs = -lat.sigma(z1).powu(2) * lat.sigma(z2).powu(2) * (p1 - p2);
        sigma_product = sigma_product.max((lhs - rhs).norm() / rhs.norm().max(1e-30));
    }

    let h = 1e-5;
    let dz = Complex64::new(h, 0.0);
    let mut sigma_derivative = 0.0f64;
    let mut zeta_derivative = 0.0f64;
    let mut wp_derivative = 0.0f64;
    for &z in pts.iter().take(pairs) {
        let fd = (lat.sigma(z + dz) - lat.sigma(z - dz)) / (2.0 * h);
        sigma_derivative = sigma_derivative.max((fd - lat.sigma_prime(z)?).norm());
        let fd = (lat.zeta(z + dz)? - lat.zeta(z - dz)?) / (2.0 * h);
        zeta_derivative = zeta_derivative.max((fd + lat.wp(z)?).norm());
        let quot = -lat.sigma(2.0 * z) / lat.sigma(z).powu(4);
        let wp_p = lat.wp_prime(z)?;
        wp_derivative = wp_derivative.max((wp_p - quot).norm() / wp_p.norm().max(1.0));
    }

    let mut lame_identity = 0.0f64;
    let m = lat.m();
    let period = 4.0 * lat.omega();
    for i in 0..=80 {
        let x = period * i as f64 / 80.0 + 7e-4;
        let sn = jacobi_sn(x, m)?;
        let rhs = lat.wp(Complex64::new(x, 0.0) + lat.omega_prime())? + (m + 1.0) / 3.0;
        lame_identity = lame_identity.max((m * sn * sn - rhs.re).abs().max(rhs.im.abs()));
    }

    Ok(EllipticIdentityReport {
        zeta_addition,
        sigma_product,
        sigma_derivative,
        zeta_derivative,
        wp_derivative,
        lame_identity,
    })
}
