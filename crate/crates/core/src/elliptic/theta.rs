//! Jacobi theta series in a real nome q with complex argument.
//!
//! Series are truncated when the running term drops below 1e-17 of the
//! largest term seen, which keeps full f64 accuracy even when the partial
//! sums cancel (near the zeros of theta_1). Callers reduce arguments into the
//! fundamental cell first, so |Im v| stays small enough for fast convergence.

use num_complex::Complex64;

const CUTOFF: f64 = 1e-17;
const MAX_TERMS: usize = 60;

/// theta_1(v, q) = 2 sum_{n>=0} (-1)^n q^{(n+1/2)^2} sin((2n+1) v)
pub fn theta1(v: Complex64, q: f64) -> Complex64 {
    let lnq = q.ln();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut peak = 0.0f64;
    for n in 0..MAX_TERMS {
        let a = (lnq * (n as f64 + 0.5).powi(2)).exp();
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let term = 2.0 * sign * a * ((2 * n + 1) as f64 * v).sin();
        sum += term;
        let mag = term.norm();
        peak = peak.max(mag);
        if n > 1 && mag < CUTOFF * peak.max(1e-300) {
            break;
        }
    }
    sum
}

/// d/dv theta_1(v, q)
pub fn theta1_dv(v: Complex64, q: f64) -> Complex64 {
    let lnq = q.ln();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut peak = 0.0f64;
    for n in 0..MAX_TERMS {
        let a = (lnq * (n as f64 + 0.5).powi(2)).exp();
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let c = (2 * n + 1) as f64;
        let term = 2.0 * sign * a * c * (c * v).cos();
        sum += term;
        let mag = term.norm();
        peak = peak.max(mag);
        if n > 1 && mag < CUTOFF * peak.max(1e-300) {
            break;
        }
    }
    sum
}

/// theta_4(v, q) = 1 + 2 sum_{n>=1} (-1)^n q^{n^2} cos(2 n v)
pub fn theta4(v: Complex64, q: f64) -> Complex64 {
    let lnq = q.ln();
    let mut sum = Complex64::new(1.0, 0.0);
    let mut peak = 1.0f64;
    for n in 1..MAX_TERMS {
        let a = (lnq * (n * n) as f64).exp();
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let term = 2.0 * sign * a * ((2 * n) as f64 * v).cos();
        sum += term;
        let mag = term.norm();
        peak = peak.max(mag);
        if mag < CUTOFF * peak.max(1e-300) {
            break;
        }
    }
    sum
}

/// d/dv theta_4(v, q)
pub fn theta4_dv(v: Complex64, q: f64) -> Complex64 {
    let lnq = q.ln();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut peak = 0.0f64;
    for n in 1..MAX_TERMS {
        let a = (lnq * (n * n) as f64).exp();
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let term = -2.0 * sign * a * (2 * n) as f64 * ((2 * n) as f64 * v).sin();
        sum += term;
        let mag = term.norm();
        peak = peak.max(mag);
        if n > 1 && mag < CUTOFF * peak.max(1e-300) {
            break;
        }
    }
    sum
}

/// theta-constants: theta_2(0), theta_3(0), theta_1'(0), theta_1'''(0)
pub fn theta2_0(q: f64) -> f64 {
    let lnq = q.ln();
    let mut sum = 0.0;
    for n in 0..MAX_TERMS {
        let term = 2.0 * (lnq * (n as f64 + 0.5).powi(2)).exp();
        sum += term;
        if term < CUTOFF * sum {
            break;
        }
    }
    sum
}

pub fn theta3_0(q: f64) -> f64 {
    let lnq = q.ln();
    let mut sum = 1.0;
    for n in 1..MAX_TERMS {
        let term = 2.0 * (lnq * (n * n) as f64).exp();
        sum += term;
        if term < CUTOFF * sum {
            break;
        }
    }
    sum
}

pub fn theta4_0(q: f64) -> f64 {
    theta4(Complex64::new(0.0, 0.0), q).re
}

pub fn theta1_dv_0(q: f64) -> f64 {
    let lnq = q.ln();
    let mut sum = 0.0;
    for n in 0..MAX_TERMS {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let term = 2.0 * sign * (2 * n + 1) as f64 * (lnq * (n as f64 + 0.5).powi(2)).exp();
        sum += term;
        if term.abs() < CUTOFF * sum.abs() {
            break;
        }
    }
    sum
}

pub fn theta1_d3v_0(q: f64) -> f64 {
    let lnq = q.ln();
    let mut sum = 0.0;
    let mut peak = 0.0f64;
    for n in 0..MAX_TERMS {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let c = (2 * n + 1) as f64;
        let term = -2.0 * sign * c * c * c * (lnq * (n as f64 + 0.5).powi(2)).exp();
        sum += term;
        peak = peak.max(term.abs());
        if n > 1 && term.abs() < CUTOFF * peak {
            break;
        }
    }
    sum
}
