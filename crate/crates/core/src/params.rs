//! Chain parameters shared by all modules.

use num_complex::Complex64;

use crate::error::{Result, SusyError};

/// Factorization energy and the constants C_1..C_{k-1}, D_1..D_{k-1} that fix
/// a Jordan chain of length `k`.
///
/// `C[k-1]` (the spectator) is accepted for API symmetry even though it drops
/// out of the k-function Wronskian; the spectator-invariance property test
/// justifies carrying it.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainParameters {
    epsilon: Complex64,
    k: usize,
    c: Vec<f64>,
    d: Vec<f64>,
}

impl ChainParameters {
    pub fn new(epsilon: Complex64, k: usize, c: Vec<f64>, d: Vec<f64>) -> Result<Self> {
        if k < 2 {
            return Err(SusyError::Invalid(format!("chain order k must be >= 2, got {k}")));
        }
        if c.len() != k - 1 || d.len() != k - 1 {
            return Err(SusyError::ParameterLength {
                expected: k - 1,
                c_len: c.len(),
                d_len: d.len(),
            });
        }
        if c.iter().chain(d.iter()).any(|v| !v.is_finite()) {
            return Err(SusyError::Invalid("non-finite chain parameter".into()));
        }
        Ok(ChainParameters { epsilon, k, c, d })
    }

    pub fn zero(epsilon: Complex64, k: usize) -> Result<Self> {
        Self::new(epsilon, k, vec![0.0; k - 1], vec![0.0; k - 1])
    }

    pub fn epsilon(&self) -> Complex64 {
        self.epsilon
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// 1-based accessor: `c_l(1)` is C_1.
    pub fn c_l(&self, l: usize) -> f64 {
        self.c[l - 1]
    }

    pub fn d_l(&self, l: usize) -> f64 {
        self.d[l - 1]
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn d(&self) -> &[f64] {
        &self.d
    }

    /// The spectator constant C_{k-1}.
    pub fn spectator(&self) -> f64 {
        self.c[self.k - 2]
    }

    /// Copy with the spectator replaced; used by the invariance checks.
    pub fn with_spectator(&self, value: f64) -> Self {
        let mut c = self.c.clone();
        c[self.k - 2] = value;
        ChainParameters {
            epsilon: self.epsilon,
            k: self.k,
            c,
            d: self.d.clone(),
        }
    }
}
