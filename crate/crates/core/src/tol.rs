//! Named tolerances and thresholds, pinned in one place.

/// A Wronskian is treated as crossing zero when `|W|` dips below this factor
/// times its grid maximum.
pub const ZERO_THRESHOLD_FACTOR: f64 = 1e-12;

/// Seeds whose factorization energy is closer than this to a band edge are
/// rejected (the basis degenerates at the edge).
pub const BAND_MARGIN: f64 = 1e-3;

/// Energies within this distance of a band edge are reported as "edge".
pub const EDGE_TOL: f64 = 1e-3;

/// An energy counts as inside an allowed band when `|Im kappa|` of the
/// quasi-momentum stays below this.
pub const BAND_TOL: f64 = 1e-6;

/// Agreement required between determinant / expanded / reduced Wronskian
/// evaluations, per seed family.
pub const METHOD_AGREEMENT_FREE: f64 = 1e-9;
pub const METHOD_AGREEMENT_LAME: f64 = 1e-7;
pub const METHOD_AGREEMENT_NUMERIC: f64 = 1e-7;

/// Chain-closure residual defaults.
pub const RESIDUAL_TOL_ANALYTIC: f64 = 1e-6;
pub const RESIDUAL_TOL_LAME: f64 = 1e-4;

/// Maximum accepted deviation of the seed Wronskian W(u,v) from 1.
pub const SEED_WRONSKIAN_TOL: f64 = 1e-8;

/// Arguments closer than this to a lattice point are rejected by the
/// Weierstrass zeta / wp evaluators.
pub const POLE_GUARD: f64 = 1e-8;

/// Relative step used for the finite differences in delta that produce the
/// higher epsilon-derivatives of the Lame Bloch seeds.
pub const LAME_DELTA_FD_STEP: f64 = 1e-3;

/// Imaginary parts of physically real outputs must stay below this factor
/// times the output scale.
pub const IMAG_NOISE_FACTOR: f64 = 1e-10;
