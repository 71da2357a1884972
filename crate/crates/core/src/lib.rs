//! k-confluent SUSY transformations of one-dimensional Schrodinger potentials.
//!
//! The library deforms a potential `V0` into a partner `V_k` by
//!
//! ```text
//! V_k(x) = V0(x) - 2 d^2/dx^2 ln W(u_1, ..., u_k)
//! ```
//!
//! where `u_1..u_k` form a Jordan chain of generalized eigenfunctions at a
//! single factorization energy, assembled from a seed pair `(u, v)` with
//! `W(u, v) = 1` and its parametric derivatives in the energy. The added
//! eigenstate is the Wronskian quotient `psi_k = W(u_1..u_{k-1}) / W(u_1..u_k)`.
//!
//! Three seed families are built in: the free particle (closed-form seeds),
//! the single-gap Lame potential `2 m sn^2(x|m)` (Bloch seeds through a
//! Weierstrass elliptic layer), and arbitrary sampled potentials (ODE
//! integration). Every Wronskian can be evaluated three ways (generic
//! determinant, expanded multilinear form, reduced two-function form) and the
//! evaluations cross-check each other at machine precision.

pub mod chain;
pub mod elliptic;
pub mod error;
pub mod grid;
pub mod params;
pub mod pipeline;
pub mod seeds;
pub mod spectral;
pub mod stencil;
pub mod tol;
pub mod transform;
pub mod wronskian;

pub use error::{Result, SusyError};
pub use grid::{make_grid, rel_sup_diff, Grid, SampledFunction};
pub use params::ChainParameters;
