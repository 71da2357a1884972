//! Jordan chains: the generalized eigenfunctions u_1..u_k assembled from seed
//! derivatives and the chain constants,
//!
//! ```text
//! u_j = sum_{l=1}^{j-1} C_{j-l} d^{l-1}u/(l-1)! + sum_{l=1}^{j-1} D_{j-l} d^{l-1}v/(l-1)! + d^{j-1}u/(j-1)!
//! ```
//!
//! Members are exact linear combinations of precomputed seed samples; their
//! x-derivatives are the same combinations of the seed x-derivatives, never a
//! re-differentiation of assembled sums.

use num_complex::Complex64;

use crate::error::{Result, SusyError};
use crate::grid::SampledFunction;
use crate::params::ChainParameters;
use crate::seeds::SeedEvaluation;
use crate::stencil::DerivativeStencil;

/// The chain u_1..u_k with x-derivatives and (optionally) per-link residuals.
#[derive(Debug, Clone)]
pub struct JordanChain {
    pub params: ChainParameters,
    /// members[j-1] = u_j
    pub members: Vec<SampledFunction>,
    pub members_x: Vec<SampledFunction>,
    /// per-link closure residuals from [`verify_chain`]; empty until verified
    pub residuals: Vec<f64>,
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

fn assemble(
    seed_u: &[SampledFunction],
    seed_v: &[SampledFunction],
    params: &ChainParameters,
    j: usize,
) -> Result<SampledFunction> {
    if j == 1 {
        return Ok(seed_u[0].clone());
    }
    let mut terms: Vec<(Complex64, &SampledFunction)> = Vec::with_capacity(2 * j - 1);
    for l in 1..j {
        let w = Complex64::new(params.c_l(j - l) / factorial(l - 1), 0.0);
        terms.push((w, &seed_u[l - 1]));
    }
    for l in 1..j {
        let w = Complex64::new(params.d_l(j - l) / factorial(l - 1), 0.0);
        terms.push((w, &seed_v[l - 1]));
    }
    terms.push((Complex64::new(1.0 / factorial(j - 1), 0.0), &seed_u[j - 1]));
    SampledFunction::linear_combination(&terms)
}

/// Builds the chain of length `params.k()` from the seed derivatives.
pub fn build_chain(seed: &SeedEvaluation, params: &ChainParameters) -> Result<JordanChain> {
    let k = params.k();
    seed.require_order(k - 1)?;
    if (params.epsilon() - seed.epsilon).norm() > 1e-10 * seed.epsilon.norm().max(1.0) {
        return Err(SusyError::Invalid(
            "chain parameters and seed disagree on the factorization energy".into(),
        ));
    }
    let mut members = Vec::with_capacity(k);
    let mut members_x = Vec::with_capacity(k);
    for j in 1..=k {
        members.push(assemble(&seed.u, &seed.v, params, j)?);
        members_x.push(assemble(&seed.ux, &seed.vx, params, j)?);
    }
    Ok(JordanChain {
        params: params.clone(),
        members,
        members_x,
        residuals: Vec::new(),
    })
}

/// Per-link chain-closure residuals
/// `||(H - eps) u_j - u_{j-1}||_inf / max(||u_j||, ||u_{j-1}||)`
/// (homogeneous for j = 1), using the stencil second derivative.
pub fn verify_chain<'a>(chain: &'a mut JordanChain, v0: &SampledFunction) -> Result<&'a [f64]> {
    let eps = chain.params.epsilon();
    let d2 = DerivativeStencil::default_for(2);
    let mut residuals = Vec::with_capacity(chain.members.len());
    for j in 1..=chain.members.len() {
        let uj = &chain.members[j - 1];
        let ujm1 = (j >= 2).then(|| &chain.members[j - 2]);
        let dd = d2.apply(uj)?;
        let mut worst = 0.0f64;
        for i in 0..uj.len() {
            let mut r = -dd.value(i) + (v0.value(i) - eps) * uj.value(i);
            if let Some(prev) = ujm1 {
                r -= prev.value(i);
            }
            worst = worst.max(r.norm());
        }
        let scale = match ujm1 {
            Some(prev) => uj.max_abs().max(prev.max_abs()),
            None => uj.max_abs(),
        };
        residuals.push(worst / scale.max(1e-300));
    }
    chain.residuals = residuals;
    Ok(&chain.residuals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, rel_sup_diff};
    use crate::seeds::{build_seed, FamilySpec, SeedRequest};
    use crate::tol::{RESIDUAL_TOL_ANALYTIC, RESIDUAL_TOL_LAME};

    fn free_seed_k(eps: f64, k: usize) -> SeedEvaluation {
        build_seed(&SeedRequest {
            family: FamilySpec::FreeParticle,
            epsilon: Complex64::new(eps, 0.0),
            k,
            grid: make_grid(-8.0, 8.0, 4001).unwrap(),
        })
        .unwrap()
    }

    #[test]
    fn zero_constants_give_pure_derivative() {
        // k = 2, C1 = D1 = 0 -> u_2 = d_eps u exactly
        let seed = free_seed_k(-1.0, 2);
        let params = ChainParameters::zero(seed.epsilon, 2).unwrap();
        let chain = build_chain(&seed, &params).unwrap();
        assert_eq!(chain.members[1], seed.u[1]);
    }

    #[test]
    fn k3_matches_term_by_term() {
        // u_3 = C2 u + D2 v + C1 du + D1 dv + d2u/2
        let seed = free_seed_k(-1.3, 3);
        let (c1, c2, d1, d2v) = (0.4, -0.7, 0.9, 0.25);
        let params =
            ChainParameters::new(seed.epsilon, 3, vec![c1, c2], vec![d1, d2v]).unwrap();
        let chain = build_chain(&seed, &params).unwrap();
        let expect = SampledFunction::linear_combination(&[
            (Complex64::new(c2, 0.0), &seed.u[0]),
            (Complex64::new(d2v, 0.0), &seed.v[0]),
            (Complex64::new(c1, 0.0), &seed.u[1]),
            (Complex64::new(d1, 0.0), &seed.v[1]),
            (Complex64::new(0.5, 0.0), &seed.u[2]),
        ])
        .unwrap();
        assert!(rel_sup_diff(&chain.members[2], &expect) < 1e-15);
    }

    #[test]
    fn k4_leading_term_weight() {
        // the d^3u term of u_4 carries 1/6
        let seed = free_seed_k(-1.0, 4);
        let params = ChainParameters::zero(seed.epsilon, 4).unwrap();
        let chain = build_chain(&seed, &params).unwrap();
        let expect = seed.u[3].scaled(Complex64::new(1.0 / 6.0, 0.0));
        assert!(rel_sup_diff(&chain.members[3], &expect) < 1e-15);
    }

    #[test]
    fn free_chain_residuals_small() {
        let seed = free_seed_k(-2.0, 4);
        // fixed pseudo-random constants in [-1, 1]
        let params = ChainParameters::new(
            seed.epsilon,
            4,
            vec![0.62, -0.41, 0.83],
            vec![-0.27, 0.95, 0.11],
        )
        .unwrap();
        let mut chain = build_chain(&seed, &params).unwrap();
        let residuals = verify_chain(&mut chain, &seed.v0).unwrap();
        for (j, r) in residuals.iter().enumerate() {
            assert!(*r < 1e-7, "link {}: residual {r}", j + 1);
        }
    }

    #[test]
    fn lame_chain_residuals_small() {
        let grid = make_grid(-7.5, 7.5, 4001).unwrap();
        let seed = build_seed(&SeedRequest {
            family: FamilySpec::Lame { m: 0.5 },
            epsilon: Complex64::new(-0.5, 0.0),
            k: 3,
            grid,
        })
        .unwrap();
        let params =
            ChainParameters::new(seed.epsilon, 3, vec![0.1, 0.0], vec![0.05, 0.01]).unwrap();
        let mut chain = build_chain(&seed, &params).unwrap();
        let residuals = verify_chain(&mut chain, &seed.v0).unwrap();
        assert!(residuals[0] < RESIDUAL_TOL_ANALYTIC, "link 1: {}", residuals[0]);
        for (j, r) in residuals.iter().enumerate().skip(1) {
            assert!(*r < RESIDUAL_TOL_LAME.min(1e-5), "link {}: residual {r}", j + 1);
        }
    }

    #[test]
    fn affine_in_parameters() {
        let seed = free_seed_k(-1.0, 3);
        let base = ChainParameters::new(seed.epsilon, 3, vec![0.3, 0.0], vec![0.5, 0.2]).unwrap();
        let doubled = ChainParameters::new(seed.epsilon, 3, vec![0.3, 0.0], vec![1.0, 0.2]).unwrap();
        let zeroed = ChainParameters::new(seed.epsilon, 3, vec![0.3, 0.0], vec![0.0, 0.2]).unwrap();
        let cb = build_chain(&seed, &base).unwrap();
        let cd = build_chain(&seed, &doubled).unwrap();
        let cz = build_chain(&seed, &zeroed).unwrap();
        // chain(D1 = 1.0) - chain(D1 = 0.5) == chain(D1 = 0.5) - chain(D1 = 0)
        for j in 0..3 {
            let scale = cb.members[j].max_abs();
            for i in (0..seed.grid.n_points()).step_by(101) {
                let lhs = cd.members[j].value(i) - cb.members[j].value(i);
                let rhs = cb.members[j].value(i) - cz.members[j].value(i);
                assert!((lhs - rhs).norm() <= 1e-13 * scale.max(1.0));
            }
        }
    }
}
