//! End-to-end driver: seed -> Jordan chain -> cross-checked Wronskian ->
//! deformed potential and added state, with every diagnostic filled in.

use crate::chain::{build_chain, verify_chain};
use crate::error::Result;
use crate::grid::Grid;
use crate::params::ChainParameters;
use crate::seeds::{build_seed, FamilySpec, SeedDiagnostics, SeedEvaluation, SeedRequest};
use crate::transform::{
    added_state_residual, normalizability_check, transform, Normalizability, TransformResult,
};
use crate::wronskian::{crosschecked_bundle, reduced_bundle};

/// One full transformation request.
#[derive(Debug, Clone)]
pub struct TransformJob {
    pub family: FamilySpec,
    pub params: ChainParameters,
    pub grid: Grid,
    /// run all Wronskian methods and record their agreement (skipped in bulk
    /// scans where the reduced route alone is wanted)
    pub crosscheck: bool,
}

/// Result plus the seed-level diagnostics and the added-state classification.
#[derive(Debug, Clone)]
pub struct TransformOutput {
    pub result: TransformResult,
    pub seed_diagnostics: SeedDiagnostics,
    pub normalizability: Normalizability,
}

pub fn run_transform(job: &TransformJob) -> Result<TransformOutput> {
    let seed = build_seed(&SeedRequest {
        family: job.family.clone(),
        epsilon: job.params.epsilon(),
        k: job.params.k(),
        grid: job.grid,
    })?;
    run_transform_with_seed(&seed, job)
}

/// Same, reusing an existing seed (parameter scans at fixed energy).
pub fn run_transform_with_seed(
    seed: &SeedEvaluation,
    job: &TransformJob,
) -> Result<TransformOutput> {
    // the seed's epsilon is the authoritative one (delta-derived for Lame)
    let params = ChainParameters::new(
        seed.epsilon,
        job.params.k(),
        job.params.c().to_vec(),
        job.params.d().to_vec(),
    )?;
    let bundle = if job.crosscheck {
        crosschecked_bundle(seed, &params)?
    } else {
        reduced_bundle(seed, &params)?
    };
    let mut result = transform(&seed.v0, &bundle)?;
    result.diagnostics.method_crosscheck = bundle.crosscheck;

    let mut chain = build_chain(seed, &params)?;
    result.diagnostics.chain_residuals = verify_chain(&mut chain, &seed.v0)?.to_vec();

    if !result.is_singular() {
        result.diagnostics.psi_residual =
            Some(added_state_residual(&result.psi_k, &result.vk, seed.epsilon)?);
    }
    let normalizability = normalizability_check(&result.psi_k);
    Ok(TransformOutput {
        result,
        seed_diagnostics: seed.diagnostics.clone(),
        normalizability,
    })
}
