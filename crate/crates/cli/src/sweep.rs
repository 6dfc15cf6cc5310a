//! Parallel sweeps. Members run concurrently; results keep the input order.

use plasma_penalty_core::experiments::{
    blowup_member, convergence_member, validate_etas, validate_resolutions,
};
use plasma_penalty_core::{BlowupStudy, ConvergenceStudy, Error, PenaltyKind, Result, RunConfig};
use rayon::prelude::*;

pub fn convergence(etas: &[f64], base: &RunConfig) -> Result<ConvergenceStudy> {
    validate_etas(etas)?;
    if base.penalty.kind() == PenaltyKind::None {
        return Err(Error::Config("a convergence study needs a penalty"));
    }
    let reports: Vec<_> = etas
        .par_iter()
        .map(|&eta| convergence_member(base, eta))
        .collect();
    ConvergenceStudy::from_reports(reports.into_iter().collect::<Result<_>>()?)
}

/// A single resolution is accepted; the trend flags are then vacuous.
pub fn blowup(cells: &[usize], cfg: &RunConfig) -> Result<BlowupStudy> {
    if cells.len() > 1 {
        validate_resolutions(cells)?;
    } else if cells.is_empty() {
        return Err(Error::Config("at least one resolution is required"));
    }
    let reports: Vec<_> = cells.par_iter().map(|&j| blowup_member(cfg, j)).collect();
    let reports = reports.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(BlowupStudy::from_reports(reports, cfg.mesh.limiter_start()))
}
