//! The `p → 1` sweep: solve along a decreasing schedule of exponents with
//! warm starts, watch `λ_{1,p}` approach `h(Ω)`, and check that the last
//! eigenfunction splits into nested Cheeger cuts.

use crate::cheeger::{cheeger_constant_with_limit, CheegerReport, DEFAULT_ENUMERATION_LIMIT};
use crate::error::{Error, Result};
use crate::graph::{DirichletFunction, Domain};
use crate::one_laplacian::{decompose_limit, structure_report_with, Decomposition};
use crate::spectral::{first_eigenpair, SolverOptions};

/// `p_k = 1 + 2^{−k}` for `k = 1..=steps`.
pub fn default_schedule(steps: usize) -> Result<Vec<f64>> {
    if steps < 2 {
        return Err(Error::InvalidSteps(steps));
    }
    Ok((1..=steps as i32).map(|k| 1.0 + 2f64.powi(-k)).collect())
}

#[derive(Clone, Debug)]
pub struct SweepOptions {
    pub solver: SolverOptions,
    /// Largest ∞-distance between the last two eigenfunctions for convergence.
    pub u_tolerance: f64,
    /// Largest `|λ_last − h|` for convergence.
    pub lambda_tolerance: f64,
    /// Relative clustering tolerance for the limit decomposition.
    pub delta: f64,
    pub enumeration_limit: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            solver: SolverOptions::default(),
            u_tolerance: 1e-4,
            lambda_tolerance: 1e-3,
            delta: 1e-6,
            enumeration_limit: DEFAULT_ENUMERATION_LIMIT,
        }
    }
}

/// One solved exponent.
#[derive(Clone, Debug)]
pub struct SweepRecord {
    pub p: f64,
    pub lambda: f64,
    pub u: DirichletFunction,
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Clone, Debug)]
pub struct SweepReport {
    pub domain: Domain,
    pub schedule: Vec<f64>,
    /// In schedule order, so by decreasing `p`.
    pub records: Vec<SweepRecord>,
    /// `None` when `Ω` exceeds the enumeration limit.
    pub cheeger: Option<CheegerReport>,
    pub limit_estimate: DirichletFunction,
    pub decomposition: Decomposition,
    pub converged: bool,
    pub warnings: Vec<String>,
}

impl SweepReport {
    pub fn h(&self) -> Option<f64> {
        self.cheeger.as_ref().map(|c| c.h)
    }

    pub fn last(&self) -> &SweepRecord {
        self.records.last().expect("a sweep has at least two records")
    }
}

/// Sweep with default tolerances.
pub fn sweep(d: &Domain, schedule: &[f64], opts: &SolverOptions) -> Result<SweepReport> {
    sweep_with(
        d,
        schedule,
        &SweepOptions {
            solver: opts.clone(),
            ..SweepOptions::default()
        },
    )
}

pub fn sweep_with(d: &Domain, schedule: &[f64], opts: &SweepOptions) -> Result<SweepReport> {
    sweep_observed(d, schedule, opts, |_| {})
}

/// [`sweep_with`], calling `observe` after each exponent is solved.
pub fn sweep_observed(
    d: &Domain,
    schedule: &[f64],
    opts: &SweepOptions,
    mut observe: impl FnMut(&SweepRecord),
) -> Result<SweepReport> {
    if schedule.len() < 2 {
        return Err(Error::InvalidSteps(schedule.len()));
    }
    if schedule.iter().any(|&p| !(p > 1.0 && p.is_finite())) {
        return Err(Error::InvalidSchedule("every exponent must exceed 1".into()));
    }
    if schedule.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidSchedule("exponents must strictly decrease".into()));
    }
    let mut warnings = Vec::new();
    let cheeger = match cheeger_constant_with_limit(d, opts.enumeration_limit) {
        Ok(c) => Some(c),
        Err(Error::DomainTooLarge { size, limit }) => {
            warnings.push(format!(
                "|Ω| = {size} exceeds the enumeration limit {limit}; h(Ω) and the eigenvalue ceiling are not checked"
            ));
            None
        }
        Err(e) => return Err(e),
    };

    let mut records: Vec<SweepRecord> = Vec::with_capacity(schedule.len());
    for &p in schedule {
        let mut solver = opts.solver.clone();
        if let Some(prev) = records.last() {
            solver.initial_guess = Some(prev.u.clone());
        }
        let e = first_eigenpair(d, p, &solver).map_err(|source| Error::SweepFailed {
            p,
            completed: records.len(),
            source: Box::new(source),
        })?;
        records.push(SweepRecord {
            p,
            lambda: e.lambda,
            u: e.u,
            residual: e.residual,
            iterations: e.iterations,
        });
        observe(records.last().unwrap());
    }

    let n = records.len();
    let limit_estimate = records[n - 1].u.clone();
    let step = records[n - 1].u.sup_distance(&records[n - 2].u);
    let lambda_ok = cheeger
        .as_ref()
        .is_none_or(|c| (records[n - 1].lambda - c.h).abs() <= opts.lambda_tolerance);
    let converged = step <= opts.u_tolerance && lambda_ok;
    let decomposition = decompose_limit(d, &limit_estimate, opts.delta)?;
    Ok(SweepReport {
        domain: d.clone(),
        schedule: schedule.to_vec(),
        records,
        cheeger,
        limit_estimate,
        decomposition,
        converged,
        warnings,
    })
}

/// Decomposes the limit estimate and requires every level set to be an exact
/// Cheeger cut and the sets to be strictly nested.
pub fn extract_and_verify(report: &SweepReport, delta: f64) -> Result<Decomposition> {
    if !report.converged {
        return Err(Error::NotConverged);
    }
    let d = &report.domain;
    let cheeger = match &report.cheeger {
        Some(c) => c.clone(),
        None => cheeger_constant_with_limit(d, DEFAULT_ENUMERATION_LIMIT)?,
    };
    let s = structure_report_with(d, &report.limit_estimate, delta, &cheeger)?;
    if let Some(bad) = s.levels.iter().find(|l| !l.is_cheeger_cut) {
        return Err(Error::StructureViolation(format!(
            "level set {:?} has ratio {} but h = {}",
            d.graph().set_ids(&bad.set),
            bad.ratio,
            s.h
        )));
    }
    if !s.nested {
        return Err(Error::StructureViolation("level sets are not strictly nested".into()));
    }
    Ok(s.decomposition)
}
