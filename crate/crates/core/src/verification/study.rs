use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;

use super::ManufacturedCase;
use crate::error::{BdiesError, Result};
use crate::geometry::{Discretization, DomainSpec, Resolution};
use crate::potentials::ParametrixFamily;
use crate::solver::{BdieSystem, DirichletSolution, SolveOptions};

/// Errors of one solve against the exact solution.
#[derive(Debug, Clone, Serialize)]
pub struct StudyRow {
    pub n_boundary: usize,
    pub n_t: usize,
    pub n_s: usize,
    /// `max |u_h - u| / max |u|` over the grid nodes.
    pub err_u_max: f64,
    /// Quadrature-weighted relative L2 error over the grid nodes.
    pub err_u_l2: f64,
    /// `max |ψ_h - a ∂u/∂n|` over the boundary nodes.
    pub err_psi_max: f64,
    /// `max |γ⁺u_h - φ₀|` with `γ⁺u_h` from the grid interpolant.
    pub err_trace: f64,
    /// `log2(e_prev / e)` of `err_u_max` against the previous row.
    pub order: Option<f64>,
    pub cond: f64,
    pub seconds: f64,
}

impl StudyRow {
    pub fn resolution(&self) -> Resolution {
        Resolution::new(self.n_boundary, self.n_t, self.n_s)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StudyReport {
    pub case: String,
    pub family: String,
    /// Set for the `AtY` family, whose system is not covered by the
    /// equivalence theory.
    pub experimental: bool,
    pub rows: Vec<StudyRow>,
}

impl StudyReport {
    pub fn finest(&self) -> Option<&StudyRow> {
        self.rows.last()
    }

    /// Observed order on the final refinement pair.
    pub fn final_order(&self) -> Option<f64> {
        self.rows.last().and_then(|r| r.order)
    }

    /// Interior error decreases across the final refinement pair.
    pub fn final_pair_decreases(&self) -> bool {
        match self.rows.as_slice() {
            [.., a, b] => b.err_u_max < a.err_u_max,
            _ => false,
        }
    }

    /// Interior error decreases at every refinement.
    pub fn monotone(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].err_u_max < w[0].err_u_max)
    }
}

/// One solve of a manufactured case, with its error row.
pub struct CaseRun {
    pub solution: DirichletSolution,
    pub row: StudyRow,
}

pub fn solve_case(
    case: &ManufacturedCase,
    spec: &DomainSpec,
    resolution: Resolution,
    options: SolveOptions,
) -> Result<CaseRun> {
    let start = Instant::now();
    let disc = Arc::new(Discretization::new(spec.clone(), resolution)?);
    let phi0 = case.phi0(&disc.curve);
    let system = BdieSystem::assemble(disc.clone(), &case.coeff, options, case.source(), phi0)?;
    let solution = system.solve()?;
    let seconds = start.elapsed().as_secs_f64();

    let grid = &disc.grid;
    let exact: Vec<f64> = grid.sample(|x| case.u(x));
    let u_scale = exact.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
    let u_max = exact
        .iter()
        .zip(&solution.u.values)
        .fold(0.0, |m: f64, (e, v)| m.max((e - v).abs()));
    let diff2: Vec<f64> = exact
        .iter()
        .zip(&solution.u.values)
        .map(|(e, v)| (e - v) * (e - v))
        .collect();
    let norm2: Vec<f64> = exact.iter().map(|e| e * e).collect();
    let (num, den) = (grid.integrate(&diff2).sqrt(), grid.integrate(&norm2).sqrt());
    let psi = case.psi_exact(&disc.curve);
    let err_psi_max = psi
        .values
        .iter()
        .zip(&solution.psi.values)
        .fold(0.0, |m: f64, (e, v)| m.max((e - v).abs()));
    let row = StudyRow {
        n_boundary: resolution.n_boundary,
        n_t: resolution.n_t,
        n_s: resolution.n_s,
        err_u_max: if u_scale > 0.0 { u_max / u_scale } else { u_max },
        err_u_l2: if den > 0.0 { num / den } else { num },
        err_psi_max,
        err_trace: solution.trace_error(),
        order: None,
        cond: solution.condition,
        seconds,
    };
    Ok(CaseRun { solution, row })
}

/// Solves a manufactured case at each resolution in turn.
pub fn convergence_study(
    case: &ManufacturedCase,
    spec: &DomainSpec,
    options: SolveOptions,
    resolutions: &[Resolution],
) -> Result<StudyReport> {
    if resolutions.len() < 3 {
        return Err(BdiesError::InvalidResolution(format!(
            "a convergence study needs at least 3 resolutions, got {}",
            resolutions.len()
        )));
    }
    let mut rows: Vec<StudyRow> = Vec::with_capacity(resolutions.len());
    for &res in resolutions {
        let mut row = solve_case(case, spec, res, options)?.row;
        if let Some(prev) = rows.last() {
            row.order = Some((prev.err_u_max / row.err_u_max).log2());
        }
        rows.push(row);
    }
    Ok(StudyReport {
        case: case.name.to_string(),
        family: options.family.tag().to_string(),
        experimental: options.family == ParametrixFamily::AtY,
        rows,
    })
}

/// Runs the same study for both parametrix families: `(AtX, AtY)`. The
/// family in `options` is ignored.
pub fn compare_families(
    case: &ManufacturedCase,
    spec: &DomainSpec,
    options: SolveOptions,
    resolutions: &[Resolution],
) -> Result<(StudyReport, StudyReport)> {
    let with = |family| SolveOptions { family, ..options };
    Ok((
        convergence_study(case, spec, with(ParametrixFamily::AtX), resolutions)?,
        convergence_study(case, spec, with(ParametrixFamily::AtY), resolutions)?,
    ))
}
