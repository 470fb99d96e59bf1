use std::sync::Arc;

use nalgebra::DVector;
use rayon::prelude::*;

use super::Source;
use crate::coefficient::Coefficient;
use crate::error::{BdiesError, Result};
use crate::geometry::Discretization;
use crate::potentials::{
    check_len, BoundaryDensity, BoundaryOperators, DomainField, LayerEvaluator, LayerKind, ParametrixFamily,
    ScalarField, VolumeOperators, VolumeTarget,
};
use crate::Vec2;

/// Solved nodal `u` and boundary `ψ`, with everything needed to evaluate
/// `u` elsewhere through the representation formula.
#[derive(Clone)]
pub struct DirichletSolution {
    pub disc: Arc<Discretization>,
    pub coeff: Coefficient,
    pub family: ParametrixFamily,
    pub u: DomainField,
    pub psi: BoundaryDensity,
    pub phi0: BoundaryDensity,
    pub f: Source,
    /// `‖A x - b‖ / ‖b‖` of the linear solve (absolute when `b = 0`).
    pub residual: f64,
    /// 1-norm condition estimate of the system matrix.
    pub condition: f64,
    /// Lagrange multiplier of the bordered system, if any.
    pub multiplier: Option<f64>,
}

impl DirichletSolution {
    /// `u(y) = 𝒫f - ℛu + Vψ - Wφ₀` at an interior point.
    pub fn evaluate(&self, y: Vec2) -> Result<f64> {
        evaluate_solution(self, y)
    }

    /// Trace of the grid interpolant of `u` at the boundary nodes.
    pub fn trace(&self) -> Vec<f64> {
        self.disc.curve.points.iter().map(|&x| self.u.interpolate(x)).collect()
    }

    /// `max_j |γ⁺u(x_j) - φ₀(x_j)|`.
    pub fn trace_error(&self) -> f64 {
        self.trace()
            .iter()
            .zip(&self.phi0.values)
            .fold(0.0, |m: f64, (a, b)| m.max((a - b).abs()))
    }
}

pub fn evaluate_solution(sol: &DirichletSolution, y: Vec2) -> Result<f64> {
    let disc = &sol.disc;
    let threshold = 2.0 * disc.curve.spacing();
    let d = disc.spec.distance_to_boundary(y);
    if !disc.spec.contains(y) {
        return Err(BdiesError::TargetOutside([y.x, y.y]));
    }
    if d < threshold {
        return Err(BdiesError::TargetTooClose { distance: d, threshold });
    }
    let volume = VolumeOperators::new(disc, &sol.coeff, sol.family);
    let layer = LayerEvaluator::new(&disc.curve, &sol.coeff, sol.family);
    let t = VolumeTarget::Interior(y);
    Ok(volume.potential(sol.f.as_ref(), t)? - volume.remainder(&sol.u, t)?
        + layer.eval(LayerKind::Single, &sol.psi, y)?
        - layer.eval(LayerKind::Double, &sol.phi0, y)?)
}

/// `u(y) + ℛu(y) - Vψ(y) + Wφ₀(y) - 𝒫f(y)` at interior targets.
#[allow(clippy::too_many_arguments)]
pub fn third_green_residual(
    disc: &Discretization,
    coeff: &Coefficient,
    family: ParametrixFamily,
    u: &dyn ScalarField,
    psi: &BoundaryDensity,
    f: &dyn ScalarField,
    phi0: &BoundaryDensity,
    targets: &[Vec2],
) -> Result<Vec<f64>> {
    check_len(&disc.curve, psi.len())?;
    check_len(&disc.curve, phi0.len())?;
    let volume = VolumeOperators::new(disc, coeff, family);
    let layer = LayerEvaluator::new(&disc.curve, coeff, family);
    targets
        .par_iter()
        .map(|&y| {
            let t = VolumeTarget::Interior(y);
            Ok(
                u.value(y) + volume.remainder(u, t)? - layer.eval(LayerKind::Single, psi, y)?
                    + layer.eval(LayerKind::Double, phi0, y)?
                    - volume.potential(f, t)?,
            )
        })
        .collect()
}

/// Boundary form `φ₀/2 + γ⁺ℛu - 𝒱ψ + 𝒲φ₀ - 𝒫f` at every boundary node,
/// where `φ₀` is the trace of `u`.
#[allow(clippy::too_many_arguments)]
pub fn third_green_residual_boundary(
    disc: &Discretization,
    coeff: &Coefficient,
    family: ParametrixFamily,
    u: &dyn ScalarField,
    psi: &BoundaryDensity,
    f: &dyn ScalarField,
    phi0: &BoundaryDensity,
) -> Result<Vec<f64>> {
    check_len(&disc.curve, psi.len())?;
    check_len(&disc.curve, phi0.len())?;
    let volume = VolumeOperators::new(disc, coeff, family);
    let ops = BoundaryOperators::new(&disc.curve, coeff, family);
    let v = &ops.single * DVector::from_column_slice(&psi.values);
    let w = &ops.double * DVector::from_column_slice(&phi0.values);
    (0..disc.curve.len())
        .into_par_iter()
        .map(|j| {
            let t = VolumeTarget::boundary_node(&disc.curve, j);
            Ok(0.5 * phi0.values[j] + volume.remainder(u, t)? - v[j] + w[j] - volume.potential(f, t)?)
        })
        .collect()
}
