//! Second route to every parametrix operator, used to cross-check the
//! relations that express them through Laplace operators.
//!
//! Boundary operators are assembled straight from the parametrix kernels
//! (log part by the product rule, remainder by the trapezoid rule). Layer
//! and volume potentials are recomputed from Laplace potentials of
//! modified densities, and `ℛ` from the divergence form
//! `ℛρ = ∇·𝒫_Δ(ρ∇ln a) - 𝒫_Δ(ρΔln a)` (or `-∇·𝒫_Δ(ρ∇a)/a(y)`) with a
//! finite-difference divergence.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use super::{BoundaryDensity, LayerEvaluator, LayerKind, ParametrixFamily, ScalarField, VolumeOperators, VolumeTarget};
use crate::coefficient::Coefficient;
use crate::error::{BdiesError, Result};
use crate::geometry::BoundaryCurve;
use crate::linalg::dense_from_rows;
use crate::quadrature::log_sine_weights;
use crate::Vec2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryOp {
    /// `𝒱`
    Single,
    /// `𝒲`
    Double,
    /// `𝒲'`
    Adjoint,
}

/// Boundary operator matrix from the kernel `A(x,y) log|x-y| + B(x,y)`.
pub fn boundary_matrix_by_kernel(
    curve: &BoundaryCurve,
    coeff: &Coefficient,
    family: ParametrixFamily,
    op: BoundaryOp,
) -> DMatrix<f64> {
    let n = curve.len();
    let h = 2.0 * PI / n as f64;
    let logw = log_sine_weights(n);
    let a: Vec<f64> = curve.points.iter().map(|&x| coeff.a(x)).collect();
    let dn: Vec<f64> = curve
        .points
        .iter()
        .zip(&curve.normals)
        .map(|(&x, &nx)| coeff.normal_log_derivative(x, nx))
        .collect();
    // i indexes the target y, j the integration point x
    dense_from_rows(n, n, |i| {
        (0..n)
            .map(|j| {
                let log_coef = match (op, family) {
                    (BoundaryOp::Single, ParametrixFamily::AtX) => -1.0 / (2.0 * PI * a[j]),
                    (BoundaryOp::Single, ParametrixFamily::AtY) => -1.0 / (2.0 * PI * a[i]),
                    (BoundaryOp::Double, ParametrixFamily::AtX) => dn[j] / (2.0 * PI),
                    (BoundaryOp::Adjoint, ParametrixFamily::AtY) => dn[i] / (2.0 * PI),
                    _ => 0.0,
                };
                let smooth = match op {
                    BoundaryOp::Single => 0.0,
                    BoundaryOp::Double => {
                        let k = if i == j {
                            0.5 * curve.curvature[j]
                        } else {
                            let d = curve.points[j] - curve.points[i];
                            d.dot(&curve.normals[j]) / d.norm_squared()
                        };
                        let scale = match family {
                            ParametrixFamily::AtX => 1.0,
                            ParametrixFamily::AtY => a[j] / a[i],
                        };
                        -scale * k / (2.0 * PI)
                    }
                    BoundaryOp::Adjoint => {
                        let k = if i == j {
                            0.5 * curve.curvature[i]
                        } else {
                            let d = curve.points[i] - curve.points[j];
                            d.dot(&curve.normals[i]) / d.norm_squared()
                        };
                        let scale = match family {
                            ParametrixFamily::AtX => a[i] / a[j],
                            ParametrixFamily::AtY => 1.0,
                        };
                        -scale * k / (2.0 * PI)
                    }
                };
                let log_part = if log_coef == 0.0 {
                    0.0
                } else {
                    let rest = if i == j {
                        curve.speeds[i].ln()
                    } else {
                        let s = (0.5 * (curve.params[i] - curve.params[j])).sin();
                        (curve.points[j] - curve.points[i]).norm().ln() - (2.0 * s.abs()).ln()
                    };
                    log_coef * (0.5 * logw[(i + n - j) % n] + h * rest)
                };
                (log_part + h * smooth) * curve.speeds[j]
            })
            .collect()
    })
}

/// `V` or `W` at `y` through Laplace layer potentials:
/// `AtX`: `Vρ = V_Δ(ρ/a)`, `Wτ = W_Δτ - V_Δ(τ ∂_n ln a)`;
/// `AtY`: `Vρ = V_Δρ / a(y)`, `Wτ = W_Δ(aτ) / a(y)`.
pub fn layer_by_relation(
    curve: &BoundaryCurve,
    coeff: &Coefficient,
    family: ParametrixFamily,
    kind: LayerKind,
    density: &BoundaryDensity,
    y: Vec2,
) -> Result<f64> {
    let unit = Coefficient::constant(1.0)?;
    let lap = LayerEvaluator::new(curve, &unit, ParametrixFamily::AtX);
    let a: Vec<f64> = curve.points.iter().map(|&x| coeff.a(x)).collect();
    let scaled = |f: &dyn Fn(usize, f64) -> f64| {
        BoundaryDensity::new(density.values.iter().enumerate().map(|(j, &v)| f(j, v)).collect())
    };
    let ay = coeff.a(y);
    match (kind, family) {
        (LayerKind::Single, ParametrixFamily::AtX) => lap.eval(LayerKind::Single, &scaled(&|j, v| v / a[j]), y),
        (LayerKind::Single, ParametrixFamily::AtY) => Ok(lap.eval(LayerKind::Single, density, y)? / ay),
        (LayerKind::Double, ParametrixFamily::AtX) => {
            let dn = scaled(&|j, v| v * coeff.normal_log_derivative(curve.points[j], curve.normals[j]));
            Ok(lap.eval(LayerKind::Double, density, y)? - lap.eval(LayerKind::Single, &dn, y)?)
        }
        (LayerKind::Double, ParametrixFamily::AtY) => {
            Ok(lap.eval(LayerKind::Double, &scaled(&|j, v| v * a[j]), y)? / ay)
        }
    }
}

/// `𝒫ρ` through `𝒫_Δ`: `𝒫_Δ(ρ/a)` or `𝒫_Δρ / a(y)`.
pub fn potential_by_relation(
    ops: &VolumeOperators<'_>,
    coeff: &Coefficient,
    rho: &dyn ScalarField,
    target: VolumeTarget,
) -> Result<f64> {
    match ops.family() {
        ParametrixFamily::AtX => {
            let f = |x: Vec2| rho.value(x) / coeff.a(x);
            ops.laplace_potential(&f, target)
        }
        ParametrixFamily::AtY => Ok(ops.laplace_potential(rho, target)? / coeff.a(target.point())),
    }
}

/// `ℛρ(y)` from the divergence form, with a fourth-order central
/// difference of step `step`. The target must be at least `2 step` inside.
pub fn remainder_by_relation(
    ops: &VolumeOperators<'_>,
    coeff: &Coefficient,
    rho: &dyn ScalarField,
    y: Vec2,
    step: f64,
    distance_to_boundary: f64,
) -> Result<f64> {
    if distance_to_boundary <= 2.0 * step {
        return Err(BdiesError::TargetTooClose {
            distance: distance_to_boundary,
            threshold: 2.0 * step,
        });
    }
    // components of the vector density: ρ∇ln a (AtX) or ρ∇a (AtY)
    let family = ops.family();
    let vector = move |x: Vec2| -> Vec2 {
        match family {
            ParametrixFamily::AtX => rho.value(x) * coeff.grad_ln_a(x),
            ParametrixFamily::AtY => rho.value(x) * coeff.grad_a(x),
        }
    };
    let mut div = 0.0;
    for axis in 0..2 {
        let component = |x: Vec2| vector(x)[axis];
        let mut e = Vec2::zeros();
        e[axis] = step;
        let at = |k: f64| ops.laplace_potential(&component, VolumeTarget::Interior(y + k * e));
        div += (at(-2.0)? - 8.0 * at(-1.0)? + 8.0 * at(1.0)? - at(2.0)?) / (12.0 * step);
    }
    Ok(match family {
        ParametrixFamily::AtX => {
            let lap = |x: Vec2| rho.value(x) * coeff.laplacian_ln_a(x);
            div - ops.laplace_potential(&lap, VolumeTarget::Interior(y))?
        }
        ParametrixFamily::AtY => -div / coeff.a(y),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Discretization, DomainSpec, Resolution};
    use crate::potentials::BoundaryOperators;

    fn max_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
        (a - b).amax()
    }

    #[test]
    fn kernel_route_matches_relations() {
        let spec = DomainSpec::star(Vec2::new(0.01, 0.02), vec![0.32, 0.0, 0.03, 0.01]).unwrap();
        let curve = BoundaryCurve::new(&spec, 64).unwrap();
        let coeff = Coefficient::exponential(Vec2::new(0.7, -1.1)).unwrap();
        for fam in [ParametrixFamily::AtX, ParametrixFamily::AtY] {
            let rel = BoundaryOperators::new(&curve, &coeff, fam);
            let k = |op| boundary_matrix_by_kernel(&curve, &coeff, fam, op);
            assert!(max_diff(&rel.single, &k(BoundaryOp::Single)) < 1e-13);
            assert!(max_diff(&rel.double, &k(BoundaryOp::Double)) < 1e-13);
            assert!(max_diff(&rel.adjoint, &k(BoundaryOp::Adjoint)) < 1e-13);
        }
    }

    #[test]
    fn remainder_relation_at_centre() {
        let d = Discretization::new(
            DomainSpec::disk(Vec2::zeros(), 0.4).unwrap(),
            Resolution::new(64, 16, 8),
        )
        .unwrap();
        let coeff = Coefficient::quadratic();
        let rho = |x: Vec2| 1.0 + x.x;
        for fam in [ParametrixFamily::AtX, ParametrixFamily::AtY] {
            let ops = VolumeOperators::new(&d, &coeff, fam);
            let y = Vec2::new(0.05, -0.1);
            let a = ops.remainder(&rho, VolumeTarget::Interior(y)).unwrap();
            let b = remainder_by_relation(&ops, &coeff, &rho, y, 1e-3, d.spec.distance_to_boundary(y)).unwrap();
            assert!((a - b).abs() < 1e-7, "{fam:?}: {a} vs {b}");
        }
    }
}
