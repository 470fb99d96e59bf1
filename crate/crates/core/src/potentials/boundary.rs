//! Direct values on the boundary: `𝒱`, `𝒲` and `𝒲'`.
//!
//! The log-singular part of the single layer is integrated with the
//! product rule for `log(4 sin²((t-τ)/2))`; the double-layer kernels are
//! smooth on a smooth curve and use the trapezoid rule with their curvature
//! limit on the diagonal.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use super::{check_len, BoundaryDensity, ParametrixFamily};
use crate::coefficient::Coefficient;
use crate::error::Result;
use crate::geometry::BoundaryCurve;
use crate::linalg::dense_from_rows;
use crate::quadrature::log_sine_weights;

/// Nyström matrices of the Laplace operators `𝒱_Δ`, `𝒲_Δ`, `𝒲'_Δ`.
#[derive(Debug, Clone)]
pub struct LaplaceBoundary {
    pub single: DMatrix<f64>,
    pub double: DMatrix<f64>,
    pub adjoint: DMatrix<f64>,
}

impl LaplaceBoundary {
    pub fn new(curve: &BoundaryCurve) -> Self {
        let n = curve.len();
        let h = 2.0 * PI / n as f64;
        let logw = log_sine_weights(n);
        let single = dense_from_rows(n, n, |i| {
            let y = curve.points[i];
            let ti = curve.params[i];
            (0..n)
                .map(|j| {
                    let smooth = if i == j {
                        curve.speeds[i].ln()
                    } else {
                        let s = (0.5 * (ti - curve.params[j])).sin();
                        (curve.points[j] - y).norm().ln() - (2.0 * s.abs()).ln()
                    };
                    let d = (i + n - j) % n;
                    -(0.5 * logw[d] + h * smooth) * curve.speeds[j] / (2.0 * PI)
                })
                .collect()
        });
        let double = dense_from_rows(n, n, |i| {
            let y = curve.points[i];
            (0..n)
                .map(|j| {
                    let k = if i == j {
                        0.5 * curve.curvature[j]
                    } else {
                        let d = curve.points[j] - y;
                        d.dot(&curve.normals[j]) / d.norm_squared()
                    };
                    -curve.weight(j) * k / (2.0 * PI)
                })
                .collect()
        });
        let adjoint = dense_from_rows(n, n, |i| {
            let y = curve.points[i];
            (0..n)
                .map(|j| {
                    let k = if i == j {
                        0.5 * curve.curvature[i]
                    } else {
                        let d = y - curve.points[j];
                        d.dot(&curve.normals[i]) / d.norm_squared()
                    };
                    -curve.weight(j) * k / (2.0 * PI)
                })
                .collect()
        });
        Self {
            single,
            double,
            adjoint,
        }
    }
}

/// Parametrix-based direct-value operators built from their Laplace
/// counterparts.
///
/// For `AtX`: `𝒱ρ = 𝒱_Δ(ρ/a)`, `𝒲ρ = 𝒲_Δρ - 𝒱_Δ(ρ ∂_n ln a)`,
/// `𝒲'ρ = a 𝒲'_Δ(ρ/a)`.
/// For `AtY`: `𝒱ρ = 𝒱_Δρ / a`, `𝒲ρ = 𝒲_Δ(aρ) / a`,
/// `𝒲'ρ = 𝒲'_Δρ - ∂_n ln a 𝒱_Δρ`.
#[derive(Debug, Clone)]
pub struct BoundaryOperators {
    pub family: ParametrixFamily,
    pub single: DMatrix<f64>,
    pub double: DMatrix<f64>,
    pub adjoint: DMatrix<f64>,
}

impl BoundaryOperators {
    pub fn new(curve: &BoundaryCurve, coeff: &Coefficient, family: ParametrixFamily) -> Self {
        Self::from_laplace(&LaplaceBoundary::new(curve), curve, coeff, family)
    }

    pub fn from_laplace(
        lap: &LaplaceBoundary,
        curve: &BoundaryCurve,
        coeff: &Coefficient,
        family: ParametrixFamily,
    ) -> Self {
        let a = DVector::from_iterator(curve.len(), curve.points.iter().map(|&x| coeff.a(x)));
        let inv_a = a.map(|v| 1.0 / v);
        let dn_ln_a = DVector::from_iterator(
            curve.len(),
            curve
                .points
                .iter()
                .zip(&curve.normals)
                .map(|(&x, &n)| coeff.normal_log_derivative(x, n)),
        );
        match family {
            ParametrixFamily::AtX => {
                let single = scale_columns(&lap.single, &inv_a);
                let double = &lap.double - scale_columns(&lap.single, &dn_ln_a);
                let adjoint = scale_rows(&scale_columns(&lap.adjoint, &inv_a), &a);
                Self {
                    family,
                    single,
                    double,
                    adjoint,
                }
            }
            ParametrixFamily::AtY => {
                let single = scale_rows(&lap.single, &inv_a);
                let double = scale_rows(&scale_columns(&lap.double, &a), &inv_a);
                let adjoint = &lap.adjoint - scale_rows(&lap.single, &dn_ln_a);
                Self {
                    family,
                    single,
                    double,
                    adjoint,
                }
            }
        }
    }
}

fn scale_columns(m: &DMatrix<f64>, s: &DVector<f64>) -> DMatrix<f64> {
    let mut out = m.clone();
    for (mut col, &f) in out.column_iter_mut().zip(s.iter()) {
        col *= f;
    }
    out
}

fn scale_rows(m: &DMatrix<f64>, s: &DVector<f64>) -> DMatrix<f64> {
    let mut out = m.clone();
    for (mut row, &f) in out.row_iter_mut().zip(s.iter()) {
        row *= f;
    }
    out
}

fn apply(m: &DMatrix<f64>, rho: &BoundaryDensity) -> BoundaryDensity {
    let v = m * DVector::from_column_slice(&rho.values);
    BoundaryDensity::new(v.as_slice().to_vec())
}

/// `𝒱ρ` at the boundary nodes.
pub fn single_layer_direct(
    curve: &BoundaryCurve,
    coeff: &Coefficient,
    family: ParametrixFamily,
    rho: &BoundaryDensity,
) -> Result<BoundaryDensity> {
    check_len(curve, rho.len())?;
    Ok(apply(&BoundaryOperators::new(curve, coeff, family).single, rho))
}

/// `𝒲τ` at the boundary nodes.
pub fn double_layer_direct(
    curve: &BoundaryCurve,
    coeff: &Coefficient,
    family: ParametrixFamily,
    tau: &BoundaryDensity,
) -> Result<BoundaryDensity> {
    check_len(curve, tau.len())?;
    Ok(apply(&BoundaryOperators::new(curve, coeff, family).double, tau))
}

/// `𝒲'ρ` at the boundary nodes.
pub fn wprime_direct(
    curve: &BoundaryCurve,
    coeff: &Coefficient,
    family: ParametrixFamily,
    rho: &BoundaryDensity,
) -> Result<BoundaryDensity> {
    check_len(curve, rho.len())?;
    Ok(apply(&BoundaryOperators::new(curve, coeff, family).adjoint, rho))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DomainSpec;
    use crate::Vec2;

    fn circle(n: usize) -> BoundaryCurve {
        BoundaryCurve::new(&DomainSpec::disk(Vec2::zeros(), 0.4).unwrap(), n).unwrap()
    }

    fn one() -> Coefficient {
        Coefficient::constant(1.0).unwrap()
    }

    #[test]
    fn single_layer_of_constants_on_circle() {
        let c = circle(64);
        let ones = BoundaryDensity::new(vec![1.0; 64]);
        let v = single_layer_direct(&c, &one(), ParametrixFamily::AtX, &ones).unwrap();
        let expected = -0.4 * 0.4f64.ln();
        assert!((expected - 0.366516).abs() < 1e-6);
        assert!(v.values.iter().all(|x| (x - expected).abs() < 1e-13));
        let two = Coefficient::constant(2.0).unwrap();
        let v = single_layer_direct(&c, &two, ParametrixFamily::AtX, &ones).unwrap();
        assert!(v.values.iter().all(|x| (x - 0.5 * expected).abs() < 1e-13));
        assert!((0.5 * expected - 0.183258).abs() < 1e-6);
    }

    #[test]
    fn single_layer_eigenvalue_on_circle() {
        let c = circle(64);
        let rho = BoundaryDensity::from_param(&c, f64::cos);
        let v = single_layer_direct(&c, &one(), ParametrixFamily::AtX, &rho).unwrap();
        for (vi, &t) in v.values.iter().zip(&c.params) {
            assert!((vi - 0.2 * t.cos()).abs() < 1e-13);
        }
    }

    #[test]
    fn double_layer_gauss_and_cosine() {
        let c = circle(128);
        let ones = BoundaryDensity::new(vec![1.0; 128]);
        let w = double_layer_direct(&c, &one(), ParametrixFamily::AtX, &ones).unwrap();
        assert!(w.values.iter().all(|x| (x + 0.5).abs() < 1e-10));
        let cos = BoundaryDensity::from_param(&c, f64::cos);
        let w = double_layer_direct(&c, &one(), ParametrixFamily::AtX, &cos).unwrap();
        assert!(w.values.iter().all(|x| x.abs() < 1e-10));
    }

    #[test]
    fn gauss_identity_on_star() {
        let spec = DomainSpec::star(Vec2::new(0.02, -0.01), vec![0.3, 0.0, 0.02, 0.03]).unwrap();
        let c = BoundaryCurve::new(&spec, 128).unwrap();
        let ones = BoundaryDensity::new(vec![1.0; 128]);
        let w = double_layer_direct(&c, &one(), ParametrixFamily::AtX, &ones).unwrap();
        assert!(w.values.iter().all(|x| (x + 0.5).abs() < 1e-10), "{:?}", &w.values[..4]);
    }

    #[test]
    fn adjoint_double_layer_on_circle() {
        let c = circle(64);
        let ones = BoundaryDensity::new(vec![1.0; 64]);
        let w = wprime_direct(&c, &one(), ParametrixFamily::AtX, &ones).unwrap();
        assert!(w.values.iter().all(|x| (x + 0.5).abs() < 1e-12));
        // constant a cancels
        let three = Coefficient::constant(3.0).unwrap();
        let cos = BoundaryDensity::from_param(&c, |t| (2.0 * t).sin() + 0.3);
        let a = wprime_direct(&c, &three, ParametrixFamily::AtX, &cos).unwrap();
        let b = wprime_direct(&c, &one(), ParametrixFamily::AtX, &cos).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).abs() < 1e-14);
        }
        // circle: the adjoint double-layer kernel is constant 1/(4πr), so a
        // mean-free density maps to zero
        let rho = BoundaryDensity::from_param(&c, f64::cos);
        let w = wprime_direct(&c, &one(), ParametrixFamily::AtX, &rho).unwrap();
        assert!(w.values.iter().all(|x| x.abs() < 1e-10));
    }

    #[test]
    fn exponential_double_layer_relation() {
        let c = circle(64);
        let coeff = Coefficient::exponential(Vec2::new(1.0, 1.0)).unwrap();
        let ones = BoundaryDensity::new(vec![1.0; 64]);
        let w = double_layer_direct(&c, &coeff, ParametrixFamily::AtX, &ones).unwrap();
        let dn = BoundaryDensity::new(
            c.points
                .iter()
                .zip(&c.normals)
                .map(|(&x, &n)| coeff.normal_log_derivative(x, n))
                .collect(),
        );
        let one = one();
        let w0 = double_layer_direct(&c, &one, ParametrixFamily::AtX, &ones).unwrap();
        let v = single_layer_direct(&c, &one, ParametrixFamily::AtX, &dn).unwrap();
        for i in 0..64 {
            assert!((w.values[i] - (w0.values[i] - v.values[i])).abs() < 1e-10);
        }
    }

    #[test]
    fn node_mismatch() {
        let c = circle(16);
        let rho = BoundaryDensity::new(vec![1.0; 8]);
        assert!(single_layer_direct(&c, &one(), ParametrixFamily::AtX, &rho).is_err());
        assert!(double_layer_direct(&c, &one(), ParametrixFamily::AtY, &rho).is_err());
        assert!(wprime_direct(&c, &one(), ParametrixFamily::AtX, &rho).is_err());
    }
}
