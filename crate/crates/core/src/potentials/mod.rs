//! Laplace and parametrix-based surface and volume operators.
//!
//! Sign conventions follow the layer potentials
//! `Vρ(y) = -∫_S P(x,y) ρ(x) dS(x)` and `Wρ(y) = -∫_S T_x P(x,y) ρ(x) dS(x)`,
//! so the double layer of the unit density is `-1` inside, `-1/2` on and
//! `0` outside the boundary.

mod boundary;
pub mod direct;
mod layer;
mod volume;

use std::f64::consts::PI;
use std::sync::Arc;

pub use boundary::{double_layer_direct, single_layer_direct, wprime_direct, BoundaryOperators, LaplaceBoundary};
pub use layer::{layer_eval_offboundary, LayerEvaluator, LayerKind};
pub use volume::{remainder_potential_r, volume_potential_p, VolumeOperators, VolumeTarget};

use crate::error::{BdiesError, Result};
use crate::geometry::{BoundaryCurve, DomainGrid};
use crate::Vec2;

/// Which variable the coefficient in the parametrix is evaluated at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParametrixFamily {
    /// `P(x,y) = P_Δ(x-y) / a(x)`, remainder `-∇·(∇ln a(x) P_Δ)`.
    AtX,
    /// `P(x,y) = P_Δ(x-y) / a(y)`, remainder `∇a(x)·∇_x P_Δ / a(y)`.
    AtY,
}

impl ParametrixFamily {
    pub fn tag(self) -> &'static str {
        match self {
            Self::AtX => "x",
            Self::AtY => "y",
        }
    }
}

/// Anything that can be evaluated pointwise in the domain.
pub trait ScalarField: Send + Sync {
    fn value(&self, x: Vec2) -> f64;
}

impl<F: Fn(Vec2) -> f64 + Send + Sync> ScalarField for F {
    fn value(&self, x: Vec2) -> f64 {
        self(x)
    }
}

/// Nodal values on a [`DomainGrid`], evaluated elsewhere by interpolation.
#[derive(Debug, Clone)]
pub struct DomainField {
    grid: Arc<DomainGrid>,
    pub values: Vec<f64>,
}

impl DomainField {
    pub fn new(grid: Arc<DomainGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(BdiesError::NodeMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Arc<DomainGrid>, f: impl Fn(Vec2) -> f64) -> Self {
        let values = grid.sample(f);
        Self { grid, values }
    }

    pub fn grid(&self) -> &DomainGrid {
        &self.grid
    }

    pub fn interpolate(&self, x: Vec2) -> f64 {
        self.grid.interpolate(&self.values, x)
    }
}

impl ScalarField for DomainField {
    fn value(&self, x: Vec2) -> f64 {
        self.interpolate(x)
    }
}

/// Nodal values of a density at the boundary nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryDensity {
    pub values: Vec<f64>,
    /// Claims `Σ_j ρ_j |x'(t_j)| 2π/n = 0`.
    pub zero_mean: bool,
}

impl BoundaryDensity {
    pub fn new(values: Vec<f64>) -> Self {
        Self {
            values,
            zero_mean: false,
        }
    }

    pub fn from_fn(curve: &BoundaryCurve, f: impl Fn(Vec2) -> f64) -> Self {
        Self::new(curve.points.iter().map(|&x| f(x)).collect())
    }

    /// Density given as a function of the boundary parameter.
    pub fn from_param(curve: &BoundaryCurve, f: impl Fn(f64) -> f64) -> Self {
        Self::new(curve.params.iter().map(|&t| f(t)).collect())
    }

    /// Removes the weighted mean so that `⟨ρ, 1⟩_S = 0`.
    pub fn zero_mean(curve: &BoundaryCurve, mut values: Vec<f64>) -> Result<Self> {
        check_len(curve, values.len())?;
        let w = curve.weights();
        let mean = values.iter().zip(&w).map(|(v, w)| v * w).sum::<f64>() / curve.length();
        values.iter_mut().for_each(|v| *v -= mean);
        Ok(Self {
            values,
            zero_mean: true,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `⟨ρ, 1⟩_S` by the trapezoid rule.
    pub fn integral(&self, curve: &BoundaryCurve) -> f64 {
        self.values.iter().enumerate().map(|(j, v)| v * curve.weight(j)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m: f64, v| m.max(v.abs()))
    }
}

pub(crate) fn check_len(curve: &BoundaryCurve, found: usize) -> Result<()> {
    if found != curve.len() {
        return Err(BdiesError::NodeMismatch {
            expected: curve.len(),
            found,
        });
    }
    Ok(())
}

/// Value and `x`-gradient of `P_Δ(x - y) = log|x - y| / 2π`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub value: f64,
    pub grad_x: Vec2,
}

pub fn laplace_kernel(x: Vec2, y: Vec2) -> Result<KernelValue> {
    let d = x - y;
    let r2 = d.norm_squared();
    if r2 == 0.0 {
        return Err(BdiesError::CoincidentPoints);
    }
    Ok(KernelValue {
        value: 0.25 * r2.ln() / PI,
        grad_x: d / (2.0 * PI * r2),
    })
}

/// `T⁺u = a(x) ∇u · n⁺`.
pub fn conormal_derivative(a: f64, grad_u: Vec2, normal: Vec2) -> f64 {
    a * grad_u.dot(&normal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficient::Coefficient;

    #[test]
    fn kernel_values() {
        let k = laplace_kernel(Vec2::new(1.0, 0.0), Vec2::zeros()).unwrap();
        assert_eq!(k.value, 0.0);
        let k = laplace_kernel(Vec2::new(0.5, 0.0), Vec2::zeros()).unwrap();
        assert!((k.value + 0.110318).abs() < 1e-6);
        assert!((k.value - 0.5f64.ln() / (2.0 * PI)).abs() < 1e-16);
        assert!((k.grad_x - Vec2::new(std::f64::consts::FRAC_1_PI, 0.0)).norm() < 1e-6);
        assert!(matches!(
            laplace_kernel(Vec2::new(0.2, 0.1), Vec2::new(0.2, 0.1)),
            Err(BdiesError::CoincidentPoints)
        ));
    }

    #[test]
    fn conormal_examples() {
        let n = Vec2::new(1.0, 0.0);
        assert_eq!(conormal_derivative(1.0, Vec2::new(1.0, 0.0), n), 1.0);
        assert_eq!(conormal_derivative(3.7, Vec2::zeros(), n), 0.0);
        // a = exp(x1 + x2), u = x1² - x2² at (0.4, 0)
        let c = Coefficient::exponential(Vec2::new(1.0, 1.0)).unwrap();
        let x = Vec2::new(0.4, 0.0);
        let t = conormal_derivative(c.a(x), Vec2::new(2.0 * x.x, -2.0 * x.y), n);
        assert!((t - 0.8 * 0.4f64.exp()).abs() < 1e-15);
        assert!((t - 1.193460).abs() < 1e-6);
    }

    #[test]
    fn zero_mean_projection() {
        let spec = crate::DomainSpec::star(Vec2::zeros(), vec![0.3, 0.02, 0.0, 0.04]).unwrap();
        let curve = BoundaryCurve::new(&spec, 64).unwrap();
        let rho = BoundaryDensity::zero_mean(&curve, curve.points.iter().map(|p| 1.0 + p.x).collect()).unwrap();
        assert!(rho.zero_mean);
        assert!(rho.integral(&curve).abs() < 1e-15);
        assert!(BoundaryDensity::zero_mean(&curve, vec![0.0; 3]).is_err());
    }
}
