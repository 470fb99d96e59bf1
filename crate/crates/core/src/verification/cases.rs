use std::fmt;
use std::sync::Arc;

use crate::coefficient::Coefficient;
use crate::error::{BdiesError, Result};
use crate::geometry::BoundaryCurve;
use crate::potentials::{conormal_derivative, BoundaryDensity};
use crate::solver::Source;
use crate::Vec2;

/// An exact pair `(a, u)` with `f = ∇·(a∇u)` in closed form.
#[derive(Clone)]
pub struct ManufacturedCase {
    pub name: &'static str,
    pub coeff: Coefficient,
    u: fn(Vec2) -> f64,
    grad_u: fn(Vec2) -> Vec2,
    source: fn(Vec2) -> f64,
}

impl fmt::Debug for ManufacturedCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ManufacturedCase")
            .field("name", &self.name)
            .field("coeff", &self.coeff.name())
            .finish()
    }
}

impl ManufacturedCase {
    pub const NAMES: [&'static str; 4] = ["const_one", "harmonic_linear", "exp_saddle", "quad_coeff"];

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "const_one" => Ok(Self::const_one()),
            "harmonic_linear" => Ok(Self::harmonic_linear()),
            "exp_saddle" => Ok(Self::exp_saddle()),
            "quad_coeff" => Ok(Self::quad_coeff()),
            other => Err(BdiesError::UnknownCase(other.into())),
        }
    }

    /// `a = 1`, `u = 1`, `f = 0`.
    pub fn const_one() -> Self {
        Self {
            name: "const_one",
            coeff: Coefficient::constant(1.0).expect("positive constant"),
            u: |_| 1.0,
            grad_u: |_| Vec2::zeros(),
            source: |_| 0.0,
        }
    }

    /// `a = 1`, `u = x₁`, `f = 0`.
    pub fn harmonic_linear() -> Self {
        Self {
            name: "harmonic_linear",
            coeff: Coefficient::constant(1.0).expect("positive constant"),
            u: |x| x.x,
            grad_u: |_| Vec2::new(1.0, 0.0),
            source: |_| 0.0,
        }
    }

    /// `a = e^{x₁+x₂}`, `u = x₁² - x₂²`, `f = 2e^{x₁+x₂}(x₁ - x₂)`.
    pub fn exp_saddle() -> Self {
        Self {
            name: "exp_saddle",
            coeff: Coefficient::exponential(Vec2::new(1.0, 1.0)).expect("finite direction"),
            u: |x| x.x * x.x - x.y * x.y,
            grad_u: |x| Vec2::new(2.0 * x.x, -2.0 * x.y),
            source: |x| 2.0 * (x.x + x.y).exp() * (x.x - x.y),
        }
    }

    /// `a = 1 + x₁²`, `u = x₂ + x₁x₂`, `f = 2x₁x₂`.
    pub fn quad_coeff() -> Self {
        Self {
            name: "quad_coeff",
            coeff: Coefficient::quadratic(),
            u: |x| x.y + x.x * x.y,
            grad_u: |x| Vec2::new(x.y, 1.0 + x.x),
            source: |x| 2.0 * x.x * x.y,
        }
    }

    /// Same solution and source with a different coefficient object, used to
    /// run a case through a custom coefficient bundle.
    pub fn with_coefficient(mut self, coeff: Coefficient) -> Self {
        self.coeff = coeff;
        self
    }

    pub fn u(&self, x: Vec2) -> f64 {
        (self.u)(x)
    }

    pub fn grad_u(&self, x: Vec2) -> Vec2 {
        (self.grad_u)(x)
    }

    pub fn f(&self, x: Vec2) -> f64 {
        (self.source)(x)
    }

    pub fn source(&self) -> Source {
        Arc::new(self.source)
    }

    pub fn u_field(&self) -> impl Fn(Vec2) -> f64 + Send + Sync + 'static {
        self.u
    }

    /// Dirichlet data `φ₀ = u` at the boundary nodes.
    pub fn phi0(&self, curve: &BoundaryCurve) -> BoundaryDensity {
        BoundaryDensity::from_fn(curve, self.u)
    }

    /// `ψ = a ∂u/∂n` at the boundary nodes.
    pub fn psi_exact(&self, curve: &BoundaryCurve) -> BoundaryDensity {
        BoundaryDensity::new(
            curve
                .points
                .iter()
                .zip(&curve.normals)
                .map(|(&x, &n)| conormal_derivative(self.coeff.a(x), self.grad_u(x), n))
                .collect(),
        )
    }

    /// Largest relative gap between the stored `f` and a central difference
    /// of the flux `a∇u`.
    pub fn source_check(&self, samples: &[Vec2]) -> f64 {
        const STEP: f64 = 1e-5;
        samples
            .iter()
            .map(|&x| {
                let mut div = 0.0;
                for i in 0..2 {
                    let mut e = Vec2::zeros();
                    e[i] = STEP;
                    let flux = |p: Vec2| self.coeff.a(p) * self.grad_u(p)[i];
                    div += (flux(x + e) - flux(x - e)) / (2.0 * STEP);
                }
                (div - self.f(x)).abs() / self.f(x).abs().max(1.0)
            })
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DomainSpec;

    fn samples() -> Vec<Vec2> {
        (0..40)
            .map(|k| {
                let t = k as f64 * 2.399_963;
                let r = 0.38 * ((k as f64 + 0.5) / 40.0).sqrt();
                Vec2::new(r * t.cos(), r * t.sin())
            })
            .collect()
    }

    #[test]
    fn sources_match_finite_differences() {
        for name in ManufacturedCase::NAMES {
            let case = ManufacturedCase::by_name(name).unwrap();
            assert!(case.source_check(&samples()) < 1e-6, "{name}");
        }
        assert!(ManufacturedCase::by_name("nope").is_err());
    }

    #[test]
    fn closed_form_values() {
        let c = ManufacturedCase::exp_saddle();
        let x = Vec2::new(0.3, -0.1);
        // a(Δu + ∇ln a·∇u)
        let expected = c.coeff.a(x) * (0.0 + Vec2::new(1.0, 1.0).dot(&c.grad_u(x)));
        assert!((c.f(x) - expected).abs() < 1e-15);
        let q = ManufacturedCase::quad_coeff();
        assert!((q.f(Vec2::new(0.2, 0.3)) - 0.12).abs() < 1e-15);
        let curve = BoundaryCurve::new(&DomainSpec::disk(Vec2::zeros(), 0.4).unwrap(), 16).unwrap();
        assert_eq!(ManufacturedCase::const_one().psi_exact(&curve).max_abs(), 0.0);
        let psi = c.psi_exact(&curve);
        assert!((psi.values[0] - 0.8 * 0.4f64.exp()).abs() < 1e-14);
    }
}
