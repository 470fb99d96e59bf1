//! The variable coefficient `a(x) > 0` and the derived fields the parametrix
//! kernels need: `∇a`, `∇ ln a` and `Δ ln a`.

use std::fmt;
use std::sync::Arc;

use crate::error::{BdiesError, Result};
use crate::Vec2;

/// User-supplied coefficient. `grad_ln_a` defaults to `∇a / a`.
pub trait CoefficientFn: Send + Sync {
    fn a(&self, x: Vec2) -> f64;
    fn grad_a(&self, x: Vec2) -> Vec2;
    fn laplacian_ln_a(&self, x: Vec2) -> f64;
    fn grad_ln_a(&self, x: Vec2) -> Vec2 {
        self.grad_a(x) / self.a(x)
    }
    /// `Δa`, when known in closed form.
    fn laplacian_a(&self, _x: Vec2) -> Option<f64> {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoefficientPreset {
    /// `a ≡ c`
    Constant(f64),
    /// `a = exp(d · x)`
    Exponential(Vec2),
    /// `a = 1 + x₁²`
    Quadratic,
}

#[derive(Clone)]
enum Kind {
    Preset(CoefficientPreset),
    Custom(Arc<dyn CoefficientFn>),
}

#[derive(Clone)]
pub struct Coefficient {
    name: String,
    kind: Kind,
}

impl fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Coefficient").field("name", &self.name).finish()
    }
}

impl Coefficient {
    pub fn preset(preset: CoefficientPreset) -> Result<Self> {
        let name = match preset {
            CoefficientPreset::Constant(c) => {
                if !(c > 0.0 && c.is_finite()) {
                    return Err(BdiesError::NonPositiveCoefficient {
                        x: f64::NAN,
                        y: f64::NAN,
                        value: c,
                    });
                }
                format!("constant({c})")
            }
            CoefficientPreset::Exponential(d) => {
                if !(d.x.is_finite() && d.y.is_finite()) {
                    return Err(BdiesError::InvalidDomain("exponential direction must be finite".into()));
                }
                format!("exponential({}, {})", d.x, d.y)
            }
            CoefficientPreset::Quadratic => "quadratic".to_string(),
        };
        Ok(Self {
            name,
            kind: Kind::Preset(preset),
        })
    }

    pub fn constant(c: f64) -> Result<Self> {
        Self::preset(CoefficientPreset::Constant(c))
    }

    pub fn exponential(d: Vec2) -> Result<Self> {
        Self::preset(CoefficientPreset::Exponential(d))
    }

    pub fn quadratic() -> Self {
        Self {
            name: "quadratic".into(),
            kind: Kind::Preset(CoefficientPreset::Quadratic),
        }
    }

    pub fn custom(name: impl Into<String>, f: Arc<dyn CoefficientFn>) -> Self {
        Self {
            name: name.into(),
            kind: Kind::Custom(f),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn as_preset(&self) -> Option<CoefficientPreset> {
        match &self.kind {
            Kind::Preset(p) => Some(*p),
            Kind::Custom(_) => None,
        }
    }

    /// True when every derivative of `a` vanishes identically.
    pub fn is_constant(&self) -> bool {
        matches!(self.kind, Kind::Preset(CoefficientPreset::Constant(_)))
    }

    pub fn a(&self, x: Vec2) -> f64 {
        match &self.kind {
            Kind::Preset(CoefficientPreset::Constant(c)) => *c,
            Kind::Preset(CoefficientPreset::Exponential(d)) => d.dot(&x).exp(),
            Kind::Preset(CoefficientPreset::Quadratic) => 1.0 + x.x * x.x,
            Kind::Custom(f) => f.a(x),
        }
    }

    pub fn grad_a(&self, x: Vec2) -> Vec2 {
        match &self.kind {
            Kind::Preset(CoefficientPreset::Constant(_)) => Vec2::zeros(),
            Kind::Preset(CoefficientPreset::Exponential(d)) => d * d.dot(&x).exp(),
            Kind::Preset(CoefficientPreset::Quadratic) => Vec2::new(2.0 * x.x, 0.0),
            Kind::Custom(f) => f.grad_a(x),
        }
    }

    pub fn grad_ln_a(&self, x: Vec2) -> Vec2 {
        match &self.kind {
            Kind::Preset(CoefficientPreset::Constant(_)) => Vec2::zeros(),
            Kind::Preset(CoefficientPreset::Exponential(d)) => *d,
            Kind::Preset(CoefficientPreset::Quadratic) => Vec2::new(2.0 * x.x / (1.0 + x.x * x.x), 0.0),
            Kind::Custom(f) => f.grad_ln_a(x),
        }
    }

    pub fn laplacian_ln_a(&self, x: Vec2) -> f64 {
        match &self.kind {
            Kind::Preset(CoefficientPreset::Constant(_) | CoefficientPreset::Exponential(_)) => 0.0,
            Kind::Preset(CoefficientPreset::Quadratic) => {
                let q = 1.0 + x.x * x.x;
                2.0 * (1.0 - x.x * x.x) / (q * q)
            }
            Kind::Custom(f) => f.laplacian_ln_a(x),
        }
    }

    pub fn laplacian_a(&self, x: Vec2) -> Option<f64> {
        match &self.kind {
            Kind::Preset(CoefficientPreset::Constant(_)) => Some(0.0),
            Kind::Preset(CoefficientPreset::Exponential(d)) => Some(d.norm_squared() * d.dot(&x).exp()),
            Kind::Preset(CoefficientPreset::Quadratic) => Some(2.0),
            Kind::Custom(f) => f.laplacian_a(x),
        }
    }

    /// `∂ ln a / ∂n` for a unit normal `n`.
    pub fn normal_log_derivative(&self, x: Vec2, n: Vec2) -> f64 {
        self.grad_ln_a(x).dot(&n)
    }

    /// Compares the analytic derivatives against finite differences at the
    /// sample points.
    pub fn validate_derivatives(&self, samples: &[Vec2]) -> Result<DerivativeReport> {
        const GRAD_STEP: f64 = 1e-5;
        // fourth-order stencil; the second difference of ln a at 1e-5 would
        // sit at the round-off floor of the tolerance
        const LAP_STEP: f64 = 1e-3;
        let mut report = DerivativeReport {
            samples: samples.len(),
            min_a: f64::INFINITY,
            grad_a: 0.0,
            grad_ln_a: 0.0,
            laplacian_ln_a: 0.0,
            log_identity: 0.0,
        };
        let rel = |analytic: f64, approx: f64| (analytic - approx).abs() / analytic.abs().max(1.0);
        for &x in samples {
            let a = self.a(x);
            if !(a > 0.0) {
                return Err(BdiesError::NonPositiveCoefficient {
                    x: x.x,
                    y: x.y,
                    value: a,
                });
            }
            report.min_a = report.min_a.min(a);
            let ga = self.grad_a(x);
            let gl = self.grad_ln_a(x);
            let ln = |p: Vec2| self.a(p).ln();
            let mut lap = 0.0;
            for (i, e) in [Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)].into_iter().enumerate() {
                let h = GRAD_STEP * e;
                let fd = (self.a(x + h) - self.a(x - h)) / (2.0 * GRAD_STEP);
                report.grad_a = report.grad_a.max(rel(ga[i], fd));
                report.grad_ln_a = report.grad_ln_a.max(rel(gl[i], ga[i] / a));
                let h = LAP_STEP * e;
                let near = ln(x + h) + ln(x - h);
                let far = ln(x + 2.0 * h) + ln(x - 2.0 * h);
                lap += ((16.0 * near - far) - 30.0 * ln(x)) / (12.0 * LAP_STEP * LAP_STEP);
            }
            let lla = self.laplacian_ln_a(x);
            report.laplacian_ln_a = report.laplacian_ln_a.max(rel(lla, lap));
            if let Some(la) = self.laplacian_a(x) {
                let via_a = (la * a - ga.norm_squared()) / (a * a);
                report.log_identity = report.log_identity.max(rel(lla, via_a));
            }
        }
        let tol = DerivativeReport::TOLERANCE;
        for (what, dev) in [("grad a", report.grad_a), ("laplacian ln a", report.laplacian_ln_a)] {
            if !(dev <= tol) {
                return Err(BdiesError::DerivativeCheck {
                    what: what.into(),
                    deviation: dev,
                    tolerance: tol,
                });
            }
        }
        for (what, dev) in [
            ("grad ln a", report.grad_ln_a),
            ("laplacian identity", report.log_identity),
        ] {
            if !(dev <= 1e-10) {
                return Err(BdiesError::DerivativeCheck {
                    what: what.into(),
                    deviation: dev,
                    tolerance: 1e-10,
                });
            }
        }
        Ok(report)
    }
}

/// Largest relative deviations found by [`Coefficient::validate_derivatives`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeReport {
    pub samples: usize,
    pub min_a: f64,
    pub grad_a: f64,
    pub grad_ln_a: f64,
    pub laplacian_ln_a: f64,
    /// `Δ ln a` against `(a Δa - |∇a|²)/a²` where `Δa` is known.
    pub log_identity: f64,
}

impl DerivativeReport {
    pub const TOLERANCE: f64 = 1e-6;

    pub fn max_deviation(&self) -> f64 {
        self.grad_a.max(self.grad_ln_a).max(self.laplacian_ln_a)
    }
}
