//! Volume potentials `𝒫ρ(y) = ∫_Ω P(x,y) ρ(x) dx` and
//! `ℛρ(y) = ∫_Ω R(x,y) ρ(x) dx` on target-centred polar rules.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::{ParametrixFamily, ScalarField};
use crate::coefficient::Coefficient;
use crate::error::Result;
use crate::geometry::{BoundaryCurve, Discretization, DomainGrid, DomainSpec, PolarNode, PolarRule, PolarSettings};
use crate::Vec2;

/// Polar nodes folded into one gemm update when building matrix rows.
const CHUNK: usize = 2048;

/// Where a volume operator is evaluated. Boundary targets carry the inward
/// normal that orients their half-plane quadrature window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VolumeTarget {
    Interior(Vec2),
    Boundary { point: Vec2, inward: Vec2 },
}

impl VolumeTarget {
    pub fn point(&self) -> Vec2 {
        match *self {
            Self::Interior(y) => y,
            Self::Boundary { point, .. } => point,
        }
    }

    pub fn boundary_node(curve: &BoundaryCurve, j: usize) -> Self {
        Self::Boundary {
            point: curve.points[j],
            inward: -curve.normals[j],
        }
    }
}

pub struct VolumeOperators<'a> {
    spec: &'a DomainSpec,
    grid: &'a DomainGrid,
    polar: &'a PolarSettings,
    coeff: &'a Coefficient,
    family: ParametrixFamily,
}

impl<'a> VolumeOperators<'a> {
    pub fn new(disc: &'a Discretization, coeff: &'a Coefficient, family: ParametrixFamily) -> Self {
        Self::from_parts(&disc.spec, &disc.grid, &disc.polar, coeff, family)
    }

    pub fn from_parts(
        spec: &'a DomainSpec,
        grid: &'a DomainGrid,
        polar: &'a PolarSettings,
        coeff: &'a Coefficient,
        family: ParametrixFamily,
    ) -> Self {
        Self {
            spec,
            grid,
            polar,
            coeff,
            family,
        }
    }

    pub fn family(&self) -> ParametrixFamily {
        self.family
    }

    pub fn rule(&self, target: VolumeTarget) -> Result<PolarRule> {
        match target {
            VolumeTarget::Interior(y) => self.polar.rule(self.spec, y, None),
            VolumeTarget::Boundary { point, inward } => self.polar.rule(self.spec, point, Some(inward)),
        }
    }

    /// `P(x,y)` at a polar node.
    fn potential_kernel(&self, node: &PolarNode, ay: f64) -> f64 {
        let p = node.r.ln() / (2.0 * PI);
        match self.family {
            ParametrixFamily::AtX => p / self.coeff.a(node.x),
            ParametrixFamily::AtY => p / ay,
        }
    }

    /// `R(x,y)` at a polar node.
    fn remainder_kernel(&self, node: &PolarNode, ay: f64) -> f64 {
        // ∇_x P_Δ(x - y) = dir / (2π r)
        let grad = node.dir / (2.0 * PI * node.r);
        match self.family {
            ParametrixFamily::AtX => {
                let p = node.r.ln() / (2.0 * PI);
                -self.coeff.laplacian_ln_a(node.x) * p - self.coeff.grad_ln_a(node.x).dot(&grad)
            }
            ParametrixFamily::AtY => self.coeff.grad_a(node.x).dot(&grad) / ay,
        }
    }

    /// `𝒫_Δρ(y) = ∫_Ω P_Δ(x - y) ρ(x) dx`.
    pub fn laplace_potential(&self, rho: &dyn ScalarField, target: VolumeTarget) -> Result<f64> {
        let rule = self.rule(target)?;
        Ok(rule.integrate(|n| n.r.ln() / (2.0 * PI) * rho.value(n.x)))
    }

    pub fn potential(&self, rho: &dyn ScalarField, target: VolumeTarget) -> Result<f64> {
        let rule = self.rule(target)?;
        let ay = self.coeff.a(target.point());
        Ok(rule.integrate(|n| self.potential_kernel(n, ay) * rho.value(n.x)))
    }

    pub fn remainder(&self, rho: &dyn ScalarField, target: VolumeTarget) -> Result<f64> {
        if self.coeff.is_constant() {
            return Ok(0.0);
        }
        let rule = self.rule(target)?;
        let ay = self.coeff.a(target.point());
        Ok(rule.integrate(|n| self.remainder_kernel(n, ay) * rho.value(n.x)))
    }

    /// Coefficients `c` over the grid nodes with `𝒫u(y) ≈ c · u` for a grid
    /// field `u` interpolated to the polar nodes.
    pub fn potential_row(&self, target: VolumeTarget) -> Result<Vec<f64>> {
        let ay = self.coeff.a(target.point());
        self.row(target, |n| self.potential_kernel(n, ay))
    }

    /// As [`Self::potential_row`] for `ℛ`.
    pub fn remainder_row(&self, target: VolumeTarget) -> Result<Vec<f64>> {
        if self.coeff.is_constant() {
            return Ok(vec![0.0; self.grid.len()]);
        }
        let ay = self.coeff.a(target.point());
        self.row(target, |n| self.remainder_kernel(n, ay))
    }

    fn row(&self, target: VolumeTarget, kernel: impl Fn(&PolarNode) -> f64) -> Result<Vec<f64>> {
        let rule = self.rule(target)?;
        let (n_t, n_s) = (self.grid.n_t(), self.grid.n_s());
        let mut acc = DMatrix::<f64>::zeros(n_t, n_s);
        for chunk in rule.nodes.chunks(CHUNK) {
            // angular weights as columns, radial weights as rows
            let mut ang = DMatrix::<f64>::zeros(n_t, chunk.len());
            let mut rad = DMatrix::<f64>::zeros(chunk.len(), n_s);
            let mut sw = vec![0.0; n_s];
            for (q, node) in chunk.iter().enumerate() {
                let mut col = ang.column_mut(q);
                let col = col.as_mut_slice();
                self.grid.weights_into(node.x, col, &mut sw);
                let g = node.weight * kernel(node);
                col.iter_mut().for_each(|v| *v *= g);
                for (k, &w) in sw.iter().enumerate() {
                    rad[(q, k)] = w;
                }
            }
            acc.gemm(1.0, &ang, &rad, 1.0);
        }
        let mut out = Vec::with_capacity(n_t * n_s);
        for j in 0..n_t {
            for k in 0..n_s {
                out.push(acc[(j, k)]);
            }
        }
        Ok(out)
    }
}

/// `𝒫ρ` at a set of targets.
pub fn volume_potential_p(
    disc: &Discretization,
    coeff: &Coefficient,
    family: ParametrixFamily,
    rho: &dyn ScalarField,
    targets: &[VolumeTarget],
) -> Result<Vec<f64>> {
    let ops = VolumeOperators::new(disc, coeff, family);
    targets.par_iter().map(|&t| ops.potential(rho, t)).collect()
}

/// `ℛρ` at a set of targets; boundary targets give `γ⁺ℛρ`.
pub fn remainder_potential_r(
    disc: &Discretization,
    coeff: &Coefficient,
    family: ParametrixFamily,
    rho: &dyn ScalarField,
    targets: &[VolumeTarget],
) -> Result<Vec<f64>> {
    let ops = VolumeOperators::new(disc, coeff, family);
    targets.par_iter().map(|&t| ops.remainder(rho, t)).collect()
}
