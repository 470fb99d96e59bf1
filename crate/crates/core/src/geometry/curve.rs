use std::f64::consts::PI;

use super::{CurvePoint, DomainSpec};
use crate::error::{BdiesError, Result};
use crate::Vec2;

/// The boundary sampled at `n` equispaced parameters `t_j = 2πj/n`.
#[derive(Debug, Clone)]
pub struct BoundaryCurve {
    spec: DomainSpec,
    n: usize,
    pub params: Vec<f64>,
    pub points: Vec<Vec2>,
    pub tangents: Vec<Vec2>,
    pub speeds: Vec<f64>,
    /// Outward unit normals.
    pub normals: Vec<Vec2>,
    /// Signed curvature, positive where the domain is locally convex.
    pub curvature: Vec<f64>,
}

impl BoundaryCurve {
    pub fn new(spec: &DomainSpec, n: usize) -> Result<Self> {
        if n < 8 || n % 2 != 0 {
            return Err(BdiesError::InvalidResolution(format!(
                "boundary node count must be even and at least 8, got {n}"
            )));
        }
        let mut curve = Self {
            spec: spec.clone(),
            n,
            params: Vec::with_capacity(n),
            points: Vec::with_capacity(n),
            tangents: Vec::with_capacity(n),
            speeds: Vec::with_capacity(n),
            normals: Vec::with_capacity(n),
            curvature: Vec::with_capacity(n),
        };
        for j in 0..n {
            let t = 2.0 * PI * j as f64 / n as f64;
            let CurvePoint { x, dx, ddx } = spec.boundary_point(t);
            let speed = dx.norm();
            if !(speed > 0.0) {
                return Err(BdiesError::Geometry(format!("zero speed at t = {t}")));
            }
            curve.params.push(t);
            curve.points.push(x);
            curve.tangents.push(dx);
            curve.speeds.push(speed);
            curve.normals.push(Vec2::new(dx.y, -dx.x) / speed);
            curve.curvature.push((dx.x * ddx.y - dx.y * ddx.x) / speed.powi(3));
        }
        Ok(curve)
    }

    pub fn spec(&self) -> &DomainSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Trapezoid weight `|x'(t_j)| 2π/n` of node `j`.
    pub fn weight(&self, j: usize) -> f64 {
        self.speeds[j] * 2.0 * PI / self.n as f64
    }

    pub fn weights(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.weight(j)).collect()
    }

    pub fn length(&self) -> f64 {
        (0..self.n).map(|j| self.weight(j)).sum()
    }

    /// Largest arc-length spacing between neighbouring nodes.
    pub fn spacing(&self) -> f64 {
        self.speeds.iter().fold(0.0, |m: f64, &s| m.max(s)) * 2.0 * PI / self.n as f64
    }

    /// The parameterization at an arbitrary parameter.
    pub fn eval(&self, t: f64) -> CurvePoint {
        self.spec.boundary_point(t)
    }

    /// Periodicity check on the map: `x(0) = x(2π)` and one-sided finite
    /// differences of `x` and `x'` agree across the seam. Returns the
    /// largest mismatch.
    pub fn closure_defect(&self) -> f64 {
        let h = 1e-6;
        let a = self.eval(0.0);
        let b = self.eval(2.0 * PI);
        let left = (self.eval(2.0 * PI).x - self.eval(2.0 * PI - h).x) / h;
        let right = (self.eval(h).x - self.eval(0.0).x) / h;
        let left2 = (self.eval(2.0 * PI).dx - self.eval(2.0 * PI - h).dx) / h;
        let right2 = (self.eval(h).dx - self.eval(0.0).dx) / h;
        // one-sided differences carry O(h) bias of opposite sign; compare
        // against the analytic derivative scale
        let scale = a.dx.norm().max(a.ddx.norm()).max(1.0);
        [
            (a.x - b.x).norm(),
            (left - right).norm() / scale * h,
            (left2 - right2).norm() / scale * h,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    /// Number of nodes whose normal fails the outward ray test: `x_j + ε n_j`
    /// outside and `x_j - ε n_j` inside.
    pub fn inward_normal_count(&self, eps: f64) -> usize {
        self.points
            .iter()
            .zip(&self.normals)
            .filter(|(x, n)| self.spec.contains(**x + eps * **n) || !self.spec.contains(**x - eps * **n))
            .count()
    }
}
