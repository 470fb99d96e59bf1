use std::f64::consts::PI;

use super::DomainSpec;
use crate::error::{BdiesError, Result};
use crate::quadrature::{Barycentric, GaussRule, TrigInterpolator};
use crate::Vec2;

/// Tensor grid `z(t_j, s_k) = c + s_k ρ(t_j)(cos t_j, sin t_j)` with
/// equispaced angles and Gauss-Legendre radial fractions in `(0, 1)`.
///
/// Node `(j, k)` is stored at index `j * n_s + k`. Fields on the grid are
/// interpolated trigonometrically in `t` and polynomially in `s`.
#[derive(Debug, Clone)]
pub struct DomainGrid {
    spec: DomainSpec,
    n_t: usize,
    n_s: usize,
    pub s_nodes: Vec<f64>,
    pub nodes: Vec<Vec2>,
    pub weights: Vec<f64>,
    trig: TrigInterpolator,
    bary: Barycentric,
}

impl DomainGrid {
    pub fn new(spec: &DomainSpec, n_t: usize, n_s: usize) -> Result<Self> {
        if n_t < 8 || n_t % 2 != 0 {
            return Err(BdiesError::InvalidResolution(format!(
                "n_t must be even and at least 8, got {n_t}"
            )));
        }
        if n_s < 4 {
            return Err(BdiesError::InvalidResolution(format!(
                "n_s must be at least 4, got {n_s}"
            )));
        }
        let radial = GaussRule::legendre(n_s);
        let (s_nodes, s_weights): (Vec<f64>, Vec<f64>) = radial.mapped(0.0, 1.0).unzip();
        let c = spec.center();
        let dt = 2.0 * PI / n_t as f64;
        let mut nodes = Vec::with_capacity(n_t * n_s);
        let mut weights = Vec::with_capacity(n_t * n_s);
        for j in 0..n_t {
            let t = dt * j as f64;
            let rho = spec.radial(t).0;
            let dir = Vec2::new(t.cos(), t.sin());
            for (&s, &w) in s_nodes.iter().zip(&s_weights) {
                let z = c + s * rho * dir;
                if !spec.contains(z) {
                    return Err(BdiesError::Geometry(format!(
                        "grid node ({:.6}, {:.6}) lies outside the domain",
                        z.x, z.y
                    )));
                }
                nodes.push(z);
                // polar Jacobian s ρ² of the map (s, t) -> z
                weights.push(dt * w * s * rho * rho);
            }
        }
        Ok(Self {
            spec: spec.clone(),
            n_t,
            n_s,
            bary: Barycentric::new(&s_nodes),
            s_nodes,
            nodes,
            weights,
            trig: TrigInterpolator::new(n_t),
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    pub fn n_s(&self) -> usize {
        self.n_s
    }

    pub fn index(&self, j: usize, k: usize) -> usize {
        j * self.n_s + k
    }

    /// Grid coordinates `(t, s)` of a point.
    pub fn coords(&self, x: Vec2) -> (f64, f64) {
        let d = x - self.spec.center();
        let r = d.norm();
        if r == 0.0 {
            return (0.0, 0.0);
        }
        let t = d.y.atan2(d.x).rem_euclid(2.0 * PI);
        (t, r / self.spec.radial(t).0)
    }

    /// Separable interpolation weights at `x`: angular (`n_t`) and radial (`n_s`).
    pub fn weights_into(&self, x: Vec2, angular: &mut [f64], radial: &mut [f64]) {
        let (t, s) = self.coords(x);
        self.trig.weights_into(t, angular);
        self.bary.weights_into(s, radial);
    }

    pub fn interpolate(&self, values: &[f64], x: Vec2) -> f64 {
        let mut tw = vec![0.0; self.n_t];
        let mut sw = vec![0.0; self.n_s];
        self.weights_into(x, &mut tw, &mut sw);
        let mut acc = 0.0;
        for (j, &a) in tw.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            let row = &values[j * self.n_s..(j + 1) * self.n_s];
            acc += a * row.iter().zip(&sw).map(|(v, b)| v * b).sum::<f64>();
        }
        acc
    }

    pub fn integrate(&self, values: &[f64]) -> f64 {
        values.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }

    /// Nodal values of a function.
    pub fn sample(&self, f: impl Fn(Vec2) -> f64) -> Vec<f64> {
        self.nodes.iter().map(|&x| f(x)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disk_weights_sum_to_area() {
        let spec = DomainSpec::disk(Vec2::zeros(), 0.4).unwrap();
        let g = DomainGrid::new(&spec, 32, 16).unwrap();
        let total: f64 = g.weights.iter().sum();
        assert!((total - PI * 0.16).abs() < 1e-10 * PI * 0.16);
        assert!(g.weights.iter().all(|&w| w > 0.0));
    }

    #[test]
    fn interpolates_linear_function_off_grid() {
        let spec = DomainSpec::disk(Vec2::new(0.1, 0.0), 0.4).unwrap();
        let g = DomainGrid::new(&spec, 32, 16).unwrap();
        let v = g.sample(|x| x.x);
        for p in [Vec2::new(0.23, 0.17), Vec2::new(-0.2, -0.05), Vec2::new(0.1, 0.0)] {
            assert!((g.interpolate(&v, p) - p.x).abs() < 1e-10);
        }
        // nodal values come back exactly
        for (i, x) in g.nodes.iter().enumerate().step_by(7) {
            assert!((g.interpolate(&v, *x) - v[i]).abs() < 1e-13);
        }
    }

    #[test]
    fn star_grid_nodes_inside() {
        let spec = DomainSpec::star(Vec2::zeros(), vec![0.3, 0.0, 0.0, 0.06]).unwrap();
        let g = DomainGrid::new(&spec, 32, 12).unwrap();
        // winding-number oracle on the boundary polygon
        let m = 2048;
        let pts: Vec<Vec2> = (0..m)
            .map(|i| spec.boundary_point(2.0 * PI * i as f64 / m as f64).x)
            .collect();
        for z in &g.nodes {
            let mut w = 0.0;
            for i in 0..m {
                let a = pts[i] - z;
                let b = pts[(i + 1) % m] - z;
                w += (a.x * b.y - a.y * b.x).atan2(a.dot(&b));
            }
            assert!((w / (2.0 * PI) - 1.0).abs() < 1e-9);
        }
        let total: f64 = g.weights.iter().sum();
        assert!((total - spec.area()).abs() < 1e-12);
    }
}
