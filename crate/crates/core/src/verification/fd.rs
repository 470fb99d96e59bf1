//! Second-order finite differences on a polar grid over a disk.
//!
//! Unknowns sit at `r_i = (i - 1/2) Δr`, `i = 1..=N_r`, with
//! `Δr = R / (N_r + 1/2)`, so the centre is never a node and the Dirichlet
//! ring `r = R` is the virtual node `i = N_r + 1`. The flux form
//!
//! ```text
//! (1/r) ∂_r(r a ∂_r u) + (1/r²) ∂_θ(a ∂_θ u) = f
//! ```
//!
//! multiplied by `-r` gives a symmetric positive definite system, solved by
//! sparse Cholesky.

use std::f64::consts::PI;

use nalgebra::DVector;
use nalgebra_sparse::factorization::CscCholesky;
use nalgebra_sparse::{CooMatrix, CscMatrix};

use super::ManufacturedCase;
use crate::error::{BdiesError, Result};
use crate::geometry::DomainSpec;
use crate::Vec2;

#[derive(Debug, Clone)]
pub struct FdSolution {
    pub center: Vec2,
    pub radii: Vec<f64>,
    pub angles: Vec<f64>,
    /// Value at `(radii[i], angles[k])`, stored at `i * n_theta + k`.
    pub values: Vec<f64>,
}

impl FdSolution {
    pub fn point(&self, i: usize, k: usize) -> Vec2 {
        let (r, t) = (self.radii[i], self.angles[k]);
        self.center + r * Vec2::new(t.cos(), t.sin())
    }

    pub fn points(&self) -> impl Iterator<Item = (Vec2, f64)> + '_ {
        let n_theta = self.angles.len();
        self.values
            .iter()
            .enumerate()
            .map(move |(idx, &v)| (self.point(idx / n_theta, idx % n_theta), v))
    }

    /// `max |u_fd - g|` over the nodes.
    pub fn max_deviation(&self, g: impl Fn(Vec2) -> f64) -> f64 {
        self.points().fold(0.0, |m, (x, v)| m.max((v - g(x)).abs()))
    }
}

pub fn fd_oracle(case: &ManufacturedCase, spec: &DomainSpec, n_r: usize, n_theta: usize) -> Result<FdSolution> {
    let DomainSpec::Disk { center, radius } = *spec else {
        return Err(BdiesError::NotADisk);
    };
    if n_r < 2 || n_theta < 4 {
        return Err(BdiesError::InvalidResolution(format!(
            "finite-difference grid needs n_r >= 2 and n_theta >= 4, got {n_r} x {n_theta}"
        )));
    }
    let dr = radius / (n_r as f64 + 0.5);
    let dt = 2.0 * PI / n_theta as f64;
    let radii: Vec<f64> = (0..n_r).map(|i| (i as f64 + 0.5) * dr).collect();
    let angles: Vec<f64> = (0..n_theta).map(|k| k as f64 * dt).collect();
    let at = |r: f64, t: f64| center + r * Vec2::new(t.cos(), t.sin());
    let a = |r: f64, t: f64| case.coeff.a(at(r, t));
    let idx = |i: usize, k: usize| i * n_theta + (k % n_theta);

    let n = n_r * n_theta;
    let mut coo = CooMatrix::new(n, n);
    let mut b = DVector::zeros(n);
    for i in 0..n_r {
        let r = radii[i];
        let r_out = r + 0.5 * dr;
        let r_in = r - 0.5 * dr;
        for k in 0..n_theta {
            let t = angles[k];
            let row = idx(i, k);
            let c_out = r_out * a(r_out, t) / (dr * dr);
            let c_in = if i == 0 { 0.0 } else { r_in * a(r_in, t) / (dr * dr) };
            let c_next = a(r, t + 0.5 * dt) / (r * dt * dt);
            let c_prev = a(r, t - 0.5 * dt) / (r * dt * dt);
            coo.push(row, row, c_out + c_in + c_next + c_prev);
            if i + 1 < n_r {
                coo.push(row, idx(i + 1, k), -c_out);
            } else {
                b[row] += c_out * case.u(at(radius, t));
            }
            if i > 0 {
                coo.push(row, idx(i - 1, k), -c_in);
            }
            coo.push(row, idx(i, k + 1), -c_next);
            coo.push(row, idx(i, k + n_theta - 1), -c_prev);
            b[row] -= r * case.f(at(r, t));
        }
    }
    let csc = CscMatrix::from(&coo);
    let chol = CscCholesky::factor(&csc).map_err(|_| BdiesError::SingularMatrix)?;
    let x = chol.solve(&b);
    Ok(FdSolution {
        center,
        radii,
        angles,
        values: x.column(0).iter().copied().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disk() -> DomainSpec {
        DomainSpec::disk(Vec2::zeros(), 0.4).unwrap()
    }

    #[test]
    fn constant_solution_is_reproduced() {
        let s = fd_oracle(&ManufacturedCase::const_one(), &disk(), 16, 16).unwrap();
        assert!(s.max_deviation(|_| 1.0) < 1e-13);
    }

    #[test]
    fn second_order_on_exp_saddle() {
        let case = ManufacturedCase::exp_saddle();
        let e1 = fd_oracle(&case, &disk(), 32, 32).unwrap().max_deviation(|x| case.u(x));
        let e2 = fd_oracle(&case, &disk(), 64, 64).unwrap().max_deviation(|x| case.u(x));
        let order = (e1 / e2).log2();
        assert!(order > 1.8 && order < 2.2, "order {order} ({e1}, {e2})");
    }

    #[test]
    fn rejects_star_domains() {
        let s = DomainSpec::star(Vec2::zeros(), vec![0.3, 0.0, 0.02]).unwrap();
        assert!(matches!(
            fd_oracle(&ManufacturedCase::const_one(), &s, 8, 8),
            Err(BdiesError::NotADisk)
        ));
    }
}
