//! Dense linear-algebra helpers.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{BdiesError, Result};

/// Builds a matrix from independently computed rows. Rows are produced in
/// parallel; each row's own arithmetic is sequential, so the result does not
/// depend on the thread count.
pub fn dense_from_rows<F>(n_rows: usize, n_cols: usize, row: F) -> DMatrix<f64>
where
    F: Fn(usize) -> Vec<f64> + Sync,
{
    let rows: Vec<Vec<f64>> = (0..n_rows).into_par_iter().map(&row).collect();
    let mut m = DMatrix::zeros(n_rows, n_cols);
    for (i, r) in rows.iter().enumerate() {
        debug_assert_eq!(r.len(), n_cols);
        for (j, &v) in r.iter().enumerate() {
            m[(i, j)] = v;
        }
    }
    m
}

/// Fallible variant of [`dense_from_rows`].
pub fn try_dense_from_rows<F>(n_rows: usize, n_cols: usize, row: F) -> Result<DMatrix<f64>>
where
    F: Fn(usize) -> Result<Vec<f64>> + Sync,
{
    let rows: Vec<Vec<f64>> = (0..n_rows).into_par_iter().map(&row).collect::<Result<_>>()?;
    let mut m = DMatrix::zeros(n_rows, n_cols);
    for (i, r) in rows.iter().enumerate() {
        for (j, &v) in r.iter().enumerate() {
            m[(i, j)] = v;
        }
    }
    Ok(m)
}

/// LU factorization with a transposed solve, for condition estimation.
pub struct Factorized {
    lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    norm1: f64,
}

impl Factorized {
    pub fn new(a: DMatrix<f64>) -> Result<Self> {
        if a.iter().any(|v| !v.is_finite()) {
            return Err(BdiesError::NonFinite("system matrix".into()));
        }
        let norm1 = norm1(&a);
        let lu = a.lu();
        if !lu.is_invertible() {
            return Err(BdiesError::SingularMatrix);
        }
        let u = lu.u();
        let umax = u.diagonal().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let umin = u.diagonal().iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
        if umin <= umax * f64::EPSILON * u.nrows() as f64 {
            return Err(BdiesError::SingularMatrix);
        }
        Ok(Self { lu, norm1 })
    }

    pub fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        self.lu.solve(b).expect("factorization checked invertible")
    }

    /// Solves `Aᵀ x = b`.
    pub fn solve_transpose(&self, b: &DVector<f64>) -> DVector<f64> {
        // P A = L U  =>  Aᵀ = Uᵀ Lᵀ P
        let l = self.lu.l();
        let u = self.lu.u();
        let z = u
            .tr_solve_upper_triangular(b)
            .expect("factorization checked invertible");
        let mut w = l.tr_solve_lower_triangular(&z).expect("unit lower triangle");
        self.lu.p().inv_permute_rows(&mut w);
        w
    }

    /// Hager-Higham estimate of `‖A‖₁ ‖A⁻¹‖₁`.
    pub fn condition_estimate(&self) -> f64 {
        let n = self.lu.l().nrows();
        let mut x = DVector::from_element(n, 1.0 / n as f64);
        let mut est = 0.0;
        for _ in 0..5 {
            let y = self.solve(&x);
            let new_est = y.iter().map(|v| v.abs()).sum::<f64>();
            let xi = y.map(|v| if v >= 0.0 { 1.0 } else { -1.0 });
            let z = self.solve_transpose(&xi);
            let (jmax, zmax) = z.iter().enumerate().fold(
                (0, 0.0f64),
                |(jm, m), (j, v)| if v.abs() > m { (j, v.abs()) } else { (jm, m) },
            );
            if new_est <= est || zmax <= z.dot(&x) {
                est = est.max(new_est);
                break;
            }
            est = new_est;
            x = DVector::zeros(n);
            x[jmax] = 1.0;
        }
        est * self.norm1
    }
}

pub fn norm1(a: &DMatrix<f64>) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Smallest and largest singular values.
pub fn singular_value_range(a: &DMatrix<f64>) -> (f64, f64) {
    let sv = a.clone().singular_values();
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = sv.iter().cloned().fold(0.0, f64::max);
    (min, max)
}
