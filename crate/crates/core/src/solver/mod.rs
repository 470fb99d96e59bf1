//! Assembly and solution of the segregated boundary-domain system.

mod solution;

pub use solution::{evaluate_solution, third_green_residual, third_green_residual_boundary, DirichletSolution};

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::coefficient::Coefficient;
use crate::error::{BdiesError, Result};
use crate::geometry::Discretization;
use crate::linalg::{singular_value_range, try_dense_from_rows, Factorized};
use crate::potentials::{
    check_len, BoundaryDensity, BoundaryOperators, LayerEvaluator, LayerKind, ParametrixFamily, ScalarField,
    VolumeOperators, VolumeTarget,
};

/// A source term shared with the solution for later evaluation.
pub type Source = Arc<dyn ScalarField>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveOptions {
    pub family: ParametrixFamily,
    /// Accept domains with `diam >= 1`. The boundary unknown then gets the
    /// extra constraint `∫_S ψ = ∫_Ω f` with a Lagrange multiplier, which
    /// removes any constant null direction of the single layer.
    pub allow_large_domain: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            family: ParametrixFamily::AtX,
            allow_large_domain: false,
        }
    }
}

impl SolveOptions {
    pub fn family(family: ParametrixFamily) -> Self {
        Self {
            family,
            ..Self::default()
        }
    }
}

/// `F₀ = 𝒫f - Wφ₀` at the grid nodes and its trace
/// `γ⁺F₀ = 𝒫f + φ₀/2 - 𝒲φ₀` at the boundary nodes.
#[derive(Debug, Clone)]
pub struct RhsF0 {
    pub grid: Vec<f64>,
    pub boundary: Vec<f64>,
}

pub fn assemble_rhs_f0(
    disc: &Discretization,
    coeff: &Coefficient,
    family: ParametrixFamily,
    f: &dyn ScalarField,
    phi0: &BoundaryDensity,
) -> Result<RhsF0> {
    check_len(&disc.curve, phi0.len())?;
    let volume = VolumeOperators::new(disc, coeff, family);
    let layer = LayerEvaluator::new(&disc.curve, coeff, family);
    let grid = disc
        .grid
        .nodes
        .par_iter()
        .map(|&y| {
            let p = volume.potential(f, VolumeTarget::Interior(y))?;
            Ok(p - layer.eval(LayerKind::Double, phi0, y)?)
        })
        .collect::<Result<Vec<f64>>>()?;
    let ops = BoundaryOperators::new(&disc.curve, coeff, family);
    let w = &ops.double * DVector::from_column_slice(&phi0.values);
    let boundary = (0..disc.curve.len())
        .into_par_iter()
        .map(|j| {
            let p = volume.potential(f, VolumeTarget::boundary_node(&disc.curve, j))?;
            Ok(p + 0.5 * phi0.values[j] - w[j])
        })
        .collect::<Result<Vec<f64>>>()?;
    finite(&grid, "F0")?;
    finite(&boundary, "trace of F0")?;
    Ok(RhsF0 { grid, boundary })
}

fn finite(v: &[f64], what: &str) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(BdiesError::NonFinite(what.into()))
    }
}

#[derive(Clone)]
struct ProblemData {
    f: Source,
    phi0: BoundaryDensity,
}

/// The dense system
///
/// ```text
/// [ I + ℛ_hh   -V_hb ] [ u ]   [ F₀          ]
/// [ γ⁺ℛ_bh     -𝒱_bb ] [ ψ ] = [ γ⁺F₀ - φ₀   ]
/// ```
///
/// with `h` the domain-grid nodes and `b` the boundary nodes, plus one
/// bordering row and column when large domains are allowed.
#[derive(Clone)]
pub struct BdieSystem {
    disc: Arc<Discretization>,
    coeff: Coefficient,
    options: SolveOptions,
    pub matrix: DMatrix<f64>,
    pub rhs: DVector<f64>,
    data: Option<ProblemData>,
}

/// Builds the system matrix; the right-hand side starts at zero.
pub fn assemble_a1(disc: Arc<Discretization>, coeff: &Coefficient, options: SolveOptions) -> Result<BdieSystem> {
    let diameter = disc.diameter();
    let bordered = diameter >= 1.0;
    if bordered && !options.allow_large_domain {
        return Err(BdiesError::DiameterViolation { diameter });
    }
    let family = options.family;
    let n_h = disc.grid.len();
    let n_b = disc.curve.len();
    let size = n_h + n_b + usize::from(bordered);
    let volume = VolumeOperators::new(&disc, coeff, family);
    let layer = LayerEvaluator::new(&disc.curve, coeff, family);
    let single = BoundaryOperators::new(&disc.curve, coeff, family).single;
    let matrix = try_dense_from_rows(size, size, |i| {
        let mut row = vec![0.0; size];
        if i < n_h {
            let y = disc.grid.nodes[i];
            row[..n_h].copy_from_slice(&volume.remainder_row(VolumeTarget::Interior(y))?);
            row[i] += 1.0;
            for (r, v) in row[n_h..n_h + n_b].iter_mut().zip(layer.row(LayerKind::Single, y)?) {
                *r = -v;
            }
        } else if i < n_h + n_b {
            let j = i - n_h;
            row[..n_h].copy_from_slice(&volume.remainder_row(VolumeTarget::boundary_node(&disc.curve, j))?);
            for (r, v) in row[n_h..n_h + n_b].iter_mut().zip(single.row(j).iter()) {
                *r = -v;
            }
            if bordered {
                row[size - 1] = 1.0;
            }
        } else {
            for (j, r) in row[n_h..n_h + n_b].iter_mut().enumerate() {
                *r = disc.curve.weight(j);
            }
        }
        Ok(row)
    })?;
    if matrix.iter().any(|v| !v.is_finite()) {
        return Err(BdiesError::NonFinite("system matrix".into()));
    }
    Ok(BdieSystem {
        disc,
        coeff: coeff.clone(),
        options,
        matrix,
        rhs: DVector::zeros(size),
        data: None,
    })
}

impl BdieSystem {
    /// Assembles the matrix and the right-hand side for source `f` and
    /// boundary data `φ₀`.
    pub fn assemble(
        disc: Arc<Discretization>,
        coeff: &Coefficient,
        options: SolveOptions,
        f: Source,
        phi0: BoundaryDensity,
    ) -> Result<Self> {
        let mut system = assemble_a1(disc, coeff, options)?;
        system.set_data(f, phi0)?;
        Ok(system)
    }

    pub fn set_data(&mut self, f: Source, phi0: BoundaryDensity) -> Result<()> {
        let rhs = assemble_rhs_f0(&self.disc, &self.coeff, self.options.family, f.as_ref(), &phi0)?;
        let n_h = self.n_grid();
        let n_b = self.n_boundary();
        let mut b = DVector::zeros(self.size());
        for (i, v) in rhs.grid.iter().enumerate() {
            b[i] = *v;
        }
        for (j, v) in rhs.boundary.iter().enumerate() {
            b[n_h + j] = v - phi0.values[j];
        }
        if self.is_bordered() {
            let grid = &self.disc.grid;
            b[n_h + n_b] = grid.integrate(&grid.sample(|x| f.value(x)));
        }
        self.rhs = b;
        self.data = Some(ProblemData { f, phi0 });
        Ok(())
    }

    pub fn discretization(&self) -> &Arc<Discretization> {
        &self.disc
    }

    pub fn coefficient(&self) -> &Coefficient {
        &self.coeff
    }

    pub fn options(&self) -> SolveOptions {
        self.options
    }

    pub fn n_grid(&self) -> usize {
        self.disc.grid.len()
    }

    pub fn n_boundary(&self) -> usize {
        self.disc.curve.len()
    }

    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_bordered(&self) -> bool {
        self.size() > self.n_grid() + self.n_boundary()
    }

    /// Largest entry of the two remainder blocks.
    pub fn remainder_block_max(&self) -> f64 {
        let n_h = self.n_grid();
        let n_b = self.n_boundary();
        let mut m: f64 = 0.0;
        for i in 0..n_h + n_b {
            for j in 0..n_h {
                let v = if i == j {
                    self.matrix[(i, j)] - 1.0
                } else {
                    self.matrix[(i, j)]
                };
                m = m.max(v.abs());
            }
        }
        m
    }

    /// Smallest and largest singular values of the system matrix. This is a
    /// full SVD; meant for diagnostics at small sizes.
    pub fn singular_value_range(&self) -> (f64, f64) {
        singular_value_range(&self.matrix)
    }

    /// Smallest singular value of the `𝒱` block.
    pub fn single_layer_min_singular_value(&self) -> f64 {
        let n_h = self.n_grid();
        let n_b = self.n_boundary();
        singular_value_range(&self.matrix.view((n_h, n_h), (n_b, n_b)).clone_owned()).0
    }

    pub fn solve(&self) -> Result<DirichletSolution> {
        solve_dirichlet(self)
    }
}

/// Solves the assembled system by LU factorization.
pub fn solve_dirichlet(system: &BdieSystem) -> Result<DirichletSolution> {
    let lu = Factorized::new(system.matrix.clone())?;
    let x = lu.solve(&system.rhs);
    if x.iter().any(|v| !v.is_finite()) {
        return Err(BdiesError::NonFinite("solution".into()));
    }
    let bnorm = system.rhs.norm();
    let residual = if bnorm == 0.0 {
        (&system.matrix * &x).norm()
    } else {
        (&system.matrix * &x - &system.rhs).norm() / bnorm
    };
    let condition = lu.condition_estimate();
    let n_h = system.n_grid();
    let n_b = system.n_boundary();
    let disc = system.disc.clone();
    let u = crate::potentials::DomainField::new(disc.grid.clone(), x.as_slice()[..n_h].to_vec())?;
    let psi = BoundaryDensity::new(x.as_slice()[n_h..n_h + n_b].to_vec());
    let multiplier = system.is_bordered().then(|| x[n_h + n_b]);
    let (f, phi0): (Source, BoundaryDensity) = match &system.data {
        Some(d) => (d.f.clone(), d.phi0.clone()),
        None => (Arc::new(|_: crate::Vec2| 0.0), BoundaryDensity::new(vec![0.0; n_b])),
    };
    Ok(DirichletSolution {
        disc,
        coeff: system.coeff.clone(),
        family: system.options.family,
        u,
        psi,
        phi0,
        f,
        residual,
        condition,
        multiplier,
    })
}
