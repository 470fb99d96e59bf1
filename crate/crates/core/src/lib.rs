//! Boundary-domain integral equations for the two-dimensional Dirichlet
//! problem `div(a grad u) = f` with a smooth, positive, variable coefficient.
//!
//! The solver works with the parametrix `P(x, y) = log|x - y| / (2 pi a(x))`
//! (family [`ParametrixFamily::AtX`]) and, for comparison studies, with the
//! older `P(x, y) = log|x - y| / (2 pi a(y))` (family
//! [`ParametrixFamily::AtY`]). The unknowns are the nodal values of `u` on a
//! polar domain grid and the conormal derivative `psi = a du/dn` at the
//! boundary nodes. The segregated system
//!
//! ```text
//! [ I + R     -V ] [ u   ]   [ F0               ]
//! [ trace R   -𝒱 ] [ psi ] = [ trace F0 - phi0  ]
//! ```
//!
//! with `F0 = P f - W phi0` is assembled densely and solved by LU.
//!
//! Module map:
//!
//! - [`geometry`]: boundary curve, polar domain grid, target-centred polar
//!   quadrature rules.
//! - [`coefficient`]: the coefficient `a` and the derivatives the kernels need.
//! - [`potentials`]: Laplace and parametrix-based surface and volume operators.
//! - [`solver`]: system assembly, solution and the representation formula.
//! - [`verification`]: manufactured solutions, a finite-difference oracle,
//!   identity checks and convergence studies.

pub mod coefficient;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod potentials;
pub mod quadrature;
pub mod solver;
pub mod verification;

pub use coefficient::{Coefficient, CoefficientFn, CoefficientPreset};
pub use error::{BdiesError, Result};
pub use geometry::{BoundaryCurve, Discretization, DomainGrid, DomainSpec, PolarRule, Resolution};
pub use potentials::{BoundaryDensity, DomainField, ParametrixFamily, ScalarField};
pub use solver::{BdieSystem, DirichletSolution, SolveOptions};
pub use verification::{ManufacturedCase, StudyReport};

/// Points and vectors in the plane.
pub type Vec2 = nalgebra::Vector2<f64>;
