//! Manufactured solutions, a finite-difference oracle, identity checks and
//! convergence studies.

mod cases;
mod fd;
pub mod identities;
mod study;

pub use cases::ManufacturedCase;
pub use fd::{fd_oracle, FdSolution};
pub use identities::{identity_suite, Check, IdentityReport};
pub use study::{compare_families, convergence_study, solve_case, CaseRun, StudyReport, StudyRow};
