//! Shared fixtures for the criterion benchmarks in `benches/`.

use std::sync::Arc;

use bdies_core::{Discretization, DomainSpec, ManufacturedCase, Resolution, Vec2};

pub const RESOLUTIONS: [Resolution; 3] = [
    Resolution::new(64, 16, 8),
    Resolution::new(128, 32, 12),
    Resolution::new(256, 64, 24),
];

/// The exp_saddle problem on the disk of radius 0.4.
pub fn fixture(res: Resolution) -> (Arc<Discretization>, ManufacturedCase) {
    let spec = DomainSpec::disk(Vec2::zeros(), 0.4).expect("valid disk");
    let disc = Discretization::new(spec, res).expect("valid resolution");
    (Arc::new(disc), ManufacturedCase::exp_saddle())
}
