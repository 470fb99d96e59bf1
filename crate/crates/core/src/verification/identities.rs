//! Numerical checks of the potential-theoretic identities the method rests
//! on: Gauss integrals, jump relations, the integrated parametrix identity,
//! Green's identities and the Laplace relations of every parametrix
//! operator.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::coefficient::Coefficient;
use crate::error::Result;
use crate::geometry::{BoundaryCurve, Discretization, DomainSpec};
use crate::potentials::direct::{
    boundary_matrix_by_kernel, layer_by_relation, potential_by_relation, remainder_by_relation, BoundaryOp,
};
use crate::potentials::{
    BoundaryDensity, BoundaryOperators, LaplaceBoundary, LayerEvaluator, LayerKind, ParametrixFamily, VolumeOperators,
    VolumeTarget,
};
use crate::Vec2;

pub const GAUSS_TOLERANCE: f64 = 1e-10;
pub const JUMP_TOLERANCE: f64 = 1e-3;
pub const SUBTRACTION_TOLERANCE: f64 = 1e-6;
pub const GREEN_TOLERANCE: f64 = 1e-8;
pub const BOUNDARY_RELATION_TOLERANCE: f64 = 1e-8;
pub const VOLUME_RELATION_TOLERANCE: f64 = 1e-6;

/// One asserted quantity: passes when `value < tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    pub fn below(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            pass: value.is_finite() && value < tolerance,
        }
    }

    /// Passes when `value > bound`; the bound is stored as the tolerance.
    pub fn above(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance: bound,
            pass: value.is_finite() && value > bound,
        }
    }

    /// Passes when `value >= bound`.
    pub fn at_least(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            pass: value.is_finite() && value >= bound,
            ..Self::above(name, value, bound)
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct IdentityReport {
    pub checks: Vec<Check>,
    /// Reported quantities without a threshold.
    pub diagnostics: Vec<(String, f64)>,
}

impl IdentityReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Deviations of the Laplace double layer of `1` from `-1/2` on the
/// boundary, `-1` inside and `0` outside.
#[derive(Debug, Clone, Copy)]
pub struct GaussDeviations {
    pub direct: f64,
    pub interior: f64,
    pub exterior: f64,
}

pub fn gauss_identities(curve: &BoundaryCurve) -> Result<GaussDeviations> {
    let lap = LaplaceBoundary::new(curve);
    let ones = DVector::from_element(curve.len(), 1.0);
    let w = &lap.double * &ones;
    let direct = w.iter().fold(0.0, |m: f64, v| m.max((v + 0.5).abs()));
    let unit = Coefficient::constant(1.0)?;
    let spec = curve.spec();
    let c = spec.center();
    let reach = spec.max_radius();
    let interior = spiral_targets(spec, 12, 0.95);
    let exterior: Vec<Vec2> = (0..8)
        .map(|k| {
            let t = k as f64 * std::f64::consts::PI / 4.0 + 0.1;
            c + (1.5 + 0.25 * k as f64) * reach * Vec2::new(t.cos(), t.sin())
        })
        .collect();
    let density = BoundaryDensity::new(vec![1.0; curve.len()]);
    let eval = LayerEvaluator::new(curve, &unit, ParametrixFamily::AtX);
    let layer = |targets: &[Vec2]| -> Result<Vec<f64>> {
        targets
            .iter()
            .map(|&y| eval.eval(LayerKind::Double, &density, y))
            .collect()
    };
    let inside = layer(&interior)?;
    let outside = layer(&exterior)?;
    Ok(GaussDeviations {
        direct,
        interior: inside.iter().fold(0.0, |m: f64, v| m.max((v + 1.0).abs())),
        exterior: outside.iter().fold(0.0, |m: f64, v| m.max(v.abs())),
    })
}

/// Deterministic interior points on a sunflower spiral, out to the fraction
/// `reach` of the radial function.
pub fn spiral_targets(spec: &DomainSpec, count: usize, reach: f64) -> Vec<Vec2> {
    const GOLDEN_ANGLE: f64 = 2.399_963_229_728_653;
    (0..count)
        .map(|k| {
            let t = k as f64 * GOLDEN_ANGLE;
            let s = reach * ((k as f64 + 0.5) / count as f64).sqrt();
            spec.center() + s * spec.radial(t).0 * Vec2::new(t.cos(), t.sin())
        })
        .collect()
}

/// A random smooth density: low Fourier modes with decaying amplitudes.
pub fn random_density(curve: &BoundaryCurve, rng: &mut impl Rng) -> BoundaryDensity {
    let coef: Vec<(f64, f64)> = (0..5)
        .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    BoundaryDensity::from_param(curve, |t| {
        coef.iter()
            .enumerate()
            .map(|(k, (a, b))| (a * (k as f64 * t).cos() + b * (k as f64 * t).sin()) / (1.0 + (k * k) as f64))
            .sum()
    })
}

/// A random smooth field on the plane: a few plane waves of moderate
/// frequency.
pub fn random_field(rng: &mut impl Rng) -> impl Fn(Vec2) -> f64 + Send + Sync + Clone {
    let waves: Vec<(Vec2, f64, f64)> = (0..4)
        .map(|_| {
            (
                Vec2::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)),
                rng.gen_range(0.0..std::f64::consts::TAU),
                rng.gen_range(-1.0..1.0),
            )
        })
        .collect();
    move |x: Vec2| waves.iter().map(|(k, p, a)| a * (k.dot(&x) + p).cos()).sum()
}

/// Largest deviations of the Richardson-extrapolated interior limits from
/// the direct values: `γ⁺Vρ = 𝒱ρ`, `γ⁺Wτ = -τ/2 + 𝒲τ`,
/// `T⁺Vρ = ρ/2 + 𝒲'ρ`.
#[derive(Debug, Clone, Copy)]
pub struct JumpDeviations {
    pub single: f64,
    pub double: f64,
    pub conormal: f64,
}

pub fn jump_relations(
    curve: &BoundaryCurve,
    coeff: &Coefficient,
    family: ParametrixFamily,
    h: f64,
    seed: u64,
) -> Result<JumpDeviations> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rho = random_density(curve, &mut rng);
    let tau = random_density(curve, &mut rng);
    let ops = BoundaryOperators::new(curve, coeff, family);
    let v = &ops.single * DVector::from_column_slice(&rho.values);
    let w = &ops.double * DVector::from_column_slice(&tau.values);
    let wp = &ops.adjoint * DVector::from_column_slice(&rho.values);
    let eval = LayerEvaluator::new(curve, coeff, family);
    let step = (curve.len() / 16).max(1);
    let mut dev = JumpDeviations {
        single: 0.0,
        double: 0.0,
        conormal: 0.0,
    };
    for j in (0..curve.len()).step_by(step) {
        let x0 = curve.points[j];
        let n = curve.normals[j];
        let limit = |g: &dyn Fn(Vec2) -> Result<f64>| -> Result<f64> {
            let f1 = g(x0 - h * n)?;
            let f2 = g(x0 - 0.5 * h * n)?;
            let f4 = g(x0 - 0.25 * h * n)?;
            Ok((f1 - 6.0 * f2 + 8.0 * f4) / 3.0)
        };
        let lv = limit(&|y| eval.eval(LayerKind::Single, &rho, y))?;
        let lw = limit(&|y| eval.eval(LayerKind::Double, &tau, y))?;
        let lt = limit(&|y| eval.conormal_single(&rho, y, n))?;
        dev.single = dev.single.max((lv - v[j]).abs());
        dev.double = dev.double.max((lw - (-0.5 * tau.values[j] + w[j])).abs());
        dev.conormal = dev.conormal.max((lt - (0.5 * rho.values[j] + wp[j])).abs());
    }
    Ok(dev)
}

/// `max |ℛ1(y) + W1(y) + 1|` over the targets.
pub fn subtraction_identity(
    disc: &Discretization,
    coeff: &Coefficient,
    family: ParametrixFamily,
    targets: &[Vec2],
) -> Result<f64> {
    let volume = VolumeOperators::new(disc, coeff, family);
    let layer = LayerEvaluator::new(&disc.curve, coeff, family);
    let ones = BoundaryDensity::new(vec![1.0; disc.curve.len()]);
    let dev = targets
        .par_iter()
        .map(|&y| {
            let r = volume.remainder(&|_: Vec2| 1.0, VolumeTarget::Interior(y))?;
            let w = layer.eval(LayerKind::Double, &ones, y)?;
            Ok((r + w + 1.0).abs())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(dev.into_iter().fold(0.0, f64::max))
}

/// Gaps in Green's first and second identities for `u = x₁² - x₂²`,
/// `v = x₁x₂` and the operator `∇·(a∇·)`:
///
/// - first: `∫_Ω v𝒜u + ∫_Ω a∇u·∇v - ∫_S v T⁺u`
/// - second: `∫_Ω (u𝒜v - v𝒜u) - ∫_S (u T⁺v - v T⁺u)`
pub fn green_identities(disc: &Discretization, coeff: &Coefficient) -> (f64, f64) {
    let u = |x: Vec2| x.x * x.x - x.y * x.y;
    let gu = |x: Vec2| Vec2::new(2.0 * x.x, -2.0 * x.y);
    let v = |x: Vec2| x.x * x.y;
    let gv = |x: Vec2| Vec2::new(x.y, x.x);
    // both are harmonic, so 𝒜w = ∇a·∇w
    let au = |x: Vec2| coeff.grad_a(x).dot(&gu(x));
    let av = |x: Vec2| coeff.grad_a(x).dot(&gv(x));
    let grid = &disc.grid;
    let vol = |f: &dyn Fn(Vec2) -> f64| grid.integrate(&grid.sample(f));
    let curve = &disc.curve;
    let surf = |f: &dyn Fn(Vec2, Vec2) -> f64| -> f64 {
        (0..curve.len())
            .map(|j| f(curve.points[j], curve.normals[j]) * curve.weight(j))
            .sum()
    };
    let tu = |x: Vec2, n: Vec2| coeff.a(x) * gu(x).dot(&n);
    let tv = |x: Vec2, n: Vec2| coeff.a(x) * gv(x).dot(&n);
    let first = vol(&|x| v(x) * au(x)) + vol(&|x| coeff.a(x) * gu(x).dot(&gv(x))) - surf(&|x, n| v(x) * tu(x, n));
    let second = vol(&|x| u(x) * av(x) - v(x) * au(x)) - surf(&|x, n| u(x) * tv(x, n) - v(x) * tu(x, n));
    (first.abs(), second.abs())
}

/// Largest gaps between the relation route and the kernel route.
#[derive(Debug, Clone, Copy)]
pub struct RelationDeviations {
    /// `𝒱`, `𝒲`, `𝒲'` applied to random densities.
    pub boundary: f64,
    /// `V`, `W` at interior targets.
    pub layer: f64,
    /// `𝒫` at interior and boundary targets.
    pub potential: f64,
    /// `ℛ` at interior targets, kernel form against divergence form.
    pub remainder: f64,
}

pub fn relation_sweep(
    disc: &Discretization,
    coeff: &Coefficient,
    family: ParametrixFamily,
    seed: u64,
) -> Result<RelationDeviations> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let curve = &disc.curve;
    let rel = BoundaryOperators::new(curve, coeff, family);
    let mut boundary: f64 = 0.0;
    for (op, m) in [
        (BoundaryOp::Single, &rel.single),
        (BoundaryOp::Double, &rel.double),
        (BoundaryOp::Adjoint, &rel.adjoint),
    ] {
        let k = boundary_matrix_by_kernel(curve, coeff, family, op);
        let rho = DVector::from_column_slice(&random_density(curve, &mut rng).values);
        boundary = boundary.max((m * &rho - k * &rho).amax());
    }

    let targets = spiral_targets(&disc.spec, 10, 0.85);
    let eval = LayerEvaluator::new(curve, coeff, family);
    let mut layer: f64 = 0.0;
    for kind in [LayerKind::Single, LayerKind::Double] {
        let rho = random_density(curve, &mut rng);
        for &y in &targets {
            let a = eval.eval(kind, &rho, y)?;
            let b = layer_by_relation(curve, coeff, family, kind, &rho, y)?;
            layer = layer.max((a - b).abs());
        }
    }

    let ops = VolumeOperators::new(disc, coeff, family);
    let field = random_field(&mut rng);
    let mut vt: Vec<VolumeTarget> = targets.iter().map(|&y| VolumeTarget::Interior(y)).collect();
    vt.push(VolumeTarget::boundary_node(curve, 3));
    let potential = vt
        .par_iter()
        .map(|&t| Ok((ops.potential(&field, t)? - potential_by_relation(&ops, coeff, &field, t)?).abs()))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);

    let step = 1e-3;
    let remainder = targets
        .par_iter()
        .map(|&y| {
            let d = disc.spec.distance_to_boundary(y);
            let a = ops.remainder(&field, VolumeTarget::Interior(y))?;
            let b = remainder_by_relation(&ops, coeff, &field, y, step, d)?;
            Ok((a - b).abs())
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(RelationDeviations {
        boundary,
        layer,
        potential,
        remainder,
    })
}

/// Smallest ratio `|V psi|_grid / |psi|_S` over random zero-mean densities
/// built from the lowest Fourier modes. A collapse towards zero would flag a
/// near-kernel of the single layer.
pub fn interior_single_layer_bound(
    disc: &Discretization,
    coeff: &Coefficient,
    family: ParametrixFamily,
) -> Result<f64> {
    let curve = &disc.curve;
    let eval = LayerEvaluator::new(curve, coeff, family);
    let rows = disc
        .grid
        .nodes
        .par_iter()
        .map(|&y| eval.row(LayerKind::Single, y))
        .collect::<Result<Vec<Vec<f64>>>>()?;
    let w = curve.weights();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut lowest = f64::INFINITY;
    for _ in 0..16 {
        let amps: Vec<(f64, f64)> = (0..6)
            .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let mut psi: Vec<f64> = (0..curve.len())
            .map(|j| {
                let t = curve.params[j];
                amps.iter()
                    .enumerate()
                    .map(|(m, &(c, s))| {
                        let k = (m + 1) as f64;
                        c * (k * t).cos() + s * (k * t).sin()
                    })
                    .sum()
            })
            .collect();
        let mean = psi.iter().zip(&w).map(|(p, w)| p * w).sum::<f64>() / w.iter().sum::<f64>();
        psi.iter_mut().for_each(|p| *p -= mean);
        let norm_s = psi.iter().zip(&w).map(|(p, w)| p * p * w).sum::<f64>().sqrt();
        let v: Vec<f64> = rows
            .iter()
            .map(|r| r.iter().zip(&psi).map(|(a, b)| a * b).sum::<f64>())
            .collect();
        let norm_grid = disc.grid.integrate(&v.iter().map(|x| x * x).collect::<Vec<_>>()).sqrt();
        lowest = lowest.min(norm_grid / norm_s);
    }
    Ok(lowest)
}

/// Runs every identity check on one discretization.
pub fn identity_suite(disc: &Discretization, coeff: &Coefficient, family: ParametrixFamily) -> Result<IdentityReport> {
    let mut report = IdentityReport::default();
    let g = gauss_identities(&disc.curve)?;
    report
        .checks
        .push(Check::below("gauss_direct", g.direct, GAUSS_TOLERANCE));
    report
        .checks
        .push(Check::below("gauss_interior", g.interior, GAUSS_TOLERANCE));
    report
        .checks
        .push(Check::below("gauss_exterior", g.exterior, GAUSS_TOLERANCE));

    let h = 0.05 * disc.diameter();
    let j = jump_relations(&disc.curve, coeff, family, h, 7)?;
    report
        .checks
        .push(Check::below("jump_single_layer", j.single, JUMP_TOLERANCE));
    report
        .checks
        .push(Check::below("jump_double_layer", j.double, JUMP_TOLERANCE));
    report
        .checks
        .push(Check::below("jump_conormal_single_layer", j.conormal, JUMP_TOLERANCE));

    let targets = spiral_targets(&disc.spec, 20, 0.9);
    let s = subtraction_identity(disc, coeff, family, &targets)?;
    report
        .checks
        .push(Check::below("subtraction_identity", s, SUBTRACTION_TOLERANCE));

    let (first, second) = green_identities(disc, coeff);
    report
        .checks
        .push(Check::below("green_first_identity", first, GREEN_TOLERANCE));
    report
        .checks
        .push(Check::below("green_second_identity", second, GREEN_TOLERANCE));

    let r = relation_sweep(disc, coeff, family, 11)?;
    report.checks.push(Check::below(
        "relation_boundary_operators",
        r.boundary,
        BOUNDARY_RELATION_TOLERANCE,
    ));
    report.checks.push(Check::below(
        "relation_layer_potentials",
        r.layer,
        BOUNDARY_RELATION_TOLERANCE,
    ));
    report.checks.push(Check::below(
        "relation_volume_potential",
        r.potential,
        VOLUME_RELATION_TOLERANCE,
    ));
    report.checks.push(Check::below(
        "relation_remainder_potential",
        r.remainder,
        VOLUME_RELATION_TOLERANCE,
    ));

    report.diagnostics.push((
        "interior_single_layer_relative_min_singular_value".into(),
        interior_single_layer_bound(disc, coeff, family)?,
    ));
    Ok(report)
}
