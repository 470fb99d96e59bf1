use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use bdies_core::geometry::polar_rule_for_target;
use bdies_core::linalg::Factorized;
use bdies_core::potentials::{BoundaryOperators, VolumeOperators, VolumeTarget};
use bdies_core::quadrature::{Barycentric, GaussRule, TrigInterpolator};
use bdies_core::verification::ManufacturedCase;
use bdies_core::{
    BdieSystem, BoundaryCurve, Coefficient, CoefficientPreset, Discretization, DomainGrid, DomainSpec,
    ParametrixFamily, Resolution, SolveOptions, Vec2,
};
use nalgebra::DVector;
use proptest::prelude::*;

fn center() -> impl Strategy<Value = Vec2> {
    (-0.2..0.2f64, -0.2..0.2f64).prop_map(|(x, y)| Vec2::new(x, y))
}

/// Convex stars: small second and third cosine amplitudes.
fn convex_star() -> impl Strategy<Value = DomainSpec> {
    (center(), 0.2..0.4f64, -0.02..0.02f64, -0.008..0.008f64)
        .prop_map(|(c, r, a2, a3)| DomainSpec::star(c, vec![r, 0.0, a2, a3]).unwrap())
}

fn cubic(c: [f64; 10]) -> impl Fn(Vec2) -> f64 {
    move |p: Vec2| {
        let (x, y) = (p.x, p.y);
        c[0] + c[1] * x
            + c[2] * y
            + c[3] * x * x
            + c[4] * x * y
            + c[5] * y * y
            + c[6] * x * x * x
            + c[7] * x * x * y
            + c[8] * x * y * y
            + c[9] * y * y * y
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn trapezoid_length_of_a_circle_is_exact(r in 0.05..0.49f64, half in 4usize..120, c in center()) {
        let spec = DomainSpec::disk(c, r).unwrap();
        let curve = BoundaryCurve::new(&spec, 2 * half).unwrap();
        prop_assert!((curve.length() - 2.0 * PI * r).abs() < 1e-12);
    }

    #[test]
    fn star_length_converges(spec in convex_star()) {
        let a = BoundaryCurve::new(&spec, 128).unwrap().length();
        let b = BoundaryCurve::new(&spec, 256).unwrap().length();
        prop_assert!((a - b).abs() < 1e-12 * b);
    }

    #[test]
    fn outward_normals_point_away_from_the_centre(spec in convex_star(), half in 8usize..64) {
        let curve = BoundaryCurve::new(&spec, 2 * half).unwrap();
        let c = spec.center();
        for (x, n) in curve.points.iter().zip(&curve.normals) {
            prop_assert!((x - c).dot(n) > 0.0);
            prop_assert!((n.norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn grid_and_polar_rule_agree_on_cubics(
        c in center(),
        r in 0.2..0.45f64,
        coeffs in prop::array::uniform10(-1.0..1.0f64),
        s in 0.0..0.95f64,
        phi in 0.0..(2.0 * PI),
    ) {
        let spec = DomainSpec::disk(c, r).unwrap();
        let grid = DomainGrid::new(&spec, 16, 8).unwrap();
        let p = cubic(coeffs);
        let on_grid = grid.integrate(&grid.sample(&p));
        let y = c + s * r * Vec2::new(phi.cos(), phi.sin());
        let rule = polar_rule_for_target(&spec, y, 64, 8).unwrap();
        let polar = rule.integrate(|node| p(node.x));
        prop_assert!((on_grid - polar).abs() < 1e-8, "grid {on_grid} polar {polar}");
    }

    #[test]
    fn coefficient_log_laplacian_identity(
        d in (-2.0..2.0f64, -2.0..2.0f64),
        value in 0.1..10.0f64,
        x in (-0.5..0.5f64, -0.5..0.5f64),
    ) {
        let x = Vec2::new(x.0, x.1);
        for preset in [
            CoefficientPreset::Constant(value),
            CoefficientPreset::Exponential(Vec2::new(d.0, d.1)),
            CoefficientPreset::Quadratic,
        ] {
            let a = Coefficient::preset(preset).unwrap();
            let av = a.a(x);
            prop_assert!(av > 0.0);
            let la = a.laplacian_a(x).unwrap();
            let via_a = (la * av - a.grad_a(x).norm_squared()) / (av * av);
            prop_assert!((a.laplacian_ln_a(x) - via_a).abs() < 1e-10 * via_a.abs().max(1.0));
        }
    }

    #[test]
    fn trig_interpolation_is_exact_near_nodes(half in 4usize..64, j in 0usize..128, exp in 3i32..16, sign in prop::bool::ANY) {
        let n = 2 * half;
        let j = j % n;
        let delta = if sign { 1.0 } else { -1.0 } * 10f64.powi(-exp);
        let t = 2.0 * PI * j as f64 / n as f64 + delta;
        let m = (half - 1) as f64;
        let f = |t: f64| (m * t).sin() + 0.5 * (m * t).cos() + 0.25;
        let values: Vec<f64> = (0..n).map(|k| f(2.0 * PI * k as f64 / n as f64)).collect();
        let w = TrigInterpolator::new(n).weights(t);
        let got: f64 = w.iter().zip(&values).map(|(a, b)| a * b).sum();
        prop_assert!((got - f(t)).abs() < 1e-12, "{got} vs {}", f(t));
    }

    #[test]
    fn barycentric_reproduces_polynomials(n in 3usize..16, s in -1.0..1.0f64, c in prop::collection::vec(-1.0..1.0f64, 16)) {
        let rule = GaussRule::legendre(n);
        let bary = Barycentric::new(&rule.nodes);
        let p = |s: f64| c[..n].iter().rev().fold(0.0, |acc, k| acc * s + k);
        let got: f64 = bary.weights(s).iter().zip(&rule.nodes).map(|(w, &x)| w * p(x)).sum();
        prop_assert!((got - p(s)).abs() < 1e-12);
    }

    #[test]
    fn constant_coefficient_families_coincide(value in 0.2..5.0f64, spec in convex_star()) {
        let curve = BoundaryCurve::new(&spec, 32).unwrap();
        let a = Coefficient::constant(value).unwrap();
        let x = BoundaryOperators::new(&curve, &a, ParametrixFamily::AtX);
        let y = BoundaryOperators::new(&curve, &a, ParametrixFamily::AtY);
        prop_assert!((&x.single - &y.single).amax() < 1e-12);
        prop_assert!((&x.double - &y.double).amax() < 1e-12);
        prop_assert!((&x.adjoint - &y.adjoint).amax() < 1e-12);
        let disc = Discretization::new(spec.clone(), Resolution::new(32, 8, 4)).unwrap();
        for family in [ParametrixFamily::AtX, ParametrixFamily::AtY] {
            let vol = VolumeOperators::new(&disc, &a, family);
            let y0 = spec.center() + Vec2::new(0.05, 0.02);
            let r = vol.remainder(&|p: Vec2| 1.0 + p.x * p.y, VolumeTarget::Interior(y0)).unwrap();
            prop_assert!(r.abs() < 1e-12);
        }
    }
}

/// exp_saddle system at the coarse resolution, shared by the perturbation
/// properties.
fn coarse_system() -> &'static (BdieSystem, Factorized) {
    static SYSTEM: OnceLock<(BdieSystem, Factorized)> = OnceLock::new();
    SYSTEM.get_or_init(|| {
        let case = ManufacturedCase::exp_saddle();
        let spec = DomainSpec::disk(Vec2::zeros(), 0.4).unwrap();
        let disc = Arc::new(Discretization::new(spec, Resolution::new(64, 16, 8)).unwrap());
        let phi0 = case.phi0(&disc.curve);
        let system = BdieSystem::assemble(disc, &case.coeff, SolveOptions::default(), case.source(), phi0).unwrap();
        let lu = Factorized::new(system.matrix.clone()).unwrap();
        (system, lu)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rhs_perturbations_are_bounded_by_the_condition_number(
        eps in 1e-10..1e-3f64,
        seed in prop::collection::vec(-1.0..1.0f64, 8),
    ) {
        let (system, lu) = coarse_system();
        let n = system.size();
        let mut e = DVector::from_fn(n, |i, _| seed[i % seed.len()] * ((i * 7 + 3) % 11) as f64 / 11.0);
        e /= e.lp_norm(1);
        let cond = lu.condition_estimate();
        let plus = lu.solve(&(&system.rhs + eps * &e));
        let minus = lu.solve(&(&system.rhs - eps * &e));
        prop_assert!((plus - minus).lp_norm(1) <= 2.0 * eps * cond);
    }
}

#[test]
fn zero_rhs_gives_the_zero_solution() {
    let (system, lu) = coarse_system();
    let x = lu.solve(&DVector::zeros(system.size()));
    assert!(x.iter().all(|&v| v == 0.0));
}

#[test]
fn assembly_is_bitwise_identical_across_thread_counts() {
    let case = ManufacturedCase::quad_coeff();
    let spec = DomainSpec::disk(Vec2::new(0.03, -0.01), 0.35).unwrap();
    let build = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let disc = Arc::new(Discretization::new(spec.clone(), Resolution::new(48, 12, 6)).unwrap());
            let phi0 = case.phi0(&disc.curve);
            let system = BdieSystem::assemble(disc, &case.coeff, SolveOptions::default(), case.source(), phi0).unwrap();
            let sol = system.solve().unwrap();
            (system.matrix, system.rhs, sol.u.values, sol.psi.values)
        })
    };
    let one = build(1);
    let many = build(4);
    assert!(one.0.iter().zip(many.0.iter()).all(|(a, b)| a.to_bits() == b.to_bits()));
    assert!(one.1.iter().zip(many.1.iter()).all(|(a, b)| a.to_bits() == b.to_bits()));
    assert!(one.2.iter().zip(&many.2).all(|(a, b)| a.to_bits() == b.to_bits()));
    assert!(one.3.iter().zip(&many.3).all(|(a, b)| a.to_bits() == b.to_bits()));
}
