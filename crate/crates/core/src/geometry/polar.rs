//! Target-centred polar quadrature over the domain.
//!
//! With `x = y + r (cos θ, sin θ)` the area element `r dr dθ` cancels the
//! `1/r` singularity of kernel gradients and softens `log r` to `r log r`.
//! The radial variable is further substituted as `r = L σ³`, which turns
//! `r log r dr` into `σ⁵ log σ dσ` for the Gauss rule in `σ`.

use std::f64::consts::PI;

use super::DomainSpec;
use crate::error::{BdiesError, Result};
use crate::quadrature::{endpoint_clustering, GaussRule};
use crate::Vec2;

/// Angular nodes per unit of `1/η`, where `η ≈ sqrt(4 d / diam)` is the
/// distance of the ray-extent singularities from the real angle axis for a
/// target at distance `d` from the boundary.
const ANGULAR_DENSITY: f64 = 28.0;
const MAX_ANGLES: usize = 4096;

#[derive(Debug, Clone, Copy)]
pub struct PolarNode {
    pub x: Vec2,
    /// Distance to the target.
    pub r: f64,
    /// Unit vector from the target to `x`.
    pub dir: Vec2,
    /// Full weight including the polar Jacobian `r`.
    pub weight: f64,
}

#[derive(Debug, Clone)]
pub struct PolarRule {
    pub target: Vec2,
    pub on_boundary: bool,
    pub angles: Vec<f64>,
    /// Ray extent `L(θ)` per angle.
    pub extents: Vec<f64>,
    pub nodes: Vec<PolarNode>,
}

impl PolarRule {
    /// Periodic trapezoid in `θ` around an interior target.
    pub fn interior(spec: &DomainSpec, y: Vec2, n_theta: usize, radial: &GaussRule) -> Result<Self> {
        if !spec.contains(y) {
            return Err(BdiesError::TargetOutside([y.x, y.y]));
        }
        let dtheta = 2.0 * PI / n_theta as f64;
        let mut rule = Self::empty(y, false, n_theta, radial.len());
        for m in 0..n_theta {
            let theta = dtheta * m as f64;
            rule.push_ray(spec, theta, dtheta, radial, false)?;
        }
        Ok(rule)
    }

    /// Half-plane window around the inward normal of a boundary target, with
    /// nodes clustered towards the two tangential directions.
    pub fn boundary(spec: &DomainSpec, y: Vec2, inward: Vec2, n_theta: usize, radial: &GaussRule) -> Result<Self> {
        let base = inward.y.atan2(inward.x);
        let angular = GaussRule::legendre(n_theta.max(2));
        let mut rule = Self::empty(y, true, n_theta, radial.len());
        for (&tau, &w) in angular.nodes.iter().zip(&angular.weights) {
            let (phi, dphi) = endpoint_clustering(tau);
            let theta = base + 0.5 * PI * phi;
            rule.push_ray(spec, theta, 0.5 * PI * dphi * w, radial, true)?;
        }
        Ok(rule)
    }

    fn empty(y: Vec2, on_boundary: bool, n_theta: usize, n_r: usize) -> Self {
        Self {
            target: y,
            on_boundary,
            angles: Vec::with_capacity(n_theta),
            extents: Vec::with_capacity(n_theta),
            nodes: Vec::with_capacity(n_theta * n_r),
        }
    }

    fn push_ray(
        &mut self,
        spec: &DomainSpec,
        theta: f64,
        angle_weight: f64,
        radial: &GaussRule,
        from_boundary: bool,
    ) -> Result<()> {
        let dir = Vec2::new(theta.cos(), theta.sin());
        let extent = spec.ray_extent(self.target, dir, from_boundary)?;
        self.angles.push(theta);
        self.extents.push(extent);
        if extent <= 0.0 {
            return Ok(());
        }
        for (sigma, ws) in radial.mapped(0.0, 1.0) {
            let r = extent * sigma * sigma * sigma;
            let dr = 3.0 * extent * sigma * sigma * ws;
            self.nodes.push(PolarNode {
                x: self.target + r * dir,
                r,
                dir,
                weight: angle_weight * dr * r,
            });
        }
        Ok(())
    }

    pub fn integrate(&self, f: impl Fn(&PolarNode) -> f64) -> f64 {
        self.nodes.iter().map(|n| n.weight * f(n)).sum()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Rule sizes for one discretization, with the angular count raised for
/// targets close to the boundary.
#[derive(Debug, Clone)]
pub struct PolarSettings {
    pub diameter: f64,
    pub n_theta: usize,
    pub radial: GaussRule,
}

impl PolarSettings {
    pub fn new(spec: &DomainSpec, n_theta: usize, n_r: usize) -> Self {
        Self {
            diameter: spec.diameter(),
            n_theta: n_theta.max(8),
            radial: GaussRule::legendre(n_r.max(2)),
        }
    }

    /// Defaults tied to a domain grid of `n_t x n_s` nodes.
    pub fn for_grid(spec: &DomainSpec, n_t: usize, n_s: usize) -> Self {
        Self::new(spec, (2 * n_t).max(32), (n_s + 8).max(16))
    }

    pub fn n_r(&self) -> usize {
        self.radial.len()
    }

    /// Angular count for an interior target at distance `d` from the boundary.
    pub fn angles_for_distance(&self, d: f64) -> usize {
        let eta = (4.0 * d / self.diameter).sqrt();
        let wanted = (ANGULAR_DENSITY / eta).ceil() as usize;
        let n = wanted.clamp(self.n_theta, MAX_ANGLES.max(self.n_theta));
        n + n % 2
    }

    /// Rule for an interior target, or for a boundary target when its
    /// inward normal is given.
    pub fn rule(&self, spec: &DomainSpec, y: Vec2, inward_normal: Option<Vec2>) -> Result<PolarRule> {
        match inward_normal {
            Some(n) => PolarRule::boundary(spec, y, n, self.n_theta, &self.radial),
            None => {
                let d = spec.distance_to_boundary(y);
                PolarRule::interior(spec, y, self.angles_for_distance(d), &self.radial)
            }
        }
    }
}

/// Polar rule for any target in the closed domain. Targets within
/// `1e-12 diam` of the boundary are treated as boundary targets.
pub fn polar_rule_for_target(spec: &DomainSpec, y: Vec2, n_theta: usize, n_r: usize) -> Result<PolarRule> {
    let radial = GaussRule::legendre(n_r.max(2));
    let (t, d) = spec.nearest_boundary(y);
    if d <= 1e-12 * spec.diameter() {
        let inward = -spec.outward_normal(t);
        PolarRule::boundary(spec, y, inward, n_theta, &radial)
    } else if spec.contains(y) {
        PolarRule::interior(spec, y, n_theta, &radial)
    } else {
        Err(BdiesError::TargetOutside([y.x, y.y]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disk() -> DomainSpec {
        DomainSpec::disk(Vec2::zeros(), 0.4).unwrap()
    }

    #[test]
    fn centre_rule_area_and_log_integral() {
        let rule = polar_rule_for_target(&disk(), Vec2::zeros(), 32, 24).unwrap();
        assert!(rule.extents.iter().all(|&l| (l - 0.4).abs() < 1e-15));
        let area = rule.integrate(|_| 1.0);
        assert!((area - PI * 0.16).abs() < 1e-12);
        // 2π ∫_0^0.4 r log r dr = π 0.16 (log 0.4 - 1/2)
        let exact = PI * 0.16 * (0.4f64.ln() - 0.5);
        let log = rule.integrate(|n| n.r.ln());
        assert!((log - exact).abs() < 1e-8 * exact.abs(), "{log} vs {exact}");
        assert!((exact + 0.711906).abs() < 1e-6);
    }

    #[test]
    fn off_centre_rule_reproduces_area() {
        let spec = disk();
        let settings = PolarSettings::new(&spec, 64, 24);
        for y in [Vec2::new(0.2, 0.1), Vec2::new(-0.3, 0.2), Vec2::new(0.0, 0.399)] {
            let rule = settings.rule(&spec, y, None).unwrap();
            let area = rule.integrate(|_| 1.0);
            assert!((area - PI * 0.16).abs() < 1e-8 * PI * 0.16, "y = {y:?}: {area}");
            assert!(rule.nodes.iter().all(|n| spec.level(n.x) <= 1e-14));
        }
    }

    #[test]
    fn boundary_rule_reproduces_area() {
        let spec = disk();
        let y = spec.boundary_point(0.3).x;
        let rule = polar_rule_for_target(&spec, y, 48, 24).unwrap();
        assert!(rule.on_boundary);
        let area = rule.integrate(|_| 1.0);
        assert!((area - PI * 0.16).abs() < 1e-6 * PI * 0.16, "{area}");
        // window spans the interior half-plane
        let inward = -spec.outward_normal(0.3);
        for &th in &rule.angles {
            assert!(Vec2::new(th.cos(), th.sin()).dot(&inward) >= -1e-15);
        }
    }

    #[test]
    fn star_rule_from_centre() {
        let spec = DomainSpec::star(Vec2::zeros(), vec![0.3, 0.0, 0.0, 0.06]).unwrap();
        let rule = polar_rule_for_target(&spec, Vec2::zeros(), 64, 16).unwrap();
        assert!((rule.integrate(|_| 1.0) - spec.area()).abs() < 1e-10);
    }

    #[test]
    fn outside_target_rejected() {
        assert!(polar_rule_for_target(&disk(), Vec2::new(0.5, 0.0), 16, 8).is_err());
    }
}
