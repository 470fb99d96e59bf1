//! Domain description, boundary discretization and domain quadrature.

mod curve;
mod grid;
mod polar;

pub use curve::BoundaryCurve;
pub use grid::DomainGrid;
pub use polar::{polar_rule_for_target, PolarNode, PolarRule, PolarSettings};

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{BdiesError, Result};
use crate::Vec2;

/// Samples used when a star-shaped domain needs a dense boundary sweep.
const STAR_SWEEP: usize = 1024;

/// A bounded, simply connected domain that is star-shaped with respect to
/// its centre.
#[derive(Debug, Clone, PartialEq)]
pub enum DomainSpec {
    Disk {
        center: Vec2,
        radius: f64,
    },
    /// Boundary `c + ρ(θ)(cos θ, sin θ)` with `ρ(θ) = Σ_k cosine[k] cos(kθ)`.
    Star {
        center: Vec2,
        cosine: Vec<f64>,
    },
}

/// Boundary point with its first two parameter derivatives.
#[derive(Debug, Clone, Copy)]
pub struct CurvePoint {
    pub x: Vec2,
    pub dx: Vec2,
    pub ddx: Vec2,
}

impl DomainSpec {
    pub fn disk(center: Vec2, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(BdiesError::InvalidDomain(format!(
                "disk radius must be positive, got {radius}"
            )));
        }
        Ok(Self::Disk { center, radius })
    }

    pub fn star(center: Vec2, cosine: Vec<f64>) -> Result<Self> {
        if cosine.is_empty() || cosine.iter().any(|c| !c.is_finite()) {
            return Err(BdiesError::InvalidDomain(
                "radial function needs finite cosine amplitudes".into(),
            ));
        }
        let spec = Self::Star { center, cosine };
        let min = (0..STAR_SWEEP * 4)
            .map(|m| spec.radial(2.0 * PI * m as f64 / (STAR_SWEEP * 4) as f64).0)
            .fold(f64::INFINITY, f64::min);
        if min <= 0.0 {
            return Err(BdiesError::InvalidDomain(format!(
                "radial function must be strictly positive, minimum sample is {min}"
            )));
        }
        Ok(spec)
    }

    pub fn center(&self) -> Vec2 {
        match self {
            Self::Disk { center, .. } | Self::Star { center, .. } => *center,
        }
    }

    pub fn is_disk(&self) -> bool {
        matches!(self, Self::Disk { .. })
    }

    /// `ρ(θ)`, `ρ'(θ)` and `ρ''(θ)`.
    pub fn radial(&self, theta: f64) -> (f64, f64, f64) {
        match self {
            Self::Disk { radius, .. } => (*radius, 0.0, 0.0),
            Self::Star { cosine, .. } => {
                let mut r = (0.0, 0.0, 0.0);
                for (k, &a) in cosine.iter().enumerate() {
                    let kf = k as f64;
                    let (s, c) = (kf * theta).sin_cos();
                    r.0 += a * c;
                    r.1 -= a * kf * s;
                    r.2 -= a * kf * kf * c;
                }
                r
            }
        }
    }

    pub fn max_radius(&self) -> f64 {
        match self {
            Self::Disk { radius, .. } => *radius,
            Self::Star { .. } => (0..STAR_SWEEP * 4)
                .map(|m| self.radial(2.0 * PI * m as f64 / (STAR_SWEEP * 4) as f64).0)
                .fold(0.0, f64::max),
        }
    }

    /// Boundary point at parameter `t` (the polar angle about the centre).
    pub fn boundary_point(&self, t: f64) -> CurvePoint {
        let (rho, drho, ddrho) = self.radial(t);
        let (s, c) = t.sin_cos();
        let u = Vec2::new(c, s);
        let v = Vec2::new(-s, c);
        CurvePoint {
            x: self.center() + rho * u,
            dx: drho * u + rho * v,
            ddx: (ddrho - rho) * u + 2.0 * drho * v,
        }
    }

    /// Negative inside, zero on the boundary, positive outside.
    pub fn level(&self, p: Vec2) -> f64 {
        let d = p - self.center();
        match self {
            Self::Disk { radius, .. } => d.norm() - radius,
            Self::Star { .. } => {
                let r = d.norm();
                if r == 0.0 {
                    return -self.radial(0.0).0;
                }
                r - self.radial(d.y.atan2(d.x)).0
            }
        }
    }

    /// Open-set membership.
    pub fn contains(&self, p: Vec2) -> bool {
        self.level(p) < 0.0
    }

    pub fn area(&self) -> f64 {
        match self {
            Self::Disk { radius, .. } => PI * radius * radius,
            // (1/2)∫ρ² dθ in closed form
            Self::Star { cosine, .. } => {
                let tail: f64 = cosine.iter().skip(1).map(|a| a * a).sum();
                PI * (cosine[0] * cosine[0] + 0.5 * tail)
            }
        }
    }

    /// Exact for disks; for star shapes the maximum distance over a dense
    /// boundary sample.
    pub fn diameter(&self) -> f64 {
        match self {
            Self::Disk { radius, .. } => 2.0 * radius,
            Self::Star { .. } => {
                let pts: Vec<Vec2> = (0..STAR_SWEEP)
                    .map(|m| self.boundary_point(2.0 * PI * m as f64 / STAR_SWEEP as f64).x)
                    .collect();
                let mut best: f64 = 0.0;
                for (i, p) in pts.iter().enumerate() {
                    for q in &pts[i + 1..] {
                        best = best.max((p - q).norm_squared());
                    }
                }
                best.sqrt()
            }
        }
    }

    /// Parameter of the nearest boundary point and the distance to it.
    pub fn nearest_boundary(&self, p: Vec2) -> (f64, f64) {
        match self {
            Self::Disk { center, radius } => {
                let d = p - center;
                let t = if d.norm() == 0.0 { 0.0 } else { d.y.atan2(d.x) };
                (t.rem_euclid(2.0 * PI), (d.norm() - radius).abs())
            }
            Self::Star { .. } => {
                let dist2 = |t: f64| (self.boundary_point(t).x - p).norm_squared();
                let h = 2.0 * PI / STAR_SWEEP as f64;
                let (mut best_t, mut best) = (0.0, f64::INFINITY);
                for m in 0..STAR_SWEEP {
                    let t = m as f64 * h;
                    let d = dist2(t);
                    if d < best {
                        best = d;
                        best_t = t;
                    }
                }
                // golden-section refinement around the best sample
                let g = 0.5 * (5f64.sqrt() - 1.0);
                let (mut a, mut b) = (best_t - h, best_t + h);
                let mut c = b - g * (b - a);
                let mut d = a + g * (b - a);
                let (mut fc, mut fd) = (dist2(c), dist2(d));
                for _ in 0..80 {
                    if fc < fd {
                        b = d;
                        d = c;
                        fd = fc;
                        c = b - g * (b - a);
                        fc = dist2(c);
                    } else {
                        a = c;
                        c = d;
                        fc = fd;
                        d = a + g * (b - a);
                        fd = dist2(d);
                    }
                }
                let t = 0.5 * (a + b);
                (t.rem_euclid(2.0 * PI), dist2(t).min(best).sqrt())
            }
        }
    }

    pub fn distance_to_boundary(&self, p: Vec2) -> f64 {
        self.nearest_boundary(p).1
    }

    /// Outward unit normal at boundary parameter `t`.
    pub fn outward_normal(&self, t: f64) -> Vec2 {
        let dx = self.boundary_point(t).dx;
        Vec2::new(dx.y, -dx.x) / dx.norm()
    }

    /// Distance from `y` to the boundary along the unit direction `e`.
    ///
    /// `from_boundary` marks targets on the boundary itself, where the root
    /// at `r = 0` is skipped; directions that leave the domain immediately
    /// get extent zero. Fails when the ray re-enters the domain after its
    /// first exit, i.e. when part of the domain is not visible from `y`.
    pub fn ray_extent(&self, y: Vec2, e: Vec2, from_boundary: bool) -> Result<f64> {
        match self {
            Self::Disk { center, radius } => {
                let p = y - center;
                let b = p.dot(&e);
                if from_boundary {
                    return Ok((-2.0 * b).max(0.0));
                }
                let c = p.norm_squared() - radius * radius;
                let disc = (b * b - c).max(0.0);
                // cancellation-free form of -b + sqrt(b² - c)
                Ok(if b > 0.0 {
                    -c / (b + disc.sqrt())
                } else {
                    -b + disc.sqrt()
                })
            }
            Self::Star { .. } => self.ray_extent_star(y, e, from_boundary),
        }
    }

    fn ray_extent_star(&self, y: Vec2, e: Vec2, from_boundary: bool) -> Result<f64> {
        const SCAN: usize = 512;
        let h = |r: f64| self.level(y + r * e);
        let reach = 2.0 * self.max_radius() + (y - self.center()).norm();
        let step = reach / SCAN as f64;

        let mut lo = 0.0;
        let mut hi = None;
        if from_boundary {
            // walk out geometrically until one scan step, looking for the inside
            let mut r = 1e-13 * reach;
            let mut seen_inside = false;
            while r < step {
                if h(r) < 0.0 {
                    seen_inside = true;
                    lo = r;
                } else if seen_inside {
                    hi = Some(r);
                    break;
                }
                r *= 2.0;
            }
            if !seen_inside && h(step) >= 0.0 {
                return Ok(0.0);
            }
        } else if h(0.0) >= 0.0 {
            return Err(BdiesError::TargetOutside([y.x, y.y]));
        }
        if hi.is_none() {
            let mut r = lo.max(0.0);
            while r < reach {
                let next = (r + step).min(reach);
                if h(next) >= 0.0 {
                    lo = r;
                    hi = Some(next);
                    break;
                }
                r = next;
            }
        }
        let Some(mut hi) = hi else {
            return Err(BdiesError::PolarRule("ray never leaves the domain".into()));
        };
        while hi - lo > 1e-12 {
            let mid = 0.5 * (lo + hi);
            if h(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let extent = 0.5 * (lo + hi);
        let mut r = extent + step;
        while r < reach {
            if h(r) < -1e-12 {
                return Err(BdiesError::PolarRule(format!(
                    "ray from ({:.6}, {:.6}) re-enters the domain; target does not see the whole domain",
                    y.x, y.y
                )));
            }
            r += step;
        }
        Ok(extent)
    }
}

/// Node counts of one discretization level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Resolution {
    pub n_boundary: usize,
    pub n_t: usize,
    pub n_s: usize,
}

impl Resolution {
    pub const fn new(n_boundary: usize, n_t: usize, n_s: usize) -> Self {
        Self { n_boundary, n_t, n_s }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_boundary < 8 || self.n_boundary % 2 != 0 {
            return Err(BdiesError::InvalidResolution(format!(
                "n_boundary must be even and at least 8, got {}",
                self.n_boundary
            )));
        }
        if self.n_t < 8 || self.n_t % 2 != 0 {
            return Err(BdiesError::InvalidResolution(format!(
                "n_t must be even and at least 8, got {}",
                self.n_t
            )));
        }
        if self.n_s < 4 {
            return Err(BdiesError::InvalidResolution(format!(
                "n_s must be at least 4, got {}",
                self.n_s
            )));
        }
        Ok(())
    }
}

impl std::fmt::Display for Resolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}x{}", self.n_boundary, self.n_t, self.n_s)
    }
}

/// Everything geometric a solve needs at one resolution.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub spec: DomainSpec,
    pub resolution: Resolution,
    pub curve: BoundaryCurve,
    pub grid: Arc<DomainGrid>,
    pub polar: PolarSettings,
}

impl Discretization {
    pub fn new(spec: DomainSpec, resolution: Resolution) -> Result<Self> {
        resolution.validate()?;
        let curve = BoundaryCurve::new(&spec, resolution.n_boundary)?;
        let grid = Arc::new(DomainGrid::new(&spec, resolution.n_t, resolution.n_s)?);
        let polar = PolarSettings::for_grid(&spec, resolution.n_t, resolution.n_s);
        Ok(Self {
            spec,
            resolution,
            curve,
            grid,
            polar,
        })
    }

    pub fn diameter(&self) -> f64 {
        self.polar.diameter
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star() -> DomainSpec {
        DomainSpec::star(Vec2::zeros(), vec![0.3, 0.0, 0.0, 0.06]).unwrap()
    }

    #[test]
    fn disk_queries() {
        let disk = DomainSpec::disk(Vec2::zeros(), 0.4).unwrap();
        assert_eq!(disk.diameter(), 0.8);
        assert!((disk.area() - 0.502655).abs() < 1e-6);
        assert!(disk.contains(Vec2::new(0.39, 0.0)));
        assert!(!disk.contains(Vec2::new(0.41, 0.0)));
    }

    #[test]
    fn star_diameter_below_twice_max_radius() {
        let d = star().diameter();
        assert!(d < 0.72 && d > 0.6, "diameter {d}");
        // dense independent sweep of pairs of boundary angles
        let s = star();
        let mut best: f64 = 0.0;
        for i in 0..720 {
            let p = s.boundary_point(i as f64 * PI / 360.0).x;
            for j in 0..720 {
                best = best.max((p - s.boundary_point(j as f64 * PI / 360.0).x).norm());
            }
        }
        assert!((d - best).abs() < 1e-4);
    }

    #[test]
    fn star_area_matches_shoelace() {
        let s = star();
        let n = 4096;
        let pts: Vec<Vec2> = (0..n)
            .map(|m| s.boundary_point(2.0 * PI * m as f64 / n as f64).x)
            .collect();
        let shoelace: f64 = (0..n)
            .map(|i| {
                let (p, q) = (pts[i], pts[(i + 1) % n]);
                0.5 * (p.x * q.y - q.x * p.y)
            })
            .sum();
        assert!((shoelace - s.area()).abs() < 1e-5);
    }

    #[test]
    fn rejects_bad_domains() {
        assert!(DomainSpec::disk(Vec2::zeros(), 0.0).is_err());
        assert!(DomainSpec::star(Vec2::zeros(), vec![0.1, 0.2]).is_err());
        assert!(DomainSpec::star(Vec2::zeros(), vec![]).is_err());
    }

    #[test]
    fn ray_extent_on_disk_and_star_agree_for_circle() {
        let disk = DomainSpec::disk(Vec2::new(0.1, -0.2), 0.35).unwrap();
        let circle_star = DomainSpec::star(Vec2::new(0.1, -0.2), vec![0.35]).unwrap();
        let y = Vec2::new(0.2, -0.1);
        for k in 0..12 {
            let th = k as f64 * 0.5;
            let e = Vec2::new(th.cos(), th.sin());
            let a = disk.ray_extent(y, e, false).unwrap();
            let b = circle_star.ray_extent(y, e, false).unwrap();
            assert!((a - b).abs() < 1e-11, "{a} vs {b}");
        }
        // boundary target
        let t = 0.7;
        let x = disk.boundary_point(t).x;
        let inward = -disk.outward_normal(t);
        let a = disk.ray_extent(x, inward, true).unwrap();
        let b = circle_star.ray_extent(x, inward, true).unwrap();
        assert!((a - 0.7).abs() < 1e-12 && (b - 0.7).abs() < 1e-11);
    }

    #[test]
    fn nonconvex_star_visibility_failure_is_reported() {
        let s = DomainSpec::star(Vec2::zeros(), vec![0.3, 0.0, 0.0, 0.12]).unwrap();
        // target near a lobe tip, looking across the concave part
        let y = s.boundary_point(0.0).x * 0.97;
        let mut failed = false;
        for k in 0..360 {
            let th = k as f64 * PI / 180.0;
            if s.ray_extent(y, Vec2::new(th.cos(), th.sin()), false).is_err() {
                failed = true;
            }
        }
        assert!(failed);
        // the centre sees everything
        for k in 0..360 {
            let th = k as f64 * PI / 180.0;
            let l = s
                .ray_extent(Vec2::zeros(), Vec2::new(th.cos(), th.sin()), false)
                .unwrap();
            assert!((l - s.radial(th).0).abs() < 1e-11);
        }
    }

    #[test]
    fn nearest_boundary_on_star() {
        let s = star();
        let t0 = 1.1;
        let b = s.boundary_point(t0);
        let p = b.x - 0.02 * s.outward_normal(t0);
        let (t, d) = s.nearest_boundary(p);
        assert!((d - 0.02).abs() < 1e-9, "{d}");
        assert!((t - t0).abs() < 1e-6);
    }
}
