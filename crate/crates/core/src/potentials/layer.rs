//! Single and double layer potentials away from the boundary.
//!
//! Off the boundary the kernels are smooth and the periodic trapezoid rule
//! converges geometrically, at a rate set by the ratio of the target
//! distance to the node spacing. [`LayerEvaluator`] keeps that ratio fixed by
//! integrating on a finer copy of the boundary, with the density replaced
//! by its trigonometric interpolant, so targets close to `S` are handled as
//! accurately as distant ones. The result is still linear in the nodal
//! density and is returned as a row of coefficients.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex};

use super::{check_len, BoundaryDensity, ParametrixFamily};
use crate::coefficient::Coefficient;
use crate::error::{BdiesError, Result};
use crate::geometry::BoundaryCurve;
use crate::Vec2;

/// Fine nodes per `2π d / h`, for a target at distance `d` and node spacing
/// `h`; the trapezoid error then behaves like `exp(-SAMPLING)`.
const SAMPLING: f64 = 28.0;
const MAX_UPSAMPLING: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LayerKind {
    /// `Vρ(y) = -∫_S P(x,y) ρ(x) dS(x)`.
    Single,
    /// `Wτ(y) = -∫_S T_x P(x,y) τ(x) dS(x)`.
    Double,
}

struct FineLevel {
    points: Vec<Vec2>,
    normals: Vec<Vec2>,
    weights: Vec<f64>,
    a: Vec<f64>,
    dn_ln_a: Vec<f64>,
    /// Coarse cardinal function `L_0` at the fine offsets `2πf/N`.
    cardinal: Vec<f64>,
}

pub struct LayerEvaluator<'a> {
    curve: &'a BoundaryCurve,
    coeff: &'a Coefficient,
    family: ParametrixFamily,
    levels: Mutex<HashMap<usize, Arc<FineLevel>>>,
}

impl<'a> LayerEvaluator<'a> {
    pub fn new(curve: &'a BoundaryCurve, coeff: &'a Coefficient, family: ParametrixFamily) -> Self {
        Self {
            curve,
            coeff,
            family,
            levels: Mutex::new(HashMap::new()),
        }
    }

    pub fn curve(&self) -> &BoundaryCurve {
        self.curve
    }

    /// Smallest target distance the evaluator accepts.
    pub fn min_distance(&self) -> f64 {
        SAMPLING * self.curve.spacing() / (2.0 * PI * MAX_UPSAMPLING as f64)
    }

    /// Upsampling factor needed for a target.
    pub fn upsampling(&self, y: Vec2) -> Result<usize> {
        let d = self.curve.spec().distance_to_boundary(y);
        let threshold = self.min_distance();
        if !(d >= threshold) {
            return Err(BdiesError::TargetTooClose { distance: d, threshold });
        }
        let m = (SAMPLING * self.curve.spacing() / (2.0 * PI * d)).ceil() as usize;
        Ok(m.max(1))
    }

    fn level(&self, m: usize) -> Arc<FineLevel> {
        if let Some(l) = self.levels.lock().expect("level cache").get(&m) {
            return l.clone();
        }
        let level = Arc::new(self.build_level(m));
        self.levels
            .lock()
            .expect("level cache")
            .entry(m)
            .or_insert(level)
            .clone()
    }

    fn build_level(&self, m: usize) -> FineLevel {
        let n = self.curve.len();
        let big = n * m;
        let h = 2.0 * PI / big as f64;
        let mut level = FineLevel {
            points: Vec::with_capacity(big),
            normals: Vec::with_capacity(big),
            weights: Vec::with_capacity(big),
            a: Vec::with_capacity(big),
            dn_ln_a: Vec::with_capacity(big),
            cardinal: Vec::with_capacity(big),
        };
        let nf = n as f64;
        for f in 0..big {
            let t = h * f as f64;
            let p = self.curve.eval(t);
            let speed = p.dx.norm();
            let normal = Vec2::new(p.dx.y, -p.dx.x) / speed;
            level.points.push(p.x);
            level.normals.push(normal);
            level.weights.push(speed * h);
            level.a.push(self.coeff.a(p.x));
            level.dn_ln_a.push(self.coeff.normal_log_derivative(p.x, normal));
            level.cardinal.push(if f % m == 0 {
                if f == 0 {
                    1.0
                } else {
                    0.0
                }
            } else {
                (0.5 * nf * t).sin() / ((0.5 * t).tan() * nf)
            });
        }
        level
    }

    /// Folds fine-node weights `g_f` back onto the coarse nodes.
    fn restrict(&self, m: usize, level: &FineLevel, g: &[f64]) -> Vec<f64> {
        let n = self.curve.len();
        if m == 1 {
            return g.to_vec();
        }
        let big = n * m;
        (0..n)
            .map(|j| {
                let shift = m * j;
                let mut acc = 0.0;
                for (f, gf) in g.iter().enumerate() {
                    acc += gf * level.cardinal[(f + big - shift) % big];
                }
                acc
            })
            .collect()
    }

    /// Coefficients `c` with `V ρ(y) = c · ρ` (or `W`).
    pub fn row(&self, kind: LayerKind, y: Vec2) -> Result<Vec<f64>> {
        let m = self.upsampling(y)?;
        let level = self.level(m);
        let ay = self.coeff.a(y);
        let g: Vec<f64> = (0..level.points.len())
            .map(|f| {
                let d = level.points[f] - y;
                let r2 = d.norm_squared();
                let log_term = 0.25 * r2.ln() / PI;
                let dn = d.dot(&level.normals[f]) / (2.0 * PI * r2);
                let k = match (kind, self.family) {
                    (LayerKind::Single, ParametrixFamily::AtX) => -log_term / level.a[f],
                    (LayerKind::Single, ParametrixFamily::AtY) => -log_term / ay,
                    (LayerKind::Double, ParametrixFamily::AtX) => -dn + log_term * level.dn_ln_a[f],
                    (LayerKind::Double, ParametrixFamily::AtY) => -dn * level.a[f] / ay,
                };
                k * level.weights[f]
            })
            .collect();
        Ok(self.restrict(m, &level, &g))
    }

    /// Coefficients of the two components of `∇_y Vρ(y)`.
    pub fn gradient_rows(&self, y: Vec2) -> Result<[Vec<f64>; 2]> {
        let m = self.upsampling(y)?;
        let level = self.level(m);
        let ay = self.coeff.a(y);
        let grad_ay = self.coeff.grad_a(y);
        let size = level.points.len();
        let mut g0 = Vec::with_capacity(size);
        let mut g1 = Vec::with_capacity(size);
        for f in 0..size {
            let d = level.points[f] - y;
            let r2 = d.norm_squared();
            let v = match self.family {
                ParametrixFamily::AtX => d / (2.0 * PI * r2 * level.a[f]),
                ParametrixFamily::AtY => d / (2.0 * PI * r2 * ay) + grad_ay * (0.25 * r2.ln() / (PI * ay * ay)),
            };
            g0.push(v.x * level.weights[f]);
            g1.push(v.y * level.weights[f]);
        }
        Ok([self.restrict(m, &level, &g0), self.restrict(m, &level, &g1)])
    }

    pub fn eval(&self, kind: LayerKind, density: &BoundaryDensity, y: Vec2) -> Result<f64> {
        check_len(self.curve, density.len())?;
        Ok(dot(&self.row(kind, y)?, &density.values))
    }

    pub fn gradient(&self, density: &BoundaryDensity, y: Vec2) -> Result<Vec2> {
        check_len(self.curve, density.len())?;
        let [r0, r1] = self.gradient_rows(y)?;
        Ok(Vec2::new(dot(&r0, &density.values), dot(&r1, &density.values)))
    }

    /// `a(y) ∇Vρ(y) · n`, the conormal derivative of the single layer along
    /// a given unit vector.
    pub fn conormal_single(&self, density: &BoundaryDensity, y: Vec2, normal: Vec2) -> Result<f64> {
        Ok(self.coeff.a(y) * self.gradient(density, y)?.dot(&normal))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Plain trapezoid evaluation of `V` or `W` at targets at least two node
/// spacings away from the boundary, on either side of it.
pub fn layer_eval_offboundary(
    curve: &BoundaryCurve,
    coeff: &Coefficient,
    family: ParametrixFamily,
    kind: LayerKind,
    density: &BoundaryDensity,
    targets: &[Vec2],
) -> Result<Vec<f64>> {
    check_len(curve, density.len())?;
    let threshold = 2.0 * curve.spacing();
    let eval = LayerEvaluator::new(curve, coeff, family);
    let level = eval.level(1);
    targets
        .iter()
        .map(|&y| {
            let d = curve.spec().distance_to_boundary(y);
            if !(d >= threshold) {
                return Err(BdiesError::TargetTooClose { distance: d, threshold });
            }
            let ay = coeff.a(y);
            let mut acc = 0.0;
            for (f, &rho) in density.values.iter().enumerate() {
                let d = level.points[f] - y;
                let r2 = d.norm_squared();
                let log_term = 0.25 * r2.ln() / PI;
                let k = match (kind, family) {
                    (LayerKind::Single, ParametrixFamily::AtX) => -log_term / level.a[f],
                    (LayerKind::Single, ParametrixFamily::AtY) => -log_term / ay,
                    (LayerKind::Double, ParametrixFamily::AtX) => {
                        -d.dot(&level.normals[f]) / (2.0 * PI * r2) + log_term * level.dn_ln_a[f]
                    }
                    (LayerKind::Double, ParametrixFamily::AtY) => {
                        -d.dot(&level.normals[f]) / (2.0 * PI * r2) * level.a[f] / ay
                    }
                };
                acc += k * level.weights[f] * rho;
            }
            Ok(acc)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DomainSpec;

    fn circle(n: usize) -> BoundaryCurve {
        BoundaryCurve::new(&DomainSpec::disk(Vec2::zeros(), 0.4).unwrap(), n).unwrap()
    }

    #[test]
    fn single_layer_at_centre() {
        let c = circle(64);
        let one = Coefficient::constant(1.0).unwrap();
        let ones = BoundaryDensity::new(vec![1.0; 64]);
        let v = layer_eval_offboundary(
            &c,
            &one,
            ParametrixFamily::AtX,
            LayerKind::Single,
            &ones,
            &[Vec2::zeros()],
        )
        .unwrap();
        assert!((v[0] - 0.366516).abs() < 1e-6);
        assert!((v[0] + 0.4 * 0.4f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn gauss_identity_off_boundary() {
        let c = circle(128);
        let one = Coefficient::constant(1.0).unwrap();
        let ones = BoundaryDensity::new(vec![1.0; 128]);
        let targets = [Vec2::new(0.1, -0.05), Vec2::new(0.9, 0.3), Vec2::new(-0.2, 0.25)];
        let w = layer_eval_offboundary(&c, &one, ParametrixFamily::AtX, LayerKind::Double, &ones, &targets).unwrap();
        assert!((w[0] + 1.0).abs() < 1e-12);
        assert!(w[1].abs() < 1e-12);
        assert!((w[2] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn close_targets() {
        let c = circle(64);
        let one = Coefficient::constant(1.0).unwrap();
        let ones = BoundaryDensity::new(vec![1.0; 64]);
        let near = Vec2::new(0.395, 0.0);
        assert!(matches!(
            layer_eval_offboundary(&c, &one, ParametrixFamily::AtX, LayerKind::Double, &ones, &[near]),
            Err(BdiesError::TargetTooClose { .. })
        ));
        let ev = LayerEvaluator::new(&c, &one, ParametrixFamily::AtX);
        for d in [5e-3, 1e-3, 4e-4] {
            let y = Vec2::new(0.4 - d, 0.0);
            assert!(
                (ev.eval(LayerKind::Double, &ones, y).unwrap() + 1.0).abs() < 1e-11,
                "d = {d}"
            );
            let v = ev.eval(LayerKind::Single, &ones, y).unwrap();
            assert!((v - 0.366516).abs() < 1e-6);
        }
        assert!(ev.row(LayerKind::Single, Vec2::new(0.4, 0.0)).is_err());
        assert!(ev.row(LayerKind::Single, Vec2::new(0.4 - 1e-4, 0.0)).is_err());
    }

    #[test]
    fn near_single_layer_of_cosine() {
        // inside the circle, V_Δ cos t = (|y|/2) cos θ_y = y₁/2
        let c = circle(64);
        let one = Coefficient::constant(1.0).unwrap();
        let ev = LayerEvaluator::new(&c, &one, ParametrixFamily::AtX);
        let rho = BoundaryDensity::from_param(&c, f64::cos);
        for (rad, th) in [(0.399, 0.3), (0.39, 1.0), (0.2, 2.0)] {
            let y = Vec2::new(rad * f64::cos(th), rad * f64::sin(th));
            let v = ev.eval(LayerKind::Single, &rho, y).unwrap();
            assert!((v - 0.5 * rad * th.cos()).abs() < 1e-12);
            let g = ev.gradient(&rho, y).unwrap();
            assert!((g - Vec2::new(0.5, 0.0)).norm() < 1e-11);
        }
    }
}
