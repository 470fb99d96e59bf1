//! One-dimensional rules shared by the boundary and volume discretizations.

use std::f64::consts::PI;

use gauss_quad::legendre::GaussLegendre;

/// Gauss-Legendre nodes and weights on `[-1, 1]`, nodes ascending.
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    /// Panics if `n < 2`.
    pub fn legendre(n: usize) -> Self {
        let mut pairs = GaussLegendre::new(n)
            .expect("Gauss-Legendre rule needs at least two nodes")
            .into_node_weight_pairs();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (nodes, weights) = pairs.into_iter().unzip();
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped affinely to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }
}

/// Weights of the product rule for `∫_0^{2π} log(4 sin²((t - τ)/2)) g(τ) dτ`
/// on `n` equispaced nodes, indexed by the node offset `(i - j) mod n`.
///
/// Exact for trigonometric polynomials `g` of degree below `n/2`.
pub fn log_sine_weights(n: usize) -> Vec<f64> {
    assert!(n % 2 == 0, "log-sine product rule needs an even node count");
    let half = n / 2;
    let nf = n as f64;
    (0..n)
        .map(|d| {
            let s = 2.0 * PI * d as f64 / nf;
            let mut acc = 0.0;
            for m in 1..half {
                acc += (m as f64 * s).cos() / m as f64;
            }
            -4.0 * PI / nf * acc - 4.0 * PI / (nf * nf) * (half as f64 * s).cos()
        })
        .collect()
}

/// Periodic interpolation on the `n` equispaced nodes `2πj/n` (`n` even).
///
/// Cosines and sines of the half node angles are cached so that a weight
/// vector costs two trigonometric evaluations plus `n` divisions.
#[derive(Debug, Clone)]
pub struct TrigInterpolator {
    n: usize,
    cos_half: Vec<f64>,
    sin_half: Vec<f64>,
}

impl TrigInterpolator {
    pub fn new(n: usize) -> Self {
        assert!(
            n % 2 == 0 && n >= 2,
            "trigonometric interpolation needs an even node count"
        );
        let (cos_half, sin_half) = (0..n)
            .map(|j| {
                let b = PI * j as f64 / n as f64;
                (b.cos(), b.sin())
            })
            .unzip();
        Self { n, cos_half, sin_half }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Cardinal function values `L_j(t)` written into `out`.
    ///
    /// `L_j(t) = sin(n (t - t_j)/2) cot((t - t_j)/2) / n`, with the Nyquist
    /// mode split evenly so the interpolant of real data is real. Evaluated
    /// in barycentric form, `(-1)^j cot((t - t_j)/2)` normalized by its sum,
    /// which stays accurate when `t` is within rounding of a node.
    pub fn weights_into(&self, t: f64, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.n);
        let half = 0.5 * t;
        let (sa, ca) = half.sin_cos();
        let mut total = 0.0;
        for j in 0..self.n {
            // sin and cos of (t - t_j) / 2
            let sd = sa * self.cos_half[j] - ca * self.sin_half[j];
            let cd = ca * self.cos_half[j] + sa * self.sin_half[j];
            if sd == 0.0 {
                out.iter_mut().for_each(|w| *w = 0.0);
                out[j] = 1.0;
                return;
            }
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            out[j] = sign * cd / sd;
            total += out[j];
        }
        out.iter_mut().for_each(|w| *w /= total);
    }

    pub fn weights(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        self.weights_into(t, &mut out);
        out
    }
}

/// Barycentric Lagrange interpolation on an arbitrary node set.
#[derive(Debug, Clone)]
pub struct Barycentric {
    nodes: Vec<f64>,
    bary: Vec<f64>,
}

impl Barycentric {
    pub fn new(nodes: &[f64]) -> Self {
        let n = nodes.len();
        let scale = {
            let (lo, hi) = nodes.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
                (lo.min(x), hi.max(x))
            });
            // rescale the products to keep them in range for larger node counts
            4.0 / (hi - lo).max(f64::MIN_POSITIVE)
        };
        let bary = (0..n)
            .map(|k| {
                let prod: f64 = (0..n)
                    .filter(|&m| m != k)
                    .map(|m| scale * (nodes[k] - nodes[m]))
                    .product();
                1.0 / prod
            })
            .collect();
        Self {
            nodes: nodes.to_vec(),
            bary,
        }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights_into(&self, s: f64, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.nodes.len());
        let mut total = 0.0;
        for (k, (&x, &b)) in self.nodes.iter().zip(&self.bary).enumerate() {
            let d = s - x;
            if d == 0.0 {
                out.iter_mut().for_each(|w| *w = 0.0);
                out[k] = 1.0;
                return;
            }
            out[k] = b / d;
            total += out[k];
        }
        out.iter_mut().for_each(|w| *w /= total);
    }

    pub fn weights(&self, s: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.nodes.len()];
        self.weights_into(s, &mut out);
        out
    }
}

/// Map `[-1, 1] -> [-1, 1]` whose derivative `15 (1 - τ²)² / 8` vanishes
/// quadratically at both ends. Returns the mapped point and the derivative.
pub fn endpoint_clustering(tau: f64) -> (f64, f64) {
    let t2 = tau * tau;
    let value = tau * (15.0 - 10.0 * t2 + 3.0 * t2 * t2) / 8.0;
    let deriv = 15.0 * (1.0 - t2) * (1.0 - t2) / 8.0;
    (value, deriv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_rule_integrates_polynomials() {
        let rule = GaussRule::legendre(6);
        assert!(rule.nodes.windows(2).all(|w| w[0] < w[1]));
        let integral: f64 = rule.mapped(0.0, 2.0).map(|(x, w)| w * x.powi(11)).sum();
        assert!((integral - 2f64.powi(12) / 12.0).abs() < 1e-10);
    }

    #[test]
    fn log_sine_rule_reproduces_fourier_symbol() {
        // ∫ log(4 sin²(s/2)) cos(m s) ds = -2π/m, and 0 for m = 0
        let n = 32;
        let w = log_sine_weights(n);
        for m in 0..n / 2 {
            let value: f64 = (0..n)
                .map(|d| w[d] * (m as f64 * 2.0 * PI * d as f64 / n as f64).cos())
                .sum();
            let expected = if m == 0 { 0.0 } else { -2.0 * PI / m as f64 };
            assert!((value - expected).abs() < 1e-13, "m = {m}: {value} vs {expected}");
        }
    }

    #[test]
    fn trig_interpolation_is_exact_below_nyquist() {
        let n = 16;
        let interp = TrigInterpolator::new(n);
        let f = |t: f64| 0.3 + (3.0 * t).cos() - 0.5 * (7.0 * t).sin();
        let data: Vec<f64> = (0..n).map(|j| f(2.0 * PI * j as f64 / n as f64)).collect();
        for &t in &[0.1, 1.234, 3.0, 5.9, 2.0 * PI * 3.0 / 16.0] {
            let value: f64 = interp.weights(t).iter().zip(&data).map(|(w, d)| w * d).sum();
            assert!((value - f(t)).abs() < 1e-13);
        }
    }

    #[test]
    fn barycentric_reproduces_polynomials() {
        let rule = GaussRule::legendre(10);
        let nodes: Vec<f64> = rule.mapped(0.0, 1.0).map(|(x, _)| x).collect();
        let bary = Barycentric::new(&nodes);
        let p = |s: f64| 1.0 - 2.0 * s + s.powi(5) - 0.25 * s.powi(9);
        let data: Vec<f64> = nodes.iter().map(|&s| p(s)).collect();
        for &s in &[0.0, 0.3, 0.999, 1.0] {
            let value: f64 = bary.weights(s).iter().zip(&data).map(|(w, d)| w * d).sum();
            assert!((value - p(s)).abs() < 1e-12);
        }
    }

    #[test]
    fn clustering_map_covers_interval() {
        assert_eq!(endpoint_clustering(1.0), (1.0, 0.0));
        assert_eq!(endpoint_clustering(-1.0), (-1.0, 0.0));
        let rule = GaussRule::legendre(20);
        let integral: f64 = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(&t, &w)| w * endpoint_clustering(t).1)
            .sum();
        assert!((integral - 2.0).abs() < 1e-13);
    }
}
