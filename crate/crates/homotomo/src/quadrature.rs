//! Gauss–Legendre rules, composite panels and the periodic trapezoid rule.

use std::f64::consts::PI;
use std::sync::OnceLock;

/// Nodes and weights of an n-point Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre order must be positive");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, z);
                dp = d;
                let dz = p / d;
                z -= dz;
                if dz.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, z);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    /// Shared 16-point rule used for every composite panel.
    pub fn sixteen() -> &'static GaussLegendre {
        static RULE: OnceLock<GaussLegendre> = OnceLock::new();
        RULE.get_or_init(|| GaussLegendre::new(16))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut s = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            s += w * f(mid + half * x);
        }
        s * half
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite Gauss–Legendre nodes and weights over [a, b] with `panels` equal panels.
#[derive(Debug, Clone)]
pub struct CompositeRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl CompositeRule {
    pub fn new(a: f64, b: f64, panels: usize) -> Self {
        Self::with_rule(GaussLegendre::sixteen(), a, b, panels)
    }

    pub fn with_rule(rule: &GaussLegendre, a: f64, b: f64, panels: usize) -> Self {
        let panels = panels.max(1);
        let h = (b - a) / panels as f64;
        let mut nodes = Vec::with_capacity(panels * rule.nodes.len());
        let mut weights = Vec::with_capacity(panels * rule.nodes.len());
        for p in 0..panels {
            let lo = a + p as f64 * h;
            let mid = lo + 0.5 * h;
            for (x, w) in rule.nodes.iter().zip(&rule.weights) {
                nodes.push(mid + 0.5 * h * x);
                weights.push(0.5 * h * w);
            }
        }
        CompositeRule { nodes, weights }
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Composite 16-point Gauss–Legendre integral of `f` over [a, b].
pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    CompositeRule::new(a, b, panels).integrate(f)
}

/// Integral over [a, b] with panel doubling until two successive estimates agree.
pub fn integrate_adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    tol: f64,
) -> (f64, f64) {
    let mut panels = 4;
    let mut prev = integrate(&mut f, a, b, panels);
    loop {
        panels *= 2;
        let cur = integrate(&mut f, a, b, panels);
        let err = (cur - prev).abs();
        if err <= tol * cur.abs().max(1.0) || panels >= 1 << 14 {
            return (cur, err);
        }
        prev = cur;
    }
}

/// Uniform angles φ_k = φ₀ + kπ/n on a half period.
pub fn half_period_angles(n: usize, phi0: f64) -> Vec<f64> {
    (0..n).map(|k| phi0 + k as f64 * PI / n as f64).collect()
}

/// Periodic trapezoid rule over a half period: (1/π)∫₀^π f dφ from uniform samples.
pub fn periodic_mean<I: IntoIterator<Item = f64>>(samples: I) -> f64 {
    let mut n = 0usize;
    let mut s = 0.0;
    for v in samples {
        s += v;
        n += 1;
    }
    s / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_weights_sum_to_two() {
        for n in [1, 2, 5, 16, 33, 200] {
            let r = GaussLegendre::new(n);
            let s: f64 = r.weights.iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "n={n} sum={s}");
        }
    }

    #[test]
    fn sixteen_point_exact_for_degree_31() {
        let r = GaussLegendre::sixteen();
        let v = r.integrate(-1.0, 1.0, |x| x.powi(30) + x.powi(31));
        assert!((v - 2.0 / 31.0).abs() < 1e-14);
    }

    #[test]
    fn composite_gaussian() {
        let v = integrate(|x| (-x * x).exp(), -10.0, 10.0, 20);
        assert!((v - PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn nodes_are_sorted() {
        let r = GaussLegendre::new(16);
        assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn periodic_trapezoid_exact_for_trig_polynomials() {
        let phis = half_period_angles(7, 0.3);
        let m = periodic_mean(phis.iter().map(|p| (2.0 * p).cos().powi(2)));
        assert!((m - 0.5).abs() < 1e-15);
    }
}
