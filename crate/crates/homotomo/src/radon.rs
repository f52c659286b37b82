//! Radon/Fourier numerics on the phase plane: line integrals, the Fourier bridge,
//! filtered back-projection and the regularized singular functionals.

use crate::error::{Error, Result};
use crate::quadrature::{integrate, integrate_adaptive};
use crate::states::Tomogram;
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;
use std::sync::Arc;

pub const TAIL_EPS: f64 = 1e-10;
const MIN_FBP_ANGLES: usize = 64;
const PAD_FACTOR: usize = 4;
const TAPER_FRACTION: f64 = 0.05;
const PATCH: f64 = 1e-3;

type FieldFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// A real function on the phase plane, negligible outside a disc.
#[derive(Clone)]
pub struct PlaneField {
    f: FieldFn,
    center: (f64, f64),
    radius: f64,
    truncated: bool,
}

impl PlaneField {
    /// Analytic field; verifies |W| ≤ 1e-10 on the circle of the declared radius.
    pub fn new<F>(f: F, center: (f64, f64), radius: f64) -> Result<Self>
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::domain("field radius must be positive"));
        }
        let field = PlaneField { f: Arc::new(f), center, radius, truncated: false };
        let worst = (0..128)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / 128.0;
                (field.f)(center.0 + radius * t.cos(), center.1 + radius * t.sin()).abs()
            })
            .fold(0.0, f64::max);
        if worst > TAIL_EPS {
            return Err(Error::Window(format!(
                "field magnitude {worst:.3e} at declared radius {radius} exceeds {TAIL_EPS:e}"
            )));
        }
        Ok(field)
    }

    /// Field set to zero outside the disc; no tail check needed.
    pub fn truncated<F>(f: F, center: (f64, f64), radius: f64) -> Result<Self>
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::domain("field radius must be positive"));
        }
        Ok(PlaneField { f: Arc::new(f), center, radius, truncated: true })
    }

    /// Bilinear interpolation of samples `values[i * ps.len() + j]` at (qs[i], ps[j]).
    pub fn from_grid(qs: Vec<f64>, ps: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if qs.len() < 2 || ps.len() < 2 || values.len() != qs.len() * ps.len() {
            return Err(Error::domain("grid field needs at least 2×2 samples matching the axes"));
        }
        if qs.windows(2).any(|w| w[0] >= w[1]) || ps.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::domain("grid axes must be strictly increasing"));
        }
        let center = (0.5 * (qs[0] + qs[qs.len() - 1]), 0.5 * (ps[0] + ps[ps.len() - 1]));
        let radius = 0.5 * (qs[qs.len() - 1] - qs[0]).hypot(ps[ps.len() - 1] - ps[0]);
        let np = ps.len();
        let f = move |q: f64, p: f64| {
            if q < qs[0] || q > qs[qs.len() - 1] || p < ps[0] || p > ps[np - 1] {
                return 0.0;
            }
            let i = qs.partition_point(|&x| x <= q).clamp(1, qs.len() - 1) - 1;
            let j = ps.partition_point(|&x| x <= p).clamp(1, np - 1) - 1;
            let tq = (q - qs[i]) / (qs[i + 1] - qs[i]);
            let tp = (p - ps[j]) / (ps[j + 1] - ps[j]);
            let v = |a: usize, b: usize| values[a * np + b];
            (1.0 - tq) * ((1.0 - tp) * v(i, j) + tp * v(i, j + 1))
                + tq * ((1.0 - tp) * v(i + 1, j) + tp * v(i + 1, j + 1))
        };
        Ok(PlaneField { f: Arc::new(f), center, radius, truncated: true })
    }

    pub fn eval(&self, q: f64, p: f64) -> f64 {
        if self.truncated {
            let d = (q - self.center.0).hypot(p - self.center.1);
            if d > self.radius {
                return 0.0;
            }
        }
        (self.f)(q, p)
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn center(&self) -> (f64, f64) {
        self.center
    }

    /// ∫∫ W dq dp over the support disc, in polar panels.
    pub fn plane_integral(&self) -> f64 {
        let (q0, p0) = self.center;
        let r = self.radius;
        let panels = ((r / 0.25).ceil() as usize).max(8);
        integrate(
            |t| {
                integrate(|rho| rho * self.eval(q0 + rho * t.cos(), p0 + rho * t.sin()), 0.0, r, panels)
            },
            0.0,
            2.0 * PI,
            32,
        )
    }
}

/// W̆(u,v;c) = ∫∫ δ(c − uq − vp) W(q,p) dq dp, integrated along the line.
pub fn radon_numeric(f: &PlaneField, u: f64, v: f64, c: f64) -> Result<f64> {
    let r = u.hypot(v);
    if r == 0.0 {
        return Err(Error::domain("Radon transform needs (u, v) ≠ (0, 0)"));
    }
    let (nq, np) = (u / r, v / r);
    let (tq, tp) = (-np, nq);
    let s = c / r;
    let (q0, p0) = f.center;
    // Chord of the support disc cut by the line.
    let d = s - (nq * q0 + np * p0);
    let h2 = f.radius * f.radius - d * d;
    if h2 <= 0.0 {
        return Ok(0.0);
    }
    let h = h2.sqrt();
    let tc = tq * q0 + tp * p0;
    let panels = ((2.0 * h / 0.2).ceil() as usize).max(8);
    let val = integrate(|t| f.eval(s * nq + t * tq, s * np + t * tp), tc - h, tc + h, panels);
    Ok(val / r)
}

/// ∫ dc e^{−ibc} row(c) over `window`; equals W̃(u, v) when `row(c) = W̆(u/b, v/b; c)`.
pub fn fourier_from_radon<F: Fn(f64) -> f64>(row: F, b: f64, window: (f64, f64)) -> Result<Complex64> {
    if b == 0.0 || !b.is_finite() {
        return Err(Error::domain("Fourier bridge needs a nonzero finite b"));
    }
    let (lo, hi) = window;
    let panels = (((hi - lo) * b.abs().max(1.0) / 0.25).ceil() as usize).max(16);
    let re = integrate(|c| (b * c).cos() * row(c), lo, hi, panels);
    let im = integrate(|c| -(b * c).sin() * row(c), lo, hi, panels);
    Ok(Complex64::new(re, im))
}

/// Inverse bridge W̆(u,v;c) = (1/2π) ∫ db e^{ibc} W̃(bu, bv) over |b| ≤ `b_max`.
pub fn radon_from_fourier<F: Fn(f64, f64) -> Complex64>(ft: F, u: f64, v: f64, c: f64, b_max: f64) -> f64 {
    let panels = ((2.0 * b_max * c.abs().max(1.0) / 0.25).ceil() as usize).max(32);
    integrate(
        |b| (Complex64::from_polar(1.0, b * c) * ft(b * u, b * v)).re,
        -b_max,
        b_max,
        panels,
    ) / (2.0 * PI)
}

/// Filtered projections of a tomogram, ready for back-projection at arbitrary points.
pub struct FilteredBackProjection {
    phis: Vec<f64>,
    s0: f64,
    ds: f64,
    filtered: Vec<Vec<f64>>,
    warnings: Vec<String>,
}

impl FilteredBackProjection {
    pub fn new(t: &Tomogram) -> Result<Self> {
        if !t.has_uniform_angles() {
            return Err(Error::domain("back-projection needs uniformly spaced angles on [0, π)"));
        }
        let qs = t.qs();
        let n = qs.len();
        let ds = (qs[n - 1] - qs[0]) / (n - 1) as f64;
        if qs.windows(2).any(|w| ((w[1] - w[0]) - ds).abs() > 1e-9 * ds) {
            return Err(Error::domain("back-projection needs a uniform q grid"));
        }
        let mut warnings = Vec::new();
        if t.n_phi() < MIN_FBP_ANGLES {
            warnings.push(format!(
                "only {} angles; back-projection accuracy needs at least {MIN_FBP_ANGLES}",
                t.n_phi()
            ));
        }

        // Extended output grid of PAD_FACTOR·n points centred on the data.
        let m = PAD_FACTOR * n;
        let off = (m - n) / 2;
        let fft_len = (2 * m).next_power_of_two();
        let mut planner = FftPlanner::<f64>::new();
        let fwd = planner.plan_fft_forward(fft_len);
        let inv = planner.plan_fft_inverse(fft_len);

        // Band-limited ramp kernel, lags −(m−1)…(m−1), wrapped for circular convolution.
        let mut kernel = vec![Complex64::new(0.0, 0.0); fft_len];
        for lag in -(m as isize - 1)..=(m as isize - 1) {
            let k = lag.unsigned_abs();
            let h = if k == 0 {
                1.0 / (4.0 * ds * ds)
            } else if k % 2 == 1 {
                -1.0 / ((k * k) as f64 * PI * PI * ds * ds)
            } else {
                0.0
            };
            kernel[lag.rem_euclid(fft_len as isize) as usize] = Complex64::new(h, 0.0);
        }
        fwd.process(&mut kernel);

        let taper_len = ((n as f64 * TAPER_FRACTION).ceil() as usize).max(1);
        let taper = |j: usize| {
            let e = j.min(n - 1 - j);
            if e >= taper_len {
                1.0
            } else {
                0.5 * (1.0 - (PI * e as f64 / taper_len as f64).cos())
            }
        };

        let mut filtered = Vec::with_capacity(t.n_phi());
        for i in 0..t.n_phi() {
            let mut buf = vec![Complex64::new(0.0, 0.0); fft_len];
            for (j, &v) in t.row(i).iter().enumerate() {
                buf[off + j] = Complex64::new(v * taper(j), 0.0);
            }
            fwd.process(&mut buf);
            for (a, k) in buf.iter_mut().zip(&kernel) {
                *a *= k;
            }
            inv.process(&mut buf);
            let scale = ds / fft_len as f64;
            filtered.push(buf[..m].iter().map(|z| z.re * scale).collect());
        }
        Ok(FilteredBackProjection {
            phis: t.phis().to_vec(),
            s0: qs[0] - off as f64 * ds,
            ds,
            filtered,
            warnings,
        })
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    fn filtered_at(&self, i: usize, s: f64) -> f64 {
        let row = &self.filtered[i];
        let x = (s - self.s0) / self.ds;
        let j = x.floor() as isize;
        if j < 1 || j + 2 >= row.len() as isize {
            return 0.0;
        }
        let t = x - j as f64;
        let j = j as usize;
        let (y0, y1, y2, y3) = (row[j - 1], row[j], row[j + 1], row[j + 2]);
        // Cubic Lagrange through nodes −1, 0, 1, 2.
        let (a, b, c) = (t + 1.0, t - 1.0, t - 2.0);
        -y0 * t * b * c / 6.0 + y1 * a * b * c / 2.0 - y2 * a * t * c / 2.0 + y3 * a * t * b / 6.0
    }

    /// W(q, p) ≈ (π/N) Σ_i Q_i(q cos φ_i + p sin φ_i).
    pub fn eval(&self, q: f64, p: f64) -> f64 {
        let n = self.phis.len();
        let s: f64 = self
            .phis
            .iter()
            .enumerate()
            .map(|(i, &phi)| self.filtered_at(i, q * phi.cos() + p * phi.sin()))
            .sum();
        PI * s / n as f64
    }
}

/// One-shot filtered back-projection at a single point.
pub fn wigner_from_tomogram(t: &Tomogram, q: f64, p: f64) -> Result<f64> {
    Ok(FilteredBackProjection::new(t)?.eval(q, p))
}

/// Integral of an even function g over [0, ∞), with g ≈ a + b x² on [0, PATCH].
/// `slow_tail(X)` is ∫_X^∞ of a known slowly decaying part of g, added once the rest is negligible.
fn half_line_with_patch<G: Fn(f64) -> f64, S: Fn(f64) -> f64, T: Fn(f64) -> f64>(g: G, slow: S, slow_tail: T) -> f64 {
    let g1 = g(PATCH);
    let g2 = g(0.5 * PATCH);
    let b = (g1 - g2) / (0.75 * PATCH * PATCH);
    let a = g1 - b * PATCH * PATCH;
    let mut total = a * PATCH + b * PATCH.powi(3) / 3.0;
    let (head, _) = integrate_adaptive(&g, PATCH, 1.0, 1e-15);
    total += head;
    let mut lo: f64 = 1.0;
    loop {
        let hi = 2.0 * lo;
        let (block, _) = integrate_adaptive(&g, lo, hi, 1e-15);
        total += block;
        lo = hi;
        if g(hi).abs() * hi < 1e-18 {
            return total;
        }
        if (g(hi) - slow(hi)).abs() * hi < 1e-18 || lo >= 1e8 {
            return total + slow_tail(lo);
        }
    }
}

/// Principal value ∫₀^∞ (φ(x) − φ(−x))/x dx.
pub fn pv_functional<F: Fn(f64) -> f64>(phi: F) -> f64 {
    half_line_with_patch(|x| (phi(x) - phi(-x)) / x, |_| 0.0, |_| 0.0)
}

/// Canonical regularization of 1/x²: ∫₀^∞ (φ(x) + φ(−x) − 2φ(0))/x² dx.
pub fn reg_inv_square_functional<F: Fn(f64) -> f64>(phi: F) -> f64 {
    let p0 = phi(0.0);
    half_line_with_patch(
        |x| (phi(x) + phi(-x) - 2.0 * p0) / (x * x),
        |x| -2.0 * p0 / (x * x),
        |x| -2.0 * p0 / x,
    )
}
