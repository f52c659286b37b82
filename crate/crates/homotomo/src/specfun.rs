//! Hermite polynomials and functions, the nonnormalizable oscillator solutions g_n,
//! the Dawson integral, the Mehler kernel and associated Laguerre polynomials.
//!
//! Internally the eigenfunctions are carried in exponent-free scaled form
//! ĥ_n = h_n e^{x²/2} and Ĝ_n = g_n e^{−x²/2}, so that products h_m g_n never
//! touch the exponential.

use crate::error::{Error, Result};
use num_complex::Complex64;
pub use crate::dd::DD;
use crate::dd::{dd, div, sqrt_int, to_f64};

/// π^{-1/4}
pub const PI_M_QUARTER: f64 = 0.751_125_544_464_942_5;
/// π^{1/4}
pub const PI_QUARTER: f64 = 1.331_335_363_800_389_7;

const LN_MAX: f64 = 709.0;

/// Relative accuracy demanded of g_n before a range error is raised.
pub const G_REL_TOL: f64 = 1e-9;

fn dd_pi_quarter() -> DD {
    crate::dd::pi_quarter()
}

// ---------------------------------------------------------------------------
// Grids

/// Ordered abscissas in dimensionless units with optional matched quadrature weights.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalGrid {
    points: Vec<f64>,
    weights: Option<Vec<f64>>,
}

impl EvalGrid {
    pub fn new(points: Vec<f64>, weights: Option<Vec<f64>>) -> Result<Self> {
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::domain("grid points must be finite"));
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::domain("grid points must be strictly increasing"));
        }
        if let Some(w) = &weights {
            if w.len() != points.len() {
                return Err(Error::domain("weights and points differ in length"));
            }
            if w.iter().any(|v| !v.is_finite()) {
                return Err(Error::domain("weights must be finite"));
            }
        }
        Ok(EvalGrid { points, weights })
    }

    /// `n` equally spaced points on [a, b] including both ends.
    pub fn uniform(a: f64, b: f64, n: usize) -> Result<Self> {
        if n < 2 || a >= b {
            return Err(Error::domain("uniform grid needs n ≥ 2 and a < b"));
        }
        let h = (b - a) / (n - 1) as f64;
        let pts = (0..n)
            .map(|i| if i == n - 1 { b } else { a + i as f64 * h })
            .collect();
        EvalGrid::new(pts, None)
    }

    /// Composite 16-point Gauss–Legendre grid with weights.
    pub fn gauss(a: f64, b: f64, panels: usize) -> Result<Self> {
        if a >= b {
            return Err(Error::domain("gauss grid needs a < b"));
        }
        let r = crate::quadrature::CompositeRule::new(a, b, panels);
        EvalGrid::new(r.nodes, Some(r.weights))
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// True when the grid is symmetric about 0 to rounding.
    pub fn is_symmetric(&self) -> bool {
        let n = self.points.len();
        (0..n).all(|i| (self.points[i] + self.points[n - 1 - i]).abs() <= 1e-12 * (1.0 + self.points[i].abs()))
    }
}

// ---------------------------------------------------------------------------
// Hermite

/// Physicists' Hermite polynomial H_n(x).
pub fn hermite_poly(n: usize, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::domain("x must be finite"));
    }
    let mut h0 = 1.0;
    if n == 0 {
        return Ok(h0);
    }
    let mut h1 = 2.0 * x;
    for k in 1..n {
        let h2 = 2.0 * x * h1 - 2.0 * k as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    if !h1.is_finite() {
        return Err(Error::Range {
            what: format!("H_{n}({x}) overflows"),
            max_safe: hermite_safe_x(n),
        });
    }
    Ok(h1)
}

fn hermite_safe_x(n: usize) -> f64 {
    // |H_n(x)| ≤ (2|x|)^n + lower terms; keep (2|x|+n)^n well inside range.
    let lim = (f64::MAX.ln() - 1.0) / n.max(1) as f64;
    ((lim.exp() - n as f64) / 2.0).max(0.0)
}

/// Normalized Hermite polynomials Ĥ_k = H_k/√(2^k k!) for k = 0..=nmax, in double-double.
pub fn hermite_normalized_dd(nmax: usize, x: f64) -> Vec<DD> {
    let mut out = Vec::with_capacity(nmax + 1);
    let s2x = twofloat::consts::SQRT_2 * x;
    out.push(dd(1.0));
    if nmax >= 1 {
        out.push(s2x);
    }
    for k in 1..nmax {
        let next = div(s2x * out[k] - sqrt_int(k) * out[k - 1], sqrt_int(k + 1));
        out.push(next);
    }
    out
}

/// Oscillator eigenfunction h_n(x) = π^{-1/4} e^{−x²/2} H_n(x)/√(2ⁿn!).
pub fn hermite_function(n: usize, x: f64) -> f64 {
    let mut log_scale = -0.5 * x * x;
    let mut y0 = 0.0;
    let mut y1 = PI_M_QUARTER;
    let s2x = std::f64::consts::SQRT_2 * x;
    for k in 0..n {
        let kf = k as f64;
        let y2 = (s2x * y1 - kf.sqrt() * y0) / (kf + 1.0).sqrt();
        y0 = y1;
        y1 = y2;
        if y1.abs() > 1e150 {
            y0 *= 1e-150;
            y1 *= 1e-150;
            log_scale += 150.0 * std::f64::consts::LN_10;
        }
    }
    if log_scale < -745.0 {
        let l = y1.abs().ln() + log_scale;
        if l < -745.0 {
            return 0.0;
        }
        return y1.signum() * l.exp();
    }
    y1 * log_scale.exp()
}

/// h_0..=h_nmax at x.
pub fn hermite_functions(nmax: usize, x: f64) -> Vec<f64> {
    let e = (-0.5 * x * x).exp();
    scaled_h(nmax, x).into_iter().map(|v| v * e).collect()
}

/// Derivative h_n′ = √(n/2) h_{n−1} − √((n+1)/2) h_{n+1}.
pub fn hermite_function_deriv(n: usize, x: f64) -> f64 {
    let lo = if n == 0 { 0.0 } else { hermite_function(n - 1, x) };
    (n as f64 / 2.0).sqrt() * lo - ((n as f64 + 1.0) / 2.0).sqrt() * hermite_function(n + 1, x)
}

/// ĥ_0..=ĥ_nmax.
fn scaled_h(nmax: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(nmax + 1);
    let s2x = std::f64::consts::SQRT_2 * x;
    out.push(PI_M_QUARTER);
    if nmax >= 1 {
        out.push(s2x * PI_M_QUARTER);
    }
    for k in 1..nmax {
        let kf = k as f64;
        out.push((s2x * out[k] - kf.sqrt() * out[k - 1]) / (kf + 1.0).sqrt());
    }
    out
}

// ---------------------------------------------------------------------------
// Dawson

/// Dawson integral F(x) = e^{−x²}∫₀ˣ e^{t²} dt.
pub fn dawson(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax < 4.0 {
        dawson_series(ax)
    } else if ax < 12.0 {
        dawson_cf(ax)
    } else {
        dawson_asymptotic(ax)
    };
    v.copysign(x)
}

/// F′(x) = 1 − 2x F(x).
pub fn dawson_deriv(x: f64) -> f64 {
    if x.abs() >= 12.0 {
        // 1 − 2xF cancels badly; use the asymptotic form of the derivative.
        let x2 = x * x;
        let mut term = -1.0 / (2.0 * x2);
        let mut sum = term;
        let mut k = 1.0;
        loop {
            let next = term * (2.0 * k + 1.0) / (2.0 * x2);
            if next.abs() >= term.abs() || next.abs() < 1e-18 * sum.abs() {
                break;
            }
            term = next;
            sum += term;
            k += 1.0;
        }
        return sum;
    }
    1.0 - 2.0 * x * dawson(x)
}

fn dawson_series(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= x2 / k;
        let t = term / (2.0 * k + 1.0);
        sum += t;
        if t < 1e-17 * sum {
            break;
        }
    }
    sum * (-x2).exp()
}

fn dawson_cf(x: f64) -> f64 {
    let x2 = x * x;
    let n = (60.0 + 3.0 * x2) as usize;
    let mut t = 0.0;
    for k in (1..=n).rev() {
        let kf = k as f64;
        let a = if k % 2 == 1 { 2.0 * kf * x2 } else { -2.0 * kf * x2 };
        t = a / (2.0 * kf + 1.0 + t);
    }
    x / (1.0 + t)
}

fn dawson_asymptotic(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = 1.0 / (2.0 * x);
    let mut sum = term;
    let mut k = 1.0;
    loop {
        let next = term * (2.0 * k - 1.0) / (2.0 * x2);
        if next >= term || next < 1e-18 * sum {
            break;
        }
        term = next;
        sum += term;
        k += 1.0;
    }
    sum
}

/// Dawson integral in double-double arithmetic (≈1e−31 relative).
pub fn dawson_dd(x: f64) -> DD {
    let ax = x.abs();
    let v = if ax < 9.0 { dawson_dd_cf(ax) } else { dawson_dd_asymptotic(ax) };
    if x < 0.0 {
        -v
    } else {
        v
    }
}

fn dawson_dd_cf(x: f64) -> DD {
    let x2 = dd(x) * x;
    let n = (60.0 + 4.0 * x * x) as usize;
    let mut t = dd(0.0);
    for k in (1..=n).rev() {
        let kf = k as f64;
        let a = if k % 2 == 1 { x2 * (2.0 * kf) } else { x2 * (-2.0 * kf) };
        t = div(a, t + (2.0 * kf + 1.0));
    }
    div(dd(x), t + 1.0)
}

fn dawson_dd_asymptotic(x: f64) -> DD {
    let x2 = dd(x) * x;
    let mut term = dd(0.5) / x;
    let mut sum = term;
    let mut k = 1.0;
    loop {
        let next = div(term * (2.0 * k - 1.0), x2 * 2.0);
        if next.hi() >= term.hi() || next.hi() < 1e-34 * sum.hi() {
            break;
        }
        term = next;
        sum += term;
        k += 1.0;
    }
    sum
}

// ---------------------------------------------------------------------------
// Nonnormalizable eigenfunctions

/// Scaled eigenfunction values at one abscissa: ĥ_n = h_n e^{x²/2} for 0 ≤ n ≤ nmax+1 and
/// Ĝ_n = g_n e^{−x²/2} for −1 ≤ n ≤ nmax+1, with an absolute error estimate for each Ĝ_n.
#[derive(Debug, Clone)]
pub struct EigenSet {
    pub x: f64,
    nmax: usize,
    h: Vec<f64>,
    g: Vec<f64>,
    g_err: Vec<f64>,
}

impl EigenSet {
    pub fn new(nmax: usize, x: f64) -> Self {
        let top = nmax + 1;
        let ax = x.abs();
        let mut h = scaled_h(top, ax);
        let (mut g, mut g_err) = scaled_g(top, ax);
        if x < 0.0 {
            for (n, v) in h.iter_mut().enumerate() {
                if n % 2 == 1 {
                    *v = -*v;
                }
            }
            // g_n has parity (−1)^{n+1}; slot i holds n = i − 1.
            for (i, v) in g.iter_mut().enumerate() {
                if i % 2 == 1 {
                    *v = -*v;
                }
            }
        }
        for e in g_err.iter_mut() {
            *e = e.abs();
        }
        EigenSet {
            x,
            nmax,
            h,
            g,
            g_err,
        }
    }

    pub fn nmax(&self) -> usize {
        self.nmax
    }

    /// ĥ_n
    pub fn h(&self, n: usize) -> f64 {
        self.h[n]
    }

    /// Ĝ_n for n ≥ −1.
    pub fn g(&self, n: i64) -> f64 {
        self.g[(n + 1) as usize]
    }

    /// Absolute error estimate of Ĝ_n.
    pub fn g_err(&self, n: i64) -> f64 {
        self.g_err[(n + 1) as usize]
    }

    /// Scaled derivative h_n′ e^{x²/2}; valid for n ≤ nmax.
    pub fn dh(&self, n: usize) -> f64 {
        let lo = if n == 0 { 0.0 } else { self.h[n - 1] };
        (n as f64 / 2.0).sqrt() * lo - ((n as f64 + 1.0) / 2.0).sqrt() * self.h[n + 1]
    }

    /// Scaled derivative g_n′ e^{−x²/2}; valid for −1 ≤ n ≤ nmax.
    pub fn dg(&self, n: i64) -> f64 {
        match n {
            -1 => self.x * self.g(-1),
            0 => (self.g(-1) - self.g(1)) * std::f64::consts::FRAC_1_SQRT_2,
            _ => {
                let nf = n as f64;
                (nf / 2.0).sqrt() * self.g(n - 1) - ((nf + 1.0) / 2.0).sqrt() * self.g(n + 1)
            }
        }
    }

    /// Error estimate of the scaled g_n′.
    pub fn dg_err(&self, n: i64) -> f64 {
        match n {
            -1 => 0.0,
            0 => (self.g_err(-1) + self.g_err(1)) * std::f64::consts::FRAC_1_SQRT_2,
            _ => {
                let nf = n as f64;
                (nf / 2.0).sqrt() * self.g_err(n - 1) + ((nf + 1.0) / 2.0).sqrt() * self.g_err(n + 1)
            }
        }
    }

    /// Relative error estimate of Ĝ_n measured against its neighbours' envelope.
    pub fn g_rel_err(&self, n: i64) -> f64 {
        let i = (n + 1) as usize;
        let lo = i.saturating_sub(1);
        let hi = (i + 1).min(self.g.len() - 1);
        let scale = self.g[lo..=hi].iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if scale == 0.0 {
            return 0.0;
        }
        self.g_err[i] / scale
    }

    /// Largest relative error over −1 ≤ n ≤ nmax+1.
    pub fn worst_g_rel_err(&self) -> f64 {
        (-1..=(self.nmax as i64 + 1))
            .map(|n| self.g_rel_err(n))
            .fold(0.0, f64::max)
    }
}

/// Ĝ_{−1..=top} at x ≥ 0 with error estimates; hybrid of a double-double forward
/// recurrence and the asymptotic series in 1/x, whichever is estimated more accurate.
pub fn scaled_g(top: usize, x: f64) -> (Vec<f64>, Vec<f64>) {
    let len = top + 2;
    let s2 = std::f64::consts::SQRT_2;

    // f64 recurrence, used only to size the double-double error.
    let mut gf = vec![0.0; len];
    gf[0] = PI_QUARTER * s2;
    gf[1] = 2.0 * PI_QUARTER * dawson(x);
    // double-double recurrence
    let pq = dd_pi_quarter();
    let mut gd = vec![dd(0.0); len];
    gd[0] = pq * twofloat::consts::SQRT_2;
    gd[1] = pq * dawson_dd(x) * 2.0;
    let s2x = twofloat::consts::SQRT_2 * x;
    if len > 2 {
        gf[2] = s2 * x * gf[1] - gf[0];
        gd[2] = s2x * gd[1] - gd[0];
    }
    for i in 2..len - 1 {
        let n = (i - 1) as f64;
        gf[i + 1] = (s2 * x * gf[i] - n.sqrt() * gf[i - 1]) / (n + 1.0).sqrt();
        gd[i + 1] = div(s2x * gd[i] - sqrt_int(i - 1) * gd[i - 1], sqrt_int(i));
    }

    let mut val = vec![0.0; len];
    let mut err = vec![0.0; len];
    val[0] = gd[0].hi();
    err[0] = 1e-16 * val[0].abs();
    for i in 1..len {
        let v = to_f64(gd[i]);
        let e_dd = (gd[i].hi() - gf[i]).abs() * 2f64.powi(-53) + 1e-31 * v.abs() + 1e-17 * v.abs();
        val[i] = v;
        err[i] = e_dd;
        if x >= 2.0 {
            let n = i - 1;
            if let Some((a, ea)) = scaled_g_asymptotic(n, x) {
                if ea < e_dd {
                    val[i] = a;
                    err[i] = ea;
                }
            }
        }
    }
    (val, err)
}

/// Asymptotic series Ĝ_n ≈ 2π^{1/4}/√(2ⁿn!) Σ_k (2k−1)!!(2k+n)!/(2^{k+1}(2k)!) x^{−2k−1−n}
/// truncated at its smallest term; returns (value, error estimate).
pub fn scaled_g_asymptotic(n: usize, x: f64) -> Option<(f64, f64)> {
    let nf = n as f64;
    // log of the k = 0 term including the prefactor, to avoid overflow in n!.
    let mut ln_pref = (2.0 * PI_QUARTER).ln() - 0.5 * (nf * std::f64::consts::LN_2 + ln_factorial(n));
    ln_pref += ln_factorial(n) - std::f64::consts::LN_2 - (nf + 1.0) * x.ln();
    if ln_pref > LN_MAX || ln_pref < -LN_MAX {
        return None;
    }
    let t0 = ln_pref.exp();
    let x2 = x * x;
    let mut term = t0;
    let mut sum = t0;
    let mut k = 0.0;
    let mut shrinking = false;
    for _ in 0..10_000 {
        let ratio = (2.0 * k + nf + 1.0) * (2.0 * k + nf + 2.0) / (2.0 * (2.0 * k + 2.0) * x2);
        if ratio < 1.0 {
            shrinking = true;
        } else if shrinking {
            break;
        }
        term *= ratio;
        if term > 1e300 {
            return None;
        }
        sum += term;
        k += 1.0;
        if term < 1e-18 * sum {
            break;
        }
    }
    Some((sum, 2.0 * term + 2e-16 * sum))
}

/// ln n!
pub fn ln_factorial(n: usize) -> f64 {
    if n < 2 {
        return 0.0;
    }
    if n < 64 {
        return (2..=n).map(|k| (k as f64).ln()).sum();
    }
    // Stirling with three corrections; exact enough above 64.
    let x = n as f64;
    x * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI * x).ln() + 1.0 / (12.0 * x)
        - 1.0 / (360.0 * x.powi(3))
        + 1.0 / (1260.0 * x.powi(5))
}

/// Nonnormalizable eigenfunction g_n(x), n ≥ −1, with parity (−1)^{n+1}.
pub fn g_function(n: i64, x: f64) -> Result<f64> {
    if n < -1 {
        return Err(Error::domain("g_n is provided for n ≥ −1 only"));
    }
    check_g_range(x)?;
    let top = n.max(0) as usize;
    let e = EigenSet::new(top, x);
    let rel = e.g_rel_err(n);
    if rel > G_REL_TOL {
        return Err(Error::Range {
            what: format!("g_{n}({x}) loses accuracy (relative error {rel:.1e})"),
            max_safe: max_safe_x(|y| EigenSet::new(top, y).g_rel_err(n) <= G_REL_TOL),
        });
    }
    Ok(e.g(n) * (0.5 * x * x).exp())
}

/// g_n′(x) from the ladder relations.
pub fn g_function_deriv(n: i64, x: f64) -> Result<f64> {
    if n < -1 {
        return Err(Error::domain("g_n is provided for n ≥ −1 only"));
    }
    check_g_range(x)?;
    let top = n.max(0) as usize;
    let e = EigenSet::new(top, x);
    let rel = e.g_rel_err(n).max(e.g_rel_err(n + 1));
    if rel > G_REL_TOL {
        return Err(Error::Range {
            what: format!("g_{n}′({x}) loses accuracy"),
            max_safe: max_safe_x(|y| {
                let s = EigenSet::new(top, y);
                s.g_rel_err(n).max(s.g_rel_err(n + 1)) <= G_REL_TOL
            }),
        });
    }
    Ok(e.dg(n) * (0.5 * x * x).exp())
}

fn check_g_range(x: f64) -> Result<()> {
    if !x.is_finite() {
        return Err(Error::domain("x must be finite"));
    }
    let lim = (2.0 * LN_MAX).sqrt();
    if x.abs() > lim {
        return Err(Error::Range {
            what: format!("e^(x²/2) overflows at x = {x}"),
            max_safe: lim,
        });
    }
    Ok(())
}

/// Largest |x| on a 1/8 grid from 0 for which `ok` holds continuously.
pub fn max_safe_x<F: Fn(f64) -> bool>(ok: F) -> f64 {
    let mut x = 0.0;
    while x < 40.0 {
        let next = x + 0.125;
        if !ok(next) {
            return x;
        }
        x = next;
    }
    x
}

// ---------------------------------------------------------------------------
// Wronskian and derivatives

/// Central difference step used throughout: 1e−5·max(1, |x|).
pub fn fd_step(x: f64) -> f64 {
    1e-5 * x.abs().max(1.0)
}

/// Second-order central difference f′(x).
pub fn central_diff<F: Fn(f64) -> f64>(f: F, x: f64) -> f64 {
    let h = fd_step(x);
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// W(f, g)(x) = f g′ − f′ g with derivatives from central differences.
pub fn wronskian<F: Fn(f64) -> f64, G: Fn(f64) -> f64>(f: F, g: G, x: f64) -> f64 {
    let df = central_diff(&f, x);
    let dg = central_diff(&g, x);
    f(x) * dg - df * g(x)
}

/// W(f, g)(x) from analytically supplied values and derivatives.
pub fn wronskian_exact(f: f64, df: f64, g: f64, dg: f64) -> f64 {
    f * dg - df * g
}

/// W(h_n, g_n)(x) using the ladder derivatives; the exponentials cancel exactly.
pub fn wronskian_hg(n: usize, x: f64) -> f64 {
    let e = EigenSet::new(n, x);
    wronskian_exact(e.h(n), e.dh(n), e.g(n as i64), e.dg(n as i64))
}

// ---------------------------------------------------------------------------
// Mehler kernel

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MehlerMode {
    Closed,
    Series(usize),
}

/// Σ zⁿ H_n(x)H_n(y)/(2ⁿn!) in closed or truncated-series form.
pub fn mehler_kernel(x: f64, y: f64, z: f64, mode: MehlerMode) -> Result<f64> {
    if !(z.abs() < 1.0) {
        return Err(Error::domain(format!("Mehler kernel needs |z| < 1, got {z}")));
    }
    match mode {
        MehlerMode::Closed => {
            let d = 1.0 - z * z;
            Ok(d.powf(-0.5) * ((2.0 * x * y * z - (x * x + y * y) * z * z) / d).exp())
        }
        MehlerMode::Series(n) => {
            // Normalized Ĥ_k products carry the 1/(2^k k!) factor.
            let hx = hermite_normalized_dd(n, x);
            let hy = hermite_normalized_dd(n, y);
            let mut s = dd(0.0);
            let mut zp = dd(1.0);
            for k in 0..=n {
                s += zp * hx[k] * hy[k];
                zp *= z;
            }
            Ok(to_f64(s))
        }
    }
}

/// Closed-form Mehler kernel for complex z with |z| ≤ 1, z ≠ ±1.
pub fn mehler_kernel_complex(x: f64, y: f64, z: Complex64) -> Result<Complex64> {
    if z.norm() > 1.0 + 1e-15 {
        return Err(Error::domain("Mehler kernel needs |z| ≤ 1"));
    }
    let d = Complex64::new(1.0, 0.0) - z * z;
    if d.norm() < 1e-14 {
        return Err(Error::domain("Mehler kernel is singular at z² = 1"));
    }
    let ex = (z * (2.0 * x * y) - z * z * (x * x + y * y)) / d;
    Ok(d.sqrt().inv() * ex.exp())
}

// ---------------------------------------------------------------------------
// Laguerre

/// Associated Laguerre polynomial L_n^k(x) by the three-term recurrence.
pub fn laguerre_assoc(n: usize, k: i64, x: f64) -> Result<f64> {
    if (n as i64) + k < 0 {
        return Err(Error::domain("laguerre_assoc needs n + k ≥ 0"));
    }
    let kf = k as f64;
    let mut l0 = 1.0;
    if n == 0 {
        return Ok(l0);
    }
    let mut l1 = 1.0 + kf - x;
    for j in 1..n {
        let jf = j as f64;
        let l2 = ((2.0 * jf + 1.0 + kf - x) * l1 - (jf + kf) * l0) / (jf + 1.0);
        l0 = l1;
        l1 = l2;
    }
    Ok(l1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    // Oracle: explicit polynomial coefficients of H_n.
    fn hermite_explicit(n: usize, x: f64) -> f64 {
        let mut s = 0.0;
        let mut fact = vec![1.0f64; n + 1];
        for i in 1..=n {
            fact[i] = fact[i - 1] * i as f64;
        }
        for m in 0..=n / 2 {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            s += sign * fact[n] / (fact[m] * fact[n - 2 * m]) * (2.0 * x).powi((n - 2 * m) as i32);
        }
        s
    }

    // Oracle: Dawson by brute-force quadrature of ∫₀ˣ e^{−2xs+s²} ds (t = x − s),
    // 64-point Gauss–Legendre on 400 panels.
    fn dawson_quadrature(x: f64) -> f64 {
        let rule = crate::quadrature::GaussLegendre::new(64);
        let panels = 400;
        let h = x / panels as f64;
        (0..panels)
            .map(|p| rule.integrate(p as f64 * h, (p + 1) as f64 * h, |s| (-2.0 * x * s + s * s).exp()))
            .sum()
    }

    #[test]
    fn hermite_poly_examples() {
        assert_eq!(hermite_poly(0, 0.7).unwrap(), 1.0);
        assert!((hermite_poly(1, 0.7).unwrap() - 1.4).abs() < 1e-15);
        assert!((hermite_poly(2, 1.0).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn hermite_poly_matches_explicit_sum() {
        for n in 0..15 {
            for &x in &[-2.3, -0.4, 0.0, 0.9, 3.1] {
                let a = hermite_poly(n, x).unwrap();
                let b = hermite_explicit(n, x);
                assert!(close(a, b, 1e-12), "n={n} x={x} {a} {b}");
            }
        }
    }

    #[test]
    fn hermite_poly_overflow_is_range_error() {
        assert!(matches!(hermite_poly(400, 1e6), Err(Error::Range { .. })));
    }

    #[test]
    fn hermite_function_examples() {
        assert!((hermite_function(0, 0.0) - 0.751_125_5).abs() < 1e-7);
        assert_eq!(hermite_function(1, 0.0), 0.0);
        let v = crate::quadrature::integrate(|x| hermite_function(3, x).powi(2), -12.0, 12.0, 24);
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hermite_function_matches_direct_formula() {
        let mut fact = 1.0;
        for n in 0..20usize {
            if n > 0 {
                fact *= n as f64;
            }
            for &x in &[-3.0, -0.5, 0.2, 1.7, 4.4] {
                let direct = PI_M_QUARTER * (-x * x / 2.0f64).exp() * hermite_explicit(n, x)
                    / (2f64.powi(n as i32) * fact).sqrt();
                assert!((hermite_function(n, x) - direct).abs() < 1e-12, "n={n} x={x}");
            }
        }
    }

    #[test]
    fn hermite_function_large_arguments_underflow_gracefully() {
        assert_eq!(hermite_function(3, 1e3), 0.0);
        assert!(hermite_function(500, 20.0).is_finite());
    }

    #[test]
    fn orthonormality_200_point_gauss() {
        let rule = crate::quadrature::GaussLegendre::new(200);
        let l = 12.0;
        for m in 0..=15 {
            for n in m..=15 {
                let v = rule.integrate(-l, l, |x| hermite_function(m, x) * hermite_function(n, x));
                let want = if m == n { 1.0 } else { 0.0 };
                assert!((v - want).abs() <= 1e-8, "m={m} n={n} v={v}");
            }
        }
    }

    #[test]
    fn dawson_examples() {
        assert_eq!(dawson(0.0), 0.0);
        let oracle = dawson_quadrature(1.0);
        assert!((oracle - 0.538_079_506_912_768_4).abs() < 1e-12);
        assert!((dawson(1.0) - 0.538_079_506_912_768_4).abs() < 1e-15);
        let asym = 1.0 / 12.0 + 1.0 / (4.0 * 216.0);
        assert!((dawson(6.0) - asym).abs() < 1e-3);
    }

    #[test]
    fn dawson_matches_quadrature_oracle() {
        for &x in &[0.1, 0.5, 1.3, 2.2, 3.9, 4.1, 5.5, 7.0, 9.5] {
            let a = dawson(x);
            let b = dawson_quadrature(x);
            assert!((a - b).abs() <= 1e-12 * b.abs(), "x={x} {a} {b}");
        }
    }

    #[test]
    fn dawson_switchover_continuity() {
        for &x0 in &[4.0, 12.0] {
            let below = dawson(x0 - 1e-12);
            let above = dawson(x0);
            assert!((below - above).abs() <= 1e-12 * above, "x0={x0}");
            // and the methods agree at the seam itself
        }
        assert!((dawson_series(4.0) - dawson_cf(4.0)).abs() < 1e-14);
        assert!((dawson_cf(12.0) - dawson_asymptotic(12.0)).abs() < 1e-16);
    }

    #[test]
    fn dawson_dd_agrees_with_f64() {
        for i in 0..200 {
            let x = -10.0 + 0.1 * i as f64;
            let a = dawson(x);
            let b = dawson_dd(x);
            assert!((a - b.hi()).abs() <= 2e-15 * a.abs().max(1e-300), "x={x}");
        }
        let seam = dawson_dd_cf(9.0) - dawson_dd_asymptotic(9.0);
        assert!(seam.hi().abs() < 1e-31, "{:e}", seam.hi());
    }

    #[test]
    fn dawson_deriv_consistency() {
        for &x in &[0.0, 0.3, 2.0, 5.0, 11.9, 12.5, 30.0] {
            let fd = central_diff(dawson, x);
            assert!((dawson_deriv(x) - fd).abs() < 1e-9, "x={x}");
        }
    }

    #[test]
    fn g_examples() {
        assert_eq!(g_function(0, 0.0).unwrap(), 0.0);
        assert!((g_function(-1, 0.0).unwrap() - 2f64.sqrt() * PI_QUARTER).abs() < 1e-15);
        let w = wronskian(|x| hermite_function(0, x), |x| g_function(0, x).unwrap(), 0.3);
        assert!((w - 2.0).abs() < 1e-8);
    }

    #[test]
    fn wronskian_examples() {
        assert!(wronskian(|x| hermite_function(0, x), |x| hermite_function(0, x), 0.4).abs() < 1e-15);
        let w3 = wronskian(|x| hermite_function(3, x), |x| g_function(3, x).unwrap(), 0.5);
        assert!((w3 - 2.0).abs() < 1e-7);
        let w1 = wronskian(|x| hermite_function(1, x), |x| g_function(1, x).unwrap(), -2.0);
        assert!((w1 - 2.0).abs() < 1e-7);
    }

    #[test]
    fn constant_wronskian() {
        for n in 0..=10 {
            for i in 0..=80 {
                let x = -4.0 + 0.1 * i as f64;
                assert!((wronskian_hg(n, x) - 2.0).abs() < 1e-7, "n={n} x={x}");
            }
        }
    }

    #[test]
    fn g_zero_is_dawson() {
        for &x in &[-2.0, 0.4, 3.0] {
            let want = 2.0 * PI_QUARTER * (x * x / 2.0f64).exp() * dawson(x);
            assert!(close(g_function(0, x).unwrap(), want, 1e-14));
        }
    }

    // Oracle for Ĝ_n: n-th derivative of Dawson by the ODE F′ = 1 − 2xF,
    // F^{(k+1)} = −2x F^{(k)} − 2k F^{(k−1)} for k ≥ 1, in double-double.
    fn g_scaled_oracle(n: usize, x: f64) -> f64 {
        let xd = dd(x);
        let mut d = vec![dawson_dd(x)];
        d.push(dd(1.0) - xd * d[0] * 2.0);
        for k in 1..n {
            let next = -(xd * d[k] * 2.0) - d[k - 1] * (2.0 * k as f64);
            d.push(next);
        }
        let mut norm = dd(1.0);
        for k in 1..=n {
            norm *= 2.0 * k as f64;
        }
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let v = div(dd_pi_quarter() * 2.0 * d[n] * sign, norm.sqrt());
        to_f64(v)
    }

    #[test]
    fn scaled_g_matches_dawson_derivative_oracle() {
        for n in 0..=8usize {
            for &x in &[0.0, 0.7, 2.5, 4.0] {
                let e = EigenSet::new(n, x);
                let want = g_scaled_oracle(n, x);
                assert!((e.g(n as i64) - want).abs() <= 1e-13 * want.abs().max(1e-3), "n={n} x={x}");
            }
        }
    }

    #[test]
    fn asymptotic_branch_agrees_with_recurrence() {
        for n in 0..=8usize {
            for &x in &[6.0, 7.0] {
                let (a, ea) = scaled_g_asymptotic(n, x).unwrap();
                let (g, _) = scaled_g(n, x);
                assert!((a - g[n + 1]).abs() <= 1e-12 * a.abs() + ea, "n={n} x={x}");
            }
        }
    }

    #[test]
    fn g_range_errors() {
        assert!(matches!(g_function(0, 40.0), Err(Error::Range { .. })));
        assert!(matches!(g_function(-2, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn ode_residual_by_finite_differences() {
        // y″ − x² y + (2n+1) y = 0 for h_n and g_n
        for n in 0..=6usize {
            for i in 0..=12 {
                let x = -3.0 + 0.5 * i as f64;
                let h = 1e-3;
                let check = |f: &dyn Fn(f64) -> f64| {
                    let d2 = (-f(x + 2.0 * h) + 16.0 * f(x + h) - 30.0 * f(x) + 16.0 * f(x - h) - f(x - 2.0 * h))
                        / (12.0 * h * h);
                    let r = d2 - x * x * f(x) + (2.0 * n as f64 + 1.0) * f(x);
                    let d1 = (f(x + h) - f(x - h)) / (2.0 * h);
                    let scale = d2.abs() + (x * x + 2.0 * n as f64 + 1.0) * (f(x).abs() + d1.abs());
                    r.abs() / scale.max(1e-300)
                };
                assert!(check(&|y| hermite_function(n, y)) < 1e-5, "h n={n} x={x}");
                assert!(check(&|y| g_function(n as i64, y).unwrap()) < 1e-5, "g n={n} x={x}");
            }
        }
    }

    #[test]
    fn ladder_actions() {
        for &x in &[-1.3, 0.2, 2.1] {
            for n in 0..6 {
                let lhs = (x * hermite_function(n, x) - central_diff(|y| hermite_function(n, y), x))
                    / (2.0 * (n as f64 + 1.0)).sqrt();
                assert!((lhs - hermite_function(n + 1, x)).abs() < 1e-5);
            }
            let g0 = |y: f64| g_function(0, y).unwrap();
            let gm = |y: f64| g_function(-1, y).unwrap();
            let a = (x * g0(x) + central_diff(g0, x)) / 2f64.sqrt();
            assert!((a - gm(x)).abs() < 1e-5 * gm(x).abs());
            let b = x * gm(x) - central_diff(gm, x);
            assert!(b.abs() < 1e-5 * gm(x).abs());
        }
    }

    #[test]
    fn hermite_product_identity() {
        let fact = |k: usize| (1..=k).fold(1.0, |a, b| a * b as f64);
        for m in 0..=8 {
            for n in 0..=8 {
                for &x in &[-1.7, 0.3, 2.4] {
                    let lhs = hermite_poly(m, x).unwrap() * hermite_poly(n, x).unwrap();
                    let mut rhs = 0.0;
                    for j in 0..=m.min(n) {
                        rhs += fact(m) * fact(n) / (fact(j) * fact(m - j) * fact(n - j))
                            * 2f64.powi(j as i32)
                            * hermite_poly(m + n - 2 * j, x).unwrap();
                    }
                    assert!((lhs - rhs).abs() <= 1e-9 * lhs.abs().max(1.0), "m={m} n={n}");
                }
            }
        }
    }

    #[test]
    fn mehler_examples() {
        assert_eq!(mehler_kernel(0.3, -1.2, 0.0, MehlerMode::Closed).unwrap(), 1.0);
        let c = mehler_kernel(0.5, -0.3, 0.6, MehlerMode::Closed).unwrap();
        let s = mehler_kernel(0.5, -0.3, 0.6, MehlerMode::Series(60)).unwrap();
        assert!((c - s).abs() < 1e-10);
        let want = (1.0f64 - 0.81).powf(-0.5) * ((1.8f64 - 1.62) / 0.19).exp();
        assert!((mehler_kernel(1.0, 1.0, 0.9, MehlerMode::Closed).unwrap() - want).abs() < 1e-12);
        assert!(mehler_kernel(0.0, 0.0, 1.0, MehlerMode::Closed).is_err());
    }

    #[test]
    fn mehler_complex_reduces_to_real() {
        let a = mehler_kernel(0.4, 1.1, -0.7, MehlerMode::Closed).unwrap();
        let b = mehler_kernel_complex(0.4, 1.1, Complex64::new(-0.7, 0.0)).unwrap();
        assert!((a - b.re).abs() < 1e-13 && b.im.abs() < 1e-13);
    }

    #[test]
    fn laguerre_examples() {
        assert_eq!(laguerre_assoc(0, 3, 1.7).unwrap(), 1.0);
        assert!((laguerre_assoc(1, 0, 0.8).unwrap() - 0.2).abs() < 1e-15);
        // finite-sum oracle: L_n^k(x) = Σ_i (−1)^i C(n+k, n−i) x^i / i!
        let binom = |a: f64, b: usize| (0..b).fold(1.0, |acc, i| acc * (a - i as f64) / (i as f64 + 1.0));
        let oracle = |n: usize, k: i64, x: f64| {
            (0..=n)
                .map(|i| {
                    let s = if i % 2 == 0 { 1.0 } else { -1.0 };
                    let fi = (1..=i).fold(1.0, |a, b| a * b as f64);
                    s * binom((n as i64 + k) as f64, n - i) * x.powi(i as i32) / fi
                })
                .sum::<f64>()
        };
        assert!((laguerre_assoc(2, 1, 0.5).unwrap() - oracle(2, 1, 0.5)).abs() < 1e-14);
        for n in 0..8 {
            for k in -(n as i64)..4 {
                let x = 1.3;
                assert!((laguerre_assoc(n, k, x).unwrap() - oracle(n, k, x)).abs() < 1e-10, "n={n} k={k}");
            }
        }
        assert!(laguerre_assoc(1, -2, 0.0).is_err());
    }

    #[test]
    fn eval_grid_invariants() {
        assert!(EvalGrid::new(vec![0.0, 0.0], None).is_err());
        assert!(EvalGrid::new(vec![0.0, 1.0], Some(vec![1.0])).is_err());
        let g = EvalGrid::uniform(-5.0, 5.0, 11).unwrap();
        assert!(g.is_symmetric());
        let q = EvalGrid::gauss(-1.0, 1.0, 3).unwrap();
        assert!((q.weights().unwrap().iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn hermite_function_parity(n in 0usize..40, x in -8.0f64..8.0) {
            let a = hermite_function(n, -x);
            let b = hermite_function(n, x);
            let s = if n % 2 == 0 { 1.0 } else { -1.0 };
            prop_assert_eq!(a, s * b);
        }

        #[test]
        fn g_parity(n in -1i64..12, x in -5.0f64..5.0) {
            let a = g_function(n, -x).unwrap();
            let b = g_function(n, x).unwrap();
            let s = if (n + 1) % 2 == 0 { 1.0 } else { -1.0 };
            prop_assert_eq!(a, s * b);
        }

        #[test]
        fn dawson_is_odd(x in -20.0f64..20.0) {
            prop_assert_eq!(dawson(-x), -dawson(x));
        }

        #[test]
        fn wronskian_is_two(n in 0usize..=10, x in -4.0f64..4.0) {
            prop_assert!((wronskian_hg(n, x) - 2.0).abs() < 1e-7);
        }

        #[test]
        fn mehler_series_vs_closed(x in -2.0f64..2.0, y in -2.0f64..2.0, z in -0.6f64..0.6) {
            let c = mehler_kernel(x, y, z, MehlerMode::Closed).unwrap();
            let s = mehler_kernel(x, y, z, MehlerMode::Series(80)).unwrap();
            prop_assert!((c - s).abs() <= 1e-10 * c.abs().max(1.0));
        }
    }
}
