//! Pattern functions F_{m,n}(x) in their canonical, Hermite-series (F′) and
//! derivative-of-product (F″, F‴) forms, with the checks that tie them together.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::dd::{dd, div, sqrt_int, to_f64, DD};
use crate::error::{Error, Result};
use crate::numfmt::fmt_f64;
use crate::specfun::{self, ln_factorial, max_safe_x, EigenSet, EvalGrid, G_REL_TOL};

/// Below this |x| the canonical form is built from the Hermite series.
pub const SERIES_X_MAX: f64 = 5.0;
/// Relative size under which a series term counts as negligible.
pub const ADAPTIVE_TOL: f64 = 1e-14;
const ADAPTIVE_RUN: usize = 20;
const MAX_TERMS: usize = 20_000;
/// Largest tolerated rounding estimate of the series relative to max(1, |F′|).
pub const SERIES_ERR_TOL: f64 = 1e-10;
const FIXED_TAIL_TOL: f64 = 1e-12;
/// Residual above which two representations are declared inconsistent.
pub const RESIDUAL_TOL: f64 = 1e-8;
/// The asymptotic form refuses smaller |x|.
pub const ASYMPTOTIC_X_MIN: f64 = 4.0;
/// Finite-difference step of the ODE checks.
pub const ODE_STEP: f64 = 0.01;
/// Tail mass of h_m h_{m+j} allowed outside the orthogonality window.
pub const ORTHO_TAIL_TOL: f64 = 1e-12;

const DD_EPS: f64 = 1e-30;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truncation {
    Adaptive,
    /// Exactly J terms, j = 0..J−1.
    Fixed(usize),
}

impl fmt::Display for Truncation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Truncation::Adaptive => write!(f, "adaptive"),
            Truncation::Fixed(j) => write!(f, "fixed({j})"),
        }
    }
}

impl FromStr for Truncation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        if t == "adaptive" {
            return Ok(Truncation::Adaptive);
        }
        let digits = t
            .strip_prefix("fixed")
            .map(|r| r.trim_matches(|c| c == '(' || c == ')' || c == ':' || c == '='))
            .unwrap_or(&t);
        digits
            .parse::<usize>()
            .ok()
            .filter(|&j| j > 0)
            .map(Truncation::Fixed)
            .ok_or_else(|| Error::Parse(format!("unknown truncation '{s}' (adaptive | fixed(J))")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Representation {
    /// F_{m,n}, vanishing at infinity.
    Canonical,
    /// F′_{m,n}
    HermiteSeries,
    /// F″_{m,n} = ∂(h_m g_n)
    DerivProduct,
    /// F‴_{m,n} = F″_{n,m}
    DerivProductSwapped,
    /// ½(F″ + F‴)
    Symmetrized,
}

impl Representation {
    pub const ALL: [Representation; 5] = [
        Representation::Canonical,
        Representation::HermiteSeries,
        Representation::DerivProduct,
        Representation::DerivProductSwapped,
        Representation::Symmetrized,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            Representation::Canonical => "canonical",
            Representation::HermiteSeries => "hermite-series",
            Representation::DerivProduct => "deriv-product",
            Representation::DerivProductSwapped => "deriv-product-swapped",
            Representation::Symmetrized => "symmetrized",
        }
    }

    /// Whether F(m,n) = F(n,m) holds for this form.
    pub fn is_index_symmetric(&self) -> bool {
        matches!(
            self,
            Representation::Canonical | Representation::HermiteSeries | Representation::Symmetrized
        )
    }
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Representation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        Ok(match t.as_str() {
            "canonical" | "f" => Representation::Canonical,
            "hermite-series" | "hermite" | "series" | "f1" | "f'" => Representation::HermiteSeries,
            "deriv-product" | "f2" | "f''" => Representation::DerivProduct,
            "deriv-product-swapped" | "f3" | "f'''" => Representation::DerivProductSwapped,
            "symmetrized" | "sym" => Representation::Symmetrized,
            _ => {
                return Err(Error::Parse(format!(
                    "unknown representation '{s}' (canonical | hermite-series | deriv-product | deriv-product-swapped | symmetrized)"
                )))
            }
        })
    }
}

// ---------------------------------------------------------------------------
// Hermite series F′

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    pub terms: usize,
    /// Estimated rounding error of the double-double sum.
    pub err: f64,
    pub last_term: f64,
}

/// √(m!n!/(m+n)!) in double-double.
fn series_c0(m: usize, n: usize) -> DD {
    let (lo, hi) = (m.min(n), m.max(n));
    let mut binom = dd(1.0);
    for i in 1..=lo {
        binom = div(binom * (hi + i) as f64, dd(i as f64));
    }
    div(dd(1.0), binom).sqrt()
}

fn series_raw(m: usize, n: usize, x: f64, trunc: Truncation, tol: f64) -> Result<SeriesValue> {
    if !x.is_finite() {
        return Err(Error::domain("x must be finite"));
    }
    let s2x = twofloat::consts::SQRT_2 * x;
    // rolling Ĥ_{k−1}, Ĥ_k
    let mut k = 0usize;
    let mut prev = dd(0.0);
    let mut cur = dd(1.0);
    let advance = |k: &mut usize, prev: &mut DD, cur: &mut DD| {
        let next = div(s2x * *cur - sqrt_int(*k) * *prev, sqrt_int(*k + 1));
        *prev = *cur;
        *cur = next;
        *k += 1;
    };
    let k0 = m + n;
    while k < k0 {
        advance(&mut k, &mut prev, &mut cur);
    }

    let past_peak = (x * x).ceil() as usize;
    let mut c = series_c0(m, n);
    let mut sum = dd(0.0);
    let mut abs_sum = 0.0;
    let mut run = 0usize;
    let mut j = 0usize;
    let mut last;
    loop {
        let term = c * cur;
        sum += term;
        last = to_f64(term).abs();
        abs_sum += last;
        j += 1;
        match trunc {
            Truncation::Fixed(jn) => {
                if j >= jn {
                    break;
                }
            }
            Truncation::Adaptive => {
                let s = to_f64(sum).abs();
                if last <= tol * s || last < 1e-300 {
                    run += 1;
                } else {
                    run = 0;
                }
                if run >= ADAPTIVE_RUN && j > past_peak {
                    break;
                }
                if j >= MAX_TERMS {
                    return Err(Error::NonConvergence(format!(
                        "F′_{{{m},{n}}}({x}) did not settle within {MAX_TERMS} terms"
                    )));
                }
            }
        }
        let kk = k0 + 2 * (j - 1);
        let num = ((m + j) * (n + j)) as f64;
        c = -div(c * num, sqrt_int(kk + 1) * sqrt_int(kk + 2) * j as f64);
        advance(&mut k, &mut prev, &mut cur);
        advance(&mut k, &mut prev, &mut cur);
    }
    let value = to_f64(sum);
    let err = abs_sum * DD_EPS * (j as f64).sqrt().max(1.0);
    Ok(SeriesValue {
        value,
        terms: j,
        err,
        last_term: last,
    })
}

fn fixed_converged(sv: &SeriesValue, j: usize, x: f64) -> bool {
    j as f64 >= x * x && sv.last_term <= FIXED_TAIL_TOL * sv.value.abs().max(1.0)
}

fn rounding_ok(sv: &SeriesValue) -> bool {
    sv.err <= SERIES_ERR_TOL * sv.value.abs().max(1.0)
}

/// Largest |x| at which J fixed terms still give a converged F′_{m,n}.
pub fn series_x_max(m: usize, n: usize, j: usize) -> f64 {
    max_safe_x(|y| {
        series_raw(m, n, y, Truncation::Fixed(j), ADAPTIVE_TOL)
            .map(|sv| fixed_converged(&sv, j, y))
            .unwrap_or(false)
    })
}

/// F′_{m,n}(x) = Σ_j c_j Ĥ_{m+n+2j}(x) summed in double-double.
pub fn pattern_hermite_series(m: usize, n: usize, x: f64, trunc: Truncation) -> Result<f64> {
    pattern_hermite_series_detail(m, n, x, trunc, ADAPTIVE_TOL).map(|s| s.value)
}

/// As [`pattern_hermite_series`] with an explicit adaptive stop tolerance and diagnostics.
pub fn pattern_hermite_series_detail(
    m: usize,
    n: usize,
    x: f64,
    trunc: Truncation,
    tol: f64,
) -> Result<SeriesValue> {
    let sv = series_raw(m, n, x, trunc, tol)?;
    if let Truncation::Fixed(j) = trunc {
        if !fixed_converged(&sv, j, x) {
            return Err(Error::NonConvergence(format!(
                "F′_{{{m},{n}}}({x}) with {j} terms has not converged (last term {:.1e}); x_max({j}) = {}",
                sv.last_term,
                series_x_max(m, n, j)
            )));
        }
    }
    if !rounding_ok(&sv) {
        return Err(Error::Range {
            what: format!("F′_{{{m},{n}}}({x}) cancels beyond double-double accuracy"),
            max_safe: max_safe_x(|y| {
                series_raw(m, n, y, Truncation::Adaptive, tol)
                    .map(|s| rounding_ok(&s))
                    .unwrap_or(false)
            }),
        });
    }
    Ok(sv)
}

/// Terms (degree, coefficient) of F − F′ = Σ_k coef · H_degree(x).
pub fn correction_terms(m: usize, n: usize) -> Vec<(usize, f64)> {
    let d = m.abs_diff(n);
    let lo = m.min(n);
    let ln_pref = -0.5 * (d as f64 * std::f64::consts::LN_2 + ln_factorial(m) + ln_factorial(n));
    (1..=d / 2)
        .map(|k| {
            let ln_c = ln_factorial(k - 1 + lo) + ln_factorial(d - k) - ln_factorial(k - 1) - ln_factorial(d - 2 * k);
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let c = sign * (ln_pref + ln_c + k as f64 * std::f64::consts::LN_2).exp();
            (d - 2 * k, c)
        })
        .collect()
}

fn correction(m: usize, n: usize, x: f64) -> Result<f64> {
    let mut s = 0.0;
    for (deg, c) in correction_terms(m, n) {
        s += c * specfun::hermite_poly(deg, x)?;
    }
    Ok(s)
}

/// Canonical F_{m,n}(x): F′ plus the finite Hermite correction inside |x| < 5,
/// F″_{min,max} outside.
pub fn pattern_canonical(m: usize, n: usize, x: f64) -> Result<f64> {
    pattern_canonical_trunc(m, n, x, Truncation::Adaptive)
}

pub fn pattern_canonical_trunc(m: usize, n: usize, x: f64, trunc: Truncation) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::domain("x must be finite"));
    }
    if x.abs() < SERIES_X_MAX {
        Ok(pattern_hermite_series(m, n, x, trunc)? + correction(m, n, x)?)
    } else {
        pattern_deriv_product(m.min(n), m.max(n), x)
    }
}

// ---------------------------------------------------------------------------
// Derivative of products

/// F″_{m,n} from a precomputed eigenfunction set (needs `set.nmax() ≥ max(m, n)`).
pub fn deriv_product_in(set: &EigenSet, m: usize, n: usize) -> Result<f64> {
    let (v, rel) = deriv_product_parts(set, m, n);
    if rel > G_REL_TOL {
        let top = m.max(n);
        return Err(Error::Range {
            what: format!(
                "F″_{{{m},{n}}}({}) loses accuracy through g_{n} (relative error {rel:.1e})",
                set.x
            ),
            max_safe: max_safe_x(|y| deriv_product_parts(&EigenSet::new(top, y), m, n).1 <= G_REL_TOL),
        });
    }
    Ok(v)
}

fn deriv_product_parts(set: &EigenSet, m: usize, n: usize) -> (f64, f64) {
    let ni = n as i64;
    let (dh, h) = (set.dh(m), set.h(m));
    let (g, dg) = (set.g(ni), set.dg(ni));
    let a = dh * g;
    let b = h * dg;
    let err = dh.abs() * set.g_err(ni) + h.abs() * set.dg_err(ni);
    let scale = a.abs() + b.abs();
    let rel = if scale == 0.0 { 0.0 } else { err / scale };
    (a + b, rel)
}

/// F″_{m,n}(x) = d/dx[h_m(x) g_n(x)] from the ladder relations; F‴_{m,n} is F″_{n,m}.
pub fn pattern_deriv_product(m: usize, n: usize, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::domain("x must be finite"));
    }
    deriv_product_in(&EigenSet::new(m.max(n), x), m, n)
}

/// F_{0,0}(x) = 2(1 − 2x·F_D(x)).
pub fn pattern_f00_closed(x: f64) -> f64 {
    2.0 * (1.0 - 2.0 * x * specfun::dawson(x))
}

/// Evaluate any representation at one point.
pub fn pattern_value(rep: Representation, m: usize, n: usize, x: f64) -> Result<f64> {
    pattern_value_trunc(rep, m, n, x, Truncation::Adaptive)
}

pub fn pattern_value_trunc(rep: Representation, m: usize, n: usize, x: f64, trunc: Truncation) -> Result<f64> {
    match rep {
        Representation::Canonical => pattern_canonical_trunc(m, n, x, trunc),
        Representation::HermiteSeries => pattern_hermite_series(m, n, x, trunc),
        Representation::DerivProduct => pattern_deriv_product(m, n, x),
        Representation::DerivProductSwapped => pattern_deriv_product(n, m, x),
        Representation::Symmetrized => {
            let set = EigenSet::new(m.max(n), x);
            Ok(0.5 * (deriv_product_in(&set, m, n)? + deriv_product_in(&set, n, m)?))
        }
    }
}

// ---------------------------------------------------------------------------
// Asymptotic form

/// (√2x)^{m+n}/√(m!n!) Σ_j [(m+j)!(n+j)!/(j!(m+n+2j)!)](−2x²)^j, the series obtained by
/// keeping only the top power of each Hermite polynomial. Refuses |x| < 4.
pub fn pattern_asymptotic(m: usize, n: usize, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::domain("x must be finite"));
    }
    if x.abs() < ASYMPTOTIC_X_MIN {
        return Err(Error::domain(format!(
            "asymptotic pattern function is unreliable for |x| < {ASYMPTOTIC_X_MIN} (got {x})"
        )));
    }
    let (v, rel) = asymptotic_raw(m, n, x);
    if rel > SERIES_ERR_TOL {
        return Err(Error::Range {
            what: format!("asymptotic series at x = {x} cancels beyond double-double accuracy"),
            max_safe: max_safe_x(|y| asymptotic_raw(m, n, y).1 <= SERIES_ERR_TOL),
        });
    }
    Ok(v)
}

fn asymptotic_raw(m: usize, n: usize, x: f64) -> (f64, f64) {
    let k0 = m + n;
    let z = -2.0 * x * x;
    let c0 = series_c0(m, n);
    let mut t = c0 * c0;
    let mut sum = dd(0.0);
    let mut abs_sum = 0.0;
    let past_peak = (x * x).ceil() as usize;
    let mut j = 0usize;
    loop {
        sum += t;
        let a = to_f64(t).abs();
        abs_sum += a;
        if j > past_peak && a <= 1e-18 * to_f64(sum).abs() || j >= MAX_TERMS {
            break;
        }
        let kk = (k0 + 2 * j) as f64;
        let num = ((m + j + 1) * (n + j + 1)) as f64 * z;
        t = div(t * num, dd((j + 1) as f64) * ((kk + 1.0) * (kk + 2.0)));
        j += 1;
    }
    let s = to_f64(sum);
    let pref = (std::f64::consts::SQRT_2 * x).powi(k0 as i32) * (-0.5 * (ln_factorial(m) + ln_factorial(n))).exp();
    let rel = if s == 0.0 { 0.0 } else { abs_sum * DD_EPS / s.abs() };
    (pref * s, rel)
}

/// Leading term (√2x)^{m+n}/√(m!n!) · m!n!/(m+n)!.
pub fn pattern_asymptotic_leading(m: usize, n: usize, x: f64) -> f64 {
    let c0 = to_f64(series_c0(m, n));
    (std::f64::consts::SQRT_2 * x).powi((m + n) as i32) * (-0.5 * (ln_factorial(m) + ln_factorial(n))).exp() * c0 * c0
}

// ---------------------------------------------------------------------------
// Nonuniqueness

#[derive(Debug, Clone, PartialEq)]
pub struct NonuniquenessFit {
    /// Hermite degrees |m−n|−2k, k = 1, 2, …
    pub degrees: Vec<usize>,
    pub coefficients: Vec<f64>,
    /// Sup-norm of the unexplained difference relative to max(1, sup|repA|).
    pub residual: f64,
}

/// Least-squares fit of repA − repB onto span{H_{|m−n|−2k}}; errors when the residual exceeds 1e−8.
pub fn pattern_nonuniqueness_residual(
    rep_a: Representation,
    rep_b: Representation,
    m: usize,
    n: usize,
    grid: &EvalGrid,
) -> Result<NonuniquenessFit> {
    check_fit(nonuniqueness_fit(rep_a, rep_b, m, n, grid)?)
}

/// The fit without the threshold check.
pub fn nonuniqueness_fit(
    rep_a: Representation,
    rep_b: Representation,
    m: usize,
    n: usize,
    grid: &EvalGrid,
) -> Result<NonuniquenessFit> {
    let xs = grid.points();
    if xs.is_empty() {
        return Err(Error::domain("empty grid"));
    }
    let pairs = crate::par::map(xs, |&x| -> Result<(f64, f64)> {
        Ok((pattern_value(rep_a, m, n, x)?, pattern_value(rep_b, m, n, x)?))
    });
    let pairs = pairs.into_iter().collect::<Result<Vec<_>>>()?;
    let scale = pairs.iter().fold(1.0f64, |s, p| s.max(p.0.abs()));
    let diff: Vec<f64> = pairs.iter().map(|p| p.0 - p.1).collect();
    fit_span(xs, &diff, scale, m.abs_diff(n))
}

fn fit_span(xs: &[f64], diff: &[f64], scale: f64, d: usize) -> Result<NonuniquenessFit> {
    let diff = DVector::from_column_slice(diff);
    let degrees: Vec<usize> = (1..=d / 2).map(|k| d - 2 * k).collect();
    if degrees.is_empty() {
        return Ok(NonuniquenessFit {
            degrees,
            coefficients: vec![],
            residual: diff.amax() / scale,
        });
    }
    let mut a = DMatrix::<f64>::zeros(xs.len(), degrees.len());
    for (c, &deg) in degrees.iter().enumerate() {
        for (r, &x) in xs.iter().enumerate() {
            a[(r, c)] = specfun::hermite_poly(deg, x)?;
        }
    }
    let norms: Vec<f64> = (0..degrees.len()).map(|c| a.column(c).norm().max(1e-300)).collect();
    for (c, nrm) in norms.iter().enumerate() {
        a.column_mut(c).scale_mut(1.0 / nrm);
    }
    let sol = a
        .clone()
        .svd(true, true)
        .solve(&diff, 1e-14)
        .map_err(|e| Error::NonConvergence(format!("least-squares fit failed: {e}")))?;
    let resid = &diff - &a * &sol;
    let coefficients = sol.iter().zip(&norms).map(|(s, nrm)| s / nrm).collect();
    Ok(NonuniquenessFit {
        degrees,
        coefficients,
        residual: resid.amax() / scale,
    })
}

fn check_fit(fit: NonuniquenessFit) -> Result<NonuniquenessFit> {
    if fit.residual > RESIDUAL_TOL {
        return Err(Error::Representation {
            residual: fit.residual,
            tol: RESIDUAL_TOL,
        });
    }
    Ok(fit)
}

// ---------------------------------------------------------------------------
// Differential equations

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProductChoice {
    HH,
    HG,
    GH,
    GG,
}

impl FromStr for ProductChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| c.is_ascii_alphabetic()).collect::<String>().to_ascii_lowercase();
        Ok(match t.as_str() {
            "hh" => ProductChoice::HH,
            "hg" => ProductChoice::HG,
            "gh" => ProductChoice::GH,
            "gg" => ProductChoice::GG,
            _ => return Err(Error::Parse(format!("unknown product '{s}' (h*h | h*g | g*h | g*g)"))),
        })
    }
}

/// The chosen product of eigenfunctions at x (first factor index m, second n).
pub fn product_value(choice: ProductChoice, m: usize, n: usize, x: f64) -> f64 {
    let s = EigenSet::new(m.max(n), x);
    let (mi, ni) = (m as i64, n as i64);
    match choice {
        ProductChoice::HH => s.h(m) * s.h(n) * (-x * x).exp(),
        ProductChoice::HG => s.h(m) * s.g(ni),
        ProductChoice::GH => s.g(mi) * s.h(n),
        ProductChoice::GG => s.g(mi) * s.g(ni) * (x * x).exp(),
    }
}

struct Derivs {
    f: f64,
    d1: f64,
    d2: f64,
    d3: f64,
    d4: f64,
}

/// 5-point central stencils at steps h and 2h, Richardson-combined for the odd-order-error ones.
fn stencil_derivs<F: Fn(f64) -> f64>(f: &F, x: f64, h: f64) -> Derivs {
    let v: Vec<f64> = (-4..=4).map(|i| f(x + i as f64 * h)).collect();
    let at = |i: i32| v[(i + 4) as usize];
    let d3 = |s: i32, h: f64| (at(2 * s) - 2.0 * at(s) + 2.0 * at(-s) - at(-2 * s)) / (2.0 * h.powi(3));
    let d4 = |s: i32, h: f64| (at(2 * s) - 4.0 * at(s) + 6.0 * at(0) - 4.0 * at(-s) + at(-2 * s)) / h.powi(4);
    Derivs {
        f: at(0),
        d1: (at(-2) - 8.0 * at(-1) + 8.0 * at(1) - at(2)) / (12.0 * h),
        d2: (-at(2) + 16.0 * at(1) - 30.0 * at(0) + 16.0 * at(-1) - at(-2)) / (12.0 * h * h),
        d3: (4.0 * d3(1, h) - d3(2, 2.0 * h)) / 3.0,
        d4: (4.0 * d4(1, h) - d4(2, 2.0 * h)) / 3.0,
    }
}

/// Sup over the grid of |L f|/scale for the fourth-order operator
/// f⁗ − 4(x²−s)f″ − 12x f′ + (4(m−n)² − 4) f, s = m+n+1. The scale bounds the terms
/// without cancellation, so odd products at x = 0 are not divided by rounding noise.
pub fn ode_residual_fn<F: Fn(f64) -> f64>(m: usize, n: usize, f: F, grid: &EvalGrid) -> f64 {
    let s = (m + n + 1) as f64;
    let c0 = 4.0 * (m as f64 - n as f64).powi(2) - 4.0;
    grid.points()
        .iter()
        .map(|&x| {
            let d = stencil_derivs(&f, x, ODE_STEP);
            let res = d.d4 - 4.0 * (x * x - s) * d.d2 - 12.0 * x * d.d1 + c0 * d.f;
            let scale = d.d4.abs() + 4.0 * (x * x + s) * d.d2.abs() + 12.0 * (x.abs() + 1.0) * d.d1.abs() + (c0.abs() + 4.0) * d.f.abs();
            relative(res, scale)
        })
        .fold(0.0, f64::max)
}

/// [`ode_residual_fn`] on a product of eigenfunctions.
pub fn ode_residual(m: usize, n: usize, choice: ProductChoice, grid: &EvalGrid) -> f64 {
    ode_residual_fn(m, n, |x| product_value(choice, m, n, x), grid)
}

/// Third-order operator f‴ − 4(x²−2n−1)f′ − 4x f for products with equal indices.
pub fn ode3_residual_fn<F: Fn(f64) -> f64>(n: usize, f: F, grid: &EvalGrid) -> f64 {
    let s = (2 * n + 1) as f64;
    grid.points()
        .iter()
        .map(|&x| {
            let d = stencil_derivs(&f, x, ODE_STEP);
            let res = d.d3 - 4.0 * (x * x - s) * d.d1 - 4.0 * x * d.f;
            relative(res, d.d3.abs() + 4.0 * (x * x + s) * d.d1.abs() + 4.0 * (x.abs() + 1.0) * d.f.abs())
        })
        .fold(0.0, f64::max)
}

pub fn ode3_residual(n: usize, choice: ProductChoice, grid: &EvalGrid) -> f64 {
    ode3_residual_fn(n, |x| product_value(choice, n, n, x), grid)
}

fn relative(res: f64, scale: f64) -> f64 {
    if scale == 0.0 {
        0.0
    } else {
        res.abs() / scale
    }
}

// ---------------------------------------------------------------------------
// Orthogonality

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrthoQuad {
    /// Integration over [−L, L]; `None` picks √(2(m+j)+1) + 6.
    pub half_width: Option<f64>,
    pub panels: usize,
}

impl Default for OrthoQuad {
    fn default() -> Self {
        OrthoQuad {
            half_width: None,
            panels: 96,
        }
    }
}

/// ∫ d/dx[h_k g_{k+j}] · h_m h_{m+j} dx, expected δ_{k,m}.
pub fn orthogonality_check(k: usize, m: usize, j: usize, quad: &OrthoQuad) -> Result<f64> {
    let l = quad
        .half_width
        .unwrap_or_else(|| (2.0 * (m + j) as f64 + 1.0).sqrt() + 6.0);
    if !(l > 0.0) {
        return Err(Error::domain("window half-width must be positive"));
    }
    let weight = |x: f64| {
        let s = EigenSet::new(m + j, x);
        s.h(m) * s.h(m + j) * (-x * x).exp()
    };
    let tail = 2.0 * crate::quadrature::integrate(|x| weight(x).abs(), l, l + 12.0, 48);
    if tail > ORTHO_TAIL_TOL {
        return Err(Error::Window(format!(
            "h_{m}·h_{} carries tail mass {tail:.1e} outside [−{l}, {l}]",
            m + j
        )));
    }
    let top = (k + j).max(m + j);
    let rule = crate::quadrature::CompositeRule::new(-l, l, quad.panels);
    let vals = crate::par::map(&rule.nodes, |&x| -> Result<f64> {
        let s = EigenSet::new(top, x);
        Ok(deriv_product_in(&s, k, k + j)? * s.h(m) * s.h(m + j) * (-x * x).exp())
    });
    let mut acc = 0.0;
    for (v, w) in vals.into_iter().zip(&rule.weights) {
        acc += w * v?;
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// Tables

#[derive(Debug, Clone, PartialEq)]
pub struct PatternTable {
    pub m: usize,
    pub n: usize,
    pub rep: Representation,
    pub trunc: Truncation,
    pub grid: EvalGrid,
    pub values: Vec<f64>,
}

impl PatternTable {
    pub fn compute(m: usize, n: usize, rep: Representation, trunc: Truncation, grid: EvalGrid) -> Result<Self> {
        let vals = crate::par::map(grid.points(), |&x| pattern_value_trunc(rep, m, n, x, trunc));
        let values = vals.into_iter().collect::<Result<Vec<_>>>()?;
        Ok(PatternTable {
            m,
            n,
            rep,
            trunc,
            grid,
            values,
        })
    }

    /// max |F(−x) − (−1)^{m+n}F(x)|, `None` on a grid that is not symmetric.
    pub fn parity_defect(&self) -> Option<f64> {
        if !self.grid.is_symmetric() {
            return None;
        }
        let sign = if (self.m + self.n) % 2 == 0 { 1.0 } else { -1.0 };
        let len = self.values.len();
        Some(
            (0..len)
                .map(|i| (self.values[len - 1 - i] - sign * self.values[i]).abs())
                .fold(0.0, f64::max),
        )
    }

    pub fn to_csv_string(&self) -> String {
        let mut s = format!(
            "# m={}\n# n={}\n# rep={}\n# trunc={}\nx,value\n",
            self.m, self.n, self.rep, self.trunc
        );
        for (x, v) in self.grid.points().iter().zip(&self.values) {
            s.push_str(&fmt_f64(*x));
            s.push(',');
            s.push_str(&fmt_f64(*v));
            s.push('\n');
        }
        s
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut m = None;
        let mut n = None;
        let mut rep = None;
        let mut trunc = Truncation::Adaptive;
        let mut xs = Vec::new();
        let mut vs = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            if let Some(h) = line.strip_prefix('#') {
                let (k, v) = h.split_once('=').ok_or_else(|| Error::Parse(format!("bad header '{line}'")))?;
                let v = v.trim();
                let bad = |_| Error::Parse(format!("bad header '{line}'"));
                match k.trim() {
                    "m" => m = Some(v.parse::<usize>().map_err(bad)?),
                    "n" => n = Some(v.parse::<usize>().map_err(bad)?),
                    "rep" => rep = Some(v.parse()?),
                    "trunc" => trunc = v.parse()?,
                    _ => {}
                }
                continue;
            }
            if line.starts_with("x,") {
                continue;
            }
            let (a, b) = line
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("bad row '{line}'")))?;
            let p = |t: &str| t.trim().parse::<f64>().map_err(|e| Error::Parse(format!("bad number '{t}': {e}")));
            xs.push(p(a)?);
            vs.push(p(b)?);
        }
        let miss = |w: &str| Error::Parse(format!("pattern table lacks '{w}' header"));
        Ok(PatternTable {
            m: m.ok_or_else(|| miss("m"))?,
            n: n.ok_or_else(|| miss("n"))?,
            rep: rep.ok_or_else(|| miss("rep"))?,
            trunc,
            grid: EvalGrid::new(xs, None)?,
            values: vs,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn zero_nn(n: usize) -> f64 {
        if n % 2 == 0 {
            2.0
        } else {
            -2.0
        }
    }

    fn zero_n2n(n: usize) -> f64 {
        let sign = if n % 2 == 0 { -1.0 } else { 1.0 };
        sign * (2 * n + 3) as f64 / (((n + 2) * (n + 1)) as f64).sqrt()
    }

    // Taylor oracle of F_{0,0}.
    fn f00_taylor(x: f64) -> f64 {
        let y = 2.0 * x;
        let mut term = 1.0;
        let mut s = 1.0;
        for k in 1..400 {
            term *= -(k as f64) * y * y / ((2 * k) as f64 * (2 * k - 1) as f64);
            s += term;
            if term.abs() < 1e-18 * s.abs() && k > 10 {
                break;
            }
        }
        2.0 * s
    }

    #[test]
    fn zero_values() {
        for n in 0..=12 {
            let a = pattern_hermite_series(n, n, 0.0, Truncation::Adaptive).unwrap();
            assert!((a - zero_nn(n)).abs() <= 1e-10, "n={n}: {a}");
            let b = pattern_hermite_series(n + 2, n, 0.0, Truncation::Adaptive).unwrap();
            assert!((b - zero_n2n(n)).abs() <= 1e-10, "n={n}: {b}");
            for l in 0..3 {
                let c = pattern_hermite_series(n + 2 * l + 1, n, 0.0, Truncation::Adaptive).unwrap();
                assert_eq!(c, 0.0);
            }
        }
        assert!((pattern_hermite_series(2, 0, 0.0, Truncation::Adaptive).unwrap() + 3.0 / 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn f00_forms_agree() {
        assert_eq!(pattern_f00_closed(0.0), 2.0);
        for i in 0..=80 {
            let x = -4.0 + 0.1 * i as f64;
            let s = pattern_hermite_series(0, 0, x, Truncation::Adaptive).unwrap();
            assert!((s - pattern_f00_closed(x)).abs() <= 1e-10, "x={x}");
            if x.abs() <= 2.0 {
                assert!((f00_taylor(x) - pattern_f00_closed(x)).abs() <= 1e-12);
            }
            let d = pattern_deriv_product(0, 0, x).unwrap();
            assert!((d - pattern_f00_closed(x)).abs() <= 1e-12, "x={x}");
        }
    }

    #[test]
    fn f00_tail_is_negative_inverse_square() {
        for &x in &[8.0, 15.0, 40.0] {
            let f = pattern_f00_closed(x);
            assert!(f < 0.0);
            let lead = -1.0 / (x * x) - 1.5 / x.powi(4);
            assert!((f - lead).abs() <= 6.0 / x.powi(6), "x={x}: {f} vs {lead}");
        }
    }

    #[test]
    fn deriv_product_region_identity() {
        assert!((pattern_deriv_product(1, 0, 0.5).unwrap() - pattern_canonical(1, 0, 0.5).unwrap()).abs() <= 1e-10);
        for n in 0..=8 {
            for m in 0..=(n + 1).min(8) {
                for i in 0..=60 {
                    let x = -6.0 + 0.2 * i as f64;
                    let a = pattern_deriv_product(m, n, x).unwrap();
                    let b = pattern_canonical(m, n, x).unwrap();
                    assert!((a - b).abs() <= 1e-9, "m={m} n={n} x={x}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn cross_representation() {
        for m in 0..=8 {
            for n in 0..=8 {
                for i in 0..=60 {
                    let x = -6.0 + 0.2 * i as f64;
                    let a = pattern_hermite_series(m, n, x, Truncation::Adaptive).unwrap();
                    let b = pattern_value(Representation::Symmetrized, m, n, x).unwrap();
                    assert!((a - b).abs() <= 1e-8, "m={m} n={n} x={x}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn swapped_is_transposed() {
        for &x in &[-2.3, 0.4, 3.1] {
            let a = pattern_value(Representation::DerivProductSwapped, 4, 1, x).unwrap();
            assert_eq!(a, pattern_deriv_product(1, 4, x).unwrap());
        }
    }

    #[test]
    fn correction_examples() {
        for n in 0..6 {
            let t = correction_terms(n + 2, n);
            assert_eq!(t.len(), 1);
            assert_eq!(t[0].0, 0);
            let want = -(ln_factorial(n) - ln_factorial(n + 2)).mul_add(0.5, 0.0).exp();
            assert!((t[0].1 - want).abs() < 1e-14);
            let t3 = correction_terms(n, n + 3);
            assert_eq!(t3[0].0, 1);
            let want3 = -(2.0 * (ln_factorial(n) - ln_factorial(n + 3)).exp()).sqrt();
            assert!((t3[0].1 - want3).abs() < 1e-14);
            assert!(correction_terms(n + 1, n).is_empty());
        }
        let x = 0.77;
        let diff = pattern_canonical(2, 0, x).unwrap() - pattern_hermite_series(2, 0, x, Truncation::Adaptive).unwrap();
        assert!((diff + 0.5f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn general_correction_holds_to_ten() {
        // F from the series route against F″_{min,max} wherever both are valid.
        for m in 0..=10 {
            for n in 0..=10 {
                for &x in &[-4.5, -1.3, 0.0, 0.6, 2.2, 4.9] {
                    let a = pattern_canonical(m, n, x).unwrap();
                    let b = pattern_deriv_product(m.min(n), m.max(n), x).unwrap();
                    assert!((a - b).abs() <= 1e-9 * b.abs().max(1.0), "m={m} n={n} x={x}");
                }
            }
        }
    }

    #[test]
    fn canonical_vanishes_at_infinity() {
        for &(m, n) in &[(0, 0), (3, 1), (6, 0), (2, 7)] {
            let far = pattern_canonical(m, n, 30.0).unwrap().abs();
            assert!(far < 0.05, "({m},{n}) at 30: {far}");
            assert!(far < pattern_canonical(m, n, 10.0).unwrap().abs());
        }
    }

    #[test]
    fn fixed_truncation_flags() {
        let ok = pattern_hermite_series(1, 1, 0.5, Truncation::Fixed(60)).unwrap();
        assert!((ok - pattern_hermite_series(1, 1, 0.5, Truncation::Adaptive).unwrap()).abs() < 1e-12);
        let err = pattern_hermite_series(1, 1, 6.0, Truncation::Fixed(60)).unwrap_err();
        assert!(matches!(err, Error::NonConvergence(ref s) if s.contains("x_max")), "{err}");
        let xm = series_x_max(1, 1, 60);
        assert!(xm > 3.0 && xm < 6.0);
        assert!(series_x_max(1, 1, 120) > xm);
        assert!(pattern_hermite_series(0, 0, 0.0, Truncation::Fixed(10)).is_err());
    }

    #[test]
    fn series_guard_refuses_large_x() {
        assert!(matches!(
            pattern_hermite_series(2, 2, 14.0, Truncation::Adaptive),
            Err(Error::Range { max_safe, .. }) if max_safe > 9.0 && max_safe < 14.0
        ));
    }

    #[test]
    fn tightened_stop_changes_little() {
        for &(m, n, x) in &[(0, 0, 1.0), (3, 5, -2.5), (8, 2, 4.5), (6, 6, 5.9)] {
            let a = pattern_hermite_series_detail(m, n, x, Truncation::Adaptive, ADAPTIVE_TOL).unwrap();
            let b = pattern_hermite_series_detail(m, n, x, Truncation::Adaptive, ADAPTIVE_TOL / 10.0).unwrap();
            assert!((a.value - b.value).abs() < 1e-12);
        }
    }

    #[test]
    fn asymptotic_form() {
        assert!(matches!(pattern_asymptotic(0, 0, 3.0), Err(Error::Domain(_))));
        // The m = n = 0 series is exactly F_{0,0}(x/√2)/2.
        for &x in &[4.0, 6.0, 8.0] {
            let a = pattern_asymptotic(0, 0, x).unwrap();
            let want = 0.5 * pattern_f00_closed(x / 2f64.sqrt());
            assert!((a - want).abs() <= 1e-10, "x={x}");
        }
        // Converges to F_{0,0} like 1/x².
        let rel = |x: f64| (pattern_asymptotic(0, 0, x).unwrap() / pattern_f00_closed(x) - 1.0).abs();
        assert!(rel(6.0) > 0.01 && rel(6.0) < 0.06);
        assert!(rel(8.0) < rel(6.0) * 0.7);
        assert!(matches!(pattern_asymptotic(0, 0, 12.0), Err(Error::Range { .. })));
        for &(m, n) in &[(1, 0), (2, 1), (3, 3)] {
            let s = if (m + n) % 2 == 0 { 1.0 } else { -1.0 };
            let a = pattern_asymptotic(m, n, 5.0).unwrap();
            let b = pattern_asymptotic(m, n, -5.0).unwrap();
            assert!((b - s * a).abs() <= 1e-12 * a.abs().max(1e-300));
            let r = pattern_asymptotic_leading(m, n, 8.0) / pattern_asymptotic_leading(m, n, 10.0);
            assert!((r - 0.8f64.powi((m + n) as i32)).abs() < 1e-14);
        }
    }

    #[test]
    fn nonuniqueness_examples() {
        let grid = EvalGrid::uniform(-4.0, 4.0, 81).unwrap();
        let fit = pattern_nonuniqueness_residual(Representation::HermiteSeries, Representation::Canonical, 2, 0, &grid).unwrap();
        assert_eq!(fit.degrees, vec![0]);
        assert!((fit.coefficients[0] - 0.5f64.sqrt()).abs() < 1e-10);
        for &(m, n) in &[(3, 1), (5, 2), (0, 7)] {
            let f = pattern_nonuniqueness_residual(Representation::HermiteSeries, Representation::Symmetrized, m, n, &grid).unwrap();
            assert!(f.coefficients.iter().all(|c| c.abs() < 1e-9), "{f:?}");
            let g = pattern_nonuniqueness_residual(Representation::Canonical, Representation::Canonical, m, n, &grid).unwrap();
            assert!(g.coefficients.iter().all(|&c| c == 0.0) && g.residual == 0.0);
        }
        let f = pattern_nonuniqueness_residual(Representation::Canonical, Representation::HermiteSeries, 5, 2, &grid).unwrap();
        assert!(f.residual < 1e-8);
        let want = correction_terms(5, 2);
        assert!((f.coefficients[0] - want[0].1).abs() < 1e-9);
    }

    #[test]
    fn nonuniqueness_catches_inconsistency() {
        let xs: Vec<f64> = (0..41).map(|i| -3.0 + 0.15 * i as f64).collect();
        let bump: Vec<f64> = xs.iter().map(|x| (-x * x).exp()).collect();
        let err = check_fit(fit_span(&xs, &bump, 1.0, 3).unwrap());
        assert!(matches!(err, Err(Error::Representation { .. })), "{err:?}");
        let poly: Vec<f64> = xs.iter().map(|x| 0.25 * 2.0 * x).collect();
        let fit = check_fit(fit_span(&xs, &poly, 1.0, 3).unwrap()).unwrap();
        assert!((fit.coefficients[0] - 0.25).abs() < 1e-14);
    }

    #[test]
    fn deriv_product_above_diagonal() {
        // F″_{m,n} = 2F′_{m,n} − F_{m,n} once m > n+1.
        let grid = EvalGrid::uniform(-3.0, 3.0, 41).unwrap();
        let fit = pattern_nonuniqueness_residual(Representation::DerivProduct, Representation::HermiteSeries, 3, 0, &grid).unwrap();
        assert!((fit.coefficients[0] - 1.0 / 3f64.sqrt()).abs() < 1e-10);
        for &x in &[-2.0, 0.3, 4.1] {
            let lhs = pattern_deriv_product(6, 1, x).unwrap();
            let rhs = 2.0 * pattern_hermite_series(6, 1, x, Truncation::Adaptive).unwrap() - pattern_canonical(6, 1, x).unwrap();
            assert!((lhs - rhs).abs() < 1e-9 * lhs.abs().max(1.0));
        }
    }

    #[test]
    fn ode_checks() {
        let grid = EvalGrid::uniform(-2.0, 2.0, 41).unwrap();
        let r = ode_residual(2, 5, ProductChoice::HG, &grid);
        assert!(r <= 1e-4, "{r}");
        for c in [ProductChoice::HH, ProductChoice::GH, ProductChoice::GG] {
            let r = ode_residual(3, 1, c, &grid);
            assert!(r <= 1e-4, "{c:?}: {r}");
        }
        let r3 = ode3_residual(3, ProductChoice::HH, &grid);
        assert!(r3 <= 1e-4, "{r3}");
        assert_eq!(ode_residual_fn(1, 2, |_| 0.0, &grid), 0.0);
        // A wrong index pair is detected.
        assert!(ode_residual_fn(2, 4, |x| product_value(ProductChoice::HG, 2, 5, x), &grid) > 1e-2);
    }

    #[test]
    fn orthogonality_examples() {
        let q = OrthoQuad::default();
        assert!((orthogonality_check(2, 2, 1, &q).unwrap() - 1.0).abs() <= 1e-6);
        assert!(orthogonality_check(1, 4, 0, &q).unwrap().abs() <= 1e-6);
        assert!((orthogonality_check(0, 0, 0, &q).unwrap() - 1.0).abs() <= 1e-6);
        let narrow = OrthoQuad {
            half_width: Some(2.0),
            ..q
        };
        assert!(matches!(orthogonality_check(0, 3, 1, &narrow), Err(Error::Window(_))));
    }

    #[test]
    fn orthogonality_full_range() {
        let q = OrthoQuad::default();
        for k in 0..=6 {
            for m in 0..=6 {
                for j in 0..=4 {
                    let v = orthogonality_check(k, m, j, &q).unwrap();
                    let want = if k == m { 1.0 } else { 0.0 };
                    assert!((v - want).abs() <= 1e-6, "k={k} m={m} j={j}: {v}");
                }
            }
        }
    }

    #[test]
    fn table_csv_round_trip() {
        let grid = EvalGrid::uniform(-5.0, 5.0, 101).unwrap();
        let t = PatternTable::compute(0, 0, Representation::Canonical, Truncation::Adaptive, grid).unwrap();
        assert_eq!(t.values[50], 2.0);
        let s = t.to_csv_string();
        assert!(s.starts_with("# m=0\n# n=0\n# rep=canonical\n# trunc=adaptive\nx,value\n"));
        let back = PatternTable::from_csv_str(&s).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.to_csv_string(), s);
        assert!(t.parity_defect().unwrap() <= 1e-9);
    }

    #[test]
    fn tags_parse() {
        for r in Representation::ALL {
            assert_eq!(r.tag().parse::<Representation>().unwrap(), r);
        }
        assert_eq!("fixed(12)".parse::<Truncation>().unwrap(), Truncation::Fixed(12));
        assert_eq!("fixed:7".parse::<Truncation>().unwrap(), Truncation::Fixed(7));
        assert!("fixed(0)".parse::<Truncation>().is_err());
        assert_eq!("h*g".parse::<ProductChoice>().unwrap(), ProductChoice::HG);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn parity_and_swap(m in 0usize..9, n in 0usize..9, x in 0.0f64..5.5) {
            let s = if (m + n) % 2 == 0 { 1.0 } else { -1.0 };
            for rep in Representation::ALL {
                let a = pattern_value(rep, m, n, x).unwrap();
                let b = pattern_value(rep, m, n, -x).unwrap();
                prop_assert!((b - s * a).abs() <= 1e-9 * a.abs().max(1.0), "{rep}");
                if rep.is_index_symmetric() {
                    let c = pattern_value(rep, n, m, x).unwrap();
                    prop_assert!((c - a).abs() <= 1e-9 * a.abs().max(1.0), "{rep}");
                }
            }
        }

        #[test]
        fn next_diagonal_series_is_canonical(n in 0usize..10, x in -5.0f64..5.0) {
            let a = pattern_hermite_series(n + 1, n, x, Truncation::Adaptive).unwrap();
            prop_assert_eq!(a, pattern_canonical(n + 1, n, x).unwrap());
            let b = pattern_deriv_product(n + 1, n, x).unwrap();
            prop_assert!((a - b).abs() <= 1e-9);
        }

        #[test]
        fn anomaly_level_derivative(x in -4.0f64..4.0) {
            // F″_{1,0} and F″_{0,1} agree although h₁g₀ and h₀g₁ differ by a constant.
            let a = pattern_deriv_product(1, 0, x).unwrap();
            let b = pattern_deriv_product(0, 1, x).unwrap();
            prop_assert!((a - b).abs() <= 1e-12);
            let s = EigenSet::new(1, x);
            let diff = s.h(1) * s.g(0) - s.h(0) * s.g(1);
            prop_assert!((diff - 2f64.sqrt()).abs() <= 1e-12);
        }
    }
}
