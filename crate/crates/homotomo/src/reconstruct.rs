//! Inverse problems on tomograms: Fock matrix elements, Q-function values and
//! normally ordered moments, plus the density matrix built from moments.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pattern::{pattern_value, Representation};
use crate::quadrature::{half_period_angles, CompositeRule};
use crate::specfun::{dawson_deriv, hermite_poly, ln_factorial};
use crate::states::{hermiticity_defect, DensityMatrix, MomentSet, RadonSource};

/// Angles used for analytic sources when none are given.
pub const DEFAULT_N_PHI: usize = 96;
pub const DEFAULT_PANELS: usize = 64;
pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_S_MAX: usize = 8;
pub const DEFAULT_J_MAX: usize = 24;
/// Hermite-weighted tail mass tolerated outside the moment window.
pub const MOMENT_TAIL_TOL: f64 = 1e-10;
/// Hermiticity required of a reconstructed matrix before symmetrization.
pub const RECON_HERMITIAN_TOL: f64 = 1e-8;
/// Magnitude of the last moment-series term above which a divergence warning is issued.
pub const SERIES_WARN: f64 = 1e-6;

const C0: Complex64 = Complex64::new(0.0, 0.0);

// ---------------------------------------------------------------------------
// Specs

/// Discrete angle sets on [0, π).
#[derive(Debug, Clone, PartialEq)]
pub enum AngleDivision {
    /// φ₀ + mπ/(s+1), m = 0…s.
    Harmonic { order: usize, phi0: f64 },
    Explicit(Vec<f64>),
}

impl AngleDivision {
    pub fn harmonic(order: usize, phi0: f64) -> Self {
        AngleDivision::Harmonic { order, phi0 }
    }

    /// Validated angles, reduced to [0, π).
    pub fn angles(&self) -> Result<Vec<f64>> {
        let raw = match self {
            AngleDivision::Harmonic { order, phi0 } => {
                if !phi0.is_finite() {
                    return Err(Error::domain("φ₀ must be finite"));
                }
                half_period_angles(order + 1, *phi0)
            }
            AngleDivision::Explicit(v) => v.clone(),
        };
        if raw.is_empty() || raw.iter().any(|a| !a.is_finite()) {
            return Err(Error::domain("angle division needs finite angles"));
        }
        let out: Vec<f64> = raw.iter().map(|a| a.rem_euclid(PI)).collect();
        for i in 0..out.len() {
            for j in i + 1..out.len() {
                if (out[i] - out[j]).sin().abs() < 1e-12 {
                    return Err(Error::SingularDivision(format!(
                        "angles {} and {} coincide modulo π",
                        raw[i], raw[j]
                    )));
                }
            }
        }
        Ok(out)
    }
}

/// Quadrature plumbing shared by all reconstruction routes.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureSpec {
    /// q half-width; `None` uses the source extent.
    pub q_window: Option<f64>,
    /// 16-point Gauss–Legendre panels on [−L, L]; the Richardson check uses half as many.
    pub panels: usize,
    /// Trapezoid angles for sources without stored angles (or to override them).
    pub n_phi: Option<usize>,
    /// Offset of the trapezoid angles.
    pub phi0: f64,
    /// Gate on the full/half-grid disagreement.
    pub tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            q_window: None,
            panels: DEFAULT_PANELS,
            n_phi: None,
            phi0: 0.0,
            tol: DEFAULT_TOL,
        }
    }
}

impl QuadratureSpec {
    fn validate(&self) -> Result<()> {
        if self.panels < 2 {
            return Err(Error::domain("at least two panels are needed"));
        }
        if !(self.tol > 0.0) {
            return Err(Error::domain("tolerance must be positive"));
        }
        if let Some(l) = self.q_window {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::domain("q-window must be positive"));
            }
        }
        if self.n_phi == Some(0) {
            return Err(Error::domain("n_phi must be positive"));
        }
        Ok(())
    }

    fn angles<S: RadonSource + ?Sized>(&self, src: &S) -> Vec<f64> {
        match (self.n_phi, src.native_angles()) {
            (None, Some(a)) => a,
            (n, _) => half_period_angles(n.unwrap_or(DEFAULT_N_PHI), self.phi0),
        }
    }

    fn window<S: RadonSource + ?Sized>(&self, src: &S) -> f64 {
        self.q_window.unwrap_or_else(|| src.q_extent())
    }
}

/// Marginals sampled on angles × Gauss–Legendre nodes, for a full and a half rule.
struct Sampled {
    phis: Vec<f64>,
    full: Grid,
    half: Grid,
    sqrt_hbar: f64,
}

struct Grid {
    rule: CompositeRule,
    /// row-major n_phi × nodes
    vals: Vec<f64>,
}

impl Grid {
    fn new<S: RadonSource + ?Sized>(src: &S, phis: &[f64], l: f64, panels: usize) -> Self {
        let rule = CompositeRule::new(-l, l, panels);
        let rows = crate::par::map(phis, |&phi| rule.nodes.iter().map(|&q| src.marginal(phi, q)).collect::<Vec<_>>());
        Grid {
            rule,
            vals: rows.concat(),
        }
    }

    fn row(&self, i: usize) -> &[f64] {
        let n = self.rule.nodes.len();
        &self.vals[i * n..(i + 1) * n]
    }

    /// ∫ W̆(φ_i, q) f(q) dq for every angle, with f tabulated at the nodes.
    fn projections(&self, f: &[f64]) -> Vec<f64> {
        (0..self.vals.len() / f.len())
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(&self.rule.weights)
                    .zip(f)
                    .map(|((v, w), g)| v * w * g)
                    .sum()
            })
            .collect()
    }
}

impl Sampled {
    fn new<S: RadonSource + ?Sized>(src: &S, spec: &QuadratureSpec, l: f64) -> Result<Self> {
        spec.validate()?;
        let phis = spec.angles(src);
        Ok(Sampled {
            full: Grid::new(src, &phis, l, spec.panels),
            half: Grid::new(src, &phis, l, spec.panels / 2),
            phis,
            sqrt_hbar: src.hbar().sqrt(),
        })
    }

    /// (1/N)Σ_i e^{iνφ_i} p_i
    fn angle_mean(&self, nu: i64, p: &[f64]) -> Complex64 {
        let s: Complex64 = self
            .phis
            .iter()
            .zip(p)
            .map(|(&phi, &v)| Complex64::from_polar(v, nu as f64 * phi))
            .sum();
        s / self.phis.len() as f64
    }
}

fn gate(full: Complex64, half: Complex64, tol: f64, what: &str) -> Result<f64> {
    let d = (full - half).norm();
    if d > tol {
        return Err(Error::Accuracy(format!(
            "{what}: full and half q-grids disagree by {d:.2e} (> {tol:.1e})"
        )));
    }
    Ok(d)
}

// ---------------------------------------------------------------------------
// Fock elements

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockElement {
    pub value: Complex64,
    /// |full − half-grid| difference.
    pub richardson: f64,
}

/// Samples a source once and reconstructs any number of Fock matrix elements from it.
pub struct FockReconstructor {
    s: Sampled,
    spec: QuadratureSpec,
}

impl FockReconstructor {
    pub fn new<S: RadonSource + ?Sized>(src: &S, spec: &QuadratureSpec) -> Result<Self> {
        let l = spec.window(src);
        Ok(FockReconstructor {
            s: Sampled::new(src, spec, l)?,
            spec: spec.clone(),
        })
    }

    fn pattern_at(&self, g: &Grid, rep: Representation, m: usize, n: usize) -> Result<Vec<f64>> {
        let sh = self.s.sqrt_hbar;
        crate::par::map(&g.rule.nodes, |&q| pattern_value(rep, m, n, q / sh))
            .into_iter()
            .collect()
    }

    /// (1/π)∫dφ ∫dq W̆ e^{i(m−n)φ} F_{m,n}(q/√ħ).
    pub fn element(&self, m: usize, n: usize, rep: Representation) -> Result<FockElement> {
        let nu = m as i64 - n as i64;
        let ff = self.pattern_at(&self.s.full, rep, m, n)?;
        let fh = self.pattern_at(&self.s.half, rep, m, n)?;
        let full = self.s.angle_mean(nu, &self.s.full.projections(&ff));
        let half = self.s.angle_mean(nu, &self.s.half.projections(&fh));
        let richardson = gate(full, half, self.spec.tol, &format!("ρ_{{{m},{n}}}"))?;
        Ok(FockElement {
            value: full,
            richardson,
        })
    }

    /// All ρ_{mn}, m, n ≤ nmax; Hermiticity asserted, then (ρ+ρ†)/2.
    pub fn density(&self, nmax: usize, rep: Representation) -> Result<ReconstructedDensity> {
        let pairs: Vec<(usize, usize)> = (0..=nmax).flat_map(|m| (0..=nmax).map(move |n| (m, n))).collect();
        let mut raw = DMatrix::from_element(nmax + 1, nmax + 1, C0);
        let mut worst = 0.0f64;
        for &(m, n) in &pairs {
            let e = self.element(m, n, rep)?;
            raw[(m, n)] = e.value;
            worst = worst.max(e.richardson);
        }
        finish_density(raw, worst)
    }
}

fn finish_density(raw: DMatrix<Complex64>, richardson: f64) -> Result<ReconstructedDensity> {
    let defect = hermiticity_defect(&raw);
    if defect > RECON_HERMITIAN_TOL {
        return Err(Error::Hermiticity(defect));
    }
    let sym = (&raw + raw.adjoint()) * Complex64::new(0.5, 0.0);
    let density = DensityMatrix::from_estimate(sym)?;
    Ok(ReconstructedDensity {
        trace: density.trace(),
        density,
        hermiticity_defect: defect,
        richardson,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructedDensity {
    pub density: DensityMatrix,
    /// Defect before symmetrization.
    pub hermiticity_defect: f64,
    pub trace: f64,
    /// Largest full/half-grid difference over the elements.
    pub richardson: f64,
}

/// One Fock matrix element ⟨m|ρ|n⟩ from a tomogram.
pub fn fock_element_from_tomogram<S: RadonSource + ?Sized>(
    t: &S,
    m: usize,
    n: usize,
    rep: Representation,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    Ok(FockReconstructor::new(t, spec)?.element(m, n, rep)?.value)
}

/// Reconstruct ρ up to `nmax` with Hermitian symmetrization.
pub fn density_from_tomogram<S: RadonSource + ?Sized>(
    t: &S,
    nmax: usize,
    rep: Representation,
    spec: &QuadratureSpec,
) -> Result<ReconstructedDensity> {
    FockReconstructor::new(t, spec)?.density(nmax, rep)
}

// ---------------------------------------------------------------------------
// Q-function

/// Q(α) = (1/π)∫dφ∫dq W̆ (2/π) F_D′(q/√ħ − √2 Re(αe^{−iφ})).
pub fn qfunction_from_tomogram<S: RadonSource + ?Sized>(t: &S, alpha: Complex64, spec: &QuadratureSpec) -> Result<f64> {
    let s = Sampled::new(t, spec, spec.window(t))?;
    let eval = |g: &Grid| -> f64 {
        let mut acc = 0.0;
        for (i, &phi) in s.phis.iter().enumerate() {
            let shift = std::f64::consts::SQRT_2 * (alpha * Complex64::from_polar(1.0, -phi)).re;
            let row: f64 = g
                .row(i)
                .iter()
                .zip(&g.rule.weights)
                .zip(&g.rule.nodes)
                .map(|((v, w), q)| v * w * dawson_deriv(q / s.sqrt_hbar - shift))
                .sum();
            acc += row;
        }
        acc * 2.0 / (PI * s.phis.len() as f64)
    };
    let full = eval(&s.full);
    let half = eval(&s.half);
    gate(full.into(), half.into(), spec.tol, "Q-function")?;
    Ok(full)
}

// ---------------------------------------------------------------------------
// Moments

/// 2^{−s/2}∫dq W̆(φ_i; q) H_s(q/√ħ) at the given angles, gated and window-checked.
pub fn hermite_projections<S: RadonSource + ?Sized>(
    t: &S,
    s: usize,
    angles: &[f64],
    spec: &QuadratureSpec,
) -> Result<Vec<f64>> {
    spec.validate()?;
    let sh = t.hbar().sqrt();
    // H_s shifts the weight outward by about σ√(2s); the extent is about 8σ.
    let l = spec
        .q_window
        .unwrap_or_else(|| t.q_extent() * (1.0 + (2.0 * s as f64).sqrt() / 8.0));
    // Past the sampled range there is nothing to integrate; the tail check reports the cut.
    let l = t.data_extent().map_or(l, |e| l.min(e));
    let scale = 2f64.powf(-(s as f64) / 2.0);
    let h = |q: f64| hermite_poly(s, q / sh).map(|v| v * scale);

    let tail = moment_tail(t, angles, l, &h)?;
    if tail > MOMENT_TAIL_TOL {
        return Err(Error::Window(format!(
            "Hermite-weighted tail mass {tail:.1e} of order {s} lies outside [−{l}, {l}]"
        )));
    }
    let full = CompositeRule::new(-l, l, spec.panels);
    let half = CompositeRule::new(-l, l, spec.panels / 2);
    let hf = full.nodes.iter().map(|&q| h(q)).collect::<Result<Vec<_>>>()?;
    let hh = half.nodes.iter().map(|&q| h(q)).collect::<Result<Vec<_>>>()?;
    let out = crate::par::map(angles, |&phi| {
        let mut a = 0.0;
        let mut mass = 0.0;
        for ((&q, w), g) in full.nodes.iter().zip(&full.weights).zip(&hf) {
            let v = w * g * t.marginal(phi, q);
            a += v;
            mass += v.abs();
        }
        let b: f64 = half.nodes.iter().zip(&half.weights).zip(&hh).map(|((&q, w), g)| w * g * t.marginal(phi, q)).sum();
        (a, b, mass)
    });
    let mut vals = Vec::with_capacity(out.len());
    for (a, b, mass) in out {
        // Hermite weights of high order cancel; allow for that rounding.
        let allowed = spec.tol * a.abs().max(1.0) + 64.0 * f64::EPSILON * mass;
        gate(a.into(), b.into(), allowed, &format!("order-{s} projection"))?;
        vals.push(a);
    }
    Ok(vals)
}

fn moment_tail<S: RadonSource + ?Sized, H: Fn(f64) -> Result<f64>>(t: &S, angles: &[f64], l: f64, h: &H) -> Result<f64> {
    let sh = t.hbar().sqrt();
    let step = (angles.len() / 16).max(1);
    let mut worst = 0.0f64;
    for &phi in angles.iter().step_by(step) {
        let rule = CompositeRule::new(l, l + 8.0 * sh, 8);
        let mut mass = 0.0;
        for (&q, &w) in rule.nodes.iter().zip(&rule.weights) {
            mass += w * (t.marginal(phi, q).abs() * h(q)?.abs() + t.marginal(phi, -q).abs() * h(-q)?.abs());
        }
        // Sampled data ends at the window: bound its tail by the edge values.
        let edge = (t.marginal(phi, l).abs() * h(l)?.abs() + t.marginal(phi, -l).abs() * h(-l)?.abs()) * sh;
        worst = worst.max(mass + edge);
    }
    Ok(worst)
}

fn moment_prefactor(k: usize, l: usize) -> f64 {
    (ln_factorial(k) + ln_factorial(l) - ln_factorial(k + l)).exp()
}

/// ⟨a†ᵏaˡρ⟩ = k!l!/(k+l)! · (1/π)∫dφ e^{−i(k−l)φ} 2^{−(k+l)/2}∫dq W̆ H_{k+l}(q/√ħ).
pub fn moment_angle_average<S: RadonSource + ?Sized>(t: &S, k: usize, l: usize, spec: &QuadratureSpec) -> Result<Complex64> {
    spec.validate()?;
    let phis = spec.angles(t);
    let p = hermite_projections(t, k + l, &phis, spec)?;
    Ok(weighted_mean(&phis, &p, k, l) * moment_prefactor(k, l))
}

fn weighted_mean(phis: &[f64], p: &[f64], k: usize, l: usize) -> Complex64 {
    let nu = -(k as f64 - l as f64);
    let s: Complex64 = phis.iter().zip(p).map(|(&phi, &v)| Complex64::from_polar(v, nu * phi)).sum();
    s / phis.len() as f64
}

/// All moments up to `s_max` by the angle average.
pub fn moment_set_from_tomogram<S: RadonSource + ?Sized>(t: &S, s_max: usize, spec: &QuadratureSpec) -> Result<MomentSet> {
    spec.validate()?;
    let phis = spec.angles(t);
    let mut ms = MomentSet::new(s_max);
    for s in 1..=s_max {
        let p = hermite_projections(t, s, &phis, spec)?;
        for k in 0..=s {
            let l = s - k;
            if k > l {
                continue;
            }
            ms.set(k, l, weighted_mean(&phis, &p, k, l) * moment_prefactor(k, l))?;
        }
    }
    Ok(ms)
}

/// Finite harmonic-division sum: k!l!/(k+l+1)! Σ_m e^{−i(k−l)φ_m} 2^{−(k+l)/2}∫W̆(φ_m) H_{k+l}.
pub fn moment_discrete_angles<S: RadonSource + ?Sized>(
    t: &S,
    k: usize,
    l: usize,
    div: &AngleDivision,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    match div {
        AngleDivision::Harmonic { order, .. } if *order == k + l => {}
        AngleDivision::Harmonic { order, .. } => {
            return Err(Error::Arity(format!(
                "moment of order {} needs a harmonic division of order {}, got {order}",
                k + l,
                k + l
            )))
        }
        AngleDivision::Explicit(_) => {
            return Err(Error::Arity(
                "the discrete-angle formula needs a harmonic division; use moments_low_order_custom or moments_linear_solve".into(),
            ))
        }
    }
    let raw = match div {
        AngleDivision::Harmonic { order, phi0 } => half_period_angles(order + 1, *phi0),
        AngleDivision::Explicit(_) => unreachable!(),
    };
    div.angles()?;
    let p = hermite_projections(t, k + l, &raw, spec)?;
    Ok(weighted_mean(&raw, &p, k, l) * moment_prefactor(k, l))
}

/// φ = (0, π/4, π/2)
pub fn preset_quarter_angles() -> [f64; 3] {
    [0.0, PI / 4.0, PI / 2.0]
}

/// φ = (0, π/3, 2π/3)
pub fn preset_harmonic_thirds() -> [f64; 3] {
    [0.0, PI / 3.0, 2.0 * PI / 3.0]
}

fn checked_sin(a: f64, b: f64) -> Result<f64> {
    let s = (a - b).sin();
    if s.abs() < 1e-12 {
        return Err(Error::SingularDivision(format!("angles {a} and {b} coincide modulo π")));
    }
    Ok(s)
}

/// Raw ∫dq W̆(φ_i; q) H_s(q/√ħ) (no 2^{−s/2}).
fn raw_projections<S: RadonSource + ?Sized>(t: &S, s: usize, angles: &[f64], spec: &QuadratureSpec) -> Result<Vec<f64>> {
    let f = 2f64.powf(s as f64 / 2.0);
    Ok(hermite_projections(t, s, angles, spec)?.into_iter().map(|v| v * f).collect())
}

/// ⟨aρ⟩ from two angles.
pub fn first_order_two_angles<S: RadonSource + ?Sized>(t: &S, phi0: f64, phi1: f64, spec: &QuadratureSpec) -> Result<Complex64> {
    let s10 = checked_sin(phi1, phi0)?;
    let j = raw_projections(t, 1, &[phi0, phi1], spec)?;
    let i = Complex64::i();
    let a = Complex64::from_polar(j[0], phi1) / (i * s10) + Complex64::from_polar(j[1], phi0) / (i * -s10);
    Ok(a / (2.0 * std::f64::consts::SQRT_2))
}

/// (⟨a²ρ⟩, ⟨a†aρ⟩) from three angles.
pub fn second_order_three_angles<S: RadonSource + ?Sized>(t: &S, phis: [f64; 3], spec: &QuadratureSpec) -> Result<(Complex64, f64)> {
    let [p0, p1, p2] = phis;
    let s10 = checked_sin(p1, p0)?;
    let s02 = checked_sin(p0, p2)?;
    let s21 = checked_sin(p2, p1)?;
    let j = raw_projections(t, 2, &phis, spec)?;
    let a2 = (Complex64::from_polar(j[0], p1 + p2) / (s10 * s02)
        + Complex64::from_polar(j[1], p2 + p0) / (s10 * s21)
        + Complex64::from_polar(j[2], p0 + p1) / (s21 * s02))
        / 8.0;
    let n = -((p2 - p1).cos() * j[0] / (s10 * s02) + (p0 - p2).cos() * j[1] / (s10 * s21) + (p1 - p0).cos() * j[2] / (s21 * s02)) / 8.0;
    Ok((a2, n))
}

/// Low-order moments from 2 (order 1) or 3 (orders 1 and 2) explicit angles.
pub fn moments_low_order_custom<S: RadonSource + ?Sized>(t: &S, angles: &[f64], spec: &QuadratureSpec) -> Result<MomentSet> {
    match angles.len() {
        2 => {
            let mut ms = MomentSet::new(1);
            ms.set(0, 1, first_order_two_angles(t, angles[0], angles[1], spec)?)?;
            Ok(ms)
        }
        3 => {
            let mut ms = MomentSet::new(2);
            ms.set(0, 1, first_order_two_angles(t, angles[0], angles[1], spec)?)?;
            let (a2, n) = second_order_three_angles(t, [angles[0], angles[1], angles[2]], spec)?;
            ms.set(0, 2, a2)?;
            ms.set(1, 1, n.into())?;
            Ok(ms)
        }
        k => Err(Error::Arity(format!("low-order moments take 2 or 3 angles, got {k}"))),
    }
}

/// Experimental: the s+1 moments of order s from s+1 inequivalent angles by solving
/// 2^{−s/2}∫W̆(φ_i)H_s = Σ_k C(s,k) e^{i(2k−s)φ_i}⟨a†ᵏa^{s−k}⟩. Returned in k order.
pub fn moments_linear_solve<S: RadonSource + ?Sized>(t: &S, s: usize, angles: &[f64], spec: &QuadratureSpec) -> Result<Vec<Complex64>> {
    if angles.len() != s + 1 {
        return Err(Error::Arity(format!("order {s} needs {} angles, got {}", s + 1, angles.len())));
    }
    AngleDivision::Explicit(angles.to_vec()).angles()?;
    let p = hermite_projections(t, s, angles, spec)?;
    let a = DMatrix::from_fn(s + 1, s + 1, |i, k| {
        let binom = (ln_factorial(s) - ln_factorial(k) - ln_factorial(s - k)).exp().round();
        Complex64::from_polar(binom, (2.0 * k as f64 - s as f64) * angles[i])
    });
    let sv = a.clone().svd(false, false).singular_values;
    let cond = sv.max() / sv.min();
    if !(cond < 1e12) {
        return Err(Error::SingularDivision(format!("angle system is ill-conditioned (cond {cond:.1e})")));
    }
    let b = nalgebra::DVector::from_iterator(s + 1, p.iter().map(|&v| Complex64::new(v, 0.0)));
    let x = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::SingularDivision("angle system is singular".into()))?;
    Ok(x.iter().copied().collect())
}

// ---------------------------------------------------------------------------
// Density from moments

#[derive(Debug, Clone, PartialEq)]
pub struct MomentDensity {
    pub entries: DMatrix<Complex64>,
    /// Largest magnitude of the last retained series term.
    pub last_term: f64,
    /// Number of series terms actually used per element (limited by J_max and s_max).
    pub terms_used: usize,
    pub warnings: Vec<String>,
}

impl MomentDensity {
    pub fn into_density(self) -> Result<DensityMatrix> {
        DensityMatrix::from_estimate(self.entries)
    }
}

/// ρ_{mn} = (m!n!)^{−1/2} Σ_j (−1)^j/j! ⟨a†^{n+j}a^{m+j}ρ⟩, m, n < dim.
pub fn density_from_moments(ms: &MomentSet, dim: usize, j_max: usize) -> Result<MomentDensity> {
    if dim == 0 {
        return Err(Error::domain("dimension must be positive"));
    }
    if 2 * (dim - 1) > ms.s_max() {
        return Err(Error::domain(format!(
            "dimension {dim} needs moments up to order {}, set has {}",
            2 * (dim - 1),
            ms.s_max()
        )));
    }
    let mut out = DMatrix::from_element(dim, dim, C0);
    let mut last = 0.0f64;
    let mut used = usize::MAX;
    for m in 0..dim {
        for n in 0..dim {
            let jn = j_max.min((ms.s_max() - m - n) / 2);
            used = used.min(jn + 1);
            let mut acc = Neumaier::default();
            let mut lt = 0.0;
            for j in 0..=jn {
                let mom = ms
                    .get(n + j, m + j)
                    .ok_or_else(|| Error::domain(format!("moment ({}, {}) missing", n + j, m + j)))?;
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                let w = sign * (-ln_factorial(j) - 0.5 * (ln_factorial(m) + ln_factorial(n))).exp();
                let term = mom * w;
                acc.add(term);
                lt = term.norm();
            }
            last = last.max(lt);
            out[(m, n)] = acc.sum();
        }
    }
    let mut warnings = Vec::new();
    if last > SERIES_WARN {
        warnings.push(format!(
            "moment series not decayed: last term {last:.2e} after {used} terms (ill-conditioned moment problem)"
        ));
    }
    Ok(MomentDensity {
        entries: out,
        last_term: last,
        terms_used: used,
        warnings,
    })
}

#[derive(Default)]
struct Neumaier {
    s: Complex64,
    c: Complex64,
}

impl Neumaier {
    fn add(&mut self, x: Complex64) {
        let re = two_sum(self.s.re, x.re);
        let im = two_sum(self.s.im, x.im);
        self.s = Complex64::new(re.0, im.0);
        self.c += Complex64::new(re.1, im.1);
    }

    fn sum(&self) -> Complex64 {
        self.s + self.c
    }
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// (2^{−n/2}∫dq W̆ H_n(q/√ħ), Σ_k C(n,k)e^{i(2k−n)φ}⟨a†ᵏa^{n−k}⟩).
pub fn projection_identity_check<S: RadonSource + ?Sized>(
    t: &S,
    moments: &MomentSet,
    n: usize,
    phi: f64,
    spec: &QuadratureSpec,
) -> Result<(f64, Complex64)> {
    let lhs = hermite_projections(t, n, &[phi], spec)?[0];
    let mut rhs = C0;
    for k in 0..=n {
        let mom = moments
            .get(k, n - k)
            .ok_or_else(|| Error::domain(format!("moment ({k}, {}) missing", n - k)))?;
        let binom = (ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)).exp().round();
        rhs += Complex64::from_polar(binom, (2.0 * k as f64 - n as f64) * phi) * mom;
    }
    Ok((lhs, rhs))
}

// ---------------------------------------------------------------------------
// Circle division

/// Σ_{m=0}^{n} e^{ims·2π/(n+1)} in exact arithmetic: exponents are reduced modulo n+1 and
/// the resulting integer polynomial modulo the cyclotomic polynomial Φ_{n+1}. Returns the
/// integer value (the remainder is always constant).
pub fn circle_division_sum(n: usize, s: i64) -> i64 {
    let big_n = n + 1;
    let mut counts = vec![0i64; big_n];
    for m in 0..big_n {
        let e = ((m as i64 * s).rem_euclid(big_n as i64)) as usize;
        counts[e] += 1;
    }
    let rem = poly_rem(&counts, &cyclotomic(big_n));
    assert!(rem.iter().skip(1).all(|&c| c == 0), "non-constant remainder");
    rem.first().copied().unwrap_or(0)
}

/// Integer coefficients of Φ_n, lowest degree first.
pub fn cyclotomic(n: usize) -> Vec<i64> {
    let mut p = vec![0i64; n + 1];
    p[0] = -1;
    p[n] = 1;
    for d in 1..n {
        if n % d == 0 {
            p = poly_div_exact(&p, &cyclotomic(d));
        }
    }
    p
}

fn poly_div_exact(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let mut q = vec![0i64; r.len().saturating_sub(db).max(1)];
    for i in (db..r.len()).rev() {
        let c = r[i];
        if c != 0 {
            q[i - db] = c;
            for (j, &bj) in b.iter().enumerate() {
                r[i - db + j] -= c * bj;
            }
        }
    }
    debug_assert!(r.iter().all(|&c| c == 0));
    q
}

fn poly_rem(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    for i in (db..r.len()).rev() {
        let c = r[i];
        if c != 0 {
            for (j, &bj) in b.iter().enumerate() {
                r[i - db + j] -= c * bj;
            }
        }
    }
    r.truncate(db.max(1));
    r
}
