//! Analytic forward models: Gaussian states, truncated density matrices and their marginals.

mod tomogram;

pub use tomogram::{Tomogram, TomogramGrid, DEFAULT_N_PHI, DEFAULT_N_Q};

use crate::error::{Error, Result};
use crate::specfun::{hermite_functions, ln_factorial};
use crate::symplectic::{transform_radon_args, unitary_squeeze_matrices, Displacement, SymplecticMap};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const DEFAULT_TRACE_TOL: f64 = 1e-6;
pub const DEFAULT_NMAX: usize = 32;

/// Something whose Radon transform W̆(u, v; c) can be evaluated pointwise.
///
/// `(u, v) = (0, 0)` is outside the domain; implementations may return NaN there.
pub trait RadonSource: Send + Sync {
    fn hbar(&self) -> f64;

    fn radon(&self, u: f64, v: f64, c: f64) -> f64;

    /// Rotated marginal W̆(cos φ, sin φ; q).
    fn marginal(&self, phi: f64, q: f64) -> f64 {
        self.radon(phi.cos(), phi.sin(), q)
    }

    /// Half-width of the q-window outside which all marginals are negligible.
    fn q_extent(&self) -> f64;

    /// Uniform angles on [0, π) at which marginals are stored exactly, if any.
    fn native_angles(&self) -> Option<Vec<f64>> {
        None
    }

    /// Half-width beyond which a sampled source has no data.
    fn data_extent(&self) -> Option<f64> {
        None
    }

    fn describe(&self) -> serde_json::Value;
}

/// Evaluate W̆(u, v; c) from marginals using homogeneity.
pub fn radon_via_marginal<S: RadonSource + ?Sized>(s: &S, u: f64, v: f64, c: f64) -> f64 {
    let r = u.hypot(v);
    if r == 0.0 {
        return f64::NAN;
    }
    s.marginal(v.atan2(u), c / r) / r
}

// ---------------------------------------------------------------------------
// Gaussian states

/// Squeezed coherent state with displacement (q̄, p̄) and squeeze parameter ζ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianState {
    pub qbar: f64,
    pub pbar: f64,
    pub zeta: Complex64,
    pub hbar: f64,
}

/// The five moments of a squeezed coherent state plus the extremal widths of its rotated marginals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianStatistics {
    pub mean_q: f64,
    pub mean_p: f64,
    pub var_q: f64,
    pub var_p: f64,
    pub sym_corr: f64,
    pub sigma_max: f64,
    pub sigma_min: f64,
    pub phi_max: f64,
    pub phi_min: f64,
}

impl GaussianStatistics {
    /// Variance of Q(φ) = Q cos φ + P sin φ.
    pub fn var_q_rot(&self, phi: f64) -> f64 {
        let (s, c) = phi.sin_cos();
        self.var_q * c * c + self.var_p * s * s + 2.0 * c * s * self.sym_corr
    }

    /// Variance of P(φ) = −Q sin φ + P cos φ.
    pub fn var_p_rot(&self, phi: f64) -> f64 {
        let (s, c) = phi.sin_cos();
        self.var_q * s * s + self.var_p * c * c - 2.0 * c * s * self.sym_corr
    }

    /// Symmetrized covariance of Q(φ) and P(φ).
    pub fn sym_corr_rot(&self, phi: f64) -> f64 {
        let (s, c) = phi.sin_cos();
        (self.var_p - self.var_q) * c * s + self.sym_corr * (c * c - s * s)
    }
}

impl GaussianState {
    pub fn new(qbar: f64, pbar: f64, zeta: Complex64, hbar: f64) -> Result<Self> {
        if !(zeta.norm() < 1.0) {
            return Err(Error::domain(format!("|ζ| must be < 1, got {}", zeta.norm())));
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::domain(format!("ħ must be positive, got {hbar}")));
        }
        if !qbar.is_finite() || !pbar.is_finite() {
            return Err(Error::domain("displacement must be finite"));
        }
        Ok(GaussianState { qbar, pbar, zeta, hbar })
    }

    pub fn vacuum(hbar: f64) -> Self {
        GaussianState { qbar: 0.0, pbar: 0.0, zeta: Complex64::new(0.0, 0.0), hbar }
    }

    /// Coherent state |α⟩ with α = (q̄ + i p̄)/√(2ħ).
    pub fn coherent(alpha: Complex64, hbar: f64) -> Self {
        let s = (2.0 * hbar).sqrt();
        GaussianState { qbar: s * alpha.re, pbar: s * alpha.im, zeta: Complex64::new(0.0, 0.0), hbar }
    }

    fn one_minus_r2(&self) -> f64 {
        1.0 - self.zeta.norm_sqr()
    }

    /// Real-positive combination |1−ζ|²u² + |1+ζ|²v² + i(ζ−ζ*)2uv.
    fn width_form(&self, u: f64, v: f64) -> f64 {
        let z = self.zeta;
        let a = (Complex64::new(1.0, 0.0) - z).norm_sqr();
        let b = (Complex64::new(1.0, 0.0) + z).norm_sqr();
        a * u * u + b * v * v - 4.0 * z.im * u * v
    }

    pub fn wigner(&self, q: f64, p: f64) -> f64 {
        let z = self.zeta;
        let dq = q - self.qbar;
        let dp = p - self.pbar;
        let a = (Complex64::new(1.0, 0.0) + z).norm_sqr();
        let b = (Complex64::new(1.0, 0.0) - z).norm_sqr();
        let num = a * dq * dq + b * dp * dp + 4.0 * z.im * dq * dp;
        (-num / (self.hbar * self.one_minus_r2())).exp() / (self.hbar * PI)
    }

    pub fn fourier(&self, u: f64, v: f64) -> Complex64 {
        let mag = (-self.hbar * self.width_form(u, v) / (4.0 * self.one_minus_r2())).exp();
        Complex64::from_polar(mag, -(u * self.qbar + v * self.pbar))
    }

    pub fn statistics(&self) -> GaussianStatistics {
        let z = self.zeta;
        let d = self.one_minus_r2();
        let h2 = 0.5 * self.hbar;
        let r = z.norm();
        let (phi_max, phi_min) = if r == 0.0 {
            (0.0, 0.0)
        } else {
            let arg = z.arg();
            let pmax = (0.5 * (arg + PI)).rem_euclid(PI);
            let pmin = (0.5 * arg).rem_euclid(PI);
            (pmax, pmin)
        };
        GaussianStatistics {
            mean_q: self.qbar,
            mean_p: self.pbar,
            var_q: h2 * (Complex64::new(1.0, 0.0) - z).norm_sqr() / d,
            var_p: h2 * (Complex64::new(1.0, 0.0) + z).norm_sqr() / d,
            sym_corr: -self.hbar * z.im / d,
            sigma_max: (h2 * (1.0 + r) / (1.0 - r)).sqrt(),
            sigma_min: (h2 * (1.0 - r) / (1.0 + r)).sqrt(),
            phi_max,
            phi_min,
        }
    }
}

impl RadonSource for GaussianState {
    fn hbar(&self) -> f64 {
        self.hbar
    }

    fn radon(&self, u: f64, v: f64, c: f64) -> f64 {
        let d = self.width_form(u, v);
        if !(d > 0.0) {
            return f64::NAN;
        }
        let k = self.one_minus_r2();
        let s = c - u * self.qbar - v * self.pbar;
        (k / (self.hbar * PI * d)).sqrt() * (-k * s * s / (self.hbar * d)).exp()
    }

    fn q_extent(&self) -> f64 {
        8.0 * self.statistics().sigma_max + self.qbar.hypot(self.pbar)
    }

    fn describe(&self) -> serde_json::Value {
        serde_json::json!({
            "kind": "gaussian",
            "qbar": self.qbar,
            "pbar": self.pbar,
            "zeta": [self.zeta.re, self.zeta.im],
            "hbar": self.hbar,
        })
    }
}

pub fn wigner_gaussian(s: &GaussianState, q: f64, p: f64) -> f64 {
    s.wigner(q, p)
}

pub fn radon_gaussian(s: &GaussianState, u: f64, v: f64, c: f64) -> Result<f64> {
    if u == 0.0 && v == 0.0 {
        return Err(Error::domain("Radon transform needs (u, v) ≠ (0, 0)"));
    }
    let d = s.width_form(u, v);
    if !(d > 0.0) {
        return Err(Error::Consistency(format!("Gaussian width form is not positive: {d}")));
    }
    Ok(s.radon(u, v, c))
}

pub fn fourier_gaussian(s: &GaussianState, u: f64, v: f64) -> Complex64 {
    s.fourier(u, v)
}

pub fn gaussian_statistics(s: &GaussianState) -> GaussianStatistics {
    s.statistics()
}

// ---------------------------------------------------------------------------
// Density matrices

/// Truncated Fock-basis density matrix ρ_{mn} = ⟨m|ρ|n⟩.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: DMatrix<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct DensityFile {
    rho: Vec<Vec<[f64; 2]>>,
}

impl DensityMatrix {
    /// Validate Hermiticity, diagonal sign and (when `trace_tol` is given) the trace.
    pub fn new(entries: DMatrix<Complex64>, trace_tol: Option<f64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() || entries.nrows() == 0 {
            return Err(Error::domain("density matrix must be square and nonempty"));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::domain("density matrix has non-finite entries"));
        }
        let defect = hermiticity_defect(&entries);
        if defect > HERMITIAN_TOL {
            return Err(Error::Hermiticity(defect));
        }
        for i in 0..entries.nrows() {
            if entries[(i, i)].re < -HERMITIAN_TOL {
                return Err(Error::domain(format!(
                    "diagonal entry {i} is negative: {}",
                    entries[(i, i)].re
                )));
            }
        }
        let out = DensityMatrix { entries };
        if let Some(tol) = trace_tol {
            let t = out.trace();
            if (t - 1.0).abs() > tol {
                return Err(Error::domain(format!("trace {t} differs from 1 by more than {tol:e}")));
            }
        }
        Ok(out)
    }

    /// Accept an estimated matrix: square, finite and Hermitian to 1e−10, nothing else.
    pub fn from_estimate(entries: DMatrix<Complex64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() || entries.nrows() == 0 {
            return Err(Error::domain("density matrix must be square and nonempty"));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::domain("density matrix has non-finite entries"));
        }
        let defect = hermiticity_defect(&entries);
        if defect > HERMITIAN_TOL {
            return Err(Error::Hermiticity(defect));
        }
        Ok(DensityMatrix { entries })
    }

    pub fn fock(n: usize, nmax: usize) -> Result<Self> {
        if n > nmax {
            return Err(Error::domain(format!("Fock index {n} exceeds truncation {nmax}")));
        }
        let mut m = DMatrix::zeros(nmax + 1, nmax + 1);
        m[(n, n)] = Complex64::new(1.0, 0.0);
        Ok(DensityMatrix { entries: m })
    }

    /// |ψ⟩⟨ψ| for a normalized Fock-coefficient vector.
    pub fn pure(coeffs: &[Complex64]) -> Result<Self> {
        let norm: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        if coeffs.is_empty() || !(norm > 0.0) {
            return Err(Error::domain("pure state needs a nonzero coefficient vector"));
        }
        let d = coeffs.len();
        let m = DMatrix::from_fn(d, d, |i, j| coeffs[i] * coeffs[j].conj() / norm);
        Ok(DensityMatrix { entries: m })
    }

    /// Coherent state truncated at `nmax` (no renormalization).
    pub fn coherent(alpha: Complex64, nmax: usize) -> Self {
        let a2 = alpha.norm_sqr();
        let c: Vec<Complex64> = (0..=nmax)
            .map(|n| {
                let mag = (-0.5 * a2 - 0.5 * ln_factorial(n)).exp();
                alpha.powu(n as u32) * mag
            })
            .collect();
        let d = nmax + 1;
        DensityMatrix { entries: DMatrix::from_fn(d, d, |i, j| c[i] * c[j].conj()) }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn nmax(&self) -> usize {
        self.dim() - 1
    }

    pub fn get(&self, m: usize, n: usize) -> Complex64 {
        self.entries[(m, n)]
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.entries[(i, i)].re).sum()
    }

    /// Largest Fock index with a non-negligible diagonal entry.
    pub fn effective_nmax(&self) -> usize {
        (0..self.dim()).rev().find(|&i| self.entries[(i, i)].re.abs() > 1e-14).unwrap_or(0)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let f: DensityFile = serde_json::from_str(s)?;
        let d = f.rho.len();
        if f.rho.iter().any(|r| r.len() != d) {
            return Err(Error::Parse("density matrix rows must all have length dim".into()));
        }
        let m = DMatrix::from_fn(d, d, |i, j| Complex64::new(f.rho[i][j][0], f.rho[i][j][1]));
        DensityMatrix::new(m, Some(DEFAULT_TRACE_TOL))
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let d = self.dim();
        let rows: Vec<Vec<[f64; 2]>> = (0..d)
            .map(|i| (0..d).map(|j| [self.entries[(i, j)].re, self.entries[(i, j)].im]).collect())
            .collect();
        serde_json::json!({ "rho": rows })
    }
}

/// max |ρ_{mn} − ρ_{nm}*|.
pub fn hermiticity_defect(m: &DMatrix<Complex64>) -> f64 {
    let d = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..d {
        for j in i..d {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// ⟨q;φ|ρ|q;φ⟩ = Σ ρ_{mn} e^{i(n−m)φ} h_m(x) h_n(x)/√ħ with x = q/√ħ.
pub fn radon_from_density(rho: &DensityMatrix, phi: f64, q: f64, hbar: f64) -> Result<f64> {
    let z = marginal_complex(rho, phi, q, hbar);
    if z.im.abs() > HERMITIAN_TOL * z.re.abs().max(1.0) {
        return Err(Error::Hermiticity(z.im.abs()));
    }
    Ok(z.re)
}

fn marginal_complex(rho: &DensityMatrix, phi: f64, q: f64, hbar: f64) -> Complex64 {
    let sh = hbar.sqrt();
    let h = hermite_functions(rho.nmax(), q / sh);
    let c: Vec<Complex64> = h
        .iter()
        .enumerate()
        .map(|(n, &hn)| Complex64::from_polar(hn, n as f64 * phi))
        .collect();
    let d = rho.dim();
    let mut s = Complex64::new(0.0, 0.0);
    for m in 0..d {
        let mut row = Complex64::new(0.0, 0.0);
        for n in 0..d {
            row += rho.entries[(m, n)] * c[n];
        }
        s += c[m].conj() * row;
    }
    s / sh
}

/// A density matrix together with the ħ used to evaluate its marginals.
#[derive(Debug, Clone)]
pub struct FockSource {
    pub rho: DensityMatrix,
    pub hbar: f64,
}

impl FockSource {
    pub fn new(rho: DensityMatrix, hbar: f64) -> Result<Self> {
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::domain(format!("ħ must be positive, got {hbar}")));
        }
        Ok(FockSource { rho, hbar })
    }
}

impl RadonSource for FockSource {
    fn hbar(&self) -> f64 {
        self.hbar
    }

    fn radon(&self, u: f64, v: f64, c: f64) -> f64 {
        radon_via_marginal(self, u, v, c)
    }

    fn marginal(&self, phi: f64, q: f64) -> f64 {
        marginal_complex(&self.rho, phi, q, self.hbar).re
    }

    fn q_extent(&self) -> f64 {
        let n = self.rho.effective_nmax() as f64;
        self.hbar.sqrt() * ((2.0 * n + 1.0).sqrt() + 6.0)
    }

    fn describe(&self) -> serde_json::Value {
        serde_json::json!({ "kind": "fock-matrix", "dim": self.rho.dim(), "hbar": self.hbar })
    }
}

// ---------------------------------------------------------------------------
// Symplectic covariance

/// Source transformed by a squeeze `map` followed by a displacement.
#[derive(Clone)]
pub struct TransformedSource {
    inner: Arc<dyn RadonSource>,
    map: SymplecticMap,
    disp: Displacement,
}

impl TransformedSource {
    pub fn new(inner: Arc<dyn RadonSource>, disp: Displacement, map: SymplecticMap) -> Self {
        TransformedSource { inner, map, disp }
    }
}

impl RadonSource for TransformedSource {
    fn hbar(&self) -> f64 {
        self.inner.hbar()
    }

    fn radon(&self, u: f64, v: f64, c: f64) -> f64 {
        let (u2, v2) = transform_radon_args(u, v, &self.map);
        self.inner.radon(u2, v2, c - u * self.disp.qbar - v * self.disp.pbar)
    }

    fn q_extent(&self) -> f64 {
        let m = &self.map;
        let stretch = (m.alpha * m.alpha + m.beta * m.beta + m.gamma * m.gamma + m.delta * m.delta).sqrt();
        self.inner.q_extent() * stretch + self.disp.qbar.hypot(self.disp.pbar)
    }

    fn describe(&self) -> serde_json::Value {
        serde_json::json!({
            "kind": "transformed",
            "inner": self.inner.describe(),
            "map": [self.map.alpha, self.map.beta, self.map.gamma, self.map.delta],
            "displacement": [self.disp.qbar, self.disp.pbar],
        })
    }
}

/// W̆(u,v;c) = W̆₀(δu−βv, −γu+αv; c − uq̄ − vp̄): squeeze first, then displace.
pub fn transform_tomogram(
    source: Arc<dyn RadonSource>,
    disp: Displacement,
    map: SymplecticMap,
) -> TransformedSource {
    TransformedSource::new(source, disp, map)
}

/// Vacuum squeezed by ζ and displaced by (q̄, p̄) through the covariance law.
pub fn squeezed_vacuum_source(qbar: f64, pbar: f64, zeta: Complex64, hbar: f64) -> Result<TransformedSource> {
    let (map, _) = unitary_squeeze_matrices(zeta)?;
    Ok(transform_tomogram(
        Arc::new(GaussianState::vacuum(hbar)),
        Displacement::new(qbar, pbar)?,
        map,
    ))
}

// ---------------------------------------------------------------------------
// Rotated quadrature eigenstates

/// ⟨q;φ|q′;φ′⟩ for rotated quadrature eigenstates.
pub fn scalar_product_rotated(q: f64, phi: f64, q2: f64, phi2: f64, hbar: f64) -> Result<Complex64> {
    let d = phi - phi2;
    let (s, c) = d.sin_cos();
    if s.abs() < 1e-12 {
        return Err(Error::domain(
            "scalar product of rotated quadrature states is a delta function when φ − φ′ ≡ 0 (mod π)",
        ));
    }
    let one = Complex64::new(1.0, 0.0);
    let den = (one - Complex64::from_polar(1.0, -2.0 * d)) * (hbar * PI);
    let phase = ((q * q + q2 * q2) * c - 2.0 * q * q2) / (2.0 * hbar * s);
    Ok(den.sqrt().inv() * Complex64::from_polar(1.0, phase))
}

// ---------------------------------------------------------------------------
// Normally ordered moments

/// Table of ⟨a†ᵏ aˡ ρ⟩ for k + l ≤ s_max.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSet {
    s_max: usize,
    table: Vec<Option<Complex64>>,
}

impl MomentSet {
    pub fn new(s_max: usize) -> Self {
        let d = s_max + 1;
        let mut table = vec![None; d * d];
        table[0] = Some(Complex64::new(1.0, 0.0));
        MomentSet { s_max, table }
    }

    pub fn s_max(&self) -> usize {
        self.s_max
    }

    fn idx(&self, k: usize, l: usize) -> Option<usize> {
        (k + l <= self.s_max).then(|| k * (self.s_max + 1) + l)
    }

    pub fn get(&self, k: usize, l: usize) -> Option<Complex64> {
        self.idx(k, l).and_then(|i| self.table[i])
    }

    /// Store ⟨a†ᵏaˡ⟩ and its conjugate partner ⟨a†ˡaᵏ⟩.
    pub fn set(&mut self, k: usize, l: usize, v: Complex64) -> Result<()> {
        let i = self.idx(k, l).ok_or_else(|| {
            Error::domain(format!("moment order {} exceeds cap {}", k + l, self.s_max))
        })?;
        let j = self.idx(l, k).expect("symmetric index");
        self.table[i] = Some(v);
        self.table[j] = Some(if k == l { Complex64::new(v.re, 0.0) } else { v.conj() });
        if k == l {
            self.table[i] = self.table[j];
        }
        Ok(())
    }

    pub fn is_complete(&self) -> bool {
        (0..=self.s_max).all(|k| (0..=self.s_max - k).all(|l| self.get(k, l).is_some()))
    }

    /// Analytic moments α*ᵏαˡ of a coherent state.
    pub fn coherent(alpha: Complex64, s_max: usize) -> Self {
        let mut m = MomentSet::new(s_max);
        for k in 0..=s_max {
            for l in 0..=s_max - k {
                let v = alpha.conj().powu(k as u32) * alpha.powu(l as u32);
                m.table[k * (s_max + 1) + l] = Some(v);
            }
        }
        m
    }

    /// Tr(a†ᵏ aˡ ρ) evaluated exactly on the stored truncation.
    pub fn from_density(rho: &DensityMatrix, s_max: usize) -> Self {
        let mut ms = MomentSet::new(s_max);
        let d = rho.dim();
        for k in 0..=s_max {
            for l in 0..=s_max - k {
                let mut s = Complex64::new(0.0, 0.0);
                for m in l..d {
                    let n = m - l + k;
                    if n >= d {
                        continue;
                    }
                    let w = 0.5
                        * (ln_factorial(m) - ln_factorial(m - l) + ln_factorial(n) - ln_factorial(n - k));
                    s += rho.get(m, n) * w.exp();
                }
                ms.table[k * (s_max + 1) + l] = Some(s);
            }
        }
        ms
    }

    /// Largest violation of ⟨a†ᵏaˡ⟩ = ⟨a†ˡaᵏ⟩* and of ⟨ρ⟩ = 1.
    pub fn invariant_defect(&self) -> f64 {
        let mut worst = self.get(0, 0).map_or(f64::INFINITY, |v| (v - 1.0).norm());
        for k in 0..=self.s_max {
            for l in 0..=self.s_max - k {
                if let (Some(a), Some(b)) = (self.get(k, l), self.get(l, k)) {
                    worst = worst.max((a - b.conj()).norm());
                }
            }
        }
        worst
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let mut rows = Vec::new();
        for k in 0..=self.s_max {
            for l in 0..=self.s_max - k {
                if let Some(v) = self.get(k, l) {
                    rows.push(serde_json::json!({ "k": k, "l": l, "value": [v.re, v.im] }));
                }
            }
        }
        serde_json::json!({ "s_max": self.s_max, "moments": rows })
    }

    /// Inverse of [`MomentSet::to_json_value`].
    pub fn from_json_value(v: &serde_json::Value) -> Result<Self> {
        #[derive(Deserialize)]
        struct Entry {
            k: usize,
            l: usize,
            value: [f64; 2],
        }
        #[derive(Deserialize)]
        struct File {
            s_max: usize,
            moments: Vec<Entry>,
        }
        let f = File::deserialize(v)?;
        let mut ms = MomentSet::new(f.s_max);
        ms.table.iter_mut().for_each(|t| *t = None);
        for e in f.moments {
            let i = ms
                .idx(e.k, e.l)
                .ok_or_else(|| Error::Parse(format!("moment ({}, {}) exceeds s_max {}", e.k, e.l, f.s_max)))?;
            ms.table[i] = Some(Complex64::new(e.value[0], e.value[1]));
        }
        Ok(ms)
    }
}
