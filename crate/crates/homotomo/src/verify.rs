//! Invariant suites behind `homotomo verify`.
//!
//! Every check reports the measured error next to its tolerance; a check that
//! errors out is recorded as a failure with the message attached.

use crate::error::{Error, Result};
use crate::par;
use crate::pattern::{
    self, orthogonality_check, pattern_deriv_product, pattern_hermite_series, pattern_nonuniqueness_residual,
    pattern_value, OrthoQuad, PatternTable, ProductChoice, Representation, Truncation,
};
use crate::radon::{
    pv_functional, radon_numeric, reg_inv_square_functional, wigner_from_tomogram, FilteredBackProjection, PlaneField,
};
use crate::reconstruct::{
    circle_division_sum, density_from_tomogram, fock_element_from_tomogram, moment_angle_average,
    moment_discrete_angles, moments_low_order_custom, preset_harmonic_thirds, preset_quarter_angles,
    qfunction_from_tomogram, AngleDivision, QuadratureSpec,
};
use crate::specfun::{dawson, hermite_poly, mehler_kernel, wronskian_hg, EvalGrid, MehlerMode};
use crate::states::{
    squeezed_vacuum_source, DensityMatrix, FockSource, GaussianState, MomentSet, RadonSource, Tomogram, TomogramGrid,
};
use crate::symplectic::{
    complex_from_real, matrix_from_squeeze, real_from_complex, squeeze_from_matrix, unitary_squeeze_matrices,
    zeta_reparam, zeta_unreparam,
};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};
use serde::Serialize;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

pub const DEFAULT_SEED: u64 = 20_240_917;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Specfun,
    Symplectic,
    Radon,
    Pattern,
    Reconstruct,
    All,
}

impl Suite {
    pub const EACH: [Suite; 5] = [Suite::Specfun, Suite::Symplectic, Suite::Radon, Suite::Pattern, Suite::Reconstruct];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Specfun => "specfun",
            Suite::Symplectic => "symplectic",
            Suite::Radon => "radon",
            Suite::Pattern => "pattern",
            Suite::Reconstruct => "reconstruct",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::EACH
            .into_iter()
            .chain([Suite::All])
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown suite '{s}' (specfun|symplectic|radon|pattern|reconstruct|all)")))
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    /// Measured error; NaN when the check errored.
    pub value: f64,
    pub tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    fn measure(name: &str, tol: f64, r: Result<f64>) -> Check {
        match r {
            Ok(v) => Check {
                name: name.to_string(),
                pass: v <= tol,
                value: v,
                tol,
                detail: None,
            },
            Err(e) => Check {
                name: name.to_string(),
                pass: false,
                value: f64::NAN,
                tol,
                detail: Some(e.to_string()),
            },
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SuiteReport {
    pub suite: String,
    pub pass: bool,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Report {
    pub seed: u64,
    pub pass: bool,
    pub suites: Vec<SuiteReport>,
}

impl Report {
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for s in &self.suites {
            for c in &s.checks {
                let tag = if c.pass { "ok  " } else { "FAIL" };
                out.push_str(&format!("{tag} {}/{}: {:.3e} (tol {:.1e})", s.suite, c.name, c.value, c.tol));
                if let Some(d) = &c.detail {
                    out.push_str(&format!(" [{d}]"));
                }
                out.push('\n');
            }
        }
        let total: usize = self.suites.iter().map(|s| s.checks.len()).sum();
        let failed: usize = self.suites.iter().flat_map(|s| &s.checks).filter(|c| !c.pass).count();
        out.push_str(&format!("{} checks, {} failed\n", total, failed));
        out
    }
}

pub fn run(suite: Suite, seed: u64) -> Report {
    let list: Vec<Suite> = if suite == Suite::All { Suite::EACH.to_vec() } else { vec![suite] };
    let suites: Vec<SuiteReport> = list.into_iter().map(|s| run_one(s, seed)).collect();
    Report {
        seed,
        pass: suites.iter().all(|s| s.pass),
        suites,
    }
}

fn run_one(suite: Suite, seed: u64) -> SuiteReport {
    let checks = match suite {
        Suite::Specfun => specfun_checks(seed),
        Suite::Symplectic => symplectic_checks(seed),
        Suite::Radon => radon_checks(),
        Suite::Pattern => pattern_checks(),
        Suite::Reconstruct => reconstruct_checks(),
        Suite::All => unreachable!(),
    };
    SuiteReport {
        suite: suite.name().to_string(),
        pass: checks.iter().all(|c| c.pass),
        checks,
    }
}

fn max_of<I: IntoIterator<Item = Result<f64>>>(it: I) -> Result<f64> {
    it.into_iter().try_fold(0.0f64, |a, r| r.map(|v| a.max(v)))
}

fn par_max<T: Sync, F: Fn(&T) -> Result<f64> + Sync>(items: &[T], f: F) -> Result<f64> {
    max_of(par::map(items, f))
}

// ---------------------------------------------------------------------------
// specfun

fn specfun_checks(seed: u64) -> Vec<Check> {
    vec![
        Check::measure("mehler-series-vs-closed", 1e-10, mehler_probe(seed)),
        Check::measure("wronskian-hg", 1e-7, wronskian_probe()),
        Check::measure("hermite-product-identity", 1e-9, hermite_product_probe(seed)),
        Check::measure("dawson-value", 1e-15, Ok((dawson(1.0) - 0.538_079_506_912_768_4).abs())),
    ]
}

pub const MEHLER_ZS: [f64; 6] = [-0.9, -0.6, -0.3, 0.3, 0.6, 0.9];

/// Series length at which |z|^N has dropped below 1e−16, plus a margin.
pub fn mehler_terms_for(z: f64) -> usize {
    if z == 0.0 {
        return 1;
    }
    ((1e-16f64).ln() / z.abs().ln()).ceil() as usize + 40
}

/// 100 seeded points (x, y) ∈ [−2, 2]².
pub fn mehler_points(seed: u64) -> Vec<(f64, f64)> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..100)
        .map(|_| (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)))
        .collect()
}

/// Max |series(N) − closed| over the seeded points for one z; `terms = None` uses [`mehler_terms_for`].
pub fn mehler_probe_z(seed: u64, z: f64, terms: Option<usize>) -> Result<f64> {
    let n = terms.unwrap_or_else(|| mehler_terms_for(z));
    par_max(&mehler_points(seed), |&(x, y)| {
        Ok((mehler_kernel(x, y, z, MehlerMode::Series(n))? - mehler_kernel(x, y, z, MehlerMode::Closed)?).abs())
    })
}

pub fn mehler_probe(seed: u64) -> Result<f64> {
    max_of(MEHLER_ZS.iter().map(|&z| mehler_probe_z(seed, z, None)))
}

/// Max |W(h_n, g_n) − 2| for n ≤ 10 on x ∈ [−4, 4].
pub fn wronskian_probe() -> Result<f64> {
    let xs: Vec<f64> = (0..=80).map(|i| -4.0 + 0.1 * i as f64).collect();
    Ok(xs
        .iter()
        .flat_map(|&x| (0..=10).map(move |n| (wronskian_hg(n, x) - 2.0).abs()))
        .fold(0.0, f64::max))
}

/// Relative defect of H_m H_n = Σ_j m!n!/(j!(m−j)!(n−j)!) 2^j H_{m+n−2j} for m, n ≤ 8.
pub fn hermite_product_probe(seed: u64) -> Result<f64> {
    let mut rng = StdRng::seed_from_u64(seed ^ 0x5eed);
    let xs: Vec<f64> = (0..12).map(|_| rng.random_range(-3.0..3.0)).collect();
    let fact = |k: usize| (1..=k).fold(1.0, |a, b| a * b as f64);
    let mut worst = 0.0f64;
    for &x in &xs {
        for m in 0..=8 {
            for n in 0..=8 {
                let lhs = hermite_poly(m, x)? * hermite_poly(n, x)?;
                let mut rhs = 0.0;
                for j in 0..=m.min(n) {
                    rhs += fact(m) * fact(n) / (fact(j) * fact(m - j) * fact(n - j))
                        * 2f64.powi(j as i32)
                        * hermite_poly(m + n - 2 * j, x)?;
                }
                worst = worst.max((lhs - rhs).abs() / lhs.abs().max(1.0));
            }
        }
    }
    Ok(worst)
}

// ---------------------------------------------------------------------------
// symplectic

fn symplectic_checks(seed: u64) -> Vec<Check> {
    let zetas = random_zetas(seed, 5, 0.7);
    vec![
        Check::measure("transformed-vacuum-covariance", 1e-9, covariance_probe(&zetas)),
        Check::measure("squeeze-matrix-round-trip", 1e-12, squeeze_round_trip(&zetas)),
        Check::measure("zeta-reparam-round-trip", 1e-13, max_of(zetas.iter().map(|&z| {
            Ok((zeta_reparam(zeta_unreparam(z)?) - z).norm())
        }))),
    ]
}

/// `count` seeded squeeze parameters, uniform on the disc |ζ| ≤ r_max.
pub fn random_zetas(seed: u64, count: usize, r_max: f64) -> Vec<Complex64> {
    let mut rng = StdRng::seed_from_u64(seed ^ 0x2e7a);
    (0..count)
        .map(|_| {
            let r = r_max * rng.random_range(0.0f64..1.0).sqrt();
            Complex64::from_polar(r, rng.random_range(0.0..2.0 * PI))
        })
        .collect()
}

/// Sup over the default grid of |transformed vacuum − closed-form squeezed state|.
pub fn covariance_probe(zetas: &[Complex64]) -> Result<f64> {
    max_of(zetas.iter().map(|&z| {
        let direct = GaussianState::new(0.0, 0.0, z, 1.0)?;
        let moved = squeezed_vacuum_source(0.0, 0.0, z, 1.0)?;
        let grid = TomogramGrid::default_for(&direct);
        let a = Tomogram::from_source(&direct, &grid)?;
        let b = Tomogram::from_source(&moved, &grid)?;
        Ok(a.values().iter().zip(b.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
    }))
}

fn squeeze_round_trip(zetas: &[Complex64]) -> Result<f64> {
    max_of(zetas.iter().map(|&z| {
        let (real, _) = unitary_squeeze_matrices(z)?;
        let params = squeeze_from_matrix(&real)?;
        let again = matrix_from_squeeze(&params)?;
        let back = real_from_complex(&complex_from_real(&real))?;
        let d = [
            real.det() - 1.0,
            again.alpha - real.alpha,
            again.beta - real.beta,
            again.gamma - real.gamma,
            again.delta - real.delta,
            back.alpha - real.alpha,
            back.delta - real.delta,
        ];
        Ok(d.iter().fold(0.0f64, |a, x| a.max(x.abs())))
    }))
}

// ---------------------------------------------------------------------------
// radon

fn radon_checks() -> Vec<Check> {
    vec![
        Check::measure(
            "regularized-inverse-square",
            1e-9,
            Ok((reg_inv_square_functional(|x| (-x * x).exp()) + 2.0 * PI.sqrt()).abs()),
        ),
        Check::measure(
            "principal-value",
            1e-12,
            Ok((pv_functional(|x| x * (-x * x).exp()) - PI.sqrt()).abs()),
        ),
        Check::measure("normalization", 1e-8, normalization_probe()),
        Check::measure("homogeneity", 1e-8, homogeneity_probe()),
        Check::measure("fbp-vacuum-origin", 1e-3, fbp_vacuum_probe()),
        Check::measure("fbp-squeezed-probes", 5e-3, fbp_squeezed_probe()),
    ]
}

/// Row-integral deviation for a squeezed Gaussian and a one-photon Fock tomogram.
pub fn normalization_probe() -> Result<f64> {
    let g = GaussianState::new(1.5, -0.5, Complex64::new(0.4, 0.2), 1.0)?;
    let a = Tomogram::from_source(&g, &TomogramGrid::default_for(&g))?.normalization().max_deviation;
    let f = FockSource::new(DensityMatrix::fock(1, 4)?, 1.0)?;
    let b = Tomogram::from_source(&f, &TomogramGrid::default_for(&f))?.normalization().max_deviation;
    Ok(a.max(b))
}

/// Relative defect of W̆(μu, μv; μc) = W̆(u, v; c)/|μ| with line integrals of a squeezed Wigner function.
pub fn homogeneity_probe() -> Result<f64> {
    let s = GaussianState::new(0.4, -0.6, Complex64::new(0.3, 0.4), 1.0)?;
    let r = 12.0 * s.statistics().sigma_max;
    let field = PlaneField::new(move |q, p| s.wigner(q, p), (s.qbar, s.pbar), r)?;
    let mut worst = 0.0f64;
    for &(u, v, c) in &[(0.7, -0.3, 0.5), (0.2, 1.1, -0.4)] {
        let base = radon_numeric(&field, u, v, c)?;
        for &mu in &[-3.0, -1.0, 0.5, 2.0] {
            let scaled = radon_numeric(&field, mu * u, mu * v, mu * c)?;
            worst = worst.max((scaled * f64::abs(mu) - base).abs() / base.abs());
        }
        worst = worst.max((base - s.radon(u, v, c)).abs() / base.abs());
    }
    Ok(worst)
}

pub fn fbp_vacuum_probe() -> Result<f64> {
    let s = GaussianState::vacuum(1.0);
    let t = Tomogram::from_source(&s, &TomogramGrid::default_for(&s))?;
    Ok((wigner_from_tomogram(&t, 0.0, 0.0)? - 1.0 / PI).abs())
}

/// Max error at nine probe points for the ζ = 0.4 Gaussian.
pub fn fbp_squeezed_probe() -> Result<f64> {
    let s = GaussianState::new(0.0, 0.0, Complex64::new(0.4, 0.0), 1.0)?;
    let t = Tomogram::from_source(&s, &TomogramGrid::default_for(&s))?;
    let fbp = FilteredBackProjection::new(&t)?;
    let mut worst = 0.0f64;
    for &q in &[-0.5, 0.0, 0.5] {
        for &p in &[-1.0, 0.0, 1.0] {
            worst = worst.max((fbp.eval(q, p) - s.wigner(q, p)).abs());
        }
    }
    Ok(worst)
}

// ---------------------------------------------------------------------------
// pattern

fn pattern_checks() -> Vec<Check> {
    vec![
        Check::measure("zero-values", 1e-10, zero_values_probe()),
        Check::measure("cross-representation", 1e-8, cross_representation_probe()),
        Check::measure("deriv-product-region", 1e-9, region_identity_probe()),
        Check::measure("orthogonality", 1e-6, orthogonality_probe()),
        Check::measure("ode-residual", 1e-4, ode_probe()),
        Check::measure("nonuniqueness-5-2", pattern::RESIDUAL_TOL, nonuniqueness_probe()),
        Check::measure("parity-4-4", 1e-9, parity_probe()),
    ]
}

fn zero_nn(n: usize) -> f64 {
    if n % 2 == 0 {
        2.0
    } else {
        -2.0
    }
}

fn zero_n2n(n: usize) -> f64 {
    let v = (2 * n + 3) as f64 / (((n + 2) * (n + 1)) as f64).sqrt();
    if n % 2 == 0 {
        -v
    } else {
        v
    }
}

/// F′_{n,n}(0) and F′_{n+2,n}(0) against their closed forms for n ≤ 12.
pub fn zero_values_probe() -> Result<f64> {
    max_of((0..=12).map(|n| {
        let a = pattern_hermite_series(n, n, 0.0, Truncation::Adaptive)?;
        let b = pattern_hermite_series(n + 2, n, 0.0, Truncation::Adaptive)?;
        Ok((a - zero_nn(n)).abs().max((b - zero_n2n(n)).abs()))
    }))
}

fn grid601() -> Vec<f64> {
    (0..=600).map(|i| -6.0 + 0.02 * i as f64).collect()
}

/// sup_x |F′_{m,n} − ½(F″_{m,n} + F″_{n,m})| over 601 points in [−6, 6], m, n ≤ 8.
pub fn cross_representation_probe() -> Result<f64> {
    let xs = grid601();
    par_max(&xs, |&x| {
        let mut worst = 0.0f64;
        for m in 0..=8 {
            for n in 0..=8 {
                let a = pattern_hermite_series(m, n, x, Truncation::Adaptive)?;
                let b = pattern_value(Representation::Symmetrized, m, n, x)?;
                worst = worst.max((a - b).abs());
            }
        }
        Ok(worst)
    })
}

/// sup_x |F″_{m,n} − F_{m,n}| for m ≤ n + 1 ≤ 9.
pub fn region_identity_probe() -> Result<f64> {
    let xs = grid601();
    par_max(&xs, |&x| {
        let mut worst = 0.0f64;
        for n in 0..=8 {
            for m in 0..=n + 1 {
                let a = pattern_deriv_product(m, n, x)?;
                let b = pattern_value(Representation::Canonical, m, n, x)?;
                worst = worst.max((a - b).abs());
            }
        }
        Ok(worst)
    })
}

/// max |orthogonality_check(k, m, j) − δ_{km}| for k, m ≤ 6, j ≤ 4.
pub fn orthogonality_probe() -> Result<f64> {
    let q = OrthoQuad::default();
    let mut worst = 0.0f64;
    for k in 0..=6 {
        for m in 0..=6 {
            for j in 0..=4 {
                let want = if k == m { 1.0 } else { 0.0 };
                worst = worst.max((orthogonality_check(k, m, j, &q)? - want).abs());
            }
        }
    }
    Ok(worst)
}

pub fn ode_probe() -> Result<f64> {
    let grid = EvalGrid::uniform(-2.0, 2.0, 41)?;
    let mut worst = 0.0f64;
    for &(m, n) in &[(2, 5), (3, 1), (0, 4), (6, 2)] {
        for c in [ProductChoice::HH, ProductChoice::HG, ProductChoice::GH, ProductChoice::GG] {
            worst = worst.max(pattern::ode_residual(m, n, c, &grid));
        }
    }
    for n in 0..=4 {
        worst = worst.max(pattern::ode3_residual(n, ProductChoice::HH, &grid));
    }
    Ok(worst)
}

pub fn nonuniqueness_probe() -> Result<f64> {
    let grid = EvalGrid::uniform(-4.0, 4.0, 81)?;
    let fit = pattern_nonuniqueness_residual(Representation::Canonical, Representation::HermiteSeries, 5, 2, &grid)?;
    Ok(fit.residual)
}

pub fn parity_probe() -> Result<f64> {
    let grid = EvalGrid::uniform(-5.0, 5.0, 101)?;
    let t = PatternTable::compute(4, 4, Representation::HermiteSeries, Truncation::Adaptive, grid)?;
    t.parity_defect().ok_or_else(|| Error::domain("grid is not symmetric"))
}

// ---------------------------------------------------------------------------
// reconstruct

fn reconstruct_checks() -> Vec<Check> {
    vec![
        Check::measure("circle-division", 0.0, circle_division_probe()),
        Check::measure("moment-routes", 1e-8, moment_routes_probe().map(|r| r.0)),
        Check::measure("first-moment-displacement", 1e-6, moment_routes_probe().map(|r| r.1)),
        Check::measure("coherent-fock-elements", 1e-6, coherent_elements_probe()),
        Check::measure("displaced-vacuum-density", 1e-5, displaced_density_probe()),
        Check::measure("qfunction-vacuum", 1e-8, qfunction_from_tomogram(
            &GaussianState::vacuum(1.0),
            Complex64::new(0.0, 0.0),
            &QuadratureSpec::default(),
        )
        .map(|v| (v - 1.0 / PI).abs())),
    ]
}

/// Number of (n, s) with n ≤ 12 where Σ_m e^{ims·2π/(n+1)} ≠ (n+1)δ_{s mod (n+1), 0}.
pub fn circle_division_probe() -> Result<f64> {
    let mut bad = 0usize;
    for n in 0..=12usize {
        let big = (n + 1) as i64;
        for s in -2 * big..=2 * big {
            let want = if s.rem_euclid(big) == 0 { big } else { 0 };
            if circle_division_sum(n, s) != want {
                bad += 1;
            }
        }
    }
    Ok(bad as f64)
}

/// (pairwise route disagreement for k + l ≤ 4, |⟨a⟩ − (q̄+ip̄)/√(2ħ)|) for the ζ = 0.3 Gaussian.
pub fn moment_routes_probe() -> Result<(f64, f64)> {
    let g = GaussianState::new(1.0, -0.5, Complex64::new(0.3, 0.0), 1.0)?;
    let spec = QuadratureSpec::default();
    let pairs: Vec<(usize, usize)> = (0..=4usize).flat_map(|s| (0..=s).map(move |k| (k, s - k))).collect();
    let route = par_max(&pairs, |&(k, l)| {
        let s = k + l;
        let avg = moment_angle_average(&g, k, l, &spec)?;
        let d1 = moment_discrete_angles(&g, k, l, &AngleDivision::harmonic(s, 0.0), &spec)?;
        let d2 = moment_discrete_angles(&g, k, l, &AngleDivision::harmonic(s, 0.913), &spec)?;
        Ok((d1 - avg).norm().max((d2 - avg).norm()).max((d2 - d1).norm()))
    })?;
    let mut worst = route;
    for preset in [preset_quarter_angles(), preset_harmonic_thirds()] {
        let ms = moments_low_order_custom(&g, &preset, &spec)?;
        for (k, l) in [(0, 1), (1, 0), (0, 2), (2, 0), (1, 1)] {
            let avg = moment_angle_average(&g, k, l, &spec)?;
            let got = ms.get(k, l).ok_or_else(|| Error::domain("preset moment missing"))?;
            worst = worst.max((got - avg).norm());
        }
    }
    let a = moment_angle_average(&g, 0, 1, &spec)?;
    let want = Complex64::new(g.qbar, g.pbar) / (2.0 * g.hbar).sqrt();
    Ok((worst, (a - want).norm()))
}

/// Max |ρ_mn − coherent closed form| for α = 0.5+0.3i from the analytic marginals, m, n ≤ 4.
pub fn coherent_elements_probe() -> Result<f64> {
    let alpha = Complex64::new(0.5, 0.3);
    let g = GaussianState::coherent(alpha, 1.0);
    let want = DensityMatrix::coherent(alpha, 4);
    let spec = QuadratureSpec::default();
    let idx: Vec<(usize, usize)> = (0..=4).flat_map(|m| (0..=4).map(move |n| (m, n))).collect();
    par_max(&idx, |&(m, n)| {
        let v = fock_element_from_tomogram(&g, m, n, Representation::Canonical, &spec)?;
        Ok((v - want.get(m, n)).norm())
    })
}

/// ⟨a⟩ of the reconstructed displaced vacuum against (q̄+ip̄)/√(2ħ).
pub fn displaced_density_probe() -> Result<f64> {
    let g = GaussianState::new(0.8, -0.4, Complex64::new(0.0, 0.0), 1.0)?;
    let d = density_from_tomogram(&g, 12, Representation::Canonical, &QuadratureSpec::default())?;
    let ms = MomentSet::from_density(&d.density, 1);
    let a = ms.get(0, 1).ok_or_else(|| Error::domain("moment missing"))?;
    Ok((a - Complex64::new(0.8, -0.4) / 2f64.sqrt()).norm())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_parse() {
        for s in Suite::EACH.into_iter().chain([Suite::All]) {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn failing_check_keeps_message() {
        let c = Check::measure("x", 1.0, Err(Error::domain("boom")));
        assert!(!c.pass && c.value.is_nan() && c.detail.unwrap().contains("boom"));
        assert!(Check::measure("y", 1e-3, Ok(1e-4)).pass);
    }

    #[test]
    fn specfun_and_radon_suites_pass() {
        for s in [Suite::Specfun, Suite::Radon, Suite::Symplectic] {
            let r = run(s, DEFAULT_SEED);
            assert!(r.pass, "{}", r.summary());
        }
    }

    #[test]
    fn random_zetas_stay_inside_disc() {
        let z = random_zetas(7, 50, 0.7);
        assert!(z.iter().all(|z| z.norm() <= 0.7));
        assert_eq!(z, random_zetas(7, 50, 0.7));
    }
}
