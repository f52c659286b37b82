//! Squeeze, rotation and displacement algebra in the real (Q, P) and complex (a, a†)
//! representations.
//!
//! Maps act on row vectors: (Q, P) ↦ (Q, P)·M with M = [[α, β], [γ, δ]]. A state
//! squeezed by M has W(q, p) = W₀(αq + γp, βq + δp), and its Radon variables
//! transform contragrediently, (u, v) ↦ (δu − βv, −γu + αv).
//!
//! When squeezing and displacement are combined the order matters; this module only
//! supplies the maps and leaves the composition order to the caller.

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

const SERIES_EPS: f64 = 1e-4;
const UNIMODULAR_TOL: f64 = 1e-12;
const REAL_TOL: f64 = 1e-9;

/// Real unimodular 2×2 map [[α, β], [γ, δ]].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymplecticMap {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

/// Complex twin [[κ, λ], [μ, ν]] acting on (a, a†).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexSqueezeMap {
    pub kappa: Complex64,
    pub lambda: Complex64,
    pub mu: Complex64,
    pub nu: Complex64,
}

/// Parameters of S(ξ, η, ζ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezeParams {
    pub xi: Complex64,
    pub eta: Complex64,
    pub zeta: Complex64,
    /// Marks the unitary subfamily ξ = ζ̄, η real.
    pub unitary: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Displacement {
    pub qbar: f64,
    pub pbar: f64,
}

impl Displacement {
    pub fn new(qbar: f64, pbar: f64) -> Result<Self> {
        if !qbar.is_finite() || !pbar.is_finite() {
            return Err(Error::domain("displacement must be finite"));
        }
        Ok(Displacement { qbar, pbar })
    }

    pub fn zero() -> Self {
        Displacement::default()
    }
}

impl SqueezeParams {
    pub fn new(xi: Complex64, eta: Complex64, zeta: Complex64) -> Self {
        let unitary = (xi - zeta.conj()).norm() <= 1e-15 * (1.0 + xi.norm()) && eta.im == 0.0;
        SqueezeParams {
            xi,
            eta,
            zeta,
            unitary,
        }
    }

    /// S(ζ′*, η′, ζ′) with real η′.
    pub fn unitary(zeta_prime: Complex64, eta_prime: f64) -> Self {
        SqueezeParams {
            xi: zeta_prime.conj(),
            eta: Complex64::new(eta_prime, 0.0),
            zeta: zeta_prime,
            unitary: true,
        }
    }

    /// Rotation S(0, φ, 0).
    pub fn rotation(phi: f64) -> Self {
        Self::unitary(Complex64::new(0.0, 0.0), phi)
    }
}

/// (ch ε, sh ε/ε) as functions of ε², so the branch of √ never matters.
fn ch_and_shc(eps2: Complex64) -> (Complex64, Complex64) {
    if eps2.norm() < SERIES_EPS * SERIES_EPS {
        let e4 = eps2 * eps2;
        let e6 = e4 * eps2;
        let ch = 1.0 + eps2 / 2.0 + e4 / 24.0 + e6 / 720.0;
        let shc = 1.0 + eps2 / 6.0 + e4 / 120.0 + e6 / 5040.0;
        (ch, shc)
    } else {
        let e = eps2.sqrt();
        (e.cosh(), e.sinh() / e)
    }
}

fn squeeze_matrix_entries(p: &SqueezeParams) -> [Complex64; 4] {
    let i = Complex64::i();
    let eps2 = p.xi * p.zeta - p.eta * p.eta;
    let (ch, s) = ch_and_shc(eps2);
    let sum = (p.xi + p.zeta) / 2.0;
    [
        ch + sum * s,
        (i * (p.xi - p.zeta) - 2.0 * p.eta) / 2.0 * s,
        (i * (p.xi - p.zeta) + 2.0 * p.eta) / 2.0 * s,
        ch - sum * s,
    ]
}

/// Complex (Q, P) matrix of a general, possibly nonunitary, squeeze.
pub fn squeeze_matrix_complex(p: &SqueezeParams) -> [[Complex64; 2]; 2] {
    let [a, b, c, d] = squeeze_matrix_entries(p);
    [[a, b], [c, d]]
}

/// Real (Q, P) matrix of a squeeze whose matrix is real.
pub fn matrix_from_squeeze(p: &SqueezeParams) -> Result<SymplecticMap> {
    let e = squeeze_matrix_entries(p);
    let worst = e.iter().fold(0.0f64, |m, z| m.max(z.im.abs()));
    if worst > REAL_TOL {
        let msg = format!("squeeze matrix has imaginary part {worst:.3e}");
        return Err(if p.unitary {
            Error::Consistency(msg)
        } else {
            Error::domain(format!("{msg}; use squeeze_matrix_complex for nonunitary parameters"))
        });
    }
    Ok(SymplecticMap {
        alpha: e[0].re,
        beta: e[1].re,
        gamma: e[2].re,
        delta: e[3].re,
    })
}

/// Inverse correspondence. ε = Arch((α+δ)/2) is used so that ch ε reproduces the trace
/// for every map; the factor Arsh ϑ/ϑ becomes ε/sh ε with ϑ = +sh ε.
pub fn squeeze_from_matrix(m: &SymplecticMap) -> Result<SqueezeParams> {
    m.check()?;
    let t = 0.5 * (m.alpha + m.delta);
    let i = Complex64::i();
    if (t + 1.0).abs() < 1e-12 {
        let off = m.beta.abs() + m.gamma.abs() + (m.alpha + 1.0).abs() + (m.delta + 1.0).abs();
        if off < 1e-10 {
            return Ok(SqueezeParams::rotation(std::f64::consts::PI));
        }
        return Err(Error::domain(
            "trace (α+δ)/2 = −1 with nontrivial off-diagonal part has no squeeze exponent",
        ));
    }
    let eps = Complex64::new(t, 0.0).acosh();
    let factor = if eps.norm() < SERIES_EPS {
        let e2 = eps * eps;
        1.0 - e2 / 6.0 + 7.0 * e2 * e2 / 360.0
    } else {
        eps / eps.sinh()
    };
    let (a, b, c, d) = (m.alpha, m.beta, m.gamma, m.delta);
    let xi = (a - i * b - i * c - d) / 2.0 * factor;
    let eta = -(b - c) / 2.0 * factor;
    let zeta = (a + i * b + i * c - d) / 2.0 * factor;
    Ok(SqueezeParams::new(xi, eta, zeta))
}

impl SymplecticMap {
    pub fn new(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Result<Self> {
        let m = SymplecticMap {
            alpha,
            beta,
            gamma,
            delta,
        };
        m.check()?;
        Ok(m)
    }

    pub fn identity() -> Self {
        SymplecticMap {
            alpha: 1.0,
            beta: 0.0,
            gamma: 0.0,
            delta: 1.0,
        }
    }

    /// R(φ): (Q, P) ↦ (Q cos φ + P sin φ, −Q sin φ + P cos φ).
    pub fn rotation(phi: f64) -> Self {
        let (s, c) = phi.sin_cos();
        SymplecticMap {
            alpha: c,
            beta: -s,
            gamma: s,
            delta: c,
        }
    }

    pub fn det(&self) -> f64 {
        self.alpha * self.delta - self.beta * self.gamma
    }

    fn check(&self) -> Result<()> {
        let d = self.det();
        if !d.is_finite() || (d - 1.0).abs() > UNIMODULAR_TOL * (1.0 + self.norm2()) {
            return Err(Error::domain(format!("map is not unimodular: det = {d}")));
        }
        Ok(())
    }

    fn norm2(&self) -> f64 {
        self.alpha * self.alpha + self.beta * self.beta + self.gamma * self.gamma + self.delta * self.delta
    }

    /// Row-vector composition: applying `self` then `other` gives (Q,P)·self·other.
    pub fn then(&self, other: &SymplecticMap) -> SymplecticMap {
        SymplecticMap {
            alpha: self.alpha * other.alpha + self.beta * other.gamma,
            beta: self.alpha * other.beta + self.beta * other.delta,
            gamma: self.gamma * other.alpha + self.delta * other.gamma,
            delta: self.gamma * other.beta + self.delta * other.delta,
        }
    }

    pub fn inverse(&self) -> SymplecticMap {
        SymplecticMap {
            alpha: self.delta,
            beta: -self.beta,
            gamma: -self.gamma,
            delta: self.alpha,
        }
    }

    /// (q′, p′) = (q, p)·M, the argument at which the primary W₀ is read.
    pub fn apply_point(&self, q: f64, p: f64) -> (f64, f64) {
        (self.alpha * q + self.gamma * p, self.beta * q + self.delta * p)
    }
}

/// (u′, v′) = (δu − βv, −γu + αv).
pub fn transform_radon_args(u: f64, v: f64, m: &SymplecticMap) -> (f64, f64) {
    (m.delta * u - m.beta * v, -m.gamma * u + m.alpha * v)
}

pub fn complex_from_real(m: &SymplecticMap) -> ComplexSqueezeMap {
    let i = Complex64::i();
    let (a, b, c, d) = (m.alpha, m.beta, m.gamma, m.delta);
    ComplexSqueezeMap {
        kappa: (a + i * b - i * c + d) / 2.0,
        lambda: (a - i * b - i * c - d) / 2.0,
        mu: (a + i * b + i * c - d) / 2.0,
        nu: (a - i * b + i * c + d) / 2.0,
    }
}

/// Inverse of [`complex_from_real`]; errors when the entries are not real to 1e−9.
pub fn real_from_complex(c: &ComplexSqueezeMap) -> Result<SymplecticMap> {
    let i = Complex64::i();
    let (k, l, m, n) = (c.kappa, c.lambda, c.mu, c.nu);
    let e = [
        (k + l + m + n) / 2.0,
        -i * (k - l + m - n) / 2.0,
        i * (k + l - m - n) / 2.0,
        (k - l - m + n) / 2.0,
    ];
    let worst = e.iter().fold(0.0f64, |acc, z| acc.max(z.im.abs()));
    if worst > REAL_TOL {
        return Err(Error::Consistency(format!(
            "complex map has no real twin (imaginary part {worst:.3e})"
        )));
    }
    Ok(SymplecticMap {
        alpha: e[0].re,
        beta: e[1].re,
        gamma: e[2].re,
        delta: e[3].re,
    })
}

impl ComplexSqueezeMap {
    pub fn from_params(p: &SqueezeParams) -> Self {
        let eps2 = p.xi * p.zeta - p.eta * p.eta;
        let (ch, s) = ch_and_shc(eps2);
        let i = Complex64::i();
        ComplexSqueezeMap {
            kappa: ch - i * p.eta * s,
            lambda: p.xi * s,
            mu: p.zeta * s,
            nu: ch + i * p.eta * s,
        }
    }

    pub fn det(&self) -> Complex64 {
        self.kappa * self.nu - self.lambda * self.mu
    }
}

/// ζ = ζ′ th|ζ′|/|ζ′|.
pub fn zeta_reparam(zeta_prime: Complex64) -> Complex64 {
    let r = zeta_prime.norm();
    if r < 1e-8 {
        return zeta_prime * (1.0 - r * r / 3.0);
    }
    zeta_prime * (r.tanh() / r)
}

/// ζ′ = ζ Arth|ζ|/|ζ|, |ζ| < 1.
pub fn zeta_unreparam(zeta: Complex64) -> Result<Complex64> {
    let r = zeta.norm();
    if r >= 1.0 {
        return Err(Error::domain(format!("|ζ| must be < 1, got {r}")));
    }
    if r < 1e-8 {
        return Ok(zeta * (1.0 + r * r / 3.0));
    }
    Ok(zeta * (r.atanh() / r))
}

/// Real and complex matrices of the unitary squeeze S(ζ′*, 0, ζ′) written through ζ.
pub fn unitary_squeeze_matrices(zeta: Complex64) -> Result<(SymplecticMap, ComplexSqueezeMap)> {
    let r2 = zeta.norm_sqr();
    if !(r2 < 1.0) {
        return Err(Error::domain(format!("|ζ| must be < 1, got {}", r2.sqrt())));
    }
    let s = (1.0 - r2).sqrt();
    let real = SymplecticMap {
        alpha: (1.0 + zeta.re) / s,
        beta: zeta.im / s,
        gamma: zeta.im / s,
        delta: (1.0 - zeta.re) / s,
    };
    let one = Complex64::new(1.0 / s, 0.0);
    let cplx = ComplexSqueezeMap {
        kappa: one,
        lambda: zeta.conj() / s,
        mu: zeta / s,
        nu: one,
    };
    Ok((real, cplx))
}
