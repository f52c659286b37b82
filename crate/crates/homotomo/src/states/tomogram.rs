use super::RadonSource;
use crate::error::{Error, Result};
use crate::numfmt::{fmt_f64, join_f64, parse_f64_list, to_json_line, to_json_string};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::Path;

pub const DEFAULT_N_PHI: usize = 181;
pub const DEFAULT_N_Q: usize = 1025;
const NEG_TOL: f64 = 1e-12;
const INTERP_POINTS: usize = 8;

/// Angle and position sampling of a tomogram.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TomogramGrid {
    pub n_phi: usize,
    pub n_q: usize,
    pub q_max: f64,
}

impl TomogramGrid {
    pub fn default_for<S: RadonSource + ?Sized>(src: &S) -> Self {
        TomogramGrid { n_phi: DEFAULT_N_PHI, n_q: DEFAULT_N_Q, q_max: src.q_extent() }
    }

    pub fn phis(&self) -> Vec<f64> {
        (0..self.n_phi).map(|i| PI * i as f64 / self.n_phi as f64).collect()
    }

    pub fn qs(&self) -> Vec<f64> {
        let h = 2.0 * self.q_max / (self.n_q - 1) as f64;
        (0..self.n_q).map(|j| -self.q_max + h * j as f64).collect()
    }
}

/// Sampled rotated marginals W̆(cos φ_i, sin φ_i; q_j).
#[derive(Debug, Clone, PartialEq)]
pub struct Tomogram {
    phis: Vec<f64>,
    qs: Vec<f64>,
    values: Vec<f64>,
    hbar: f64,
    config: serde_json::Value,
}

#[derive(Serialize, Deserialize)]
struct TomogramFile {
    hbar: f64,
    phis: Vec<f64>,
    qs: Vec<f64>,
    values: Vec<Vec<f64>>,
    #[serde(default)]
    config: serde_json::Value,
}

/// Per-angle trapezoid integrals over q.
#[derive(Debug, Clone, Serialize)]
pub struct NormalizationReport {
    pub integrals: Vec<f64>,
    pub max_deviation: f64,
    pub min_value: f64,
}

impl Tomogram {
    pub fn new(phis: Vec<f64>, qs: Vec<f64>, values: Vec<f64>, hbar: f64) -> Result<Self> {
        if phis.is_empty() || qs.len() < INTERP_POINTS {
            return Err(Error::domain(format!(
                "tomogram needs at least one angle and {INTERP_POINTS} positions"
            )));
        }
        if values.len() != phis.len() * qs.len() {
            return Err(Error::domain(format!(
                "tomogram has {} values for a {}×{} grid",
                values.len(),
                phis.len(),
                qs.len()
            )));
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::domain(format!("ħ must be positive, got {hbar}")));
        }
        if phis.iter().any(|&p| !(0.0..PI).contains(&p)) || phis.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::domain("angles must be strictly increasing in [0, π)"));
        }
        if qs.iter().any(|q| !q.is_finite()) || qs.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::domain("positions must be finite and strictly increasing"));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < -NEG_TOL) {
            return Err(Error::domain(format!("tomogram values must be finite and ≥ −1e-12, found {v}")));
        }
        Ok(Tomogram { phis, qs, values, hbar, config: serde_json::Value::Null })
    }

    /// Sample `src` on `grid`, filling rows in parallel.
    pub fn from_source<S: RadonSource + ?Sized>(src: &S, grid: &TomogramGrid) -> Result<Self> {
        if grid.n_phi == 0 || grid.n_q < INTERP_POINTS || !(grid.q_max > 0.0) {
            return Err(Error::domain("tomogram grid needs n_phi ≥ 1, n_q ≥ 8 and q_max > 0"));
        }
        let phis = grid.phis();
        let qs = grid.qs();
        let nq = qs.len();
        let mut values = vec![0.0; phis.len() * nq];
        let threads = std::thread::available_parallelism().map_or(1, |n| n.get()).min(phis.len());
        let rows_per = phis.len().div_ceil(threads);
        std::thread::scope(|scope| {
            for (chunk_idx, chunk) in values.chunks_mut(rows_per * nq).enumerate() {
                let phis = &phis;
                let qs = &qs;
                scope.spawn(move || {
                    for (r, row) in chunk.chunks_mut(nq).enumerate() {
                        let phi = phis[chunk_idx * rows_per + r];
                        for (slot, &q) in row.iter_mut().zip(qs) {
                            *slot = src.marginal(phi, q);
                        }
                    }
                });
            }
        });
        // Round-off can leave tiny negative tails; clamp those within tolerance only.
        for v in values.iter_mut() {
            if *v < 0.0 && *v >= -NEG_TOL {
                *v = 0.0;
            }
        }
        let mut t = Tomogram::new(phis, qs, values, src.hbar())?;
        t.config = serde_json::json!({ "source": src.describe(), "grid": grid });
        Ok(t)
    }

    pub fn with_config(mut self, config: serde_json::Value) -> Self {
        self.config = config;
        self
    }

    pub fn config(&self) -> &serde_json::Value {
        &self.config
    }

    pub fn phis(&self) -> &[f64] {
        &self.phis
    }

    pub fn qs(&self) -> &[f64] {
        &self.qs
    }

    pub fn hbar_value(&self) -> f64 {
        self.hbar
    }

    pub fn n_phi(&self) -> usize {
        self.phis.len()
    }

    pub fn n_q(&self) -> usize {
        self.qs.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.qs.len();
        &self.values[i * n..(i + 1) * n]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Pointwise sum of two tomograms on the same grid.
    pub fn add(&self, other: &Tomogram) -> Result<Tomogram> {
        if self.phis != other.phis || self.qs != other.qs || self.hbar != other.hbar {
            return Err(Error::domain("tomograms must share grid and ħ"));
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Tomogram::new(self.phis.clone(), self.qs.clone(), values, self.hbar)
    }

    /// True when the angles are φ₀ + iπ/N.
    pub fn has_uniform_angles(&self) -> bool {
        let n = self.phis.len() as f64;
        let p0 = self.phis[0];
        self.phis
            .iter()
            .enumerate()
            .all(|(i, &p)| (p - p0 - PI * i as f64 / n).abs() < 1e-12)
    }

    pub fn normalization(&self) -> NormalizationReport {
        let integrals: Vec<f64> = (0..self.n_phi())
            .map(|i| {
                let row = self.row(i);
                self.qs
                    .windows(2)
                    .zip(row.windows(2))
                    .map(|(q, v)| 0.5 * (q[1] - q[0]) * (v[0] + v[1]))
                    .sum()
            })
            .collect();
        let max_deviation = integrals.iter().map(|s| (s - 1.0).abs()).fold(0.0, f64::max);
        let min_value = self.values.iter().copied().fold(f64::INFINITY, f64::min);
        NormalizationReport { integrals, max_deviation, min_value }
    }

    /// Validate the per-angle normalization against `tol`.
    pub fn check_normalization(&self, tol: f64) -> Result<NormalizationReport> {
        let r = self.normalization();
        if r.max_deviation > tol {
            return Err(Error::Accuracy(format!(
                "tomogram row integral deviates from 1 by {:.3e} (tol {tol:.1e})",
                r.max_deviation
            )));
        }
        Ok(r)
    }

    /// Lagrange interpolation in q on row `i`; zero outside the sampled window.
    pub fn row_value(&self, i: usize, q: f64) -> f64 {
        let qs = &self.qs;
        let n = qs.len();
        if q < qs[0] || q > qs[n - 1] {
            return 0.0;
        }
        let row = self.row(i);
        let j = qs.partition_point(|&x| x <= q);
        if j > 0 && qs[j - 1] == q {
            return row[j - 1];
        }
        let start = j.saturating_sub(INTERP_POINTS / 2).min(n - INTERP_POINTS);
        let xs = &qs[start..start + INTERP_POINTS];
        let ys = &row[start..start + INTERP_POINTS];
        lagrange(xs, ys, q)
    }

    /// Row index `k` on the periodic extension: angle φ_{k mod N} + ⌊k/N⌋π, q reflected on odd shifts.
    fn extended(&self, k: isize, q: f64) -> (f64, f64) {
        let n = self.phis.len() as isize;
        let s = k.div_euclid(n);
        let i = k.rem_euclid(n) as usize;
        let sign = if s % 2 == 0 { 1.0 } else { -1.0 };
        (self.phis[i] + s as f64 * PI, self.row_value(i, sign * q))
    }
}

fn lagrange(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let mut s = 0.0;
    for (i, (&xi, &yi)) in xs.iter().zip(ys).enumerate() {
        let mut w = 1.0;
        for (k, &xk) in xs.iter().enumerate() {
            if k != i {
                w *= (x - xk) / (xi - xk);
            }
        }
        s += w * yi;
    }
    s
}

impl RadonSource for Tomogram {
    fn hbar(&self) -> f64 {
        self.hbar
    }

    fn radon(&self, u: f64, v: f64, c: f64) -> f64 {
        super::radon_via_marginal(self, u, v, c)
    }

    /// Exact rows at sampled angles, cubic Lagrange in φ across the periodic extension otherwise.
    fn marginal(&self, phi: f64, q: f64) -> f64 {
        let mut phi = phi.rem_euclid(2.0 * PI);
        let mut q = q;
        if phi >= PI {
            phi -= PI;
            q = -q;
        }
        let n = self.phis.len();
        let j = self.phis.partition_point(|&p| p <= phi);
        if j > 0 && (self.phis[j - 1] - phi).abs() < 1e-12 {
            return self.row_value(j - 1, q);
        }
        if j < n && (self.phis[j] - phi).abs() < 1e-12 {
            return self.row_value(j, q);
        }
        if n < 4 {
            return self.row_value(j.min(n - 1), q);
        }
        let mut xs = [0.0; 4];
        let mut ys = [0.0; 4];
        for (slot, k) in (j as isize - 2..j as isize + 2).enumerate() {
            let (a, v) = self.extended(k, q);
            xs[slot] = a;
            ys[slot] = v;
        }
        lagrange(&xs, &ys, phi)
    }

    fn q_extent(&self) -> f64 {
        self.qs[0].abs().max(self.qs[self.qs.len() - 1].abs())
    }

    fn native_angles(&self) -> Option<Vec<f64>> {
        self.has_uniform_angles().then(|| self.phis.clone())
    }

    fn data_extent(&self) -> Option<f64> {
        Some(self.q_extent())
    }

    fn describe(&self) -> serde_json::Value {
        serde_json::json!({
            "kind": "tomogram",
            "n_phi": self.n_phi(),
            "n_q": self.n_q(),
            "hbar": self.hbar,
        })
    }
}

// ---------------------------------------------------------------------------
// Serialization

impl Tomogram {
    pub fn to_csv_string(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("# hbar={}\n", fmt_f64(self.hbar)));
        s.push_str(&format!("# phis={}\n", join_f64(&self.phis)));
        s.push_str(&format!("# qs={}\n", join_f64(&self.qs)));
        let cfg = to_json_line(&self.config).expect("JSON value serializes");
        s.push_str(&format!("# config={cfg}\n"));
        for i in 0..self.n_phi() {
            s.push_str(&join_f64(self.row(i)));
            s.push('\n');
        }
        s
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut hbar = None;
        let mut phis = None;
        let mut qs = None;
        let mut config = serde_json::Value::Null;
        let mut values = Vec::new();
        let bad = |what: &str| Error::Parse(format!("tomogram CSV: {what}"));
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let rest = rest.trim();
                if let Some(v) = rest.strip_prefix("hbar=") {
                    hbar = Some(v.trim().parse::<f64>().map_err(|_| bad("bad hbar"))?);
                } else if let Some(v) = rest.strip_prefix("phis=") {
                    phis = Some(parse_f64_list(v).map_err(|_| bad("bad phis"))?);
                } else if let Some(v) = rest.strip_prefix("qs=") {
                    qs = Some(parse_f64_list(v).map_err(|_| bad("bad qs"))?);
                } else if let Some(v) = rest.strip_prefix("config=") {
                    config = serde_json::from_str(v).map_err(|_| bad("bad config"))?;
                }
                continue;
            }
            let row = parse_f64_list(line).map_err(|_| bad("bad value row"))?;
            values.push(row);
        }
        let phis = phis.ok_or_else(|| bad("missing '# phis=' header"))?;
        let qs = qs.ok_or_else(|| bad("missing '# qs=' header"))?;
        let hbar = hbar.ok_or_else(|| bad("missing '# hbar=' header"))?;
        if values.len() != phis.len() || values.iter().any(|r| r.len() != qs.len()) {
            return Err(bad("value rows do not match the phis × qs grid"));
        }
        let t = Tomogram::new(phis, qs, values.concat(), hbar)?;
        Ok(t.with_config(config))
    }

    pub fn to_json_string(&self) -> String {
        let f = TomogramFile {
            hbar: self.hbar,
            phis: self.phis.clone(),
            qs: self.qs.clone(),
            values: (0..self.n_phi()).map(|i| self.row(i).to_vec()).collect(),
            config: self.config.clone(),
        };
        to_json_string(&f).expect("tomogram serializes")
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let f: TomogramFile = serde_json::from_str(text)?;
        if f.values.iter().any(|r| r.len() != f.qs.len()) {
            return Err(Error::Parse("tomogram JSON: ragged value rows".into()));
        }
        let t = Tomogram::new(f.phis, f.qs, f.values.concat(), f.hbar)?;
        Ok(t.with_config(f.config))
    }

    /// Read CSV or JSON, chosen by extension (`.json`) or by the first non-space byte.
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let is_json = path.extension().is_some_and(|e| e == "json") || text.trim_start().starts_with('{');
        if is_json {
            Tomogram::from_json_str(&text)
        } else {
            Tomogram::from_csv_str(&text)
        }
    }

    /// Write `<stem>.csv` and its `<stem>.json` twin.
    pub fn write_pair(&self, csv_path: &Path) -> Result<()> {
        std::fs::write(csv_path, self.to_csv_string())?;
        std::fs::write(csv_path.with_extension("json"), self.to_json_string())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{FockSource, DensityMatrix, GaussianState};
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn small_grid() -> TomogramGrid {
        TomogramGrid { n_phi: 12, n_q: 201, q_max: 7.0 }
    }

    #[test]
    fn default_grid_vacuum_normalized() {
        let s = GaussianState::vacuum(1.0);
        let g = TomogramGrid::default_for(&s);
        assert_eq!((g.n_phi, g.n_q), (181, 1025));
        assert!((g.q_max - 8.0 * 0.5f64.sqrt()).abs() < 1e-15);
        let t = Tomogram::from_source(&s, &g).unwrap();
        let r = t.check_normalization(1e-8).unwrap();
        assert!(r.max_deviation < 1e-12);
        assert!(t.has_uniform_angles());
    }

    #[test]
    fn squeezed_rows_normalized() {
        let s = GaussianState::new(1.5, -0.5, Complex64::new(0.4, 0.2), 1.0).unwrap();
        let t = Tomogram::from_source(&s, &TomogramGrid::default_for(&s)).unwrap();
        assert!(t.check_normalization(1e-6).is_ok());
    }

    #[test]
    fn fock_rows_normalized() {
        let rho = DensityMatrix::fock(3, 8).unwrap();
        let src = FockSource::new(rho, 1.0).unwrap();
        let t = Tomogram::from_source(&src, &TomogramGrid::default_for(&src)).unwrap();
        assert!(t.check_normalization(1e-6).is_ok());
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(Tomogram::new(vec![0.0], vec![0.0; 8], vec![0.0; 7], 1.0).is_err());
        let qs: Vec<f64> = (0..8).map(|i| i as f64).collect();
        assert!(Tomogram::new(vec![3.5], qs.clone(), vec![0.0; 8], 1.0).is_err());
        assert!(Tomogram::new(vec![0.0], qs, vec![-1.0; 8], 1.0).is_err());
    }

    #[test]
    fn csv_and_json_round_trip_exactly() {
        let s = GaussianState::new(0.3, -0.2, Complex64::new(0.1, 0.3), 0.7).unwrap();
        let t = Tomogram::from_source(&s, &small_grid()).unwrap();
        let back = Tomogram::from_csv_str(&t.to_csv_string()).unwrap();
        assert_eq!(back, t);
        let back = Tomogram::from_json_str(&t.to_json_string()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn files_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let t = Tomogram::from_source(&GaussianState::vacuum(1.0), &small_grid()).unwrap();
        let p = dir.path().join("t.csv");
        t.write_pair(&p).unwrap();
        assert_eq!(Tomogram::read(&p).unwrap(), t);
        assert_eq!(Tomogram::read(&p.with_extension("json")).unwrap(), t);
    }

    #[test]
    fn interpolation_reproduces_source() {
        let s = GaussianState::new(0.4, 0.3, Complex64::new(0.2, -0.1), 1.0).unwrap();
        let g = TomogramGrid { n_phi: 90, n_q: 801, q_max: 8.0 };
        let t = Tomogram::from_source(&s, &g).unwrap();
        for &(phi, q) in &[(0.0, 0.123), (0.51, -1.3), (2.0, 0.77), (3.5, 1.1), (-0.4, 0.2)] {
            let a = t.marginal(phi, q);
            let b = s.marginal(phi, q);
            assert!((a - b).abs() < 1e-5, "φ={phi} q={q}: {a} vs {b}");
        }
        assert_eq!(t.marginal(t.phis()[5], t.qs()[100]), t.row(5)[100]);
    }

    #[test]
    fn outside_window_is_zero() {
        let t = Tomogram::from_source(&GaussianState::vacuum(1.0), &small_grid()).unwrap();
        assert_eq!(t.row_value(0, 7.5), 0.0);
    }

    proptest! {
        #[test]
        fn csv_round_trip_is_bit_exact(vals in proptest::collection::vec(0.0f64..10.0, 16), hbar in 0.01f64..5.0) {
            let qs: Vec<f64> = (0..8).map(|i| -1.0 + 0.3 * i as f64).collect();
            let t = Tomogram::new(vec![0.0, 1.0], qs, vals, hbar).unwrap();
            prop_assert_eq!(Tomogram::from_csv_str(&t.to_csv_string()).unwrap(), t.clone());
            prop_assert_eq!(Tomogram::from_json_str(&t.to_json_string()).unwrap(), t);
        }
    }
}
