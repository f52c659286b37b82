//! Command-line front end.
//!
//! Exit codes: 0 success, 1 accuracy gate, 2 usage, 3 I/O.

use crate::error::Error;
use crate::numfmt::{fmt_f64, to_json_line, to_json_string};
use crate::pattern::{pattern_nonuniqueness_residual, PatternTable, Representation, Truncation};
use crate::radon::FilteredBackProjection;
use crate::reconstruct::{
    density_from_tomogram, moment_set_from_tomogram, moments_low_order_custom, qfunction_from_tomogram,
    QuadratureSpec, DEFAULT_PANELS,
};
use crate::specfun::EvalGrid;
use crate::states::{DensityMatrix, FockSource, GaussianState, MomentSet, RadonSource, Tomogram, TomogramGrid};
use crate::verify::{self, Suite};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const CONFIG_ENV: &str = "HOMOTOMO_CONFIG";

pub const EXIT_OK: i32 = 0;
pub const EXIT_ACCURACY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

// ---------------------------------------------------------------------------
// Configuration

/// Effective run configuration: flags override the config file, which overrides defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub hbar: f64,
    /// Fock truncation for reconstructed density matrices.
    pub nmax: usize,
    pub n_phi: usize,
    pub n_q: usize,
    /// Tomogram q half-width; `None` derives it from the state.
    pub q_max: Option<f64>,
    /// Gauss–Legendre panels for reconstruction quadratures.
    pub panels: usize,
    pub tol: f64,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            hbar: 1.0,
            nmax: 6,
            n_phi: crate::states::DEFAULT_N_PHI,
            n_q: crate::states::DEFAULT_N_Q,
            q_max: None,
            panels: DEFAULT_PANELS,
            tol: crate::reconstruct::DEFAULT_TOL,
            seed: verify::DEFAULT_SEED,
            out: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.hbar > 0.0 && self.hbar.is_finite()) {
            return Err(format!("hbar must be positive, got {}", self.hbar));
        }
        if self.nmax == 0 || self.panels < 2 || self.n_phi < 2 || self.n_q < 16 {
            return Err("nmax ≥ 1, panels ≥ 2, n_phi ≥ 2 and n_q ≥ 16 are required".into());
        }
        if matches!(self.q_max, Some(q) if !(q > 0.0 && q.is_finite())) {
            return Err("q_max must be positive".into());
        }
        if !(self.tol > 0.0 && self.tol <= 1e-2) {
            return Err(format!("tol must lie in (0, 1e-2], got {}", self.tol));
        }
        Ok(())
    }

    fn spec(&self) -> QuadratureSpec {
        QuadratureSpec {
            panels: self.panels,
            tol: self.tol,
            ..Default::default()
        }
    }

    fn grid_for<S: RadonSource + ?Sized>(&self, src: &S) -> TomogramGrid {
        TomogramGrid {
            n_phi: self.n_phi,
            n_q: self.n_q,
            q_max: self.q_max.unwrap_or_else(|| src.q_extent()),
        }
    }

    fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("config serializes")
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct ConfigFlags {
    /// JSON config file (default: $HOMOTOMO_CONFIG)
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub hbar: Option<f64>,
    #[arg(long, global = true)]
    pub nmax: Option<usize>,
    #[arg(long, global = true)]
    pub n_phi: Option<usize>,
    #[arg(long, global = true)]
    pub n_q: Option<usize>,
    #[arg(long, global = true)]
    pub q_max: Option<f64>,
    #[arg(long, global = true)]
    pub panels: Option<usize>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

fn load_config(flags: &ConfigFlags, out: Option<&Path>) -> Result<RunConfig, Failure> {
    let path = flags.config.clone().or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
    let mut cfg = match path {
        Some(p) => {
            let text = std::fs::read_to_string(&p).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?;
            serde_json::from_str::<RunConfig>(&text)
                .map_err(|e| Failure::Usage(format!("config {}: {e}", p.display())))?
        }
        None => RunConfig::default(),
    };
    macro_rules! take {
        ($($f:ident),*) => { $( if let Some(v) = flags.$f { cfg.$f = v; } )* };
    }
    take!(hbar, nmax, n_phi, n_q, panels, tol, seed);
    if flags.q_max.is_some() {
        cfg.q_max = flags.q_max;
    }
    if let Some(o) = out {
        cfg.out = Some(o.to_path_buf());
    }
    cfg.validate().map_err(Failure::Usage)?;
    Ok(cfg)
}

// ---------------------------------------------------------------------------
// Argument parsing

#[derive(Debug, Parser)]
#[command(name = "homotomo", version, about = "Optical homodyne tomography toolkit")]
pub struct Cli {
    #[command(flatten)]
    pub cfg: ConfigFlags,
    #[command(subcommand)]
    pub cmd: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a tomogram from a Gaussian state or a Fock-basis density matrix.
    GenTomogram(GenArgs),
    /// Reconstruct ρ, moments or Q-function values from a tomogram.
    Reconstruct(ReconstructArgs),
    /// Normally ordered moments from a tomogram.
    Moments(MomentsArgs),
    /// Husimi Q-function values from a tomogram.
    Qfunc(QfuncArgs),
    /// Tabulate a pattern function.
    PatternTable(PatternArgs),
    /// Wigner function by filtered back-projection.
    InvertRadon(InvertArgs),
    /// Run invariant suites.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// q̄,p̄,ζ with ζ written re+imi or re,im
    #[arg(long, allow_hyphen_values = true, conflicts_with = "fock_matrix", required_unless_present = "fock_matrix")]
    pub gaussian: Option<String>,
    /// JSON file {"rho": [[[re, im], ...], ...]}
    #[arg(long)]
    pub fock_matrix: Option<PathBuf>,
    /// CSV output; a JSON twin is written next to it
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Fock,
    Moments,
    Qfunc,
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    #[arg(long)]
    pub tomogram: PathBuf,
    #[arg(long, value_enum, default_value_t = Mode::Fock)]
    pub mode: Mode,
    /// Pattern-function representation for fock mode
    #[arg(long, default_value = "canonical")]
    pub rep: String,
    /// Highest moment order for moments mode
    #[arg(long, default_value_t = crate::reconstruct::DEFAULT_S_MAX)]
    pub order: usize,
    /// Two or three explicit angles (radians) for low-order moments
    #[arg(long, allow_hyphen_values = true)]
    pub angles: Option<String>,
    /// Q-function argument(s), re+imi or re,im; repeatable
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Vec<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    #[arg(long)]
    pub tomogram: PathBuf,
    #[arg(long, default_value_t = crate::reconstruct::DEFAULT_S_MAX)]
    pub order: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub angles: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct QfuncArgs {
    #[arg(long)]
    pub tomogram: PathBuf,
    #[arg(long, required = true, allow_hyphen_values = true)]
    pub alpha: Vec<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PatternArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub n: usize,
    /// Representation tag or `all`
    #[arg(long, default_value = "canonical")]
    pub rep: String,
    /// adaptive | fixed(J)
    #[arg(long, default_value = "adaptive")]
    pub trunc: String,
    #[arg(long, default_value_t = -5.0, allow_hyphen_values = true)]
    pub x_min: f64,
    #[arg(long, default_value_t = 5.0, allow_hyphen_values = true)]
    pub x_max: f64,
    #[arg(long, default_value_t = 101)]
    pub points: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InvertArgs {
    #[arg(long)]
    pub tomogram: PathBuf,
    /// q range as min,max,count
    #[arg(long, default_value = "-3,3,13", allow_hyphen_values = true)]
    pub q_range: String,
    /// p range as min,max,count
    #[arg(long, default_value = "-3,3,13", allow_hyphen_values = true)]
    pub p_range: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// specfun | symplectic | radon | pattern | reconstruct | all
    #[arg(default_value = "all")]
    pub suite: String,
    /// JSON report path (default: stdout)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

// ---------------------------------------------------------------------------
// Value parsing

/// Parse `re+imi`, `re-imi`, `imi`, `re` or `re,im`.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("cannot parse complex number '{s}' (use re+imi or re,im)");
    if let Some((a, b)) = t.split_once(',') {
        let re = a.parse::<f64>().map_err(|_| bad())?;
        let im = b.parse::<f64>().map_err(|_| bad())?;
        return Ok(Complex64::new(re, im));
    }
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    // Split at the last sign that is not part of an exponent or the leading sign.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let num = |x: &str| -> Result<f64, String> {
        match x {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => x.parse::<f64>().map_err(|_| bad()),
        }
    };
    match split {
        Some(i) => Ok(Complex64::new(body[..i].parse::<f64>().map_err(|_| bad())?, num(&body[i..])?)),
        None => Ok(Complex64::new(0.0, num(body)?)),
    }
}

/// `q̄,p̄,ζ`.
pub fn parse_gaussian(s: &str) -> Result<(f64, f64, Complex64), String> {
    let parts: Vec<&str> = s.splitn(3, ',').collect();
    if parts.len() != 3 {
        return Err(format!("--gaussian expects q̄,p̄,ζ, got '{s}'"));
    }
    let f = |x: &str| x.trim().parse::<f64>().map_err(|_| format!("bad number '{x}' in --gaussian"));
    Ok((f(parts[0])?, f(parts[1])?, parse_complex(parts[2])?))
}

fn parse_range(s: &str) -> Result<Vec<f64>, String> {
    let v = crate::numfmt::parse_f64_list(s).map_err(|e| format!("bad range '{s}': {e}"))?;
    match v.as_slice() {
        [a, b, n] if *n >= 1.0 && n.fract() == 0.0 && a <= b => {
            let n = *n as usize;
            if n == 1 {
                return Ok(vec![*a]);
            }
            Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect())
        }
        _ => Err(format!("range must be min,max,count with min ≤ max, got '{s}'")),
    }
}

fn parse_angles(s: &str) -> Result<Vec<f64>, String> {
    crate::numfmt::parse_f64_list(s).map_err(|e| format!("bad angle list '{s}': {e}"))
}

// ---------------------------------------------------------------------------
// Errors and output

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Io(String),
    Accuracy(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Io(_) => EXIT_IO,
            Failure::Accuracy(_) => EXIT_ACCURACY,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Io(m) | Failure::Accuracy(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        if e.is_io() {
            Failure::Io(msg)
        } else if e.is_accuracy() {
            Failure::Accuracy(msg)
        } else {
            Failure::Usage(msg)
        }
    }
}

/// Errors while loading an input file count as I/O failures.
fn input_err(path: &Path) -> impl Fn(Error) -> Failure + '_ {
    move |e| Failure::Io(format!("{}: {e}", path.display()))
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Io(e.to_string())),
    }
}

fn json_text(v: &Value) -> String {
    to_json_string(v).expect("JSON value serializes")
}

fn cx(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn read_tomogram(p: &Path) -> Result<Tomogram, Failure> {
    Tomogram::read(p).map_err(input_err(p))
}

// ---------------------------------------------------------------------------
// Entry point

/// Parse `args`, run, and return the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message());
            f.code()
        }
    }
}

fn dispatch(cli: &Cli) -> Result<i32, Failure> {
    let out = match &cli.cmd {
        Command::GenTomogram(a) => a.out.as_deref(),
        Command::Reconstruct(a) => a.out.as_deref(),
        Command::Moments(a) => a.out.as_deref(),
        Command::Qfunc(a) => a.out.as_deref(),
        Command::PatternTable(a) => a.out.as_deref(),
        Command::InvertRadon(a) => a.out.as_deref(),
        Command::Verify(a) => a.out.as_deref(),
    };
    let cfg = load_config(&cli.cfg, out)?;
    match &cli.cmd {
        Command::GenTomogram(a) => cmd_gen_tomogram(&cfg, a),
        Command::Reconstruct(a) => cmd_reconstruct(&cfg, a),
        Command::Moments(a) => {
            let t = read_tomogram(&a.tomogram)?;
            let v = moments_json(&cfg, &t, a.order, a.angles.as_deref())?;
            write_out(cfg.out.as_deref(), &json_text(&v))?;
            Ok(EXIT_OK)
        }
        Command::Qfunc(a) => {
            let t = read_tomogram(&a.tomogram)?;
            let v = qfunc_json(&cfg, &t, &a.alpha)?;
            write_out(cfg.out.as_deref(), &json_text(&v))?;
            Ok(EXIT_OK)
        }
        Command::PatternTable(a) => cmd_pattern_table(&cfg, a),
        Command::InvertRadon(a) => cmd_invert_radon(&cfg, a),
        Command::Verify(a) => cmd_verify(&cfg, a),
    }
}

// ---------------------------------------------------------------------------
// Commands

fn cmd_gen_tomogram(cfg: &RunConfig, a: &GenArgs) -> Result<i32, Failure> {
    let (src, state): (Box<dyn RadonSource>, Value) = if let Some(g) = &a.gaussian {
        let (q, p, z) = parse_gaussian(g).map_err(Failure::Usage)?;
        let s = GaussianState::new(q, p, z, cfg.hbar)?;
        (Box::new(s), json!({ "gaussian": { "qbar": q, "pbar": p, "zeta": cx(z) } }))
    } else {
        let path = a.fock_matrix.as_deref().expect("clap enforces one source");
        let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
        let rho = DensityMatrix::from_json_str(&text).map_err(|e| match e {
            Error::Json(_) | Error::Parse(_) | Error::Io(_) => Failure::Io(format!("{}: {e}", path.display())),
            other => Failure::Usage(format!("{}: {other}", path.display())),
        })?;
        let state = json!({ "fock_matrix": rho.to_json_value()["rho"].clone() });
        (Box::new(FockSource::new(rho, cfg.hbar)?), state)
    };
    let grid = cfg.grid_for(src.as_ref());
    let t = Tomogram::from_source(src.as_ref(), &grid)?
        .with_config(json!({ "run": cfg.to_value(), "state": state, "grid": serde_json::to_value(grid).expect("grid") }));
    let norm = t.normalization();
    let report = json_text(&json!({
        "config": cfg.to_value(),
        "normalization": {
            "max_deviation": norm.max_deviation,
            "min_value": norm.min_value,
            "integrals": norm.integrals,
        }
    }));
    match &cfg.out {
        Some(p) => {
            t.write_pair(p).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?;
            write_out(None, &report)?;
        }
        None => {
            write_out(None, &t.to_csv_string())?;
            eprint!("{report}");
        }
    }
    Ok(EXIT_OK)
}

fn cmd_reconstruct(cfg: &RunConfig, a: &ReconstructArgs) -> Result<i32, Failure> {
    let t = read_tomogram(&a.tomogram)?;
    let v = match a.mode {
        Mode::Fock => {
            let rep: Representation = a.rep.parse().map_err(|e: Error| Failure::Usage(e.to_string()))?;
            let d = density_from_tomogram(&t, cfg.nmax, rep, &cfg.spec())?;
            json!({
                "config": cfg.to_value(),
                "mode": "fock",
                "rep": rep.tag(),
                "rho": d.density.to_json_value()["rho"].clone(),
                "diagnostics": {
                    "hermiticity_defect": d.hermiticity_defect,
                    "trace": d.trace,
                    "richardson": d.richardson,
                }
            })
        }
        Mode::Moments => moments_json(cfg, &t, a.order, a.angles.as_deref())?,
        Mode::Qfunc => {
            if a.alpha.is_empty() {
                return Err(Failure::Usage("--mode qfunc needs at least one --alpha".into()));
            }
            qfunc_json(cfg, &t, &a.alpha)?
        }
    };
    write_out(cfg.out.as_deref(), &json_text(&v))?;
    Ok(EXIT_OK)
}

fn moments_json(cfg: &RunConfig, t: &Tomogram, order: usize, angles: Option<&str>) -> Result<Value, Failure> {
    let spec = cfg.spec();
    let (ms, route) = match angles {
        Some(s) => {
            let phis = parse_angles(s).map_err(Failure::Usage)?;
            (moments_low_order_custom(t, &phis, &spec)?, json!({ "angles": phis }))
        }
        None => (moment_set_from_tomogram(t, order, &spec)?, json!("angle-average")),
    };
    Ok(json!({
        "config": cfg.to_value(),
        "mode": "moments",
        "route": route,
        "moments": ms.to_json_value(),
        "diagnostics": { "conjugation_defect": ms.invariant_defect() },
    }))
}

fn qfunc_json(cfg: &RunConfig, t: &Tomogram, alphas: &[String]) -> Result<Value, Failure> {
    let spec = cfg.spec();
    let mut rows = Vec::new();
    for s in alphas {
        let a = parse_complex(s).map_err(Failure::Usage)?;
        let q = qfunction_from_tomogram(t, a, &spec)?;
        rows.push(json!({ "alpha": cx(a), "q": q }));
    }
    Ok(json!({ "config": cfg.to_value(), "mode": "qfunc", "values": rows }))
}

/// Read back the moments written by `moments` / `reconstruct --mode moments`.
pub fn read_moments_output(text: &str) -> crate::Result<MomentSet> {
    let v: Value = serde_json::from_str(text)?;
    MomentSet::from_json_value(&v["moments"])
}

fn cmd_pattern_table(cfg: &RunConfig, a: &PatternArgs) -> Result<i32, Failure> {
    let trunc: Truncation = a.trunc.parse().map_err(|e: Error| Failure::Usage(e.to_string()))?;
    let grid = EvalGrid::uniform(a.x_min, a.x_max, a.points).map_err(|e| Failure::Usage(e.to_string()))?;
    let cfg_line = format!("# config={}\n", to_json_line(&cfg.to_value()).expect("config"));
    if a.rep != "all" {
        let rep: Representation = a.rep.parse().map_err(|e: Error| Failure::Usage(e.to_string()))?;
        let t = PatternTable::compute(a.m, a.n, rep, trunc, grid)?;
        write_out(cfg.out.as_deref(), &format!("{cfg_line}{}", t.to_csv_string()))?;
        return Ok(EXIT_OK);
    }
    let tables = Representation::ALL
        .iter()
        .map(|&rep| PatternTable::compute(a.m, a.n, rep, trunc, grid.clone()))
        .collect::<crate::Result<Vec<_>>>()?;
    let mut text = cfg_line;
    text.push_str(&format!("# m={}\n# n={}\n# rep=all\n# trunc={}\n", a.m, a.n, trunc));
    let mut failed = false;
    for &rep in &Representation::ALL[1..] {
        match pattern_nonuniqueness_residual(Representation::Canonical, rep, a.m, a.n, &grid) {
            Ok(fit) => {
                let coefs: Vec<String> = fit.coefficients.iter().map(|&c| fmt_f64(c)).collect();
                let degs: Vec<String> = fit.degrees.iter().map(|d| d.to_string()).collect();
                text.push_str(&format!(
                    "# nonuniqueness canonical-{}: degrees=[{}] coefficients=[{}] residual={}\n",
                    rep.tag(),
                    degs.join(" "),
                    coefs.join(" "),
                    fmt_f64(fit.residual)
                ));
            }
            Err(e) => {
                failed = true;
                text.push_str(&format!("# nonuniqueness canonical-{}: FAILED {e}\n", rep.tag()));
            }
        }
    }
    let tags: Vec<&str> = Representation::ALL.iter().map(|r| r.tag()).collect();
    text.push_str(&format!("x,{}\n", tags.join(",")));
    for (i, x) in grid.points().iter().enumerate() {
        text.push_str(&fmt_f64(*x));
        for t in &tables {
            text.push(',');
            text.push_str(&fmt_f64(t.values[i]));
        }
        text.push('\n');
    }
    write_out(cfg.out.as_deref(), &text)?;
    if failed {
        eprintln!("error: representations disagree outside the Hermite span");
        return Ok(EXIT_ACCURACY);
    }
    Ok(EXIT_OK)
}

/// Rows (x, values per representation) of a `--rep all` table.
pub fn read_pattern_table_all(text: &str) -> crate::Result<(Vec<Representation>, Vec<f64>, Vec<Vec<f64>>)> {
    let mut reps = Vec::new();
    let mut xs = Vec::new();
    let mut cols: Vec<Vec<f64>> = Vec::new();
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        if let Some(h) = line.strip_prefix("x,") {
            reps = h.split(',').map(str::parse).collect::<crate::Result<Vec<Representation>>>()?;
            cols = vec![Vec::new(); reps.len()];
            continue;
        }
        let v = crate::numfmt::parse_f64_list(line).map_err(|e| Error::Parse(format!("bad row '{line}': {e}")))?;
        if v.len() != reps.len() + 1 {
            return Err(Error::Parse(format!("row width mismatch in '{line}'")));
        }
        xs.push(v[0]);
        for (c, &val) in cols.iter_mut().zip(&v[1..]) {
            c.push(val);
        }
    }
    Ok((reps, xs, cols))
}

/// Wigner values on a (q, p) grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerTable {
    pub rows: Vec<(f64, f64, f64)>,
    pub warnings: Vec<String>,
}

impl WignerTable {
    pub fn to_csv_string(&self, config: &Value) -> String {
        let mut s = format!("# config={}\n", to_json_line(config).expect("config"));
        for w in &self.warnings {
            s.push_str(&format!("# warning={w}\n"));
        }
        s.push_str("q,p,w\n");
        for &(q, p, w) in &self.rows {
            s.push_str(&format!("{},{},{}\n", fmt_f64(q), fmt_f64(p), fmt_f64(w)));
        }
        s
    }

    pub fn from_csv_str(text: &str) -> crate::Result<Self> {
        let mut rows = Vec::new();
        let mut warnings = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            if let Some(w) = line.strip_prefix("# warning=") {
                warnings.push(w.to_string());
                continue;
            }
            if line.starts_with('#') || line.starts_with("q,") {
                continue;
            }
            let v = crate::numfmt::parse_f64_list(line).map_err(|e| Error::Parse(format!("bad row '{line}': {e}")))?;
            match v.as_slice() {
                [q, p, w] => rows.push((*q, *p, *w)),
                _ => return Err(Error::Parse(format!("expected q,p,w in '{line}'"))),
            }
        }
        Ok(WignerTable { rows, warnings })
    }
}

fn cmd_invert_radon(cfg: &RunConfig, a: &InvertArgs) -> Result<i32, Failure> {
    let qs = parse_range(&a.q_range).map_err(Failure::Usage)?;
    let ps = parse_range(&a.p_range).map_err(Failure::Usage)?;
    let t = read_tomogram(&a.tomogram)?;
    let fbp = FilteredBackProjection::new(&t)?;
    let pts: Vec<(f64, f64)> = qs.iter().flat_map(|&q| ps.iter().map(move |&p| (q, p))).collect();
    let ws = crate::par::map(&pts, |&(q, p)| fbp.eval(q, p));
    let table = WignerTable {
        rows: pts.iter().zip(ws).map(|(&(q, p), w)| (q, p, w)).collect(),
        warnings: fbp.warnings().to_vec(),
    };
    for w in &table.warnings {
        eprintln!("warning: {w}");
    }
    write_out(cfg.out.as_deref(), &table.to_csv_string(&cfg.to_value()))?;
    Ok(EXIT_OK)
}

fn cmd_verify(cfg: &RunConfig, a: &VerifyArgs) -> Result<i32, Failure> {
    let suite: Suite = a.suite.parse().map_err(|e: Error| Failure::Usage(e.to_string()))?;
    let report = verify::run(suite, cfg.seed);
    eprint!("{}", report.summary());
    let v = json!({ "config": cfg.to_value(), "report": report });
    write_out(cfg.out.as_deref(), &json_text(&v))?;
    Ok(if report.pass { EXIT_OK } else { EXIT_ACCURACY })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        let c = |re, im| Complex64::new(re, im);
        assert_eq!(parse_complex("0.4+0.2i").unwrap(), c(0.4, 0.2));
        assert_eq!(parse_complex("0.4-0.2i").unwrap(), c(0.4, -0.2));
        assert_eq!(parse_complex("-1e-3+2.5e-2i").unwrap(), c(-1e-3, 2.5e-2));
        assert_eq!(parse_complex("1e+2-1e-2i").unwrap(), c(100.0, -0.01));
        assert_eq!(parse_complex("0.3,-0.1").unwrap(), c(0.3, -0.1));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("2i").unwrap(), c(0.0, 2.0));
        assert_eq!(parse_complex("0.5").unwrap(), c(0.5, 0.0));
        assert_eq!(parse_complex("1+i").unwrap(), c(1.0, 1.0));
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("1+2j").is_err());
    }

    #[test]
    fn gaussian_spec() {
        let (q, p, z) = parse_gaussian("1.5,-0.5,0.4+0.2i").unwrap();
        assert_eq!((q, p, z), (1.5, -0.5, Complex64::new(0.4, 0.2)));
        let (_, _, z) = parse_gaussian("0,0,0.1,0.3").unwrap();
        assert_eq!(z, Complex64::new(0.1, 0.3));
        assert!(parse_gaussian("1,2").is_err());
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("-1,1,3").unwrap(), vec![-1.0, 0.0, 1.0]);
        assert_eq!(parse_range("0.5,0.5,1").unwrap(), vec![0.5]);
        assert!(parse_range("1,0,3").is_err());
        assert!(parse_range("0,1,2.5").is_err());
    }

    #[test]
    fn config_validation() {
        assert!(RunConfig::default().validate().is_ok());
        let bad = RunConfig { tol: 0.5, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = RunConfig { hbar: -1.0, ..Default::default() };
        assert!(bad.validate().is_err());
        let text = serde_json::to_string(&RunConfig::default()).unwrap();
        assert_eq!(serde_json::from_str::<RunConfig>(&text).unwrap(), RunConfig::default());
        assert!(serde_json::from_str::<RunConfig>(r#"{"hbar": 2.0, "bogus": 1}"#).is_err());
        let partial: RunConfig = serde_json::from_str(r#"{"hbar": 2.0}"#).unwrap();
        assert_eq!(partial.hbar, 2.0);
        assert_eq!(partial.nmax, RunConfig::default().nmax);
    }

    #[test]
    fn error_classes_map_to_exit_codes() {
        assert_eq!(Failure::from(Error::Accuracy("x".into())).code(), EXIT_ACCURACY);
        assert_eq!(Failure::from(Error::domain("x")).code(), EXIT_USAGE);
        let io = std::io::Error::new(std::io::ErrorKind::NotFound, "gone");
        assert_eq!(Failure::from(Error::Io(io)).code(), EXIT_IO);
    }

    #[test]
    fn wigner_table_round_trip() {
        let t = WignerTable {
            rows: vec![(0.1, -0.2, 0.318), (1.0 / 3.0, 2.0, -1e-9)],
            warnings: vec!["coarse".into()],
        };
        let s = t.to_csv_string(&json!({"a": 1}));
        assert_eq!(WignerTable::from_csv_str(&s).unwrap(), t);
    }
}
