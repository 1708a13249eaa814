//! Command-line front end. Every command prints CSV (default) or JSON to
//! standard output or `--out`.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bracket::{dirichlet_disc_levels, figure_curves, sufficient_radius, window};
use crate::certify::{certify, QUAD_REL_TOL};
use crate::fd2d::{inner_grid, solve_refined, window_ground_state, WindowBC, MAX_EIGS, RESIDUAL_TOL};
use crate::specfun::{MAX_ORDER, MAX_ZERO_INDEX};
use crate::transverse::{asymptotic_strong, asymptotic_weak, fd_levels_oracle, levels, MAX_LEVELS, TRIG_SWITCH};
use crate::{BoundaryType, Error, WaveguideParams};

const MAX_STEPS: usize = 100_000;
const MAX_CELLS: usize = 2048;
const MAX_FIELD: f64 = 1e12;
const LENGTH_RANGE: (f64, f64) = (1e-6, 1e6);

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Levels,
    Bracket,
    Threshold,
    Certify,
    Solve2d,
    Figure,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bc {
    /// Dirichlet at both ends.
    Dirichlet,
    /// Neumann at the bottom, Dirichlet at the top.
    Mixed,
}

impl From<Bc> for BoundaryType {
    fn from(b: Bc) -> Self {
        match b {
            Bc::Dirichlet => BoundaryType::DirichletDirichlet,
            Bc::Mixed => BoundaryType::NeumannDirichlet,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exact,
    Fd,
    AsymptoticWeak,
    AsymptoticStrong,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Window {
    Truncated,
    InnerDirichlet,
    InnerNeumann,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Parser, Serialize, Deserialize)]
#[command(name = "stark-window", version, allow_negative_numbers = true, about = "Bound states of a Stark-biased layer with a Neumann window")]
pub struct RunConfig {
    #[arg(value_enum)]
    pub command: Command,
    #[arg(long = "F", default_value_t = 0.0)]
    #[serde(rename = "F")]
    pub f: f64,
    #[arg(long, default_value_t = 1.0)]
    pub d: f64,
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    /// Transverse boundary conditions for `levels`.
    #[arg(long, value_enum, default_value_t = Bc::Dirichlet)]
    pub bc: Bc,
    /// Number of transverse levels (`levels`) or eigenvalues (`solve2d`).
    #[arg(long, default_value_t = 3)]
    pub count: usize,
    /// Threshold index for `threshold`.
    #[arg(long, default_value_t = 1)]
    pub i: usize,
    #[arg(long, value_enum, default_value_t = Method::Exact)]
    pub method: Method,
    /// Nodes of the 1-D finite-difference oracle (`--method fd`).
    #[arg(long, default_value_t = 4000)]
    pub nodes: usize,
    /// Caps on transverse index, Bessel order and zero index for `bracket`.
    #[arg(long, default_value_t = 10)]
    pub n_max: usize,
    #[arg(long, default_value_t = 20)]
    pub m_max: u32,
    #[arg(long, default_value_t = 20)]
    pub k_max: u32,
    #[arg(long, value_enum, default_value_t = Window::Truncated)]
    pub window: Window,
    /// Angular order for the inner problems.
    #[arg(long, default_value_t = 0)]
    pub m: u32,
    /// Radial cells: across the window (truncated) or on `[0, a]` (inner).
    #[arg(long, default_value_t = 32)]
    pub nr: usize,
    #[arg(long, default_value_t = 32)]
    pub nz: usize,
    /// Truncation radius in units of `a`.
    #[arg(long, default_value_t = 8.0)]
    pub r_max: f64,
    #[arg(long, default_value_t = 0.5)]
    pub a_min: f64,
    #[arg(long, default_value_t = 10.0)]
    pub a_max: f64,
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Solver(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParams(msg) => CliError::Validation(msg),
            other => CliError::Solver(other),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "invalid input: {m}"),
            CliError::Solver(e) => write!(f, "solver failure: {e}"),
        }
    }
}

impl RunConfig {
    pub fn params(&self) -> WaveguideParams {
        WaveguideParams { f: self.f, d: self.d, a: self.a }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.params().validate()?;
        let bad = |m: String| Err(CliError::Validation(m));
        let (lo, hi) = LENGTH_RANGE;
        if self.f > MAX_FIELD {
            return bad(format!("--F must be <= {MAX_FIELD:e}"));
        }
        if !(lo..=hi).contains(&self.d) {
            return bad(format!("--d must be in [{lo:e}, {hi:e}]"));
        }
        if self.a != 0.0 && !(lo..=hi).contains(&self.a) {
            return bad(format!("--a must be 0 or in [{lo:e}, {hi:e}]"));
        }
        match self.command {
            Command::Levels => {
                if !(1..=MAX_LEVELS).contains(&self.count) {
                    return bad(format!("--count must be in 1..={MAX_LEVELS}"));
                }
                if self.method == Method::Fd && !(100..=100_000).contains(&self.nodes) {
                    return bad("--nodes must be in 100..=100000".into());
                }
                if self.method == Method::AsymptoticStrong && !(self.f > 0.0) {
                    return bad("strong-field asymptotics need --F > 0".into());
                }
            }
            Command::Bracket => {
                if !(1..=MAX_LEVELS).contains(&self.n_max) {
                    return bad(format!("--n-max must be in 1..={MAX_LEVELS}"));
                }
                if self.m_max > MAX_ORDER {
                    return bad(format!("--m-max must be <= {MAX_ORDER}"));
                }
                if !(1..=MAX_ZERO_INDEX).contains(&self.k_max) {
                    return bad(format!("--k-max must be in 1..={MAX_ZERO_INDEX}"));
                }
            }
            Command::Threshold => {
                if !(1..=500).contains(&self.i) {
                    return bad("--i must be in 1..=500".into());
                }
            }
            Command::Certify => {
                if !(self.a > 0.0) {
                    return bad("--a must be > 0".into());
                }
            }
            Command::Solve2d => {
                if !(self.a > 0.0) {
                    return bad("--a must be > 0".into());
                }
                if !(1..=MAX_EIGS).contains(&self.count) {
                    return bad(format!("--count must be in 1..={MAX_EIGS}"));
                }
                for (name, n) in [("--nr", self.nr), ("--nz", self.nz)] {
                    if n < 16 || n % 2 != 0 || n > MAX_CELLS {
                        return bad(format!("{name} must be even and in 16..={MAX_CELLS}"));
                    }
                }
                if self.window == Window::Truncated {
                    if !(self.r_max.is_finite() && self.r_max >= 4.0 && self.r_max <= 64.0) {
                        return bad("--r-max must be in [4, 64]".into());
                    }
                    if self.m != 0 {
                        return bad("the truncated problem is solved for m = 0 only".into());
                    }
                }
                if self.m > MAX_ORDER {
                    return bad(format!("--m must be <= {MAX_ORDER}"));
                }
            }
            Command::Figure => {
                if !(lo <= self.a_min && self.a_min < self.a_max && self.a_max <= hi) {
                    return bad(format!("need {lo:e} <= --a-min < --a-max <= {hi:e}"));
                }
                if !(2..=MAX_STEPS).contains(&self.steps) {
                    return bad(format!("--steps must be in 2..={MAX_STEPS}"));
                }
            }
        }
        Ok(())
    }

    fn provenance(&self) -> &'static str {
        match self.command {
            Command::Levels => match self.method {
                Method::Exact => "exact",
                Method::Fd => "fd",
                Method::AsymptoticWeak => "asymptotic-weak",
                Method::AsymptoticStrong => "asymptotic-strong",
            },
            Command::Solve2d => "fd",
            _ => "exact",
        }
    }
}

/// Computed table: header plus rows, and the JSON payload.
struct Output {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
    result: Value,
}

/// Shortest of the plain and scientific round-trip forms.
pub fn fmt_num(x: f64) -> String {
    let plain = x.to_string();
    let sci = format!("{x:e}");
    if sci.len() < plain.len() {
        sci
    } else {
        plain
    }
}

fn cells<T: ToString>(xs: impl IntoIterator<Item = T>) -> Vec<String> {
    xs.into_iter().map(|x| x.to_string()).collect()
}

fn compute(cfg: &RunConfig) -> Result<Output, CliError> {
    let p = cfg.params();
    let out = match cfg.command {
        Command::Levels => {
            let bc: BoundaryType = cfg.bc.into();
            let (header, rows, values) = match cfg.method {
                Method::Exact => {
                    let v: Vec<f64> = levels(&p, bc, cfg.count)?.iter().map(|l| l.lambda).collect();
                    (cells(["n", "lambda"]), v.iter().enumerate().map(|(i, x)| cells([(i + 1).to_string(), fmt_num(*x)])).collect(), json!(v))
                }
                Method::Fd => {
                    let v = fd_levels_oracle(&p, bc, cfg.count, cfg.nodes)?;
                    (cells(["n", "lambda"]), v.iter().enumerate().map(|(i, x)| cells([(i + 1).to_string(), fmt_num(*x)])).collect(), json!(v))
                }
                Method::AsymptoticWeak => {
                    let v: Vec<f64> = (1..=cfg.count).map(|n| asymptotic_weak(&p, bc, n)).collect();
                    (cells(["n", "lambda"]), v.iter().enumerate().map(|(i, x)| cells([(i + 1).to_string(), fmt_num(*x)])).collect(), json!(v))
                }
                Method::AsymptoticStrong => {
                    let v = (1..=cfg.count).map(|n| asymptotic_strong(&p, bc, n)).collect::<crate::Result<Vec<_>>>()?;
                    let rows = v
                        .iter()
                        .enumerate()
                        .map(|(i, s)| cells([(i + 1).to_string(), fmt_num(s.airy_zero), fmt_num(s.paper_convention)]))
                        .collect();
                    (cells(["n", "lambda", "paper_convention"]), rows, json!(v))
                }
            };
            Output { header, rows, result: json!({ "bc": cfg.bc, "levels": values }) }
        }
        Command::Bracket => {
            let w = window(&p)?;
            let r = dirichlet_disc_levels(&p, w.upper, cfg.n_max, cfg.m_max, cfg.k_max)?;
            let rows = r
                .entries
                .iter()
                .map(|e| cells([e.n.to_string(), e.m.to_string(), e.k.to_string(), e.multiplicity.to_string(), fmt_num(e.lambda)]))
                .collect();
            let count: u32 = r.entries.iter().map(|e| e.multiplicity).sum();
            Output {
                header: cells(["n", "m", "k", "multiplicity", "lambda"]),
                rows,
                result: json!({ "window": w, "count": count, "levels": r }),
            }
        }
        Command::Threshold => {
            let w = window(&p)?;
            let a = sufficient_radius(&p, cfg.i)?;
            Output {
                header: cells(["i", "a_star"]),
                rows: vec![cells([cfg.i.to_string(), fmt_num(a)])],
                result: json!({ "window": w, "i": cfg.i, "a_star": a }),
            }
        }
        Command::Certify => {
            let c = certify(&p)?;
            let valid = c.is_valid();
            Output {
                header: cells(["q_value", "valid", "tau", "eps", "coeff_a", "coeff_b", "coeff_c", "lower", "upper"]),
                rows: vec![vec![
                    fmt_num(c.q_value),
                    valid.to_string(),
                    fmt_num(c.spec.tau),
                    fmt_num(c.spec.eps),
                    fmt_num(c.coeff_a),
                    fmt_num(c.coeff_b),
                    fmt_num(c.coeff_c),
                    fmt_num(c.window.lower),
                    fmt_num(c.window.upper),
                ]],
                result: json!({
                    "q_value": c.q_value,
                    "valid": valid,
                    "decomposition": c.decomposition(),
                    "certificate": c,
                }),
            }
        }
        Command::Solve2d => {
            let header = cells(["k", "lambda", "error_estimate", "residual", "bound_state"]);
            let w = window(&p)?;
            let (values, est, res, bound, detail) = match cfg.window {
                Window::Truncated => {
                    let g = window_ground_state(&p, cfg.r_max * p.a, cfg.nr, cfg.nz, cfg.count)?;
                    let v = (g.result.values.clone(), g.error_estimate.clone(), g.result.residuals.clone(), g.below_edge.clone());
                    (v.0, v.1, v.2, v.3, json!({ "grid": g.result.grid, "iterations": g.result.iterations, "shift": g.result.shift }))
                }
                Window::InnerDirichlet | Window::InnerNeumann => {
                    let bc = if cfg.window == Window::InnerDirichlet { WindowBC::InnerDirichlet } else { WindowBC::InnerNeumann };
                    let r = solve_refined(&p, &inner_grid(&p, cfg.nr, cfg.nz)?, bc, cfg.m, cfg.count)?;
                    let bound = r.fine.values.iter().zip(&r.error_estimate).map(|(v, e)| v + e < w.upper).collect();
                    let detail = json!({ "grid": r.fine.grid, "iterations": r.fine.iterations, "shift": r.fine.shift });
                    (r.fine.values, r.error_estimate, r.fine.residuals, bound, detail)
                }
            };
            let rows = (0..values.len())
                .map(|k| cells([(k + 1).to_string(), fmt_num(values[k]), fmt_num(est[k]), fmt_num(res[k]), bound[k].to_string()]))
                .collect();
            Output {
                header,
                rows,
                result: json!({
                    "window": w,
                    "values": values,
                    "error_estimate": est,
                    "residuals": res,
                    "bound_state": bound,
                    "solver": detail,
                }),
            }
        }
        Command::Figure => {
            let t = figure_curves(&p, cfg.a_min, cfg.a_max, cfg.steps, 3)?;
            let rows = t
                .rows
                .iter()
                .map(|r| {
                    let mut row = vec![fmt_num(r.a)];
                    row.extend(r.curves.iter().map(|&c| fmt_num(c)));
                    row.push(fmt_num(r.edge));
                    row
                })
                .collect();
            Output { header: cells(["a", "curve1", "curve2", "curve3", "edge"]), rows, result: json!({ "figure": t }) }
        }
    };
    Ok(out)
}

fn envelope(cfg: &RunConfig) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    m.insert("config".into(), serde_json::to_value(cfg).expect("config serializes"));
    m.insert("params".into(), serde_json::to_value(cfg.params()).expect("params serialize"));
    m.insert("provenance".into(), json!(cfg.provenance()));
    m.insert(
        "paper_convention".into(),
        json!(cfg.command == Command::Levels && cfg.method == Method::AsymptoticStrong),
    );
    m.insert(
        "tolerances".into(),
        json!({
            "eigen_residual": RESIDUAL_TOL,
            "quadrature_rel": QUAD_REL_TOL,
            "trig_switch": TRIG_SWITCH,
        }),
    );
    m
}

fn render(cfg: &RunConfig, out: Output) -> String {
    match cfg.format {
        Format::Csv => {
            let mut s = out.header.join(",");
            s.push('\n');
            for row in out.rows {
                let _ = writeln!(s, "{}", row.join(","));
            }
            s
        }
        Format::Json => {
            let mut m = envelope(cfg);
            if let Value::Object(fields) = out.result {
                m.extend(fields);
            }
            let mut s = serde_json::to_string_pretty(&Value::Object(m)).expect("output serializes");
            s.push('\n');
            s
        }
    }
}

/// Validate, compute and render.
pub fn execute(cfg: &RunConfig) -> Result<String, CliError> {
    cfg.validate()?;
    let out = compute(cfg)?;
    Ok(render(cfg, out))
}

/// Serialized failure report for solver errors.
pub fn failure_report(cfg: &RunConfig, err: &CliError) -> String {
    let mut m = envelope(cfg);
    m.insert("error".into(), json!(err.to_string()));
    if let CliError::Solver(e) = err {
        m.insert("detail".into(), json!(format!("{e:?}")));
    }
    let mut s = serde_json::to_string_pretty(&Value::Object(m)).expect("report serializes");
    s.push('\n');
    s
}

fn emit(cfg: &RunConfig, text: &str) -> std::io::Result<()> {
    match &cfg.out {
        Some(path) => std::fs::write(path, text),
        None => {
            use std::io::Write;
            let mut h = std::io::stdout().lock();
            h.write_all(text.as_bytes())?;
            h.flush()
        }
    }
}

/// Run with a parsed config; returns the process exit code.
pub fn run(cfg: &RunConfig) -> i32 {
    match execute(cfg) {
        Ok(text) => match emit(cfg, &text) {
            Ok(()) => 0,
            Err(e) => {
                eprintln!("cannot write output: {e}");
                1
            }
        },
        Err(err @ CliError::Validation(_)) => {
            eprintln!("{err}");
            2
        }
        Err(err) => {
            eprintln!("{err}");
            let _ = emit(cfg, &failure_report(cfg, &err));
            1
        }
    }
}

/// Parse arguments (clap exits with status 2 on malformed flags) and run.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match RunConfig::try_parse_from(args) {
        Ok(cfg) => run(&cfg),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                2
            } else {
                0
            }
        }
    }
}
