//! Experiment configuration, dispatch and persistence.
//!
//! A configuration is a TOML document with a top-level `output_dir` and the
//! sections `[model]`, `[grid]`, `[mc]`, `[eval]` and `[experiment]`.
//! Validation collects every violation before failing. The canonical form
//! (sorted keys, every default spelled out) is what the digest covers.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;
use toml::{Table, Value};

use crate::moment_lab::{
    beta_convergence, continuity_modulus, growth_fit, lambda_profile_with, mode1_floor, transition_scan, Estimator,
    MomentError, Which,
};
use crate::noise_and_sde::{sample_noise, GridSpec, ModeBudget, ModelSpec, SigmaSpec, SimError, Simulator};
use crate::special_fn::{EvalPolicy, FracOrder, MittagLeffler, SpecialFnError, StableSubordinator};
use crate::spectral_kernel::{DomainSpec, InitialCondition, KernelError, KernelKind, SpectralBasis};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid configuration:\n  {}", .0.join("\n  "))]
pub struct ConfigError(pub Vec<String>);

/// Experiment selected by `[experiment].kind` (and by the CLI subcommand).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    MlEval,
    Kernel,
    Simulate,
    MomentScan,
    LambdaProfile,
    BetaSweep,
    Continuity,
}

impl Kind {
    pub const ALL: [Kind; 7] = [
        Kind::MlEval,
        Kind::Kernel,
        Kind::Simulate,
        Kind::MomentScan,
        Kind::LambdaProfile,
        Kind::BetaSweep,
        Kind::Continuity,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Kind::MlEval => "ml-eval",
            Kind::Kernel => "kernel",
            Kind::Simulate => "simulate",
            Kind::MomentScan => "moment-scan",
            Kind::LambdaProfile => "lambda-profile",
            Kind::BetaSweep => "beta-sweep",
            Kind::Continuity => "continuity",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.as_str() == s)
    }

    fn needs_model(self) -> bool {
        !matches!(self, Kind::MlEval | Kind::LambdaProfile)
    }

    fn needs_grid(self) -> bool {
        matches!(self, Kind::Simulate | Kind::MomentScan | Kind::BetaSweep | Kind::Continuity)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum U0Config {
    Mode1 { amplitude: f64 },
    Bump { center: f64, half_width: f64, height: f64 },
    Tabulated { values: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    pub beta: f64,
    pub lambda: f64,
    pub length: f64,
    pub sigma_c: f64,
    /// `None` selects the automatic budget.
    pub modes: Option<usize>,
    pub tail_tol: f64,
    pub u0: U0Config,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridConfig {
    pub cells: usize,
    pub dt: f64,
    pub t_final: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatorKind {
    MonteCarlo,
    Exact,
}

impl EstimatorKind {
    fn as_str(self) -> &'static str {
        match self {
            Self::MonteCarlo => "monte-carlo",
            Self::Exact => "exact",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub seed: u64,
    pub replicas: Option<usize>,
    pub estimator: EstimatorKind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncrementConfig {
    pub space_shift: f64,
    pub time_shift: f64,
    pub eta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanConfig {
    pub lo: f64,
    pub hi: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Experiment {
    MlEval { betas: Vec<f64>, xs: Vec<f64> },
    Kernel { betas: Vec<f64>, times: Vec<f64>, points: Vec<f64>, increments: Option<IncrementConfig> },
    Simulate { stream: u64 },
    MomentScan { window: Option<(f64, f64)>, scan: Option<ScanConfig> },
    LambdaProfile { betas: Vec<f64>, lambda1: f64, thetas: Vec<f64> },
    BetaSweep { betas: Vec<f64>, p: u32 },
    Continuity { p: u32 },
}

impl Experiment {
    pub fn kind(&self) -> Kind {
        match self {
            Experiment::MlEval { .. } => Kind::MlEval,
            Experiment::Kernel { .. } => Kind::Kernel,
            Experiment::Simulate { .. } => Kind::Simulate,
            Experiment::MomentScan { .. } => Kind::MomentScan,
            Experiment::LambdaProfile { .. } => Kind::LambdaProfile,
            Experiment::BetaSweep { .. } => Kind::BetaSweep,
            Experiment::Continuity { .. } => Kind::Continuity,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub output_dir: String,
    pub model: Option<ModelConfig>,
    pub grid: Option<GridConfig>,
    pub mc: McConfig,
    pub eval: EvalPolicy<f64>,
    pub experiment: Experiment,
}

/// Command-line values that take precedence over the document.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub kind: Option<Kind>,
    pub seed: Option<u64>,
    pub replicas: Option<usize>,
    pub output_dir: Option<String>,
}

struct Section<'a> {
    name: &'static str,
    table: Option<&'a Table>,
    used: BTreeSet<String>,
}

impl<'a> Section<'a> {
    fn new(name: &'static str, table: Option<&'a Table>) -> Self {
        Self {
            name,
            table,
            used: BTreeSet::new(),
        }
    }

    fn path(&self, key: &str) -> String {
        if self.name.is_empty() {
            key.to_string()
        } else {
            format!("{}.{key}", self.name)
        }
    }

    fn raw(&mut self, key: &str) -> Option<&'a Value> {
        self.used.insert(key.to_string());
        self.table.and_then(|t| t.get(key))
    }

    fn f64_opt(&mut self, key: &str, errs: &mut Vec<String>) -> Option<f64> {
        match self.raw(key)? {
            Value::Float(v) => Some(*v),
            Value::Integer(v) => Some(*v as f64),
            other => {
                errs.push(format!("{} must be a number, got {}", self.path(key), other.type_str()));
                None
            }
        }
    }

    fn f64_req(&mut self, key: &str, errs: &mut Vec<String>) -> Option<f64> {
        let present = self.table.is_some_and(|t| t.contains_key(key));
        if !present {
            self.used.insert(key.to_string());
            errs.push(format!("{} required", self.path(key)));
            return None;
        }
        self.f64_opt(key, errs)
    }

    fn int_opt(&mut self, key: &str, errs: &mut Vec<String>) -> Option<i64> {
        match self.raw(key)? {
            Value::Integer(v) => Some(*v),
            other => {
                errs.push(format!("{} must be an integer, got {}", self.path(key), other.type_str()));
                None
            }
        }
    }

    fn int_req(&mut self, key: &str, errs: &mut Vec<String>) -> Option<i64> {
        let present = self.table.is_some_and(|t| t.contains_key(key));
        if !present {
            self.used.insert(key.to_string());
            errs.push(format!("{} required", self.path(key)));
            return None;
        }
        self.int_opt(key, errs)
    }

    fn str_opt(&mut self, key: &str, errs: &mut Vec<String>) -> Option<&'a str> {
        match self.raw(key)? {
            Value::String(s) => Some(s.as_str()),
            other => {
                errs.push(format!("{} must be a string, got {}", self.path(key), other.type_str()));
                None
            }
        }
    }

    fn list_opt(&mut self, key: &str, errs: &mut Vec<String>) -> Option<Vec<f64>> {
        match self.raw(key)? {
            Value::Array(items) => {
                let mut out = Vec::with_capacity(items.len());
                for v in items {
                    match v {
                        Value::Float(x) => out.push(*x),
                        Value::Integer(x) => out.push(*x as f64),
                        other => {
                            errs.push(format!("{} entries must be numbers, got {}", self.path(key), other.type_str()));
                            return None;
                        }
                    }
                }
                Some(out)
            }
            other => {
                errs.push(format!("{} must be an array of numbers, got {}", self.path(key), other.type_str()));
                None
            }
        }
    }

    fn list_req(&mut self, key: &str, errs: &mut Vec<String>) -> Option<Vec<f64>> {
        let present = self.table.is_some_and(|t| t.contains_key(key));
        if !present {
            self.used.insert(key.to_string());
            errs.push(format!("{} required", self.path(key)));
            return None;
        }
        let v = self.list_opt(key, errs)?;
        if v.is_empty() {
            errs.push(format!("{} must not be empty", self.path(key)));
            return None;
        }
        Some(v)
    }

    fn check(&self, key: &str, value: Option<f64>, ok: impl Fn(f64) -> bool, domain: &str, errs: &mut Vec<String>) {
        if let Some(v) = value {
            if !ok(v) {
                errs.push(format!("{} = {v} is outside {domain}", self.path(key)));
            }
        }
    }

    fn check_all(&self, key: &str, values: &Option<Vec<f64>>, ok: impl Fn(f64) -> bool, domain: &str, errs: &mut Vec<String>) {
        if let Some(vs) = values {
            for &v in vs {
                if !ok(v) {
                    errs.push(format!("{} entry {v} is outside {domain}", self.path(key)));
                }
            }
        }
    }

    fn finish(self, errs: &mut Vec<String>) {
        if let Some(t) = self.table {
            for k in t.keys() {
                if !self.used.contains(k) {
                    errs.push(format!("unknown key {}", self.path(k)));
                }
            }
        }
    }
}

fn beta_ok(b: f64) -> bool {
    b > 0.0 && b <= 1.0
}

fn positive(x: f64) -> bool {
    x > 0.0 && x.is_finite()
}

fn nonneg(x: f64) -> bool {
    x >= 0.0 && x.is_finite()
}

fn table_of<'a>(root: &'a Table, name: &str, errs: &mut Vec<String>) -> Option<&'a Table> {
    match root.get(name) {
        None => None,
        Some(Value::Table(t)) => Some(t),
        Some(other) => {
            errs.push(format!("{name} must be a section, got {}", other.type_str()));
            None
        }
    }
}

fn parse_model(t: Option<&Table>, errs: &mut Vec<String>) -> Option<ModelConfig> {
    let mut s = Section::new("model", t);
    let beta = s.f64_req("beta", errs);
    s.check("beta", beta, beta_ok, "(0, 1]", errs);
    let lambda = s.f64_req("lambda", errs);
    s.check("lambda", lambda, nonneg, "[0, inf)", errs);
    let length = Some(s.f64_opt("length", errs).unwrap_or(std::f64::consts::PI));
    s.check("length", length, positive, "(0, inf)", errs);
    let sigma_c = Some(s.f64_opt("sigma_c", errs).unwrap_or(1.0));
    s.check("sigma_c", sigma_c, |c| c != 0.0 && c.is_finite(), "nonzero finite reals", errs);
    let tail_tol = Some(s.f64_opt("tail_tol", errs).unwrap_or(1e-3));
    s.check("tail_tol", tail_tol, positive, "(0, inf)", errs);
    let modes = match s.raw("modes") {
        None => Some(None),
        Some(Value::String(v)) if v == "auto" => Some(None),
        Some(Value::Integer(n)) if *n >= 1 => Some(Some(*n as usize)),
        Some(other) => {
            errs.push(format!("model.modes must be \"auto\" or an integer >= 1, got {other}"));
            None
        }
    };
    let kind = s.str_opt("u0", errs).unwrap_or("mode1");
    let u0 = match kind {
        "mode1" => {
            let a = Some(s.f64_opt("u0_amplitude", errs).unwrap_or(1.0));
            s.check("u0_amplitude", a, nonneg, "[0, inf)", errs);
            a.map(|amplitude| U0Config::Mode1 { amplitude })
        }
        "bump" => {
            let c = s.f64_req("u0_center", errs);
            let w = s.f64_req("u0_half_width", errs);
            let h = s.f64_req("u0_height", errs);
            s.check("u0_half_width", w, positive, "(0, inf)", errs);
            s.check("u0_height", h, nonneg, "[0, inf)", errs);
            match (c, w, h, length) {
                (Some(c), Some(w), Some(h), Some(l)) => {
                    if c - w < 0.0 || c + w > l {
                        errs.push(format!("model.u0 bump support [{}, {}] is not inside [0, {l}]", c - w, c + w));
                    }
                    Some(U0Config::Bump {
                        center: c,
                        half_width: w,
                        height: h,
                    })
                }
                _ => None,
            }
        }
        "tabulated" => {
            let v = s.list_req("u0_values", errs);
            if let Some(vals) = &v {
                if vals.len() < 2 || vals[0] != 0.0 || vals[vals.len() - 1] != 0.0 || vals.iter().any(|x| !nonneg(*x)) {
                    errs.push("model.u0_values must have >= 2 finite nonnegative entries vanishing at both ends".into());
                }
            }
            v.map(|values| U0Config::Tabulated { values })
        }
        other => {
            errs.push(format!("model.u0 = \"{other}\" is not one of mode1, bump, tabulated"));
            None
        }
    };
    s.finish(errs);
    Some(ModelConfig {
        beta: beta?,
        lambda: lambda?,
        length: length?,
        sigma_c: sigma_c?,
        modes: modes?,
        tail_tol: tail_tol?,
        u0: u0?,
    })
}

fn parse_grid(t: Option<&Table>, errs: &mut Vec<String>) -> Option<GridConfig> {
    let mut s = Section::new("grid", t);
    let cells = s.int_req("cells", errs);
    if let Some(c) = cells {
        if c < 2 {
            errs.push(format!("grid.cells = {c} is outside [2, inf)"));
        }
    }
    let dt = s.f64_req("dt", errs);
    s.check("dt", dt, positive, "(0, inf)", errs);
    let t_final = s.f64_req("t_final", errs);
    s.check("t_final", t_final, positive, "(0, inf)", errs);
    if let (Some(dt), Some(t)) = (dt, t_final) {
        if positive(dt) && positive(t) {
            let r = t / dt;
            if (r - r.round()).abs() > 1e-9 * r.max(1.0) {
                errs.push(format!("grid.t_final / grid.dt = {r} must be an integer"));
            }
        }
    }
    s.finish(errs);
    Some(GridConfig {
        cells: cells.filter(|c| *c >= 2)? as usize,
        dt: dt?,
        t_final: t_final?,
    })
}

fn parse_eval(t: Option<&Table>, errs: &mut Vec<String>) -> EvalPolicy<f64> {
    let mut s = Section::new("eval", t);
    let mut p = EvalPolicy::<f64>::default();
    if let Some(v) = s.f64_opt("series_cutoff", errs) {
        p.series_cutoff = v;
    }
    if let Some(v) = s.f64_opt("asymptotic_cutoff", errs) {
        p.asymptotic_cutoff = v;
    }
    if let Some(v) = s.int_opt("series_terms_max", errs) {
        if v < 1 {
            errs.push(format!("eval.series_terms_max = {v} is outside [1, inf)"));
        } else {
            p.series_terms_max = v as usize;
        }
    }
    if let Some(v) = s.f64_opt("quadrature_abs_tol", errs) {
        p.quadrature_abs_tol = v;
    }
    if let Some(v) = s.f64_opt("quadrature_rel_tol", errs) {
        p.quadrature_rel_tol = v;
    }
    if let Err(e) = p.validate() {
        errs.push(format!("eval: {e}"));
    }
    s.finish(errs);
    p
}

fn parse_p(s: &mut Section, errs: &mut Vec<String>) -> Option<u32> {
    let p = s.int_opt("p", errs).unwrap_or(2);
    if p < 2 || p % 2 != 0 || p > 64 {
        errs.push(format!("experiment.p = {p} must be an even integer in [2, 64]"));
        return None;
    }
    Some(p as u32)
}

fn parse_experiment(t: Option<&Table>, kind: Option<Kind>, errs: &mut Vec<String>) -> Option<Experiment> {
    let mut s = Section::new("experiment", t);
    let named = s.str_opt("kind", errs);
    let kind = match (kind, named) {
        (Some(k), None) => Some(k),
        (Some(k), Some(n)) if n == k.as_str() => Some(k),
        (Some(k), Some(n)) => {
            errs.push(format!("experiment.kind = \"{n}\" conflicts with the requested \"{}\"", k.as_str()));
            None
        }
        (None, Some(n)) => match Kind::parse(n) {
            Some(k) => Some(k),
            None => {
                let names: Vec<&str> = Kind::ALL.iter().map(|k| k.as_str()).collect();
                errs.push(format!("experiment.kind = \"{n}\" is not one of {}", names.join(", ")));
                None
            }
        },
        (None, None) => {
            errs.push("experiment.kind required".into());
            None
        }
    };
    let exp = match kind? {
        Kind::MlEval => {
            let betas = s.list_req("betas", errs);
            s.check_all("betas", &betas, beta_ok, "(0, 1]", errs);
            let xs = s.list_req("xs", errs);
            s.check_all("xs", &xs, nonneg, "[0, inf)", errs);
            Some(Experiment::MlEval { betas: betas?, xs: xs? })
        }
        Kind::Kernel => {
            let betas = s.list_req("betas", errs);
            s.check_all("betas", &betas, beta_ok, "(0, 1]", errs);
            let times = s.list_req("times", errs);
            s.check_all("times", &times, positive, "(0, inf)", errs);
            let points = s.list_req("points", errs);
            s.check_all("points", &points, nonneg, "[0, L]", errs);
            let k = s.f64_opt("space_shift", errs);
            let h = s.f64_opt("time_shift", errs);
            let eta = s.f64_opt("eta", errs);
            let increments = match (k, h, eta) {
                (None, None, None) => Some(None),
                (Some(k), Some(h), Some(eta)) => {
                    s.check("space_shift", Some(k), nonneg, "[0, inf)", errs);
                    s.check("time_shift", Some(h), nonneg, "[0, inf)", errs);
                    s.check("eta", Some(eta), |e| e > 0.0 && e < 1.0, "(0, 1)", errs);
                    Some(Some(IncrementConfig {
                        space_shift: k,
                        time_shift: h,
                        eta,
                    }))
                }
                _ => {
                    errs.push("experiment.space_shift, time_shift and eta must be given together".into());
                    None
                }
            };
            Some(Experiment::Kernel {
                betas: betas?,
                times: times?,
                points: points?,
                increments: increments?,
            })
        }
        Kind::Simulate => {
            let stream = s.int_opt("stream", errs).unwrap_or(0);
            if stream < 0 {
                errs.push(format!("experiment.stream = {stream} is outside [0, inf)"));
            }
            Some(Experiment::Simulate { stream: stream.max(0) as u64 })
        }
        Kind::MomentScan => {
            let lo = s.f64_opt("window_lo", errs);
            let hi = s.f64_opt("window_hi", errs);
            let window = match (lo, hi) {
                (None, None) => Some(None),
                (Some(a), Some(b)) if a >= 0.0 && b > a => Some(Some((a, b))),
                (Some(a), Some(b)) => {
                    errs.push(format!("experiment window [{a}, {b}] must satisfy 0 <= window_lo < window_hi"));
                    None
                }
                _ => {
                    errs.push("experiment.window_lo and window_hi must be given together".into());
                    None
                }
            };
            let slo = s.f64_opt("scan_lo", errs);
            let shi = s.f64_opt("scan_hi", errs);
            let iters = s.int_opt("scan_iterations", errs);
            let scan = match (slo, shi) {
                (None, None) => {
                    if iters.is_some() {
                        errs.push("experiment.scan_iterations needs scan_lo and scan_hi".into());
                    }
                    Some(None)
                }
                (Some(a), Some(b)) if a > 0.0 && b > a => {
                    let it = iters.unwrap_or(6);
                    if !(0..=60).contains(&it) {
                        errs.push(format!("experiment.scan_iterations = {it} is outside [0, 60]"));
                    }
                    Some(Some(ScanConfig {
                        lo: a,
                        hi: b,
                        iterations: it.clamp(0, 60) as usize,
                    }))
                }
                (Some(a), Some(b)) => {
                    errs.push(format!("experiment scan range ({a}, {b}) must satisfy 0 < scan_lo < scan_hi"));
                    None
                }
                _ => {
                    errs.push("experiment.scan_lo and scan_hi must be given together".into());
                    None
                }
            };
            Some(Experiment::MomentScan {
                window: window?,
                scan: scan?,
            })
        }
        Kind::LambdaProfile => {
            let betas = s.list_req("betas", errs);
            s.check_all("betas", &betas, beta_ok, "(0, 1]", errs);
            let lambda1 = Some(s.f64_opt("lambda1", errs).unwrap_or(1.0));
            s.check("lambda1", lambda1, positive, "(0, inf)", errs);
            let thetas = s.list_req("thetas", errs);
            s.check_all("thetas", &thetas, positive, "(0, inf)", errs);
            Some(Experiment::LambdaProfile {
                betas: betas?,
                lambda1: lambda1?,
                thetas: thetas?,
            })
        }
        Kind::BetaSweep => {
            let betas = s.list_req("betas", errs);
            s.check_all("betas", &betas, beta_ok, "(0, 1]", errs);
            let p = parse_p(&mut s, errs);
            Some(Experiment::BetaSweep { betas: betas?, p: p? })
        }
        Kind::Continuity => {
            let p = parse_p(&mut s, errs);
            Some(Experiment::Continuity { p: p? })
        }
    };
    s.finish(errs);
    exp
}

/// Parses and validates a document; every violation is reported.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    parse_config_with(text, &Overrides::default())
}

pub fn parse_config_with(text: &str, overrides: &Overrides) -> Result<ExperimentConfig, ConfigError> {
    let root: Table = toml::from_str(text).map_err(|e| ConfigError(vec![format!("syntax: {}", e.message())]))?;
    let mut errs = Vec::new();
    for k in root.keys() {
        if !matches!(k.as_str(), "output_dir" | "model" | "grid" | "mc" | "eval" | "experiment") {
            errs.push(format!("unknown key {k}"));
        }
    }
    let output_dir = match (&overrides.output_dir, root.get("output_dir")) {
        (Some(o), _) => Some(o.clone()),
        (None, Some(Value::String(s))) => Some(s.clone()),
        (None, Some(other)) => {
            errs.push(format!("output_dir must be a string, got {}", other.type_str()));
            None
        }
        (None, None) => {
            errs.push("output_dir required".into());
            None
        }
    };
    let model_t = table_of(&root, "model", &mut errs);
    let grid_t = table_of(&root, "grid", &mut errs);
    let mc_t = table_of(&root, "mc", &mut errs);
    let eval_t = table_of(&root, "eval", &mut errs);
    let exp_t = table_of(&root, "experiment", &mut errs);

    let experiment = parse_experiment(exp_t, overrides.kind, &mut errs);
    let kind = experiment.as_ref().map(|e| e.kind());

    let model = if model_t.is_some() || kind.is_some_and(|k| k.needs_model()) {
        parse_model(model_t, &mut errs)
    } else {
        None
    };
    let grid = if grid_t.is_some() || kind.is_some_and(|k| k.needs_grid()) {
        parse_grid(grid_t, &mut errs)
    } else {
        None
    };

    let mut mc = Section::new("mc", mc_t);
    let seed = match overrides.seed {
        Some(s) => {
            mc.raw("seed");
            Some(s)
        }
        None => match mc.raw("seed") {
            None => {
                errs.push("mc.seed required".into());
                None
            }
            Some(Value::Integer(v)) if *v >= 0 => Some(*v as u64),
            Some(Value::String(v)) => match v.parse::<u64>() {
                Ok(s) => Some(s),
                Err(_) => {
                    errs.push(format!("mc.seed = \"{v}\" is not an unsigned 64-bit integer"));
                    None
                }
            },
            Some(other) => {
                errs.push(format!("mc.seed = {other} is outside [0, 2^64)"));
                None
            }
        },
    };
    let estimator = match mc.str_opt("estimator", &mut errs).unwrap_or("monte-carlo") {
        "monte-carlo" => EstimatorKind::MonteCarlo,
        "exact" => EstimatorKind::Exact,
        other => {
            errs.push(format!("mc.estimator = \"{other}\" is not one of monte-carlo, exact"));
            EstimatorKind::MonteCarlo
        }
    };
    let file_replicas = mc.int_opt("replicas", &mut errs);
    let replicas = overrides.replicas.map(|r| r as i64).or(file_replicas);
    let needs_replicas = match kind {
        Some(Kind::BetaSweep) => Some(1),
        Some(Kind::Continuity) => Some(2),
        Some(Kind::MomentScan) if estimator == EstimatorKind::MonteCarlo => Some(2),
        _ => None,
    };
    match (replicas, needs_replicas) {
        (None, Some(_)) => errs.push("mc.replicas required".into()),
        (Some(r), Some(min)) if r < min => errs.push(format!("mc.replicas = {r} is outside [{min}, inf)")),
        (Some(r), None) if r < 1 => errs.push(format!("mc.replicas = {r} is outside [1, inf)")),
        _ => {}
    }
    mc.finish(&mut errs);

    if estimator == EstimatorKind::Exact && kind.is_some_and(|k| k != Kind::MomentScan) {
        errs.push("mc.estimator = \"exact\" only applies to moment-scan".into());
    }
    if let (Some(m), Some(Experiment::Kernel { points, .. })) = (&model, &experiment) {
        for &x in points {
            if x > m.length {
                errs.push(format!("experiment.points entry {x} is outside [0, {}]", m.length));
            }
        }
    }
    let eval = parse_eval(eval_t, &mut errs);

    if !errs.is_empty() {
        return Err(ConfigError(errs));
    }
    Ok(ExperimentConfig {
        output_dir: output_dir.expect("checked"),
        model,
        grid,
        mc: McConfig {
            seed: seed.expect("checked"),
            replicas: replicas.map(|r| r as usize),
            estimator,
        },
        eval,
        experiment: experiment.expect("checked"),
    })
}

fn floats(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|x| Value::Float(*x)).collect())
}

impl ExperimentConfig {
    /// Canonical document: sorted keys and every default made explicit.
    pub fn to_canonical_toml(&self) -> String {
        let mut root = Table::new();
        root.insert("output_dir".into(), Value::String(self.output_dir.clone()));
        if let Some(m) = &self.model {
            let mut t = Table::new();
            t.insert("beta".into(), Value::Float(m.beta));
            t.insert("lambda".into(), Value::Float(m.lambda));
            t.insert("length".into(), Value::Float(m.length));
            t.insert("sigma_c".into(), Value::Float(m.sigma_c));
            t.insert("tail_tol".into(), Value::Float(m.tail_tol));
            t.insert(
                "modes".into(),
                match m.modes {
                    None => Value::String("auto".into()),
                    Some(n) => Value::Integer(n as i64),
                },
            );
            match &m.u0 {
                U0Config::Mode1 { amplitude } => {
                    t.insert("u0".into(), Value::String("mode1".into()));
                    t.insert("u0_amplitude".into(), Value::Float(*amplitude));
                }
                U0Config::Bump {
                    center,
                    half_width,
                    height,
                } => {
                    t.insert("u0".into(), Value::String("bump".into()));
                    t.insert("u0_center".into(), Value::Float(*center));
                    t.insert("u0_half_width".into(), Value::Float(*half_width));
                    t.insert("u0_height".into(), Value::Float(*height));
                }
                U0Config::Tabulated { values } => {
                    t.insert("u0".into(), Value::String("tabulated".into()));
                    t.insert("u0_values".into(), floats(values));
                }
            }
            root.insert("model".into(), Value::Table(t));
        }
        if let Some(g) = &self.grid {
            let mut t = Table::new();
            t.insert("cells".into(), Value::Integer(g.cells as i64));
            t.insert("dt".into(), Value::Float(g.dt));
            t.insert("t_final".into(), Value::Float(g.t_final));
            root.insert("grid".into(), Value::Table(t));
        }
        let mut mc = Table::new();
        // Seeds above i64::MAX do not fit a TOML integer.
        mc.insert(
            "seed".into(),
            i64::try_from(self.mc.seed).map_or_else(|_| Value::String(self.mc.seed.to_string()), Value::Integer),
        );
        if let Some(r) = self.mc.replicas {
            mc.insert("replicas".into(), Value::Integer(r as i64));
        }
        mc.insert("estimator".into(), Value::String(self.mc.estimator.as_str().into()));
        root.insert("mc".into(), Value::Table(mc));
        let mut ev = Table::new();
        ev.insert("series_cutoff".into(), Value::Float(self.eval.series_cutoff));
        ev.insert("asymptotic_cutoff".into(), Value::Float(self.eval.asymptotic_cutoff));
        ev.insert("series_terms_max".into(), Value::Integer(self.eval.series_terms_max as i64));
        ev.insert("quadrature_abs_tol".into(), Value::Float(self.eval.quadrature_abs_tol));
        ev.insert("quadrature_rel_tol".into(), Value::Float(self.eval.quadrature_rel_tol));
        root.insert("eval".into(), Value::Table(ev));
        let mut ex = Table::new();
        ex.insert("kind".into(), Value::String(self.experiment.kind().as_str().into()));
        match &self.experiment {
            Experiment::MlEval { betas, xs } => {
                ex.insert("betas".into(), floats(betas));
                ex.insert("xs".into(), floats(xs));
            }
            Experiment::Kernel {
                betas,
                times,
                points,
                increments,
            } => {
                ex.insert("betas".into(), floats(betas));
                ex.insert("times".into(), floats(times));
                ex.insert("points".into(), floats(points));
                if let Some(i) = increments {
                    ex.insert("space_shift".into(), Value::Float(i.space_shift));
                    ex.insert("time_shift".into(), Value::Float(i.time_shift));
                    ex.insert("eta".into(), Value::Float(i.eta));
                }
            }
            Experiment::Simulate { stream } => {
                ex.insert("stream".into(), Value::Integer(*stream as i64));
            }
            Experiment::MomentScan { window, scan } => {
                if let Some((a, b)) = window {
                    ex.insert("window_lo".into(), Value::Float(*a));
                    ex.insert("window_hi".into(), Value::Float(*b));
                }
                if let Some(s) = scan {
                    ex.insert("scan_lo".into(), Value::Float(s.lo));
                    ex.insert("scan_hi".into(), Value::Float(s.hi));
                    ex.insert("scan_iterations".into(), Value::Integer(s.iterations as i64));
                }
            }
            Experiment::LambdaProfile { betas, lambda1, thetas } => {
                ex.insert("betas".into(), floats(betas));
                ex.insert("lambda1".into(), Value::Float(*lambda1));
                ex.insert("thetas".into(), floats(thetas));
            }
            Experiment::BetaSweep { betas, p } => {
                ex.insert("betas".into(), floats(betas));
                ex.insert("p".into(), Value::Integer(*p as i64));
            }
            Experiment::Continuity { p } => {
                ex.insert("p".into(), Value::Integer(*p as i64));
            }
        }
        root.insert("experiment".into(), Value::Table(ex));
        toml::to_string(&root).expect("canonical tables serialize")
    }

    /// sha256 of the canonical document, lowercase hex.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_canonical_toml().as_bytes()))
    }

    pub fn model_spec(&self) -> Option<ModelSpec<f64>> {
        let m = self.model.as_ref()?;
        let u0 = match &m.u0 {
            U0Config::Mode1 { amplitude } => InitialCondition::Mode {
                k: 1,
                amplitude: *amplitude,
            },
            U0Config::Bump {
                center,
                half_width,
                height,
            } => InitialCondition::Bump {
                center: *center,
                half_width: *half_width,
                height: *height,
            },
            U0Config::Tabulated { values } => InitialCondition::Tabulated { values: values.clone() },
        };
        Some(ModelSpec {
            beta: FracOrder::new(m.beta).ok()?,
            lambda: m.lambda,
            length: m.length,
            modes: m.modes.map_or(ModeBudget::Auto, ModeBudget::Fixed),
            tail_tol: m.tail_tol,
            sigma: SigmaSpec::Linear { c: m.sigma_c },
            u0,
            policy: self.eval,
        })
    }

    pub fn grid_spec(&self) -> Option<GridSpec<f64>> {
        self.grid.map(|g| GridSpec::new(g.cells, g.dt, g.t_final))
    }
}

/// Provenance record written next to the outputs as `manifest.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub kind: String,
    pub config_digest: String,
    pub seed: u64,
    /// Noise stream of a single-path run.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stream: Option<u64>,
    pub started_at: String,
    pub finished_at: String,
    pub tool_version: String,
    pub outputs: Vec<String>,
    pub replicas_requested: usize,
    pub replicas_aborted: usize,
    pub quadrature_failures: usize,
    pub errors: Vec<String>,
}

impl RunManifest {
    /// Zero exactly when nothing aborted, no quadrature failed and no error was raised.
    pub fn exit_code(&self) -> i32 {
        if self.replicas_aborted > 0 || self.quadrature_failures > 0 || !self.errors.is_empty() {
            1
        } else {
            0
        }
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// 17 significant digits, so a value prints identically on every run.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

struct Csv {
    name: &'static str,
    body: String,
}

impl Csv {
    fn new(name: &'static str, header: &str) -> Self {
        Self {
            name,
            body: format!("{header}\n"),
        }
    }

    fn row(&mut self, cells: &[String]) {
        self.body.push_str(&cells.join(","));
        self.body.push('\n');
    }
}

#[derive(Default)]
struct Tally {
    aborted: usize,
    quad_failures: usize,
    errors: Vec<String>,
}

impl Tally {
    fn special(&mut self, e: &SpecialFnError) {
        if matches!(e, SpecialFnError::Quadrature(_)) {
            self.quad_failures += 1;
        } else {
            self.errors.push(e.to_string());
        }
    }

    fn moment(&mut self, e: MomentError) {
        match e {
            MomentError::Special(s) => self.special(&s),
            MomentError::Sim(SimError::Kernel(KernelError::Special(s))) => self.special(&s),
            other => self.errors.push(other.to_string()),
        }
    }
}

fn f(x: f64) -> String {
    fmt_f64(x)
}

fn run_ml_eval(betas: &[f64], xs: &[f64], policy: &EvalPolicy<f64>, tally: &mut Tally) -> Vec<Csv> {
    let mut csv = Csv::new("ml_eval.csv", "beta,x,ml_neg,stable_density");
    for &b in betas {
        let order = FracOrder::new(b).expect("validated");
        let ml = MittagLeffler::new(order, *policy);
        let sub = (b < 1.0).then(|| StableSubordinator::new(order, *policy));
        for &x in xs {
            let e = match &ml {
                Ok(ml) => ml.eval(x).unwrap_or_else(|err| {
                    tally.special(&err);
                    f64::NAN
                }),
                Err(err) => {
                    tally.special(err);
                    f64::NAN
                }
            };
            let g = match &sub {
                Some(Ok(s)) if x > 0.0 => s.density(x).unwrap_or_else(|err| {
                    tally.special(&err);
                    f64::NAN
                }),
                Some(Ok(_)) => 0.0,
                Some(Err(err)) => {
                    tally.special(err);
                    f64::NAN
                }
                None => f64::NAN,
            };
            csv.row(&[f(b), f(x), f(e), f(g)]);
        }
    }
    vec![csv]
}

fn run_kernel(
    cfg: &ExperimentConfig,
    betas: &[f64],
    times: &[f64],
    points: &[f64],
    incr: &Option<IncrementConfig>,
    tally: &mut Tally,
) -> Vec<Csv> {
    let m = cfg.model.as_ref().expect("validated");
    let t_min = times.iter().copied().fold(f64::INFINITY, f64::min);
    let mut out = vec![Csv::new("kernel.csv", "beta,t,x,y,value")];
    let mut inc = incr.map(|_| Csv::new("increments.csv", "beta,t,x,k,h,eta,space_sq,time_sq"));
    for &b in betas {
        let order = FracOrder::new(b).expect("validated");
        let kind = KernelKind::from_order(order);
        let n = m
            .modes
            .unwrap_or_else(|| SpectralBasis::required_modes(m.length, kind, t_min, m.tail_tol));
        let basis = match SpectralBasis::new(DomainSpec::new(m.length, n).with_tail_tol(m.tail_tol), cfg.eval) {
            Ok(b) => b,
            Err(e) => {
                tally.errors.push(e.to_string());
                continue;
            }
        };
        for &t in times {
            for &x in points {
                for &y in points {
                    match basis.kernel(kind, t, x, y) {
                        Ok(v) => out[0].row(&[f(b), f(t), f(x), f(y), f(v)]),
                        Err(KernelError::Special(e)) => {
                            tally.special(&e);
                            out[0].row(&[f(b), f(t), f(x), f(y), f(f64::NAN)]);
                        }
                        Err(e) => {
                            tally.errors.push(e.to_string());
                            return out;
                        }
                    }
                }
            }
        }
        if let (Some(csv), Some(i)) = (inc.as_mut(), incr) {
            // Increment norms use a moderate fixed basis: every term is an integral over s.
            let nb = n.min(256);
            let small = SpectralBasis::new(DomainSpec::new(m.length, nb).with_tail_tol(m.tail_tol), cfg.eval)
                .expect("validated domain");
            for &t in times {
                for &x in points.iter().filter(|&&x| x + i.space_shift <= m.length) {
                    match small.increment_norms(order, t, x, i.space_shift, i.time_shift, i.eta) {
                        Ok((s2, t2)) => csv.row(&[
                            f(b),
                            f(t),
                            f(x),
                            f(i.space_shift),
                            f(i.time_shift),
                            f(i.eta),
                            f(s2),
                            f(t2),
                        ]),
                        Err(KernelError::Special(e)) => tally.special(&e),
                        Err(e) => {
                            tally.errors.push(e.to_string());
                            break;
                        }
                    }
                }
            }
        }
    }
    out.extend(inc);
    out
}

fn run_simulate(cfg: &ExperimentConfig, stream: u64, tally: &mut Tally) -> Vec<Csv> {
    let model = cfg.model_spec().expect("validated");
    let grid = cfg.grid_spec().expect("validated");
    let mut csv = Csv::new("path.csv", "t,x,value");
    let result = sample_noise(&grid, model.length, cfg.mc.seed, stream)
        .and_then(|noise| Simulator::new(model, grid)?.run(&noise));
    match result {
        Ok(path) => {
            for m in 0..=path.steps {
                for i in 0..=path.cells {
                    csv.row(&[f(path.time(m)), f(path.x(i)), f(path.value(m, i))]);
                }
            }
        }
        Err(SimError::BlowUp { m, i, value }) => {
            tally.aborted += 1;
            tally.errors.push(format!("replica aborted at step {m}, node {i}: |u| = {value:e}"));
        }
        Err(e) => tally.moment(e.into()),
    }
    vec![csv]
}

fn run_moment_scan(
    cfg: &ExperimentConfig,
    window: Option<(f64, f64)>,
    scan: Option<ScanConfig>,
    tally: &mut Tally,
) -> Vec<Csv> {
    let model = cfg.model_spec().expect("validated");
    let grid = cfg.grid_spec().expect("validated");
    let estimator = match cfg.mc.estimator {
        EstimatorKind::MonteCarlo => Estimator::MonteCarlo {
            replicas: cfg.mc.replicas.expect("validated"),
            seed: cfg.mc.seed,
        },
        EstimatorKind::Exact => Estimator::Exact,
    };
    let mut out = Vec::new();
    let series = match estimator.moments(&model, &grid) {
        Ok(s) => s,
        Err(e) => {
            tally.moment(e);
            return out;
        }
    };
    tally.aborted += series.aborted;
    let floor = mode1_floor(&model, &series.times).unwrap_or_else(|e| {
        tally.moment(e);
        vec![f64::NAN; series.times.len()]
    });
    let mut csv = Csv::new("moments.csv", "t,sup_x,sup_x_se,mode1,mode1_se,mode1_floor");
    for m in 0..series.times.len() {
        csv.row(&[
            f(series.times[m]),
            f(series.sup_x[m]),
            f(series.sup_x_se[m]),
            f(series.mode1[m]),
            f(series.mode1_se[m]),
            f(floor[m]),
        ]);
    }
    out.push(csv);
    let window = window.unwrap_or_else(|| series.late_window());
    let mut fit = Csv::new("fit.csv", "which,slope,intercept,ci_halfwidth,t_lo,t_hi,points");
    for (name, which) in [("sup_x", Which::SupX), ("mode1", Which::Mode1)] {
        match growth_fit(&series, which, window) {
            Ok(g) => fit.row(&[
                name.into(),
                f(g.slope),
                f(g.intercept),
                f(g.ci_halfwidth),
                f(window.0),
                f(window.1),
                g.points.to_string(),
            ]),
            Err(e) => tally.errors.push(format!("{name} fit: {e}")),
        }
    }
    out.push(fit);
    if let Some(s) = scan {
        match transition_scan(&model, &grid, estimator, s.lo, s.hi, s.iterations) {
            Ok(r) => {
                let mut csv = Csv::new("scan.csv", "lambda,slope,ci_halfwidth,replicas_used,aborted,grows");
                for p in &r.points {
                    csv.row(&[
                        f(p.lambda),
                        f(p.slope),
                        f(p.ci_halfwidth),
                        p.replicas_used.to_string(),
                        p.aborted.to_string(),
                        p.grows.to_string(),
                    ]);
                }
                out.push(csv);
                let mut b = Csv::new("scan_bracket.csv", "lower,upper,bracketed");
                b.row(&[f(r.lower), f(r.upper), r.bracketed.to_string()]);
                out.push(b);
            }
            Err(e) => tally.moment(e),
        }
    }
    out
}

fn run_lambda_profile(betas: &[f64], lambda1: f64, thetas: &[f64], policy: &EvalPolicy<f64>, tally: &mut Tally) -> Vec<Csv> {
    let mut csv = Csv::new("lambda_profile.csv", "beta,lambda1,theta,Lambda");
    for &b in betas {
        let order = FracOrder::new(b).expect("validated");
        for &theta in thetas {
            let v = lambda_profile_with(order, lambda1, theta, policy).unwrap_or_else(|e| {
                tally.moment(e);
                f64::NAN
            });
            csv.row(&[f(b), f(lambda1), f(theta), f(v)]);
        }
    }
    vec![csv]
}

fn run_beta_sweep(cfg: &ExperimentConfig, betas: &[f64], p: u32, tally: &mut Tally) -> Vec<Csv> {
    let model = cfg.model_spec().expect("validated");
    let grid = cfg.grid_spec().expect("validated");
    let mut csv = Csv::new("beta_sweep.csv", "beta,p,gap,gap_se,replicas_used");
    match beta_convergence(&model, betas, &grid, p, cfg.mc.replicas.expect("validated"), cfg.mc.seed) {
        Ok(r) => {
            tally.aborted += r.aborted;
            for k in 0..r.beta_values.len() {
                csv.row(&[
                    f(r.beta_values[k]),
                    p.to_string(),
                    f(r.sup_moment_gap[k]),
                    f(r.gap_se[k]),
                    r.replicas_used.to_string(),
                ]);
            }
        }
        Err(e) => tally.moment(e),
    }
    vec![csv]
}

fn run_continuity(cfg: &ExperimentConfig, p: u32, tally: &mut Tally) -> Vec<Csv> {
    let model = cfg.model_spec().expect("validated");
    let grid = cfg.grid_spec().expect("validated");
    let mut lags = Csv::new("continuity.csv", "direction,lag,moment");
    let mut fit = Csv::new(
        "continuity_fit.csv",
        "a,b,K,p,spatial_slope,spatial_ci,temporal_slope,temporal_ci,replicas_used",
    );
    match continuity_modulus(&model, &grid, cfg.mc.replicas.expect("validated"), p, cfg.mc.seed) {
        Ok(c) => {
            tally.aborted += c.aborted;
            for (lag, v) in &c.spatial {
                lags.row(&["space".into(), f(*lag), f(*v)]);
            }
            for (lag, v) in &c.temporal {
                lags.row(&["time".into(), f(*lag), f(*v)]);
            }
            fit.row(&[
                f(c.a),
                f(c.b),
                f(c.k),
                p.to_string(),
                f(c.spatial_fit.slope),
                f(c.spatial_fit.ci_halfwidth),
                f(c.temporal_fit.slope),
                f(c.temporal_fit.ci_halfwidth),
                c.replicas_used.to_string(),
            ]);
        }
        Err(e) => tally.moment(e),
    }
    vec![lags, fit]
}

fn write(path: &Path, body: &str) -> Result<(), RunError> {
    fs::write(path, body).map_err(|source| RunError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Runs the configured experiment, writes its CSV files and `manifest.json`
/// into `output_dir`, and returns the manifest. Module errors are recorded in
/// the manifest rather than returned.
pub fn run(cfg: &ExperimentConfig) -> Result<RunManifest, RunError> {
    let started_at = chrono::Utc::now().to_rfc3339();
    let mut tally = Tally::default();
    let csvs = match &cfg.experiment {
        Experiment::MlEval { betas, xs } => run_ml_eval(betas, xs, &cfg.eval, &mut tally),
        Experiment::Kernel {
            betas,
            times,
            points,
            increments,
        } => run_kernel(cfg, betas, times, points, increments, &mut tally),
        Experiment::Simulate { stream } => run_simulate(cfg, *stream, &mut tally),
        Experiment::MomentScan { window, scan } => run_moment_scan(cfg, *window, *scan, &mut tally),
        Experiment::LambdaProfile { betas, lambda1, thetas } => {
            run_lambda_profile(betas, *lambda1, thetas, &cfg.eval, &mut tally)
        }
        Experiment::BetaSweep { betas, p } => run_beta_sweep(cfg, betas, *p, &mut tally),
        Experiment::Continuity { p } => run_continuity(cfg, *p, &mut tally),
    };
    let dir = PathBuf::from(&cfg.output_dir);
    fs::create_dir_all(&dir).map_err(|source| RunError::Io {
        path: dir.clone(),
        source,
    })?;
    let mut outputs = Vec::new();
    for csv in &csvs {
        write(&dir.join(csv.name), &csv.body)?;
        outputs.push(csv.name.to_string());
    }
    write(&dir.join("config.toml"), &cfg.to_canonical_toml())?;
    outputs.push("config.toml".into());
    let replicas_requested = match cfg.experiment.kind() {
        Kind::Simulate => 1,
        Kind::MomentScan if cfg.mc.estimator == EstimatorKind::Exact => 0,
        Kind::MomentScan | Kind::BetaSweep | Kind::Continuity => cfg.mc.replicas.unwrap_or(0),
        _ => 0,
    };
    let mut manifest = RunManifest {
        kind: cfg.experiment.kind().as_str().into(),
        config_digest: cfg.digest(),
        seed: cfg.mc.seed,
        stream: match cfg.experiment {
            Experiment::Simulate { stream } => Some(stream),
            _ => None,
        },
        started_at,
        finished_at: String::new(),
        tool_version: TOOL_VERSION.into(),
        outputs,
        replicas_requested,
        replicas_aborted: tally.aborted,
        quadrature_failures: tally.quad_failures,
        errors: tally.errors,
    };
    manifest.finished_at = chrono::Utc::now().to_rfc3339();
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write(&dir.join("manifest.json"), &json)?;
    Ok(manifest)
}

/// CSV schemas per subcommand, for `--help`.
pub fn schema_help(kind: Kind) -> String {
    let mut s = String::new();
    let files: &[(&str, &str)] = match kind {
        Kind::MlEval => &[("ml_eval.csv", "beta,x,ml_neg,stable_density")],
        Kind::Kernel => &[
            ("kernel.csv", "beta,t,x,y,value"),
            ("increments.csv", "beta,t,x,k,h,eta,space_sq,time_sq"),
        ],
        Kind::Simulate => &[("path.csv", "t,x,value")],
        Kind::MomentScan => &[
            ("moments.csv", "t,sup_x,sup_x_se,mode1,mode1_se,mode1_floor"),
            ("fit.csv", "which,slope,intercept,ci_halfwidth,t_lo,t_hi,points"),
            ("scan.csv", "lambda,slope,ci_halfwidth,replicas_used,aborted,grows"),
            ("scan_bracket.csv", "lower,upper,bracketed"),
        ],
        Kind::LambdaProfile => &[("lambda_profile.csv", "beta,lambda1,theta,Lambda")],
        Kind::BetaSweep => &[("beta_sweep.csv", "beta,p,gap,gap_se,replicas_used")],
        Kind::Continuity => &[
            ("continuity.csv", "direction,lag,moment"),
            (
                "continuity_fit.csv",
                "a,b,K,p,spatial_slope,spatial_ci,temporal_slope,temporal_ci,replicas_used",
            ),
        ],
    };
    let _ = writeln!(s, "Output files:");
    for (name, cols) in files {
        let _ = writeln!(s, "  {name}: {cols}");
    }
    let _ = write!(s, "  manifest.json, config.toml");
    s
}
