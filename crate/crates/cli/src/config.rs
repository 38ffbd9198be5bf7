//! Flag and config-file resolution.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use hammerlip_core::experiments::ExperimentSpec;
use hammerlip_core::geometry::{Parallelogram, Rect, SlopeBand};

use crate::CliError;

pub const SEED_ENV: &str = "HAMMERLIP_SEED";

#[derive(Debug, Parser)]
#[command(name = "hammerlip", version, about = "Longest chains under slope-band orders in Poisson clouds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mean L/t against the limiting shape
    Shape(Flags),
    /// Spread of L and the normalized law (central case)
    Fluct(Flags),
    /// Drift of L - t f in the super and sub cases
    Drift(Flags),
    /// Containment of optimal paths in the case strip
    Localize(Flags),
    /// Transversal deviation exponent and the cylinder check
    Wander(Flags),
    /// Parallelogram versus optimal rectangle
    Gap(Flags),
    /// Band order versus dominance on the image, by brute force
    CouplingCheck(Flags),
    /// Source and sink increments of the boundary process
    Stationarity(Flags),
    /// The crossing inequality at random probes
    CrossingCheck(Flags),
    /// Closed-form maximal rectangle in a parallelogram
    Rect(Flags),
    /// Write one Poisson sample as CSV
    DumpCloud(Flags),
}

impl Command {
    pub fn parts(&self) -> (&'static str, &Flags) {
        match self {
            Command::Shape(f) => ("shape", f),
            Command::Fluct(f) => ("fluct", f),
            Command::Drift(f) => ("drift", f),
            Command::Localize(f) => ("localize", f),
            Command::Wander(f) => ("wander", f),
            Command::Gap(f) => ("gap", f),
            Command::CouplingCheck(f) => ("coupling-check", f),
            Command::Stationarity(f) => ("stationarity", f),
            Command::CrossingCheck(f) => ("crossing-check", f),
            Command::Rect(f) => ("rect", f),
            Command::DumpCloud(f) => ("dump-cloud", f),
        }
    }
}

/// Every flag is optional here; defaults depend on the subcommand and are
/// applied after merging with the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// `key = value` file; flags take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory [default: ./out]
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Master seed [default: $HAMMERLIP_SEED, else 0]
    #[arg(long)]
    pub seed: Option<String>,
    /// Worker threads [default: available cores]
    #[arg(long)]
    pub jobs: Option<String>,
    #[arg(long)]
    pub alpha: Option<String>,
    /// Upper slope; `inf` allowed
    #[arg(long)]
    pub beta: Option<String>,
    #[arg(long)]
    pub a: Option<String>,
    #[arg(long)]
    pub b: Option<String>,
    /// Comma-separated ascending scale grid
    #[arg(long)]
    pub t: Option<String>,
    #[arg(long)]
    pub reps: Option<String>,
    #[arg(long)]
    pub intensity: Option<String>,
    /// Relative tolerance of the shape verdict
    #[arg(long)]
    pub tol: Option<String>,
    /// Absolute tolerance of the shape verdict (overrides --tol)
    #[arg(long)]
    pub tol_abs: Option<String>,
    /// Strip half-width per unit of t
    #[arg(long)]
    pub delta: Option<String>,
    #[arg(long)]
    pub min_fraction: Option<String>,
    #[arg(long)]
    pub cylinder_t: Option<String>,
    #[arg(long)]
    pub lambda: Option<String>,
    #[arg(long)]
    pub window: Option<String>,
    #[arg(long)]
    pub trials: Option<String>,
    #[arg(long)]
    pub points_max: Option<String>,
    #[arg(long)]
    pub configs: Option<String>,
    #[arg(long)]
    pub mu: Option<String>,
    #[arg(long)]
    pub c: Option<String>,
    #[arg(long)]
    pub cprime: Option<String>,
    #[arg(long)]
    pub sigma: Option<String>,
    #[arg(long)]
    pub rho: Option<String>,
}

impl Flags {
    fn given(&self) -> Vec<(&'static str, String)> {
        let mut v = Vec::new();
        let mut put = |k: &'static str, x: &Option<String>| {
            if let Some(x) = x {
                v.push((k, x.clone()));
            }
        };
        put("seed", &self.seed);
        put("jobs", &self.jobs);
        put("alpha", &self.alpha);
        put("beta", &self.beta);
        put("a", &self.a);
        put("b", &self.b);
        put("t", &self.t);
        put("reps", &self.reps);
        put("intensity", &self.intensity);
        put("tol", &self.tol);
        put("tol-abs", &self.tol_abs);
        put("delta", &self.delta);
        put("min-fraction", &self.min_fraction);
        put("cylinder-t", &self.cylinder_t);
        put("lambda", &self.lambda);
        put("window", &self.window);
        put("trials", &self.trials);
        put("points-max", &self.points_max);
        put("configs", &self.configs);
        put("mu", &self.mu);
        put("c", &self.c);
        put("cprime", &self.cprime);
        put("sigma", &self.sigma);
        put("rho", &self.rho);
        if let Some(out) = &self.out {
            v.push(("out", out.display().to_string()));
        }
        v
    }
}

/// What to run, with every parameter already validated.
#[derive(Debug, Clone, PartialEq)]
pub enum Job {
    Shape(ExperimentSpec),
    Fluct(ExperimentSpec),
    Drift(ExperimentSpec),
    Localize(ExperimentSpec),
    Wander(ExperimentSpec),
    Gap(ExperimentSpec),
    Coupling { trials: usize, points_max: usize },
    Stationarity { lambda: f64, window: f64, reps: usize },
    Crossing { configs: usize },
    Rect(Parallelogram),
    DumpCloud { rect: Rect, intensity: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: &'static str,
    pub job: Job,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub jobs: Option<usize>,
    /// Every key in effect, as text, for `config.resolved`.
    pub resolved: BTreeMap<String, String>,
}

impl RunConfig {
    pub fn resolved_text(&self) -> String {
        let mut s = format!("command = {}\n", self.command);
        for (k, v) in &self.resolved {
            s.push_str(&format!("{k} = {v}\n"));
        }
        s
    }
}

const COMMON: &[&str] = &["seed", "jobs", "out"];
const SPEC_KEYS: &[&str] = &["alpha", "beta", "a", "b", "t", "reps", "intensity"];

fn keys_for(command: &str) -> Vec<&'static str> {
    let extra: &[&str] = match command {
        "shape" => &["tol", "tol-abs"],
        "fluct" | "drift" | "gap" => &[],
        "localize" => &["delta", "min-fraction"],
        "wander" => &["cylinder-t"],
        "coupling-check" => &["trials", "points-max"],
        "stationarity" => &["lambda", "window", "reps"],
        "crossing-check" => &["configs"],
        "rect" => &["mu", "c", "cprime", "sigma", "rho"],
        "dump-cloud" => &["a", "b", "t", "intensity"],
        _ => &[],
    };
    let spec: &[&str] = match command {
        "shape" | "fluct" | "drift" | "localize" | "wander" | "gap" => SPEC_KEYS,
        _ => &[],
    };
    COMMON.iter().chain(spec).chain(extra).copied().collect()
}

fn defaults_for(command: &str) -> Vec<(&'static str, &'static str)> {
    let mut d = vec![("out", "./out")];
    let spec = |t: &'static str, reps: &'static str| {
        vec![("alpha", "0"), ("beta", "inf"), ("a", "1"), ("b", "1"), ("t", t), ("reps", reps), ("intensity", "1")]
    };
    d.extend(match command {
        "shape" => {
            let mut v = spec("1000", "100");
            v.push(("tol", "0.05"));
            v
        }
        "fluct" => spec("100,200,400,800", "300"),
        "drift" => spec("200,400,800,1600", "200"),
        "localize" => {
            let mut v = spec("2000", "50");
            v.extend([("delta", "0.25"), ("min-fraction", "0.9")]);
            v
        }
        "wander" => spec("125,250,500,1000,2000", "100"),
        "gap" => spec("200,400,800", "100"),
        "coupling-check" => vec![("trials", "500"), ("points-max", "200")],
        "stationarity" => vec![("lambda", "1"), ("window", "50"), ("reps", "2000")],
        "crossing-check" => vec![("configs", "500")],
        "rect" => vec![("mu", "2")],
        "dump-cloud" => vec![("a", "1"), ("b", "1"), ("t", "100"), ("intensity", "1")],
        _ => Vec::new(),
    });
    d
}

/// Parses a flat `key = value` file. `#` starts a comment; underscores in
/// keys are read as dashes.
pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::Usage(format!("config line {}: expected `key = value`", n + 1)));
        };
        let key = k.trim().replace('_', "-");
        if key.is_empty() {
            return Err(CliError::Usage(format!("config line {}: empty key", n + 1)));
        }
        out.push((key, v.trim().to_string()));
    }
    Ok(out)
}

fn read_config(path: &Path) -> Result<Vec<(String, String)>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_config_text(&text)
}

struct Values<'a> {
    map: &'a BTreeMap<String, String>,
}

impl Values<'_> {
    fn raw(&self, key: &str) -> Result<&str, CliError> {
        self.map
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| CliError::Usage(format!("missing value for `{key}`")))
    }

    fn f64(&self, key: &str) -> Result<f64, CliError> {
        let s = self.raw(key)?;
        let v = match s {
            "inf" | "+inf" | "infinity" => f64::INFINITY,
            _ => s
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("`{key}`: `{s}` is not a number")))?,
        };
        if v.is_nan() {
            return Err(CliError::Usage(format!("`{key}` must not be NaN")));
        }
        Ok(v)
    }

    fn opt_f64(&self, key: &str) -> Result<Option<f64>, CliError> {
        if self.map.contains_key(key) {
            self.f64(key).map(Some)
        } else {
            Ok(None)
        }
    }

    fn usize(&self, key: &str) -> Result<usize, CliError> {
        let s = self.raw(key)?;
        s.parse::<usize>()
            .map_err(|_| CliError::Usage(format!("`{key}`: `{s}` is not a non-negative integer")))
    }

    fn grid(&self, key: &str) -> Result<Vec<f64>, CliError> {
        let s = self.raw(key)?;
        s.split(',')
            .map(|x| {
                x.trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::Usage(format!("`{key}`: `{x}` is not a number")))
            })
            .collect()
    }
}

fn usage(e: hammerlip_core::Error) -> CliError {
    CliError::Usage(e.to_string())
}

fn spec_from(v: &Values, seed: u64, extras: &[(&str, &str)]) -> Result<ExperimentSpec, CliError> {
    let band = SlopeBand::new(v.f64("alpha")?, v.f64("beta")?).map_err(usage)?;
    let mut spec = ExperimentSpec::new(v.f64("a")?, v.f64("b")?, band, v.grid("t")?, v.usize("reps")?, seed)
        .with("intensity", v.f64("intensity")?);
    for (key, name) in extras {
        if let Some(x) = v.opt_f64(key)? {
            spec = spec.with(name, x);
        }
    }
    spec.validate().map_err(usage)?;
    Ok(spec)
}

fn parallelogram_from(v: &Values) -> Result<Parallelogram, CliError> {
    let mu = v.f64("mu")?;
    let has = |k: &str| v.map.contains_key(k);
    match (has("sigma") || has("rho"), has("c") || has("cprime")) {
        (true, false) => Parallelogram::from_corner(v.f64("sigma")?, v.f64("rho")?, mu).map_err(usage),
        (false, true) => Parallelogram::from_sides(v.f64("c")?, v.f64("cprime")?, mu).map_err(usage),
        (true, true) => Err(CliError::Usage("give either --sigma/--rho or --c/--cprime, not both".into())),
        (false, false) => Err(CliError::Usage("rect needs --sigma/--rho or --c/--cprime".into())),
    }
}

/// Merges defaults, the config file and flags (in increasing precedence),
/// rejects keys that do not belong to the subcommand, and validates.
pub fn parse_config(command: &Command, env_seed: Option<&str>) -> Result<RunConfig, CliError> {
    let (name, flags) = command.parts();
    let allowed = keys_for(name);
    let mut map: BTreeMap<String, String> = BTreeMap::new();
    for (k, v) in defaults_for(name) {
        map.insert(k.to_string(), v.to_string());
    }
    if let Some(s) = env_seed {
        map.insert("seed".into(), s.trim().to_string());
    }
    if let Some(path) = &flags.config {
        for (k, v) in read_config(path)? {
            if k == "command" {
                if v != name {
                    return Err(CliError::Usage(format!("config is for `{v}`, not `{name}`")));
                }
                continue;
            }
            if !allowed.contains(&k.as_str()) {
                return Err(CliError::Usage(format!("unknown key `{k}` for `{name}` in {}", path.display())));
            }
            map.insert(k, v);
        }
    }
    for (k, v) in flags.given() {
        if !allowed.contains(&k) {
            return Err(CliError::Usage(format!("--{k} does not apply to `{name}`")));
        }
        map.insert(k.to_string(), v);
    }
    let seed = match map.get("seed") {
        Some(s) => s
            .parse::<u64>()
            .map_err(|_| CliError::Usage(format!("seed `{s}` is not a u64")))?,
        None => 0,
    };
    map.insert("seed".into(), seed.to_string());
    let v = Values { map: &map };
    let jobs = match map.get("jobs") {
        Some(_) => {
            let j = v.usize("jobs")?;
            if j == 0 {
                return Err(CliError::Usage("jobs must be >= 1".into()));
            }
            Some(j)
        }
        None => None,
    };
    let job = match name {
        "shape" => Job::Shape(spec_from(&v, seed, &[("tol", "tol"), ("tol-abs", "tol_abs")])?),
        "fluct" => {
            let spec = spec_from(&v, seed, &[])?;
            if spec.t_grid.len() < 4 {
                return Err(CliError::Usage("fluct needs at least 4 values of t".into()));
            }
            Job::Fluct(spec)
        }
        "drift" => Job::Drift(spec_from(&v, seed, &[])?),
        "localize" => Job::Localize(spec_from(&v, seed, &[("delta", "delta"), ("min-fraction", "min_fraction")])?),
        "wander" => Job::Wander(spec_from(&v, seed, &[("cylinder-t", "cylinder_t")])?),
        "gap" => Job::Gap(spec_from(&v, seed, &[])?),
        "coupling-check" => {
            let points_max = v.usize("points-max")?;
            if points_max > 300 {
                return Err(CliError::Usage("points-max must be <= 300".into()));
            }
            Job::Coupling { trials: v.usize("trials")?, points_max }
        }
        "stationarity" => {
            let (lambda, window) = (v.f64("lambda")?, v.f64("window")?);
            if !(lambda > 0.0 && lambda.is_finite()) {
                return Err(CliError::Usage("lambda must be positive".into()));
            }
            if !(window > 0.0 && window.is_finite()) {
                return Err(CliError::Usage("window must be positive".into()));
            }
            let reps = v.usize("reps")?;
            if reps == 0 {
                return Err(CliError::Usage("reps must be >= 1".into()));
            }
            Job::Stationarity { lambda, window, reps }
        }
        "crossing-check" => Job::Crossing { configs: v.usize("configs")? },
        "rect" => Job::Rect(parallelogram_from(&v)?),
        "dump-cloud" => {
            let t = v.f64("t")?;
            let rect = Rect::origin(v.f64("a")? * t, v.f64("b")? * t).map_err(usage)?;
            let intensity = v.f64("intensity")?;
            if !(intensity >= 0.0 && intensity.is_finite()) {
                return Err(CliError::Usage("intensity must be >= 0".into()));
            }
            Job::DumpCloud { rect, intensity }
        }
        other => return Err(CliError::Usage(format!("unknown command `{other}`"))),
    };
    let out_dir = PathBuf::from(&map["out"]);
    Ok(RunConfig { command: name, job, out_dir, seed, jobs, resolved: map })
}
