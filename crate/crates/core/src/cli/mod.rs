//! Command-line front end: run configuration, subcommands and output formats.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::geometry::{Rect, Region, Vertex};
use crate::inference::{marginal_transfer, Caps, InferenceProblem};
use crate::models::{ising, potts};
use crate::rng::UniformStream;
use crate::sampler::{LazySampler, SamplerState, Strategy, TraceDetail, DEFAULT_BUDGET};
use crate::system::SpinSystem;
use crate::verify::{branching_stats, oracle_gap, random_oracle_instance, wsm_probe, ProbeTarget};

/// Oracle agreement required by `check-oracle`.
pub const ORACLE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    Potts,
    Ising,
}

impl Model {
    fn name(self) -> &'static str {
        match self {
            Model::Potts => "potts",
            Model::Ising => "ising",
        }
    }
}

/// Fully resolved run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: Model,
    pub q: usize,
    pub beta: f64,
    pub h: f64,
    pub mesh: Option<i64>,
    pub strategy: Strategy,
    pub window: Option<Rect>,
    pub seed: u64,
    pub samples: u64,
    pub budget: u64,
    pub caps: Caps,
    pub ells: Vec<usize>,
    pub out: Option<PathBuf>,
}

const KEYS: &[&str] =
    &["model", "q", "beta", "h", "L", "strategy", "window", "seed", "samples", "budget", "enumeration_cap", "transfer_cap", "ells", "out"];

fn canonical_key(k: &str) -> Option<&'static str> {
    let k = match k {
        "mesh-l" | "mesh_l" | "l" => "L",
        "enumeration-cap" => "enumeration_cap",
        "transfer-cap" => "transfer_cap",
        other => other,
    };
    KEYS.iter().copied().find(|&c| c == k)
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::Config(format!("{key}: cannot parse {v:?}")))
}

fn parse_window(v: &str) -> Result<Rect> {
    let parts: Vec<i64> = v.split(',').map(|p| parse_num("window", p.trim())).collect::<Result<_>>()?;
    match parts[..] {
        [x0, y0, x1, y1] if x0 <= x1 && y0 <= y1 => Ok(Rect::new(x0, y0, x1, y1)),
        [_, _, _, _] => Err(Error::Config(format!("window {v:?} is empty"))),
        _ => Err(Error::Config("window needs x0,y0,x1,y1".into())),
    }
}

/// `a..b` (inclusive) or a comma list.
fn parse_ells(v: &str) -> Result<Vec<usize>> {
    let ells: Vec<usize> = if let Some((a, b)) = v.split_once("..") {
        let (a, b): (usize, usize) = (parse_num("ells", a.trim())?, parse_num("ells", b.trim())?);
        (a..=b).collect()
    } else {
        v.split(',').map(|p| parse_num("ells", p.trim())).collect::<Result<_>>()?
    };
    if ells.is_empty() || ells[0] == 0 || ells.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config(format!("ells {v:?} must be increasing and >= 1")));
    }
    Ok(ells)
}

/// Split `key=value` tokens separated by whitespace; `#` starts a comment.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("");
        for tok in line.split_whitespace() {
            let (k, v) = tok.split_once('=').ok_or_else(|| Error::Config(format!("expected key=value, got {tok:?}")))?;
            out.push((k.to_string(), v.to_string()));
        }
    }
    Ok(out)
}

/// Resolve a configuration from file text and flag overrides (later wins).
pub fn parse_config(text: &str, overrides: &[(String, String)]) -> Result<RunConfig> {
    let mut map: BTreeMap<&'static str, String> = BTreeMap::new();
    for (k, v) in parse_pairs(text)?.iter().chain(overrides) {
        let key = canonical_key(k).ok_or_else(|| Error::Config(format!("unknown key {k:?}")))?;
        map.insert(key, v.clone());
    }
    let model = match map.get("model").map(String::as_str) {
        Some("potts") => Model::Potts,
        Some("ising") => Model::Ising,
        Some(other) => return Err(Error::Config(format!("unknown model {other:?}"))),
        None => return Err(Error::Config("missing required key: model".into())),
    };
    let get = |k: &str| map.get(k).map(String::as_str);
    let q = match (model, get("q")) {
        (Model::Potts, Some(v)) => parse_num("q", v)?,
        (Model::Potts, None) => 2,
        (Model::Ising, None | Some("2")) => 2,
        (Model::Ising, Some(v)) => return Err(Error::Config(format!("ising has q = 2, got {v}"))),
    };
    let beta = get("beta").map_or(Ok(0.0), |v| parse_num("beta", v))?;
    let h = get("h").map_or(Ok(1.0), |v| parse_num("h", v))?;
    if model == Model::Potts && get("h").is_some_and(|v| v.parse::<f64>() != Ok(1.0)) {
        return Err(Error::Config("h applies to the ising model only".into()));
    }
    let mesh = get("L").map(|v| parse_num::<i64>("L", v)).transpose()?;
    if mesh.is_some_and(|l| l < 2) {
        return Err(Error::Config("L must be at least 2".into()));
    }
    let strategy = match get("strategy") {
        None => Strategy::ExactMin,
        Some(v) => Strategy::parse(v).ok_or_else(|| Error::Config(format!("unknown strategy {v:?}")))?,
    };
    let defaults = Caps::default();
    let cfg = RunConfig {
        model,
        q,
        beta,
        h,
        mesh,
        strategy,
        window: get("window").map(parse_window).transpose()?,
        seed: get("seed").map_or(Ok(0), |v| parse_num("seed", v))?,
        samples: get("samples").map_or(Ok(1), |v| parse_num("samples", v))?,
        budget: get("budget").map_or(Ok(DEFAULT_BUDGET), |v| parse_num("budget", v))?,
        caps: Caps {
            enumeration: get("enumeration_cap").map_or(Ok(defaults.enumeration), |v| parse_num("enumeration_cap", v))?,
            transfer: get("transfer_cap").map_or(Ok(defaults.transfer), |v| parse_num("transfer_cap", v))?,
        },
        ells: get("ells").map_or(Ok(vec![2, 3, 4, 5]), parse_ells)?,
        out: get("out").map(PathBuf::from),
    };
    if cfg.samples == 0 {
        return Err(Error::Config("samples must be positive".into()));
    }
    let system = cfg.system()?;
    if cfg.strategy == Strategy::MonotoneExtremes && !system.monotone_eligible() {
        return Err(Error::Config("strategy monotone requires a monotone-eligible model".into()));
    }
    Ok(cfg)
}

impl RunConfig {
    pub fn system(&self) -> Result<SpinSystem> {
        let s = match self.model {
            Model::Potts => potts(self.q, self.beta),
            Model::Ising => ising(self.beta, self.h),
        };
        s.map_err(|e| Error::Config(e.to_string()))
    }

    pub fn mesh(&self) -> Result<i64> {
        self.mesh.ok_or_else(|| Error::Config("missing required key: L".into()))
    }

    pub fn window(&self) -> Result<Rect> {
        self.window.ok_or_else(|| Error::Config("missing required key: window".into()))
    }

    /// The resolved configuration as `key=value` pairs, in a fixed order.
    pub fn pairs(&self) -> Vec<(&'static str, String)> {
        let opt = |v: Option<String>| v.unwrap_or_else(|| "-".into());
        vec![
            ("model", self.model.name().into()),
            ("q", self.q.to_string()),
            ("beta", self.beta.to_string()),
            ("h", self.h.to_string()),
            ("L", opt(self.mesh.map(|l| l.to_string()))),
            ("strategy", self.strategy.name().into()),
            ("window", opt(self.window.map(|r| format!("{},{},{},{}", r.x0, r.y0, r.x1, r.y1)))),
            ("seed", self.seed.to_string()),
            ("samples", self.samples.to_string()),
            ("budget", self.budget.to_string()),
            ("enumeration_cap", self.caps.enumeration.to_string()),
            ("transfer_cap", self.caps.transfer.to_string()),
            ("ells", self.ells.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(",")),
        ]
    }

    fn header(&self, command: &str) -> String {
        let body: Vec<String> = self.pairs().into_iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!("# lazygibbs {command}\n# {}\n", body.join(" "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Perfect samples of the window, one grid block per sample.
    Sample,
    /// Exact single-vertex marginals on the window with a free boundary.
    Marginal,
    /// Boundary-influence decay table for the model.
    ProbeWsm,
    /// Brute force vs transfer sweep on `samples` random instances.
    CheckOracle,
    /// Recursion sizes over `samples` independent runs.
    Stats,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Sample => "sample",
            Command::Marginal => "marginal",
            Command::ProbeWsm => "probe-wsm",
            Command::CheckOracle => "check-oracle",
            Command::Stats => "stats",
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Key=value configuration file; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// potts | ising
    #[arg(long, global = true)]
    pub model: Option<String>,
    #[arg(long, global = true)]
    pub q: Option<String>,
    #[arg(long, global = true)]
    pub beta: Option<String>,
    #[arg(long, global = true)]
    pub h: Option<String>,
    /// Mesh spacing L (>= 2).
    #[arg(long = "mesh-l", global = true)]
    pub mesh_l: Option<String>,
    /// exact-min | monotone | trivial
    #[arg(long, global = true)]
    pub strategy: Option<String>,
    /// x0,y0,x1,y1 (inclusive).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub window: Option<String>,
    #[arg(long, global = true)]
    pub seed: Option<String>,
    #[arg(long, global = true)]
    pub samples: Option<String>,
    /// Maximum lazy calls per sample.
    #[arg(long, global = true)]
    pub budget: Option<String>,
    #[arg(long = "enumeration-cap", global = true)]
    pub enumeration_cap: Option<String>,
    #[arg(long = "transfer-cap", global = true)]
    pub transfer_cap: Option<String>,
    /// Probe scales, `a..b` or a comma list.
    #[arg(long, global = true)]
    pub ells: Option<String>,
    /// Output file (stdout if absent).
    #[arg(long, global = true)]
    pub out: Option<String>,
}

impl Flags {
    pub fn overrides(&self) -> Vec<(String, String)> {
        let fields = [
            ("model", &self.model),
            ("q", &self.q),
            ("beta", &self.beta),
            ("h", &self.h),
            ("L", &self.mesh_l),
            ("strategy", &self.strategy),
            ("window", &self.window),
            ("seed", &self.seed),
            ("samples", &self.samples),
            ("budget", &self.budget),
            ("enumeration_cap", &self.enumeration_cap),
            ("transfer_cap", &self.transfer_cap),
            ("ells", &self.ells),
            ("out", &self.out),
        ];
        fields.into_iter().filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone()))).collect()
    }
}

#[derive(Debug, Parser)]
#[command(name = "lazygibbs", version, about = "Perfect sampling of q-spin systems on Z^2")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

/// Exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::StrategyNotSupported(_) => 2,
        Error::BudgetExhausted { .. } => 3,
        Error::CapExceeded { .. } => 4,
        _ => 1,
    }
}

/// Grid block: rows in decreasing `y`, 1-based spins.
fn write_grid(out: &mut String, window: Rect, spin: impl Fn(Vertex) -> u8) {
    for y in (window.y0..=window.y1).rev() {
        let row: Vec<String> = (window.x0..=window.x1).map(|x| (spin(Vertex::new(x, y)) as u32 + 1).to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
}

fn sampler(cfg: &RunConfig) -> Result<LazySampler> {
    Ok(LazySampler::new(cfg.system()?, cfg.mesh()?, cfg.strategy)?.with_caps(cfg.caps))
}

fn run_sample(cfg: &RunConfig) -> Result<String> {
    let window = cfg.window()?;
    let mut s = sampler(cfg)?;
    let mut out = cfg.header("sample");
    for i in 0..cfg.samples {
        let w = s.sample_window(&Region::Rect(window), cfg.seed, i, cfg.budget, TraceDetail::Totals)?;
        if i > 0 {
            out.push('\n');
        }
        writeln!(out, "# sample={i} calls={} draws={}", w.trace.calls, w.draws).unwrap();
        write_grid(&mut out, window, |v| w.config.get(v).expect("window assigned"));
    }
    Ok(out)
}

fn run_marginal(cfg: &RunConfig) -> Result<String> {
    let window = cfg.window()?;
    let system = cfg.system()?;
    let free = Region::Rect(window);
    let mut out = cfg.header("marginal");
    let cols: Vec<String> = (1..=system.q()).map(|i| format!("p{i}")).collect();
    writeln!(out, "x,y,{}", cols.join(",")).unwrap();
    for v in window.iter() {
        let p = InferenceProblem::with_free_boundary(&system, &free, Default::default(), &Region::Rect(Rect::new(v.x, v.y, v.x, v.y)))?
            .with_caps(cfg.caps);
        let m = marginal_transfer(&p)?;
        let ps: Vec<String> = m.probs.iter().map(|p| format!("{p:.17e}")).collect();
        writeln!(out, "{},{},{}", v.x, v.y, ps.join(",")).unwrap();
    }
    Ok(out)
}

fn run_probe(cfg: &RunConfig) -> Result<String> {
    let table = wsm_probe(&cfg.system()?, &cfg.ells, ProbeTarget::Centre, cfg.caps)?;
    let mut out = cfg.header("probe-wsm");
    out.push_str(&table.to_csv());
    if let Some(slope) = table.log_slope() {
        writeln!(out, "# log_slope={slope:.6e}").unwrap();
    }
    Ok(out)
}

/// Errors with a nonzero exit if any instance disagrees beyond [`ORACLE_TOL`].
fn run_check_oracle(cfg: &RunConfig) -> Result<(String, bool)> {
    let mut rng = UniformStream::new(cfg.seed);
    let mut out = cfg.header("check-oracle");
    out.push_str("instance,q,free,query,max_abs_diff\n");
    let mut worst: f64 = 0.0;
    for i in 0..cfg.samples {
        let inst = random_oracle_instance(&mut rng)?;
        let gap = oracle_gap(&inst)?;
        worst = worst.max(gap);
        writeln!(out, "{i},{},{},{},{gap:.3e}", inst.system.q(), inst.free.len(), inst.query.len()).unwrap();
    }
    let ok = worst <= ORACLE_TOL;
    writeln!(out, "# worst={worst:.3e} tol={ORACLE_TOL:e} {}", if ok { "pass" } else { "fail" }).unwrap();
    Ok((out, ok))
}

/// Budget aborts are recorded, not fatal; the summary counts them.
fn run_stats(cfg: &RunConfig) -> Result<String> {
    let window = Region::Rect(cfg.window()?);
    let mut s = sampler(cfg)?;
    let mut out = cfg.header("stats");
    out.push_str("run,total_calls,max_depth\n");
    let mut traces = Vec::with_capacity(cfg.samples as usize);
    let mut aborted = 0u64;
    for i in 0..cfg.samples {
        let mut state = SamplerState::new(UniformStream::with_stream(cfg.seed, i), cfg.budget, TraceDetail::Totals);
        match s.sample_window_in(&mut state, &window) {
            Ok(_) => {}
            Err(Error::BudgetExhausted { .. }) => aborted += 1,
            Err(e) => return Err(e),
        }
        writeln!(out, "{i},{},{}", state.trace.calls, state.trace.max_depth).unwrap();
        traces.push(state.trace);
    }
    let sum = branching_stats(&traces)?;
    writeln!(
        out,
        "# runs={} aborted={aborted} mean_calls={:.6} max_depth={} indecision_frequency={:.6e}",
        sum.runs, sum.mean_calls, sum.max_depth, sum.indecision_frequency
    )
    .unwrap();
    Ok(out)
}

/// Run `command`; returns the output text and whether the run passed.
pub fn execute(cfg: &RunConfig, command: Command) -> Result<(String, bool)> {
    match command {
        Command::Sample => run_sample(cfg).map(|o| (o, true)),
        Command::Marginal => run_marginal(cfg).map(|o| (o, true)),
        Command::ProbeWsm => run_probe(cfg).map(|o| (o, true)),
        Command::CheckOracle => run_check_oracle(cfg),
        Command::Stats => run_stats(cfg).map(|o| (o, true)),
    }
}

/// Parse arguments, run, and write the output; returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = (|| {
        let text = match &cli.flags.config {
            Some(p) => std::fs::read_to_string(p).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?,
            None => String::new(),
        };
        let cfg = parse_config(&text, &cli.flags.overrides())?;
        let (out, ok) = execute(&cfg, cli.command)?;
        match &cfg.out {
            Some(p) => std::fs::write(p, out)?,
            None => print!("{out}"),
        }
        Ok::<_, Error>(ok)
    })();
    match result {
        Ok(true) => 0,
        Ok(false) => {
            eprintln!("error: {} failed", cli.command.name());
            1
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
