//! Command-line front end. Every subcommand prints its resolved seed on
//! stderr and writes machine-readable output to `--out` or stdout.
//!
//! Exit codes: 0 on success or PASS, 1 on FAIL, 2 on a usage or
//! configuration error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::boolcore::{Assign, VarId};
use crate::error::{Error, Result};
use crate::gridgraph::{dimacs, Charge, TorusGrid, TseitinInstance};
use crate::lab::{
    self, check_caps, run_equivalence_suite, run_experiment, run_tails, to_csv, to_json, DominanceConfig, EdgePool,
    EquivalenceConfig, ExperimentConfig, ExperimentKind, TailsConfig,
};
use crate::restrictions::{build_path_atlas, sample_uniform, validate_disjointness, GridParams, GridSampler};

#[derive(Parser, Debug)]
#[command(name = "switchlab", version, about = "Switching-lemma laboratory for Tseitin formulas on the torus")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write the Tseitin formula of the n×n torus in DIMACS form.
    GenTseitin {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = ChargeKind::AllOne)]
        charge: ChargeKind,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample a grid restriction (or, with --p, a uniform one) as JSON.
    SampleRestriction(Run),
    /// Check that atlas paths only meet near a common center.
    ValidatePaths(Run),
    /// Depth of a random DNF's canonical tree under uniform restrictions.
    SingleSl(Run),
    /// Depth of the common partial tree of a DNF family under uniform restrictions.
    MultiSl(Run),
    /// Depth of the common partial tree of DNFs over torus edges under grid restrictions.
    GridSl(Run),
    /// Exact two-way sampling check and the grid dominance test.
    EquivSuite {
        #[command(flatten)]
        run: Run,
        /// Skip the grid dominance part.
        #[arg(long)]
        skip_grid: bool,
    },
    /// Simulate the negative-binomial moment and geometric-sum tail bounds.
    Tails(Run),
    /// Summarize a JSON result written by another subcommand.
    Report {
        input: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ChargeKind {
    /// One at every vertex.
    AllOne,
    /// One everywhere, except zero at (0, 0) when n is even.
    Standard,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Parameters shared by the running subcommands. A `--config` JSON file
/// uses the same names; flags given on the command line win.
#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct Knobs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub delta: Option<usize>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub l: Option<usize>,
    /// Number of DNFs in the family.
    #[arg(long)]
    pub s: Option<usize>,
    /// Terms per DNF.
    #[arg(long)]
    pub terms: Option<usize>,
    /// Variables for uniform restrictions.
    #[arg(long)]
    pub vars: Option<usize>,
    /// Depth thresholds, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub t: Option<Vec<usize>>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// One-sided confidence level.
    #[arg(long)]
    pub level: Option<f64>,
    /// `all` or `paths`.
    #[arg(long)]
    pub edge_pool: Option<String>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub override_caps: Option<bool>,
}

impl Knobs {
    /// `self` where set, else `other`.
    pub fn or(self, other: Knobs) -> Knobs {
        Knobs {
            n: self.n.or(other.n),
            delta: self.delta.or(other.delta),
            p: self.p.or(other.p),
            k: self.k.or(other.k),
            l: self.l.or(other.l),
            s: self.s.or(other.s),
            terms: self.terms.or(other.terms),
            vars: self.vars.or(other.vars),
            t: self.t.or(other.t),
            trials: self.trials.or(other.trials),
            seed: self.seed.or(other.seed),
            level: self.level.or(other.level),
            edge_pool: self.edge_pool.or(other.edge_pool),
            override_caps: self.override_caps.or(other.override_caps),
        }
    }
}

#[derive(Args, Clone, Debug)]
pub struct Run {
    #[command(flatten)]
    pub knobs: Knobs,
    /// JSON file of defaults for the flags above.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Worker threads; results do not depend on it.
    #[arg(long, env = "SWITCHLAB_THREADS")]
    pub threads: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

impl Run {
    /// Flags over the config file.
    fn merged(&self) -> Result<Knobs> {
        let file = match &self.config {
            None => Knobs::default(),
            Some(path) => {
                let text = std::fs::read_to_string(path)?;
                serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
            }
        };
        Ok(self.knobs.clone().or(file))
    }

    /// [`Run::merged`] with the seed resolved and echoed.
    fn resolve(&self, err: &mut dyn Write) -> Result<Knobs> {
        let mut k = self.merged()?;
        let seed = k.seed.unwrap_or_else(|| rand::rng().random());
        k.seed = Some(seed);
        writeln!(err, "seed: {seed}")?;
        Ok(k)
    }
}

impl FromStr for EdgePool {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(EdgePool::All),
            "paths" => Ok(EdgePool::Paths),
            _ => Err(Error::Config(format!("unknown edge pool {s:?}; expected all or paths"))),
        }
    }
}

fn experiment_config(kind: ExperimentKind, k: &Knobs) -> Result<ExperimentConfig> {
    let d = ExperimentConfig::for_kind(kind);
    let cfg = ExperimentConfig {
        kind,
        vars: k.vars.unwrap_or(d.vars),
        n: k.n.unwrap_or(d.n),
        delta: k.delta.unwrap_or(d.delta),
        p: k.p.unwrap_or(d.p),
        k: k.k.unwrap_or(d.k),
        l: k.l.unwrap_or(d.l),
        s: k.s.unwrap_or(d.s),
        terms: k.terms.unwrap_or(d.terms),
        t_values: k.t.clone().unwrap_or(d.t_values),
        trials: k.trials.unwrap_or(d.trials),
        seed: k.seed.unwrap_or(d.seed),
        level: k.level.unwrap_or(d.level),
        edge_pool: k.edge_pool.as_deref().map(EdgePool::from_str).transpose()?.unwrap_or(d.edge_pool),
        override_caps: k.override_caps.unwrap_or(d.override_caps),
    };
    cfg.validate()?;
    Ok(cfg)
}

fn emit(run: &Run, out: &mut dyn Write, body: &str) -> Result<()> {
    match &run.out {
        Some(path) => std::fs::write(path, body)?,
        None => out.write_all(body.as_bytes())?,
    }
    Ok(())
}

fn render<C: Serialize, R: Serialize, T: Serialize>(format: Format, config: &C, result: &R, rows: &[T]) -> Result<String> {
    match format {
        Format::Json => Ok(to_json(config, result)? + "\n"),
        Format::Csv => to_csv(rows),
    }
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            // help and version requests are not errors
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return 2;
            }
            let _ = write!(out, "{e}");
            return 0;
        }
    };
    match dispatch(&cli.command, out, err) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::Config(_) | Error::BadGridParams(_) | Error::BadGridSide(_) | Error::Io(_) => 2,
                _ => 1,
            }
        }
    }
}

/// Entry point for the binary.
pub fn main_from_env() -> i32 {
    run_cli(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr())
}

fn threaded<T: Send>(run: &Run, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    if run.threads == Some(0) {
        return Err(Error::Config("threads must be positive".into()));
    }
    lab::with_threads(run.threads, f)?
}

fn dispatch(cmd: &Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<bool> {
    match cmd {
        Command::GenTseitin { n, charge, out: path } => {
            let grid = TorusGrid::with_side(*n)?;
            let alpha = match charge {
                ChargeKind::AllOne => Charge::ones(n * n),
                ChargeKind::Standard => grid.standard_charge(),
            };
            let text = dimacs(&TseitinInstance::new(grid.full(), alpha)?)?;
            match path {
                Some(p) => std::fs::write(p, text)?,
                None => out.write_all(text.as_bytes())?,
            }
            Ok(true)
        }
        Command::SampleRestriction(run) => sample_restriction(run, out, err),
        Command::ValidatePaths(run) => validate_paths(run, out, err),
        Command::SingleSl(run) => experiment(ExperimentKind::SingleSl, run, out, err),
        Command::MultiSl(run) => experiment(ExperimentKind::MultiSl, run, out, err),
        Command::GridSl(run) => experiment(ExperimentKind::GridSl, run, out, err),
        Command::EquivSuite { run, skip_grid } => equiv_suite(run, *skip_grid, out, err),
        Command::Tails(run) => tails(run, out, err),
        Command::Report { input } => report(input, out),
    }
}

fn experiment(kind: ExperimentKind, run: &Run, out: &mut dyn Write, err: &mut dyn Write) -> Result<bool> {
    let cfg = experiment_config(kind, &run.resolve(err)?)?;
    let res = threaded(run, || run_experiment(&cfg))?;
    for r in &res.rows {
        let bound = if r.vacuous { "vacuous".to_string() } else { format!("{:.3e}", r.bound) };
        writeln!(err, "t = {}: {}/{} failures, upper {:.3e}, bound {bound}: {}", r.t, r.failures, r.trials, r.upper, verdict(r.pass))?;
    }
    emit(run, out, &render(run.format, &cfg, &res, &res.rows)?)?;
    Ok(res.pass)
}

#[derive(Serialize)]
struct UniformDoc {
    p: f64,
    vars: usize,
    seed: u64,
    /// One character per variable: `0`, `1` or `*`.
    values: String,
}

fn sample_restriction(run: &Run, out: &mut dyn Write, err: &mut dyn Write) -> Result<bool> {
    let k = run.resolve(err)?;
    let seed = k.seed.expect("resolved");
    let mut rng = lab::trial_rng(seed, 0);
    let body = if let Some(p) = k.p {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Config(format!("p = {p} is not in [0, 1]")));
        }
        let vars = k.vars.unwrap_or(20);
        let rho = sample_uniform((0..vars as u32).map(VarId), p, &mut rng);
        let values = (0..vars as u32)
            .map(|v| match rho.get(VarId(v)) {
                Assign::Star => '*',
                Assign::Zero => '0',
                Assign::One => '1',
            })
            .collect();
        serde_json::to_string_pretty(&UniformDoc { p, vars, seed, values }).map_err(|e| Error::Io(e.to_string()))?
    } else {
        let (n, delta) = (k.n.unwrap_or(48), k.delta.unwrap_or(2));
        check_caps(n, delta, 1, k.override_caps.unwrap_or(false))?;
        let sampler = GridSampler::new(GridParams::new(n, delta)?)?;
        let rho = sampler.sample(&mut rng)?;
        serde_json::to_string_pretty(&rho.to_doc()).map_err(|e| Error::Io(e.to_string()))?
    };
    emit(run, out, &(body + "\n"))?;
    Ok(true)
}

#[derive(Serialize)]
struct PathsSummary {
    n: usize,
    delta: usize,
    num_paths: usize,
    shared_edges: usize,
    violations: usize,
    max_distance: usize,
    pass: bool,
}

fn validate_paths(run: &Run, out: &mut dyn Write, err: &mut dyn Write) -> Result<bool> {
    let k = run.merged()?;
    let delta = k.delta.unwrap_or(2);
    let n = k.n.unwrap_or(16 * delta * delta * 3);
    let atlas = build_path_atlas(&GridParams::geometry(n, delta)?)?;
    let report = validate_disjointness(&atlas);
    let summary = PathsSummary {
        n,
        delta,
        num_paths: report.num_paths,
        shared_edges: report.shared.len(),
        violations: report.violations().count(),
        max_distance: report.shared.iter().map(|s| s.distance).max().unwrap_or(0),
        pass: report.pass,
    };
    writeln!(
        err,
        "n = {n}, delta = {delta}: {} paths, {} shared edges, {} violations: {}",
        summary.num_paths,
        summary.shared_edges,
        summary.violations,
        verdict(summary.pass)
    )?;
    let body = match run.format {
        Format::Json => to_json(&serde_json::json!({ "n": n, "delta": delta }), &report)? + "\n",
        Format::Csv => to_csv(&[&summary])?,
    };
    emit(run, out, &body)?;
    Ok(report.pass)
}

fn equiv_suite(run: &Run, skip_grid: bool, out: &mut dyn Write, err: &mut dyn Write) -> Result<bool> {
    let k = run.resolve(err)?;
    let d = DominanceConfig::default();
    let dominance = DominanceConfig {
        n: k.n.unwrap_or(d.n),
        delta: k.delta.unwrap_or(d.delta),
        k: k.k.unwrap_or(d.k),
        l: k.l.unwrap_or(d.l),
        s: k.s.unwrap_or(d.s),
        terms: k.terms.unwrap_or(d.terms),
        t: k.t.as_ref().and_then(|t| t.first().copied()).unwrap_or(d.t),
        trials: k.trials.unwrap_or(d.trials),
        seed: k.seed.expect("resolved"),
        level: k.level.unwrap_or(d.level),
        strategy: d.strategy,
    };
    check_caps(dominance.n, dominance.delta, dominance.trials, k.override_caps.unwrap_or(false))?;
    let cfg = EquivalenceConfig {
        vars: k.vars.unwrap_or(4),
        dominance: (!skip_grid).then_some(dominance),
        ..EquivalenceConfig::default()
    };
    if cfg.vars > 4 {
        return Err(Error::Config(format!("exact enumeration is limited to 4 variables, got {}", cfg.vars)));
    }
    let res = threaded(run, || run_equivalence_suite(&cfg))?;
    for r in &res.exact {
        writeln!(err, "p = {}: {} trees, {} mismatches", r.p, r.trees, r.mismatches)?;
    }
    if let Some(v) = &res.dominance {
        writeln!(err, "dominance: max gap {:.4} vs band {:.4}: {}", v.max_gap, v.band, verdict(v.pass))?;
    }
    emit(run, out, &render(run.format, &cfg, &res, &res.exact)?)?;
    Ok(res.pass)
}

fn tails(run: &Run, out: &mut dyn Write, err: &mut dyn Write) -> Result<bool> {
    let k = run.resolve(err)?;
    let d = TailsConfig::default();
    let cfg = TailsConfig {
        trials: k.trials.unwrap_or(d.trials),
        seed: k.seed.expect("resolved"),
        level: k.level.unwrap_or(d.level),
        override_caps: k.override_caps.unwrap_or(false),
        ..d
    };
    let res = threaded(run, || run_tails(&cfg))?;
    writeln!(err, "tails: {}", verdict(res.pass))?;
    emit(run, out, &render(run.format, &cfg, &res, &res.moments)?)?;
    Ok(res.pass)
}

fn report(input: &Path, out: &mut dyn Write) -> Result<bool> {
    let text = std::fs::read_to_string(input)?;
    let v: serde_json::Value = serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", input.display())))?;
    let version = v.get("schema_version").and_then(|x| x.as_u64());
    if version != Some(u64::from(lab::SCHEMA_VERSION)) {
        return Err(Error::Config(format!("{}: unsupported schema version {version:?}", input.display())));
    }
    let result = &v["result"];
    let pass = result.get("pass").and_then(|x| x.as_bool()).unwrap_or(false);
    for key in ["rows", "exact", "moments", "geo_sums"] {
        if let Some(rows) = result.get(key).and_then(|x| x.as_array()) {
            writeln!(out, "{key}:")?;
            for r in rows {
                writeln!(out, "  {r}")?;
            }
        }
    }
    if let Some(d) = result.get("dominance").filter(|d| !d.is_null()) {
        writeln!(out, "dominance: {d}")?;
    }
    writeln!(out, "verdict: {}", verdict(pass))?;
    Ok(pass)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run_cli(std::iter::once("switchlab").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn dimacs_header_for_the_three_torus() {
        let (code, out, _) = run(&["gen-tseitin", "--n", "3", "--charge", "all-one"]);
        assert_eq!(code, 0);
        assert!(out.lines().any(|l| l == "p cnf 18 72"), "{out}");
    }

    #[test]
    fn zero_p_single_sl_passes_and_prints_the_seed() {
        let (code, out, err) = run(&["single-sl", "--k", "2", "--p", "0", "--trials", "200", "--seed", "5"]);
        assert_eq!(code, 0, "{err}");
        assert!(err.starts_with("seed: 5\n"));
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["result"]["pass"], true);
        assert!(v["result"]["rows"].as_array().unwrap().iter().all(|r| r["failures"] == 0));
    }

    #[test]
    fn usage_errors_exit_with_two() {
        assert_eq!(run(&["single-sl", "--trials", "x"]).0, 2);
        assert_eq!(run(&["multi-sl", "--p", "3"]).0, 2);
        assert_eq!(run(&["no-such-command"]).0, 2);
        assert_eq!(run(&["grid-sl", "--edge-pool", "some"]).0, 2);
    }

    #[test]
    fn flags_win_over_the_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"p": 0.5, "trials": 300, "seed": 9, "t": [1]}"#).unwrap();
        let (code, out, err) = run(&["single-sl", "--config", path.to_str().unwrap(), "--p", "0", "--format", "csv"]);
        assert_eq!(code, 0, "{err}");
        assert!(err.starts_with("seed: 9\n"));
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "t,failures,trials,estimate,upper,bound_ln,bound,vacuous,pass");
        assert!(lines[1].starts_with("1,0,300,0.0,") && lines[1].ends_with(",false,true"), "{out}");
        std::fs::write(&path, r#"{"bogus": 1}"#).unwrap();
        assert_eq!(run(&["single-sl", "--config", path.to_str().unwrap()]).0, 2);
    }

    #[test]
    fn same_seed_same_bytes() {
        let args = ["multi-sl", "--trials", "500", "--p", "0.1", "--seed", "3"];
        let a = run(&args).1;
        let b = run(&[&args[..], &["--threads", "2"]].concat()).1;
        assert_eq!(a, b);
        let c = run(&["multi-sl", "--trials", "500", "--p", "0.1", "--seed", "4"]).1;
        assert_ne!(a, c);
    }

    #[test]
    fn report_reads_results_back() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.json");
        let p = path.to_str().unwrap();
        assert_eq!(run(&["tails", "--trials", "1000", "--seed", "1", "--out", p]).0, 1);
        let (code, out, _) = run(&["report", p]);
        assert_eq!(code, 1);
        assert!(out.contains("moments:") && out.ends_with("verdict: FAIL\n"));
    }

    #[test]
    fn sample_restriction_formats() {
        let (code, out, _) = run(&["sample-restriction", "--p", "0.5", "--vars", "8", "--seed", "2"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["values"].as_str().unwrap().len(), 8);
        let (code, out, _) = run(&["sample-restriction", "--seed", "2"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["chosen"].as_array().unwrap().len(), 9);
    }
}
