//! Command-line front end: `run`, `sweep`, `stats`, `ofat` and `sobol`.
//!
//! Every command reads JSON configuration, writes CSV files into `--out`
//! (each starting with a `# manifest:` comment holding the full parameter
//! digest) and prints the digest to stdout.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::coordination::{CoordinationMode, SearchMode};
use crate::engine::{csv_err, read_summary_csv, run_scenario, ScenarioConfig, ScenarioResult};
use crate::error::{Error, Result};
use crate::organization::NetworkKind;
use crate::report::{fmt_sig, write_comment};
use crate::sensitivity::{ofat_sweep, sobol_indices, write_ofat_csv, write_sobol_csv, OfatPlan, SobolPlan};
use crate::stats::{mean_ci, GridEffectTable, LabeledSummary};
use crate::Observable;

#[derive(Debug, Parser)]
#[command(
    name = "nkcs-org",
    version,
    about = "Multi-unit organization simulator on correlated NKCS landscapes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one or more scenario files.
    Run {
        #[arg(required = true)]
        scenarios: Vec<PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
        /// Also write the per-period series of every run.
        #[arg(long)]
        per_period: bool,
    },
    /// Expand a grid file into scenarios and run each cell.
    Sweep {
        grid: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Effect tables and confidence intervals from a sweep's index.
    Stats {
        /// `index.csv` written by `sweep`, or the directory holding it.
        index: PathBuf,
        /// Row label of the comparison baseline; defaults to
        /// centralized-thorough-line with the matching conformity setting.
        #[arg(long)]
        default: Option<String>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// One-factor-at-a-time sweep.
    Ofat {
        plan: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Sobol first-order and total indices.
    Sobol {
        plan: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
}

/// Flags shared by the simulating commands. Each overrides the file value.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub runs: Option<usize>,
    /// Worker threads; defaults to all cores.
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub no_normalize: bool,
}

impl CommonArgs {
    pub fn with_out(out: impl Into<PathBuf>) -> Self {
        Self {
            out: out.into(),
            ..Default::default()
        }
    }

    fn apply(&self, cfg: &mut ScenarioConfig) {
        if let Some(seed) = self.seed {
            cfg.base_seed = seed;
        }
        if let Some(runs) = self.runs {
            cfg.runs = runs;
        }
        if self.no_normalize {
            cfg.normalize = false;
        }
    }
}

/// Everything a `run` invocation resolved, for reproducibility.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub scenario: ScenarioConfig,
    pub source: Option<PathBuf>,
    pub version: &'static str,
}

impl RunManifest {
    pub fn new(scenario: ScenarioConfig, source: Option<PathBuf>) -> Self {
        Self {
            scenario,
            source,
            version: env!("CARGO_PKG_VERSION"),
        }
    }

    pub fn digest(&self) -> String {
        serde_json::to_string(self).expect("manifest serializes")
    }
}

/// Parses a JSON file, attributing errors to the file.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::Config {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    serde_json::from_str(&text).map_err(|e| Error::Config {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn attribute(path: &Path, e: Error) -> Error {
    match e {
        Error::InvalidParameter { .. } | Error::StateSpaceTooLarge { .. } => Error::Config {
            path: path.to_path_buf(),
            message: e.to_string(),
        },
        other => other,
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn with_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match jobs {
        Some(0) => Err(crate::error::invalid("jobs", "must be >= 1")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| crate::error::invalid("jobs", e.to_string()))?
            .install(f),
        None => f(),
    }
}

fn write_result(result: &ScenarioResult, out: &Path, manifest: &str, per_period: bool) -> Result<PathBuf> {
    let id = result.scenario.id();
    let summary = out.join(format!("{id}.summary.csv"));
    result.write_summary_csv(create(&summary)?, manifest)?;
    if per_period {
        result.write_runs_csv(create(&out.join(format!("{id}.runs.csv")))?, manifest)?;
    }
    Ok(summary)
}

/// Runs every scenario file; returns the summary paths.
pub fn cmd_run(scenarios: &[PathBuf], common: &CommonArgs, per_period: bool) -> Result<Vec<PathBuf>> {
    if scenarios.is_empty() {
        return Err(Error::EmptyPlan("no scenario files given".into()));
    }
    let mut configs = Vec::with_capacity(scenarios.len());
    for path in scenarios {
        let mut cfg: ScenarioConfig = read_json(path)?;
        common.apply(&mut cfg);
        cfg.validate().map_err(|e| attribute(path, e))?;
        configs.push((path, cfg));
    }
    fs::create_dir_all(&common.out)?;
    with_pool(common.jobs, || {
        let mut written = Vec::new();
        for (path, cfg) in configs {
            let manifest = RunManifest::new(cfg.clone(), Some(path.clone())).digest();
            println!("{manifest}");
            let result = run_scenario(&cfg)?;
            written.push(write_result(&result, &common.out, &manifest, per_period)?);
        }
        Ok(written)
    })
}

/// Cross product of scenario axes around a base configuration. Omitted axes
/// take the base value; an explicitly empty axis is an error.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub base: ScenarioConfig,
    /// `(K, C, S)` triples.
    pub environments: Option<Vec<[usize; 3]>>,
    pub networks: Option<Vec<NetworkKind>>,
    pub modes: Option<Vec<CoordinationMode>>,
    pub searches: Option<Vec<SearchMode>>,
    pub conformity: Option<Vec<bool>>,
}

fn axis<T: Clone>(name: &str, values: &Option<Vec<T>>, base: T) -> Result<Vec<T>> {
    match values {
        None => Ok(vec![base]),
        Some(v) if v.is_empty() => Err(Error::EmptyPlan(format!("grid axis `{name}` is empty"))),
        Some(v) => Ok(v.clone()),
    }
}

impl GridSpec {
    /// The full design grid: two environments, four networks, three modes,
    /// two search modes.
    pub fn full(conformity: &[bool]) -> Self {
        Self {
            base: ScenarioConfig::default(),
            environments: Some(vec![[3, 0, 0], [2, 2, 2]]),
            networks: Some(NetworkKind::ALL.to_vec()),
            modes: Some(CoordinationMode::ALL.to_vec()),
            searches: Some(SearchMode::ALL.to_vec()),
            conformity: Some(conformity.to_vec()),
        }
    }

    pub fn expand(&self) -> Result<Vec<ScenarioConfig>> {
        let b = &self.base;
        let envs = axis("environments", &self.environments, [b.k, b.c, b.s])?;
        let networks = axis("networks", &self.networks, b.network)?;
        let modes = axis("modes", &self.modes, b.mode)?;
        let searches = axis("searches", &self.searches, b.search)?;
        let conformity = axis("conformity", &self.conformity, b.conformity)?;
        let mut out = Vec::new();
        for &conf in &conformity {
            for &[k, c, s] in &envs {
                for &mode in &modes {
                    for &search in &searches {
                        for &network in &networks {
                            let mut cfg = b
                                .clone()
                                .with_interdependence(k, c, s)
                                .with_mode(mode, search)
                                .with_network(network)
                                .with_conformity(conf);
                            cfg.name = None;
                            out.push(cfg);
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn digest(&self) -> String {
        serde_json::to_string(self).expect("grid serializes")
    }
}

pub const INDEX_HEADER: [&str; 17] = [
    "scenario_id",
    "row",
    "environment",
    "mode",
    "search",
    "network",
    "conformity",
    "K",
    "C",
    "S",
    "runs",
    "perf_long_mean",
    "sync_long_mean",
    "perf_short_mean",
    "sync_short_mean",
    "summary_file",
    "digest",
];

/// Runs every grid cell; writes one summary per cell plus `index.csv`.
pub fn cmd_sweep(grid_path: &Path, common: &CommonArgs) -> Result<PathBuf> {
    let grid: GridSpec = read_json(grid_path)?;
    run_grid(&grid, common, Some(grid_path))
}

/// [`cmd_sweep`] on an in-memory grid.
pub fn run_grid(grid: &GridSpec, common: &CommonArgs, source: Option<&Path>) -> Result<PathBuf> {
    let mut cells = grid.expand()?;
    for cfg in &mut cells {
        common.apply(cfg);
        let at = source.unwrap_or(Path::new("<grid>"));
        cfg.validate().map_err(|e| attribute(at, e))?;
    }
    fs::create_dir_all(&common.out)?;
    let mut g = grid.clone();
    common.apply(&mut g.base);
    let grid_digest = g.digest();
    println!("{grid_digest}");
    let index_path = common.out.join("index.csv");
    with_pool(common.jobs, || {
        let mut index = create(&index_path)?;
        write_comment(&mut index, &grid_digest)?;
        let mut w = csv::Writer::from_writer(index);
        w.write_record(INDEX_HEADER).map_err(csv_err)?;
        for cfg in cells {
            let manifest = RunManifest::new(cfg.clone(), source.map(Path::to_path_buf)).digest();
            let result = run_scenario(&cfg)?;
            let file = write_result(&result, &common.out, &manifest, false)?;
            let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
            let s = &result.summary;
            w.write_record([
                cfg.id(),
                cfg.row_label(),
                cfg.environment_label(),
                cfg.mode.to_string(),
                cfg.search.to_string(),
                cfg.network.to_string(),
                cfg.conformity.to_string(),
                cfg.k.to_string(),
                cfg.c.to_string(),
                cfg.s.to_string(),
                cfg.runs.to_string(),
                fmt_sig(mean(&s.perf_long)),
                fmt_sig(mean(&s.sync_long)),
                fmt_sig(mean(&s.perf_short)),
                fmt_sig(mean(&s.sync_short)),
                file.file_name().unwrap().to_string_lossy().into_owned(),
                cfg.digest(),
            ])
            .map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    })?;
    Ok(index_path)
}

#[derive(Debug, Deserialize)]
struct IndexRow {
    row: String,
    environment: String,
    conformity: bool,
    summary_file: String,
}

/// Confidence level of the mean intervals written by `stats`.
pub const MEANS_LEVEL: f64 = 0.99;

/// Reads a sweep index and writes, per conformity setting, an effect table
/// (`effects_conf.csv` / `effects_noconf.csv`) plus `means.csv` with 99%
/// intervals for every cell and observable. Returns the files written.
pub fn cmd_stats(index: &Path, default: Option<&str>, out: &Path) -> Result<Vec<PathBuf>> {
    let index_file = if index.is_dir() {
        index.join("index.csv")
    } else {
        index.to_path_buf()
    };
    let dir = index_file.parent().unwrap_or(Path::new(".")).to_path_buf();
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(&index_file)
        .map_err(csv_err)?;
    let mut groups: Vec<(bool, Vec<LabeledSummary>)> = Vec::new();
    for row in rdr.deserialize::<IndexRow>() {
        let row = row.map_err(csv_err)?;
        let summary = read_summary_csv(File::open(dir.join(&row.summary_file))?)?;
        let entry = LabeledSummary {
            row: row.row,
            environment: row.environment,
            summary,
        };
        match groups.iter_mut().find(|(c, _)| *c == row.conformity) {
            Some((_, v)) => v.push(entry),
            None => groups.push((row.conformity, vec![entry])),
        }
    }
    if groups.is_empty() {
        return Err(Error::EmptyPlan(format!("{} lists no scenarios", index_file.display())));
    }
    fs::create_dir_all(out)?;
    let manifest = format!("stats of {}", index_file.display());
    println!("{manifest}");
    let mut written = Vec::new();
    for (conf, entries) in &groups {
        let tag = if *conf { "conf" } else { "noconf" };
        let default_row = match default {
            Some(d) => d.to_string(),
            None => format!("centralized-thorough-line-{tag}"),
        };
        let table = GridEffectTable::build(entries, &default_row)?;
        let path = out.join(format!("effects_{tag}.csv"));
        table.write_csv(create(&path)?, &format!("{manifest}; default={default_row}"))?;
        written.push(path);
    }

    let path = out.join("means.csv");
    let mut f = create(&path)?;
    write_comment(&mut f, &manifest)?;
    let mut w = csv::Writer::from_writer(f);
    w.write_record(["row", "environment", "observable", "mean", "lo", "hi"])
        .map_err(csv_err)?;
    for (_, entries) in &groups {
        for e in entries {
            for obs in Observable::ALL {
                let ci = mean_ci(e.summary.observable(obs), MEANS_LEVEL)?;
                w.write_record([
                    e.row.clone(),
                    e.environment.clone(),
                    obs.as_str().to_string(),
                    fmt_sig(ci.mean),
                    fmt_sig(ci.lo),
                    fmt_sig(ci.hi),
                ])
                .map_err(csv_err)?;
            }
        }
    }
    w.flush()?;
    written.push(path);
    Ok(written)
}

/// Runs an OFAT plan; writes `ofat_<param>.csv`.
pub fn cmd_ofat(plan_path: &Path, common: &CommonArgs) -> Result<PathBuf> {
    let plan: OfatPlan = read_json(plan_path)?;
    let plan = plan.map_scenarios(|c| common.apply(c)).resolved();
    plan.cells().map_err(|e| attribute(plan_path, e))?;
    fs::create_dir_all(&common.out)?;
    let manifest = plan.digest();
    println!("{manifest}");
    let rows = with_pool(common.jobs, || ofat_sweep(&plan))?;
    let path = common.out.join(format!("ofat_{}.csv", plan.parameter));
    write_ofat_csv(&rows, create(&path)?, &manifest)?;
    Ok(path)
}

/// Runs a Sobol plan; writes `sobol.csv`.
pub fn cmd_sobol(plan_path: &Path, common: &CommonArgs) -> Result<PathBuf> {
    let mut plan: SobolPlan = read_json(plan_path)?;
    if let Some(seed) = common.seed {
        plan.seed = seed;
    }
    if let Some(runs) = common.runs {
        plan.inner_runs = runs;
    }
    if common.no_normalize {
        plan.base.normalize = false;
    }
    fs::create_dir_all(&common.out)?;
    let manifest = plan.digest();
    println!("{manifest}");
    let rows = with_pool(common.jobs, || sobol_indices(&plan)).map_err(|e| attribute(plan_path, e))?;
    let path = common.out.join("sobol.csv");
    write_sobol_csv(&rows, create(&path)?, &manifest)?;
    Ok(path)
}

/// Dispatches a parsed command line.
pub fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            scenarios,
            common,
            per_period,
        } => cmd_run(&scenarios, &common, per_period).map(drop),
        Command::Sweep { grid, common } => cmd_sweep(&grid, &common).map(drop),
        Command::Stats { index, default, out } => cmd_stats(&index, default.as_deref(), &out).map(drop),
        Command::Ofat { plan, common } => cmd_ofat(&plan, &common).map(drop),
        Command::Sobol { plan, common } => cmd_sobol(&plan, &common).map(drop),
    }
}
