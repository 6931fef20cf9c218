//! Scenario execution: per-period schedule, replications, seeding and recording.
//!
//! Each period runs, in order: sharing and forgetting, the coordination
//! decision, simultaneous application, and recording of organizational
//! performance and synchrony.

use std::collections::HashMap;
use std::io::Write;
use std::sync::{Mutex, OnceLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coordination::{coordinate, CoordinationMode, CoordinationSpec, GoalSpec, SearchMode};
use crate::error::{invalid, Error, Result};
use crate::landscape::{CouplingSpec, JointConfiguration, LandscapeSet, MAX_JOINT_BITS, MAX_TASKS};
use crate::organization::{share_and_receive, synchrony_unchecked, AgentState, NetworkKind, NetworkTopology};
use crate::report::{fmt_sig, write_comment};
use crate::rng::{stream_rng, SimRng, Stream};

/// Every parameter of one experiment cell. The defaults are the reference
/// scenario: centralized thorough search over a Line network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Optional display name; does not affect results.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(rename = "P")]
    pub agents: usize,
    #[serde(rename = "N")]
    pub tasks: usize,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "C")]
    pub c: usize,
    #[serde(rename = "S")]
    pub s: usize,
    pub rho: f64,
    #[serde(rename = "T_M")]
    pub memory_span: usize,
    pub w_phi: f64,
    pub w_kappa: f64,
    pub g_perf: f64,
    pub g_sync: f64,
    pub network: NetworkKind,
    pub mode: CoordinationMode,
    pub search: SearchMode,
    #[serde(rename = "T")]
    pub periods: usize,
    #[serde(rename = "R")]
    pub runs: usize,
    pub base_seed: u64,
    pub normalize: bool,
    pub conformity: bool,
    /// Length of the short-run window.
    pub short_run: usize,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            name: None,
            agents: 5,
            tasks: 4,
            k: 3,
            c: 0,
            s: 0,
            rho: 0.9,
            memory_span: 50,
            w_phi: 0.5,
            w_kappa: 0.5,
            g_perf: 1.0,
            g_sync: 1.0,
            network: NetworkKind::Line,
            mode: CoordinationMode::Centralized,
            search: SearchMode::Thorough,
            periods: 500,
            runs: 1000,
            base_seed: 0,
            normalize: true,
            conformity: true,
            short_run: 100,
        }
    }
}

impl ScenarioConfig {
    pub fn with_mode(mut self, mode: CoordinationMode, search: SearchMode) -> Self {
        self.mode = mode;
        self.search = search;
        self
    }

    pub fn with_network(mut self, network: NetworkKind) -> Self {
        self.network = network;
        self
    }

    pub fn with_interdependence(mut self, k: usize, c: usize, s: usize) -> Self {
        self.k = k;
        self.c = c;
        self.s = s;
        self
    }

    pub fn with_conformity(mut self, on: bool) -> Self {
        self.conformity = on;
        self
    }

    pub fn with_runs(mut self, runs: usize) -> Self {
        self.runs = runs;
        self
    }

    pub fn coordination(&self) -> CoordinationSpec {
        CoordinationSpec::new(self.mode, self.search)
    }

    pub fn goals(&self) -> GoalSpec {
        GoalSpec {
            g_perf: self.g_perf,
            g_sync: self.g_sync,
        }
    }

    /// Conformity weight actually used in the utility.
    pub fn effective_w_kappa(&self) -> f64 {
        if self.conformity {
            self.w_kappa
        } else {
            0.0
        }
    }

    /// Label of the interdependence structure, e.g. `k3c0s0`.
    pub fn environment_label(&self) -> String {
        format!("k{}c{}s{}", self.k, self.c, self.s)
    }

    /// Label of the coordination design, without the environment.
    pub fn row_label(&self) -> String {
        format!(
            "{}-{}-{}-{}",
            self.mode,
            self.search,
            self.network,
            if self.conformity { "conf" } else { "noconf" }
        )
    }

    /// Identifier used in CSV output; the name when given.
    pub fn id(&self) -> String {
        match &self.name {
            Some(n) => n.clone(),
            None => format!("{}-{}", self.row_label(), self.environment_label()),
        }
    }

    /// Canonical one-line JSON of every parameter.
    pub fn digest(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    /// Checks every bound, naming the offending field.
    pub fn validate(&self) -> Result<()> {
        if self.agents < 2 {
            return Err(invalid("P", format!("must be >= 2, got {}", self.agents)));
        }
        if self.tasks == 0 || self.tasks > MAX_TASKS {
            return Err(invalid("N", format!("must be in 1..={MAX_TASKS}, got {}", self.tasks)));
        }
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(invalid("rho", format!("must be in [0, 1], got {}", self.rho)));
        }
        for (name, w) in [("w_phi", self.w_phi), ("w_kappa", self.w_kappa)] {
            if !(w.is_finite() && w >= 0.0) {
                return Err(invalid(name, format!("must be a non-negative number, got {w}")));
            }
        }
        for (name, g) in [("g_perf", self.g_perf), ("g_sync", self.g_sync)] {
            if !g.is_finite() {
                return Err(invalid(name, format!("must be finite, got {g}")));
            }
        }
        if self.memory_span == 0 {
            return Err(invalid("T_M", "must be >= 1"));
        }
        if self.periods == 0 {
            return Err(invalid("T", "must be >= 1"));
        }
        if self.runs == 0 {
            return Err(invalid("R", "must be >= 1"));
        }
        if self.short_run == 0 {
            return Err(invalid("short_run", "must be >= 1"));
        }
        let coupling = CouplingSpec::new(self.agents, self.tasks, self.k, self.c, self.s)?;
        let spec = self.coordination();
        if spec.alt > self.tasks {
            return Err(invalid(
                "N",
                format!(
                    "{} {} search screens {} alternatives; N = {} is too small",
                    self.mode, self.search, spec.alt, self.tasks
                ),
            ));
        }
        if self.normalize && coupling.is_coupled_across_agents() && self.agents * self.tasks > MAX_JOINT_BITS {
            return Err(Error::StateSpaceTooLarge {
                bits: self.agents * self.tasks,
                limit: MAX_JOINT_BITS,
            });
        }
        Ok(())
    }
}

/// Mutable state of one replication.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationState {
    pub cfg: JointConfiguration,
    pub agents: Vec<AgentState>,
}

/// Immutable per-replication context shared by every period.
#[derive(Debug, Clone)]
pub struct PeriodContext {
    pub network: NetworkTopology,
    pub coordination: CoordinationSpec,
    pub goals: GoalSpec,
    /// Multiplier on raw performance: `1 / global_max` or `1`.
    pub scale: f64,
}

impl PeriodContext {
    pub fn new(scenario: &ScenarioConfig, global_max: Option<f64>) -> Result<Self> {
        Ok(Self {
            network: NetworkTopology::new(scenario.network, scenario.agents)?,
            coordination: scenario.coordination(),
            goals: scenario.goals(),
            scale: global_max.map_or(1.0, |g| 1.0 / g),
        })
    }
}

impl SimulationState {
    pub fn new(scenario: &ScenarioConfig, cfg: JointConfiguration) -> Self {
        let agents = (0..scenario.agents)
            .map(|p| {
                AgentState::new(
                    p,
                    scenario.tasks,
                    scenario.w_phi,
                    scenario.effective_w_kappa(),
                    scenario.memory_span,
                )
            })
            .collect();
        Self { cfg, agents }
    }
}

/// Performance and synchrony recorded at the end of a period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub performance: f64,
    pub synchrony: f64,
}

/// Executes period `t` (1-based) in place.
pub fn run_period(
    state: &mut SimulationState,
    ls: &LandscapeSet,
    ctx: &PeriodContext,
    t: usize,
    rng: &mut SimRng,
) -> Result<Observation> {
    share_and_receive(&mut state.agents, &state.cfg, &ctx.network, t);
    state.cfg = coordinate(
        &state.agents,
        ls,
        &state.cfg,
        &ctx.coordination,
        ctx.goals,
        ctx.scale,
        rng,
    )?;
    Ok(Observation {
        performance: ls.org_performance(&state.cfg) * ctx.scale,
        synchrony: synchrony_unchecked(&state.cfg),
    })
}

/// Time series of one replication.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub run: usize,
    pub performance: Vec<f64>,
    pub synchrony: Vec<f64>,
    pub global_max: Option<f64>,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

impl RunRecord {
    pub fn perf_long(&self) -> f64 {
        mean(&self.performance)
    }

    pub fn sync_long(&self) -> f64 {
        mean(&self.synchrony)
    }

    pub fn perf_short(&self, window: usize) -> f64 {
        mean(&self.performance[..window.min(self.performance.len())])
    }

    pub fn sync_short(&self, window: usize) -> f64 {
        mean(&self.synchrony[..window.min(self.synchrony.len())])
    }
}

/// Generates the landscape of replication `run_index`.
pub fn replication_landscape(scenario: &ScenarioConfig, run_index: usize) -> Result<LandscapeSet> {
    let coupling = CouplingSpec::new(scenario.agents, scenario.tasks, scenario.k, scenario.c, scenario.s)?;
    let seed = crate::rng::derive_seed(scenario.base_seed, run_index as u64, Stream::Landscape);
    let mut rng = stream_rng(scenario.base_seed, run_index as u64, Stream::Landscape);
    LandscapeSet::generate(coupling, scenario.rho, seed, &mut rng)
}

/// Initial state of replication `run_index`.
pub fn initial_state(scenario: &ScenarioConfig, run_index: usize) -> SimulationState {
    let mut rng = stream_rng(scenario.base_seed, run_index as u64, Stream::Initial);
    let cfg = JointConfiguration::random(scenario.agents, scenario.tasks, &mut rng);
    SimulationState::new(scenario, cfg)
}

/// Runs one replication from its derived seeds.
pub fn run_replication(scenario: &ScenarioConfig, run_index: usize) -> Result<RunRecord> {
    let ls = replication_landscape(scenario, run_index)?;
    let global_max = if scenario.normalize {
        Some(cached_global_max(scenario, &ls)?)
    } else {
        None
    };
    run_replication_on(scenario, run_index, &ls, global_max)
}

type MaxKey = (u64, [usize; 5], u64);

/// Landscapes depend only on the environment and the replication seed, so
/// scenarios that differ in coordination or network share their maxima.
fn cached_global_max(scenario: &ScenarioConfig, ls: &LandscapeSet) -> Result<f64> {
    static CACHE: OnceLock<Mutex<HashMap<MaxKey, f64>>> = OnceLock::new();
    const CAPACITY: usize = 1 << 16;
    let key = (
        ls.seed(),
        [scenario.agents, scenario.tasks, scenario.k, scenario.c, scenario.s],
        scenario.rho.to_bits(),
    );
    let cache = CACHE.get_or_init(Default::default);
    if let Some(&v) = cache.lock().unwrap_or_else(|e| e.into_inner()).get(&key) {
        return Ok(v);
    }
    let (v, _) = ls.global_maximum()?;
    let mut map = cache.lock().unwrap_or_else(|e| e.into_inner());
    if map.len() >= CAPACITY {
        map.clear();
    }
    map.insert(key, v);
    Ok(v)
}

/// Runs one replication on a given landscape.
pub fn run_replication_on(
    scenario: &ScenarioConfig,
    run_index: usize,
    ls: &LandscapeSet,
    global_max: Option<f64>,
) -> Result<RunRecord> {
    let ctx = PeriodContext::new(scenario, global_max)?;
    let mut state = initial_state(scenario, run_index);
    let mut rng = stream_rng(scenario.base_seed, run_index as u64, Stream::Process);
    let mut performance = Vec::with_capacity(scenario.periods);
    let mut synchrony = Vec::with_capacity(scenario.periods);
    for t in 1..=scenario.periods {
        let obs = run_period(&mut state, ls, &ctx, t, &mut rng)?;
        performance.push(obs.performance);
        synchrony.push(obs.synchrony);
    }
    Ok(RunRecord {
        run: run_index,
        performance,
        synchrony,
        global_max,
    })
}

/// The four per-run summary vectors of a scenario.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Summary {
    pub perf_long: Vec<f64>,
    pub sync_long: Vec<f64>,
    pub perf_short: Vec<f64>,
    pub sync_short: Vec<f64>,
}

impl Summary {
    pub fn from_records(records: &[RunRecord], short_run: usize) -> Self {
        Self {
            perf_long: records.iter().map(RunRecord::perf_long).collect(),
            sync_long: records.iter().map(RunRecord::sync_long).collect(),
            perf_short: records.iter().map(|r| r.perf_short(short_run)).collect(),
            sync_short: records.iter().map(|r| r.sync_short(short_run)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.perf_long.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perf_long.is_empty()
    }

    /// Vector of one observable.
    pub fn observable(&self, obs: Observable) -> &[f64] {
        match obs {
            Observable::PerfLong => &self.perf_long,
            Observable::SyncLong => &self.sync_long,
            Observable::PerfShort => &self.perf_short,
            Observable::SyncShort => &self.sync_short,
        }
    }
}

/// The four summary observables, in table column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Observable {
    PerfLong,
    SyncLong,
    PerfShort,
    SyncShort,
}

impl Observable {
    pub const ALL: [Observable; 4] = [Self::PerfLong, Self::SyncLong, Self::PerfShort, Self::SyncShort];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::PerfLong => "perf_long",
            Self::SyncLong => "sync_long",
            Self::PerfShort => "perf_short",
            Self::SyncShort => "sync_short",
        }
    }
}

/// All replications of a scenario plus the summary vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioResult {
    pub scenario: ScenarioConfig,
    pub records: Vec<RunRecord>,
    pub summary: Summary,
}

/// Runs `R` replications in parallel on the current rayon pool.
pub fn run_scenario(scenario: &ScenarioConfig) -> Result<ScenarioResult> {
    scenario.validate()?;
    let records = (0..scenario.runs)
        .into_par_iter()
        .map(|r| run_replication(scenario, r))
        .collect::<Result<Vec<_>>>()?;
    Ok(finish(scenario, records))
}

/// Same as [`run_scenario`] on the calling thread.
pub fn run_scenario_serial(scenario: &ScenarioConfig) -> Result<ScenarioResult> {
    scenario.validate()?;
    let records = (0..scenario.runs)
        .map(|r| run_replication(scenario, r))
        .collect::<Result<Vec<_>>>()?;
    Ok(finish(scenario, records))
}

fn finish(scenario: &ScenarioConfig, records: Vec<RunRecord>) -> ScenarioResult {
    let summary = Summary::from_records(&records, scenario.short_run);
    ScenarioResult {
        scenario: scenario.clone(),
        records,
        summary,
    }
}

pub const RUNS_HEADER: [&str; 5] = ["scenario_id", "run", "t", "performance", "synchrony"];
pub const SUMMARY_HEADER: [&str; 6] = [
    "scenario_id",
    "run",
    "perf_long",
    "sync_long",
    "perf_short",
    "sync_short",
];

impl ScenarioResult {
    /// Per-period CSV, preceded by a `# manifest:` comment line.
    pub fn write_runs_csv<W: Write>(&self, mut out: W, manifest: &str) -> Result<()> {
        write_comment(&mut out, manifest)?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(RUNS_HEADER).map_err(csv_err)?;
        let id = self.scenario.id();
        for rec in &self.records {
            let run = rec.run.to_string();
            for (t, (p, s)) in rec.performance.iter().zip(&rec.synchrony).enumerate() {
                w.write_record([id.as_str(), &run, &(t + 1).to_string(), &fmt_sig(*p), &fmt_sig(*s)])
                    .map_err(csv_err)?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Per-run summary CSV, preceded by a `# manifest:` comment line.
    pub fn write_summary_csv<W: Write>(&self, mut out: W, manifest: &str) -> Result<()> {
        write_comment(&mut out, manifest)?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(SUMMARY_HEADER).map_err(csv_err)?;
        let id = self.scenario.id();
        let s = &self.summary;
        for (i, rec) in self.records.iter().enumerate() {
            w.write_record([
                id.clone(),
                rec.run.to_string(),
                fmt_sig(s.perf_long[i]),
                fmt_sig(s.sync_long[i]),
                fmt_sig(s.perf_short[i]),
                fmt_sig(s.sync_short[i]),
            ])
            .map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Reads a summary CSV written by [`ScenarioResult::write_summary_csv`].
pub fn read_summary_csv<R: std::io::Read>(input: R) -> Result<Summary> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    let headers = rdr.headers().map_err(csv_err)?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| invalid("summary", format!("missing column `{name}`")))
    };
    let idx = [
        col("perf_long")?,
        col("sync_long")?,
        col("perf_short")?,
        col("sync_short")?,
    ];
    let mut out = Summary::default();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        let mut vals = [0.0; 4];
        for (v, &i) in vals.iter_mut().zip(&idx) {
            let field = rec.get(i).unwrap_or("");
            *v = field
                .parse()
                .map_err(|_| invalid("summary", format!("not a number: `{field}`")))?;
        }
        out.perf_long.push(vals[0]);
        out.sync_long.push(vals[1]);
        out.perf_short.push(vals[2]);
        out.sync_short.push(vals[3]);
    }
    Ok(out)
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}
