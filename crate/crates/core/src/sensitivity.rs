//! One-factor-at-a-time sweeps and variance-based (Sobol) sensitivity indices.
//!
//! Sobol indices use the Saltelli `A`, `B`, `AB_i` design over a scrambled
//! Sobol sequence and the Jansen estimators
//!
//! ```text
//! S_i  = (V - 1/(2n) sum_j (f(B_j) - f(AB_i,j))^2) / V
//! ST_i =      1/(2n) sum_j (f(A_j) - f(AB_i,j))^2  / V
//! ```
//!
//! where `V` is the variance of the pooled `f(A)` and `f(B)` outputs.
//! Confidence intervals are bootstrap percentiles over the `n` base rows.
//!
//! On the simulator, each Sobol point averages `inner_runs` replications
//! that share the plan's base seed, so replication noise is a fixed part of
//! the model rather than fresh noise at every point.

use std::io::Write;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coordination::{CoordinationMode, SearchMode};
use crate::engine::{csv_err, run_scenario, run_scenario_serial, ScenarioConfig};
use crate::error::{invalid, Error, Result};
use crate::organization::NetworkKind;
use crate::report::{fmt_sig, write_comment};
use crate::rng::seeded;
use crate::stats::{mean_ci, MeanCi};

/// Confidence level of OFAT intervals.
pub const OFAT_LEVEL: f64 = 0.99;

/// Parameters that an OFAT sweep can vary.
pub const OFAT_PARAMETERS: [&str; 8] = ["P", "N", "rho", "T_M", "w_phi", "w_kappa", "g_perf", "g_sync"];

/// Sets one named parameter. `w_phi` and `w_kappa` keep the weights summing to one.
pub fn apply_parameter(cfg: &mut ScenarioConfig, name: &str, value: f64) -> Result<()> {
    let as_count = |field: &'static str| -> Result<usize> {
        if value < 0.0 || value.fract() != 0.0 {
            return Err(invalid(field, format!("must be a non-negative integer, got {value}")));
        }
        Ok(value as usize)
    };
    match name {
        "P" => cfg.agents = as_count("P")?,
        "N" => cfg.tasks = as_count("N")?,
        "T_M" => cfg.memory_span = as_count("T_M")?,
        "rho" => cfg.rho = value,
        "w_phi" => {
            cfg.w_phi = value;
            cfg.w_kappa = 1.0 - value;
        }
        "w_kappa" => {
            cfg.w_kappa = value;
            cfg.w_phi = 1.0 - value;
        }
        "g_perf" => cfg.g_perf = value,
        "g_sync" => cfg.g_sync = value,
        other => return Err(Error::UnknownParameter(other.to_string())),
    }
    Ok(())
}

/// A lockstep sweep of one parameter over a decentralized / centralized pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OfatPlan {
    #[serde(default = "default_decentralized")]
    pub decentralized: ScenarioConfig,
    #[serde(default = "default_centralized")]
    pub centralized: ScenarioConfig,
    pub parameter: String,
    pub values: Vec<f64>,
}

fn default_decentralized() -> ScenarioConfig {
    ScenarioConfig::default()
        .with_mode(CoordinationMode::Decentralized, SearchMode::Cursory)
        .with_network(NetworkKind::Cycle)
        .with_conformity(true)
}

fn default_centralized() -> ScenarioConfig {
    ScenarioConfig::default().with_mode(CoordinationMode::Centralized, SearchMode::Thorough)
}

impl OfatPlan {
    /// The default pair: decentralized cursory search over a Cycle network
    /// with conformity, against centralized thorough search.
    pub fn new(parameter: impl Into<String>, values: Vec<f64>) -> Self {
        Self {
            decentralized: default_decentralized(),
            centralized: default_centralized(),
            parameter: parameter.into(),
            values,
        }
    }

    /// Builds the pair from a shared base configuration.
    pub fn from_base(base: &ScenarioConfig, parameter: impl Into<String>, values: Vec<f64>) -> Self {
        Self {
            decentralized: base
                .clone()
                .with_mode(CoordinationMode::Decentralized, SearchMode::Cursory)
                .with_network(NetworkKind::Cycle)
                .with_conformity(true),
            centralized: base
                .clone()
                .with_mode(CoordinationMode::Centralized, SearchMode::Thorough),
            parameter: parameter.into(),
            values,
        }
    }

    /// Applies `f` to both scenarios.
    pub fn map_scenarios(mut self, f: impl Fn(&mut ScenarioConfig)) -> Self {
        f(&mut self.decentralized);
        f(&mut self.centralized);
        self
    }

    /// Scenario variants of every sweep point, as `(value, label, config)`.
    /// Sweeping `P` beyond 5 switches normalization off for every point.
    pub fn cells(&self) -> Result<Vec<(f64, &'static str, ScenarioConfig)>> {
        if self.values.is_empty() {
            return Err(Error::EmptyPlan("OFAT plan lists no values".into()));
        }
        if !OFAT_PARAMETERS.contains(&self.parameter.as_str()) {
            return Err(Error::UnknownParameter(self.parameter.clone()));
        }
        let unnormalized = self.requires_raw_performance();
        let mut out = Vec::with_capacity(self.values.len() * 2);
        for &v in &self.values {
            for (label, base) in [
                ("decentralized", &self.decentralized),
                ("centralized", &self.centralized),
            ] {
                let mut cfg = base.clone();
                apply_parameter(&mut cfg, &self.parameter, v)?;
                if unnormalized {
                    cfg.normalize = false;
                }
                cfg.validate()?;
                out.push((v, label, cfg));
            }
        }
        Ok(out)
    }

    /// True when the sweep reaches organizations too large for exhaustive
    /// global maxima, so every point reports raw performance.
    pub fn requires_raw_performance(&self) -> bool {
        self.parameter == "P" && self.values.iter().any(|&v| v > 5.0)
    }

    /// The plan as actually executed, with normalization resolved.
    pub fn resolved(mut self) -> Self {
        if self.requires_raw_performance() {
            self.decentralized.normalize = false;
            self.centralized.normalize = false;
        }
        self
    }

    pub fn digest(&self) -> String {
        serde_json::to_string(self).expect("plan serializes")
    }
}

/// One point of an OFAT sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct OfatRow {
    pub parameter: String,
    pub value: f64,
    pub scenario: String,
    pub perf: MeanCi,
    pub sync: MeanCi,
}

/// Runs both scenarios at every value; intervals are 99% normal CIs of the
/// long-run means.
pub fn ofat_sweep(plan: &OfatPlan) -> Result<Vec<OfatRow>> {
    plan.cells()?
        .into_iter()
        .map(|(value, label, cfg)| {
            let result = run_scenario(&cfg)?;
            Ok(OfatRow {
                parameter: plan.parameter.clone(),
                value,
                scenario: label.to_string(),
                perf: mean_ci(&result.summary.perf_long, OFAT_LEVEL)?,
                sync: mean_ci(&result.summary.sync_long, OFAT_LEVEL)?,
            })
        })
        .collect()
}

pub const OFAT_HEADER: [&str; 9] = [
    "param",
    "value",
    "scenario",
    "perf_mean",
    "perf_lo",
    "perf_hi",
    "sync_mean",
    "sync_lo",
    "sync_hi",
];

pub fn write_ofat_csv<W: Write>(rows: &[OfatRow], mut out: W, manifest: &str) -> Result<()> {
    write_comment(&mut out, manifest)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(OFAT_HEADER).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.parameter.clone(),
            r.value.to_string(),
            r.scenario.clone(),
            fmt_sig(r.perf.mean),
            fmt_sig(r.perf.lo),
            fmt_sig(r.perf.hi),
            fmt_sig(r.sync.mean),
            fmt_sig(r.sync.lo),
            fmt_sig(r.sync.hi),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Parameters of the global sensitivity analysis and their unit-cube mapping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SobolParameter {
    /// `rho` in `[0, 1]`.
    Rho,
    /// `T_M` in `1..=100`.
    MemorySpan,
    /// `w_kappa` in `[0, 1]`, with `w_phi = 1 - w_kappa`.
    WKappa,
    /// `g_perf` in `[0, 1]`.
    GPerf,
    /// `g_sync` in `[0, 1]`.
    GSync,
    /// Three coordination modes.
    Mode,
    /// Four networks.
    Network,
    /// `(3,0,0)` or `(2,2,2)`.
    Interdependence,
    /// Cursory or thorough.
    Search,
}

impl SobolParameter {
    pub const ALL: [SobolParameter; 9] = [
        Self::Rho,
        Self::MemorySpan,
        Self::WKappa,
        Self::GPerf,
        Self::GSync,
        Self::Mode,
        Self::Network,
        Self::Interdependence,
        Self::Search,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Rho => "rho",
            Self::MemorySpan => "T_M",
            Self::WKappa => "w_kappa",
            Self::GPerf => "g_perf",
            Self::GSync => "g_sync",
            Self::Mode => "mode",
            Self::Network => "network",
            Self::Interdependence => "interdependence",
            Self::Search => "search",
        }
    }

    /// Writes the parameter value at unit coordinate `u` into `cfg`.
    pub fn apply(self, cfg: &mut ScenarioConfig, u: f64) {
        let level = |count: usize| ((u * count as f64) as usize).min(count - 1);
        match self {
            Self::Rho => cfg.rho = u,
            Self::MemorySpan => cfg.memory_span = 1 + level(100),
            Self::WKappa => {
                cfg.w_kappa = u;
                cfg.w_phi = 1.0 - u;
            }
            Self::GPerf => cfg.g_perf = u,
            Self::GSync => cfg.g_sync = u,
            Self::Mode => cfg.mode = CoordinationMode::ALL[level(3)],
            Self::Network => cfg.network = NetworkKind::ALL[level(4)],
            Self::Interdependence => {
                let (k, c, s) = [(3, 0, 0), (2, 2, 2)][level(2)];
                cfg.k = k;
                cfg.c = c;
                cfg.s = s;
            }
            Self::Search => cfg.search = SearchMode::ALL[level(2)],
        }
    }
}

/// What a Sobol plan evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SobolModel {
    /// Long-run mean performance and synchrony of the simulator.
    #[default]
    Simulator,
    /// Output equals the first parameter's unit coordinate.
    Identity,
    /// Sum of the unit coordinates.
    Additive,
    /// Ishigami function (a = 7, b = 0.1) over `[-pi, pi]^3`.
    Ishigami,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SobolPlan {
    pub model: SobolModel,
    pub parameters: Vec<SobolParameter>,
    /// Base sample size; a power of two, at least 64.
    pub n: usize,
    /// Replications averaged per simulator evaluation.
    pub inner_runs: usize,
    pub bootstrap: usize,
    pub confidence: f64,
    pub seed: u64,
    /// Fixed values for every parameter not being varied.
    pub base: ScenarioConfig,
}

impl Default for SobolPlan {
    fn default() -> Self {
        Self {
            model: SobolModel::Simulator,
            parameters: SobolParameter::ALL.to_vec(),
            n: 256,
            inner_runs: 10,
            bootstrap: 200,
            confidence: 0.95,
            seed: 0,
            base: ScenarioConfig::default(),
        }
    }
}

impl SobolPlan {
    pub fn analytic(model: SobolModel, dims: usize, n: usize) -> Self {
        Self {
            model,
            parameters: SobolParameter::ALL[..dims].to_vec(),
            n,
            ..Default::default()
        }
    }

    /// Names of the inputs, in column order.
    pub fn input_names(&self) -> Vec<String> {
        match self.model {
            SobolModel::Simulator | SobolModel::Identity => {
                self.parameters.iter().map(|p| p.name().to_string()).collect()
            }
            SobolModel::Additive | SobolModel::Ishigami => (1..=self.dims()).map(|i| format!("x{i}")).collect(),
        }
    }

    pub fn dims(&self) -> usize {
        match self.model {
            SobolModel::Ishigami => 3,
            _ => self.parameters.len(),
        }
    }

    pub fn output_names(&self) -> Vec<&'static str> {
        match self.model {
            SobolModel::Simulator => vec!["performance", "synchrony"],
            _ => vec!["y"],
        }
    }

    /// Total model evaluations, `n (d + 2)`.
    pub fn evaluations(&self) -> usize {
        self.n * (self.dims() + 2)
    }

    pub fn digest(&self) -> String {
        serde_json::to_string(self).expect("plan serializes")
    }

    fn validate(&self) -> Result<()> {
        if self.dims() == 0 {
            return Err(Error::EmptyPlan("Sobol plan lists no parameters".into()));
        }
        if self.n < 64 || !self.n.is_power_of_two() {
            return Err(invalid("n", format!("must be a power of two >= 64, got {}", self.n)));
        }
        if self.n > 1 << 16 {
            return Err(invalid("n", "must not exceed 65536"));
        }
        if self.model == SobolModel::Simulator && self.inner_runs == 0 {
            return Err(invalid("inner_runs", "must be >= 1"));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(invalid("confidence", "must be in (0, 1)"));
        }
        Ok(())
    }

    /// Scenario at unit-cube point `x`.
    pub fn scenario_at(&self, x: &[f64]) -> ScenarioConfig {
        let mut cfg = self.base.clone();
        cfg.runs = self.inner_runs;
        cfg.base_seed = self.seed;
        cfg.name = None;
        for (p, &u) in self.parameters.iter().zip(x) {
            p.apply(&mut cfg, u);
        }
        cfg
    }

    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(match self.model {
            SobolModel::Simulator => {
                let r = run_scenario_serial(&self.scenario_at(x))?;
                let n = r.summary.len() as f64;
                vec![
                    r.summary.perf_long.iter().sum::<f64>() / n,
                    r.summary.sync_long.iter().sum::<f64>() / n,
                ]
            }
            SobolModel::Identity => vec![x[0]],
            SobolModel::Additive => vec![x.iter().sum()],
            SobolModel::Ishigami => {
                let t: Vec<f64> = x.iter().map(|u| std::f64::consts::PI * (2.0 * u - 1.0)).collect();
                vec![t[0].sin() + 7.0 * t[1].sin().powi(2) + 0.1 * t[2].powi(4) * t[0].sin()]
            }
        })
    }
}

/// First-order and total index of one input on one output.
#[derive(Debug, Clone, PartialEq)]
pub struct SobolIndex {
    pub parameter: String,
    pub output: String,
    pub s: f64,
    pub s_lo: f64,
    pub s_hi: f64,
    pub st: f64,
    pub st_lo: f64,
    pub st_hi: f64,
}

/// Jansen estimates over the rows in `rows`; returns `(S, ST)` per input.
fn jansen(fa: &[f64], fb: &[f64], fab: &[Vec<f64>], rows: &[usize]) -> Vec<(f64, f64)> {
    let n = rows.len() as f64;
    let pooled_mean = rows.iter().map(|&j| fa[j] + fb[j]).sum::<f64>() / (2.0 * n);
    let var = rows
        .iter()
        .map(|&j| (fa[j] - pooled_mean).powi(2) + (fb[j] - pooled_mean).powi(2))
        .sum::<f64>()
        / (2.0 * n);
    fab.iter()
        .map(|col| {
            if var <= 0.0 {
                return (0.0, 0.0);
            }
            let first = rows.iter().map(|&j| (fb[j] - col[j]).powi(2)).sum::<f64>() / (2.0 * n);
            let total = rows.iter().map(|&j| (fa[j] - col[j]).powi(2)).sum::<f64>() / (2.0 * n);
            ((var - first) / var, total / var)
        })
        .collect()
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Saltelli design points: rows of `A`, rows of `B`, then `AB_i` for each `i`.
pub fn saltelli_points(dims: usize, n: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let scramble = (seed ^ (seed >> 32)) as u32;
    let point = |j: usize, offset: usize| -> Vec<f64> {
        (0..dims)
            .map(|k| sobol_burley::sample(j as u32, (offset + k) as u32, scramble) as f64)
            .collect()
    };
    let a = (0..n).map(|j| point(j, 0)).collect();
    let b = (0..n).map(|j| point(j, dims)).collect();
    (a, b)
}

/// Estimates first-order and total Sobol indices for every input and output.
pub fn sobol_indices(plan: &SobolPlan) -> Result<Vec<SobolIndex>> {
    plan.validate()?;
    let d = plan.dims();
    let n = plan.n;
    let (a, b) = saltelli_points(d, n, plan.seed);
    let mut points: Vec<Vec<f64>> = Vec::with_capacity(plan.evaluations());
    points.extend(a.iter().cloned());
    points.extend(b.iter().cloned());
    for i in 0..d {
        for j in 0..n {
            let mut x = a[j].clone();
            x[i] = b[j][i];
            points.push(x);
        }
    }
    let outputs = points
        .par_iter()
        .map(|x| plan.evaluate(x))
        .collect::<Result<Vec<_>>>()?;

    let inputs = plan.input_names();
    let mut result = Vec::new();
    let alpha = (1.0 - plan.confidence) / 2.0;
    for (o, out_name) in plan.output_names().into_iter().enumerate() {
        let col = |start: usize| -> Vec<f64> { outputs[start..start + n].iter().map(|y| y[o]).collect() };
        let fa = col(0);
        let fb = col(n);
        let fab: Vec<Vec<f64>> = (0..d).map(|i| col((2 + i) * n)).collect();
        let all: Vec<usize> = (0..n).collect();
        let point = jansen(&fa, &fb, &fab, &all);

        let mut rng = seeded(plan.seed ^ 0x5eed_b007 ^ o as u64);
        let mut boots: Vec<Vec<(f64, f64)>> = Vec::with_capacity(plan.bootstrap);
        for _ in 0..plan.bootstrap {
            let rows: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
            boots.push(jansen(&fa, &fb, &fab, &rows));
        }
        for (i, name) in inputs.iter().enumerate() {
            let (s, st) = point[i];
            let (s_lo, s_hi, st_lo, st_hi) = if boots.is_empty() {
                (s, s, st, st)
            } else {
                let mut ss: Vec<f64> = boots.iter().map(|v| v[i].0).collect();
                let mut ts: Vec<f64> = boots.iter().map(|v| v[i].1).collect();
                ss.sort_by(f64::total_cmp);
                ts.sort_by(f64::total_cmp);
                (
                    percentile(&ss, alpha),
                    percentile(&ss, 1.0 - alpha),
                    percentile(&ts, alpha),
                    percentile(&ts, 1.0 - alpha),
                )
            };
            result.push(SobolIndex {
                parameter: name.clone(),
                output: out_name.to_string(),
                s,
                s_lo,
                s_hi,
                st,
                st_lo,
                st_hi,
            });
        }
    }
    Ok(result)
}

pub const SOBOL_HEADER: [&str; 8] = ["param", "output", "S", "S_lo", "S_hi", "ST", "ST_lo", "ST_hi"];

pub fn write_sobol_csv<W: Write>(rows: &[SobolIndex], mut out: W, manifest: &str) -> Result<()> {
    write_comment(&mut out, manifest)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SOBOL_HEADER).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.parameter.clone(),
            r.output.clone(),
            fmt_sig(r.s),
            fmt_sig(r.s_lo),
            fmt_sig(r.s_hi),
            fmt_sig(r.st),
            fmt_sig(r.st_lo),
            fmt_sig(r.st_hi),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_and_empty_plans() {
        let p = OfatPlan::new("nope", vec![1.0]);
        assert!(matches!(p.cells(), Err(Error::UnknownParameter(_))));
        let p = OfatPlan::new("rho", vec![]);
        assert!(matches!(p.cells(), Err(Error::EmptyPlan(_))));
        let p = OfatPlan::new("rho", vec![1.5]);
        assert!(p.cells().unwrap_err().to_string().contains("`rho`"));
    }

    #[test]
    fn p_sweep_disables_normalization() {
        let p = OfatPlan::new("P", vec![5.0, 10.0]);
        let cells = p.cells().unwrap();
        assert_eq!(cells.len(), 4);
        assert!(cells.iter().all(|c| !c.2.normalize));
        assert_eq!(cells[2].2.agents, 10);
        let q = OfatPlan::new("rho", vec![0.5]);
        assert!(q.cells().unwrap().iter().all(|c| c.2.normalize));
    }

    #[test]
    fn weights_stay_complementary() {
        let mut cfg = ScenarioConfig::default();
        apply_parameter(&mut cfg, "w_phi", 0.25).unwrap();
        assert_eq!((cfg.w_phi, cfg.w_kappa), (0.25, 0.75));
        assert!(apply_parameter(&mut cfg, "P", 2.5).is_err());
    }

    #[test]
    fn sample_size_rules() {
        let mut plan = SobolPlan::analytic(SobolModel::Additive, 3, 32);
        assert!(sobol_indices(&plan).is_err());
        plan.n = 96;
        assert!(sobol_indices(&plan).is_err());
        plan.n = 64;
        plan.parameters.clear();
        assert!(matches!(sobol_indices(&plan), Err(Error::EmptyPlan(_))));
    }

    #[test]
    fn evaluation_count() {
        let plan = SobolPlan::analytic(SobolModel::Additive, 4, 64);
        assert_eq!(plan.evaluations(), 64 * 6);
    }

    #[test]
    fn categorical_binning() {
        let mut cfg = ScenarioConfig::default();
        SobolParameter::Mode.apply(&mut cfg, 0.999);
        assert_eq!(cfg.mode, CoordinationMode::Centralized);
        SobolParameter::Mode.apply(&mut cfg, 0.0);
        assert_eq!(cfg.mode, CoordinationMode::Decentralized);
        SobolParameter::Network.apply(&mut cfg, 0.5);
        assert_eq!(cfg.network, NetworkKind::Star);
        SobolParameter::MemorySpan.apply(&mut cfg, 1.0);
        assert_eq!(cfg.memory_span, 100);
        SobolParameter::MemorySpan.apply(&mut cfg, 0.0);
        assert_eq!(cfg.memory_span, 1);
    }
}
