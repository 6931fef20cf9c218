//! Correlated NKCS landscapes.
//!
//! Each of the `P` agents owns `N` binary tasks. The contribution of task
//! `(p, i)` depends on its own decision, on `K` other tasks of agent `p` and
//! on `C` tasks of each of `S` foreign agents. Contributions are uniform on
//! `[0, 1]`; corresponding entries of different agents' tables share a
//! Gaussian-copula correlation `rho`.
//!
//! Table entries are addressed by a bit pattern: bit 0 holds the task's own
//! decision and bit `j + 1` holds the decision of the `j`-th dependency.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use rand::Rng;
use rand_distr::StandardNormal;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{invalid, Error, Result};
use crate::rng::SimRng;

/// Largest joint state space (in bits) scanned exhaustively by [`LandscapeSet::global_maximum`].
pub const MAX_JOINT_BITS: usize = 24;

/// Largest number of tasks per agent; decision vectors are stored as `u32` words.
pub const MAX_TASKS: usize = 32;

/// Reference to one task of one agent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TaskRef {
    pub agent: usize,
    pub task: usize,
}

/// Interdependence structure `(P, N, K, C, S)` with its cyclic dependency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CouplingSpec {
    agents: usize,
    tasks: usize,
    k: usize,
    c: usize,
    s: usize,
    deps: Vec<Vec<TaskRef>>,
}

impl CouplingSpec {
    /// Builds the deterministic cyclic coupling pattern.
    ///
    /// Task `i` of agent `p` depends on its own tasks `i+1, .., i+K` and on
    /// tasks `i, .., i+C-1` of agents `p+1, .., p+S` (all indices cyclic).
    pub fn new(agents: usize, tasks: usize, k: usize, c: usize, s: usize) -> Result<Self> {
        if agents == 0 {
            return Err(invalid("P", "need at least one agent"));
        }
        if tasks == 0 || tasks > MAX_TASKS {
            return Err(invalid("N", format!("must be in 1..={MAX_TASKS}, got {tasks}")));
        }
        if k + 1 > tasks {
            return Err(invalid("K", format!("must be <= N-1 = {}, got {k}", tasks - 1)));
        }
        if s + 1 > agents {
            return Err(invalid("S", format!("must be <= P-1 = {}, got {s}", agents - 1)));
        }
        if c > tasks {
            return Err(invalid("C", format!("must be <= N = {tasks}, got {c}")));
        }
        let width = 1 + k + c * s;
        if width > 30 {
            return Err(invalid("K", format!("table width 1+K+C*S = {width} exceeds 30 bits")));
        }
        let mut deps = Vec::with_capacity(agents * tasks);
        for p in 0..agents {
            for i in 0..tasks {
                let mut list = Vec::with_capacity(k + c * s);
                for off in 1..=k {
                    list.push(TaskRef {
                        agent: p,
                        task: (i + off) % tasks,
                    });
                }
                for q in 1..=s {
                    for off in 0..c {
                        list.push(TaskRef {
                            agent: (p + q) % agents,
                            task: (i + off) % tasks,
                        });
                    }
                }
                deps.push(list);
            }
        }
        Ok(Self {
            agents,
            tasks,
            k,
            c,
            s,
            deps,
        })
    }

    pub fn agents(&self) -> usize {
        self.agents
    }

    pub fn tasks(&self) -> usize {
        self.tasks
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn c(&self) -> usize {
        self.c
    }

    pub fn s(&self) -> usize {
        self.s
    }

    /// Dependency list of task `(p, i)`, in table-bit order.
    pub fn dependencies(&self, p: usize, i: usize) -> &[TaskRef] {
        &self.deps[p * self.tasks + i]
    }

    /// Number of contribution entries per task, `2^(1+K+C*S)`.
    pub fn entries_per_task(&self) -> usize {
        1 << (1 + self.k + self.c * self.s)
    }

    /// Whether any task depends on another agent's decisions.
    pub fn is_coupled_across_agents(&self) -> bool {
        self.c > 0 && self.s > 0
    }
}

/// Contribution values of one agent, task-major then pattern-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FitnessTable {
    entries_per_task: usize,
    values: Vec<f64>,
}

impl FitnessTable {
    pub fn new(tasks: usize, entries_per_task: usize, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), tasks * entries_per_task);
        Self {
            entries_per_task,
            values,
        }
    }

    #[inline]
    pub fn get(&self, task: usize, pattern: usize) -> f64 {
        self.values[task * self.entries_per_task + pattern]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn entries_per_task(&self) -> usize {
        self.entries_per_task
    }
}

/// `P x N` binary decisions; agent `p`'s vector is a `u32` word with task `i` at bit `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct JointConfiguration {
    tasks: usize,
    words: Vec<u32>,
}

impl JointConfiguration {
    pub fn zeros(agents: usize, tasks: usize) -> Self {
        assert!(tasks <= MAX_TASKS);
        Self {
            tasks,
            words: vec![0; agents],
        }
    }

    pub fn from_words(tasks: usize, words: Vec<u32>) -> Self {
        assert!(tasks <= MAX_TASKS);
        let mask = task_mask(tasks);
        assert!(words.iter().all(|w| w & !mask == 0), "bits beyond N set");
        Self { tasks, words }
    }

    /// I.i.d. uniform bits.
    pub fn random(agents: usize, tasks: usize, rng: &mut SimRng) -> Self {
        let mask = task_mask(tasks);
        let words = (0..agents).map(|_| rng.random::<u32>() & mask).collect();
        Self { tasks, words }
    }

    /// Configuration whose bit `p*N + i` of `index` is decision `(p, i)`.
    pub fn from_index(agents: usize, tasks: usize, index: u64) -> Self {
        let mask = task_mask(tasks) as u64;
        let words = (0..agents).map(|p| ((index >> (p * tasks)) & mask) as u32).collect();
        Self { tasks, words }
    }

    /// Inverse of [`JointConfiguration::from_index`]; only meaningful for `P*N <= 64`.
    pub fn index(&self) -> u64 {
        self.words
            .iter()
            .enumerate()
            .fold(0u64, |acc, (p, &w)| acc | ((w as u64) << (p * self.tasks)))
    }

    pub fn agents(&self) -> usize {
        self.words.len()
    }

    pub fn tasks(&self) -> usize {
        self.tasks
    }

    #[inline]
    pub fn get(&self, p: usize, i: usize) -> bool {
        (self.words[p] >> i) & 1 == 1
    }

    pub fn set(&mut self, p: usize, i: usize, value: bool) {
        if value {
            self.words[p] |= 1 << i;
        } else {
            self.words[p] &= !(1 << i);
        }
    }

    pub fn flip(&mut self, p: usize, i: usize) {
        self.words[p] ^= 1 << i;
    }

    /// Decision vector of agent `p`.
    #[inline]
    pub fn agent(&self, p: usize) -> u32 {
        self.words[p]
    }

    pub fn set_agent(&mut self, p: usize, word: u32) {
        debug_assert_eq!(word & !task_mask(self.tasks), 0);
        self.words[p] = word;
    }

    pub fn words(&self) -> &[u32] {
        &self.words
    }
}

pub(crate) fn task_mask(tasks: usize) -> u32 {
    if tasks >= 32 {
        u32::MAX
    } else {
        (1u32 << tasks) - 1
    }
}

/// A family of `P` correlated fitness tables.
#[derive(Debug, Clone, PartialEq)]
pub struct LandscapeSet {
    coupling: CouplingSpec,
    tables: Vec<FitnessTable>,
    rho: f64,
    seed: u64,
    global_max: Option<f64>,
}

impl LandscapeSet {
    /// Draws a landscape family with a Gaussian copula.
    ///
    /// For every `(task, pattern)` one shared normal `z_c` and `P` private
    /// normals `z_p` are drawn in that order, and agent `p` receives
    /// `Phi(sqrt(rho) z_c + sqrt(1 - rho) z_p)`.
    pub fn generate(coupling: CouplingSpec, rho: f64, seed: u64, rng: &mut SimRng) -> Result<Self> {
        if !(0.0..=1.0).contains(&rho) {
            return Err(invalid("rho", format!("must be in [0, 1], got {rho}")));
        }
        let agents = coupling.agents();
        let tasks = coupling.tasks();
        let entries = coupling.entries_per_task();
        let phi = Normal::standard();
        let shared = rho.sqrt();
        let private = (1.0 - rho).sqrt();
        let mut values = vec![vec![0.0; tasks * entries]; agents];
        for slot in 0..tasks * entries {
            let zc: f64 = rng.sample(StandardNormal);
            for table in values.iter_mut() {
                let zp: f64 = rng.sample(StandardNormal);
                table[slot] = phi.cdf(shared * zc + private * zp);
            }
        }
        let tables = values
            .into_iter()
            .map(|v| FitnessTable::new(tasks, entries, v))
            .collect();
        Ok(Self {
            coupling,
            tables,
            rho,
            seed,
            global_max: None,
        })
    }

    /// Generates from a seed using a fresh landscape stream.
    pub fn from_seed(coupling: CouplingSpec, rho: f64, seed: u64) -> Result<Self> {
        let mut rng = crate::rng::seeded(seed);
        Self::generate(coupling, rho, seed, &mut rng)
    }

    /// Assembles a landscape from explicit tables.
    pub fn from_tables(coupling: CouplingSpec, tables: Vec<FitnessTable>, rho: f64, seed: u64) -> Result<Self> {
        if tables.len() != coupling.agents() {
            return Err(invalid("tables", "one table per agent required"));
        }
        let expected = coupling.tasks() * coupling.entries_per_task();
        for t in &tables {
            if t.values().len() != expected {
                return Err(invalid("tables", format!("expected {expected} entries per agent")));
            }
            if t.values().iter().any(|v| !(0.0..=1.0).contains(v)) {
                return Err(invalid("tables", "contribution outside [0, 1]"));
            }
        }
        Ok(Self {
            coupling,
            tables,
            rho,
            seed,
            global_max: None,
        })
    }

    pub fn coupling(&self) -> &CouplingSpec {
        &self.coupling
    }

    pub fn tables(&self) -> &[FitnessTable] {
        &self.tables
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn agents(&self) -> usize {
        self.coupling.agents()
    }

    pub fn tasks(&self) -> usize {
        self.coupling.tasks()
    }

    /// Cached normalization constant, if computed.
    pub fn cached_global_max(&self) -> Option<f64> {
        self.global_max
    }

    /// Table index of task `(p, i)` under `cfg`.
    #[inline]
    pub fn pattern(&self, cfg: &JointConfiguration, p: usize, i: usize) -> usize {
        let mut idx = cfg.get(p, i) as usize;
        for (j, d) in self.coupling.dependencies(p, i).iter().enumerate() {
            idx |= (cfg.get(d.agent, d.task) as usize) << (j + 1);
        }
        idx
    }

    /// Contribution of task `(p, i)`.
    #[inline]
    pub fn task_performance(&self, cfg: &JointConfiguration, p: usize, i: usize) -> f64 {
        self.tables[p].get(i, self.pattern(cfg, p, i))
    }

    /// Mean contribution over agent `p`'s tasks.
    pub fn unit_performance(&self, cfg: &JointConfiguration, p: usize) -> f64 {
        let n = self.tasks();
        (0..n).map(|i| self.task_performance(cfg, p, i)).sum::<f64>() / n as f64
    }

    /// Unit performance of agent `p` if its vector were `word` and everyone else kept `cfg`.
    pub fn unit_performance_with(&self, cfg: &mut JointConfiguration, p: usize, word: u32) -> f64 {
        let old = cfg.agent(p);
        cfg.set_agent(p, word);
        let v = self.unit_performance(cfg, p);
        cfg.set_agent(p, old);
        v
    }

    /// Mean of unit performances.
    pub fn org_performance(&self, cfg: &JointConfiguration) -> f64 {
        let agents = self.agents();
        (0..agents).map(|p| self.unit_performance(cfg, p)).sum::<f64>() / agents as f64
    }

    /// Global maximum of organizational performance and its argmax.
    ///
    /// Without cross-agent coupling the problem separates into per-agent
    /// scans of `2^N` states. Otherwise all `2^(N*P)` joint states are
    /// scanned in Gray-code order with incremental updates, refusing when
    /// `N*P` exceeds [`MAX_JOINT_BITS`]. Ties resolve to the configuration
    /// with the smallest [`JointConfiguration::index`].
    pub fn global_maximum(&self) -> Result<(f64, JointConfiguration)> {
        if self.coupling.is_coupled_across_agents() {
            self.joint_maximum()
        } else {
            Ok(self.separable_maximum())
        }
    }

    /// Computes and caches the global maximum.
    pub fn compute_global_max(&mut self) -> Result<f64> {
        if let Some(v) = self.global_max {
            return Ok(v);
        }
        let (v, _) = self.global_maximum()?;
        self.global_max = Some(v);
        Ok(v)
    }

    fn separable_maximum(&self) -> (f64, JointConfiguration) {
        let agents = self.agents();
        let tasks = self.tasks();
        let mut cfg = JointConfiguration::zeros(agents, tasks);
        let mut total = 0.0;
        for p in 0..agents {
            let mut best = f64::NEG_INFINITY;
            let mut best_word = 0;
            for word in 0..=task_mask(tasks) {
                cfg.set_agent(p, word);
                let v = self.unit_performance(&cfg, p);
                if v > best {
                    best = v;
                    best_word = word;
                }
            }
            cfg.set_agent(p, best_word);
            total += best;
        }
        (total / agents as f64, cfg)
    }

    /// Exhaustive scan over every joint configuration.
    pub fn joint_maximum(&self) -> Result<(f64, JointConfiguration)> {
        let agents = self.agents();
        let tasks = self.tasks();
        let bits = agents * tasks;
        if bits > MAX_JOINT_BITS {
            return Err(Error::StateSpaceTooLarge {
                bits,
                limit: MAX_JOINT_BITS,
            });
        }
        // dependents[b]: tasks (flattened) whose pattern reads bit b, including b itself
        let mut dependents: Vec<Vec<usize>> = (0..bits).map(|b| vec![b]).collect();
        for p in 0..agents {
            for i in 0..tasks {
                for d in self.coupling.dependencies(p, i) {
                    dependents[d.agent * tasks + d.task].push(p * tasks + i);
                }
            }
        }
        let mut cfg = JointConfiguration::zeros(agents, tasks);
        let mut contrib: Vec<f64> = (0..bits)
            .map(|b| self.task_performance(&cfg, b / tasks, b % tasks))
            .collect();
        let mut sum: f64 = contrib.iter().sum();
        let mut index: u64 = 0;
        let mut best = sum;
        let mut best_index = 0u64;
        for step in 1u64..(1u64 << bits) {
            let b = step.trailing_zeros() as usize;
            cfg.flip(b / tasks, b % tasks);
            index ^= 1 << b;
            for &t in &dependents[b] {
                let v = self.task_performance(&cfg, t / tasks, t % tasks);
                sum += v - contrib[t];
                contrib[t] = v;
            }
            if sum > best || (sum == best && index < best_index) {
                best = sum;
                best_index = index;
            }
        }
        let argmax = JointConfiguration::from_index(agents, tasks, best_index);
        Ok((self.org_performance(&argmax), argmax))
    }

    /// Writes the textual dump: a `#` header line, a column header, then one
    /// `p i pattern value` line per entry.
    pub fn write_dump<W: Write>(&self, mut out: W) -> Result<()> {
        let c = &self.coupling;
        writeln!(
            out,
            "# nkcs-landscape P={} N={} K={} C={} S={} rho={} seed={}",
            c.agents(),
            c.tasks(),
            c.k(),
            c.c(),
            c.s(),
            self.rho,
            self.seed
        )?;
        writeln!(out, "p i pattern value")?;
        let entries = c.entries_per_task();
        let mut line = String::new();
        for (p, table) in self.tables.iter().enumerate() {
            for i in 0..c.tasks() {
                for pat in 0..entries {
                    line.clear();
                    let _ = writeln!(line, "{p} {i} {pat} {}", table.get(i, pat));
                    out.write_all(line.as_bytes())?;
                }
            }
        }
        Ok(())
    }

    /// Parses a dump written by [`LandscapeSet::write_dump`].
    pub fn read_dump<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::MalformedDump {
            line: 1,
            reason: "empty input".into(),
        })?;
        let header = header?;
        let mut params = std::collections::HashMap::new();
        for tok in header.trim_start_matches('#').split_whitespace().skip(1) {
            if let Some((k, v)) = tok.split_once('=') {
                params.insert(k.to_string(), v.to_string());
            }
        }
        let get = |k: &str| -> Result<String> {
            params.get(k).cloned().ok_or_else(|| Error::MalformedDump {
                line: 1,
                reason: format!("header lacks {k}"),
            })
        };
        let parse_usize = |k: &str| -> Result<usize> {
            get(k)?.parse().map_err(|_| Error::MalformedDump {
                line: 1,
                reason: format!("bad {k}"),
            })
        };
        let coupling = CouplingSpec::new(
            parse_usize("P")?,
            parse_usize("N")?,
            parse_usize("K")?,
            parse_usize("C")?,
            parse_usize("S")?,
        )?;
        let rho: f64 = get("rho")?.parse().map_err(|_| Error::MalformedDump {
            line: 1,
            reason: "bad rho".into(),
        })?;
        let seed: u64 = get("seed")?.parse().map_err(|_| Error::MalformedDump {
            line: 1,
            reason: "bad seed".into(),
        })?;
        let entries = coupling.entries_per_task();
        let tasks = coupling.tasks();
        let mut values = vec![vec![f64::NAN; tasks * entries]; coupling.agents()];
        for (n, line) in lines {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with('p') {
                continue;
            }
            let bad = |reason: &str| Error::MalformedDump {
                line: n + 1,
                reason: reason.to_string(),
            };
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 4 {
                return Err(bad("expected 4 fields"));
            }
            let p: usize = f[0].parse().map_err(|_| bad("bad agent"))?;
            let i: usize = f[1].parse().map_err(|_| bad("bad task"))?;
            let pat: usize = f[2].parse().map_err(|_| bad("bad pattern"))?;
            let v: f64 = f[3].parse().map_err(|_| bad("bad value"))?;
            if p >= coupling.agents() || i >= tasks || pat >= entries {
                return Err(bad("index out of range"));
            }
            values[p][i * entries + pat] = v;
        }
        if values.iter().flatten().any(|v| v.is_nan()) {
            return Err(Error::MalformedDump {
                line: 0,
                reason: "missing entries".into(),
            });
        }
        let tables = values
            .into_iter()
            .map(|v| FitnessTable::new(tasks, entries, v))
            .collect();
        Self::from_tables(coupling, tables, rho, seed)
    }
}
