//! One decision period under each coordination mode.
//!
//! All modes build on one-bit hill climbing. Every agent (or the upper
//! management) evaluates candidates against the period-start snapshot, and
//! the chosen moves are applied simultaneously.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::landscape::{JointConfiguration, LandscapeSet};
use crate::organization::{synchrony_unchecked, AgentState};
use crate::rng::SimRng;

/// Who screens alternatives and who decides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoordinationMode {
    Decentralized,
    #[serde(alias = "pre-screening")]
    Prescreening,
    Centralized,
}

impl CoordinationMode {
    pub const ALL: [CoordinationMode; 3] = [Self::Decentralized, Self::Prescreening, Self::Centralized];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Decentralized => "decentralized",
            Self::Prescreening => "prescreening",
            Self::Centralized => "centralized",
        }
    }
}

impl fmt::Display for CoordinationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CoordinationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "decentralized" => Ok(Self::Decentralized),
            "prescreening" | "pre-screening" => Ok(Self::Prescreening),
            "centralized" => Ok(Self::Centralized),
            _ => Err(invalid("mode", format!("unknown coordination mode `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    Cursory,
    Thorough,
}

impl SearchMode {
    pub const ALL: [SearchMode; 2] = [Self::Cursory, Self::Thorough];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Cursory => "cursory",
            Self::Thorough => "thorough",
        }
    }
}

impl fmt::Display for SearchMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SearchMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cursory" => Ok(Self::Cursory),
            "thorough" => Ok(Self::Thorough),
            _ => Err(invalid("search", format!("unknown search mode `{s}`"))),
        }
    }
}

/// Mode, search depth and the `(ALT, PROP, COMP)` counts they imply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoordinationSpec {
    pub mode: CoordinationMode,
    pub search: SearchMode,
    /// Alternatives each agent looks at.
    pub alt: usize,
    /// Candidates each agent submits (unused when decentralized).
    pub prop: usize,
    /// Combinations the upper management evaluates (unused when decentralized).
    pub comp: usize,
}

impl CoordinationSpec {
    pub fn new(mode: CoordinationMode, search: SearchMode) -> Self {
        let deep = search == SearchMode::Thorough;
        let (alt, prop, comp) = match mode {
            CoordinationMode::Decentralized => (if deep { 4 } else { 2 }, 0, 0),
            CoordinationMode::Prescreening => (4, 2, if deep { 4 } else { 2 }),
            CoordinationMode::Centralized => (2, 2, if deep { 4 } else { 2 }),
        };
        Self {
            mode,
            search,
            alt,
            prop,
            comp,
        }
    }
}

/// Candidate vectors submitted by one agent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Proposal {
    pub agent: usize,
    pub candidates: Vec<u32>,
}

/// Goals of the upper management.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GoalSpec {
    pub g_perf: f64,
    pub g_sync: f64,
}

impl Default for GoalSpec {
    fn default() -> Self {
        Self {
            g_perf: 1.0,
            g_sync: 1.0,
        }
    }
}

/// Underachievement `max(0, goal - value)`.
pub fn d_minus(value: f64, goal: f64) -> f64 {
    (goal - value).max(0.0)
}

/// The upper management's objective on a configuration. `scale` multiplies
/// raw organizational performance (`1 / global_max` when normalizing).
pub fn objective(ls: &LandscapeSet, cfg: &JointConfiguration, goals: GoalSpec, scale: f64) -> f64 {
    let perf = ls.org_performance(cfg) * scale;
    d_minus(perf, goals.g_perf) + d_minus(synchrony_unchecked(cfg), goals.g_sync)
}

/// `alt` distinct one-bit neighbours of `word`, sampled without replacement in random order.
pub fn sample_alternatives(word: u32, tasks: usize, alt: usize, rng: &mut SimRng) -> Result<Vec<u32>> {
    if alt > tasks {
        return Err(invalid(
            "ALT",
            format!("cannot sample {alt} neighbours of an {tasks}-bit vector"),
        ));
    }
    Ok(index::sample(rng, tasks, alt)
        .into_iter()
        .map(|i| word ^ (1 << i))
        .collect())
}

fn unit_utility(agent: &AgentState, ls: &LandscapeSet, work: &mut JointConfiguration, word: u32, scale: f64) -> f64 {
    let phi = ls.unit_performance_with(work, agent.index, word) * scale;
    agent.utility_of(phi, word)
}

/// Every agent climbs to its best sampled neighbour if that strictly beats the status quo.
pub fn decentralized_step(
    agents: &[AgentState],
    ls: &LandscapeSet,
    cfg: &JointConfiguration,
    spec: &CoordinationSpec,
    scale: f64,
    rng: &mut SimRng,
) -> Result<JointConfiguration> {
    let mut work = cfg.clone();
    let mut next = cfg.clone();
    for agent in agents {
        let sq = cfg.agent(agent.index);
        let alts = sample_alternatives(sq, cfg.tasks(), spec.alt, rng)?;
        let mut best = unit_utility(agent, ls, &mut work, sq, scale);
        let mut choice = sq;
        for alt in alts {
            let u = unit_utility(agent, ls, &mut work, alt, scale);
            if u > best {
                best = u;
                choice = alt;
            }
        }
        next.set_agent(agent.index, choice);
    }
    Ok(next)
}

/// Screens `alt` neighbours and submits the `prop` best; ties keep sample order.
/// The status quo is not a candidate: the upper management keeps it by
/// rejecting every combination.
pub fn prescreen_proposals(
    agent: &AgentState,
    ls: &LandscapeSet,
    cfg: &JointConfiguration,
    alt: usize,
    prop: usize,
    scale: f64,
    rng: &mut SimRng,
) -> Result<Proposal> {
    let sq = cfg.agent(agent.index);
    let mut work = cfg.clone();
    let mut scored: Vec<(f64, u32)> = sample_alternatives(sq, cfg.tasks(), alt, rng)?
        .into_iter()
        .map(|w| (unit_utility(agent, ls, &mut work, w, scale), w))
        .collect();
    // stable: equal utilities keep insertion order
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    Ok(Proposal {
        agent: agent.index,
        candidates: scored.into_iter().take(prop).map(|(_, w)| w).collect(),
    })
}

/// `alt` random neighbours submitted without screening; never contains the status quo.
pub fn centralized_proposals(agent: usize, cfg: &JointConfiguration, alt: usize, rng: &mut SimRng) -> Result<Proposal> {
    Ok(Proposal {
        agent,
        candidates: sample_alternatives(cfg.agent(agent), cfg.tasks(), alt, rng)?,
    })
}

/// Draws `comp` distinct combinations (one candidate per agent) uniformly
/// without replacement. When the product space holds at most `comp`
/// combinations, all of them are returned in index order.
pub fn sample_combinations(proposals: &[Proposal], comp: usize, rng: &mut SimRng) -> Vec<Vec<usize>> {
    let sizes: Vec<usize> = proposals.iter().map(|p| p.candidates.len()).collect();
    let total = sizes.iter().try_fold(1u128, |acc, &s| acc.checked_mul(s as u128));
    if let Some(total) = total {
        if total <= comp as u128 {
            return (0..total)
                .map(|mut k| {
                    sizes
                        .iter()
                        .map(|&s| {
                            let c = (k % s as u128) as usize;
                            k /= s as u128;
                            c
                        })
                        .collect()
                })
                .collect();
        }
    }
    let mut seen = HashSet::with_capacity(comp);
    let mut out = Vec::with_capacity(comp);
    while out.len() < comp {
        let combo: Vec<usize> = sizes.iter().map(|&s| rng.random_range(0..s)).collect();
        if seen.insert(combo.clone()) {
            out.push(combo);
        }
    }
    out
}

/// Upper-management decision: adopt the best sampled combination only if its
/// objective is strictly below the status quo's.
pub fn central_step(
    proposals: &[Proposal],
    ls: &LandscapeSet,
    cfg: &JointConfiguration,
    comp: usize,
    goals: GoalSpec,
    scale: f64,
    rng: &mut SimRng,
) -> JointConfiguration {
    let combos = sample_combinations(proposals, comp, rng);
    let mut best = objective(ls, cfg, goals, scale);
    let mut chosen: Option<JointConfiguration> = None;
    let mut trial = cfg.clone();
    for combo in combos {
        for (prop, &c) in proposals.iter().zip(&combo) {
            trial.set_agent(prop.agent, prop.candidates[c]);
        }
        let obj = objective(ls, &trial, goals, scale);
        if obj < best {
            best = obj;
            chosen = Some(trial.clone());
        }
    }
    chosen.unwrap_or_else(|| cfg.clone())
}

/// Runs one decision period for `spec.mode`.
pub fn coordinate(
    agents: &[AgentState],
    ls: &LandscapeSet,
    cfg: &JointConfiguration,
    spec: &CoordinationSpec,
    goals: GoalSpec,
    scale: f64,
    rng: &mut SimRng,
) -> Result<JointConfiguration> {
    match spec.mode {
        CoordinationMode::Decentralized => decentralized_step(agents, ls, cfg, spec, scale, rng),
        CoordinationMode::Prescreening => {
            let proposals = agents
                .iter()
                .map(|a| prescreen_proposals(a, ls, cfg, spec.alt, spec.prop, scale, rng))
                .collect::<Result<Vec<_>>>()?;
            Ok(central_step(&proposals, ls, cfg, spec.comp, goals, scale, rng))
        }
        CoordinationMode::Centralized => {
            let proposals = agents
                .iter()
                .map(|a| centralized_proposals(a.index, cfg, spec.alt, rng))
                .collect::<Result<Vec<_>>>()?;
            Ok(central_step(&proposals, ls, cfg, spec.comp, goals, scale, rng))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::landscape::{CouplingSpec, FitnessTable};
    use crate::rng::seeded;

    #[test]
    fn table_one_counts() {
        use CoordinationMode::*;
        use SearchMode::*;
        let c = |m, s| {
            let x = CoordinationSpec::new(m, s);
            (x.alt, x.prop, x.comp)
        };
        assert_eq!(c(Decentralized, Cursory).0, 2);
        assert_eq!(c(Decentralized, Thorough).0, 4);
        assert_eq!(c(Prescreening, Cursory), (4, 2, 2));
        assert_eq!(c(Prescreening, Thorough), (4, 2, 4));
        assert_eq!(c(Centralized, Cursory), (2, 2, 2));
        assert_eq!(c(Centralized, Thorough), (2, 2, 4));
    }

    #[test]
    fn full_neighbourhood() {
        let mut rng = seeded(1);
        let mut alts = sample_alternatives(0b0101, 4, 4, &mut rng).unwrap();
        alts.sort();
        let mut expect = vec![0b0100, 0b0111, 0b0001, 0b1101];
        expect.sort();
        assert_eq!(alts, expect);
    }

    #[test]
    fn alt_exceeding_n_is_an_error() {
        let mut rng = seeded(1);
        assert!(sample_alternatives(0, 4, 5, &mut rng).is_err());
    }

    #[test]
    fn d_minus_examples() {
        assert!((d_minus(0.85, 1.0) - 0.15).abs() < 1e-12);
        assert_eq!(d_minus(1.2, 1.0), 0.0);
        assert!((d_minus(0.74, 1.0) + d_minus(0.85, 1.0) - 0.41).abs() < 1e-12);
    }

    /// Single agent, N = 2, K = 0 with a hand-built table.
    fn toy() -> LandscapeSet {
        let spec = CouplingSpec::new(1, 2, 0, 0, 0).unwrap();
        // task 0: x0=0 -> 0.1, x0=1 -> 0.9 ; task 1: x1=0 -> 0.6, x1=1 -> 0.2
        let t = FitnessTable::new(2, 2, vec![0.1, 0.9, 0.6, 0.2]);
        LandscapeSet::from_tables(spec, vec![t], 0.0, 0).unwrap()
    }

    #[test]
    fn hand_simulated_hill_climb() {
        let ls = toy();
        let agent = AgentState::new(0, 2, 1.0, 0.0, 1);
        // cursory search samples ALT = 2, the full neighbourhood here
        let spec = CoordinationSpec::new(CoordinationMode::Decentralized, SearchMode::Cursory);
        let mut rng = seeded(3);
        // start at (x0, x1) = (0, 1): perf (0.1 + 0.2)/2
        let mut cfg = JointConfiguration::from_words(2, vec![0b10]);
        // both flips improve: (1,1) -> 0.55 ; (0,0) -> 0.35 ; best is flip x0
        cfg = decentralized_step(std::slice::from_ref(&agent), &ls, &cfg, &spec, 1.0, &mut rng).unwrap();
        assert_eq!(cfg.agent(0), 0b11);
        // from (1,1): flip x1 -> (1,0) = 0.75 improves
        cfg = decentralized_step(std::slice::from_ref(&agent), &ls, &cfg, &spec, 1.0, &mut rng).unwrap();
        assert_eq!(cfg.agent(0), 0b01);
        // global optimum: stays
        let again = decentralized_step(std::slice::from_ref(&agent), &ls, &cfg, &spec, 1.0, &mut rng).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn prescreen_submits_best_neighbours() {
        let ls = toy();
        let agent = AgentState::new(0, 2, 1.0, 0.0, 1);
        let cfg = JointConfiguration::from_words(2, vec![0b01]);
        let mut rng = seeded(9);
        // neighbours: (0,0)=0.35, (1,1)=0.55; the status quo (0.75) is never submitted
        let p = prescreen_proposals(&agent, &ls, &cfg, 2, 2, 1.0, &mut rng).unwrap();
        assert_eq!(p.candidates, vec![0b11, 0b00]);
        let p = prescreen_proposals(&agent, &ls, &cfg, 2, 1, 1.0, &mut rng).unwrap();
        assert_eq!(p.candidates, vec![0b11]);
    }

    #[test]
    fn centralized_proposals_exclude_status_quo() {
        let cfg = JointConfiguration::from_words(4, vec![0b1010, 0b0000]);
        let mut rng = seeded(5);
        for _ in 0..200 {
            let p = centralized_proposals(1, &cfg, 2, &mut rng).unwrap();
            assert_eq!(p.candidates.len(), 2);
            assert_ne!(p.candidates[0], p.candidates[1]);
            assert!(p.candidates.iter().all(|&c| c.count_ones() == 1));
        }
    }

    #[test]
    fn combinations_are_distinct() {
        let proposals: Vec<Proposal> = (0..5)
            .map(|a| Proposal {
                agent: a,
                candidates: vec![1, 2],
            })
            .collect();
        let mut rng = seeded(11);
        for _ in 0..100 {
            let c = sample_combinations(&proposals, 4, &mut rng);
            let set: HashSet<_> = c.iter().collect();
            assert_eq!(set.len(), 4);
        }
        // product space smaller than COMP: enumerate all
        let c = sample_combinations(&proposals[..1], 4, &mut rng);
        assert_eq!(c, vec![vec![0], vec![1]]);
    }
}
