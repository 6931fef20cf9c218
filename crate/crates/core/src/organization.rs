//! Communication networks, agent memory and the synchrony / conformity metrics.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::landscape::{JointConfiguration, LandscapeSet};

/// The four stylized communication structures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NetworkKind {
    /// Every agent hears both cycle neighbours.
    Ring,
    /// Every agent hears its predecessor only.
    Cycle,
    /// Agent 0 broadcasts to everyone else.
    Star,
    /// Agent `p` hears agent `p - 1`; agent 0 hears nobody.
    Line,
}

impl NetworkKind {
    pub const ALL: [NetworkKind; 4] = [Self::Ring, Self::Cycle, Self::Star, Self::Line];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Ring => "ring",
            Self::Cycle => "cycle",
            Self::Star => "star",
            Self::Line => "line",
        }
    }
}

impl fmt::Display for NetworkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NetworkKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ring" => Ok(Self::Ring),
            "cycle" => Ok(Self::Cycle),
            "star" => Ok(Self::Star),
            "line" => Ok(Self::Line),
            _ => Err(invalid("network", format!("unknown network `{s}`"))),
        }
    }
}

/// Directed receive lists of a network over `P` agents (0-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkTopology {
    kind: NetworkKind,
    receives_from: Vec<Vec<usize>>,
}

impl NetworkTopology {
    pub fn new(kind: NetworkKind, agents: usize) -> Result<Self> {
        if agents < 2 {
            return Err(invalid("P", format!("a network needs at least 2 agents, got {agents}")));
        }
        let prev = |p: usize| (p + agents - 1) % agents;
        let receives_from = (0..agents)
            .map(|p| match kind {
                NetworkKind::Ring => {
                    let next = (p + 1) % agents;
                    if prev(p) == next {
                        vec![next]
                    } else {
                        vec![prev(p), next]
                    }
                }
                NetworkKind::Cycle => vec![prev(p)],
                NetworkKind::Star => {
                    if p == 0 {
                        vec![]
                    } else {
                        vec![0]
                    }
                }
                NetworkKind::Line => {
                    if p == 0 {
                        vec![]
                    } else {
                        vec![p - 1]
                    }
                }
            })
            .collect();
        Ok(Self { kind, receives_from })
    }

    pub fn kind(&self) -> NetworkKind {
        self.kind
    }

    pub fn agents(&self) -> usize {
        self.receives_from.len()
    }

    pub fn receives_from(&self, p: usize) -> &[usize] {
        &self.receives_from[p]
    }

    pub fn in_degree(&self, p: usize) -> usize {
        self.receives_from[p].len()
    }
}

/// A decision vector received from a peer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MemoryEntry {
    pub decisions: u32,
    pub received_at: usize,
}

/// Per-agent behavioural state. The agent's current decision vector lives in
/// the organization's [`JointConfiguration`].
#[derive(Debug, Clone, PartialEq)]
pub struct AgentState {
    pub index: usize,
    pub tasks: usize,
    pub memory: Vec<MemoryEntry>,
    pub w_phi: f64,
    pub w_kappa: f64,
    pub memory_span: usize,
}

impl AgentState {
    pub fn new(index: usize, tasks: usize, w_phi: f64, w_kappa: f64, memory_span: usize) -> Self {
        Self {
            index,
            tasks,
            memory: Vec::new(),
            w_phi,
            w_kappa,
            memory_span,
        }
    }

    /// Drops entries older than the memory span as of period `t`.
    pub fn forget(&mut self, t: usize) {
        let span = self.memory_span;
        self.memory.retain(|m| t - m.received_at < span);
    }

    /// Conformity of candidate vector `word` against the current memory.
    pub fn conformity_of(&self, word: u32) -> f64 {
        if self.memory.is_empty() {
            return 0.0;
        }
        let n = self.tasks as u32;
        let matches: u32 = self.memory.iter().map(|m| n - (word ^ m.decisions).count_ones()).sum();
        matches as f64 / (n as f64 * self.memory.len() as f64)
    }

    /// Weighted utility of a unit performance value and a candidate vector.
    pub fn utility_of(&self, unit_performance: f64, word: u32) -> f64 {
        let kappa = if self.w_kappa == 0.0 {
            0.0
        } else {
            self.conformity_of(word)
        };
        weighted_utility(self.w_phi, self.w_kappa, unit_performance, kappa)
    }

    /// Utility of the agent's current vector in `cfg`; `scale` multiplies the
    /// raw unit performance (`1 / global_max` when normalizing).
    pub fn utility(&self, ls: &LandscapeSet, cfg: &JointConfiguration, scale: f64) -> f64 {
        let phi = ls.unit_performance(cfg, self.index) * scale;
        self.utility_of(phi, cfg.agent(self.index))
    }
}

pub fn weighted_utility(w_phi: f64, w_kappa: f64, phi: f64, kappa: f64) -> f64 {
    w_phi * phi + w_kappa * kappa
}

/// Conformity of agent `agent`'s current vector in `cfg`.
pub fn conformity(agent: &AgentState, cfg: &JointConfiguration) -> f64 {
    agent.conformity_of(cfg.agent(agent.index))
}

/// Every receiver records each sender's current vector stamped `t`, then all
/// agents forget entries with `t - received_at >= T_M`.
pub fn share_and_receive(agents: &mut [AgentState], cfg: &JointConfiguration, net: &NetworkTopology, t: usize) {
    for agent in agents.iter_mut() {
        for &q in net.receives_from(agent.index) {
            agent.memory.push(MemoryEntry {
                decisions: cfg.agent(q),
                received_at: t,
            });
        }
        agent.forget(t);
    }
}

/// Fraction of positions on which two `n`-bit vectors agree.
pub fn similarity(a: u32, b: u32, tasks: usize) -> f64 {
    (tasks as u32 - (a ^ b).count_ones()) as f64 / tasks as f64
}

/// Largest attainable pairwise Hamming sum, `N * floor(P/2) * ceil(P/2)`.
pub fn max_pairwise_distinct(agents: usize, tasks: usize) -> usize {
    tasks * (agents / 2) * agents.div_ceil(2)
}

/// Sum of pairwise Hamming distances between agents' vectors.
pub fn pairwise_distinct(cfg: &JointConfiguration) -> usize {
    let agents = cfg.agents();
    (0..cfg.tasks())
        .map(|i| {
            let ones = cfg.words().iter().filter(|w| (*w >> i) & 1 == 1).count();
            ones * (agents - ones)
        })
        .sum()
}

/// Synchrony `1 - sum_{p<q} H(p,q) / H_max`.
pub fn synchrony(cfg: &JointConfiguration) -> Result<f64> {
    if cfg.agents() < 2 {
        return Err(invalid("P", "synchrony needs at least 2 agents"));
    }
    Ok(synchrony_unchecked(cfg))
}

pub(crate) fn synchrony_unchecked(cfg: &JointConfiguration) -> f64 {
    let hmax = max_pairwise_distinct(cfg.agents(), cfg.tasks());
    1.0 - pairwise_distinct(cfg) as f64 / hmax as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> u32 {
        // leftmost character is task 0
        s.chars()
            .enumerate()
            .fold(0, |acc, (i, c)| acc | (((c == '1') as u32) << i))
    }

    #[test]
    fn star_receive_lists() {
        let net = NetworkTopology::new(NetworkKind::Star, 5).unwrap();
        assert!(net.receives_from(0).is_empty());
        for p in 1..5 {
            assert_eq!(net.receives_from(p), &[0]);
        }
    }

    #[test]
    fn cycle_receive_lists() {
        let net = NetworkTopology::new(NetworkKind::Cycle, 5).unwrap();
        for p in 0..5 {
            assert_eq!(net.receives_from(p), &[(p + 4) % 5]);
        }
    }

    #[test]
    fn ring_and_line_receive_lists() {
        let ring = NetworkTopology::new(NetworkKind::Ring, 5).unwrap();
        assert_eq!(ring.receives_from(2), &[1, 3]);
        assert_eq!(ring.receives_from(0), &[4, 1]);
        let line = NetworkTopology::new(NetworkKind::Line, 5).unwrap();
        assert!(line.receives_from(0).is_empty());
        assert_eq!(line.receives_from(4), &[3]);
    }

    #[test]
    fn network_needs_two_agents() {
        assert!(NetworkTopology::new(NetworkKind::Ring, 1).is_err());
    }

    #[test]
    fn similarity_examples() {
        assert_eq!(similarity(bits("1010"), bits("1010"), 4), 1.0);
        assert_eq!(similarity(bits("1010"), bits("0101"), 4), 0.0);
        assert_eq!(similarity(bits("1100"), bits("1111"), 4), 0.5);
    }

    #[test]
    fn conformity_examples() {
        let mut a = AgentState::new(0, 4, 0.5, 0.5, 50);
        assert_eq!(a.conformity_of(bits("1100")), 0.0);
        a.memory.push(MemoryEntry {
            decisions: bits("1111"),
            received_at: 1,
        });
        assert_eq!(a.conformity_of(bits("1100")), 0.5);
        a.memory.push(MemoryEntry {
            decisions: bits("0000"),
            received_at: 1,
        });
        assert_eq!(a.conformity_of(bits("1100")), 0.5);
    }

    #[test]
    fn synchrony_examples() {
        let same = JointConfiguration::from_words(4, vec![bits("0110"); 5]);
        assert_eq!(synchrony(&same).unwrap(), 1.0);
        let opposite = JointConfiguration::from_words(4, vec![bits("0000"), bits("1111")]);
        assert_eq!(synchrony(&opposite).unwrap(), 0.0);
        let three = JointConfiguration::from_words(2, vec![bits("00"), bits("11"), bits("01")]);
        assert_eq!(pairwise_distinct(&three), 4);
        assert_eq!(max_pairwise_distinct(3, 2), 4);
        assert_eq!(synchrony(&three).unwrap(), 0.0);
        assert!(synchrony(&JointConfiguration::zeros(1, 4)).is_err());
    }

    #[test]
    fn utility_arithmetic() {
        let mut a = AgentState::new(0, 4, 0.5, 0.5, 50);
        a.memory.push(MemoryEntry {
            decisions: bits("1111"),
            received_at: 0,
        });
        // kappa(1110 vs 1111) = 0.75
        let u = a.utility_of(0.8, bits("1110"));
        assert!((u - (0.4 + 0.375)).abs() < 1e-15);
        assert!((weighted_utility(0.5, 0.5, 0.8, 0.6) - 0.7).abs() < 1e-15);
        a.w_kappa = 0.0;
        assert_eq!(a.utility_of(0.8, bits("0000")), 0.5 * 0.8);
    }

    #[test]
    fn immediate_forgetting() {
        let net = NetworkTopology::new(NetworkKind::Ring, 4).unwrap();
        let mut agents: Vec<_> = (0..4).map(|p| AgentState::new(p, 3, 0.5, 0.5, 1)).collect();
        for t in 1..=5 {
            let cfg = JointConfiguration::from_words(3, vec![t as u32 % 8; 4]);
            share_and_receive(&mut agents, &cfg, &net, t);
            for a in &agents {
                assert_eq!(a.memory.len(), 2);
                assert!(a.memory.iter().all(|m| m.received_at == t));
            }
        }
    }
}
