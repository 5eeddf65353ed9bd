//! Progressive two-site adoption dynamics.
//!
//! Every user starts on the old site only ([`NodeState::Exclusive`]). Each day
//! an exclusive user starts using the new site as well ([`NodeState::Dual`])
//! if either
//!
//! * the time their friends spend on the new site exceeds a fraction
//!   `epsilon` of their friends' total time (diffusive shift), or
//! * a Bernoulli(`p`) draw succeeds (non-diffusive shift).
//!
//! A dual friend spends a fraction `x2` of the time span on the new site, so
//! a user with `d` friends, `d2` of them dual, sees `T2 = delta * d2 * x2` on
//! the new site and `T1 = delta * d - T2` on the old one.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{Graph, GraphError, NeighborPartition};
use crate::Scalar;

/// Random stream used by [`run`].
pub type SimRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeState {
    /// Uses only the old site.
    Exclusive,
    /// Uses both sites. Absorbing.
    Dual,
}

#[derive(Error, Debug, Clone, PartialEq)]
pub enum ConfigError {
    #[error("{name} = {value} is outside [0, 1]")]
    OutOfUnitInterval { name: &'static str, value: f64 },
    #[error("delta = {0} must be positive")]
    NonPositiveDelta(f64),
    #[error("horizon must be at least 1")]
    ZeroHorizon,
    #[error("seed node {node} out of range for graph with {node_count} nodes")]
    SeedOutOfRange { node: usize, node_count: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig<S> {
    /// Attachment factor of the old site.
    pub epsilon: S,
    /// Novelty: share of a dual user's time spent on new-only features.
    pub x2: S,
    /// Non-diffusive adoption probability per day.
    pub p: S,
    /// Daily time span.
    pub delta: S,
    /// Maximum number of days simulated.
    pub horizon: usize,
    pub initial_seeds: Vec<usize>,
    pub rng_seed: u64,
}

pub const DEFAULT_P: f64 = 0.001;
pub const DEFAULT_HORIZON: usize = 10_000;

impl<S: Scalar> SimConfig<S> {
    /// Config with `p = 0.001`, `delta = 1`, horizon 10000, no seeds, RNG seed 0.
    pub fn new(epsilon: S, x2: S) -> Self {
        SimConfig {
            epsilon,
            x2,
            p: S::from_f64(DEFAULT_P).expect("default p"),
            delta: S::one(),
            horizon: DEFAULT_HORIZON,
            initial_seeds: Vec::new(),
            rng_seed: 0,
        }
    }

    pub fn with_p(mut self, p: S) -> Self {
        self.p = p;
        self
    }

    pub fn with_delta(mut self, delta: S) -> Self {
        self.delta = delta;
        self
    }

    pub fn with_horizon(mut self, horizon: usize) -> Self {
        self.horizon = horizon;
        self
    }

    pub fn with_seeds(mut self, seeds: impl IntoIterator<Item = usize>) -> Self {
        self.initial_seeds = seeds.into_iter().collect();
        self
    }

    pub fn with_rng_seed(mut self, rng_seed: u64) -> Self {
        self.rng_seed = rng_seed;
        self
    }

    /// Checks parameter ranges; seeds are checked against a graph in [`run`].
    pub fn validate(&self) -> Result<(), ConfigError> {
        for (name, value) in [("epsilon", self.epsilon), ("x2", self.x2), ("p", self.p)] {
            if !value.is_unit_interval() {
                return Err(ConfigError::OutOfUnitInterval {
                    name,
                    value: value.to_f64_lossy(),
                });
            }
        }
        if self.delta.partial_cmp(&S::zero()) != Some(std::cmp::Ordering::Greater) {
            return Err(ConfigError::NonPositiveDelta(self.delta.to_f64_lossy()));
        }
        if self.horizon == 0 {
            return Err(ConfigError::ZeroHorizon);
        }
        Ok(())
    }
}

/// Time a user's friends spend on the old site (`old`, T1) and the new site
/// (`new`, T2) per day. `total` is `delta * degree`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exposure<S> {
    pub old: S,
    pub new: S,
    pub total: S,
}

impl<S: Scalar> Exposure<S> {
    pub fn from_partition(partition: NeighborPartition, x2: S, delta: S) -> Self {
        let new = delta * (S::from_count(partition.dual) * x2);
        let total = delta * S::from_count(partition.degree);
        Exposure {
            old: total - new,
            new,
            total,
        }
    }

    /// Threshold rule `T2 > epsilon * (T1 + T2)`, with `T1 + T2` taken as the
    /// exact total `delta * degree` rather than a rounded sum.
    pub fn triggers(&self, epsilon: S) -> bool {
        self.new > epsilon * self.total
    }
}

/// Exposure times of `node` given the current states.
pub fn exposure_times<S: Scalar>(
    graph: &Graph,
    states: &[NodeState],
    node: usize,
    cfg: &SimConfig<S>,
) -> Result<Exposure<S>, GraphError> {
    let partition = graph.neighbor_partition(states, node)?;
    Ok(Exposure::from_partition(partition, cfg.x2, cfg.delta))
}

/// `T2 > epsilon * (T1 + T2)`, strictly.
pub fn diffusive_condition<S: Scalar>(t1: S, t2: S, epsilon: S) -> bool {
    t2 > epsilon * (t1 + t2)
}

/// `false` when `epsilon >= x2`: no user can ever shift diffusively, whatever
/// the graph, since `d2 * x2 <= d * x2 <= d * epsilon`.
pub fn can_diffusive_shift<S: Scalar>(epsilon: S, x2: S) -> bool {
    epsilon < x2
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StepCounts {
    pub new_diffusive: usize,
    pub new_nondiffusive: usize,
}

impl StepCounts {
    pub fn total(&self) -> usize {
        self.new_diffusive + self.new_nondiffusive
    }
}

/// Advances one day, synchronously.
///
/// Diffusive adopters are decided against the input states. Every exclusive
/// node that did not adopt diffusively then gets exactly one Bernoulli(`p`)
/// draw, in ascending node order. All adopters switch at the end of the day.
///
/// Since the threshold compares `T2` against a multiple of the same daily
/// span, the rule is evaluated per unit span; the outcome never depends on
/// `delta`.
pub fn step<S: Scalar, R: Rng + ?Sized>(
    graph: &Graph,
    states: &[NodeState],
    cfg: &SimConfig<S>,
    rng: &mut R,
) -> (Vec<NodeState>, StepCounts) {
    assert_eq!(states.len(), graph.node_count(), "state vector length");
    let mut next = states.to_vec();
    let mut counts = StepCounts::default();

    let mut diffused = vec![false; states.len()];
    for (node, state) in states.iter().enumerate() {
        if *state == NodeState::Exclusive {
            let partition = graph.partition_unchecked(states, node);
            if Exposure::from_partition(partition, cfg.x2, S::one()).triggers(cfg.epsilon) {
                diffused[node] = true;
                next[node] = NodeState::Dual;
                counts.new_diffusive += 1;
            }
        }
    }

    let p = cfg.p.to_f64_lossy();
    for (node, state) in states.iter().enumerate() {
        if *state == NodeState::Exclusive && !diffused[node] && rng.gen::<f64>() < p {
            next[node] = NodeState::Dual;
            counts.new_nondiffusive += 1;
        }
    }
    (next, counts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepRecord {
    /// Day index; 0 is the initial state.
    pub step: usize,
    pub adopters_total: usize,
    pub new_diffusive: usize,
    pub new_nondiffusive: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CascadeTrace {
    pub node_count: usize,
    pub records: Vec<StepRecord>,
    /// Number of steps executed before the run stopped.
    pub terminal_step: usize,
    pub final_states: Vec<NodeState>,
}

impl CascadeTrace {
    pub fn terminal_adopters(&self) -> usize {
        self.records.last().map_or(0, |r| r.adopters_total)
    }

    pub fn fraction(&self, adopters: usize) -> f64 {
        if self.node_count == 0 {
            0.0
        } else {
            adopters as f64 / self.node_count as f64
        }
    }

    /// Nodes that ended as dual users, ascending.
    pub fn terminal_set(&self) -> Vec<usize> {
        self.final_states
            .iter()
            .enumerate()
            .filter(|(_, s)| **s == NodeState::Dual)
            .map(|(i, _)| i)
            .collect()
    }

    /// First recorded step whose adopter fraction is at least `fraction`.
    pub fn steps_to_fraction(&self, fraction: f64) -> Option<usize> {
        if self.node_count == 0 {
            return None;
        }
        self.records
            .iter()
            .find(|r| self.fraction(r.adopters_total) >= fraction)
            .map(|r| r.step)
    }

    pub fn steps_to_full(&self) -> Option<usize> {
        if self.node_count == 0 {
            return None;
        }
        self.records
            .iter()
            .find(|r| r.adopters_total == self.node_count)
            .map(|r| r.step)
    }

    pub fn total_diffusive(&self) -> usize {
        self.records.iter().map(|r| r.new_diffusive).sum()
    }

    /// CSV with columns `step,adopters_total,adopters_frac,new_diffusive,new_nondiffusive`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(
            out,
            "step,adopters_total,adopters_frac,new_diffusive,new_nondiffusive"
        )?;
        for r in &self.records {
            writeln!(
                out,
                "{},{},{},{},{}",
                r.step,
                r.adopters_total,
                self.fraction(r.adopters_total),
                r.new_diffusive,
                r.new_nondiffusive
            )?;
        }
        out.flush()
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii csv")
    }
}

/// Initial state vector with `seeds` dual.
pub fn initial_states(graph: &Graph, seeds: &[usize]) -> Result<Vec<NodeState>, ConfigError> {
    let node_count = graph.node_count();
    let mut states = vec![NodeState::Exclusive; node_count];
    for &node in seeds {
        if node >= node_count {
            return Err(ConfigError::SeedOutOfRange { node, node_count });
        }
        states[node] = NodeState::Dual;
    }
    Ok(states)
}

/// Simulates until every node is dual, the horizon is reached, or (with
/// `p = 0`) a day passes without any adoption.
///
/// The no-op day that confirms a `p = 0` fixed point counts towards
/// `terminal_step` but is not recorded.
pub fn run<S: Scalar>(graph: &Graph, cfg: &SimConfig<S>) -> Result<CascadeTrace, ConfigError> {
    cfg.validate()?;
    let mut states = initial_states(graph, &cfg.initial_seeds)?;
    let node_count = graph.node_count();
    let mut adopters = states.iter().filter(|s| **s == NodeState::Dual).count();
    let mut records = vec![StepRecord {
        step: 0,
        adopters_total: adopters,
        new_diffusive: 0,
        new_nondiffusive: 0,
    }];
    let mut rng = SimRng::seed_from_u64(cfg.rng_seed);
    let deterministic = cfg.p == S::zero();

    let mut day = 0;
    while adopters < node_count && day < cfg.horizon {
        day += 1;
        let (next, counts) = step(graph, &states, cfg, &mut rng);
        states = next;
        if deterministic && counts.total() == 0 {
            break;
        }
        adopters += counts.total();
        records.push(StepRecord {
            step: day,
            adopters_total: adopters,
            new_diffusive: counts.new_diffusive,
            new_nondiffusive: counts.new_nondiffusive,
        });
    }

    Ok(CascadeTrace {
        node_count,
        records,
        terminal_step: day,
        final_states: states,
    })
}
