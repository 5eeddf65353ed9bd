use std::fmt;
use std::ops::RangeInclusive;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::generators::erdos_renyi;
use super::oracle::fixed_point_oracle;
use crate::cascade::{run, SimConfig};

/// Randomized check that no diffusive adoption happens when `epsilon >= x2`.
#[derive(Debug, Clone, PartialEq)]
pub struct TheoremCheck {
    pub trials: usize,
    pub nodes: RangeInclusive<usize>,
    pub edge_prob: RangeInclusive<f64>,
    /// Upper bound on the seed set size as a fraction of the nodes.
    pub max_seed_fraction: f64,
    /// Use this `(epsilon, x2)` in every trial instead of sampling.
    pub fixed: Option<(f64, f64)>,
    pub rng_seed: u64,
}

impl Default for TheoremCheck {
    fn default() -> Self {
        TheoremCheck {
            trials: 100,
            nodes: 200..=200,
            edge_prob: 0.05..=0.05,
            max_seed_fraction: 0.1,
            fixed: None,
            rng_seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample {
    pub trial: usize,
    pub node_count: usize,
    pub edge_prob: f64,
    pub epsilon: f64,
    pub x2: f64,
    pub seeds: Vec<usize>,
    pub diffusive_adoptions: usize,
    pub engine_terminal: usize,
    pub oracle_terminal: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TheoremReport {
    pub trials: usize,
    pub passed: usize,
    /// Trials that sampled `epsilon == x2` exactly.
    pub boundary_trials: usize,
    pub counterexamples: Vec<Counterexample>,
}

impl TheoremReport {
    pub fn all_passed(&self) -> bool {
        self.passed == self.trials
    }
}

impl fmt::Display for TheoremReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "trials: {}", self.trials)?;
        writeln!(f, "passed: {}/{}", self.passed, self.trials)?;
        writeln!(
            f,
            "boundary trials (epsilon = x2): {}",
            self.boundary_trials
        )?;
        for c in &self.counterexamples {
            writeln!(
                f,
                "counterexample: trial={} n={} q={} epsilon={} x2={} seeds={} diffusive={} engine_terminal={} oracle_terminal={}",
                c.trial,
                c.node_count,
                c.edge_prob,
                c.epsilon,
                c.x2,
                c.seeds.len(),
                c.diffusive_adoptions,
                c.engine_terminal,
                c.oracle_terminal
            )?;
        }
        Ok(())
    }
}

fn sample_range<R: Rng>(rng: &mut R, range: &RangeInclusive<f64>) -> f64 {
    if range.start() >= range.end() {
        *range.start()
    } else {
        rng.gen_range(range.clone())
    }
}

/// Samples `(epsilon, x2)` with `epsilon >= x2`; the first trial and roughly
/// a quarter of the rest sit exactly on the boundary, some at `epsilon = 1`.
fn sample_parameters<R: Rng>(rng: &mut R, trial: usize) -> (f64, f64) {
    let x2: f64 = rng.gen();
    let epsilon = match (trial, rng.gen_range(0..8)) {
        (0, _) | (_, 0 | 1) => x2,
        (_, 2) => 1.0,
        _ => rng.gen_range(x2..=1.0),
    };
    (epsilon, x2)
}

/// Runs the engine at `p = 0` and the fixed-point oracle on random
/// Erdős–Rényi graphs with `epsilon >= x2`; a trial passes when neither
/// grows the seed set.
pub fn verify_theorem1(check: &TheoremCheck) -> TheoremReport {
    let mut rng = ChaCha8Rng::seed_from_u64(check.rng_seed);
    let mut report = TheoremReport {
        trials: check.trials,
        passed: 0,
        boundary_trials: 0,
        counterexamples: Vec::new(),
    };
    for trial in 0..check.trials {
        let node_count = rng.gen_range(check.nodes.clone());
        let edge_prob = sample_range(&mut rng, &check.edge_prob);
        let graph = erdos_renyi(node_count, edge_prob, &mut rng);
        let max_seeds = (node_count as f64 * check.max_seed_fraction).floor() as usize;
        let seed_count = rng.gen_range(0..=max_seeds);
        let mut seeds = sample(&mut rng, node_count, seed_count).into_vec();
        seeds.sort_unstable();
        let (epsilon, x2) = check
            .fixed
            .unwrap_or_else(|| sample_parameters(&mut rng, trial));
        if epsilon == x2 {
            report.boundary_trials += 1;
        }

        let cfg = SimConfig::new(epsilon, x2)
            .with_p(0.0)
            .with_seeds(seeds.iter().copied())
            .with_rng_seed(trial as u64);
        let trace = run(&graph, &cfg).expect("valid trial configuration");
        let oracle = fixed_point_oracle(&graph, &seeds, x2, epsilon);
        let diffusive = trace.total_diffusive();
        if diffusive == 0 && trace.terminal_set() == seeds && oracle.len() == seeds.len() {
            report.passed += 1;
        } else {
            report.counterexamples.push(Counterexample {
                trial,
                node_count,
                edge_prob,
                epsilon,
                x2,
                seeds,
                diffusive_adoptions: diffusive,
                engine_terminal: trace.terminal_adopters(),
                oracle_terminal: oracle.len(),
            });
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_default_run_passes() {
        let report = verify_theorem1(&TheoremCheck {
            trials: 20,
            nodes: 20..=60,
            edge_prob: 0.05..=0.3,
            ..TheoremCheck::default()
        });
        assert!(report.all_passed(), "{report}");
        assert!(report.boundary_trials >= 1);
    }

    #[test]
    fn boundary_trial() {
        let report = verify_theorem1(&TheoremCheck {
            trials: 1,
            fixed: Some((0.37, 0.37)),
            ..TheoremCheck::default()
        });
        assert!(report.all_passed());
        assert_eq!(report.boundary_trials, 1);
    }

    #[test]
    fn epsilon_one() {
        for x2 in [0.0, 0.5, 1.0] {
            let report = verify_theorem1(&TheoremCheck {
                trials: 1,
                fixed: Some((1.0, x2)),
                rng_seed: 11,
                ..TheoremCheck::default()
            });
            assert!(report.all_passed());
        }
    }

    #[test]
    fn detects_a_violation() {
        // epsilon < x2 is outside the theorem; dense graphs must then spread
        let report = verify_theorem1(&TheoremCheck {
            trials: 5,
            nodes: 50..=50,
            edge_prob: 0.5..=0.5,
            max_seed_fraction: 0.1,
            fixed: Some((0.01, 0.9)),
            rng_seed: 1,
        });
        assert!(!report.all_passed());
        assert!(report.to_string().contains("counterexample"));
    }
}
