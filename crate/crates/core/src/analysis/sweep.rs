use std::io::Write;

use rayon::prelude::*;

use crate::cascade::{run, ConfigError, SimConfig};
use crate::graph::Graph;
use crate::Scalar;

/// Seed for replicate `replicate` of a sweep with base seed `base`.
///
/// SplitMix64 finalizer applied to `base ^ ((replicate + 1) * 0x9E3779B97F4A7C15)`.
pub fn derive_seed(base: u64, replicate: u64) -> u64 {
    let mut z = base
        ^ replicate
            .wrapping_add(1)
            .wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow<S> {
    pub epsilon: S,
    pub replicate: usize,
    pub seed: u64,
    pub steps_to_50: Option<usize>,
    pub steps_to_90: Option<usize>,
    pub steps_to_full: Option<usize>,
    pub terminal_fraction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult<S> {
    pub epsilons: Vec<S>,
    pub replicates: usize,
    /// Ordered by epsilon index, then replicate.
    pub rows: Vec<SweepRow<S>>,
}

impl<S: Scalar> SweepResult<S> {
    pub fn rows_for(&self, epsilon_index: usize) -> &[SweepRow<S>] {
        let start = epsilon_index * self.replicates;
        &self.rows[start..start + self.replicates]
    }

    /// Median of `steps_to_90` over replicates; runs that never reach 90%
    /// count as infinitely slow.
    pub fn median_steps_to_90(&self, epsilon_index: usize) -> f64 {
        let mut values: Vec<f64> = self
            .rows_for(epsilon_index)
            .iter()
            .map(|r| r.steps_to_90.map_or(f64::INFINITY, |s| s as f64))
            .collect();
        values.sort_by(f64::total_cmp);
        let mid = values.len() / 2;
        if values.len() % 2 == 1 {
            values[mid]
        } else {
            (values[mid - 1] + values[mid]) / 2.0
        }
    }

    /// CSV with columns
    /// `epsilon,replicate,seed,steps_to_50,steps_to_90,steps_to_full,terminal_fraction`;
    /// unreached crossings are written as `-1`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let steps = |s: Option<usize>| s.map_or_else(|| "-1".to_string(), |v| v.to_string());
        writeln!(
            out,
            "epsilon,replicate,seed,steps_to_50,steps_to_90,steps_to_full,terminal_fraction"
        )?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.epsilon.to_f64_lossy(),
                r.replicate,
                r.seed,
                steps(r.steps_to_50),
                steps(r.steps_to_90),
                steps(r.steps_to_full),
                r.terminal_fraction
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

/// Runs every `(epsilon, replicate)` cell. Replicate `i` uses
/// `derive_seed(base.rng_seed, i)` for every epsilon, so runs are paired.
pub fn sweep_epsilon<S: Scalar>(
    graph: &Graph,
    base: &SimConfig<S>,
    epsilons: &[S],
    replicates: usize,
) -> Result<SweepResult<S>, ConfigError> {
    let configs: Vec<SimConfig<S>> = epsilons
        .iter()
        .flat_map(|&epsilon| {
            (0..replicates).map(move |i| SimConfig {
                epsilon,
                rng_seed: derive_seed(base.rng_seed, i as u64),
                ..base.clone()
            })
        })
        .collect();
    for cfg in &configs {
        cfg.validate()?;
    }

    let rows = configs
        .par_iter()
        .enumerate()
        .map(|(cell, cfg)| {
            let trace = run(graph, cfg)?;
            Ok(SweepRow {
                epsilon: cfg.epsilon,
                replicate: cell % replicates,
                seed: cfg.rng_seed,
                steps_to_50: trace.steps_to_fraction(0.5),
                steps_to_90: trace.steps_to_fraction(0.9),
                steps_to_full: trace.steps_to_full(),
                terminal_fraction: trace.fraction(trace.terminal_adopters()),
            })
        })
        .collect::<Result<Vec<_>, ConfigError>>()?;

    Ok(SweepResult {
        epsilons: epsilons.to_vec(),
        replicates,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::generators::preferential_attachment;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn seed_mix_is_stable_and_spreads() {
        // frozen so sweeps stay reproducible across releases
        assert_eq!(derive_seed(0, 0), 0xE220_A839_7B1D_CDAF);
        let seeds: std::collections::HashSet<u64> = (0..1000).map(|i| derive_seed(42, i)).collect();
        assert_eq!(seeds.len(), 1000);
        assert_ne!(derive_seed(1, 0), derive_seed(0, 1));
    }

    #[test]
    fn single_cell_matches_direct_run() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = preferential_attachment(200, 2, &mut rng);
        let base = SimConfig::new(0.3, 0.6).with_p(0.01).with_rng_seed(77);
        let sweep = sweep_epsilon(&g, &base, &[0.3], 1).unwrap();
        assert_eq!(sweep.rows.len(), 1);
        let direct = run(&g, &base.clone().with_rng_seed(derive_seed(77, 0))).unwrap();
        let row = &sweep.rows[0];
        assert_eq!(row.seed, derive_seed(77, 0));
        assert_eq!(row.steps_to_50, direct.steps_to_fraction(0.5));
        assert_eq!(row.steps_to_90, direct.steps_to_fraction(0.9));
        assert_eq!(row.steps_to_full, direct.steps_to_full());
        assert_eq!(
            row.terminal_fraction,
            direct.fraction(direct.terminal_adopters())
        );
    }

    #[test]
    fn rows_are_paired_and_ordered() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = preferential_attachment(100, 2, &mut rng);
        let base = SimConfig::new(0.1, 0.6).with_p(0.01).with_rng_seed(3);
        let sweep = sweep_epsilon(&g, &base, &[0.1, 0.3, 0.5], 4).unwrap();
        assert_eq!(sweep.rows.len(), 12);
        for (i, row) in sweep.rows.iter().enumerate() {
            assert_eq!(row.replicate, i % 4);
            assert_eq!(row.seed, sweep.rows[i % 4].seed);
            assert_eq!(row.epsilon, [0.1, 0.3, 0.5][i / 4]);
            if let (Some(a), Some(b), Some(c)) =
                (row.steps_to_50, row.steps_to_90, row.steps_to_full)
            {
                assert!(a <= b && b <= c);
            }
            assert!((0.0..=1.0).contains(&row.terminal_fraction));
        }
    }

    #[test]
    fn no_spread_beyond_seeds_when_impossible() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let g = preferential_attachment(100, 3, &mut rng);
        let base = SimConfig::new(0.6, 0.6).with_p(0.0).with_seeds([0, 5, 9]);
        let sweep = sweep_epsilon(&g, &base, &[0.6, 0.8, 1.0], 3).unwrap();
        for row in &sweep.rows {
            assert_eq!(row.terminal_fraction, 3.0 / 100.0);
            assert_eq!(row.steps_to_50, None);
        }
    }

    #[test]
    fn invalid_epsilon_rejected() {
        let g = Graph::from_edges(3, [(0, 1)]).unwrap();
        assert!(sweep_epsilon(&g, &SimConfig::new(0.1, 0.5), &[0.1, 1.2], 2).is_err());
    }

    #[test]
    fn median_handles_unreached() {
        let row = |s: Option<usize>| SweepRow {
            epsilon: 0.1,
            replicate: 0,
            seed: 0,
            steps_to_50: None,
            steps_to_90: s,
            steps_to_full: None,
            terminal_fraction: 0.0,
        };
        let result = SweepResult {
            epsilons: vec![0.1],
            replicates: 4,
            rows: vec![row(Some(10)), row(None), row(Some(4)), row(Some(20))],
        };
        assert_eq!(result.median_steps_to_90(0), 15.0);
        let csv = result.to_csv_string();
        assert!(csv
            .lines()
            .nth(2)
            .unwrap()
            .starts_with("0.1,0,0,-1,-1,-1,0"));
    }
}
