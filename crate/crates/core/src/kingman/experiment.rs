use std::collections::BTreeMap;

use rand::Rng;
use thiserror::Error;

use crate::rng::{mix_seed, run_chunks, SimRng};
use crate::shape::{
    d_s_from_profiles, index_set, shape, Label, ShapeDistribution, ShapeError, ShapeMode, ShapeProfile, ShapeSource,
    Truncation,
};
use crate::tree::VertexId;

use super::{history_to_tree, simulate, simulate_on, HistoryError};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    History(#[from] HistoryError),
    #[error(transparent)]
    Shape(#[from] ShapeError),
}

/// Compares the restriction of a large coalescent with a direct simulation
/// on the smaller index set.
#[derive(Clone, Debug, PartialEq)]
pub struct ConsistencyConfig {
    /// Parasites per host of the large index set.
    pub n: Vec<u32>,
    /// Parasites per host of the restricted set, taken from the first hosts
    /// and the first parasites of each.
    pub j: Vec<u32>,
    pub gamma_h: f64,
    pub gamma_p: f64,
    pub samples: u64,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub struct ConsistencyReport {
    pub restricted: ShapeDistribution<f64>,
    pub direct: ShapeDistribution<f64>,
    pub tv: f64,
    /// Number of rooted shapes seen by either run.
    pub support: usize,
    /// `3 sqrt(support / samples)`.
    pub threshold: f64,
    pub pass: bool,
}

fn tally(
    samples: u64,
    seed: u64,
    jobs: usize,
    n: &[u32],
    draw: impl Fn(&mut SimRng) -> Result<String, ExperimentError> + Sync + Send,
) -> Result<ShapeDistribution<f64>, ExperimentError> {
    let chunks = run_chunks(samples, seed, jobs, |_, rng, draws| {
        let mut counts: BTreeMap<String, u64> = BTreeMap::new();
        for _ in 0..draws {
            *counts.entry(draw(rng)?).or_insert(0) += 1;
        }
        Ok::<_, ExperimentError>(counts)
    });
    let mut total: BTreeMap<String, u64> = BTreeMap::new();
    for chunk in chunks {
        for (code, c) in chunk? {
            *total.entry(code).or_insert(0) += c;
        }
    }
    Ok(ShapeDistribution {
        n: n.to_vec(),
        mode: ShapeMode::Mc,
        samples: Some(samples),
        probs: total.into_iter().map(|(c, k)| (c, k as f64 / samples as f64)).collect(),
    })
}

/// Rooted shape law of the full tree of simulated histories on `n`.
pub fn rooted_shape_distribution(
    n: &[u32],
    gamma_h: f64,
    gamma_p: f64,
    samples: u64,
    seed: u64,
    jobs: usize,
) -> Result<ShapeDistribution<f64>, ExperimentError> {
    if samples == 0 {
        return Err(ShapeError::EmptySample.into());
    }
    let labels = index_set(n);
    tally(samples, seed, jobs, n, |rng| {
        let h = simulate_on(&labels, gamma_h, gamma_p, rng)?;
        Ok(history_to_tree(&h)?.rooted_shape_code()?)
    })
}

/// Two-sample test that restriction commutes with simulation, on rooted
/// shapes of the induced trees.
pub fn consistency_test(config: &ConsistencyConfig, jobs: usize) -> Result<ConsistencyReport, ExperimentError> {
    let c = config;
    let fits = c.j.len() <= c.n.len() && c.j.iter().zip(&c.n).all(|(a, b)| a <= b);
    if c.j.is_empty() || c.j.contains(&0) || !fits {
        return Err(HistoryError::InvalidParameters(format!("{:?} is not contained in {:?}", c.j, c.n)).into());
    }
    if c.samples == 0 {
        return Err(ShapeError::EmptySample.into());
    }
    let j_labels = index_set(&c.j);
    let restricted = tally(c.samples, mix_seed(c.seed, &[0]), jobs, &c.j, |rng| {
        let h = simulate(&c.n, c.gamma_h, c.gamma_p, rng)?.restrict(&j_labels)?;
        Ok(history_to_tree(&h)?.rooted_shape_code()?)
    })?;
    let direct = rooted_shape_distribution(&c.j, c.gamma_h, c.gamma_p, c.samples, mix_seed(c.seed, &[1]), jobs)?;
    let tv = crate::shape::tv_distance(&restricted, &direct)?;
    let support = restricted.probs.keys().chain(direct.probs.keys()).collect::<std::collections::BTreeSet<_>>().len();
    let threshold = 3.0 * (support as f64 / c.samples as f64).sqrt();
    Ok(ConsistencyReport { restricted, direct, tv, support, threshold, pass: tv <= threshold })
}

/// Annealed shape laws of the empirical two-level measure of a nested
/// coalescent tree: the tree is redrawn for every sample.
#[derive(Clone, Debug, PartialEq)]
pub struct KingmanSource {
    pub n: Vec<u32>,
    pub gamma_h: f64,
    pub gamma_p: f64,
}

impl KingmanSource {
    fn codes(&self, index_sets: &[Vec<u32>], rng: &mut SimRng) -> Result<Vec<String>, ExperimentError> {
        let h = simulate(&self.n, self.gamma_h, self.gamma_p, rng)?;
        let e = history_to_tree(&h)?;
        let mut offsets = Vec::with_capacity(self.n.len());
        let mut acc: VertexId = 0;
        for &k in &self.n {
            offsets.push(acc);
            acc += k as VertexId;
        }
        let mut out = Vec::with_capacity(index_sets.len());
        for sizes in index_sets {
            let mut points = Vec::new();
            for (i, &k) in sizes.iter().enumerate() {
                let host = rng.random_range(0..self.n.len());
                for j in 0..k {
                    let leaf = offsets[host] + rng.random_range(0..self.n[host]) as VertexId;
                    points.push((Label::new(i as u32 + 1, j + 1), leaf));
                }
            }
            out.push(shape(&e.chi.tree, &points)?.canonical_code());
        }
        Ok(out)
    }

    fn run(&self, index_sets: &[Vec<u32>], samples: u64, seed: u64, jobs: usize) -> Result<ShapeProfile, ShapeError> {
        for n in index_sets {
            crate::shape::check_index_set(n)?;
        }
        if samples == 0 {
            return Err(ShapeError::EmptySample);
        }
        let chunks = run_chunks(samples, seed, jobs, |_, rng, draws| {
            let mut counts: Vec<BTreeMap<String, u64>> = vec![BTreeMap::new(); index_sets.len()];
            for _ in 0..draws {
                let codes = self.codes(index_sets, rng).map_err(|e| match e {
                    ExperimentError::Shape(s) => s,
                    ExperimentError::History(h) => ShapeError::Simulation(h.to_string()),
                })?;
                for (slot, code) in counts.iter_mut().zip(codes) {
                    *slot.entry(code).or_insert(0) += 1;
                }
            }
            Ok::<_, ShapeError>(counts)
        });
        let mut total: Vec<BTreeMap<String, u64>> = vec![BTreeMap::new(); index_sets.len()];
        for chunk in chunks {
            for (slot, counts) in total.iter_mut().zip(chunk?) {
                for (code, c) in counts {
                    *slot.entry(code).or_insert(0) += c;
                }
            }
        }
        let dists = index_sets
            .iter()
            .zip(total)
            .map(|(n, counts)| {
                let probs = counts.into_iter().map(|(c, k)| (c, k as f64 / samples as f64)).collect();
                (n.clone(), ShapeDistribution { n: n.clone(), mode: ShapeMode::Mc, samples: Some(samples), probs })
            })
            .collect();
        Ok(ShapeProfile { dists })
    }
}

impl ShapeSource for KingmanSource {
    fn distribution(&self, n: &[u32], samples: u64, seed: u64, jobs: usize) -> Result<ShapeDistribution<f64>, ShapeError> {
        let mut p = self.run(&[n.to_vec()], samples, seed, jobs)?;
        Ok(p.dists.pop_first().expect("one entry").1)
    }

    /// One simulated tree serves every index set of a replicate.
    fn profile(&self, index_sets: &[Vec<u32>], samples: u64, seed: u64, jobs: usize) -> Result<ShapeProfile, ShapeError> {
        self.run(index_sets, samples, seed, jobs)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceConfig {
    /// Index sizes `N̄` of the successive coalescents.
    pub schedule: Vec<Vec<u32>>,
    pub gamma_h: f64,
    pub gamma_p: f64,
    pub truncation: Truncation,
    pub samples: u64,
    pub seeds: u64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    /// Index of the first schedule entry; the second is `step + 1`.
    pub step: usize,
    pub seed: u64,
    pub estimate: f64,
    pub tail_bound: f64,
}

/// Truncated shape distance between consecutive schedule entries, repeated
/// over independent seeds.
pub fn convergence_experiment(config: &ConvergenceConfig, jobs: usize) -> Result<Vec<ConvergenceRow>, ShapeError> {
    let c = config;
    let sets = c.truncation.index_sets();
    let mut rows = Vec::new();
    for s in 0..c.seeds {
        let seed = mix_seed(c.seed, &[s]);
        let mut profiles = Vec::with_capacity(c.schedule.len());
        for (k, n) in c.schedule.iter().enumerate() {
            let src = KingmanSource { n: n.clone(), gamma_h: c.gamma_h, gamma_p: c.gamma_p };
            profiles.push(src.profile(&sets, c.samples, mix_seed(seed, &[k as u64]), jobs)?);
        }
        for (step, w) in profiles.windows(2).enumerate() {
            let d = d_s_from_profiles(&w[0], &w[1], &c.truncation)?;
            rows.push(ConvergenceRow { step, seed, estimate: d.value, tail_bound: d.tail_bound });
        }
    }
    Ok(rows)
}

/// Median estimate for each step.
pub fn median_by_step(rows: &[ConvergenceRow]) -> Vec<f64> {
    let steps = rows.iter().map(|r| r.step + 1).max().unwrap_or(0);
    (0..steps)
        .map(|s| {
            let mut v: Vec<f64> = rows.iter().filter(|r| r.step == s).map(|r| r.estimate).collect();
            v.sort_by(f64::total_cmp);
            match v.len() {
                0 => f64::NAN,
                k if k % 2 == 1 => v[k / 2],
                k => (v[k / 2 - 1] + v[k / 2]) / 2.0,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_host_triple_is_uniform_on_rooted_shapes() {
        let d = rooted_shape_distribution(&[3], 1.0, 1.0, 6000, 9, 2).unwrap();
        assert_eq!(d.support_size(), 3);
        assert!(d.probs.values().all(|p| (p - 1.0 / 3.0).abs() < 0.03));
    }

    #[test]
    fn consistency_small() {
        let cfg = ConsistencyConfig { n: vec![2, 3], j: vec![2, 1], gamma_h: 1.0, gamma_p: 1.5, samples: 4000, seed: 1 };
        let r = consistency_test(&cfg, 2).unwrap();
        assert!(r.pass, "tv {} threshold {}", r.tv, r.threshold);
        let bad = ConsistencyConfig { j: vec![3], ..cfg };
        assert!(consistency_test(&bad, 1).is_err());
    }

    #[test]
    fn kingman_profile_is_reproducible() {
        let src = KingmanSource { n: vec![2, 2], gamma_h: 1.0, gamma_p: 1.0 };
        let sets = Truncation { m_max: 2, per_m_budget: 2 }.index_sets();
        let a = src.profile(&sets, 300, 4, 1).unwrap();
        let b = src.profile(&sets, 300, 4, 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn medians() {
        let row = |step, estimate| ConvergenceRow { step, seed: 0, estimate, tail_bound: 0.0 };
        assert_eq!(median_by_step(&[row(0, 3.0), row(0, 1.0), row(1, 2.0), row(0, 2.0)]), vec![2.0, 2.0]);
    }
}
