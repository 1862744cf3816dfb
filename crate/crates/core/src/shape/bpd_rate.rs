use rand::Rng;

use super::ShapeError;
use crate::measure::{branch_point_distribution, Measure};
use crate::rng::{mix_seed, par_map, rng_from_seed};
use crate::scalar::Scalar;
use crate::tree::AlgebraicTree;

/// Errors of the empirical branch point distribution, one per trial.
#[derive(Clone, Debug, PartialEq)]
pub struct BpdRateReport {
    pub p: usize,
    pub errors: Vec<f64>,
    /// `96 √(2/p)`.
    pub bound: f64,
}

impl BpdRateReport {
    pub fn max_error(&self) -> f64 {
        self.errors.iter().copied().fold(0.0, f64::max)
    }

    pub fn median_error(&self) -> f64 {
        let mut e = self.errors.clone();
        e.sort_by(f64::total_cmp);
        match e.len() {
            0 => 0.0,
            k if k % 2 == 1 => e[k / 2],
            k => 0.5 * (e[k / 2 - 1] + e[k / 2]),
        }
    }

    pub fn all_within_bound(&self) -> bool {
        self.errors.iter().all(|&e| e <= self.bound)
    }
}

/// For each trial, draws `3p` points from `mu`, forms the empirical law of
/// the `p` branch points of consecutive triples, and records the largest
/// difference to the exact branch point distribution over all intervals.
pub fn empirical_bpd_error<S: Scalar>(
    tree: &AlgebraicTree,
    mu: &Measure<S>,
    p: usize,
    trials: usize,
    seed: u64,
    jobs: usize,
) -> Result<BpdRateReport, ShapeError> {
    if p == 0 {
        return Err(ShapeError::EmptySample);
    }
    let mu = mu.to_f64();
    let xi = branch_point_distribution(tree, &mu)?;
    let xi_dense: Vec<f64> = tree.vertices().iter().map(|&v| xi.mass(v)).collect();
    let (ids, cdf): (Vec<usize>, Vec<f64>) = {
        let mut acc = 0.0;
        mu.iter()
            .map(|(v, m)| {
                acc += m;
                (tree.index_of(v).expect("measure checked against tree"), acc)
            })
            .unzip()
    };
    let hang = tree.hang(0);
    let n = tree.len();
    let hangings: Vec<_> = (0..n).map(|x| tree.hang(x)).collect();
    let trial = |t: usize| {
        let mut rng = rng_from_seed(mix_seed(seed, &[t as u64]));
        let mut draw = || {
            let u = rng.random::<f64>() * cdf[cdf.len() - 1];
            ids[cdf.partition_point(|&c| c <= u).min(ids.len() - 1)]
        };
        let mut hits = vec![0usize; n];
        for _ in 0..p {
            let (a, b, c) = (draw(), draw(), draw());
            hits[hang.median(a, b, c)] += 1;
        }
        let diff: Vec<f64> = (0..n).map(|v| xi_dense[v] - hits[v] as f64 / p as f64).collect();
        let mut worst = 0.0f64;
        for h in &hangings {
            let mut along = vec![0.0; n];
            for &v in &h.order {
                along[v] = diff[v] + if v == h.order[0] { 0.0 } else { along[h.parent[v]] };
                worst = worst.max(along[v].abs());
            }
        }
        worst
    };
    let errors = par_map((0..trials).collect(), jobs, trial);
    Ok(BpdRateReport { p, errors, bound: 96.0 * (2.0 / p as f64).sqrt() })
}
