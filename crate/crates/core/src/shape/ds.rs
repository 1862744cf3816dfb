use std::collections::BTreeMap;

use super::dist::{shape_distribution_exact, shape_distribution_mc, tv_distance, ShapeDistribution};
use super::enumerate::{enumeration_terms, EXACT_LIMIT};
use super::ShapeError;
use crate::measure::A2mTree;
use crate::rng::mix_seed;
use crate::scalar::Scalar;

/// Finite part of the sample shape distance: host counts `1..=m_max` and,
/// for each, the first `per_m_budget` row-size vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Truncation {
    pub m_max: usize,
    pub per_m_budget: usize,
}

/// The first `budget` vectors in `ℕ^m`, ordered by increasing sum and then
/// lexicographically.
pub fn compositions_by_size(m: usize, budget: usize) -> Vec<Vec<u32>> {
    fn fill(m: usize, s: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>, budget: usize) {
        if out.len() >= budget {
            return;
        }
        if prefix.len() + 1 == m {
            prefix.push(s);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        let rest = (m - prefix.len() - 1) as u32;
        for first in 1..=s - rest {
            prefix.push(first);
            fill(m, s - first, prefix, out, budget);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if m == 0 {
        return out;
    }
    let mut s = m as u32;
    while out.len() < budget {
        fill(m, s, &mut Vec::new(), &mut out, budget);
        s += 1;
    }
    out
}

impl Truncation {
    pub fn index_sets(&self) -> Vec<Vec<u32>> {
        (1..=self.m_max).flat_map(|m| compositions_by_size(m, self.per_m_budget)).collect()
    }

    /// Weight `2^{-m} 2^{-|n|}` of one term.
    pub fn weight(n: &[u32]) -> f64 {
        let exponent = n.len() as i32 + n.iter().sum::<u32>() as i32;
        2f64.powi(-exponent)
    }

    /// Total weight of the omitted terms; every term is at most its weight.
    pub fn tail_bound(&self) -> f64 {
        let covered: f64 = self.index_sets().iter().map(|n| Self::weight(n)).sum();
        (1.0 - covered).max(0.0)
    }
}

/// Shape distributions for a set of index vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct ShapeProfile {
    pub dists: BTreeMap<Vec<u32>, ShapeDistribution<f64>>,
}

/// Anything that can produce shape distributions.
pub trait ShapeSource: Sync {
    fn distribution(&self, n: &[u32], samples: u64, seed: u64, jobs: usize) -> Result<ShapeDistribution<f64>, ShapeError>;

    /// Distributions for all index sets; each uses a seed derived from
    /// `seed` and the index vector, so equal sources give equal profiles.
    fn profile(&self, index_sets: &[Vec<u32>], samples: u64, seed: u64, jobs: usize) -> Result<ShapeProfile, ShapeError> {
        let mut dists = BTreeMap::new();
        for n in index_sets {
            let salt: Vec<u64> = n.iter().map(|&k| k as u64).collect();
            dists.insert(n.clone(), self.distribution(n, samples, mix_seed(seed, &salt), jobs)?);
        }
        Ok(ShapeProfile { dists })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProfileMethod {
    Exact,
    Mc,
    /// Exact when enumeration needs at most [`A2mSource::AUTO_LIMIT`] terms.
    Auto,
}

pub struct A2mSource<'a, S> {
    pub chi: &'a A2mTree<S>,
    pub method: ProfileMethod,
}

impl<S: Scalar> A2mSource<'_, S> {
    pub const AUTO_LIMIT: u128 = 20_000;
}

impl<S: Scalar> ShapeSource for A2mSource<'_, S> {
    fn distribution(&self, n: &[u32], samples: u64, seed: u64, jobs: usize) -> Result<ShapeDistribution<f64>, ShapeError> {
        if !self.chi.tree.is_binary() {
            return Err(ShapeError::NotBinaryTree);
        }
        let exact = match self.method {
            ProfileMethod::Exact => true,
            ProfileMethod::Mc => false,
            ProfileMethod::Auto => enumeration_terms(&self.chi.nu, n) <= Self::AUTO_LIMIT.min(EXACT_LIMIT),
        };
        if exact {
            Ok(shape_distribution_exact(self.chi, n)?.to_f64())
        } else {
            shape_distribution_mc(self.chi, n, samples, seed, jobs)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DsEstimate {
    pub value: f64,
    /// Upper bound on the contribution of the omitted terms.
    pub tail_bound: f64,
}

/// Truncated sample shape distance between two precomputed profiles.
pub fn d_s_from_profiles(a: &ShapeProfile, b: &ShapeProfile, truncation: &Truncation) -> Result<DsEstimate, ShapeError> {
    let mut value = 0.0;
    for n in truncation.index_sets() {
        let (Some(p), Some(q)) = (a.dists.get(&n), b.dists.get(&n)) else {
            return Err(ShapeError::MismatchedIndexSets(n.clone(), n));
        };
        value += Truncation::weight(&n) * tv_distance(p, q)?.min(1.0);
    }
    Ok(DsEstimate { value, tail_bound: truncation.tail_bound() })
}

/// Truncated sample shape distance between two sources.
pub fn d_s_truncated(
    a: &dyn ShapeSource,
    b: &dyn ShapeSource,
    truncation: &Truncation,
    samples: u64,
    seed: u64,
    jobs: usize,
) -> Result<DsEstimate, ShapeError> {
    let sets = truncation.index_sets();
    let pa = a.profile(&sets, samples, seed, jobs)?;
    let pb = b.profile(&sets, samples, seed, jobs)?;
    d_s_from_profiles(&pa, &pb, truncation)
}
