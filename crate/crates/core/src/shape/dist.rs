use std::collections::BTreeMap;

use super::enumerate::{check_index_set, for_each_sample};
use super::{index_set, shape, Cladogram, Label, ShapeError};
use crate::measure::{A2mTree, TwoLevelSampler};
use crate::rng::run_chunks;
use crate::scalar::Scalar;
use crate::tree::{AlgebraicTree, VertexId};

/// Attempts at redrawing a host row that hit a branch point.
const MAX_REDRAWS: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShapeMode {
    Exact,
    Mc,
}

impl ShapeMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            ShapeMode::Exact => "exact",
            ShapeMode::Mc => "mc",
        }
    }
}

/// Law of the sample shape for index set `n`, keyed by canonical code.
#[derive(Clone, Debug, PartialEq)]
pub struct ShapeDistribution<S> {
    pub n: Vec<u32>,
    pub mode: ShapeMode,
    /// Number of Monte Carlo draws, `None` for exact distributions.
    pub samples: Option<u64>,
    pub probs: BTreeMap<String, S>,
}

impl<S: Scalar> ShapeDistribution<S> {
    pub fn m(&self) -> usize {
        self.n.len()
    }

    pub fn total(&self) -> S {
        crate::scalar::sum(self.probs.values())
    }

    pub fn prob(&self, code: &str) -> S {
        self.probs.get(code).cloned().unwrap_or_else(S::zero)
    }

    pub fn support_size(&self) -> usize {
        self.probs.len()
    }

    /// Mass on codes where some leaf carries several labels.
    pub fn non_injective_mass(&self) -> S {
        crate::scalar::sum(self.probs.iter().filter(|(c, _)| c.contains(',')).map(|(_, p)| p))
    }

    pub fn to_f64(&self) -> ShapeDistribution<f64> {
        ShapeDistribution {
            n: self.n.clone(),
            mode: self.mode,
            samples: self.samples,
            probs: self.probs.iter().map(|(c, p)| (c.clone(), p.to_f64())).collect(),
        }
    }

    /// Pushes the distribution forward under a relabelling of the index set.
    pub fn relabel(&self, f: impl Fn(Label) -> Label) -> Result<Self, ShapeError> {
        let mut probs: BTreeMap<String, S> = BTreeMap::new();
        for (code, p) in &self.probs {
            let c = Cladogram::from_code(code)?.relabel(&f)?.canonical_code();
            let slot = probs.entry(c).or_insert_with(S::zero);
            *slot = slot.clone() + p.clone();
        }
        Ok(ShapeDistribution { n: self.n.clone(), mode: self.mode, samples: self.samples, probs })
    }
}

fn labelled(labels: &[Label], rows: &[Vec<VertexId>]) -> Vec<(Label, VertexId)> {
    labels.iter().copied().zip(rows.iter().flatten().copied()).collect()
}

/// Exact shape distribution by enumerating every mixture component and
/// sample assignment with positive probability.
pub fn shape_distribution_exact<S: Scalar>(chi: &A2mTree<S>, n: &[u32]) -> Result<ShapeDistribution<S>, ShapeError> {
    let labels = index_set(n);
    let mut probs: BTreeMap<String, S> = BTreeMap::new();
    for_each_sample(&chi.nu, n, |rows, p| -> Result<(), ShapeError> {
        let code = shape(&chi.tree, &labelled(&labels, rows))?.canonical_code();
        let slot = probs.entry(code).or_insert_with(S::zero);
        *slot = slot.clone() + p.clone();
        Ok(())
    })?;
    Ok(ShapeDistribution { n: n.to_vec(), mode: ShapeMode::Exact, samples: None, probs })
}

pub(crate) fn draw_row(
    tree: &AlgebraicTree,
    sampler: &TwoLevelSampler,
    k: u32,
    rng: &mut crate::rng::SimRng,
) -> Result<Vec<VertexId>, ShapeError> {
    let mut last = None;
    for _ in 0..MAX_REDRAWS {
        let row = sampler.row(k, rng);
        match row.iter().find(|&&v| tree.degree(v).unwrap_or(0) >= 3) {
            None => return Ok(row),
            Some(&v) => last = Some(v),
        }
    }
    Err(ShapeError::SampleOnBranchPoint(last.expect("at least one attempt")))
}

/// Empirical shape distribution of `samples` independent two-level samples.
///
/// Host rows containing a branch point are redrawn.
pub fn shape_distribution_mc<S: Scalar>(
    chi: &A2mTree<S>,
    n: &[u32],
    samples: u64,
    seed: u64,
    jobs: usize,
) -> Result<ShapeDistribution<f64>, ShapeError> {
    check_index_set(n)?;
    if samples == 0 {
        return Err(ShapeError::EmptySample);
    }
    let labels = index_set(n);
    let sampler = TwoLevelSampler::new(&chi.nu);
    let chunks = run_chunks(samples, seed, jobs, |_, rng, draws| {
        let mut counts: BTreeMap<String, u64> = BTreeMap::new();
        for _ in 0..draws {
            let rows = n.iter().map(|&k| draw_row(&chi.tree, &sampler, k, rng)).collect::<Result<Vec<_>, _>>()?;
            let code = shape(&chi.tree, &labelled(&labels, &rows))?.canonical_code();
            *counts.entry(code).or_insert(0) += 1;
        }
        Ok::<_, ShapeError>(counts)
    });
    let mut total: BTreeMap<String, u64> = BTreeMap::new();
    for chunk in chunks {
        for (code, c) in chunk? {
            *total.entry(code).or_insert(0) += c;
        }
    }
    Ok(counts_to_distribution(n, samples, total))
}

pub(crate) fn counts_to_distribution(n: &[u32], samples: u64, counts: BTreeMap<String, u64>) -> ShapeDistribution<f64> {
    ShapeDistribution {
        n: n.to_vec(),
        mode: ShapeMode::Mc,
        samples: Some(samples),
        probs: counts.into_iter().map(|(c, k)| (c, k as f64 / samples as f64)).collect(),
    }
}

/// Total variation `½ Σ |P - Q|` between shape laws on the same index set.
pub fn tv_distance<S: Scalar>(p: &ShapeDistribution<S>, q: &ShapeDistribution<S>) -> Result<S, ShapeError> {
    if p.n != q.n {
        return Err(ShapeError::MismatchedIndexSets(p.n.clone(), q.n.clone()));
    }
    let mut keys: Vec<&String> = p.probs.keys().chain(q.probs.keys()).collect();
    keys.sort_unstable();
    keys.dedup();
    let sum = keys.into_iter().fold(S::zero(), |acc, k| acc + p.prob(k).abs_diff(&q.prob(k)));
    Ok(sum * S::half())
}
