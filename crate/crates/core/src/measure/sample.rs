use rand::Rng;

use super::{MeasureError, TwoLevelMeasure};
use crate::rng::{rng_from_seed, SimRng};
use crate::scalar::Scalar;
use crate::tree::VertexId;

/// Row `i` holds the points `u_{i1}, …, u_{i n_i}`.
pub type SampleMatrix = Vec<Vec<VertexId>>;

/// Precomputed cumulative weights for fast two-level sampling.
#[derive(Clone, Debug)]
pub struct TwoLevelSampler {
    weights: Vec<f64>,
    components: Vec<(Vec<VertexId>, Vec<f64>)>,
}

fn cumulative(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut acc = 0.0;
    values
        .map(|v| {
            acc += v;
            acc
        })
        .collect()
}

fn pick(cdf: &[f64], rng: &mut SimRng) -> usize {
    let total = *cdf.last().expect("nonempty distribution");
    let u = rng.random::<f64>() * total;
    cdf.partition_point(|&c| c <= u).min(cdf.len() - 1)
}

impl TwoLevelSampler {
    pub fn new<S: Scalar>(nu: &TwoLevelMeasure<S>) -> Self {
        let weights = cumulative(nu.components().iter().map(|(w, _)| w.to_f64()));
        let components = nu
            .components()
            .iter()
            .map(|(_, mu)| {
                let (ids, masses): (Vec<VertexId>, Vec<f64>) = mu.iter().map(|(v, m)| (v, m.to_f64())).unzip();
                (ids, cumulative(masses.into_iter()))
            })
            .collect();
        TwoLevelSampler { weights, components }
    }

    pub fn component(&self, rng: &mut SimRng) -> usize {
        pick(&self.weights, rng)
    }

    pub fn point(&self, component: usize, rng: &mut SimRng) -> VertexId {
        let (ids, cdf) = &self.components[component];
        ids[pick(cdf, rng)]
    }

    /// One host row: a component drawn from the weights, then `n` iid points.
    pub fn row(&self, n: u32, rng: &mut SimRng) -> Vec<VertexId> {
        let c = self.component(rng);
        (0..n).map(|_| self.point(c, rng)).collect()
    }

    pub fn sample(&self, n: &[u32], rng: &mut SimRng) -> SampleMatrix {
        n.iter().map(|&k| self.row(k, rng)).collect()
    }
}

/// Draws a sample matrix with row lengths `n`, reproducible from `seed`.
pub fn sample_two_level<S: Scalar>(nu: &TwoLevelMeasure<S>, n: &[u32], seed: u64) -> Result<SampleMatrix, MeasureError> {
    if n.is_empty() || n.contains(&0) {
        return Err(MeasureError::EmptyIndexSet);
    }
    let mut rng = rng_from_seed(seed);
    Ok(TwoLevelSampler::new(nu).sample(n, &mut rng))
}
