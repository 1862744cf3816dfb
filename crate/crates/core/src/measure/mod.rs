//! One- and two-level measures on finite trees.

mod bpd;
mod sample;

pub use bpd::{branch_point_distribution, quotient_metric, r_xi_matrix, BranchPointDistribution, QuotientMetric};
pub use sample::{sample_two_level, SampleMatrix, TwoLevelSampler};

use std::collections::BTreeMap;

use thiserror::Error;

use crate::canon::canonical_form;
use crate::scalar::Scalar;
use crate::tree::{AlgebraicTree, TreeError, VertexId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MeasureError {
    #[error("negative mass at vertex {0}")]
    NegativeMass(VertexId),
    #[error("total mass is {0}, expected 1")]
    NotNormalized(String),
    #[error("negative mixture weight at component {0}")]
    NegativeWeight(usize),
    #[error("mixture weights sum to {0}, expected 1")]
    WeightsNotNormalized(String),
    #[error("two-level measure has no components")]
    Empty,
    #[error("mass on vertex {0}, which is not in the tree")]
    OutsideTree(VertexId),
    #[error("atom at vertex {0}, which is not a leaf")]
    AtomOffLeaf(VertexId),
    #[error("every host needs at least one sample and there must be at least one host")]
    EmptyIndexSet,
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// A probability measure on the vertices of a finite tree.
///
/// Zero masses are not stored.
#[derive(Clone, Debug, PartialEq)]
pub struct Measure<S> {
    masses: BTreeMap<VertexId, S>,
}

impl<S: Scalar> Measure<S> {
    /// Builds a probability measure; repeated vertices have their masses added.
    pub fn new<I: IntoIterator<Item = (VertexId, S)>>(masses: I) -> Result<Self, MeasureError> {
        let m = Self::unnormalized(masses)?;
        let total = m.total();
        if !total.close_to(&S::one()) {
            return Err(MeasureError::NotNormalized(total.to_text()));
        }
        Ok(m)
    }

    pub(crate) fn unnormalized<I: IntoIterator<Item = (VertexId, S)>>(masses: I) -> Result<Self, MeasureError> {
        let mut map: BTreeMap<VertexId, S> = BTreeMap::new();
        for (v, m) in masses {
            if m.is_negative() {
                return Err(MeasureError::NegativeMass(v));
            }
            let slot = map.entry(v).or_insert_with(S::zero);
            *slot = slot.clone() + m;
        }
        map.retain(|_, m| !m.is_zero());
        Ok(Measure { masses: map })
    }

    pub fn dirac(v: VertexId) -> Self {
        Measure { masses: BTreeMap::from([(v, S::one())]) }
    }

    /// Uniform measure on the given distinct vertices.
    pub fn uniform(vertices: &[VertexId]) -> Result<Self, MeasureError> {
        let k = vertices.len() as i64;
        if k == 0 {
            return Err(MeasureError::NotNormalized(S::zero().to_text()));
        }
        Self::new(vertices.iter().map(|&v| (v, S::from_ratio(1, k))))
    }

    pub fn mass(&self, v: VertexId) -> S {
        self.masses.get(&v).cloned().unwrap_or_else(S::zero)
    }

    pub fn mass_of<'a, I: IntoIterator<Item = &'a VertexId>>(&self, set: I) -> S {
        set.into_iter().fold(S::zero(), |acc, v| acc + self.mass(*v))
    }

    pub fn total(&self) -> S {
        crate::scalar::sum(self.masses.values())
    }

    /// Vertices with positive mass, increasing.
    pub fn support(&self) -> Vec<VertexId> {
        self.masses.keys().copied().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexId, &S)> {
        self.masses.iter().map(|(&v, m)| (v, m))
    }

    pub fn check_on(&self, tree: &AlgebraicTree) -> Result<(), MeasureError> {
        match self.masses.keys().find(|&&v| !tree.contains(v)) {
            Some(&v) => Err(MeasureError::OutsideTree(v)),
            None => Ok(()),
        }
    }

    /// Masses as a dense vector indexed like `tree.vertices()`.
    pub(crate) fn dense(&self, tree: &AlgebraicTree) -> Result<Vec<S>, MeasureError> {
        let mut out = vec![S::zero(); tree.len()];
        for (&v, m) in &self.masses {
            let i = tree.index_of(v).map_err(|_| MeasureError::OutsideTree(v))?;
            out[i] = m.clone();
        }
        Ok(out)
    }

    pub fn to_f64(&self) -> Measure<f64> {
        Measure { masses: self.masses.iter().map(|(&v, m)| (v, m.to_f64())).collect() }
    }
}

/// A finitely supported probability measure on probability measures:
/// `Σ_i w_i δ_{μ_i}`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoLevelMeasure<S> {
    components: Vec<(S, Measure<S>)>,
}

impl<S: Scalar> TwoLevelMeasure<S> {
    pub fn new(components: Vec<(S, Measure<S>)>) -> Result<Self, MeasureError> {
        if components.is_empty() {
            return Err(MeasureError::Empty);
        }
        if let Some(i) = components.iter().position(|(w, _)| w.is_negative()) {
            return Err(MeasureError::NegativeWeight(i));
        }
        let total = crate::scalar::sum(components.iter().map(|(w, _)| w));
        if !total.close_to(&S::one()) {
            return Err(MeasureError::WeightsNotNormalized(total.to_text()));
        }
        Ok(TwoLevelMeasure { components })
    }

    /// `δ_μ`: the one-level measure `μ` seen as a two-level measure.
    pub fn dirac(mu: Measure<S>) -> Self {
        TwoLevelMeasure { components: vec![(S::one(), mu)] }
    }

    pub fn components(&self) -> &[(S, Measure<S>)] {
        &self.components
    }

    /// The intensity measure `M_ν = Σ_i w_i μ_i`.
    pub fn intensity(&self) -> Measure<S> {
        let mut map: BTreeMap<VertexId, S> = BTreeMap::new();
        for (w, mu) in &self.components {
            for (v, m) in mu.iter() {
                let slot = map.entry(v).or_insert_with(S::zero);
                *slot = slot.clone() + w.clone() * m.clone();
            }
        }
        map.retain(|_, m| !m.is_zero());
        Measure { masses: map }
    }

    pub fn check_on(&self, tree: &AlgebraicTree) -> Result<(), MeasureError> {
        self.components.iter().try_for_each(|(_, mu)| mu.check_on(tree))
    }

    /// Every atom of every component sits on a leaf of `tree`.
    pub fn atoms_on_leaves(&self, tree: &AlgebraicTree) -> Result<(), MeasureError> {
        for (_, mu) in &self.components {
            for (v, _) in mu.iter() {
                if tree.degree(v).map_err(|_| MeasureError::OutsideTree(v))? > 1 {
                    return Err(MeasureError::AtomOffLeaf(v));
                }
            }
        }
        Ok(())
    }

    pub fn to_f64(&self) -> TwoLevelMeasure<f64> {
        TwoLevelMeasure { components: self.components.iter().map(|(w, mu)| (w.to_f64(), mu.to_f64())).collect() }
    }
}

/// A tree together with a two-level measure on its vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct A2mTree<S> {
    pub tree: AlgebraicTree,
    pub nu: TwoLevelMeasure<S>,
}

impl<S: Scalar> A2mTree<S> {
    pub fn new(tree: AlgebraicTree, nu: TwoLevelMeasure<S>) -> Result<Self, MeasureError> {
        nu.check_on(&tree)?;
        Ok(A2mTree { tree, nu })
    }

    pub fn to_f64(&self) -> A2mTree<f64> {
        A2mTree { tree: self.tree.clone(), nu: self.nu.to_f64() }
    }

    /// Equivalence-class code of the tree with its two-level measure.
    ///
    /// Leaves without intensity are pruned repeatedly and massless vertices
    /// of degree two are suppressed. Each remaining vertex is labelled by its
    /// masses in every component, so the code depends on the order of the
    /// mixture components.
    pub fn canonical_code(&self) -> String {
        let intensity = self.nu.intensity();
        let n = self.tree.len();
        let mut alive = vec![true; n];
        let mut adj: Vec<Vec<usize>> = self.tree.adjacency().to_vec();
        let massless = |i: usize| intensity.mass(self.tree.id(i)).is_zero();
        let mut changed = true;
        while changed {
            changed = false;
            for i in 0..n {
                if !alive[i] || !massless(i) {
                    continue;
                }
                let live = adj[i].len();
                let others = alive.iter().filter(|&&a| a).count();
                if live <= 1 && others > 1 {
                    alive[i] = false;
                    for j in std::mem::take(&mut adj[i]) {
                        adj[j].retain(|&x| x != i);
                    }
                    changed = true;
                } else if live == 2 {
                    let (a, b) = (adj[i][0], adj[i][1]);
                    alive[i] = false;
                    adj[i].clear();
                    adj[a].retain(|&x| x != i);
                    adj[b].retain(|&x| x != i);
                    adj[a].push(b);
                    adj[b].push(a);
                    changed = true;
                }
            }
        }
        let keep: Vec<usize> = (0..n).filter(|&i| alive[i]).collect();
        let pos: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let small_adj: Vec<Vec<usize>> = keep.iter().map(|&i| adj[i].iter().map(|j| pos[j]).collect()).collect();
        let labels: Vec<String> = keep
            .iter()
            .map(|&i| {
                let v = self.tree.id(i);
                if massless(i) {
                    String::new()
                } else {
                    self.nu.components.iter().map(|(_, mu)| mu.mass(v).to_text()).collect::<Vec<_>>().join("|")
                }
            })
            .collect();
        let weights: Vec<String> = self.nu.components.iter().map(|(w, _)| w.to_text()).collect();
        format!("{}#{}", weights.join("|"), canonical_form(&small_adj, &labels))
    }
}
