use std::collections::BTreeMap;

use crate::measure::{A2mTree, Measure, TwoLevelMeasure};
use crate::scalar::Rational;
use crate::shape::{shape, Label, ShapeError, ROOT_LABEL};
use crate::tree::{RootedTree, VertexId};

use super::{HistoryError, Level, MergerHistory};

/// The rooted tree of a complete history with its empirical two-level
/// measure.
///
/// Leaf `k` is the `k`-th label, the `k`-th parasite merger is vertex
/// `L + k`, and the root vertex `2L - 1` hangs above the final block. The
/// root carries no mass, so it is an extra leaf of the unrooted tree.
#[derive(Clone, Debug)]
pub struct EmpiricalTwoLevel {
    pub rooted: RootedTree,
    pub chi: A2mTree<Rational>,
    pub leaf_of: BTreeMap<Label, VertexId>,
    pub root: VertexId,
}

impl EmpiricalTwoLevel {
    /// Shape spanned by all labelled leaves together with the root, which is
    /// marked by [`ROOT_LABEL`].
    pub fn rooted_shape_code(&self) -> Result<String, ShapeError> {
        let mut points: Vec<(Label, VertexId)> = self.leaf_of.iter().map(|(&l, &v)| (l, v)).collect();
        points.push((ROOT_LABEL, self.root));
        Ok(shape(&self.chi.tree, &points)?.canonical_code())
    }

    /// Shape spanned by the labelled leaves alone.
    pub fn shape_code(&self) -> Result<String, ShapeError> {
        let points: Vec<(Label, VertexId)> = self.leaf_of.iter().map(|(&l, &v)| (l, v)).collect();
        Ok(shape(&self.chi.tree, &points)?.canonical_code())
    }
}

/// Builds the tree of a complete history. Each host gets weight `1/M` and
/// spreads it uniformly over its parasite leaves.
pub fn history_to_tree(h: &MergerHistory) -> Result<EmpiricalTwoLevel, HistoryError> {
    h.require_complete()?;
    let labels = h.labels();
    let l = labels.len() as VertexId;
    let root = 2 * l - 1;
    let mut parents = Vec::with_capacity(2 * labels.len() - 1);
    let mut next = l;
    for e in h.events().iter().filter(|e| e.level == Level::Parasite) {
        for b in e.blocks {
            parents.push((b as VertexId, next));
        }
        next += 1;
    }
    parents.push((next - 1, root));
    let vertices: Vec<VertexId> = (0..=root).collect();
    let rooted = RootedTree::from_parents(&vertices, &parents).expect("mergers form a rooted tree");
    let tree = rooted.unroot();

    let sizes = h.host_sizes();
    let w = Rational::new(1.into(), (sizes.len() as i64).into());
    let mut components = Vec::with_capacity(sizes.len());
    let mut start = 0;
    for &k in &sizes {
        let leaves: Vec<VertexId> = (start..start + k as VertexId).collect();
        components.push((w.clone(), Measure::uniform(&leaves).expect("nonempty host")));
        start += k as VertexId;
    }
    let nu = TwoLevelMeasure::new(components).expect("weights sum to one");
    let chi = A2mTree::new(tree, nu).expect("measure lives on the leaves");
    let leaf_of = labels.iter().enumerate().map(|(i, &lab)| (lab, i as VertexId)).collect();
    Ok(EmpiricalTwoLevel { rooted, chi, leaf_of, root })
}
