use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::{Face, Triangulation};
use crate::measure::{A2mTree, Measure, MeasureError, TwoLevelMeasure};
use crate::scalar::Scalar;
use crate::tree::{AlgebraicTree, TreeError, VertexId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodecError {
    #[error("invalid triangulation: {0}")]
    InvalidTriangulation(String),
    #[error("arc measure has {got} arcs, the polygon has {expected}")]
    ArcCount { expected: usize, got: usize },
    #[error("negative arc mass in component {component}")]
    NegativeArcMass { component: usize },
    #[error("arc masses of component {component} sum to {total}, expected 1")]
    ArcMassNotNormalized { component: usize, total: String },
    #[error("mixture weights are invalid: {0}")]
    Weights(String),
    #[error("intensity of the arc measure differs from the arc length at arc {0}")]
    IntensityMismatch(usize),
    #[error("tree is not binary")]
    NotBinary,
    #[error("root {0} is not a leaf")]
    RootNotLeaf(VertexId),
    #[error("leaf {0} carries no intensity mass, so its arc would be degenerate")]
    DegenerateArc(VertexId),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// `Σ_i w_i δ_{κ_i}` where each `κ_i` is a vector of arc masses.
#[derive(Clone, Debug, PartialEq)]
pub struct ArcTwoLevelMeasure<S> {
    components: Vec<(S, Vec<S>)>,
}

impl<S: Scalar> ArcTwoLevelMeasure<S> {
    pub fn new(components: Vec<(S, Vec<S>)>) -> Result<Self, CodecError> {
        let weights: Vec<(S, Measure<S>)> =
            components.iter().map(|(w, _)| (w.clone(), Measure::dirac(0))).collect();
        TwoLevelMeasure::new(weights).map_err(|e| CodecError::Weights(e.to_string()))?;
        let len = components[0].1.len();
        for (i, (_, k)) in components.iter().enumerate() {
            if k.len() != len {
                return Err(CodecError::ArcCount { expected: len, got: k.len() });
            }
            if k.iter().any(|x| x.is_negative()) {
                return Err(CodecError::NegativeArcMass { component: i });
            }
            let total = crate::scalar::sum(k);
            if !total.close_to(&S::one()) {
                return Err(CodecError::ArcMassNotNormalized { component: i, total: total.to_text() });
            }
        }
        Ok(ArcTwoLevelMeasure { components })
    }

    /// `δ_κ` with `κ` the arc lengths themselves.
    pub fn from_arcs(arcs: &[S]) -> Self {
        ArcTwoLevelMeasure { components: vec![(S::one(), arcs.to_vec())] }
    }

    pub fn components(&self) -> &[(S, Vec<S>)] {
        &self.components
    }

    pub fn arc_count(&self) -> usize {
        self.components[0].1.len()
    }

    /// `M_K(arc a) = Σ_i w_i κ_i(a)`.
    pub fn intensity(&self) -> Vec<S> {
        (0..self.arc_count())
            .map(|a| self.components.iter().fold(S::zero(), |acc, (w, k)| acc + w.clone() * k[a].clone()))
            .collect()
    }
}

/// Tree coded by a triangulation: one leaf per side (vertex id = side
/// index), one branch point per triangle (vertex id = `n + k` for the `k`-th
/// triangle of [`Triangulation::triangles`]).
#[derive(Clone, Debug, PartialEq)]
pub struct DualTree<S> {
    pub chi: A2mTree<S>,
    /// Face of every vertex, indexed by vertex id.
    pub faces: Vec<Face>,
}

/// Decodes a full triangulation with an arc two-level measure.
pub fn dual_tree<S: Scalar>(t: &Triangulation<S>, k: &ArcTwoLevelMeasure<S>) -> Result<DualTree<S>, CodecError> {
    let report = t.validate();
    if let Some(v) = report.violations.first() {
        return Err(CodecError::InvalidTriangulation(v.to_string()));
    }
    let n = t.n();
    if k.arc_count() != n {
        return Err(CodecError::ArcCount { expected: n, got: k.arc_count() });
    }
    for (a, (m, len)) in k.intensity().iter().zip(t.arcs()).enumerate() {
        if !m.close_to(len) {
            return Err(CodecError::IntensityMismatch(a));
        }
    }
    let triangles = t.triangles();
    let mut faces: Vec<Face> = (0..n).map(Face::Segment).collect();
    faces.extend(triangles.iter().map(|&tr| Face::Triangle(tr)));
    let mut edges: Vec<(VertexId, VertexId)> = Vec::new();
    if n == 2 {
        edges.push((0, 1));
    }
    let mut by_diagonal: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (idx, tr) in triangles.iter().enumerate() {
        let id = n + idx;
        for (a, b) in [(tr[0], tr[1]), (tr[1], tr[2]), (tr[0], tr[2])] {
            match t.side_index(a, b) {
                Some(s) => edges.push((s as u64, id as u64)),
                None => by_diagonal.entry((a, b)).or_default().push(id),
            }
        }
    }
    for ids in by_diagonal.values() {
        if let [x, y] = ids[..] {
            edges.push((x as u64, y as u64));
        }
    }
    let tree = AlgebraicTree::new(0..faces.len() as u64, edges)?;
    let comps = k
        .components()
        .iter()
        .map(|(w, kappa)| Ok((w.clone(), Measure::new(kappa.iter().enumerate().map(|(a, m)| (a as u64, m.clone())))?)))
        .collect::<Result<Vec<_>, MeasureError>>()?;
    let nu = TwoLevelMeasure::new(comps)?;
    Ok(DualTree { chi: A2mTree::new(tree, nu)?, faces })
}

/// How the two upper components at each branch point are ordered.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub enum ComponentOrder {
    /// The component containing the smallest leaf id comes first.
    #[default]
    SmallestLeafFirst,
    LargestLeafFirst,
    /// Smallest-leaf-first, except at the listed branch points.
    Flipped(BTreeSet<VertexId>),
}

/// Output of [`encode_tree`].
#[derive(Clone, Debug, PartialEq)]
pub struct Encoded<S> {
    pub triangulation: Triangulation<S>,
    pub measure: ArcTwoLevelMeasure<S>,
    /// Leaf coded by each side, in side order (side 0 is the root).
    pub leaf_of_side: Vec<VertexId>,
    /// Branch point coded by each triangle, with the triangle's polygon vertices.
    pub triangle_of_branch: BTreeMap<VertexId, [usize; 3]>,
}

struct Walker<'a, S> {
    tree: &'a AlgebraicTree,
    mass: &'a Measure<S>,
    order: &'a ComponentOrder,
    leaves: Vec<VertexId>,
    triangles: BTreeMap<VertexId, [usize; 3]>,
}

impl<S: Scalar> Walker<'_, S> {
    /// Follows degree-two vertices from `prev -> cur` to the next leaf or
    /// branch point; returns it with its predecessor on the walk.
    fn skip(&self, mut prev: usize, mut cur: usize) -> (usize, usize) {
        loop {
            let adj = &self.tree.adjacency()[cur];
            if adj.len() != 2 {
                return (cur, prev);
            }
            let next = if adj[0] == prev { adj[1] } else { adj[0] };
            prev = cur;
            cur = next;
        }
    }

    fn min_leaf(&self, prev: usize, cur: usize) -> VertexId {
        let adj = &self.tree.adjacency()[cur];
        if adj.len() <= 1 {
            return self.tree.id(cur);
        }
        adj.iter().filter(|&&w| w != prev).map(|&w| self.min_leaf(cur, w)).min().expect("interior vertex")
    }

    fn visit(&mut self, prev: usize, cur: usize) -> Result<(), CodecError> {
        let adj = &self.tree.adjacency()[cur];
        if adj.len() == 1 {
            let id = self.tree.id(cur);
            if self.mass.mass(id).is_zero() {
                return Err(CodecError::DegenerateArc(id));
            }
            self.leaves.push(id);
            return Ok(());
        }
        let mut ups: Vec<usize> = adj.iter().copied().filter(|&w| w != prev).collect();
        let key = |w: usize| self.min_leaf(cur, w);
        ups.sort_by_key(|&w| key(w));
        let id = self.tree.id(cur);
        let flip = match self.order {
            ComponentOrder::SmallestLeafFirst => false,
            ComponentOrder::LargestLeafFirst => true,
            ComponentOrder::Flipped(set) => set.contains(&id),
        };
        if flip {
            ups.reverse();
        }
        let start = self.leaves.len();
        let (c1, p1) = self.skip(cur, ups[0]);
        self.visit(p1, c1)?;
        let middle = self.leaves.len();
        let (c2, p2) = self.skip(cur, ups[1]);
        self.visit(p2, c2)?;
        self.triangles.insert(id, [start, middle, self.leaves.len()]);
        Ok(())
    }
}

/// Codes a binary tree whose two-level measure has all atoms on leaves by a
/// polygon triangulation, reading the tree in the total order induced by the
/// root leaf `root` and the component order.
///
/// The side of leaf `w` has arc length `M_ν{w}`. The triangle of branch
/// point `v` has its vertices at `α(v)`, `α(v) + M_ν(S1(v))` and
/// `α(v) + M_ν(S1(v)) + M_ν(S2(v))`, where `α(v)` is the mass preceding `v`.
pub fn encode_tree<S: Scalar>(chi: &A2mTree<S>, root: VertexId, order: &ComponentOrder) -> Result<Encoded<S>, CodecError> {
    let tree = &chi.tree;
    if !tree.is_binary() {
        return Err(CodecError::NotBinary);
    }
    chi.nu.atoms_on_leaves(tree)?;
    let r = tree.index_of(root)?;
    if tree.adjacency()[r].len() > 1 {
        return Err(CodecError::RootNotLeaf(root));
    }
    let mass = chi.nu.intensity();
    if mass.mass(root).is_zero() {
        return Err(CodecError::DegenerateArc(root));
    }
    let mut walker = Walker { tree, mass: &mass, order, leaves: vec![root], triangles: BTreeMap::new() };
    if tree.len() > 1 {
        let (c, p) = walker.skip(r, tree.adjacency()[r][0]);
        walker.visit(p, c)?;
    }
    let n = walker.leaves.len();
    let triangle_of_branch: BTreeMap<VertexId, [usize; 3]> = walker
        .triangles
        .iter()
        .map(|(&v, &[a, b, c])| {
            let mut t = [a, b, c % n];
            t.sort_unstable();
            (v, t)
        })
        .collect();
    let mut diagonals = BTreeSet::new();
    let probe = Triangulation::<S>::new(n, Vec::new(), Vec::new());
    for t in triangle_of_branch.values() {
        for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[0], t[2])] {
            if !probe.is_side(a, b) {
                diagonals.insert((a, b));
            }
        }
    }
    let arcs: Vec<S> = walker.leaves.iter().map(|&w| mass.mass(w)).collect();
    let triangulation = Triangulation::new(n, diagonals.into_iter().collect(), arcs);
    let measure = ArcTwoLevelMeasure {
        components: chi
            .nu
            .components()
            .iter()
            .map(|(w, mu)| (w.clone(), walker.leaves.iter().map(|&l| mu.mass(l)).collect()))
            .collect(),
    };
    Ok(Encoded { triangulation, measure, leaf_of_side: walker.leaves, triangle_of_branch })
}
