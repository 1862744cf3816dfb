//! Finite trees in algebraic form: vertex sets with a branch point map.

mod enumerate;
mod metric;
mod rooted;
mod table;

pub use enumerate::{binary_trees, free_trees, random_binary_tree, random_tree};
pub use metric::{DistanceMatrix, MetricError};
pub use rooted::{root_tree, validate_min_map, RootedError, RootedTree, RootedViolation};
pub use table::{validate_branch_point_map, AxiomViolation, BranchPointTable, TableError};

use std::collections::{BTreeSet, VecDeque};

use thiserror::Error;

use crate::canon::canonical_form;

pub type VertexId = u64;

const NONE: usize = usize::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("tree has no vertices")]
    Empty,
    #[error("vertex {0} is listed twice")]
    DuplicateVertex(VertexId),
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("self-loop at vertex {0}")]
    SelfLoop(VertexId),
    #[error("edge {0}-{1} is listed twice")]
    DuplicateEdge(VertexId, VertexId),
    #[error("a tree on {vertices} vertices needs {expected} edges, got {got}")]
    EdgeCount { vertices: usize, expected: usize, got: usize },
    #[error("graph is not connected")]
    Disconnected,
}

/// A finite tree stored as sorted vertex ids plus adjacency lists.
///
/// The branch point map `c(x, y, z)` is the unique vertex lying on all three
/// paths between the arguments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraicTree {
    ids: Vec<VertexId>,
    adj: Vec<Vec<usize>>,
}

/// Vertex, leaf and branch point counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TreeStats {
    pub vertices: usize,
    pub edges: usize,
    pub leaves: usize,
    pub branch_points: usize,
    pub max_degree: usize,
}

/// The tree hung from one vertex: parent pointers, depths, BFS order.
#[derive(Clone, Debug)]
pub(crate) struct Hanging {
    pub parent: Vec<usize>,
    pub depth: Vec<usize>,
    pub order: Vec<usize>,
}

impl Hanging {
    pub fn lca(&self, mut a: usize, mut b: usize) -> usize {
        while self.depth[a] > self.depth[b] {
            a = self.parent[a];
        }
        while self.depth[b] > self.depth[a] {
            b = self.parent[b];
        }
        while a != b {
            a = self.parent[a];
            b = self.parent[b];
        }
        a
    }

    /// Median of three vertices: the deepest of the pairwise LCAs.
    pub fn median(&self, a: usize, b: usize, c: usize) -> usize {
        let mut best = self.lca(a, b);
        for cand in [self.lca(a, c), self.lca(b, c)] {
            if self.depth[cand] > self.depth[best] {
                best = cand;
            }
        }
        best
    }
}

impl AlgebraicTree {
    pub fn new<V, E>(vertices: V, edges: E) -> Result<Self, TreeError>
    where
        V: IntoIterator<Item = VertexId>,
        E: IntoIterator<Item = (VertexId, VertexId)>,
    {
        let mut ids: Vec<VertexId> = vertices.into_iter().collect();
        if ids.is_empty() {
            return Err(TreeError::Empty);
        }
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(TreeError::DuplicateVertex(w[0]));
        }
        let n = ids.len();
        let mut adj = vec![Vec::new(); n];
        let mut seen = BTreeSet::new();
        let mut count = 0usize;
        for (a, b) in edges {
            let ia = ids.binary_search(&a).map_err(|_| TreeError::UnknownVertex(a))?;
            let ib = ids.binary_search(&b).map_err(|_| TreeError::UnknownVertex(b))?;
            if ia == ib {
                return Err(TreeError::SelfLoop(a));
            }
            if !seen.insert((ia.min(ib), ia.max(ib))) {
                return Err(TreeError::DuplicateEdge(a.min(b), a.max(b)));
            }
            adj[ia].push(ib);
            adj[ib].push(ia);
            count += 1;
        }
        if count != n - 1 {
            return Err(TreeError::EdgeCount { vertices: n, expected: n - 1, got: count });
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let tree = AlgebraicTree { ids, adj };
        if tree.hang(0).order.len() != n {
            return Err(TreeError::Disconnected);
        }
        Ok(tree)
    }

    /// Builds a tree on `0..adj.len()` from an adjacency list.
    pub(crate) fn from_adjacency(adj: &[Vec<usize>]) -> Result<Self, TreeError> {
        let edges = adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| u < v).map(move |&v| (u as u64, v as u64)));
        Self::new((0..adj.len() as u64).collect::<Vec<_>>(), edges.collect::<Vec<_>>())
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Vertex ids in increasing order.
    pub fn vertices(&self) -> &[VertexId] {
        &self.ids
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.ids.binary_search(&v).is_ok()
    }

    pub fn index_of(&self, v: VertexId) -> Result<usize, TreeError> {
        self.ids.binary_search(&v).map_err(|_| TreeError::UnknownVertex(v))
    }

    pub fn id(&self, index: usize) -> VertexId {
        self.ids[index]
    }

    pub(crate) fn adjacency(&self) -> &[Vec<usize>] {
        &self.adj
    }

    pub fn neighbors(&self, v: VertexId) -> Result<Vec<VertexId>, TreeError> {
        let i = self.index_of(v)?;
        Ok(self.adj[i].iter().map(|&j| self.ids[j]).collect())
    }

    pub fn degree(&self, v: VertexId) -> Result<usize, TreeError> {
        Ok(self.adj[self.index_of(v)?].len())
    }

    pub(crate) fn degree_at(&self, index: usize) -> usize {
        self.adj[index].len()
    }

    /// Edges as `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        let mut out = Vec::with_capacity(self.len().saturating_sub(1));
        for (u, list) in self.adj.iter().enumerate() {
            for &v in list {
                if u < v {
                    out.push((self.ids[u], self.ids[v]));
                }
            }
        }
        out
    }

    pub fn leaves(&self) -> Vec<VertexId> {
        (0..self.len()).filter(|&i| self.adj[i].len() <= 1).map(|i| self.ids[i]).collect()
    }

    /// Vertices of degree at least three.
    pub fn branch_points(&self) -> Vec<VertexId> {
        (0..self.len()).filter(|&i| self.adj[i].len() >= 3).map(|i| self.ids[i]).collect()
    }

    /// Every vertex has degree at most three.
    pub fn is_binary(&self) -> bool {
        self.adj.iter().all(|l| l.len() <= 3)
    }

    pub fn stats(&self) -> TreeStats {
        TreeStats {
            vertices: self.len(),
            edges: self.len() - 1,
            leaves: self.leaves().len(),
            branch_points: self.branch_points().len(),
            max_degree: self.adj.iter().map(Vec::len).max().unwrap_or(0),
        }
    }

    pub(crate) fn hang(&self, root: usize) -> Hanging {
        let n = self.len();
        let mut parent = vec![NONE; n];
        let mut depth = vec![0; n];
        let mut order = Vec::with_capacity(n);
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([root]);
        seen[root] = true;
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for &v in &self.adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    parent[v] = u;
                    depth[v] = depth[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        Hanging { parent, depth, order }
    }

    /// Branch point `c(x, y, z)`, computed in linear time.
    pub fn branch_point(&self, x: VertexId, y: VertexId, z: VertexId) -> Result<VertexId, TreeError> {
        let (ix, iy, iz) = (self.index_of(x)?, self.index_of(y)?, self.index_of(z)?);
        let h = self.hang(ix);
        Ok(self.ids[h.lca(iy, iz)])
    }

    pub(crate) fn path_indices(&self, a: usize, b: usize) -> Vec<usize> {
        let h = self.hang(a);
        let mut path = vec![b];
        let mut v = b;
        while v != a {
            v = h.parent[v];
            path.push(v);
        }
        path.reverse();
        path
    }

    /// The vertices on the path from `x` to `y`, in walking order.
    pub fn path(&self, x: VertexId, y: VertexId) -> Result<Vec<VertexId>, TreeError> {
        let (a, b) = (self.index_of(x)?, self.index_of(y)?);
        Ok(self.path_indices(a, b).into_iter().map(|i| self.ids[i]).collect())
    }

    /// The interval `[x, y] = { z : c(x, y, z) = z }`.
    pub fn interval(&self, x: VertexId, y: VertexId) -> Result<BTreeSet<VertexId>, TreeError> {
        Ok(self.path(x, y)?.into_iter().collect())
    }

    /// Component of `T \ {x}` containing `y`; `component(x, x) = {x}`.
    pub fn component(&self, x: VertexId, y: VertexId) -> Result<BTreeSet<VertexId>, TreeError> {
        let (ix, iy) = (self.index_of(x)?, self.index_of(y)?);
        if ix == iy {
            return Ok(BTreeSet::from([x]));
        }
        Ok(self.component_indices(ix, iy).into_iter().map(|i| self.ids[i]).collect())
    }

    pub(crate) fn component_indices(&self, x: usize, y: usize) -> Vec<usize> {
        let h = self.hang(x);
        // the neighbour of x towards y
        let mut top = y;
        while h.parent[top] != x {
            top = h.parent[top];
        }
        let mut out = vec![top];
        let mut stack = vec![top];
        while let Some(u) = stack.pop() {
            for &v in &self.adj[u] {
                if v != h.parent[u] {
                    out.push(v);
                    stack.push(v);
                }
            }
        }
        out
    }

    /// All components of `T \ {x}`, one per neighbour of `x`.
    pub fn components_at(&self, x: VertexId) -> Result<Vec<BTreeSet<VertexId>>, TreeError> {
        let ix = self.index_of(x)?;
        Ok(self.adj[ix]
            .iter()
            .map(|&y| self.component_indices(ix, y).into_iter().map(|i| self.ids[i]).collect())
            .collect())
    }

    /// Isomorphism class code of the unlabelled tree.
    pub fn shape_code(&self) -> String {
        canonical_form(&self.adj, &vec![String::new(); self.len()])
    }

    /// Relabels vertices `0..n` in increasing id order.
    pub fn compacted(&self) -> AlgebraicTree {
        AlgebraicTree { ids: (0..self.len() as u64).collect(), adj: self.adj.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star() -> AlgebraicTree {
        AlgebraicTree::new([0, 1, 2, 3], [(0, 1), (0, 2), (0, 3)]).unwrap()
    }

    #[test]
    fn rejects_bad_graphs() {
        assert_eq!(AlgebraicTree::new([0, 1, 2], [(0, 1), (1, 2), (2, 0)]).unwrap_err(), TreeError::EdgeCount {
            vertices: 3,
            expected: 2,
            got: 3
        });
        assert_eq!(AlgebraicTree::new([0, 1, 2, 3], [(0, 1), (1, 0), (2, 3)]).unwrap_err(), TreeError::DuplicateEdge(0, 1));
        assert_eq!(AlgebraicTree::new([0, 0], []).unwrap_err(), TreeError::DuplicateVertex(0));
        assert_eq!(AlgebraicTree::new([0, 1], [(0, 5)]).unwrap_err(), TreeError::UnknownVertex(5));
        assert_eq!(AlgebraicTree::new([0, 1], [(1, 1)]).unwrap_err(), TreeError::SelfLoop(1));
        assert_eq!(
            AlgebraicTree::new([0, 1, 2, 3], [(0, 1), (0, 1), (2, 3)]).unwrap_err(),
            TreeError::DuplicateEdge(0, 1)
        );
    }

    #[test]
    fn disconnected_with_right_edge_count() {
        let e = AlgebraicTree::new([0, 1, 2, 3], [(0, 1), (1, 2), (2, 0)]);
        assert!(e.is_err());
        let e = AlgebraicTree::new([0, 1, 2, 3, 4], [(0, 1), (1, 2), (2, 0), (3, 4)]);
        assert!(e.is_err());
    }

    #[test]
    fn star_branch_point_and_components() {
        let t = star();
        assert_eq!(t.branch_point(1, 2, 3).unwrap(), 0);
        assert_eq!(t.branch_point(1, 1, 3).unwrap(), 1);
        assert_eq!(t.interval(1, 2).unwrap(), BTreeSet::from([0, 1, 2]));
        assert_eq!(t.component(0, 2).unwrap(), BTreeSet::from([2]));
        assert_eq!(t.component(1, 3).unwrap(), BTreeSet::from([0, 2, 3]));
        assert_eq!(t.component(2, 2).unwrap(), BTreeSet::from([2]));
        assert_eq!(t.components_at(0).unwrap().len(), 3);
        assert_eq!(t.leaves(), vec![1, 2, 3]);
        assert_eq!(t.branch_points(), vec![0]);
    }

    #[test]
    fn path_order() {
        let t = AlgebraicTree::new([10, 20, 30, 40], [(10, 20), (20, 30), (30, 40)]).unwrap();
        assert_eq!(t.path(40, 10).unwrap(), vec![40, 30, 20, 10]);
        assert_eq!(t.branch_point(10, 40, 20).unwrap(), 20);
    }

    #[test]
    fn single_vertex() {
        let t = AlgebraicTree::new([7], []).unwrap();
        assert_eq!(t.branch_point(7, 7, 7).unwrap(), 7);
        assert_eq!(t.leaves(), vec![7]);
    }
}
