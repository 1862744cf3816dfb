use std::fmt;

use thiserror::Error;

use super::{AlgebraicTree, TreeError, VertexId, NONE};
use crate::report::Report;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RootedError {
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error("vertex {0} has more than one parent")]
    MultipleParents(VertexId),
    #[error("no root: every vertex has a parent")]
    NoRoot,
    #[error("several roots: {0} and {1}")]
    MultipleRoots(VertexId, VertexId),
    #[error("parent pointers contain a cycle through {0}")]
    Cycle(VertexId),
    #[error("minimum map violates its axioms: {0}")]
    Axiom(RootedViolation),
}

/// A failed instance of the minimum map axioms, or a missing root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RootedViolation {
    /// `x ∧ x != x`.
    M1 { x: VertexId },
    /// `x1 ∧ (x2 ∧ x3) != (x1 ∧ x2) ∧ x3`.
    M2 { x1: VertexId, x2: VertexId, x3: VertexId },
    /// Three distinct pairwise minima, or a tie not below the third minimum.
    M3 { x1: VertexId, x2: VertexId, x3: VertexId },
    /// `x ∧ y != y ∧ x`.
    Asymmetric { x: VertexId, y: VertexId },
    NoRoot,
}

impl fmt::Display for RootedViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RootedViolation::M1 { x } => write!(f, "M1 at {x}"),
            RootedViolation::M2 { x1, x2, x3 } => write!(f, "M2 at ({x1},{x2},{x3})"),
            RootedViolation::M3 { x1, x2, x3 } => write!(f, "M3 at ({x1},{x2},{x3})"),
            RootedViolation::Asymmetric { x, y } => write!(f, "asymmetric at ({x},{y})"),
            RootedViolation::NoRoot => write!(f, "no root"),
        }
    }
}

/// A tree with a distinguished root, stored as parent pointers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedTree {
    ids: Vec<VertexId>,
    parent: Vec<usize>,
    depth: Vec<usize>,
    root: usize,
}

/// Hangs `tree` from `rho`; the minimum map becomes `x ∧ y = c(x, y, rho)`.
pub fn root_tree(tree: &AlgebraicTree, rho: VertexId) -> Result<RootedTree, TreeError> {
    let r = tree.index_of(rho)?;
    let h = tree.hang(r);
    Ok(RootedTree { ids: tree.vertices().to_vec(), parent: h.parent, depth: h.depth, root: r })
}

/// Checks symmetry, (M1)-(M3) and the existence of a root for a minimum map.
pub fn validate_min_map(vertices: &[VertexId], f: impl Fn(VertexId, VertexId) -> VertexId) -> Report<RootedViolation> {
    let mut report = Report::default();
    let le = |a: VertexId, b: VertexId| f(a, b) == a;
    for &x in vertices {
        if f(x, x) != x {
            report.push(RootedViolation::M1 { x });
        }
        for &y in vertices {
            if f(x, y) != f(y, x) {
                report.push(RootedViolation::Asymmetric { x, y });
            }
        }
    }
    for &x1 in vertices {
        for &x2 in vertices {
            for &x3 in vertices {
                if f(x1, f(x2, x3)) != f(f(x1, x2), x3) {
                    report.push(RootedViolation::M2 { x1, x2, x3 });
                }
                let (a, b, c) = (f(x1, x2), f(x1, x3), f(x2, x3));
                let distinct = a != b && a != c && b != c;
                if distinct || (a == b && !le(a, c)) {
                    report.push(RootedViolation::M3 { x1, x2, x3 });
                }
            }
        }
    }
    if !vertices.iter().any(|&r| vertices.iter().all(|&x| f(r, x) == r)) {
        report.push(RootedViolation::NoRoot);
    }
    report
}

impl RootedTree {
    /// Builds a rooted tree from `(child, parent)` pairs.
    pub fn from_parents(vertices: &[VertexId], pairs: &[(VertexId, VertexId)]) -> Result<Self, RootedError> {
        let skeleton = AlgebraicTree::new(vertices.iter().copied(), pairs.iter().copied());
        let mut ids = vertices.to_vec();
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(TreeError::DuplicateVertex(w[0]).into());
        }
        let n = ids.len();
        let pos = |v: VertexId| ids.binary_search(&v).map_err(|_| TreeError::UnknownVertex(v));
        let mut parent = vec![NONE; n];
        for &(c, p) in pairs {
            let (ic, ip) = (pos(c)?, pos(p)?);
            if parent[ic] != NONE {
                return Err(RootedError::MultipleParents(c));
            }
            parent[ic] = ip;
        }
        let roots: Vec<usize> = (0..n).filter(|&i| parent[i] == NONE).collect();
        let root = match roots.as_slice() {
            [] => return Err(RootedError::NoRoot),
            [r] => *r,
            [a, b, ..] => return Err(RootedError::MultipleRoots(ids[*a], ids[*b])),
        };
        let mut depth = vec![NONE; n];
        depth[root] = 0;
        #[allow(clippy::needless_range_loop)]
        for start in 0..n {
            let mut chain = Vec::new();
            let mut v = start;
            while depth[v] == NONE {
                chain.push(v);
                if chain.len() > n {
                    return Err(RootedError::Cycle(ids[start]));
                }
                v = parent[v];
            }
            let mut d = depth[v];
            for &u in chain.iter().rev() {
                d += 1;
                depth[u] = d;
            }
        }
        skeleton?;
        Ok(RootedTree { ids, parent, depth, root })
    }

    /// Builds a rooted tree from a minimum map, rejecting maps that violate
    /// the axioms.
    pub fn from_min_map(vertices: &[VertexId], f: impl Fn(VertexId, VertexId) -> VertexId) -> Result<Self, RootedError> {
        let report = validate_min_map(vertices, &f);
        if let Some(v) = report.violations.into_iter().next() {
            return Err(RootedError::Axiom(v));
        }
        let strictly_below = |z: VertexId, y: VertexId| z != y && f(z, y) == z;
        let depth = |y: VertexId| vertices.iter().filter(|&&z| strictly_below(z, y)).count();
        let mut pairs = Vec::new();
        for &y in vertices {
            let dy = depth(y);
            if dy == 0 {
                continue;
            }
            let p = vertices
                .iter()
                .copied()
                .find(|&z| strictly_below(z, y) && depth(z) == dy - 1)
                .ok_or(RootedError::Axiom(RootedViolation::M3 { x1: y, x2: y, x3: y }))?;
            pairs.push((y, p));
        }
        Self::from_parents(vertices, &pairs)
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.ids
    }

    pub fn root(&self) -> VertexId {
        self.ids[self.root]
    }

    pub fn parent(&self, v: VertexId) -> Result<Option<VertexId>, TreeError> {
        let i = self.index_of(v)?;
        Ok((self.parent[i] != NONE).then(|| self.ids[self.parent[i]]))
    }

    pub fn depth(&self, v: VertexId) -> Result<usize, TreeError> {
        Ok(self.depth[self.index_of(v)?])
    }

    fn index_of(&self, v: VertexId) -> Result<usize, TreeError> {
        self.ids.binary_search(&v).map_err(|_| TreeError::UnknownVertex(v))
    }

    fn lca(&self, mut a: usize, mut b: usize) -> usize {
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

    /// The minimum map `x ∧ y`: the deepest common ancestor.
    pub fn min_map(&self, x: VertexId, y: VertexId) -> Result<VertexId, TreeError> {
        Ok(self.ids[self.lca(self.index_of(x)?, self.index_of(y)?)])
    }

    /// Branch point recovered from the minimum map as
    /// `max{x ∧ y, x ∧ z, y ∧ z}`.
    pub fn branch_point(&self, x: VertexId, y: VertexId, z: VertexId) -> Result<VertexId, TreeError> {
        let (a, b, c) = (self.index_of(x)?, self.index_of(y)?, self.index_of(z)?);
        let mut best = self.lca(a, b);
        for cand in [self.lca(a, c), self.lca(b, c)] {
            if self.depth[cand] > self.depth[best] {
                best = cand;
            }
        }
        Ok(self.ids[best])
    }

    /// Forgets the root.
    pub fn unroot(&self) -> AlgebraicTree {
        let edges: Vec<_> = (0..self.ids.len())
            .filter(|&i| self.parent[i] != NONE)
            .map(|i| (self.ids[i], self.ids[self.parent[i]]))
            .collect();
        AlgebraicTree::new(self.ids.iter().copied(), edges).expect("parent pointers form a tree")
    }

    /// Children of every vertex, indexed like [`Self::vertices`].
    pub fn children(&self) -> Vec<Vec<VertexId>> {
        let mut out = vec![Vec::new(); self.ids.len()];
        for i in 0..self.ids.len() {
            if self.parent[i] != NONE {
                out[self.parent[i]].push(self.ids[i]);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::BranchPointTable;

    #[test]
    fn path_rooted_at_end() {
        let t = AlgebraicTree::new([1, 2, 3], [(1, 2), (2, 3)]).unwrap();
        let r = root_tree(&t, 1).unwrap();
        assert_eq!(r.min_map(2, 3).unwrap(), 2);
        assert_eq!(r.unroot(), t);
    }

    #[test]
    fn star_rooted_at_leaf() {
        let t = AlgebraicTree::new([0, 1, 2, 3], [(0, 1), (0, 2), (0, 3)]).unwrap();
        let r = root_tree(&t, 1).unwrap();
        assert_eq!(r.min_map(2, 3).unwrap(), 0);
        assert_eq!(r.branch_point(1, 2, 3).unwrap(), 0);
        let back = r.unroot();
        assert_eq!(BranchPointTable::from_tree(&back), BranchPointTable::from_tree(&t));
    }

    #[test]
    fn min_map_round_trip() {
        let t = AlgebraicTree::new([0, 1, 2, 3, 4], [(0, 1), (1, 2), (1, 3), (3, 4)]).unwrap();
        let r = root_tree(&t, 2).unwrap();
        let rebuilt = RootedTree::from_min_map(t.vertices(), |x, y| r.min_map(x, y).unwrap()).unwrap();
        assert_eq!(rebuilt, r);
    }

    #[test]
    fn m3_violation_is_reported() {
        // three incomparable pairwise minima on {a, b, c} with a common bottom r
        let f = |x: u64, y: u64| -> u64 {
            if x == y {
                x
            } else if x == 0 || y == 0 {
                0
            } else {
                // pairwise minima of 1,2,3 are 4,5,6; these sit just above 0
                match (x.min(y), x.max(y)) {
                    (1, 2) => 4,
                    (1, 3) => 5,
                    (2, 3) => 6,
                    _ => 0,
                }
            }
        };
        let err = RootedTree::from_min_map(&[0, 1, 2, 3, 4, 5, 6], f).unwrap_err();
        assert!(matches!(err, RootedError::Axiom(_)));
    }

    #[test]
    fn from_parents_errors() {
        assert_eq!(RootedTree::from_parents(&[0, 1], &[(0, 1), (1, 0)]).unwrap_err(), RootedError::NoRoot);
        assert_eq!(RootedTree::from_parents(&[0, 1, 2], &[(1, 0)]).unwrap_err(), RootedError::MultipleRoots(0, 2));
    }
}
