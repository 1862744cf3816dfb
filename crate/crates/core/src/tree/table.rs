use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use super::{AlgebraicTree, VertexId};
use crate::report::Report;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TableError {
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("vertex {0} is listed twice")]
    DuplicateVertex(VertexId),
    #[error("branch point map is not total: c({0}, {1}, {2}) is missing")]
    NonTotal(VertexId, VertexId, VertexId),
    #[error("branch point map is not symmetric at ({0}, {1}, {2})")]
    Asymmetric(VertexId, VertexId, VertexId),
}

/// A failed instance of one of the branch point axioms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AxiomViolation {
    /// `c(x1, x2, x2) != x2`.
    TwoPoint { x1: VertexId, x2: VertexId, got: VertexId },
    /// `c(x1, x2, c(x1, x2, x3)) != c(x1, x2, x3)`.
    ThreePoint { x1: VertexId, x2: VertexId, x3: VertexId },
    /// `c(x1, x2, x3)` is none of the three branch points involving `x4`.
    FourPoint { x1: VertexId, x2: VertexId, x3: VertexId, x4: VertexId },
}

impl fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AxiomViolation::TwoPoint { x1, x2, got } => write!(f, "2pc: c({x1},{x2},{x2}) = {got}"),
            AxiomViolation::ThreePoint { x1, x2, x3 } => write!(f, "3pc at ({x1},{x2},{x3})"),
            AxiomViolation::FourPoint { x1, x2, x3, x4 } => write!(f, "4pc at ({x1},{x2},{x3},{x4})"),
        }
    }
}

/// Dense table of a symmetric map `c: V^3 -> V`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchPointTable {
    ids: Vec<VertexId>,
    values: Vec<u32>,
}

impl BranchPointTable {
    fn at(&self, i: usize, j: usize, k: usize) -> usize {
        self.values[(i * self.ids.len() + j) * self.ids.len() + k] as usize
    }

    pub fn from_tree(tree: &AlgebraicTree) -> Self {
        let n = tree.len();
        let mut values = vec![0u32; n * n * n];
        for i in 0..n {
            let h = tree.hang(i);
            for j in 0..n {
                for k in 0..n {
                    values[(i * n + j) * n + k] = h.lca(j, k) as u32;
                }
            }
        }
        BranchPointTable { ids: tree.vertices().to_vec(), values }
    }

    /// Builds a table from arbitrary `c` values, filling all permutations of
    /// each listed triple.
    pub fn from_entries(
        vertices: &[VertexId],
        entries: &[(VertexId, VertexId, VertexId, VertexId)],
    ) -> Result<Self, TableError> {
        let mut ids = vertices.to_vec();
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(TableError::DuplicateVertex(w[0]));
        }
        let n = ids.len();
        let pos = |v: VertexId| ids.binary_search(&v).map_err(|_| TableError::UnknownVertex(v));
        let mut values: Vec<Option<u32>> = vec![None; n * n * n];
        for &(x, y, z, c) in entries {
            let (i, j, k, ic) = (pos(x)?, pos(y)?, pos(z)?, pos(c)? as u32);
            for (a, b, d) in [(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)] {
                let slot = &mut values[(a * n + b) * n + d];
                match slot {
                    Some(old) if *old != ic => return Err(TableError::Asymmetric(x, y, z)),
                    _ => *slot = Some(ic),
                }
            }
        }
        let mut dense = Vec::with_capacity(values.len());
        for (idx, v) in values.into_iter().enumerate() {
            match v {
                Some(c) => dense.push(c),
                None => {
                    let (i, j, k) = (idx / (n * n), (idx / n) % n, idx % n);
                    return Err(TableError::NonTotal(ids[i], ids[j], ids[k]));
                }
            }
        }
        Ok(BranchPointTable { ids, values: dense })
    }

    /// Tabulates `f` on all ordered triples.
    pub fn from_fn(vertices: &[VertexId], f: impl Fn(VertexId, VertexId, VertexId) -> VertexId) -> Result<Self, TableError> {
        let mut ids = vertices.to_vec();
        ids.sort_unstable();
        let index: HashMap<VertexId, u32> = ids.iter().enumerate().map(|(i, &v)| (v, i as u32)).collect();
        let n = ids.len();
        let mut values = Vec::with_capacity(n * n * n);
        for &x in &ids {
            for &y in &ids {
                for &z in &ids {
                    let c = f(x, y, z);
                    values.push(*index.get(&c).ok_or(TableError::UnknownVertex(c))?);
                }
            }
        }
        Ok(BranchPointTable { ids, values })
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.ids
    }

    pub fn get(&self, x: VertexId, y: VertexId, z: VertexId) -> Option<VertexId> {
        let i = self.ids.binary_search(&x).ok()?;
        let j = self.ids.binary_search(&y).ok()?;
        let k = self.ids.binary_search(&z).ok()?;
        Some(self.ids[self.at(i, j, k)])
    }
}

/// Checks the two-, three- and four-point conditions on every tuple.
pub fn validate_branch_point_map(table: &BranchPointTable) -> Report<AxiomViolation> {
    let n = table.ids.len();
    let id = |i: usize| table.ids[i];
    let mut report = Report::default();
    for i in 0..n {
        for j in 0..n {
            let c = table.at(i, j, j);
            if c != j {
                report.push(AxiomViolation::TwoPoint { x1: id(i), x2: id(j), got: id(c) });
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let c = table.at(i, j, k);
                if table.at(i, j, c) != c {
                    report.push(AxiomViolation::ThreePoint { x1: id(i), x2: id(j), x3: id(k) });
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let c = table.at(i, j, k);
                for l in 0..n {
                    if c != table.at(i, j, l) && c != table.at(i, k, l) && c != table.at(j, k, l) {
                        report.push(AxiomViolation::FourPoint { x1: id(i), x2: id(j), x3: id(k), x4: id(l) });
                    }
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_table_satisfies_axioms() {
        let t = AlgebraicTree::new([0, 1, 2, 3, 4], [(0, 1), (1, 2), (1, 3), (3, 4)]).unwrap();
        let table = BranchPointTable::from_tree(&t);
        assert!(validate_branch_point_map(&table).is_ok());
        assert_eq!(table.get(0, 2, 4), Some(1));
        assert_eq!(table.get(0, 4, 3), Some(3));
    }

    #[test]
    fn entries_require_symmetry_and_totality() {
        let err = BranchPointTable::from_entries(&[0, 1], &[(0, 0, 0, 0), (0, 0, 1, 0), (0, 1, 0, 1)]).unwrap_err();
        assert_eq!(err, TableError::Asymmetric(0, 1, 0));
        let err = BranchPointTable::from_entries(&[0, 1], &[(0, 0, 0, 0)]).unwrap_err();
        assert!(matches!(err, TableError::NonTotal(..)));
    }
}
