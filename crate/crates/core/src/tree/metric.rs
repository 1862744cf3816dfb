use thiserror::Error;

use super::AlgebraicTree;
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetricError {
    #[error("distance matrix must be square")]
    NotSquare,
    #[error("distance matrix is not symmetric at ({0}, {1})")]
    Asymmetric(usize, usize),
    #[error("negative distance at ({0}, {1})")]
    Negative(usize, usize),
    #[error("nonzero diagonal entry at {0}")]
    NonzeroDiagonal(usize),
    #[error("index {0} out of range")]
    OutOfRange(usize),
    #[error("no point of the set is a branch point of ({0}, {1}, {2})")]
    NoBranchPoint(usize, usize, usize),
}

/// Symmetric matrix of (pseudo)distances with zero diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix<S> {
    n: usize,
    data: Vec<S>,
}

impl<S: Scalar> DistanceMatrix<S> {
    pub fn new(rows: Vec<Vec<S>>) -> Result<Self, MetricError> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(MetricError::NotSquare);
        }
        let data: Vec<S> = rows.into_iter().flatten().collect();
        let m = DistanceMatrix { n, data };
        for i in 0..n {
            if !m.get(i, i).close_to(&S::zero()) {
                return Err(MetricError::NonzeroDiagonal(i));
            }
            for j in 0..n {
                if m.get(i, j).is_negative() {
                    return Err(MetricError::Negative(i, j));
                }
                if !m.get(i, j).close_to(m.get(j, i)) {
                    return Err(MetricError::Asymmetric(i, j));
                }
            }
        }
        Ok(m)
    }

    /// Builds a matrix from a function of index pairs without checks.
    pub(crate) fn from_fn(n: usize, f: impl Fn(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        DistanceMatrix { n, data }
    }

    /// Graph distance with unit edge lengths, indexed by sorted vertex id.
    pub fn from_tree(tree: &AlgebraicTree) -> Self {
        let n = tree.len();
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            let h = tree.hang(i);
            data.extend(h.depth.iter().map(|&d| S::from_usize(d)));
        }
        DistanceMatrix { n, data }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<S>> {
        self.data.chunks(self.n.max(1)).map(|r| r.to_vec()).collect()
    }

    pub fn satisfies_triangle_inequality(&self) -> bool {
        let n = self.n;
        (0..n).all(|i| {
            (0..n).all(|j| {
                (0..n).all(|k| {
                    let lhs = self.get(i, j).clone();
                    let rhs = self.get(i, k).clone() + self.get(k, j).clone();
                    lhs <= rhs || lhs.close_to(&rhs)
                })
            })
        })
    }

    /// Quadruples violating the four-point condition: among the three pair
    /// sums, the two largest must coincide.
    pub fn four_point_violations(&self) -> Vec<[usize; 4]> {
        let n = self.n;
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    for l in k + 1..n {
                        let d = |a, b| self.get(a, b).clone();
                        let mut sums = [d(i, j) + d(k, l), d(i, k) + d(j, l), d(i, l) + d(j, k)];
                        sums.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
                        if !sums[1].close_to(&sums[2]) {
                            out.push([i, j, k, l]);
                        }
                    }
                }
            }
        }
        out
    }

    fn on_segment(&self, a: usize, w: usize, b: usize) -> bool {
        (self.get(a, w).clone() + self.get(w, b).clone()).close_to(self.get(a, b))
    }

    /// Index of the point lying between every pair of `i, j, k`.
    ///
    /// For pseudometrics several indices may qualify; the smallest is returned.
    pub fn branch_point(&self, i: usize, j: usize, k: usize) -> Result<usize, MetricError> {
        for x in [i, j, k] {
            if x >= self.n {
                return Err(MetricError::OutOfRange(x));
            }
        }
        (0..self.n)
            .find(|&w| self.on_segment(i, w, j) && self.on_segment(j, w, k) && self.on_segment(i, w, k))
            .ok_or(MetricError::NoBranchPoint(i, j, k))
    }

    /// Gromov product `(d(i,j) + d(i,k) - d(j,k)) / 2`.
    pub fn gromov_product(&self, i: usize, j: usize, k: usize) -> S {
        (self.get(i, j).clone() + self.get(i, k).clone() - self.get(j, k).clone()) * S::half()
    }
}
