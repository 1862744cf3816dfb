use std::collections::BTreeMap;

use super::{Measure, MeasureError};
use crate::scalar::Scalar;
use crate::tree::{AlgebraicTree, DistanceMatrix, VertexId};

/// The law of `c(X1, X2, X3)` for three independent draws from a measure.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchPointDistribution<S>(pub Measure<S>);

impl<S: Scalar> BranchPointDistribution<S> {
    pub fn measure(&self) -> &Measure<S> {
        &self.0
    }

    pub fn mass(&self, v: VertexId) -> S {
        self.0.mass(v)
    }
}

/// Component masses of `T \ {v}` for every vertex `v`.
pub(crate) fn component_masses<S: Scalar>(tree: &AlgebraicTree, dense: &[S]) -> Vec<Vec<S>> {
    let n = tree.len();
    let h = tree.hang(0);
    let mut below = dense.to_vec();
    for &v in h.order.iter().rev() {
        if v != 0 {
            let p = h.parent[v];
            below[p] = below[p].clone() + below[v].clone();
        }
    }
    let total = below[0].clone();
    (0..n)
        .map(|v| {
            tree.adjacency()[v]
                .iter()
                .map(|&w| if v != 0 && w == h.parent[v] { total.clone() - below[v].clone() } else { below[w].clone() })
                .collect()
        })
        .collect()
}

/// Exact branch point distribution of `mu`.
///
/// Three draws branch at `v` unless some component of `T \ {v}` receives at
/// least two of them, and for a component of mass `a` that event has
/// probability `3a² - 2a³`. The events are disjoint, so
/// `ξ{v} = 1 - Σ_i (3a_i² - 2a_i³)`.
pub fn branch_point_distribution<S: Scalar>(
    tree: &AlgebraicTree,
    mu: &Measure<S>,
) -> Result<BranchPointDistribution<S>, MeasureError> {
    let dense = mu.dense(tree)?;
    let comps = component_masses(tree, &dense);
    let three = S::from_usize(3);
    let two = S::from_usize(2);
    let masses = comps.iter().enumerate().map(|(v, parts)| {
        let p = parts.iter().fold(S::zero(), |acc, a| {
            let a2 = a.clone() * a.clone();
            acc + three.clone() * a2.clone() - two.clone() * a2 * a.clone()
        });
        let m = S::one() - p;
        // Rounding can leave a leaf slightly below zero in floating point.
        let m = if m.is_negative() && m.close_to(&S::zero()) { S::zero() } else { m };
        (tree.id(v), m)
    });
    Ok(BranchPointDistribution(Measure::unnormalized(masses)?))
}

/// Dense matrix of `r_ξ(x, y) = ξ([x, y]) - ξ{x}/2 - ξ{y}/2`, indexed like
/// `tree.vertices()`.
pub fn r_xi_matrix<S: Scalar>(tree: &AlgebraicTree, xi: &BranchPointDistribution<S>) -> Result<DistanceMatrix<S>, MeasureError> {
    let dense = xi.0.dense(tree)?;
    let n = tree.len();
    let mut rows = vec![vec![S::zero(); n]; n];
    for (x, row) in rows.iter_mut().enumerate() {
        let h = tree.hang(x);
        let mut along = vec![S::zero(); n];
        for &v in &h.order {
            along[v] = if v == x { dense[x].clone() } else { along[h.parent[v]].clone() + dense[v].clone() };
            row[v] = along[v].clone() - (dense[x].clone() + dense[v].clone()) * S::half();
        }
        row[x] = S::zero();
    }
    Ok(DistanceMatrix::from_fn(n, |i, j| rows[i][j].clone()))
}

/// The metric quotient of `T` under `r_ξ`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuotientMetric<S> {
    /// Classes of vertices at `r_ξ`-distance zero, ordered by smallest member.
    pub classes: Vec<Vec<VertexId>>,
    /// Projection of each vertex to its class index.
    pub class_of: BTreeMap<VertexId, usize>,
    /// `r_ξ` between classes.
    pub distances: DistanceMatrix<S>,
}

pub fn quotient_metric<S: Scalar>(tree: &AlgebraicTree, xi: &BranchPointDistribution<S>) -> Result<QuotientMetric<S>, MeasureError> {
    let r = r_xi_matrix(tree, xi)?;
    let mut reps: Vec<usize> = Vec::new();
    let mut classes: Vec<Vec<VertexId>> = Vec::new();
    let mut class_of = BTreeMap::new();
    for v in 0..tree.len() {
        let found = reps.iter().position(|&rep| r.get(rep, v).close_to(&S::zero()));
        let c = match found {
            Some(c) => c,
            None => {
                reps.push(v);
                classes.push(Vec::new());
                reps.len() - 1
            }
        };
        classes[c].push(tree.id(v));
        class_of.insert(tree.id(v), c);
    }
    let distances = DistanceMatrix::from_fn(reps.len(), |i, j| r.get(reps[i], reps[j]).clone());
    Ok(QuotientMetric { classes, class_of, distances })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(a: i64, b: i64) -> Rational {
        Rational::from_ratio(a, b)
    }

    fn star() -> AlgebraicTree {
        AlgebraicTree::new([0, 1, 2, 3], [(0, 1), (0, 2), (0, 3)]).unwrap()
    }

    #[test]
    fn float_masses_are_never_negative() {
        let mut rng = crate::rng::rng_from_seed(20);
        for _ in 0..50 {
            let chi = crate::fixtures::random_a2m_tree(20, 1, &mut rng).to_f64();
            let xi = branch_point_distribution(&chi.tree, &chi.nu.intensity()).unwrap();
            assert!(xi.measure().iter().all(|(_, m)| *m >= 0.0));
        }
    }

    #[test]
    fn star_uniform_leaves() {
        let mu = Measure::<Rational>::uniform(&[1, 2, 3]).unwrap();
        let xi = branch_point_distribution(&star(), &mu).unwrap();
        assert_eq!(xi.mass(0), q(6, 27));
        assert_eq!(xi.mass(1), q(7, 27));
        assert_eq!(xi.measure().total(), q(1, 1));
        let r = r_xi_matrix(&star(), &xi).unwrap();
        assert_eq!(*r.get(1, 2), q(13, 27));
    }

    #[test]
    fn dirac_collapses() {
        let t = star();
        let xi = branch_point_distribution(&t, &Measure::<Rational>::dirac(2)).unwrap();
        assert_eq!(xi.measure(), &Measure::dirac(2));
        let qm = quotient_metric(&t, &xi).unwrap();
        assert_eq!(qm.classes, vec![vec![0, 1, 3], vec![2]]);
        assert_eq!(*qm.distances.get(0, 1), q(1, 2));
    }

    #[test]
    fn path_middle_stays_separate() {
        let t = AlgebraicTree::new([0, 1, 2], [(0, 1), (1, 2)]).unwrap();
        let mu = Measure::new([(0, q(1, 2)), (2, q(1, 2))]).unwrap();
        let xi = branch_point_distribution(&t, &mu).unwrap();
        assert_eq!((xi.mass(0), xi.mass(1), xi.mass(2)), (q(1, 2), q(0, 1), q(1, 2)));
        let qm = quotient_metric(&t, &xi).unwrap();
        // b carries no mass but sits at distance 1/4 from both ends
        assert_eq!(qm.classes.len(), 3);
        assert_eq!(*qm.distances.get(0, 1), q(1, 4));
        assert_eq!(*qm.distances.get(0, 2), q(1, 2));
    }
}
