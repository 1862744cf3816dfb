//! Small reference objects used by tests, the acceptance suite and the
//! command-line tool.

use rand::Rng;

use crate::measure::{A2mTree, Measure, TwoLevelMeasure};
use crate::scalar::{Rational, Scalar};
use crate::tree::{random_binary_tree, AlgebraicTree, VertexId};
use crate::triangulation::{ArcTwoLevelMeasure, Triangulation};

fn q(p: i64, d: i64) -> Rational {
    Rational::from_ratio(p, d)
}

fn measure(masses: &[(VertexId, Rational)]) -> Measure<Rational> {
    Measure::new(masses.iter().cloned()).expect("fixture masses sum to one")
}

fn a2m(vertices: &[VertexId], edges: &[(VertexId, VertexId)], nu: Vec<(Rational, Measure<Rational>)>) -> A2mTree<Rational> {
    let tree = AlgebraicTree::new(vertices.iter().copied(), edges.iter().copied()).expect("fixture tree");
    A2mTree::new(tree, TwoLevelMeasure::new(nu).expect("fixture weights")).expect("fixture measure")
}

/// The 12-gon zigzag triangulation with sides coloured alternately: the
/// measure is `½ δ_κ1 + ½ δ_κ2` with `κ1` uniform on the even sides and
/// `κ2` uniform on the odd sides.
pub fn two_colour_dodecagon() -> (Triangulation<Rational>, ArcTwoLevelMeasure<Rational>) {
    let n = 12;
    let mut diagonals = Vec::new();
    let (mut lo, mut hi) = (0usize, n - 1);
    let mut take_lo = true;
    while hi - lo > 2 {
        if take_lo {
            diagonals.push((lo + 1, hi));
            lo += 1;
        } else {
            diagonals.push((lo, hi - 1));
            hi -= 1;
        }
        take_lo = !take_lo;
    }
    let t = Triangulation::regular(n, diagonals);
    let colour = |parity: usize| (0..n).map(|a| if a % 2 == parity { q(1, 6) } else { q(0, 1) }).collect::<Vec<_>>();
    let k = ArcTwoLevelMeasure::new(vec![(q(1, 2), colour(0)), (q(1, 2), colour(1))]).expect("fixture arc measure");
    (t, k)
}

/// Leaves `0` (the root, mass 1/4), `1`, `2`, `3` (mass 1/8 each) and `4`
/// (mass 3/8); branch points `5`, `6`, `7` with `5` next to the root, `6`
/// carrying leaf `1` and `7` carrying leaves `2` and `3`.
pub fn ordered_atoms_tree() -> A2mTree<Rational> {
    let edges = [(0, 5), (5, 6), (5, 4), (6, 1), (6, 7), (7, 2), (7, 3)];
    let mu = measure(&[(0, q(1, 4)), (1, q(1, 8)), (2, q(1, 8)), (3, q(1, 8)), (4, q(3, 8))]);
    a2m(&[0, 1, 2, 3, 4, 5, 6, 7], &edges, vec![(q(1, 1), mu)])
}

/// Named binary a2m trees small enough for exact shape enumeration.
pub fn shape_fixtures() -> Vec<(&'static str, A2mTree<Rational>)> {
    let star = [(0, 3), (1, 3), (2, 3)];
    let quartet = [(0, 4), (1, 4), (4, 5), (2, 5), (3, 5)];
    let caterpillar = [(0, 5), (1, 5), (5, 6), (2, 6), (6, 7), (3, 7), (4, 7)];
    let balanced = [(0, 6), (1, 6), (6, 9), (2, 7), (3, 7), (7, 9), (4, 8), (5, 8), (8, 9)];
    let subdivided = [(0, 4), (4, 3), (1, 3), (2, 3)];
    vec![
        (
            "star-uniform",
            a2m(&[0, 1, 2, 3], &star, vec![(q(1, 1), measure(&[(0, q(1, 3)), (1, q(1, 3)), (2, q(1, 3))]))]),
        ),
        (
            "star-two-hosts",
            a2m(
                &[0, 1, 2, 3],
                &star,
                vec![(q(1, 2), measure(&[(0, q(1, 1))])), (q(1, 2), measure(&[(1, q(1, 2)), (2, q(1, 2))]))],
            ),
        ),
        (
            "quartet",
            a2m(
                &[0, 1, 2, 3, 4, 5],
                &quartet,
                vec![
                    (q(1, 3), measure(&[(0, q(1, 2)), (1, q(1, 2))])),
                    (q(2, 3), measure(&[(0, q(1, 4)), (1, q(1, 4)), (2, q(1, 4)), (3, q(1, 4))])),
                ],
            ),
        ),
        (
            "caterpillar",
            a2m(
                &[0, 1, 2, 3, 4, 5, 6, 7],
                &caterpillar,
                vec![
                    (q(1, 4), measure(&[(0, q(1, 1))])),
                    (q(1, 4), measure(&[(1, q(1, 3)), (4, q(2, 3))])),
                    (q(1, 2), measure(&[(2, q(1, 2)), (3, q(1, 4)), (4, q(1, 4))])),
                ],
            ),
        ),
        (
            "balanced",
            a2m(
                &[0, 1, 2, 3, 4, 5, 6, 7, 8, 9],
                &balanced,
                vec![(q(1, 1), measure(&(0..6).map(|v| (v, q(1, 6))).collect::<Vec<_>>()))],
            ),
        ),
        (
            "inner-atom",
            a2m(
                &[0, 1, 2, 3, 4],
                &subdivided,
                vec![
                    (q(1, 2), measure(&[(4, q(1, 2)), (1, q(1, 2))])),
                    (q(1, 2), measure(&[(0, q(1, 3)), (2, q(2, 3))])),
                ],
            ),
        ),
    ]
}

fn random_probability<R: Rng>(k: usize, denominator: i64, rng: &mut R) -> Vec<Rational> {
    let raw: Vec<i64> = (0..k).map(|_| rng.random_range(1..=denominator)).collect();
    let total: i64 = raw.iter().sum();
    raw.into_iter().map(|x| q(x, total)).collect()
}

/// A random binary tree with `components` random rational measures on its
/// leaves, each supported on at least one leaf.
pub fn random_a2m_tree<R: Rng>(leaves: usize, components: usize, rng: &mut R) -> A2mTree<Rational> {
    let tree = random_binary_tree(leaves, rng);
    let leaf_ids = tree.leaves();
    let weights = random_probability(components.max(1), 6, rng);
    let mut nu = Vec::with_capacity(weights.len());
    for w in weights {
        let mut support: Vec<VertexId> = leaf_ids.iter().copied().filter(|_| rng.random_bool(0.6)).collect();
        if support.is_empty() {
            support.push(leaf_ids[rng.random_range(0..leaf_ids.len())]);
        }
        let masses = random_probability(support.len(), 5, rng);
        nu.push((w, measure(&support.into_iter().zip(masses).collect::<Vec<_>>())));
    }
    A2mTree::new(tree, TwoLevelMeasure::new(nu).expect("weights sum to one")).expect("atoms on leaves")
}
