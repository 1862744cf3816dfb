use std::collections::{BTreeMap, BTreeSet};

use a2m_core::fixtures::{ordered_atoms_tree, two_colour_dodecagon};
use a2m_core::measure::{A2mTree, Measure, TwoLevelMeasure};
use a2m_core::rng::rng_from_seed;
use a2m_core::tree::binary_trees;
use a2m_core::triangulation::{
    circle_point, dual_tree, encode_tree, enumerate_triangulations, hausdorff_distance, ArcTwoLevelMeasure,
    ComponentOrder, Face, PointSet2D, Triangulation,
};
use a2m_core::{Rational, Scalar, VertexId};
use proptest::prelude::*;
use rand::Rng;

fn q(a: i64, b: i64) -> Rational {
    Rational::from_ratio(a, b)
}

fn crosses((a, b): (usize, usize), (c, d): (usize, usize)) -> bool {
    (a < c && c < b && b < d) || (c < a && a < d && d < b)
}

/// Every set of `n - 3` pairwise non-crossing diagonals, found by brute force.
fn brute_force_triangulations(n: usize) -> BTreeSet<Vec<(usize, usize)>> {
    let diagonals: Vec<(usize, usize)> =
        (0..n).flat_map(|a| (a + 2..n).map(move |b| (a, b))).filter(|&(a, b)| !(a == 0 && b == n - 1)).collect();
    let mut out = BTreeSet::new();
    fn extend(
        pool: &[(usize, usize)],
        start: usize,
        need: usize,
        chosen: &mut Vec<(usize, usize)>,
        out: &mut BTreeSet<Vec<(usize, usize)>>,
    ) {
        if need == 0 {
            out.insert(chosen.clone());
            return;
        }
        for i in start..pool.len() {
            if chosen.iter().all(|&c| !crosses(c, pool[i])) {
                chosen.push(pool[i]);
                extend(pool, i + 1, need - 1, chosen, out);
                chosen.pop();
            }
        }
    }
    extend(&diagonals, 0, n - 3, &mut Vec::new(), &mut out);
    out
}

#[test]
fn enumeration_matches_brute_force() {
    for n in 3..=8 {
        let listed: Vec<Triangulation<Rational>> = enumerate_triangulations(n).unwrap();
        let as_sets: BTreeSet<Vec<(usize, usize)>> = listed.iter().map(|t| t.diagonals().to_vec()).collect();
        assert_eq!(as_sets.len(), listed.len(), "duplicates for n = {n}");
        assert_eq!(as_sets, brute_force_triangulations(n), "n = {n}");
        assert!(listed.iter().all(|t| t.validate().is_ok()));
    }
    assert!(enumerate_triangulations::<Rational>(2).is_err());
}

#[test]
fn invalid_triangulations_are_reported() {
    let crossing = Triangulation::<Rational>::regular(4, vec![(0, 2), (1, 3)]);
    assert!(!crossing.validate().is_ok());
    let missing = Triangulation::<Rational>::regular(5, vec![(0, 2)]);
    assert!(!missing.validate().is_ok());
    let bad_arcs = Triangulation::new(3, vec![], vec![q(1, 2), q(1, 2), q(1, 2)]);
    assert!(!bad_arcs.validate().is_ok());
}

fn random_measure_on_leaves<R: Rng>(tree: &a2m_core::AlgebraicTree, rng: &mut R) -> TwoLevelMeasure<Rational> {
    let leaves = tree.leaves();
    let k = rng.random_range(1..=3);
    let weights: Vec<i64> = (0..k).map(|_| rng.random_range(1..5)).collect();
    let wt: i64 = weights.iter().sum();
    let mut comps = Vec::new();
    for (i, w) in weights.into_iter().enumerate() {
        // The first component charges every leaf so that no arc is degenerate.
        let masses: Vec<i64> = leaves.iter().map(|_| rng.random_range(if i == 0 { 1 } else { 0 }..4)).collect();
        let masses = if masses.iter().all(|&m| m == 0) { vec![1; leaves.len()] } else { masses };
        let total: i64 = masses.iter().sum();
        let mu = Measure::new(leaves.iter().zip(&masses).map(|(&v, &m)| (v, q(m, total)))).unwrap();
        comps.push((q(w, wt), mu));
    }
    TwoLevelMeasure::new(comps).unwrap()
}

fn assert_round_trip(chi: &A2mTree<Rational>, root: VertexId, order: &ComponentOrder) {
    let e = encode_tree(chi, root, order).unwrap();
    assert!(e.triangulation.validate().is_ok(), "{:?}", e.triangulation.validate().violations);
    let back = dual_tree(&e.triangulation, &e.measure).unwrap();
    assert_eq!(back.chi.canonical_code(), chi.canonical_code());
    let ours = chi.nu.components();
    let theirs = back.chi.nu.components();
    assert_eq!(ours.len(), theirs.len());
    for ((w1, m1), (w2, m2)) in ours.iter().zip(theirs) {
        assert_eq!(w1, w2);
        for (side, &leaf) in e.leaf_of_side.iter().enumerate() {
            assert_eq!(m1.mass(leaf), m2.mass(side as VertexId));
        }
        assert_eq!(m2.support().len(), m1.support().len());
    }
}

#[test]
fn codec_round_trip_on_all_small_binary_trees() {
    let mut rng = rng_from_seed(99);
    let mut cases = 0;
    for leaves in 2..=7 {
        for tree in binary_trees(leaves) {
            let chi = A2mTree::new(tree.clone(), random_measure_on_leaves(&tree, &mut rng)).unwrap();
            let branch = tree.branch_points();
            for root in tree.leaves() {
                for mask in 0u32..(1 << branch.len()) {
                    let flipped: BTreeSet<VertexId> =
                        branch.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &v)| v).collect();
                    assert_round_trip(&chi, root, &ComponentOrder::Flipped(flipped));
                    cases += 1;
                }
                assert_round_trip(&chi, root, &ComponentOrder::LargestLeafFirst);
            }
        }
    }
    assert!(cases > 500);
}

#[test]
fn decoding_then_encoding_from_side_zero_is_the_identity() {
    let mut rng = rng_from_seed(5);
    for n in 3..=8 {
        for t in enumerate_triangulations::<Rational>(n).unwrap() {
            let raw: Vec<i64> = (0..n).map(|_| rng.random_range(1..5)).collect();
            let total: i64 = raw.iter().sum();
            let arcs: Vec<Rational> = raw.iter().map(|&a| q(a, total)).collect();
            let t = Triangulation::new(n, t.diagonals().to_vec(), arcs.clone());
            let k = ArcTwoLevelMeasure::from_arcs(&arcs);
            let d = dual_tree(&t, &k).unwrap();
            let e = encode_tree(&d.chi, 0, &ComponentOrder::SmallestLeafFirst).unwrap();
            assert_eq!(e.triangulation, t);
            assert_eq!(e.measure, k);
            assert_eq!(e.leaf_of_side, (0..n as VertexId).collect::<Vec<_>>());
        }
    }
}

#[test]
fn component_masses_match_arc_masses() {
    let mut rng = rng_from_seed(21);
    for n in [4, 6, 7] {
        for t in enumerate_triangulations::<Rational>(n).unwrap() {
            let comps: Vec<(Rational, Vec<Rational>)> = (0..2)
                .map(|_| {
                    let raw: Vec<i64> = (0..n).map(|_| rng.random_range(0..4)).collect();
                    let raw = if raw.iter().all(|&x| x == 0) { vec![1; n] } else { raw };
                    let total: i64 = raw.iter().sum();
                    (q(1, 2), raw.iter().map(|&x| q(x, total)).collect())
                })
                .collect();
            let intensity: Vec<Rational> =
                (0..n).map(|a| comps.iter().fold(q(0, 1), |s, (w, k)| s + w.clone() * k[a].clone())).collect();
            if intensity.iter().any(|x| *x == q(0, 1)) {
                continue;
            }
            let t = Triangulation::new(n, t.diagonals().to_vec(), intensity);
            let k = ArcTwoLevelMeasure::new(comps).unwrap();
            let d = dual_tree(&t, &k).unwrap();
            let ids: Vec<VertexId> = d.chi.tree.vertices().to_vec();
            for &x in &ids {
                for &y in &ids {
                    let arcs = t.component_arcs(d.faces[x as usize], d.faces[y as usize]);
                    let comp = d.chi.tree.component(x, y).unwrap();
                    for ((_, mu), (_, kappa)) in d.chi.nu.components().iter().zip(k.components()) {
                        let arc_mass = arcs.iter().fold(q(0, 1), |s, &a| s + kappa[a].clone());
                        assert_eq!(mu.mass_of(&comp), arc_mass, "x {x} y {y}");
                    }
                }
            }
        }
    }
}

#[test]
fn two_colour_dodecagon_gives_one_sixth_per_leaf() {
    let (t, k) = two_colour_dodecagon();
    let d = dual_tree(&t, &k).unwrap();
    assert_eq!(d.chi.tree.leaves().len(), 12);
    assert!(d.chi.tree.is_binary());
    let comps = d.chi.nu.components();
    assert_eq!(comps.len(), 2);
    for side in 0..12u64 {
        assert_eq!(d.faces[side as usize], Face::Segment(side as usize));
        let (red, green) = (comps[0].1.mass(side), comps[1].1.mass(side));
        if side % 2 == 0 {
            assert_eq!((red, green), (q(1, 6), q(0, 1)));
        } else {
            assert_eq!((red, green), (q(0, 1), q(1, 6)));
        }
        assert_eq!(d.chi.nu.intensity().mass(side), q(1, 12));
    }
    assert_eq!(comps[0].0, q(1, 2));
}

#[test]
fn uniform_dodecagon_dual_is_uniform_on_leaves() {
    let (t, _) = two_colour_dodecagon();
    let d = dual_tree(&t, &ArcTwoLevelMeasure::from_arcs(t.arcs())).unwrap();
    let mu = &d.chi.nu.components()[0].1;
    assert_eq!(mu.support(), d.chi.tree.leaves());
    assert!(d.chi.tree.leaves().iter().all(|&l| mu.mass(l) == q(1, 12)));
}

#[test]
fn ordered_atoms_tree_encodes_to_the_expected_polygon() {
    let chi = ordered_atoms_tree();
    let e = encode_tree(&chi, 0, &ComponentOrder::SmallestLeafFirst).unwrap();
    assert_eq!(e.leaf_of_side, vec![0, 1, 2, 3, 4]);
    assert_eq!(e.triangulation.arcs(), &[q(1, 4), q(1, 8), q(1, 8), q(1, 8), q(3, 8)]);
    assert_eq!(e.triangulation.positions(), vec![q(0, 1), q(1, 4), q(3, 8), q(1, 2), q(5, 8)]);
    let expected: BTreeMap<VertexId, [usize; 3]> = [(5, [0, 1, 4]), (6, [1, 2, 4]), (7, [2, 3, 4])].into();
    assert_eq!(e.triangle_of_branch, expected);
}

proptest! {
    #[test]
    fn hausdorff_is_a_metric(seed in any::<u64>(), sizes in (1usize..8, 1usize..8, 1usize..8)) {
        let mut rng = rng_from_seed(seed);
        let mut set = |k: usize| {
            PointSet2D::new((0..k).map(|_| {
                let p = circle_point(rng.random::<f64>());
                let r = rng.random::<f64>();
                [p[0] * r, p[1] * r]
            }).collect()).unwrap()
        };
        let (a, b, c) = (set(sizes.0), set(sizes.1), set(sizes.2));
        prop_assert_eq!(hausdorff_distance(&a, &a), 0.0);
        prop_assert_eq!(hausdorff_distance(&a, &b), hausdorff_distance(&b, &a));
        prop_assert!(hausdorff_distance(&a, &c) <= hausdorff_distance(&a, &b) + hausdorff_distance(&b, &c) + 1e-12);
    }

    #[test]
    fn discretized_triangulations_stay_in_the_disc(n in 3usize..9, pick in any::<u32>()) {
        let all = enumerate_triangulations::<f64>(n).unwrap();
        let t = &all[pick as usize % all.len()];
        let pts = t.discretize(4);
        prop_assert!(pts.points().len() >= n);
        prop_assert_eq!(hausdorff_distance(&pts, &pts), 0.0);
    }
}
