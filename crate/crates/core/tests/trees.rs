use a2m_core::rng::rng_from_seed;
use a2m_core::tree::{
    free_trees, random_tree, root_tree, validate_branch_point_map, validate_min_map, AlgebraicTree, BranchPointTable,
    DistanceMatrix, MetricError, RootedTree,
};
use a2m_core::{Rational, Scalar};
use proptest::prelude::*;

#[test]
fn every_small_tree_satisfies_the_axioms() {
    let mut checked = 0;
    for n in 1..=8 {
        for t in free_trees(n) {
            let report = validate_branch_point_map(&BranchPointTable::from_tree(&t));
            assert!(report.is_ok(), "{:?}: {:?}", t.edges(), report.violations.first());
            checked += 1;
        }
    }
    assert_eq!(checked, 1 + 1 + 1 + 2 + 3 + 6 + 11 + 23);
}

/// Recovers the tree whose intervals the table describes: `x` and `y` are
/// adjacent when no third vertex lies between them.
fn tree_of_table(table: &BranchPointTable, vs: &[u64]) -> Option<AlgebraicTree> {
    let mut edges = Vec::new();
    for (i, &x) in vs.iter().enumerate() {
        for &y in &vs[i + 1..] {
            if vs.iter().all(|&z| z == x || z == y || table.get(x, y, z) != Some(z)) {
                edges.push((x, y));
            }
        }
    }
    let t = AlgebraicTree::new(vs.iter().copied(), edges).ok()?;
    (BranchPointTable::from_tree(&t) == *table).then_some(t)
}

#[test]
fn corrupting_one_triple_is_detected() {
    for n in 3..=6 {
        for t in free_trees(n) {
            let vs = t.vertices().to_vec();
            for &x in &vs {
                for &y in &vs {
                    for &z in &vs {
                        let right = t.branch_point(x, y, z).unwrap();
                        let Some(&wrong) = vs.iter().find(|&&w| w != right) else { continue };
                        let same = |a, b, c| [a, b, c] == [x, y, z] || {
                            let mut p = [a, b, c];
                            let mut q = [x, y, z];
                            p.sort_unstable();
                            q.sort_unstable();
                            p == q
                        };
                        let table = BranchPointTable::from_fn(&vs, |a, b, c| {
                            if same(a, b, c) { wrong } else { t.branch_point(a, b, c).unwrap() }
                        })
                        .unwrap();
                        if validate_branch_point_map(&table).is_ok() {
                            // Accepted maps must come from some other tree on the same vertices.
                            let other = tree_of_table(&table, &vs).expect("accepted map has no tree");
                            assert_ne!(other, t);
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn discrete_triangle_has_no_branch_points() {
    let one = Rational::from_ratio(1, 1);
    let zero = Rational::from_ratio(0, 1);
    let rows = vec![
        vec![zero.clone(), one.clone(), one.clone()],
        vec![one.clone(), zero.clone(), one.clone()],
        vec![one.clone(), one.clone(), zero.clone()],
    ];
    let d = DistanceMatrix::new(rows).unwrap();
    assert!(d.satisfies_triangle_inequality());
    assert!(d.four_point_violations().is_empty());
    assert_eq!(d.branch_point(0, 1, 2), Err(MetricError::NoBranchPoint(0, 1, 2)));
}

#[test]
fn graph_metric_branch_points_match_the_tree() {
    for n in 1..=7 {
        for t in free_trees(n) {
            let d: DistanceMatrix<Rational> = DistanceMatrix::from_tree(&t);
            assert!(d.four_point_violations().is_empty());
            let vs = t.vertices();
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let c = t.branch_point(vs[i], vs[j], vs[k]).unwrap();
                        assert_eq!(vs[d.branch_point(i, j, k).unwrap()], c);
                    }
                }
            }
        }
    }
}

#[test]
fn rooting_round_trips_through_the_min_map() {
    for n in 1..=7 {
        for t in free_trees(n) {
            for &rho in t.vertices() {
                let rooted = root_tree(&t, rho).unwrap();
                let f = |x, y| rooted.min_map(x, y).unwrap();
                assert!(validate_min_map(t.vertices(), f).is_ok());
                let again = RootedTree::from_min_map(t.vertices(), f).unwrap();
                assert_eq!(again, rooted);
                assert_eq!(rooted.unroot(), t);
                for &x in t.vertices() {
                    for &y in t.vertices() {
                        for &z in t.vertices() {
                            assert_eq!(rooted.branch_point(x, y, z).unwrap(), t.branch_point(x, y, z).unwrap());
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn a_cycle_is_not_a_tree() {
    let err = AlgebraicTree::new([1, 2, 3], [(1, 2), (2, 3), (3, 1)]).unwrap_err();
    assert!(err.to_string().contains("edge"), "{err}");
}

proptest! {
    #[test]
    fn random_trees_satisfy_the_axioms(n in 1usize..14, seed in any::<u64>()) {
        let t = random_tree(n, &mut rng_from_seed(seed));
        prop_assert!(validate_branch_point_map(&BranchPointTable::from_tree(&t)).is_ok());
    }

    #[test]
    fn shape_code_ignores_vertex_names(n in 1usize..16, seed in any::<u64>(), shift in 1u64..1000) {
        let t = random_tree(n, &mut rng_from_seed(seed));
        let renamed = AlgebraicTree::new(
            t.vertices().iter().map(|&v| (v * 7919 + shift) % 100_003),
            t.edges().into_iter().map(|(a, b)| ((a * 7919 + shift) % 100_003, (b * 7919 + shift) % 100_003)),
        )
        .unwrap();
        prop_assert_eq!(renamed.shape_code(), t.shape_code());
    }

    #[test]
    fn path_and_component_are_consistent(n in 2usize..14, seed in any::<u64>()) {
        let t = random_tree(n, &mut rng_from_seed(seed));
        let vs = t.vertices();
        let (x, y) = (vs[0], vs[n - 1]);
        let path = t.path(x, y).unwrap();
        prop_assert_eq!(path.first(), Some(&x));
        prop_assert_eq!(path.last(), Some(&y));
        for w in path.windows(2) {
            prop_assert!(t.neighbors(w[0]).unwrap().contains(&w[1]));
        }
        let comps = t.components_at(x).unwrap();
        prop_assert_eq!(comps.iter().map(|c| c.len()).sum::<usize>(), n - 1);
        prop_assert!(t.component(x, y).unwrap().contains(&y));
    }
}
