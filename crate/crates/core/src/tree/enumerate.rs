use std::collections::BTreeMap;

use rand::Rng;

use super::AlgebraicTree;

fn dedupe(trees: Vec<Vec<Vec<usize>>>) -> Vec<AlgebraicTree> {
    let mut by_code = BTreeMap::new();
    for adj in trees {
        let t = AlgebraicTree::from_adjacency(&adj).expect("generated graph is a tree");
        by_code.entry(t.shape_code()).or_insert(t);
    }
    by_code.into_values().collect()
}

/// All unlabelled trees on `n` vertices, one representative per isomorphism
/// class, with vertex ids `0..n`.
pub fn free_trees(n: usize) -> Vec<AlgebraicTree> {
    if n == 0 {
        return Vec::new();
    }
    let mut current = vec![AlgebraicTree::from_adjacency(&[Vec::new()]).expect("single vertex")];
    for size in 2..=n {
        let mut grown = Vec::new();
        for t in &current {
            for v in 0..t.len() {
                let mut adj = t.adjacency().to_vec();
                adj.push(vec![v]);
                adj[v].push(size - 1);
                grown.push(adj);
            }
        }
        current = dedupe(grown);
    }
    current
}

/// All unlabelled trees with `leaves` leaves whose other vertices have degree
/// exactly three.
pub fn binary_trees(leaves: usize) -> Vec<AlgebraicTree> {
    match leaves {
        0 => return Vec::new(),
        1 => return free_trees(1),
        2 => return free_trees(2),
        _ => {}
    }
    let mut current = free_trees(2);
    for _ in 3..=leaves {
        let mut grown = Vec::new();
        for t in &current {
            let n = t.len();
            for (a, b) in t.edges() {
                let (a, b) = (a as usize, b as usize);
                let mut adj = t.adjacency().to_vec();
                let mid = n;
                let leaf = n + 1;
                adj[a].retain(|&x| x != b);
                adj[b].retain(|&x| x != a);
                adj[a].push(mid);
                adj[b].push(mid);
                adj.push(vec![a, b, leaf]);
                adj.push(vec![mid]);
                grown.push(adj);
            }
        }
        current = dedupe(grown);
    }
    current
}

/// A uniformly random labelled tree on vertices `0..n`, decoded from a
/// random Prüfer sequence.
pub fn random_tree<R: Rng>(n: usize, rng: &mut R) -> AlgebraicTree {
    let n = n.max(1);
    let mut adj = vec![Vec::new(); n];
    if n >= 2 {
        let code: Vec<usize> = (0..n - 2).map(|_| rng.random_range(0..n)).collect();
        let mut degree = vec![1usize; n];
        for &c in &code {
            degree[c] += 1;
        }
        let mut leaves: std::collections::BTreeSet<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
        let mut link = |a: usize, b: usize| {
            adj[a].push(b);
            adj[b].push(a);
        };
        for &c in &code {
            let leaf = leaves.pop_first().expect("a leaf is always available");
            link(leaf, c);
            degree[c] -= 1;
            if degree[c] == 1 {
                leaves.insert(c);
            }
        }
        let a = leaves.pop_first().expect("two leaves remain");
        let b = leaves.pop_first().expect("two leaves remain");
        link(a, b);
    }
    AlgebraicTree::from_adjacency(&adj).expect("Prüfer decoding yields a tree")
}

/// A random binary tree with `leaves` leaves (at least two), grown by
/// attaching each new leaf to the midpoint of a uniformly chosen edge.
pub fn random_binary_tree<R: Rng>(leaves: usize, rng: &mut R) -> AlgebraicTree {
    let mut adj: Vec<Vec<usize>> = vec![vec![1], vec![0]];
    let mut edges: Vec<(usize, usize)> = vec![(0, 1)];
    for _ in 2..leaves.max(2) {
        let k = rng.random_range(0..edges.len());
        let (a, b) = edges[k];
        let (mid, leaf) = (adj.len(), adj.len() + 1);
        adj[a].retain(|&x| x != b);
        adj[b].retain(|&x| x != a);
        adj[a].push(mid);
        adj[b].push(mid);
        adj.push(vec![a, b, leaf]);
        adj.push(vec![mid]);
        edges[k] = (a, mid);
        edges.push((mid, b));
        edges.push((mid, leaf));
    }
    AlgebraicTree::from_adjacency(&adj).expect("grown graph is a tree")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_counts() {
        let counts: Vec<usize> = (1..=8).map(|n| free_trees(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 1, 2, 3, 6, 11, 23]);
        let bin: Vec<usize> = (1..=7).map(|k| binary_trees(k).len()).collect();
        assert_eq!(bin, vec![1, 1, 1, 1, 1, 2, 2]);
    }

    #[test]
    fn random_trees_cover_all_labelled_trees() {
        let mut rng = crate::rng::rng_from_seed(8);
        let mut seen = std::collections::BTreeSet::new();
        for _ in 0..2000 {
            seen.insert(random_tree(4, &mut rng).edges());
        }
        assert_eq!(seen.len(), 16);
    }

    #[test]
    fn random_binary_tree_is_binary() {
        let mut rng = crate::rng::rng_from_seed(4);
        for leaves in 2..30 {
            let t = random_binary_tree(leaves, &mut rng);
            assert!(t.is_binary());
            assert_eq!(t.leaves().len(), leaves);
            assert_eq!(t.len(), 2 * leaves - 2);
        }
    }
}
