//! Canonical strings for unrooted vertex-labelled trees.
//!
//! Two labelled trees receive the same code iff they are isomorphic through a
//! label-preserving map. The code is the lexicographically smallest rooted
//! AHU encoding over all vertex roots. Rooting at every vertex already makes
//! the code an isomorphism invariant, so edge-midpoint roots are not needed.

/// `adj` is an adjacency list of a tree on `0..adj.len()`. Labels must not
/// contain the characters `(`, `)` or `;`.
pub fn canonical_form(adj: &[Vec<usize>], labels: &[String]) -> String {
    let n = adj.len();
    assert_eq!(labels.len(), n, "one label per vertex");
    if n == 0 {
        return String::new();
    }
    let mut best: Option<String> = None;
    let mut consider = |code: String| {
        if best.as_ref().is_none_or(|b| code < *b) {
            best = Some(code);
        }
    };
    for r in 0..n {
        consider(encode(adj, labels, r, usize::MAX));
    }
    best.unwrap_or_default()
}

fn encode(adj: &[Vec<usize>], labels: &[String], v: usize, parent: usize) -> String {
    let mut children: Vec<String> = adj[v]
        .iter()
        .filter(|&&w| w != parent)
        .map(|&w| encode(adj, labels, w, v))
        .collect();
    children.sort();
    let mut out = String::with_capacity(labels[v].len() + 3);
    out.push('(');
    out.push_str(&labels[v]);
    out.push(';');
    for c in children {
        out.push_str(&c);
    }
    out.push(')');
    out
}
