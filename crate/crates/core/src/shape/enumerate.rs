use std::collections::BTreeMap;

use super::ShapeError;
use crate::measure::TwoLevelMeasure;
use crate::scalar::Scalar;
use crate::tree::VertexId;

/// Largest number of sample assignments exact enumeration will visit.
pub const EXACT_LIMIT: u128 = 10_000_000;

/// Number of (component, sample) assignments exact enumeration visits:
/// `Π_i Σ_c |supp μ_c|^{n_i}`.
pub fn enumeration_terms<S: Scalar>(nu: &TwoLevelMeasure<S>, n: &[u32]) -> u128 {
    n.iter().fold(1u128, |acc, &k| {
        let row = nu
            .components()
            .iter()
            .fold(0u128, |s, (_, mu)| s.saturating_add((mu.support().len() as u128).saturating_pow(k)));
        acc.saturating_mul(row)
    })
}

pub(crate) fn check_index_set(n: &[u32]) -> Result<(), ShapeError> {
    if n.is_empty() || n.contains(&0) {
        Err(ShapeError::EmptyIndexSet)
    } else {
        Ok(())
    }
}

/// Distribution of one host row of `k` points.
fn row_distribution<S: Scalar>(nu: &TwoLevelMeasure<S>, k: u32) -> BTreeMap<Vec<VertexId>, S> {
    let mut out: BTreeMap<Vec<VertexId>, S> = BTreeMap::new();
    for (w, mu) in nu.components() {
        if w.is_zero() {
            continue;
        }
        let atoms: Vec<(VertexId, S)> = mu.iter().map(|(v, m)| (v, m.clone())).collect();
        let mut partial: Vec<(Vec<VertexId>, S)> = vec![(Vec::new(), w.clone())];
        for _ in 0..k {
            let mut next = Vec::with_capacity(partial.len() * atoms.len());
            for (tuple, p) in &partial {
                for (v, m) in &atoms {
                    let mut t = tuple.clone();
                    t.push(*v);
                    next.push((t, p.clone() * m.clone()));
                }
            }
            partial = next;
        }
        for (t, p) in partial {
            let slot = out.entry(t).or_insert_with(S::zero);
            *slot = slot.clone() + p;
        }
    }
    out
}

/// Calls `f` on every distinct sample matrix with its probability.
pub(crate) fn for_each_sample<S: Scalar, E>(
    nu: &TwoLevelMeasure<S>,
    n: &[u32],
    mut f: impl FnMut(&[Vec<VertexId>], &S) -> Result<(), E>,
) -> Result<(), E>
where
    E: From<ShapeError>,
{
    check_index_set(n)?;
    let terms = enumeration_terms(nu, n);
    if terms > EXACT_LIMIT {
        return Err(ShapeError::EnumerationTooLarge { terms, limit: EXACT_LIMIT }.into());
    }
    let rows: Vec<Vec<(Vec<VertexId>, S)>> = n.iter().map(|&k| row_distribution(nu, k).into_iter().collect()).collect();
    let mut current: Vec<Vec<VertexId>> = Vec::with_capacity(rows.len());
    fn go<S: Scalar, E>(
        rows: &[Vec<(Vec<VertexId>, S)>],
        current: &mut Vec<Vec<VertexId>>,
        p: S,
        f: &mut impl FnMut(&[Vec<VertexId>], &S) -> Result<(), E>,
    ) -> Result<(), E> {
        let depth = current.len();
        if depth == rows.len() {
            return f(current, &p);
        }
        for (row, q) in &rows[depth] {
            current.push(row.clone());
            go(rows, current, p.clone() * q.clone(), f)?;
            current.pop();
        }
        Ok(())
    }
    go(&rows, &mut current, S::one(), &mut f)
}
