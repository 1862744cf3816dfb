use super::dist::draw_row;
use super::enumerate::{check_index_set, for_each_sample};
use super::ShapeError;
use crate::measure::{branch_point_distribution, r_xi_matrix, A2mTree, TwoLevelSampler};
use crate::rng::run_chunks;
use crate::scalar::Scalar;
use crate::tree::{DistanceMatrix, VertexId};

fn sample_matrix<S: Scalar>(r: &DistanceMatrix<S>, idx: &[usize]) -> DistanceMatrix<S> {
    DistanceMatrix::from_fn(idx.len(), |a, b| r.get(idx[a], idx[b]).clone())
}

fn indices<S: Scalar>(chi: &A2mTree<S>, rows: &[Vec<VertexId>]) -> Result<Vec<usize>, ShapeError> {
    rows.iter().flatten().map(|&v| chi.tree.index_of(v).map_err(ShapeError::from)).collect()
}

/// Exact value of `E[φ((r_ξ(u_a, u_b))_{a,b})]` for a two-level sample with
/// row sizes `n`, where `ξ` is the branch point distribution of the
/// intensity. Matrix rows follow the label order `1.1, 1.2, …, 2.1, …`.
pub fn distance_polynomial_exact<S: Scalar>(
    chi: &A2mTree<S>,
    n: &[u32],
    phi: impl Fn(&DistanceMatrix<S>) -> S,
) -> Result<S, ShapeError> {
    let xi = branch_point_distribution(&chi.tree, &chi.nu.intensity())?;
    let r = r_xi_matrix(&chi.tree, &xi)?;
    let mut acc = S::zero();
    for_each_sample(&chi.nu, n, |rows, p| -> Result<(), ShapeError> {
        let idx = indices(chi, rows)?;
        acc = acc.clone() + p.clone() * phi(&sample_matrix(&r, &idx));
        Ok(())
    })?;
    Ok(acc)
}

/// Monte Carlo estimate of the same expectation from `samples` draws.
pub fn distance_polynomial_mc<S: Scalar>(
    chi: &A2mTree<S>,
    n: &[u32],
    phi: impl Fn(&DistanceMatrix<f64>) -> f64 + Sync + Send,
    samples: u64,
    seed: u64,
    jobs: usize,
) -> Result<f64, ShapeError> {
    check_index_set(n)?;
    if samples == 0 {
        return Err(ShapeError::EmptySample);
    }
    let chi = chi.to_f64();
    let xi = branch_point_distribution(&chi.tree, &chi.nu.intensity())?;
    let r = r_xi_matrix(&chi.tree, &xi)?;
    let sampler = TwoLevelSampler::new(&chi.nu);
    let sums = run_chunks(samples, seed, jobs, |_, rng, draws| {
        let mut s = 0.0;
        for _ in 0..draws {
            let rows = n.iter().map(|&k| draw_row(&chi.tree, &sampler, k, rng)).collect::<Result<Vec<_>, _>>()?;
            s += phi(&sample_matrix(&r, &indices(&chi, &rows)?));
        }
        Ok::<_, ShapeError>(s)
    });
    let mut total = 0.0;
    for s in sums {
        total += s?;
    }
    Ok(total / samples as f64)
}
