//! Seeded randomness and deterministic parallel chunking.
//!
//! Monte Carlo work is split into fixed-size chunks. Chunk `k` draws from
//! ChaCha stream `k` of the run seed, and results are merged in chunk order,
//! so output does not depend on the number of worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub type SimRng = ChaCha8Rng;

/// Number of Monte Carlo draws handled by one chunk.
pub const CHUNK: u64 = 4096;

pub fn rng_from_seed(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn stream_rng(seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed from a parent seed and a list of integers.
pub fn mix_seed(seed: u64, salt: &[u64]) -> u64 {
    let mut h = splitmix64(seed);
    h = splitmix64(h ^ salt.len() as u64);
    for &s in salt {
        h = splitmix64(h ^ splitmix64(s));
    }
    h
}

/// Runs `f(chunk_index, rng, draws)` over `total` draws split into chunks and
/// returns per-chunk results in chunk order.
pub fn run_chunks<T, F>(total: u64, seed: u64, jobs: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, &mut SimRng, u64) -> T + Sync + Send,
{
    let chunks = total.div_ceil(CHUNK);
    let work = |k: u64| {
        let draws = CHUNK.min(total - k * CHUNK);
        let mut rng = stream_rng(seed, k);
        f(k, &mut rng, draws)
    };
    if jobs <= 1 || chunks <= 1 {
        return (0..chunks).map(work).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(|| (0..chunks).into_par_iter().map(work).collect()),
        Err(_) => (0..chunks).map(work).collect(),
    }
}

/// Maps `f` over `items` on `jobs` threads, keeping input order.
pub fn par_map<I, T, F>(items: Vec<I>, jobs: usize, f: F) -> Vec<T>
where
    I: Send,
    T: Send,
    F: Fn(I) -> T + Sync + Send,
{
    if jobs <= 1 || items.len() <= 1 {
        return items.into_iter().map(f).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(|| items.into_par_iter().map(f).collect()),
        Err(_) => items.into_iter().map(f).collect(),
    }
}
