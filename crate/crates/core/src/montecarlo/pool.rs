//! Generation-pool sampler for depths where single trees are too large.
//!
//! The subtrees hanging off distinct vertices at the same height are i.i.d.,
//! so the law of `(B, Z)` at height `h` is obtained from the law at height
//! `h - 1` by drawing `d ~ μ` and `d` independent copies. The sampler keeps a
//! population of `M` pairs per height, resampling children uniformly from the
//! previous population. Cost is `O(M m n)` instead of `O(N m^n)`; the price is
//! an `O(M^(-1/2))` error in the law and weak dependence between reported
//! samples through shared descendants.

use rayon::prelude::*;

use crate::concave::RecursionFunction;
use crate::error::{Error, Result};
use crate::offspring::OffspringDistribution;
use crate::rng::{Domain, Stream};

/// Elements per random stream.
const CHUNK: usize = 1024;

/// Final population of one pooled run.
#[derive(Debug, Clone)]
pub struct PoolOutput {
    /// `B_n(ρ)` for each population member.
    pub b: Vec<f64>,
    /// `Z_n` for each population member.
    pub z: Vec<f64>,
}

/// Propagate a population of size `pool_size` up `depth` generations with
/// kernel `g` and resistance parameter `r`; leaves carry `boundary`.
pub fn run_pool(
    dist: &OffspringDistribution,
    g: &RecursionFunction,
    r: f64,
    depth: usize,
    pool_size: usize,
    seed: u64,
    boundary: f64,
) -> Result<PoolOutput> {
    if pool_size < 2 {
        return Err(Error::Config("pool size must be at least 2".into()));
    }
    let leaf = g.eval(boundary);
    // Level 0: every member is a leaf.
    let mut g_prev = vec![leaf; pool_size];
    let mut z_prev = vec![1.0f64; pool_size];
    let mut g_next = vec![0.0; pool_size];
    let mut z_next = vec![0.0; pool_size];
    let mut b_last = vec![0.0; pool_size];
    for h in 1..=depth {
        let last = h == depth;
        let target: &mut [f64] = if last { &mut b_last } else { &mut g_next };
        target
            .par_chunks_mut(CHUNK)
            .zip(z_next.par_chunks_mut(CHUNK))
            .enumerate()
            .for_each(|(chunk, (out, zs))| {
                let mut stream = Stream::new(seed, Domain::Pool, h as u64, chunk as u64);
                for (slot, z_slot) in out.iter_mut().zip(zs.iter_mut()) {
                    let d = dist.sample(&mut stream);
                    let (mut sum_g, mut sum_z) = (0.0, 0.0);
                    for _ in 0..d {
                        let k = stream.index(pool_size);
                        sum_g += g_prev[k];
                        sum_z += z_prev[k];
                    }
                    let b = r * sum_g;
                    *slot = if last { b } else { g.eval(b) };
                    *z_slot = sum_z;
                }
            });
        if !last {
            std::mem::swap(&mut g_prev, &mut g_next);
        }
        std::mem::swap(&mut z_prev, &mut z_next);
    }
    Ok(PoolOutput { b: b_last, z: z_prev })
}
