// src/sum.rs
//
// Deterministic reductions. Every integral and norm in the crate funnels
// through pairwise summation so that results are bit-reproducible from run
// to run regardless of how the surrounding loops are organized, and carry
// O(log n) rounding growth instead of O(n).

const PAIRWISE_BLOCK: usize = 64;

/// Pairwise sum of `f(i)` for `i` in `0..n`, splitting recursively and
/// summing blocks of at most 64 terms sequentially at the leaves.
pub fn pairwise_map_sum<F: Fn(usize) -> f64>(n: usize, f: &F) -> f64 {
    fn go<F: Fn(usize) -> f64>(lo: usize, hi: usize, f: &F) -> f64 {
        if hi - lo <= PAIRWISE_BLOCK {
            let mut acc = 0.0;
            for i in lo..hi {
                acc += f(i);
            }
            acc
        } else {
            let mid = lo + (hi - lo) / 2;
            go(lo, mid, f) + go(mid, hi, f)
        }
    }
    if n == 0 {
        0.0
    } else {
        go(0, n, f)
    }
}

/// Pairwise sum of a slice.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    pairwise_map_sum(xs.len(), &|i| xs[i])
}
