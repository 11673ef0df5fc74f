//! Fixed-order reductions, so results do not depend on thread count or chunking.

const LEAF: usize = 32;

/// Pairwise (cascade) summation with a fixed split order.
pub(crate) fn pairwise(xs: &[f64]) -> f64 {
    if xs.len() <= LEAF {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise(&xs[..mid]) + pairwise(&xs[mid..])
}

pub(crate) fn pairwise_by<T, F: Fn(&T) -> f64>(xs: &[T], f: F) -> f64 {
    let terms: Vec<f64> = xs.iter().map(f).collect();
    pairwise(&terms)
}
