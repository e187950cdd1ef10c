//! Deterministic work splitting.
//!
//! Heavy inner loops (node-operator application over many monomials) can be
//! chunked across threads. Chunk boundaries depend only on the input length
//! and results are merged in chunk order, so the output is bit-identical for
//! every thread count — parallelism is an accelerator, never a semantic knob.

use std::sync::atomic::{AtomicUsize, Ordering};

static THREADS: AtomicUsize = AtomicUsize::new(1);

/// Sets the process-wide worker count (clamped to at least 1).
pub fn set_threads(n: usize) {
    THREADS.store(n.max(1), Ordering::Relaxed);
}

/// Current worker count.
pub fn threads() -> usize {
    THREADS.load(Ordering::Relaxed).max(1)
}

/// Applies `map` to fixed-size chunks of `items` (possibly in parallel) and
/// folds the per-chunk results into `init` strictly in chunk order.
pub fn chunked_fold<T, R, A>(
    items: &[T],
    init: A,
    map: impl Fn(&[T]) -> R + Sync,
    mut fold: impl FnMut(A, R) -> A,
) -> A
where
    T: Sync,
    R: Send,
{
    if items.is_empty() {
        return init;
    }
    let workers = threads().min(items.len());
    if workers == 1 {
        return fold(init, map(items));
    }
    let chunk = items.len().div_ceil(workers);
    let results: Vec<R> = std::thread::scope(|scope| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|c| scope.spawn(|| map(c)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    let mut acc = init;
    for r in results {
        acc = fold(acc, r);
    }
    acc
}
