// src/threads.rs
//
// Worker-count policy for nodewise-parallel loops. SMECTIC_THREADS caps the
// number of workers; results are deterministic regardless of the count
// because parallel work is always split into disjoint node chunks.

/// Number of workers to use for `n_items` independent items: available
/// parallelism, capped by the SMECTIC_THREADS environment variable when set,
/// and never more than `n_items` or fewer than 1.
pub fn worker_count(n_items: usize) -> usize {
    let available = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    let cap = std::env::var("SMECTIC_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or(available);
    available.min(cap).min(n_items.max(1)).max(1)
}
