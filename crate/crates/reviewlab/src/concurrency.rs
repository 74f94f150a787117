//! Global worker-count cap.
//!
//! Parallel sections (bootstrap resampling, concurrent citation fetches) size
//! their worker pools from the machine's parallelism, each with its own upper
//! bound. The command-line `--threads` flag lowers all of them at once
//! through [`set_cap`]. Worker counts never affect results — all parallel
//! code writes to pre-assigned positions — only wall-clock time.

use std::sync::atomic::{AtomicUsize, Ordering};

/// 0 means "no global cap".
static CAP: AtomicUsize = AtomicUsize::new(0);

/// Caps every worker pool at `n` workers (`0` removes the cap).
pub fn set_cap(n: usize) {
    CAP.store(n, Ordering::Relaxed);
}

/// Worker count for a CPU-bound section with local upper bound `local_cap`:
/// machine parallelism, bounded by `local_cap` and the global cap, at least 1.
pub fn worker_count(local_cap: usize) -> usize {
    let machine = std::thread::available_parallelism().map_or(1, |n| n.get());
    machine.min(io_worker_count(local_cap))
}

/// Worker count for an I/O-bound section (not limited by core count):
/// `local_cap` bounded by the global cap, at least 1.
pub fn io_worker_count(local_cap: usize) -> usize {
    let global = CAP.load(Ordering::Relaxed);
    let cap = if global == 0 { local_cap } else { local_cap.min(global) };
    cap.max(1)
}
