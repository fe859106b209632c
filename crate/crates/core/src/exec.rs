//! Sequential or rayon-backed evaluation.
//!
//! Results never depend on the policy: all reductions are exact and are
//! merged in index order.

use std::sync::atomic::{AtomicU8, Ordering};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecPolicy {
    Sequential,
    Parallel,
}

static POLICY: AtomicU8 = AtomicU8::new(1);

/// Sets the process-wide policy. `Parallel` degrades to sequential when the
/// `parallel` feature is off.
pub fn set_policy(p: ExecPolicy) {
    POLICY.store(matches!(p, ExecPolicy::Parallel) as u8, Ordering::Relaxed);
}

pub fn policy() -> ExecPolicy {
    if cfg!(feature = "parallel") && POLICY.load(Ordering::Relaxed) == 1 {
        ExecPolicy::Parallel
    } else {
        ExecPolicy::Sequential
    }
}

/// `(0..n).map(f).collect()`, possibly in parallel; output order is `0..n`.
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if policy() == ExecPolicy::Parallel && n > 1 {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    (0..n).map(f).collect()
}
