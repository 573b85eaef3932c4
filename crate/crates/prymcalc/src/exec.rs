//! Execution-strategy switch for the embarrassingly parallel sweeps.
//!
//! Everything in this crate is deterministic, so parallel and sequential
//! runs must produce identical output; the suites and benches rely on that.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExecMode {
    /// Fan out across threads when the crate is built with the `parallel`
    /// feature; otherwise identical to `Sequential`.
    #[default]
    Auto,
    Sequential,
}

/// Order-preserving map over owned items under the chosen mode.
pub fn map_collect<T, U, F>(mode: ExecMode, items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if mode == ExecMode::Auto {
            use rayon::prelude::*;
            return items.into_par_iter().map(f).collect();
        }
    }
    let _ = mode;
    items.into_iter().map(f).collect()
}
