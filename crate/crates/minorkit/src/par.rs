//! Branch fan-out for the backtracking searches.
//!
//! Every enumeration in this crate explores branches of the first decision
//! level either in parallel (rayon, behind the `parallel` feature) or
//! sequentially. Branch results are concatenated in branch order, so the
//! output is identical in both modes.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Execution strategy for the enumeration searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMode {
    /// Fan the top decision level out across threads. Falls back to
    /// sequential execution when the `parallel` feature is disabled.
    Parallel,
    /// Single-threaded depth-first search.
    Sequential,
}

impl Default for SearchMode {
    #[cfg(feature = "parallel")]
    fn default() -> Self {
        SearchMode::Parallel
    }
    #[cfg(not(feature = "parallel"))]
    fn default() -> Self {
        SearchMode::Sequential
    }
}

/// Maps `f` over `items`, preserving order of results.
pub(crate) fn map_branches<T, U, F>(mode: SearchMode, items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    match mode {
        #[cfg(feature = "parallel")]
        SearchMode::Parallel => items.into_par_iter().map(f).collect(),
        #[cfg(not(feature = "parallel"))]
        SearchMode::Parallel => items.into_iter().map(f).collect(),
        SearchMode::Sequential => items.into_iter().map(f).collect(),
    }
}
