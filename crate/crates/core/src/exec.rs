//! Execution strategy for the data-parallel kernels.
//!
//! Every kernel splits its work into independently indexed tasks and reduces
//! the per-task results in index order, so sequential and parallel runs give
//! bit-identical output. Without the `parallel` feature both variants run on
//! the calling thread.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// True when tasks will actually be distributed across worker threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }

    /// Evaluates `task(0..n)` and returns the results in index order.
    pub fn map_indexed<R, F>(self, n: usize, task: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Execution::Parallel {
            return (0..n).into_par_iter().map(task).collect();
        }
        (0..n).map(task).collect()
    }
}
