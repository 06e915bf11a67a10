//! Task execution: a parallel path on the rayon pool and a sequential path
//! on the calling thread.
//!
//! Every task-level computation in the crate goes through [`map_tasks`],
//! which always returns results in ascending task order so that the
//! subsequent reduction is deterministic regardless of scheduling.

/// How independent tasks are executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Runs on the current rayon pool. Falls back to sequential execution
    /// when the crate is built without the `parallel` feature.
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

/// Knobs shared by the enumeration experiments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub execution: Execution,
    /// Prefix length used to split word enumeration into tasks. `None`
    /// selects `min(n, 8)`.
    pub partition_depth: Option<usize>,
    /// Rotation angle at or below which a word counts as the identity.
    pub identity_tol: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            execution: Execution::default(),
            partition_depth: None,
            identity_tol: crate::rotor::DEFAULT_IDENTITY_TOL,
        }
    }
}

impl RunOptions {
    pub fn sequential() -> Self {
        RunOptions { execution: Execution::Sequential, ..Default::default() }
    }

    pub fn with_depth(mut self, depth: usize) -> Self {
        self.partition_depth = Some(depth);
        self
    }

    pub fn depth_for(&self, n: usize) -> usize {
        self.partition_depth.unwrap_or(DEFAULT_PARTITION_DEPTH).min(n)
    }
}

pub const DEFAULT_PARTITION_DEPTH: usize = 8;

/// Runs `f(0), …, f(tasks - 1)` and returns the results in task order.
pub fn map_tasks<T, F>(execution: Execution, tasks: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match execution {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..tasks).into_par_iter().map(f).collect()
        }
        _ => (0..tasks).map(f).collect(),
    }
}

/// Like [`map_tasks`] but stops at the first error (in task order).
pub fn try_map_tasks<T, E, F>(execution: Execution, tasks: usize, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(usize) -> Result<T, E> + Sync + Send,
{
    map_tasks(execution, tasks, f).into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn results_come_back_in_task_order() {
        for exec in [Execution::Sequential, Execution::Parallel] {
            let out = map_tasks(exec, 1000, |i| i * i);
            assert!(out.iter().enumerate().all(|(i, &v)| v == i * i));
        }
    }

    #[test]
    fn first_error_wins() {
        let r: Result<Vec<usize>, usize> =
            try_map_tasks(Execution::Parallel, 50, |i| if i % 7 == 6 { Err(i) } else { Ok(i) });
        assert_eq!(r, Err(6));
    }
}
