//! Execution policy: rayon data parallelism with a sequential fallback.
//!
//! Results are always gathered in index order, so both policies produce identical output.

use std::ops::Range;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Exec {
    Sequential,
    /// Uses rayon when the `parallel` feature is enabled, otherwise runs sequentially.
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

impl Exec {
    /// True when work will actually be spread across threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }

    /// Applies `f` to consecutive chunks of `0..total`, returning results in chunk order.
    pub fn map_chunks<T, F>(self, total: usize, chunk: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(Range<usize>) -> T + Sync + Send,
    {
        let chunk = chunk.max(1);
        let count = total.div_ceil(chunk);
        let range = move |c: usize| c * chunk..((c + 1) * chunk).min(total);
        if self.is_parallel() && count > 1 {
            #[cfg(feature = "parallel")]
            {
                use rayon::prelude::*;
                return (0..count).into_par_iter().map(|c| f(range(c))).collect();
            }
        }
        (0..count).map(|c| f(range(c))).collect()
    }

    /// Applies `f` to every index of `0..n`, returning results in index order.
    pub fn map_indices<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        if self.is_parallel() && n > 1 {
            #[cfg(feature = "parallel")]
            {
                use rayon::prelude::*;
                return (0..n).into_par_iter().map(f).collect();
            }
        }
        (0..n).map(f).collect()
    }
}
