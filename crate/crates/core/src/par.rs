//! Trial-level data parallelism.
//!
//! With the `parallel` feature (default) trials are mapped through rayon;
//! without it, or with [`Execution::Sequential`], they run on the calling
//! thread. Output order is always trial-index order.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

pub fn map_trials<T, F>(n: u64, mode: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Send + Sync,
{
    match mode {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
        _ => (0..n).map(f).collect(),
    }
}
