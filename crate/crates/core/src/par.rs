//! Sequential/parallel switch for per-strategy work.
//!
//! With the `parallel` feature disabled every call runs sequentially, and
//! results are identical in both modes.

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Smallest `i < n` for which `f` returns `Some`, together with its value.
/// The parallel path uses an order-stable search, so both modes agree.
pub fn find_first<T, F>(exec: Execution, n: u64, f: F) -> Option<(u64, T)>
where
    T: Send,
    F: Fn(u64) -> Option<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return (0..n).into_par_iter().find_map_first(|i| f(i).map(|t| (i, t)));
    }
    let _ = exec;
    (0..n).find_map(|i| f(i).map(|t| (i, t)))
}

/// `items.map(f)` preserving order.
pub fn map<I, T, F>(exec: Execution, items: &[I], f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_match_is_stable() {
        for exec in [Execution::Sequential, Execution::Parallel] {
            let hit = find_first(exec, 10_000, |i| (i % 997 == 3 && i > 5).then_some(i * 2));
            assert_eq!(hit, Some((1000, 2000)));
            assert_eq!(find_first(exec, 100, |_| None::<()>), None);
        }
    }

    #[test]
    fn map_keeps_order() {
        let xs: Vec<u32> = (0..500).collect();
        assert_eq!(
            map(Execution::Parallel, &xs, |x| x * 3),
            map(Execution::Sequential, &xs, |x| x * 3)
        );
    }
}
