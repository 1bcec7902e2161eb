//! Execution policy for the data-parallel searches.
//!
//! Every helper returns results in candidate order, so output never depends
//! on scheduling. Without the `parallel` feature, [`Exec::Parallel`] runs
//! sequentially.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exec {
    Sequential,
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

/// First index in `0..n` (by index, not completion time) where `f` yields a value.
pub fn find_first_index<R, F>(n: u64, exec: Exec, f: F) -> Option<(u64, R)>
where
    R: Send,
    F: Fn(u64) -> Option<R> + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => (0..n).into_par_iter().find_map_first(|i| f(i).map(|r| (i, r))),
        _ => (0..n).find_map(|i| f(i).map(|r| (i, r))),
    }
}

/// First item (by position) where `f` yields a value.
pub fn find_first<T, R, F>(items: &[T], exec: Exec, f: F) -> Option<(usize, R)>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Option<R> + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => items
            .par_iter()
            .enumerate()
            .find_map_first(|(i, t)| f(t).map(|r| (i, r))),
        _ => items
            .iter()
            .enumerate()
            .find_map(|(i, t)| f(t).map(|r| (i, r))),
    }
}

/// Order-preserving map.
pub fn map<T, R, F>(items: &[T], exec: Exec, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => items.par_iter().map(f).collect(),
        _ => items.iter().map(f).collect(),
    }
}

/// Order-preserving map over `0..n`.
pub fn map_range<R, F>(n: usize, exec: Exec, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => (0..n).into_par_iter().map(f).collect(),
        _ => (0..n).map(f).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_hit_is_by_index() {
        for exec in [Exec::Sequential, Exec::Parallel] {
            let hit = find_first_index(10_000, exec, |i| (i % 997 == 3 && i > 1000).then_some(i * 2));
            assert_eq!(hit, Some((1997, 3994)));
            let items: Vec<u32> = (0..500).collect();
            assert_eq!(find_first(&items, exec, |&x| (x > 250).then_some(x)), Some((251, 251)));
            assert_eq!(map_range(5, exec, |i| i * i), vec![0, 1, 4, 9, 16]);
        }
    }
}
