//! Data-parallel helpers with a sequential fallback.
//!
//! Results never depend on the strategy: maps keep input order and searches
//! return the match with the lowest index.

use std::sync::atomic::{AtomicU8, Ordering};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Sequential,
    Parallel,
}

const UNSET: u8 = 0;
const SEQ: u8 = 1;
const PAR: u8 = 2;

static STRATEGY: AtomicU8 = AtomicU8::new(UNSET);

/// Selects the strategy for the whole process. `Parallel` degrades to
/// `Sequential` when the crate is built without the `parallel` feature.
pub fn set_strategy(s: Strategy) {
    STRATEGY.store(if s == Strategy::Parallel { PAR } else { SEQ }, Ordering::Relaxed);
}

pub fn strategy() -> Strategy {
    match STRATEGY.load(Ordering::Relaxed) {
        SEQ => Strategy::Sequential,
        _ if cfg!(feature = "parallel") => Strategy::Parallel,
        _ => Strategy::Sequential,
    }
}

pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if strategy() == Strategy::Parallel && items.len() > 1 {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    items.iter().map(f).collect()
}

pub fn map_range<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if strategy() == Strategy::Parallel && n > 1 {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    (0..n).map(f).collect()
}

/// The first `Some` in index order.
pub fn find_first<T, R, F>(items: &[T], f: F) -> Option<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Option<R> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if strategy() == Strategy::Parallel && items.len() > 1 {
        use rayon::prelude::*;
        return items.par_iter().find_map_first(f);
    }
    items.iter().find_map(f)
}

pub fn find_first_range<R, F>(n: usize, f: F) -> Option<R>
where
    R: Send,
    F: Fn(usize) -> Option<R> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if strategy() == Strategy::Parallel && n > 1 {
        use rayon::prelude::*;
        return (0..n).into_par_iter().find_map_first(f);
    }
    (0..n).find_map(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let xs: Vec<u32> = (0..1000).collect();
        let ys = map(&xs, |x| x * 2);
        assert_eq!(ys, xs.iter().map(|x| x * 2).collect::<Vec<_>>());
        assert_eq!(find_first(&xs, |&x| (x % 7 == 3 && x > 100).then_some(x)), Some(101));
        assert_eq!(find_first_range(50, |i| (i > 10).then_some(i)), Some(11));
    }
}
