//! Checks draw from independent random streams, so a scenario run is an
//! order-preserving map over its check list. With the `parallel` feature
//! the map fans out through rayon; without it the same interface runs
//! sequentially. `jobs` picks the thread count: `Some(1)` forces the
//! sequential path, `None` or `Some(0)` uses the global pool.

#[cfg(feature = "parallel")]
pub fn maybe_par_map<T, U, F>(items: Vec<T>, jobs: Option<usize>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    match jobs {
        Some(1) => items.into_iter().map(f).collect(),
        Some(n) if n > 1 => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| items.into_par_iter().map(&f).collect()),
            Err(_) => items.into_par_iter().map(&f).collect(),
        },
        _ => items.into_par_iter().map(&f).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn maybe_par_map<T, U, F>(items: Vec<T>, jobs: Option<usize>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    let _ = jobs;
    items.into_iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preserves_input_order() {
        let squares = |jobs| maybe_par_map((0..64).collect(), jobs, |i: i64| i * i);
        let expect: Vec<i64> = (0..64).map(|i| i * i).collect();
        assert_eq!(squares(Some(1)), expect);
        assert_eq!(squares(Some(3)), expect);
        assert_eq!(squares(None), expect);
    }
}
