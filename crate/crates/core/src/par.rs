//! Data-parallel helpers. With the `parallel` feature off, or under
//! [`Exec::Sequential`], everything runs on the calling thread.
//! Results are always returned in index order.

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Exec {
    #[cfg_attr(feature = "parallel", default)]
    Parallel,
    #[cfg_attr(not(feature = "parallel"), default)]
    Sequential,
}

/// `(0..n).map(f)` collected in order.
pub fn map_range<R, F>(exec: Exec, n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
        _ => (0..n).map(f).collect(),
    }
}

/// Like [`map_range`]; the reported error is the one with the lowest index,
/// whatever the schedule.
pub fn try_map_range<R, E, F>(exec: Exec, n: usize, f: F) -> Result<Vec<R>, E>
where
    R: Send,
    E: Send,
    F: Fn(usize) -> Result<R, E> + Sync + Send,
{
    map_range(exec, n, f).into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_deterministic() {
        let a = map_range(Exec::Parallel, 1000, |i| i * i);
        let b = map_range(Exec::Sequential, 1000, |i| i * i);
        assert_eq!(a, b);
        let err: Result<Vec<usize>, usize> = try_map_range(Exec::Parallel, 100, |i| if i == 7 { Err(i) } else { Ok(i) });
        assert_eq!(err, Err(7));
    }
}
