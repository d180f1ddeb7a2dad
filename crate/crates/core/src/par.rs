use alloc::vec::Vec;

/// Maps `f` over `items`, in parallel when the `parallel` feature is on and
/// `parallel` is requested. Output order always matches input order.
pub(crate) fn map<T, U, F>(items: Vec<T>, parallel: bool, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if parallel {
            use rayon::prelude::*;
            return items.into_par_iter().map(f).collect();
        }
    }
    let _ = parallel;
    items.into_iter().map(f).collect()
}
