//! Order-preserving parallel map on scoped threads.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

/// Applies `f` to every item using up to `workers` threads. Output order
/// matches input order regardless of the worker count.
pub fn par_map<T, R, F>(items: &[T], workers: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    let workers = workers.max(1).min(items.len().max(1));
    if workers == 1 {
        return items.iter().map(&f).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<R>>> = items.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                let r = f(&items[i]);
                *slots[i].lock().expect("slot lock") = Some(r);
            });
        }
    });
    slots.into_iter().map(|m| m.into_inner().expect("slot lock").expect("every slot filled")).collect()
}

/// Default worker count: available parallelism.
pub fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_kept() {
        let xs: Vec<u64> = (0..1000).collect();
        for w in [1, 2, 4, 7] {
            let ys = par_map(&xs, w, |x| x * x);
            assert_eq!(ys, xs.iter().map(|x| x * x).collect::<Vec<_>>());
        }
        assert!(par_map(&Vec::<u8>::new(), 4, |x| *x).is_empty());
    }
}
