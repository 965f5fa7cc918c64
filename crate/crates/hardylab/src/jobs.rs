//! Small fan-out helper: run independent jobs across threads and merge
//! results back in input order, so batch output is deterministic no matter
//! how the scheduler interleaves workers.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;

/// Worker cap: HARDYLAB_THREADS when set (≥ 1), else the machine's
/// available parallelism.
pub fn thread_cap() -> usize {
    if let Ok(v) = std::env::var("HARDYLAB_THREADS") {
        if let Ok(k) = v.trim().parse::<usize>() {
            return k.max(1);
        }
    }
    std::thread::available_parallelism().map(|v| v.get()).unwrap_or(1)
}

/// Evaluate `f(0..count)` on up to `thread_cap()` workers and return the
/// results indexed exactly like the serial loop would produce them.
pub fn run_indexed<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let threads = thread_cap().min(count.max(1));
    if threads <= 1 || count <= 1 {
        return (0..count).map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel::<(usize, T)>();
    std::thread::scope(|scope| {
        for _ in 0..threads {
            let tx = tx.clone();
            let next = &next;
            let f = &f;
            scope.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= count {
                    break;
                }
                if tx.send((i, f(i))).is_err() {
                    break;
                }
            });
        }
    });
    drop(tx);
    let mut slots: Vec<(usize, T)> = rx.into_iter().collect();
    debug_assert_eq!(slots.len(), count);
    slots.sort_by_key(|(i, _)| *i);
    slots.into_iter().map(|(_, t)| t).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_merge_matches_serial_order() {
        let serial: Vec<u64> = (0..97).map(|i| (i as u64).wrapping_mul(2654435761)).collect();
        let parallel = run_indexed(97, |i| (i as u64).wrapping_mul(2654435761));
        assert_eq!(serial, parallel);
    }

    #[test]
    fn handles_empty_and_single_inputs() {
        assert!(run_indexed(0, |i| i).is_empty());
        assert_eq!(run_indexed(1, |i| i + 10), vec![10]);
    }

    #[test]
    fn cap_is_at_least_one() {
        assert!(thread_cap() >= 1);
    }
}
