//! Deterministic parallel map: a fixed task list, stateless workers pulling
//! from a shared counter, and strictly index-ordered reduction so results
//! (and the first error reported) never depend on worker count or timing.

use crate::{ensure, Result};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;

/// Applies `f` to every task and returns results in task order. The task
/// decomposition is fixed by the caller, so values are identical for every
/// `workers` count; on failure the error of the lowest-indexed failing task
/// is returned and all other results are discarded.
pub fn parallel_map<T, R, F>(tasks: &[T], workers: usize, f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Result<R> + Sync,
{
    ensure!(workers >= 1, "parallel_map: worker count must be >= 1");
    if tasks.is_empty() {
        return Ok(Vec::new());
    }
    let n = tasks.len();
    if workers == 1 || n == 1 {
        return tasks.iter().map(&f).collect();
    }
    let next = AtomicUsize::new(0);
    let failed = AtomicBool::new(false);
    let slots: Vec<Mutex<Option<Result<R>>>> = (0..n).map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..workers.min(n) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n || failed.load(Ordering::Relaxed) {
                    break;
                }
                let r = f(&tasks[i]);
                if r.is_err() {
                    failed.store(true, Ordering::Relaxed);
                }
                *slots[i].lock().unwrap() = Some(r);
            });
        }
    });
    let mut out = Vec::with_capacity(n);
    for slot in slots {
        match slot.into_inner().unwrap() {
            Some(Ok(r)) => out.push(r),
            Some(Err(e)) => return Err(e),
            // a later worker aborted early after some task failed; that
            // failure is found at its own (lower or higher) index — if we
            // reached an empty slot, some earlier slot must hold the error
            None => unreachable!("task skipped without a recorded failure"),
        }
    }
    Ok(out)
}
