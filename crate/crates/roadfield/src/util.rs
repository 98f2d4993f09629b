//! Small shared helpers: float formatting and a scoped parallel map.

/// Formats a float with 17 significant digits (`{:.16e}`), enough to
/// round-trip any f64 exactly.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Number of worker threads: `ROADFIELD_THREADS` when set to a positive
/// integer, otherwise the machine's available parallelism.
pub fn thread_count() -> usize {
    if let Ok(s) = std::env::var("ROADFIELD_THREADS") {
        if let Ok(n) = s.trim().parse::<usize>() {
            if n >= 1 {
                return n;
            }
        }
    }
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

/// Applies `f` to every item, splitting the work across scoped threads in
/// contiguous chunks. Output order matches input order.
pub fn parallel_map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync,
{
    let workers = thread_count().min(items.len().max(1));
    if workers <= 1 || items.len() <= 1 {
        return items.into_iter().map(f).collect();
    }
    let n = items.len();
    let chunk = n.div_ceil(workers);
    let mut slots: Vec<Option<U>> = (0..n).map(|_| None).collect();
    std::thread::scope(|scope| {
        let f = &f;
        let mut item_chunks: Vec<Vec<T>> = Vec::new();
        {
            let mut items = items;
            while !items.is_empty() {
                let rest = items.split_off(chunk.min(items.len()));
                item_chunks.push(std::mem::replace(&mut items, rest));
            }
        }
        let mut slot_rest: &mut [Option<U>] = &mut slots;
        for chunk_items in item_chunks {
            let (head, tail) = slot_rest.split_at_mut(chunk_items.len());
            slot_rest = tail;
            scope.spawn(move || {
                for (slot, item) in head.iter_mut().zip(chunk_items) {
                    *slot = Some(f(item));
                }
            });
        }
    });
    slots.into_iter().map(|s| s.expect("worker filled every slot")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fmt17_round_trips() {
        for &v in &[0.1, -3.25e-17, 1.0 / 3.0, 6.02e23, f64::MIN_POSITIVE] {
            let s = fmt17(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
    }

    #[test]
    fn parallel_map_preserves_order() {
        let out = parallel_map((0..101).collect::<Vec<i64>>(), |x| x * x);
        let expect: Vec<i64> = (0..101).map(|x| x * x).collect();
        assert_eq!(out, expect);
    }

    #[test]
    fn parallel_map_handles_tiny_inputs() {
        assert_eq!(parallel_map(Vec::<i32>::new(), |x| x), Vec::<i32>::new());
        assert_eq!(parallel_map(vec![7], |x| x + 1), vec![8]);
    }
}
