use std::ops::Range;

use crate::error::Result;

/// Resolves a requested worker count, 0 meaning "all available cores".
pub fn worker_count(requested: usize) -> usize {
    if requested > 0 {
        return requested;
    }
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Splits `0..total` into contiguous chunks, runs `work` on each on its own
/// thread and returns the results in chunk order.
pub(crate) fn map_chunks<T, F>(total: u64, threads: usize, work: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(Range<u64>) -> Result<T> + Sync,
{
    let workers = (worker_count(threads) as u64).clamp(1, total.max(1));
    if workers == 1 {
        return Ok(vec![work(0..total)?]);
    }
    let chunk = total.div_ceil(workers);
    let ranges: Vec<Range<u64>> = (0..workers)
        .map(|w| (w * chunk).min(total)..((w + 1) * chunk).min(total))
        .collect();
    std::thread::scope(|scope| {
        let handles: Vec<_> = ranges
            .into_iter()
            .map(|range| {
                let work = &work;
                scope.spawn(move || work(range))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker thread panicked"))
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunks_cover_range_in_order() {
        for threads in [1, 2, 3, 8, 20] {
            let parts = map_chunks(17, threads, |r| Ok(r.collect::<Vec<u64>>())).unwrap();
            let flat: Vec<u64> = parts.into_iter().flatten().collect();
            assert_eq!(flat, (0..17).collect::<Vec<_>>());
        }
        let parts = map_chunks(0, 4, |r| Ok(r.count())).unwrap();
        assert_eq!(parts.iter().sum::<usize>(), 0);
    }
}
