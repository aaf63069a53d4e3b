pub mod front;
pub mod painleve;
pub mod pde;
pub mod sweep;

use crate::error::CliError;
use crate::settings::Settings;
use std::path::Path;

/// Config file first, then flags, over the defaults already in `s`.
pub fn load_config(s: &mut Settings, config: Option<&Path>) -> Result<(), CliError> {
    match config {
        Some(p) => s.apply_file(p),
        None => Ok(()),
    }
}

/// Map `f` over `items` on up to `jobs` threads. Results keep input order.
pub fn par_map<T: Sync, R: Send>(items: &[T], jobs: usize, f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let jobs = jobs.clamp(1, items.len().max(1));
    if jobs == 1 {
        return items.iter().map(f).collect();
    }
    let mut slots: Vec<Option<R>> = (0..items.len()).map(|_| None).collect();
    std::thread::scope(|scope| {
        let f = &f;
        let handles: Vec<_> = (0..jobs)
            .map(|j| {
                scope.spawn(move || {
                    (j..items.len())
                        .step_by(jobs)
                        .map(|i| (i, f(&items[i])))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (i, r) in h.join().expect("worker panicked") {
                slots[i] = Some(r);
            }
        }
    });
    slots.into_iter().map(|r| r.expect("every slot filled")).collect()
}

#[cfg(test)]
mod tests {
    use super::par_map;

    #[test]
    fn par_map_keeps_order() {
        let xs: Vec<u64> = (0..37).collect();
        let serial = par_map(&xs, 1, |x| x * x);
        assert_eq!(par_map(&xs, 4, |x| x * x), serial);
        assert_eq!(par_map(&xs, 100, |x| x * x), serial);
    }
}
