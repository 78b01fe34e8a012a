//! Ordered action enumeration with deterministic first-success search.

use rayon::prelude::*;

/// Search limits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveOptions {
    /// Maximum number of actions to evaluate; `None` searches exhaustively.
    pub budget: Option<u64>,
    /// Evaluate chunks of the enumeration on the rayon pool. The outcome is
    /// identical either way.
    pub parallel: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            budget: None,
            parallel: true,
        }
    }
}

impl SolveOptions {
    pub fn sequential() -> Self {
        SolveOptions {
            parallel: false,
            ..Self::default()
        }
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = Some(budget);
        self
    }
}

const CHUNK: usize = 512;

#[derive(Debug, PartialEq, Eq)]
pub(crate) enum Search<A> {
    Found { action: A, explored: u64 },
    Exhausted { explored: u64 },
    OverBudget { explored: u64 },
}

/// Returns the first action (in iteration order) satisfying `accept`.
///
/// Actions are pulled in chunks; a chunk may be evaluated in parallel, but
/// only the earliest success within it counts, so the answer and the
/// explored count never depend on scheduling.
pub(crate) fn first_success<A, I, F>(actions: I, accept: F, options: &SolveOptions) -> Search<A>
where
    A: Send + Sync,
    I: Iterator<Item = A>,
    F: Fn(&A) -> bool + Sync,
{
    let mut actions = actions.peekable();
    let mut explored: u64 = 0;
    loop {
        let room = match options.budget {
            Some(b) => (b.saturating_sub(explored)).min(CHUNK as u64) as usize,
            None => CHUNK,
        };
        if room == 0 {
            return if actions.peek().is_some() {
                Search::OverBudget { explored }
            } else {
                Search::Exhausted { explored }
            };
        }
        let chunk: Vec<A> = actions.by_ref().take(room).collect();
        if chunk.is_empty() {
            return Search::Exhausted { explored };
        }
        let hit = if options.parallel && chunk.len() > 1 {
            chunk.par_iter().position_first(&accept)
        } else {
            chunk.iter().position(&accept)
        };
        if let Some(p) = hit {
            let action = chunk.into_iter().nth(p).expect("position is in range");
            return Search::Found {
                action,
                explored: explored + p as u64 + 1,
            };
        }
        explored += chunk.len() as u64;
    }
}

/// Vectors `v` with `0 <= v[i] <= caps[i]` in lexicographic order.
#[derive(Debug, Clone)]
pub(crate) struct MixedRadix {
    caps: Vec<u64>,
    next: Option<Vec<u64>>,
}

impl MixedRadix {
    pub fn new(caps: Vec<u64>) -> Self {
        let next = Some(vec![0; caps.len()]);
        MixedRadix { caps, next }
    }
}

impl Iterator for MixedRadix {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut i = succ.len();
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            if succ[i] < self.caps[i] {
                succ[i] += 1;
                self.next = Some(succ);
                break;
            }
            succ[i] = 0;
        }
        Some(current)
    }
}

/// Vectors with `0 <= v[i] <= caps[i]` and `sum(v) <= limit`, ordered by sum
/// and then lexicographically.
#[derive(Debug, Clone)]
pub(crate) struct BoundedCounts {
    caps: Vec<u64>,
    limit: u64,
    total: u64,
    next: Option<Vec<u64>>,
}

impl BoundedCounts {
    pub fn new(caps: Vec<u64>, limit: u64) -> Self {
        let limit = limit.min(caps.iter().sum());
        let next = smallest_with_sum(&caps, 0);
        BoundedCounts {
            caps,
            limit,
            total: 0,
            next,
        }
    }
}

/// Lexicographically smallest vector under `caps` summing to `sum`: fill from
/// the right.
fn smallest_with_sum(caps: &[u64], mut sum: u64) -> Option<Vec<u64>> {
    let mut v = vec![0; caps.len()];
    for i in (0..caps.len()).rev() {
        let take = sum.min(caps[i]);
        v[i] = take;
        sum -= take;
    }
    (sum == 0).then_some(v)
}

impl Iterator for BoundedCounts {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        let current = self.next.take()?;
        // Lexicographic successor with the same sum: bump the rightmost
        // position that has room and a nonzero suffix, then refill the suffix
        // as small as possible.
        let n = current.len();
        let mut suffix = 0;
        let mut succ = None;
        for i in (0..n).rev() {
            if suffix > 0 && current[i] < self.caps[i] {
                let mut v = current.clone();
                v[i] += 1;
                let tail = smallest_with_sum(&self.caps[i + 1..], suffix - 1)
                    .expect("the old suffix fit, so one less fits");
                v[i + 1..].copy_from_slice(&tail);
                succ = Some(v);
                break;
            }
            suffix += current[i];
        }
        self.next = match succ {
            Some(v) => Some(v),
            None if self.total < self.limit => {
                self.total += 1;
                smallest_with_sum(&self.caps, self.total)
            }
            None => None,
        };
        Some(current)
    }
}
