//! Exact solvers for the source problems, independent of any election code.

use crate::problems::{HittingSetInstance, X3CInstance};

struct HittingSearch<'a> {
    sets: &'a [Vec<usize>],
    n: usize,
    /// How many chosen elements hit each set.
    hits: Vec<u32>,
    chosen: Vec<usize>,
}

impl HittingSearch<'_> {
    /// Size of a greedy family of pairwise disjoint unhit sets: each needs
    /// its own element, so this bounds the picks still required.
    fn packing_bound(&self) -> usize {
        let mut used = vec![false; self.n];
        let mut count = 0;
        for (s, &h) in self.sets.iter().zip(&self.hits) {
            if h == 0 && s.iter().all(|&e| !used[e]) {
                s.iter().for_each(|&e| used[e] = true);
                count += 1;
            }
        }
        count
    }

    /// Extends `chosen` with exactly `left` more elements drawn from
    /// `next..n`, in lexicographic order.
    fn extend(&mut self, next: usize, left: usize) -> bool {
        let unhit = self.hits.contains(&0);
        if !unhit {
            return left == 0 || self.pad(next, left);
        }
        if left == 0 || self.packing_bound() > left {
            return false;
        }
        // An unhit set whose elements all precede `next` can never be hit.
        if self
            .sets
            .iter()
            .zip(&self.hits)
            .any(|(s, &h)| h == 0 && s.last().is_some_and(|&e| e < next))
        {
            return false;
        }
        for e in next..self.n {
            if self.n - e < left {
                break;
            }
            self.toggle(e, true);
            if self.extend(e + 1, left - 1) {
                return true;
            }
            self.toggle(e, false);
        }
        false
    }

    /// Everything is hit already; only reachable at sizes above the minimum,
    /// which the iterative deepening never asks for, but kept total.
    fn pad(&mut self, next: usize, left: usize) -> bool {
        if self.n - next < left {
            return false;
        }
        self.chosen.extend(next..next + left);
        true
    }

    fn toggle(&mut self, e: usize, on: bool) {
        for (s, h) in self.sets.iter().zip(self.hits.iter_mut()) {
            if s.binary_search(&e).is_ok() {
                if on {
                    *h += 1;
                } else {
                    *h -= 1;
                }
            }
        }
        if on {
            self.chosen.push(e);
        } else {
            self.chosen.pop();
        }
    }
}

/// The lexicographically first hitting set of minimum size, as sorted
/// element indices. Every instance has one since all sets are nonempty.
pub fn minimum_hitting_set(hs: &HittingSetInstance) -> Vec<usize> {
    let mut search = HittingSearch {
        sets: hs.sets(),
        n: hs.n(),
        hits: vec![0; hs.m()],
        chosen: Vec::new(),
    };
    for size in 0..=hs.n() {
        if search.extend(0, size) {
            return search.chosen;
        }
    }
    unreachable!("the whole universe hits every nonempty set")
}

/// `Some(witness)` iff a hitting set of size at most `k` exists; the witness
/// is the lexicographically first one of minimum size.
pub fn solve_hitting_set(hs: &HittingSetInstance) -> Option<Vec<usize>> {
    let min = minimum_hitting_set(hs);
    (min.len() as u64 <= hs.k()).then_some(min)
}

/// Whether the restricted variant's size condition `m(k+1) + 3 <= n - k` holds.
pub fn validate_restricted_hs(hs: &HittingSetInstance) -> bool {
    let (n, m, k) = (hs.n() as u64, hs.m() as u64, hs.k());
    m * (k + 1) + 3 <= n - k
}

struct CoverSearch<'a> {
    sets: &'a [Vec<usize>],
    covered: Vec<bool>,
    chosen: Vec<usize>,
    left: usize,
}

impl CoverSearch<'_> {
    fn extend(&mut self, next: usize) -> bool {
        let Some(first_open) = self.covered.iter().position(|&c| !c) else {
            return true;
        };
        if self.left == 0 {
            return false;
        }
        for i in next..self.sets.len() {
            let s = &self.sets[i];
            if s.iter().any(|&e| self.covered[e]) {
                continue;
            }
            // Skipping past every set that contains the lowest open element
            // strands it; sets are visited in index order, so stop early.
            if !s.contains(&first_open)
                && !self.sets[i + 1..].iter().any(|t| t.contains(&first_open))
            {
                return false;
            }
            s.iter().for_each(|&e| self.covered[e] = true);
            self.chosen.push(i);
            self.left -= 1;
            if self.extend(i + 1) {
                return true;
            }
            self.left += 1;
            self.chosen.pop();
            s.iter().for_each(|&e| self.covered[e] = false);
        }
        false
    }
}

/// `Some(set indices)` iff an exact cover exists; the witness is the
/// lexicographically first cover by set index.
pub fn solve_x3c(x3c: &X3CInstance) -> Option<Vec<usize>> {
    let mut search = CoverSearch {
        sets: x3c.sets(),
        covered: vec![false; x3c.elements().len()],
        chosen: Vec::new(),
        left: x3c.k(),
    };
    search.extend(0).then_some(search.chosen)
}
