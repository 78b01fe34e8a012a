//! Seeded instance generators.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::election::{candidates, BallotGroup, Election};
use crate::oracles::validate_restricted_hs;
use crate::problems::{HittingSetInstance, X3CInstance};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GenerateError {
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
}

fn infeasible(msg: impl Into<String>) -> GenerateError {
    GenerateError::Infeasible(msg.into())
}

/// `m` uniformly random nonempty subsets of `b1 .. bn` (repeats allowed).
/// With `restricted`, the parameters must satisfy `m(k+1) + 3 <= n - k`.
pub fn gen_random_hs(n: usize, m: usize, k: u64, seed: u64, restricted: bool) -> Result<HittingSetInstance, GenerateError> {
    if n == 0 || n > 63 {
        return Err(infeasible(format!("n = {n} must be in 1..=63")));
    }
    if m == 0 {
        return Err(infeasible("m must be positive"));
    }
    if k == 0 || k > n as u64 {
        return Err(infeasible(format!("k = {k} must be in 1..={n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sets = (0..m)
        .map(|_| {
            let mask: u64 = rng.random_range(1..1u64 << n);
            (0..n).filter(|i| mask >> i & 1 == 1).collect()
        })
        .collect();
    let hs = HittingSetInstance::numbered(n, sets, k).map_err(|e| infeasible(e.to_string()))?;
    if restricted && !validate_restricted_hs(&hs) {
        return Err(infeasible(format!("m(k+1)+3 <= n-k fails for n = {n}, m = {m}, k = {k}")));
    }
    Ok(hs)
}

/// A random X3C instance with `set_count` triples over `b1 .. b(3k)`.
///
/// A fair coin decides whether an exact cover is planted; the flag is
/// returned alongside the instance. Unplanted instances still cover every
/// element.
pub fn gen_random_x3c(k: usize, set_count: usize, seed: u64) -> Result<(X3CInstance, bool), GenerateError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let planted = rng.random_bool(0.5);
    x3c_with(&mut rng, k, set_count, planted).map(|x| (x, planted))
}

/// As [`gen_random_x3c`] with the planting decision fixed.
pub fn gen_random_x3c_planted(k: usize, set_count: usize, seed: u64, planted: bool) -> Result<X3CInstance, GenerateError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    x3c_with(&mut rng, k, set_count, planted)
}

fn random_triple(rng: &mut ChaCha8Rng, size: usize, containing: Option<usize>) -> Vec<usize> {
    loop {
        let mut t = rand::seq::index::sample(rng, size, 3).into_vec();
        if let Some(e) = containing {
            if !t.contains(&e) {
                t[0] = e;
                t.sort_unstable();
                t.dedup();
                if t.len() < 3 {
                    continue;
                }
            }
        }
        t.sort_unstable();
        return t;
    }
}

fn x3c_with(rng: &mut ChaCha8Rng, k: usize, set_count: usize, planted: bool) -> Result<X3CInstance, GenerateError> {
    if k == 0 || set_count < k {
        return Err(infeasible(format!("need 1 <= k <= set_count, got k = {k}, set_count = {set_count}")));
    }
    let size = 3 * k;
    let sets = if planted {
        let mut order: Vec<usize> = (0..size).collect();
        order.shuffle(rng);
        let mut sets: Vec<Vec<usize>> = order
            .chunks(3)
            .map(|c| {
                let mut t = c.to_vec();
                t.sort_unstable();
                t
            })
            .collect();
        while sets.len() < set_count {
            sets.push(random_triple(rng, size, None));
        }
        sets.shuffle(rng);
        sets
    } else {
        let mut found = None;
        for _ in 0..10_000 {
            let mut sets: Vec<Vec<usize>> = Vec::new();
            let mut covered = vec![false; size];
            while let Some(open) = covered.iter().position(|&c| !c) {
                let t = random_triple(rng, size, Some(open));
                t.iter().for_each(|&e| covered[e] = true);
                sets.push(t);
            }
            if sets.len() > set_count {
                continue;
            }
            while sets.len() < set_count {
                sets.push(random_triple(rng, size, None));
            }
            sets.shuffle(rng);
            found = Some(sets);
            break;
        }
        found.ok_or_else(|| infeasible(format!("no covering family of {set_count} triples found for k = {k}")))?
    };
    X3CInstance::numbered(k, sets).map_err(|e| infeasible(e.to_string()))
}

/// A random `range`-election over `x1 .. x<candidates>` with `groups` ballot
/// groups of multiplicity 1 to 3 (identical vectors merge).
pub fn gen_random_election(candidate_count: usize, groups: usize, range: u32, seed: u64) -> Result<Election, GenerateError> {
    if candidate_count == 0 || range == 0 {
        return Err(infeasible("need at least one candidate and a positive range"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names: Vec<String> = (1..=candidate_count).map(|i| format!("x{i}")).collect();
    let ballots = (0..groups)
        .map(|_| {
            let scores = (0..candidate_count).map(|_| rng.random_range(0..=range)).collect();
            BallotGroup::new(rng.random_range(1..=3), scores)
        })
        .collect();
    let ids = candidates(&names).expect("generated ids are valid");
    Election::new(range, ids, ballots).map_err(|e| infeasible(e.to_string()))
}
