use itertools::Itertools;

use super::search::{first_success, BoundedCounts, MixedRadix, Search, SolveOptions};
use super::{ControlError, ControlInstance, ControlOutcome, Decision, Family, TieModel, Witness};
use crate::election::{column_tally, BallotGroup, System};

/// Partition search enumerates `2^|C|` masks.
const MAX_PARTITION_CANDIDATES: usize = 40;

/// Column-level view of an instance used in the hot loops.
struct Evaluator<'a> {
    system: System,
    range: u32,
    ballots: &'a [BallotGroup],
    ties: Option<TieModel>,
    target: usize,
}

impl Evaluator<'_> {
    fn unique_winner(&self, cols: &[usize], weights: Option<&[u64]>) -> Option<usize> {
        column_tally(self.range, self.system, self.ballots, weights, cols)
            .unique_winner_position()
            .map(|p| cols[p])
    }

    /// Survivors as a candidate bitmask.
    fn survivors(&self, cols: &[usize], weights: Option<&[u64]>) -> u64 {
        if cols.is_empty() {
            return 0;
        }
        let tally = column_tally(self.range, self.system, self.ballots, weights, cols);
        match self.ties.expect("partition instances carry a tie model") {
            TieModel::Promote => tally
                .winner_positions()
                .into_iter()
                .fold(0, |m, p| m | 1 << cols[p]),
            TieModel::Eliminate => tally
                .unique_winner_position()
                .map_or(0, |p| 1 << cols[p]),
        }
    }

    fn achieved(&self, goal: super::Goal, winner: Option<usize>) -> bool {
        let wins = winner == Some(self.target);
        match goal {
            super::Goal::Constructive => wins,
            super::Goal::Destructive => !wins,
        }
    }
}

fn evaluator(instance: &ControlInstance) -> Evaluator<'_> {
    Evaluator {
        system: instance.system,
        range: instance.base.range(),
        ballots: instance.base.ballots(),
        ties: instance.tie_model,
        target: instance
            .base
            .index_of(&instance.distinguished)
            .expect("validated at construction"),
    }
}

fn expect_family(instance: &ControlInstance, expected: Family) -> Result<(), ControlError> {
    if instance.family != expected {
        return Err(ControlError::WrongFamily {
            expected,
            found: instance.family,
        });
    }
    Ok(())
}

fn finish<A>(search: Search<A>, witness: impl FnOnce(A) -> Witness) -> Result<ControlOutcome, ControlError> {
    match search {
        Search::Found { action, explored } => Ok(ControlOutcome {
            decision: Decision::Yes,
            witness: Some(witness(action)),
            explored,
        }),
        Search::Exhausted { explored } => Ok(ControlOutcome {
            decision: Decision::No,
            witness: None,
            explored,
        }),
        Search::OverBudget { explored } => Err(ControlError::BudgetExceeded { explored }),
    }
}

fn mask_columns(mask: u64, n: usize) -> Vec<usize> {
    (0..n).filter(|&i| mask >> i & 1 == 1).collect()
}

fn subsets_up_to(items: usize, max_size: u64) -> impl Iterator<Item = Vec<usize>> {
    let max = usize::try_from(max_size).unwrap_or(usize::MAX).min(items);
    (0..=max).flat_map(move |size| (0..items).combinations(size))
}

/// Adds at most `limit` spoilers, smallest additions first.
pub fn solve_add_candidates(
    instance: &ControlInstance,
    options: &SolveOptions,
) -> Result<ControlOutcome, ControlError> {
    expect_family(instance, Family::AddCandidates)?;
    let eval = evaluator(instance);
    let all = instance.base.candidates();
    let (spoilers, registered): (Vec<usize>, Vec<usize>) =
        (0..all.len()).partition(|&i| instance.spoilers.contains(&all[i]));
    let limit = instance.limit.unwrap_or(0);
    let search = first_success(
        subsets_up_to(spoilers.len(), limit),
        |pick| {
            let mut cols = registered.clone();
            cols.extend(pick.iter().map(|&p| spoilers[p]));
            cols.sort_unstable();
            eval.achieved(instance.goal, eval.unique_winner(&cols, None))
        },
        options,
    );
    finish(search, |pick| {
        Witness::Candidates(pick.iter().map(|&p| all[spoilers[p]].clone()).collect())
    })
}

/// Deletes at most `limit` candidates other than the distinguished one.
pub fn solve_delete_candidates(
    instance: &ControlInstance,
    options: &SolveOptions,
) -> Result<ControlOutcome, ControlError> {
    expect_family(instance, Family::DeleteCandidates)?;
    let eval = evaluator(instance);
    let all = instance.base.candidates();
    let deletable: Vec<usize> = (0..all.len()).filter(|&i| i != eval.target).collect();
    let limit = instance.limit.unwrap_or(0);
    let search = first_success(
        subsets_up_to(deletable.len(), limit),
        |pick| {
            let cols: Vec<usize> = (0..all.len())
                .filter(|i| !pick.iter().any(|&p| deletable[p] == *i))
                .collect();
            eval.achieved(instance.goal, eval.unique_winner(&cols, None))
        },
        options,
    );
    finish(search, |pick| {
        Witness::Candidates(pick.iter().map(|&p| all[deletable[p]].clone()).collect())
    })
}

/// Adds at most `limit` voters drawn from the pool groups.
pub fn solve_add_voters(
    instance: &ControlInstance,
    options: &SolveOptions,
) -> Result<ControlOutcome, ControlError> {
    expect_family(instance, Family::AddVoters)?;
    let base = instance.base.ballots();
    let mut ballots = base.to_vec();
    ballots.extend(instance.pool.iter().cloned());
    let eval = Evaluator {
        ballots: &ballots,
        ..evaluator(instance)
    };
    let cols: Vec<usize> = (0..instance.base.candidates().len()).collect();
    let caps: Vec<u64> = instance.pool.iter().map(BallotGroup::multiplicity).collect();
    let search = first_success(
        BoundedCounts::new(caps, instance.limit.unwrap_or(0)),
        |taken| {
            let weights: Vec<u64> = base
                .iter()
                .map(BallotGroup::multiplicity)
                .chain(taken.iter().copied())
                .collect();
            eval.achieved(instance.goal, eval.unique_winner(&cols, Some(&weights)))
        },
        options,
    );
    finish(search, Witness::VoterCounts)
}

/// Removes at most `limit` voters.
pub fn solve_delete_voters(
    instance: &ControlInstance,
    options: &SolveOptions,
) -> Result<ControlOutcome, ControlError> {
    expect_family(instance, Family::DeleteVoters)?;
    let eval = evaluator(instance);
    let cols: Vec<usize> = (0..instance.base.candidates().len()).collect();
    let caps: Vec<u64> = instance.base.ballots().iter().map(BallotGroup::multiplicity).collect();
    let search = first_success(
        BoundedCounts::new(caps.clone(), instance.limit.unwrap_or(0)),
        |removed| {
            let weights: Vec<u64> = caps.iter().zip(removed).map(|(c, r)| c - r).collect();
            eval.achieved(instance.goal, eval.unique_winner(&cols, Some(&weights)))
        },
        options,
    );
    finish(search, Witness::VoterCounts)
}

fn partition_masks(instance: &ControlInstance) -> Result<(usize, u64), ControlError> {
    let n = instance.base.candidates().len();
    if n > MAX_PARTITION_CANDIDATES {
        return Err(ControlError::TooManyCandidates(n));
    }
    Ok((n, 1u64 << n))
}

fn partition_witness(instance: &ControlInstance, mask: u64) -> Witness {
    let (first, second) = instance
        .base
        .candidates()
        .iter()
        .enumerate()
        .partition::<Vec<_>, _>(|(i, _)| mask >> i & 1 == 1);
    Witness::CandidatePartition {
        first: first.into_iter().map(|(_, c)| c.clone()).collect(),
        second: second.into_iter().map(|(_, c)| c.clone()).collect(),
    }
}

/// Runs a subelection on the first part; its survivors join the second part
/// in the final round.
pub fn solve_partition_candidates(
    instance: &ControlInstance,
    options: &SolveOptions,
) -> Result<ControlOutcome, ControlError> {
    expect_family(instance, Family::PartitionCandidates)?;
    let (n, masks) = partition_masks(instance)?;
    let full = masks - 1;
    let eval = evaluator(instance);
    let search = first_success(
        0..masks,
        |&first| {
            let survivors = eval.survivors(&mask_columns(first, n), None);
            let finalists = mask_columns(survivors | (full & !first), n);
            eval.achieved(instance.goal, eval.unique_winner(&finalists, None))
        },
        options,
    );
    finish(search, |mask| partition_witness(instance, mask))
}

/// Both parts run subelections; the survivors meet in the final round.
pub fn solve_runoff_partition_candidates(
    instance: &ControlInstance,
    options: &SolveOptions,
) -> Result<ControlOutcome, ControlError> {
    expect_family(instance, Family::RunoffPartitionCandidates)?;
    let (n, masks) = partition_masks(instance)?;
    let full = masks - 1;
    let eval = evaluator(instance);
    let search = first_success(
        0..masks,
        |&first| {
            let survivors = eval.survivors(&mask_columns(first, n), None)
                | eval.survivors(&mask_columns(full & !first, n), None);
            let finalists = mask_columns(survivors, n);
            eval.achieved(instance.goal, eval.unique_winner(&finalists, None))
        },
        options,
    );
    finish(search, |mask| partition_witness(instance, mask))
}

/// Splits the voters into two subelections over all candidates; survivors of
/// both meet in a final round judged by the full electorate.
pub fn solve_partition_voters(
    instance: &ControlInstance,
    options: &SolveOptions,
) -> Result<ControlOutcome, ControlError> {
    expect_family(instance, Family::PartitionVoters)?;
    let (n, _) = partition_masks(instance)?;
    let eval = evaluator(instance);
    let cols: Vec<usize> = (0..n).collect();
    let caps: Vec<u64> = instance.base.ballots().iter().map(BallotGroup::multiplicity).collect();
    let search = first_success(
        MixedRadix::new(caps.clone()),
        |split| {
            let rest: Vec<u64> = caps.iter().zip(split).map(|(c, j)| c - j).collect();
            let survivors = eval.survivors(&cols, Some(split)) | eval.survivors(&cols, Some(&rest));
            let finalists = mask_columns(survivors, n);
            eval.achieved(instance.goal, eval.unique_winner(&finalists, None))
        },
        options,
    );
    finish(search, Witness::VoterSplit)
}
