//! Electoral control problems and their exact solvers.
//!
//! A [`ControlInstance`] fixes the base election, the kind of action the chair
//! may take ([`Family`]), whether the aim is to make the distinguished
//! candidate the unique winner or to stop that ([`Goal`]), and, for partition
//! problems, how tied subelections are resolved ([`TieModel`]).
//!
//! Solvers enumerate every admissible action in a fixed canonical order and
//! report the first success as the witness:
//!
//! * candidate subsets by size, then lexicographically by declaration index;
//! * voter take/removal counts by total, then lexicographically per group;
//! * candidate partitions by the bitmask of the first part (bit `i` set when
//!   candidate `i` is in the first part);
//! * voter splits lexicographically over per-group counts sent to the first
//!   part (first group most significant).

mod search;
mod solve;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::election::{canonical_groups, BallotGroup, Candidate, Election, ElectionError, System};

pub use search::SolveOptions;
pub use solve::{
    solve_add_candidates, solve_add_voters, solve_delete_candidates, solve_delete_voters,
    solve_partition_candidates, solve_partition_voters, solve_runoff_partition_candidates,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ControlError {
    #[error("{family} instances require `{field}`")]
    MissingField { family: Family, field: &'static str },
    #[error("{family} instances do not take `{field}`")]
    UnexpectedField { family: Family, field: &'static str },
    #[error("unknown candidate `{0}`")]
    UnknownCandidate(String),
    #[error("distinguished candidate `{0}` may not be a spoiler")]
    DistinguishedIsSpoiler(String),
    #[error("duplicate spoiler `{0}`")]
    DuplicateSpoiler(String),
    #[error("invalid pool ballot: {0}")]
    Pool(#[source] ElectionError),
    #[error("expected a {expected} instance, found {found}")]
    WrongFamily { expected: Family, found: Family },
    #[error("{0} candidates is too many for exhaustive partition search")]
    TooManyCandidates(usize),
    #[error("witness does not fit this instance: {0}")]
    InvalidWitness(String),
    #[error("search budget exhausted after {explored} actions")]
    BudgetExceeded { explored: u64 },
}

/// The kind of control action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    AddCandidates,
    DeleteCandidates,
    AddVoters,
    DeleteVoters,
    PartitionCandidates,
    RunoffPartitionCandidates,
    PartitionVoters,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::AddCandidates,
        Family::DeleteCandidates,
        Family::AddVoters,
        Family::DeleteVoters,
        Family::PartitionCandidates,
        Family::RunoffPartitionCandidates,
        Family::PartitionVoters,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            Family::AddCandidates => "add-candidates",
            Family::DeleteCandidates => "delete-candidates",
            Family::AddVoters => "add-voters",
            Family::DeleteVoters => "delete-voters",
            Family::PartitionCandidates => "partition-candidates",
            Family::RunoffPartitionCandidates => "runoff-partition-candidates",
            Family::PartitionVoters => "partition-voters",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Family> {
        Family::ALL.into_iter().find(|f| f.keyword() == word)
    }

    pub fn is_partition(self) -> bool {
        matches!(
            self,
            Family::PartitionCandidates | Family::RunoffPartitionCandidates | Family::PartitionVoters
        )
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Goal {
    /// Make the distinguished candidate the unique winner.
    Constructive,
    /// Make the distinguished candidate anything but the unique winner.
    Destructive,
}

impl Goal {
    pub fn keyword(self) -> &'static str {
        match self {
            Goal::Constructive => "constructive",
            Goal::Destructive => "destructive",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Goal> {
        match word {
            "constructive" => Some(Goal::Constructive),
            "destructive" => Some(Goal::Destructive),
            _ => None,
        }
    }

    /// Whether a final round whose unique winner is `winner` satisfies the goal.
    pub fn achieved(self, winner: Option<&Candidate>, distinguished: &Candidate) -> bool {
        let wins = winner == Some(distinguished);
        match self {
            Goal::Constructive => wins,
            Goal::Destructive => !wins,
        }
    }
}

/// Resolution of ties in a subelection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TieModel {
    /// All tied leaders advance.
    Promote,
    /// Nobody advances unless the winner is unique.
    Eliminate,
}

impl TieModel {
    pub fn keyword(self) -> &'static str {
        match self {
            TieModel::Promote => "promote",
            TieModel::Eliminate => "eliminate",
        }
    }

    pub fn from_keyword(word: &str) -> Option<TieModel> {
        match word {
            "promote" => Some(TieModel::Promote),
            "eliminate" => Some(TieModel::Eliminate),
            _ => None,
        }
    }
}

/// Candidates advancing from a subelection, in declaration order.
pub fn subelection_survivors(election: &Election, system: System, tie_model: TieModel) -> Vec<Candidate> {
    let tally = election.tally(system);
    match tie_model {
        TieModel::Promote => tally.winners().to_vec(),
        TieModel::Eliminate => tally.unique_winner().cloned().into_iter().collect(),
    }
}

/// Optional parts of a control instance; which ones are required depends on
/// the family.
#[derive(Debug, Clone, Default)]
pub struct InstanceParams {
    pub tie_model: Option<TieModel>,
    pub limit: Option<u64>,
    pub spoilers: Vec<Candidate>,
    pub pool: Vec<BallotGroup>,
}

/// A control decision problem.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ControlInstance {
    system: System,
    base: Election,
    family: Family,
    goal: Goal,
    tie_model: Option<TieModel>,
    distinguished: Candidate,
    limit: Option<u64>,
    spoilers: Vec<Candidate>,
    pool: Vec<BallotGroup>,
}

impl ControlInstance {
    /// Validates a control instance.
    ///
    /// For [`Family::AddCandidates`] the base election already contains the
    /// spoiler columns; `params.spoilers` marks which of them start out
    /// unregistered. The limit may exceed the number of available actions, in
    /// which case it is effectively the number of available actions.
    pub fn new(
        system: System,
        base: Election,
        family: Family,
        goal: Goal,
        distinguished: Candidate,
        params: InstanceParams,
    ) -> Result<Self, ControlError> {
        let InstanceParams {
            tie_model,
            limit,
            spoilers,
            pool,
        } = params;
        if base.index_of(&distinguished).is_none() {
            return Err(ControlError::UnknownCandidate(distinguished.to_string()));
        }
        let missing = |field| ControlError::MissingField { family, field };
        let unexpected = |field| ControlError::UnexpectedField { family, field };
        if family.is_partition() {
            if tie_model.is_none() {
                return Err(missing("ties"));
            }
            if limit.is_some() {
                return Err(unexpected("limit"));
            }
        } else {
            if limit.is_none() {
                return Err(missing("limit"));
            }
            if tie_model.is_some() {
                return Err(unexpected("ties"));
            }
        }
        if family != Family::AddCandidates && !spoilers.is_empty() {
            return Err(unexpected("spoilers"));
        }
        if family != Family::AddVoters && !pool.is_empty() {
            return Err(unexpected("pool"));
        }

        let mut spoiler_flags = vec![false; base.candidates().len()];
        for s in &spoilers {
            let i = base
                .index_of(s)
                .ok_or_else(|| ControlError::UnknownCandidate(s.to_string()))?;
            if spoiler_flags[i] {
                return Err(ControlError::DuplicateSpoiler(s.to_string()));
            }
            spoiler_flags[i] = true;
        }
        if spoilers.contains(&distinguished) {
            return Err(ControlError::DistinguishedIsSpoiler(distinguished.to_string()));
        }
        let spoilers = base
            .candidates()
            .iter()
            .zip(&spoiler_flags)
            .filter(|(_, &f)| f)
            .map(|(c, _)| c.clone())
            .collect();

        for g in &pool {
            g.validate(base.range(), base.candidates().len())
                .map_err(ControlError::Pool)?;
        }
        let pool = canonical_groups(pool);

        Ok(ControlInstance {
            system,
            base,
            family,
            goal,
            tie_model,
            distinguished,
            limit,
            spoilers,
            pool,
        })
    }

    pub fn add_candidates(
        system: System,
        base: Election,
        spoilers: Vec<Candidate>,
        distinguished: Candidate,
        limit: u64,
        goal: Goal,
    ) -> Result<Self, ControlError> {
        let params = InstanceParams {
            limit: Some(limit),
            spoilers,
            ..InstanceParams::default()
        };
        Self::new(system, base, Family::AddCandidates, goal, distinguished, params)
    }

    pub fn delete_candidates(
        system: System,
        base: Election,
        distinguished: Candidate,
        limit: u64,
        goal: Goal,
    ) -> Result<Self, ControlError> {
        let params = InstanceParams {
            limit: Some(limit),
            ..InstanceParams::default()
        };
        Self::new(system, base, Family::DeleteCandidates, goal, distinguished, params)
    }

    pub fn add_voters(
        system: System,
        base: Election,
        pool: Vec<BallotGroup>,
        distinguished: Candidate,
        limit: u64,
        goal: Goal,
    ) -> Result<Self, ControlError> {
        let params = InstanceParams {
            limit: Some(limit),
            pool,
            ..InstanceParams::default()
        };
        Self::new(system, base, Family::AddVoters, goal, distinguished, params)
    }

    pub fn delete_voters(
        system: System,
        base: Election,
        distinguished: Candidate,
        limit: u64,
        goal: Goal,
    ) -> Result<Self, ControlError> {
        let params = InstanceParams {
            limit: Some(limit),
            ..InstanceParams::default()
        };
        Self::new(system, base, Family::DeleteVoters, goal, distinguished, params)
    }

    /// Any of the three partition families.
    pub fn partition(
        system: System,
        base: Election,
        family: Family,
        distinguished: Candidate,
        tie_model: TieModel,
        goal: Goal,
    ) -> Result<Self, ControlError> {
        let params = InstanceParams {
            tie_model: Some(tie_model),
            ..InstanceParams::default()
        };
        Self::new(system, base, family, goal, distinguished, params)
    }

    pub fn system(&self) -> System {
        self.system
    }

    pub fn base(&self) -> &Election {
        &self.base
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn goal(&self) -> Goal {
        self.goal
    }

    pub fn tie_model(&self) -> Option<TieModel> {
        self.tie_model
    }

    pub fn distinguished(&self) -> &Candidate {
        &self.distinguished
    }

    pub fn limit(&self) -> Option<u64> {
        self.limit
    }

    /// Unregistered candidates (declaration order).
    pub fn spoilers(&self) -> &[Candidate] {
        &self.spoilers
    }

    pub fn pool(&self) -> &[BallotGroup] {
        &self.pool
    }

    /// Candidates taking part before any action.
    pub fn registered(&self) -> Vec<Candidate> {
        self.base
            .candidates()
            .iter()
            .filter(|c| !self.spoilers.contains(c))
            .cloned()
            .collect()
    }

    /// The same problem with the range and every score multiplied by `factor`.
    pub fn scaled(&self, factor: u32) -> ControlInstance {
        let mut out = self.clone();
        out.base = self.base.scale(factor);
        out.pool = self
            .pool
            .iter()
            .map(|g| BallotGroup::new(g.multiplicity(), g.scores().iter().map(|s| s * factor).collect()))
            .collect();
        out
    }

    /// Decides the instance by exhaustive search.
    pub fn solve(&self, options: &SolveOptions) -> Result<ControlOutcome, ControlError> {
        match self.family {
            Family::AddCandidates => solve_add_candidates(self, options),
            Family::DeleteCandidates => solve_delete_candidates(self, options),
            Family::AddVoters => solve_add_voters(self, options),
            Family::DeleteVoters => solve_delete_voters(self, options),
            Family::PartitionCandidates => solve_partition_candidates(self, options),
            Family::RunoffPartitionCandidates => solve_runoff_partition_candidates(self, options),
            Family::PartitionVoters => solve_partition_voters(self, options),
        }
    }

    /// Applies `witness` through the public election API (projection and
    /// full tallies) and reports whether the goal is achieved. Independent of
    /// the solvers' internal evaluation path.
    pub fn replay(&self, witness: &Witness) -> Result<bool, ControlError> {
        let bad = |msg: &str| ControlError::InvalidWitness(msg.to_string());
        let limit = self.limit.unwrap_or(0);
        let final_election = match (self.family, witness) {
            (Family::AddCandidates, Witness::Candidates(added)) => {
                if added.len() as u64 > limit || added.iter().any(|c| !self.spoilers.contains(c)) {
                    return Err(bad("added candidates must be at most `limit` spoilers"));
                }
                let mut keep = self.registered();
                keep.extend(added.iter().cloned());
                self.base.project(&keep).expect("candidates come from the base election")
            }
            (Family::DeleteCandidates, Witness::Candidates(deleted)) => {
                if deleted.len() as u64 > limit || deleted.contains(&self.distinguished) {
                    return Err(bad("at most `limit` deletions, never the distinguished candidate"));
                }
                if deleted.iter().any(|c| self.base.index_of(c).is_none()) {
                    return Err(bad("deleted candidate not in the election"));
                }
                let keep: Vec<Candidate> = self
                    .base
                    .candidates()
                    .iter()
                    .filter(|c| !deleted.contains(c))
                    .cloned()
                    .collect();
                self.base.project(&keep).expect("subset of the base election")
            }
            (Family::AddVoters, Witness::VoterCounts(taken)) => {
                if taken.len() != self.pool.len()
                    || taken.iter().zip(&self.pool).any(|(&t, g)| t > g.multiplicity())
                    || taken.iter().sum::<u64>() > limit
                {
                    return Err(bad("take counts must fit the pool and the limit"));
                }
                let mut groups = self.base.ballots().to_vec();
                groups.extend(
                    self.pool
                        .iter()
                        .zip(taken)
                        .filter(|(_, &t)| t > 0)
                        .map(|(g, &t)| BallotGroup::new(t, g.scores().to_vec())),
                );
                Election::new(self.base.range(), self.base.candidates().to_vec(), groups)
                    .expect("pool ballots were validated")
            }
            (Family::DeleteVoters, Witness::VoterCounts(removed)) => {
                let groups = self.base.ballots();
                if removed.len() != groups.len()
                    || removed.iter().zip(groups).any(|(&r, g)| r > g.multiplicity())
                    || removed.iter().sum::<u64>() > limit
                {
                    return Err(bad("removal counts must fit the groups and the limit"));
                }
                let left: Vec<u64> = groups
                    .iter()
                    .zip(removed)
                    .map(|(g, &r)| g.multiplicity() - r)
                    .collect();
                self.base.with_counts(&left)
            }
            (
                Family::PartitionCandidates | Family::RunoffPartitionCandidates,
                Witness::CandidatePartition { first, second },
            ) => {
                let all = self.base.candidates();
                let covers = all
                    .iter()
                    .all(|c| first.contains(c) != second.contains(c));
                if !covers || first.len() + second.len() != all.len() {
                    return Err(bad("the two parts must partition the candidates"));
                }
                let ties = self.tie_model.expect("partition instances carry a tie model");
                let run = |part: &[Candidate]| {
                    let sub = self.base.project(part).expect("subset of the base election");
                    subelection_survivors(&sub, self.system, ties)
                };
                let mut finalists = run(first);
                if self.family == Family::PartitionCandidates {
                    finalists.extend(second.iter().cloned());
                } else {
                    finalists.extend(run(second));
                }
                self.base.project(&finalists).expect("subset of the base election")
            }
            (Family::PartitionVoters, Witness::VoterSplit(split)) => {
                let groups = self.base.ballots();
                if split.len() != groups.len()
                    || split.iter().zip(groups).any(|(&j, g)| j > g.multiplicity())
                {
                    return Err(bad("split counts must fit the groups"));
                }
                let rest: Vec<u64> = groups
                    .iter()
                    .zip(split)
                    .map(|(g, &j)| g.multiplicity() - j)
                    .collect();
                let ties = self.tie_model.expect("partition instances carry a tie model");
                let mut finalists =
                    subelection_survivors(&self.base.with_counts(split), self.system, ties);
                finalists.extend(subelection_survivors(&self.base.with_counts(&rest), self.system, ties));
                self.base.project(&finalists).expect("subset of the base election")
            }
            _ => return Err(bad("witness kind does not match the control family")),
        };
        let tally = final_election.tally(self.system);
        Ok(self.goal.achieved(tally.unique_winner(), &self.distinguished))
    }
}

/// A concrete control action.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Witness {
    /// Spoilers added or candidates deleted, in declaration order.
    Candidates(Vec<Candidate>),
    /// Voters taken from each pool group, or removed from each base group.
    VoterCounts(Vec<u64>),
    /// `first` runs the (first) subelection; `second` is the rest.
    CandidatePartition {
        first: Vec<Candidate>,
        second: Vec<Candidate>,
    },
    /// Voters of each base group placed in the first part.
    VoterSplit(Vec<u64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Yes,
    No,
}

impl Decision {
    pub fn is_yes(self) -> bool {
        self == Decision::Yes
    }

    pub fn from_bool(yes: bool) -> Decision {
        if yes {
            Decision::Yes
        } else {
            Decision::No
        }
    }
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Decision::Yes => "YES",
            Decision::No => "NO",
        })
    }
}

/// Result of an exhaustive search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ControlOutcome {
    pub decision: Decision,
    /// First successful action in canonical order; present iff `decision` is yes.
    pub witness: Option<Witness>,
    /// Actions evaluated, up to and including the witness.
    pub explored: u64,
}

#[cfg(test)]
mod tests;
