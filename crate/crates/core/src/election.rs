//! Range-voting elections and their exact tallies.
//!
//! An [`Election`] holds a score range `k`, an ordered candidate list, and a
//! canonical list of [`BallotGroup`]s (identical score vectors merged, groups
//! sorted by score vector). Tallies are computed under plain Range Voting or
//! Normalized Range Voting, where each ballot is affinely stretched over the
//! candidates actually present so that its minimum maps to 0 and its maximum
//! to `k`. Ballots that score every present candidate equally are discarded.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::score::Score;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ElectionError {
    #[error("invalid candidate id `{0}`: ids must be nonempty and contain no whitespace or `#`")]
    InvalidCandidate(String),
    #[error("duplicate candidate `{0}`")]
    DuplicateCandidate(String),
    #[error("unknown candidate `{0}`")]
    UnknownCandidate(String),
    #[error("score range must be at least 1")]
    ZeroRange,
    #[error("ballot has {found} scores but the election has {expected} candidates")]
    BallotLength { expected: usize, found: usize },
    #[error("score {score} is outside the range [0, {range}]")]
    ScoreOutOfRange { score: u32, range: u32 },
    #[error("ballot multiplicity must be at least 1")]
    ZeroMultiplicity,
    #[error("approval ballots may only contain 0 or 1, found {0}")]
    NotApproval(u32),
}

/// A candidate identifier: a nonempty token without whitespace.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Candidate(String);

impl Candidate {
    pub fn new(id: impl Into<String>) -> Result<Self, ElectionError> {
        let id = id.into();
        if id.is_empty() || id.chars().any(|c| c.is_whitespace() || c == '#') {
            return Err(ElectionError::InvalidCandidate(id));
        }
        Ok(Candidate(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for Candidate {
    type Error = ElectionError;
    fn try_from(value: String) -> Result<Self, Self::Error> {
        Candidate::new(value)
    }
}

impl From<Candidate> for String {
    fn from(value: Candidate) -> Self {
        value.0
    }
}

impl fmt::Display for Candidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Candidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Builds a list of candidates from string ids.
pub fn candidates<S: AsRef<str>>(ids: &[S]) -> Result<Vec<Candidate>, ElectionError> {
    ids.iter().map(|id| Candidate::new(id.as_ref())).collect()
}

/// `multiplicity` identical voters casting the same score vector. Scores are
/// listed in the candidate order of the owning election.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BallotGroup {
    multiplicity: u64,
    scores: Vec<u32>,
}

impl BallotGroup {
    pub fn new(multiplicity: u64, scores: Vec<u32>) -> Self {
        BallotGroup { multiplicity, scores }
    }

    pub fn multiplicity(&self) -> u64 {
        self.multiplicity
    }

    pub fn scores(&self) -> &[u32] {
        &self.scores
    }

    pub(crate) fn validate(&self, range: u32, width: usize) -> Result<(), ElectionError> {
        if self.scores.len() != width {
            return Err(ElectionError::BallotLength {
                expected: width,
                found: self.scores.len(),
            });
        }
        if self.multiplicity == 0 {
            return Err(ElectionError::ZeroMultiplicity);
        }
        if let Some(&score) = self.scores.iter().find(|&&s| s > range) {
            return Err(ElectionError::ScoreOutOfRange { score, range });
        }
        Ok(())
    }
}

/// Merges groups with identical score vectors and sorts them by score vector.
pub(crate) fn canonical_groups(groups: impl IntoIterator<Item = BallotGroup>) -> Vec<BallotGroup> {
    let mut merged: BTreeMap<Vec<u32>, u64> = BTreeMap::new();
    for g in groups {
        let slot = merged.entry(g.scores).or_insert(0);
        *slot = slot.checked_add(g.multiplicity).expect("voter count overflow");
    }
    merged
        .into_iter()
        .map(|(scores, multiplicity)| BallotGroup { multiplicity, scores })
        .collect()
}

/// Aggregation rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum System {
    /// Range Voting: plain score sums.
    Rv,
    /// Normalized Range Voting.
    Nrv,
}

impl System {
    pub fn name(self) -> &'static str {
        match self {
            System::Rv => "rv",
            System::Nrv => "nrv",
        }
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for System {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "rv" => Ok(System::Rv),
            "nrv" => Ok(System::Nrv),
            other => Err(format!("unknown voting system `{other}` (expected rv or nrv)")),
        }
    }
}

/// A `k`-range election.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawElection")]
pub struct Election {
    range: u32,
    candidates: Vec<Candidate>,
    ballots: Vec<BallotGroup>,
}

#[derive(Deserialize)]
struct RawElection {
    range: u32,
    candidates: Vec<Candidate>,
    ballots: Vec<BallotGroup>,
}

impl TryFrom<RawElection> for Election {
    type Error = ElectionError;
    fn try_from(raw: RawElection) -> Result<Self, ElectionError> {
        Election::new(raw.range, raw.candidates, raw.ballots)
    }
}

impl Election {
    /// Validates and canonicalizes an election.
    pub fn new(
        range: u32,
        candidates: Vec<Candidate>,
        ballots: Vec<BallotGroup>,
    ) -> Result<Self, ElectionError> {
        if range == 0 {
            return Err(ElectionError::ZeroRange);
        }
        let mut seen = std::collections::HashSet::new();
        for c in &candidates {
            if !seen.insert(c) {
                return Err(ElectionError::DuplicateCandidate(c.to_string()));
            }
        }
        for g in &ballots {
            g.validate(range, candidates.len())?;
        }
        Ok(Election {
            range,
            candidates,
            ballots: canonical_groups(ballots),
        })
    }

    /// A 1-range election from approval ballots (every score 0 or 1).
    pub fn from_approval(
        candidates: Vec<Candidate>,
        ballots: Vec<BallotGroup>,
    ) -> Result<Self, ElectionError> {
        if let Some(&bad) = ballots.iter().flat_map(|g| g.scores.iter()).find(|&&s| s > 1) {
            return Err(ElectionError::NotApproval(bad));
        }
        Election::new(1, candidates, ballots)
    }

    pub fn range(&self) -> u32 {
        self.range
    }

    pub fn candidates(&self) -> &[Candidate] {
        &self.candidates
    }

    pub fn ballots(&self) -> &[BallotGroup] {
        &self.ballots
    }

    pub fn voter_count(&self) -> u64 {
        self.ballots.iter().map(|g| g.multiplicity).sum()
    }

    pub fn index_of(&self, candidate: &Candidate) -> Option<usize> {
        self.candidates.iter().position(|c| c == candidate)
    }

    pub fn index_of_str(&self, id: &str) -> Option<usize> {
        self.candidates.iter().position(|c| c.as_str() == id)
    }

    /// Index of the group casting exactly `scores`, if any.
    pub fn group_index(&self, scores: &[u32]) -> Option<usize> {
        self.ballots
            .binary_search_by(|g| g.scores.as_slice().cmp(scores))
            .ok()
    }

    /// The same voters restricted to `subset`. Raw integer scores are kept;
    /// normalization happens at tally time over whatever candidates remain.
    /// Candidate order follows this election's declaration order.
    pub fn project(&self, subset: &[Candidate]) -> Result<Election, ElectionError> {
        let mut keep = vec![false; self.candidates.len()];
        for c in subset {
            let i = self
                .index_of(c)
                .ok_or_else(|| ElectionError::UnknownCandidate(c.to_string()))?;
            keep[i] = true;
        }
        let cols: Vec<usize> = (0..self.candidates.len()).filter(|&i| keep[i]).collect();
        Ok(self.project_columns(&cols))
    }

    pub(crate) fn project_columns(&self, cols: &[usize]) -> Election {
        let ballots = self
            .ballots
            .iter()
            .map(|g| BallotGroup {
                multiplicity: g.multiplicity,
                scores: cols.iter().map(|&i| g.scores[i]).collect(),
            })
            .collect::<Vec<_>>();
        Election {
            range: self.range,
            candidates: cols.iter().map(|&i| self.candidates[i].clone()).collect(),
            ballots: canonical_groups(ballots),
        }
    }

    /// Keeps every candidate but replaces each group's multiplicity with
    /// `counts[i]`; groups with a zero count are dropped.
    pub fn with_counts(&self, counts: &[u64]) -> Election {
        assert_eq!(counts.len(), self.ballots.len(), "one count per ballot group");
        let ballots = self
            .ballots
            .iter()
            .zip(counts)
            .filter(|(_, &n)| n > 0)
            .map(|(g, &n)| BallotGroup::new(n, g.scores.clone()))
            .collect::<Vec<_>>();
        Election {
            range: self.range,
            candidates: self.candidates.clone(),
            ballots: canonical_groups(ballots),
        }
    }

    /// Multiplies the range and every score by `factor`.
    ///
    /// # Panics
    /// If `factor` is zero or the scaled range overflows `u32`.
    pub fn scale(&self, factor: u32) -> Election {
        assert!(factor >= 1, "scale factor must be positive");
        let range = self.range.checked_mul(factor).expect("scaled range overflows");
        let ballots = self
            .ballots
            .iter()
            .map(|g| BallotGroup {
                multiplicity: g.multiplicity,
                scores: g.scores.iter().map(|s| s * factor).collect(),
            })
            .collect();
        Election {
            range,
            candidates: self.candidates.clone(),
            ballots,
        }
    }

    pub fn tally(&self, system: System) -> Tally {
        let cols: Vec<usize> = (0..self.candidates.len()).collect();
        let raw = column_tally(self.range, system, &self.ballots, None, &cols);
        Tally::from_columns(&self.candidates, &cols, &raw)
    }
}

/// Normalizes one ballot to `[0, k]`: each score `s` becomes
/// `k(s - lo)/(hi - lo)` with `hi`, `lo` the ballot's extremes. Returns `None`
/// (discarded) when every score is equal or the ballot is empty.
pub fn normalize_ballot(scores: &[u32], range: u32) -> Option<Vec<Score>> {
    let as_scores: Vec<Score> = scores.iter().map(|&s| Score::from(s)).collect();
    normalize_scores(&as_scores, range)
}

/// [`normalize_ballot`] over rational scores.
pub fn normalize_scores(scores: &[Score], range: u32) -> Option<Vec<Score>> {
    let hi = *scores.iter().max()?;
    let lo = *scores.iter().min()?;
    if hi == lo {
        return None;
    }
    let k = Score::from(range);
    let span = hi - lo;
    Some(
        scores.iter().map(|&s| k * (s - lo) / span).collect(),
    )
}

/// Exact totals for one election.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    totals: Vec<(Candidate, Score)>,
    winners: Vec<Candidate>,
    unique_winner: Option<Candidate>,
}

impl Tally {
    fn from_columns(names: &[Candidate], cols: &[usize], raw: &ColumnTally) -> Tally {
        let totals = cols
            .iter()
            .zip(&raw.totals)
            .map(|(&i, &t)| (names[i].clone(), Score::new(t, raw.denom)))
            .collect();
        let winners: Vec<Candidate> = raw
            .winner_positions()
            .into_iter()
            .map(|p| names[cols[p]].clone())
            .collect();
        let unique_winner = match winners.as_slice() {
            [only] => Some(only.clone()),
            _ => None,
        };
        Tally {
            totals,
            winners,
            unique_winner,
        }
    }

    /// Totals in candidate declaration order.
    pub fn totals(&self) -> &[(Candidate, Score)] {
        &self.totals
    }

    pub fn total(&self, id: &str) -> Option<Score> {
        self.totals
            .iter()
            .find(|(c, _)| c.as_str() == id)
            .map(|(_, s)| *s)
    }

    /// Every candidate attaining the maximum total, in declaration order.
    pub fn winners(&self) -> &[Candidate] {
        &self.winners
    }

    pub fn unique_winner(&self) -> Option<&Candidate> {
        self.unique_winner.as_ref()
    }
}

/// Totals over a subset of columns, all sharing the denominator `denom`.
#[derive(Debug, Clone)]
pub(crate) struct ColumnTally {
    pub totals: Vec<i128>,
    pub denom: i128,
}

impl ColumnTally {
    /// Positions (into the column list) of the maximal totals.
    pub fn winner_positions(&self) -> Vec<usize> {
        let Some(&best) = self.totals.iter().max() else {
            return Vec::new();
        };
        (0..self.totals.len())
            .filter(|&p| self.totals[p] == best)
            .collect()
    }

    pub fn unique_winner_position(&self) -> Option<usize> {
        let mut best: Option<(i128, usize)> = None;
        let mut tied = false;
        for (p, &t) in self.totals.iter().enumerate() {
            match best {
                None => best = Some((t, p)),
                Some((b, _)) if t > b => {
                    best = Some((t, p));
                    tied = false;
                }
                Some((b, _)) if t == b => tied = true,
                _ => {}
            }
        }
        match best {
            Some((_, p)) if !tied => Some(p),
            _ => None,
        }
    }
}

/// Tallies the candidates at `cols`, with optional per-group voter counts
/// overriding the groups' multiplicities.
pub(crate) fn column_tally(
    range: u32,
    system: System,
    ballots: &[BallotGroup],
    weights: Option<&[u64]>,
    cols: &[usize],
) -> ColumnTally {
    let weight = |i: usize| weights.map_or(ballots[i].multiplicity, |w| w[i]);
    let mut totals = vec![0i128; cols.len()];
    if cols.is_empty() {
        return ColumnTally { totals, denom: 1 };
    }
    match system {
        System::Rv => {
            for (i, g) in ballots.iter().enumerate() {
                let w = i128::from(weight(i));
                if w == 0 {
                    continue;
                }
                for (t, &c) in totals.iter_mut().zip(cols) {
                    *t = checked(t.checked_add(w * i128::from(g.scores[c])));
                }
            }
            ColumnTally { totals, denom: 1 }
        }
        System::Nrv => {
            // (group, low, span) for every counted, non-flat ballot.
            let mut live: Vec<(usize, u32, u32)> = Vec::with_capacity(ballots.len());
            let mut denom: i128 = 1;
            for (i, g) in ballots.iter().enumerate() {
                if weight(i) == 0 {
                    continue;
                }
                let (lo, hi) = cols.iter().fold((u32::MAX, 0), |(lo, hi), &c| {
                    let s = g.scores[c];
                    (lo.min(s), hi.max(s))
                });
                if hi > lo {
                    live.push((i, lo, hi - lo));
                    denom = denom.lcm(&i128::from(hi - lo));
                }
            }
            let k = i128::from(range);
            for (i, lo, span) in live {
                let g = &ballots[i];
                let factor = checked(
                    i128::from(weight(i))
                        .checked_mul(k)
                        .and_then(|x| x.checked_mul(denom / i128::from(span))),
                );
                for (t, &c) in totals.iter_mut().zip(cols) {
                    let lift = i128::from(g.scores[c] - lo);
                    *t = checked(factor.checked_mul(lift).and_then(|x| t.checked_add(x)));
                }
            }
            ColumnTally { totals, denom }
        }
    }
}

fn checked(x: Option<i128>) -> i128 {
    x.expect("score overflow")
}
