//! Reduction gadgets: elections built from Hitting Set, X3C, and deletion
//! instances, with the closed-form score tables attached as checkable
//! identities.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::control::{ControlError, ControlInstance, Family, Goal, TieModel, Witness};
use crate::election::{BallotGroup, Candidate, Election, ElectionError, System};
use crate::problems::{HittingSetInstance, X3CInstance};
use crate::score::Score;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GadgetError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("{0} is not a candidate of the source election")]
    MissingCandidate(String),
    #[error("the source election has no candidates")]
    EmptySource,
    #[error(transparent)]
    Election(#[from] ElectionError),
    #[error(transparent)]
    Control(#[from] ControlError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GadgetKind {
    HsCandidates,
    HsDeleteConstructive,
    RhsVoterPartitionTp,
    X3cVoterPartitionTe,
    DeletionToCandidatePartition,
    HsDestructiveCandidatePartition,
}

impl GadgetKind {
    pub const ALL: [GadgetKind; 6] = [
        GadgetKind::HsCandidates,
        GadgetKind::HsDeleteConstructive,
        GadgetKind::RhsVoterPartitionTp,
        GadgetKind::X3cVoterPartitionTe,
        GadgetKind::DeletionToCandidatePartition,
        GadgetKind::HsDestructiveCandidatePartition,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            GadgetKind::HsCandidates => "hs-candidates",
            GadgetKind::HsDeleteConstructive => "hs-delete-constructive",
            GadgetKind::RhsVoterPartitionTp => "rhs-voter-partition-tp",
            GadgetKind::X3cVoterPartitionTe => "x3c-voter-partition-te",
            GadgetKind::DeletionToCandidatePartition => "deletion-to-candidate-partition",
            GadgetKind::HsDestructiveCandidatePartition => "hs-destructive-candidate-partition",
        }
    }

    pub fn from_keyword(word: &str) -> Option<GadgetKind> {
        Self::ALL.into_iter().find(|g| g.keyword() == word)
    }
}

impl std::str::FromStr for GadgetKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        GadgetKind::from_keyword(s).ok_or_else(|| {
            let names: Vec<&str> = GadgetKind::ALL.iter().map(|g| g.keyword()).collect();
            format!("unknown gadget `{s}` (expected one of {})", names.join(", "))
        })
    }
}

impl fmt::Display for GadgetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// What the construction was built from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GadgetSource {
    HittingSet(HittingSetInstance),
    X3c(X3CInstance),
    /// A constructive deletion-of-candidates instance.
    Deletion(ControlInstance),
}

/// How the emitted instances relate to the source problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Claim {
    /// Every instance is yes exactly when the source is yes.
    Equivalent,
    /// A yes source yields an explicit successful action on every instance.
    SourceYesImpliesYes,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    Total(Candidate),
    MaxOf(Vec<Candidate>),
    /// `leader - runner - max(field)`.
    Margin {
        leader: Candidate,
        runner: Candidate,
        field: Vec<Candidate>,
    },
    /// The candidate's total minus the best other total.
    Lead(Candidate),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    Eq,
    Le,
    Ge,
    Gt,
}

impl Relation {
    pub fn holds(self, computed: Score, expected: Score) -> bool {
        match self {
            Relation::Eq => computed == expected,
            Relation::Le => computed <= expected,
            Relation::Ge => computed >= expected,
            Relation::Gt => computed > expected,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Eq => "=",
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Gt => ">",
        }
    }
}

/// A closed-form claim about one NRV subelection of a gadget.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Identity {
    pub label: String,
    /// The table row this identity instantiates, with element names
    /// generalized to `b`; identities of one gadget share rows across
    /// instances.
    pub row: String,
    pub subelection: String,
    /// Candidates of the subelection.
    pub candidates: Vec<Candidate>,
    /// Voters per ballot group of the gadget election; `None` means all.
    pub voters: Option<Vec<u64>>,
    pub quantity: Quantity,
    pub relation: Relation,
    pub expected: Score,
    pub formula: String,
    /// Failing a required identity means the construction itself is wrong;
    /// the others are recorded as audit findings.
    pub required: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub label: String,
    pub row: String,
    pub subelection: String,
    pub formula: String,
    pub relation: Relation,
    pub expected: Score,
    pub computed: Score,
    pub holds: bool,
    pub required: bool,
}

impl Identity {
    pub fn evaluate(&self, election: &Election) -> IdentityCheck {
        let voters = match &self.voters {
            Some(counts) => election.with_counts(counts),
            None => election.clone(),
        };
        let tally = voters
            .project(&self.candidates)
            .expect("identities name gadget candidates")
            .tally(System::Nrv);
        let total = |c: &Candidate| tally.total(c.as_str()).expect("candidate is in the subelection");
        let max_of = |cs: &[Candidate]| cs.iter().map(total).max().unwrap_or(Score::ZERO);
        let computed = match &self.quantity {
            Quantity::Total(c) => total(c),
            Quantity::MaxOf(cs) => max_of(cs),
            Quantity::Margin { leader, runner, field } => total(leader) - total(runner) - max_of(field),
            Quantity::Lead(c) => {
                let others: Vec<Candidate> = self.candidates.iter().filter(|x| *x != c).cloned().collect();
                total(c) - max_of(&others)
            }
        };
        IdentityCheck {
            label: self.label.clone(),
            row: self.row.clone(),
            subelection: self.subelection.clone(),
            formula: self.formula.clone(),
            relation: self.relation,
            expected: self.expected,
            computed,
            holds: self.relation.holds(computed, self.expected),
            required: self.required,
        }
    }
}

/// One voter group as written in the construction, before identical score
/// vectors are merged.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VoterBlock {
    pub label: String,
    pub count: u64,
    pub scores: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetOutput {
    pub kind: GadgetKind,
    pub source: GadgetSource,
    pub election: Election,
    pub groups: Vec<VoterBlock>,
    pub instances: Vec<ControlInstance>,
    pub identities: Vec<Identity>,
    pub claim: Claim,
    /// Closed-form voter count of the construction.
    pub expected_voters: u64,
}

/// Evaluates every identity by exact tally.
pub fn check_score_identities(gadget: &GadgetOutput) -> Vec<IdentityCheck> {
    gadget.identities.iter().map(|i| i.evaluate(&gadget.election)).collect()
}

impl GadgetOutput {
    fn candidate(&self, index: usize) -> Candidate {
        self.election.candidates()[index].clone()
    }

    fn named(&self, indices: impl IntoIterator<Item = usize>) -> Vec<Candidate> {
        indices.into_iter().map(|i| self.candidate(i)).collect()
    }

    fn element_count(&self) -> usize {
        match &self.source {
            GadgetSource::HittingSet(hs) => hs.n(),
            GadgetSource::X3c(x) => x.elements().len(),
            GadgetSource::Deletion(d) => d.base().candidates().len(),
        }
    }

    /// Aux candidate by position after the elements.
    fn aux(&self, offset: usize) -> Candidate {
        self.candidate(self.element_count() + offset)
    }

    /// Ballot-group counts selecting the given construction groups (by label).
    fn voters_from(&self, picks: &[(String, u64)]) -> Vec<u64> {
        let mut counts = vec![0; self.election.ballots().len()];
        for (label, count) in picks {
            let group = self
                .groups
                .iter()
                .find(|g| g.label == *label)
                .unwrap_or_else(|| panic!("no group `{label}`"));
            assert!(*count <= group.count, "group `{label}` has {} voters", group.count);
            let at = self.election.group_index(&group.scores).expect("group is in the election");
            counts[at] += count;
        }
        counts
    }

    /// Pads a hitting set with the smallest unused elements up to `size`.
    fn padded(&self, cert: &[usize], size: usize) -> Vec<usize> {
        let mut out = cert.to_vec();
        for e in 0..self.element_count() {
            if out.len() >= size {
                break;
            }
            if !out.contains(&e) {
                out.push(e);
            }
        }
        out.sort_unstable();
        out
    }

    /// Identities that hold only given a certificate for the source problem:
    /// hitting-set element indices, exact-cover set indices, or the source
    /// candidates deleted.
    pub fn certificate_identities(&self, cert: &[usize]) -> Vec<Identity> {
        match (&self.source, self.kind) {
            (GadgetSource::HittingSet(hs), GadgetKind::HsCandidates) => {
                let (m, n, k) = dims(hs);
                let (c, w) = (self.aux(0), self.aux(1));
                let chosen = self.named(cert.iter().copied());
                let mut cands = chosen.clone();
                cands.extend([c.clone(), w.clone()]);
                let sub = "({c,w} + B', V), B' a hitting set";
                vec![
                    identity(sub, &cands, None, Quantity::Total(c), Relation::Eq, 6 * m * (k + 1) + 8 * n, "6m(k+1)+8n", true),
                    identity(sub, &cands, None, Quantity::Total(w), Relation::Ge, 6 * m * (k + 1) + 8 * n + 2, "6m(k+1)+8n+2", true),
                    identity(sub, &cands, None, Quantity::MaxOf(chosen), Relation::Le, 4 * m * (k + 1) + 8, "4m(k+1)+8", true),
                ]
            }
            (GadgetSource::HittingSet(hs), GadgetKind::HsDeleteConstructive) => {
                let (m, n, k) = dims(hs);
                let d = self.padded(cert, hs.k() as usize);
                let w = self.aux(0);
                let mut cands = self.named(d.iter().copied());
                cands.push(w.clone());
                let sub = "({w} + D, V), D a hitting set of size k";
                let mut out: Vec<Identity> = d
                    .iter()
                    .map(|&b| {
                        let quantity = Quantity::Total(self.candidate(b));
                        identity(sub, &cands, None, quantity, Relation::Eq, 12 * m * k + 4 * n - 2 * k + 4, "12mk+4n-2k+4", false).for_row("b")
                    })
                    .collect();
                out.push(identity(sub, &cands, None, Quantity::Total(w), Relation::Eq, 12 * m * k + 4 * n - 2 * k + 6, "12mk+4n-2k+6", false));
                out
            }
            (GadgetSource::HittingSet(hs), GadgetKind::HsDestructiveCandidatePartition) => {
                let (m, n, k) = dims(hs);
                let l = cert.len() as i128;
                let mut cands = self.named(cert.iter().copied());
                cands.push(self.aux(0));
                let sub = "({w} + D, V), D a hitting set of size l";
                cert.iter()
                    .map(|&b| {
                        let quantity = Quantity::Total(self.candidate(b));
                        identity(sub, &cands, None, quantity, Relation::Eq, 8 * (k + 1) * m + 8 * n - 4 * l + 4, "8(k+1)m+8n-4l+4", true).for_row("b")
                    })
                    .collect()
            }
            (GadgetSource::X3c(x), GadgetKind::X3cVoterPartitionTe) => {
                let k = x.k() as i128;
                let (c, w) = (self.aux(0), self.aux(1));
                let voters = self.voters_from(&self.x3c_first_part(cert));
                let all = self.election.candidates().to_vec();
                let sub = "(C, V1) with V1 the cover voters and the w-c group";
                let mut out = vec![
                    identity(sub, &all, Some(voters.clone()), Quantity::Total(c), Relation::Eq, 4 * k - 2, "4k-2", false),
                    identity(sub, &all, Some(voters.clone()), Quantity::Total(w), Relation::Eq, 4 * k - 4, "4k-4", false),
                ];
                out.extend((0..x.elements().len()).map(|b| {
                    let quantity = Quantity::Total(self.candidate(b));
                    identity(sub, &all, Some(voters.clone()), quantity, Relation::Eq, 4 * k - 4, "4k-4", false).for_row("b")
                }));
                out
            }
            _ => Vec::new(),
        }
    }

    fn x3c_first_part(&self, cover: &[usize]) -> Vec<(String, u64)> {
        let mut picks: Vec<(String, u64)> = cover.iter().map(|&i| (format!("1:S{}", i + 1), 1)).collect();
        let GadgetSource::X3c(x) = &self.source else { unreachable!() };
        if x.k() > 1 {
            picks.push(("3".to_string(), x.k() as u64 - 1));
        }
        picks
    }

    /// The actions the correctness argument prescribes for a yes source,
    /// paired with the index of the instance they apply to. Certificates are
    /// as for [`GadgetOutput::certificate_identities`].
    pub fn explicit_actions(&self, cert: &[usize]) -> Vec<(usize, Witness)> {
        match self.kind {
            GadgetKind::HsCandidates => {
                let GadgetSource::HittingSet(hs) = &self.source else { unreachable!() };
                let d = self.padded(cert, hs.k() as usize);
                let chosen = self.named(d.iter().copied());
                let deleted = self.named((0..hs.n()).filter(|e| !d.contains(e)));
                vec![
                    (0, Witness::Candidates(chosen.clone())),
                    (1, Witness::Candidates(chosen)),
                    (2, Witness::Candidates(deleted)),
                ]
            }
            GadgetKind::HsDeleteConstructive => {
                let GadgetSource::HittingSet(hs) = &self.source else { unreachable!() };
                let d = self.padded(cert, hs.k() as usize);
                vec![(0, Witness::Candidates(self.named((0..hs.n()).filter(|e| !d.contains(e)))))]
            }
            GadgetKind::RhsVoterPartitionTp => {
                let mut picks: Vec<(String, u64)> = cert.iter().map(|&b| (format!("5:b{}", b + 1), 1)).collect();
                picks.push(("2".to_string(), 1));
                vec![(0, Witness::VoterSplit(self.voters_from(&picks)))]
            }
            GadgetKind::X3cVoterPartitionTe => {
                vec![(0, Witness::VoterSplit(self.voters_from(&self.x3c_first_part(cert))))]
            }
            GadgetKind::DeletionToCandidatePartition => {
                let mut first: Vec<usize> = cert.to_vec();
                first.extend([self.element_count(), self.element_count() + 1]);
                let witness = self.partition_witness(&first);
                (0..self.instances.len()).map(|i| (i, witness.clone())).collect()
            }
            GadgetKind::HsDestructiveCandidatePartition => {
                let mut first: Vec<usize> = cert.to_vec();
                first.push(self.element_count());
                let witness = self.partition_witness(&first);
                (0..self.instances.len()).map(|i| (i, witness.clone())).collect()
            }
        }
    }

    fn partition_witness(&self, first: &[usize]) -> Witness {
        let n = self.election.candidates().len();
        Witness::CandidatePartition {
            first: self.named((0..n).filter(|i| first.contains(i))),
            second: self.named((0..n).filter(|i| !first.contains(i))),
        }
    }
}

fn dims(hs: &HittingSetInstance) -> (i128, i128, i128) {
    (hs.m() as i128, hs.n() as i128, hs.k() as i128)
}

#[allow(clippy::too_many_arguments)]
fn identity(
    subelection: &str,
    candidates: &[Candidate],
    voters: Option<Vec<u64>>,
    quantity: Quantity,
    relation: Relation,
    expected: i128,
    formula: &str,
    required: bool,
) -> Identity {
    let what = match &quantity {
        Quantity::Total(c) => c.to_string(),
        Quantity::MaxOf(_) => "max b".to_string(),
        Quantity::Margin { leader, runner, .. } => format!("{leader} - {runner} - max b"),
        Quantity::Lead(c) => format!("{c} - max other"),
    };
    Identity {
        label: format!("{what} in {subelection}"),
        row: what,
        subelection: subelection.to_string(),
        candidates: candidates.to_vec(),
        voters,
        quantity,
        relation,
        expected: Score::from_int(expected),
        formula: formula.to_string(),
        required,
    }
}

impl Identity {
    /// Generalizes the row name (for per-element rows).
    fn for_row(mut self, row: &str) -> Self {
        self.row = row.to_string();
        self
    }
}

/// Collects voter groups over a fixed column layout.
struct Builder {
    range: u32,
    columns: Vec<Candidate>,
    groups: Vec<VoterBlock>,
}

impl Builder {
    fn new(range: u32, columns: Vec<Candidate>) -> Self {
        Builder {
            range,
            columns,
            groups: Vec::new(),
        }
    }

    fn width(&self) -> usize {
        self.columns.len()
    }

    fn push(&mut self, label: impl Into<String>, count: u64, scores: Vec<u32>) {
        debug_assert_eq!(scores.len(), self.width());
        self.groups.push(VoterBlock {
            label: label.into(),
            count,
            scores,
        });
    }

    fn finish(self) -> Result<(Election, Vec<VoterBlock>), GadgetError> {
        let ballots = self
            .groups
            .iter()
            .filter(|g| g.count > 0)
            .map(|g| BallotGroup::new(g.count, g.scores.clone()))
            .collect();
        let election = Election::new(self.range, self.columns, ballots)?;
        Ok((election, self.groups))
    }
}

/// `base`, or `base_1`, `base_2`, ... avoiding `taken`.
fn fresh(base: &str, taken: &[String]) -> String {
    let mut name = base.to_string();
    let mut i = 0;
    while taken.contains(&name) {
        i += 1;
        name = format!("{base}_{i}");
    }
    name
}

/// Element columns followed by fresh auxiliary candidates.
fn layout(elements: &[String], aux: &[&str]) -> Result<Vec<Candidate>, GadgetError> {
    let mut names = elements.to_vec();
    for a in aux {
        let name = fresh(a, &names);
        names.push(name);
    }
    Ok(crate::election::candidates(&names)?)
}

fn u(x: i128) -> u64 {
    u64::try_from(x).expect("group sizes are nonnegative")
}

/// Adding/deleting candidates from Hitting Set: 2-NRV over `B + {c, w}`.
///
/// Instances: constructive add (w), destructive add (c), destructive delete
/// with limit `n - k` (c).
pub fn gadget_hs_candidates(hs: &HittingSetInstance) -> Result<GadgetOutput, GadgetError> {
    let (m, n, k) = dims(hs);
    if m < 2 {
        return Err(GadgetError::Precondition(format!("needs m >= 2, got m = {m}")));
    }
    if k >= n {
        return Err(GadgetError::Precondition(format!("needs k < n, got k = {k}, n = {n}")));
    }
    let nb = hs.n();
    let (ci, wi) = (nb, nb + 1);
    let mut b = Builder::new(2, layout(hs.elements(), &["c", "w"])?);
    let blank = vec![0; b.width()];

    let mut v = blank.clone();
    v[ci] = 2;
    b.push("1", u(2 * m * (k + 1) + 4 * n), v);
    let mut v = blank.clone();
    v[wi] = 2;
    b.push("2", u(3 * m * (k + 1) + 2 * k + 1), v);
    for e in 0..nb {
        let mut v = blank.clone();
        v[e] = 2;
        v[wi] = 1;
        b.push(format!("3:b{}", e + 1), 4, v);
    }
    for (i, s) in hs.sets().iter().enumerate() {
        let mut v = blank.clone();
        s.iter().for_each(|&e| v[e] = 2);
        v[ci] = 1;
        b.push(format!("4:S{}", i + 1), u(2 * (k + 1)), v);
    }
    let (election, groups) = b.finish()?;
    let cands = election.candidates().to_vec();
    let (c, w) = (cands[ci].clone(), cands[wi].clone());
    let elements = cands[..nb].to_vec();

    let add = |goal, who: &Candidate| {
        ControlInstance::add_candidates(System::Nrv, election.clone(), elements.clone(), who.clone(), hs.k(), goal)
    };
    let instances = vec![
        add(Goal::Constructive, &w)?,
        add(Goal::Destructive, &c)?,
        ControlInstance::delete_candidates(System::Nrv, election.clone(), c.clone(), u(n - k), Goal::Destructive)?,
    ];
    let cw = [c.clone(), w.clone()];
    let sub_cw = "({c,w}, V)";
    let sub_all = "(C, V)";
    let identities = vec![
        identity(sub_cw, &cw, None, Quantity::Total(c.clone()), Relation::Eq, 8 * m * (k + 1) + 8 * n, "8m(k+1)+8n", true),
        identity(sub_cw, &cw, None, Quantity::Total(w.clone()), Relation::Eq, 6 * m * (k + 1) + 8 * n + 4 * k + 2, "6m(k+1)+8n+4k+2", true),
        identity(sub_all, &cands, None, Quantity::Total(c), Relation::Eq, 6 * m * (k + 1) + 8 * n, "6m(k+1)+8n", true),
        identity(sub_all, &cands, None, Quantity::Total(w), Relation::Eq, 6 * m * (k + 1) + 4 * n + 4 * k + 2, "6m(k+1)+4n+4k+2", true),
        identity(sub_all, &cands, None, Quantity::MaxOf(elements), Relation::Le, 4 * m * (k + 1) + 8, "4m(k+1)+8", true),
    ];
    Ok(GadgetOutput {
        kind: GadgetKind::HsCandidates,
        source: GadgetSource::HittingSet(hs.clone()),
        election,
        groups,
        instances,
        identities,
        claim: Claim::Equivalent,
        expected_voters: u(7 * m * (k + 1) + 8 * n + 2 * k + 1),
    })
}

/// Constructive deletion of candidates from Hitting Set: 2-NRV over
/// `B + {w}`, limit `n - k`.
pub fn gadget_hs_delete_constructive(hs: &HittingSetInstance) -> Result<GadgetOutput, GadgetError> {
    let (m, n, k) = dims(hs);
    let nb = hs.n();
    let wi = nb;
    let mut b = Builder::new(2, layout(hs.elements(), &["w"])?);
    let blank = vec![0; b.width()];

    let mut v = blank.clone();
    v[..nb].fill(2);
    b.push("1", u(n + k), v);
    let mut v = blank.clone();
    v[wi] = 2;
    b.push("2", u(3 + 2 * m * k), v);
    for (i, s) in hs.sets().iter().enumerate() {
        let mut v = blank.clone();
        v[..nb].fill(1);
        s.iter().for_each(|&e| v[e] = 2);
        b.push(format!("3:S{}", i + 1), u(4 * k + 1), v);
    }
    for (i, s) in hs.sets().iter().enumerate() {
        let mut v = blank.clone();
        v[..nb].fill(2);
        s.iter().for_each(|&e| v[e] = 1);
        v[wi] = 2;
        b.push(format!("4:S{}", i + 1), u(4 * k + 1), v);
    }
    for e in 0..nb {
        let mut v = blank.clone();
        v[e] = 2;
        v[wi] = 1;
        b.push(format!("5:b{}", e + 1), u(2 * n - k), v);
    }
    let (election, groups) = b.finish()?;
    let w = election.candidates()[wi].clone();
    let instances = vec![ControlInstance::delete_candidates(
        System::Nrv,
        election.clone(),
        w,
        u(n - k),
        Goal::Constructive,
    )?];
    Ok(GadgetOutput {
        kind: GadgetKind::HsDeleteConstructive,
        source: GadgetSource::HittingSet(hs.clone()),
        election,
        groups,
        instances,
        identities: Vec::new(),
        claim: Claim::Equivalent,
        expected_voters: u(n + k + 3 + 2 * m * k + 2 * m * (4 * k + 1) + n * (2 * n - k)),
    })
}

/// Destructive partition of voters (ties promote) from Restricted Hitting
/// Set: 2-NRV over `B + {w, c}`.
pub fn gadget_rhs_voter_partition_tp(hs: &HittingSetInstance) -> Result<GadgetOutput, GadgetError> {
    let (m, n, k) = dims(hs);
    if m * (k + 1) + 3 > n - k {
        return Err(GadgetError::Precondition(format!(
            "needs m(k+1)+3 <= n-k, got {} > {}",
            m * (k + 1) + 3,
            n - k
        )));
    }
    let nb = hs.n();
    let (wi, ci) = (nb, nb + 1);
    let mut b = Builder::new(2, layout(hs.elements(), &["w", "c"])?);
    let blank = vec![0; b.width()];

    let mut v = blank.clone();
    v[ci] = 2;
    b.push("1", u(2 * m * (k + 1) + 4 * n), v);
    let mut v = blank.clone();
    v[wi] = 2;
    b.push("2", u(3 * m * (k + 1) + 2 * k), v);
    for e in 0..nb {
        let mut v = blank.clone();
        v[e] = 2;
        v[wi] = 1;
        b.push(format!("3:b{}", e + 1), 4, v);
    }
    for (i, s) in hs.sets().iter().enumerate() {
        let mut v = blank.clone();
        s.iter().for_each(|&e| v[e] = 2);
        v[ci] = 1;
        b.push(format!("4:S{}", i + 1), u(2 * (k + 1)), v);
    }
    for e in 0..nb {
        let mut v = blank.clone();
        v[e] = 2;
        b.push(format!("5:b{}", e + 1), 1, v);
    }
    let (election, groups) = b.finish()?;
    let cands = election.candidates().to_vec();
    let (w, c) = (cands[wi].clone(), cands[ci].clone());
    let elements = cands[..nb].to_vec();
    let instances = vec![ControlInstance::partition(
        System::Nrv,
        election.clone(),
        Family::PartitionVoters,
        c.clone(),
        TieModel::Promote,
        Goal::Destructive,
    )?];
    let sub = "(C, V)";
    let identities = vec![
        identity(sub, &cands, None, Quantity::Total(c.clone()), Relation::Eq, 6 * m * (k + 1) + 8 * n, "6m(k+1)+8n", true),
        identity(sub, &cands, None, Quantity::Total(w.clone()), Relation::Eq, 6 * m * (k + 1) + 4 * n + 4 * k, "6m(k+1)+4n+4k", true),
        identity(sub, &cands, None, Quantity::MaxOf(elements.clone()), Relation::Le, 4 * m * (k + 1) + 10, "4m(k+1)+10", true),
        identity(
            sub,
            &cands,
            None,
            Quantity::Margin { leader: c, runner: w, field: elements },
            Relation::Ge,
            2,
            "2",
            true,
        ),
    ];
    Ok(GadgetOutput {
        kind: GadgetKind::RhsVoterPartitionTp,
        source: GadgetSource::HittingSet(hs.clone()),
        election,
        groups,
        instances,
        identities,
        claim: Claim::SourceYesImpliesYes,
        expected_voters: u(7 * m * (k + 1) + 4 * n + 2 * k + 5 * n),
    })
}

/// Destructive partition of voters (ties eliminate) from X3C: 4-NRV over
/// `B + {c, w}`.
pub fn gadget_x3c_voter_partition_te(x3c: &X3CInstance) -> Result<GadgetOutput, GadgetError> {
    let uncovered = x3c.uncovered();
    if !uncovered.is_empty() {
        let names: Vec<&str> = uncovered.iter().map(|&e| x3c.elements()[e].as_str()).collect();
        return Err(GadgetError::Precondition(format!("elements in no set: {}", names.join(" "))));
    }
    let nb = x3c.elements().len();
    let (n, k) = (x3c.sets().len() as i128, x3c.k() as i128);
    let (ci, wi) = (nb, nb + 1);
    let mut b = Builder::new(4, layout(x3c.elements(), &["c", "w"])?);
    let blank = vec![0; b.width()];

    for (i, s) in x3c.sets().iter().enumerate() {
        let mut v = blank.clone();
        v[..nb].fill(4);
        s.iter().for_each(|&e| v[e] = 0);
        v[ci] = 2;
        b.push(format!("1:S{}", i + 1), 1, v);
    }
    let mut v = blank.clone();
    v[..nb].fill(4);
    v[ci] = 2;
    b.push("2", u(2 * n), v);
    let mut v = blank.clone();
    v[wi] = 4;
    v[ci] = 2;
    b.push("3", u(k - 1), v);
    for e in 0..nb {
        let mut v = blank.clone();
        v[..nb].fill(1);
        v[e] = 4;
        v[ci] = 1;
        b.push(format!("4:b{}", e + 1), 1, v);
    }
    let mut v = blank.clone();
    v[wi] = 4;
    b.push("5", u(2 * k + 3 * n + 1), v);
    let (election, groups) = b.finish()?;
    let cands = election.candidates().to_vec();
    let (c, w) = (cands[ci].clone(), cands[wi].clone());
    let instances = vec![ControlInstance::partition(
        System::Nrv,
        election.clone(),
        Family::PartitionVoters,
        w.clone(),
        TieModel::Eliminate,
        Goal::Destructive,
    )?];
    let cw = [c.clone(), w.clone()];
    let sub = "final round ({c,w}, V)";
    let identities = vec![
        identity(sub, &cw, None, Quantity::Total(c.clone()), Relation::Eq, 12 * n + 14 * k - 2, "12n+14k-2", false),
        identity(sub, &cw, None, Quantity::Total(c), Relation::Eq, 12 * n + 12 * k, "12n+12k", false),
        identity(sub, &cw, None, Quantity::Total(w), Relation::Eq, 12 * n + 12 * k, "12n+12k", false),
    ];
    Ok(GadgetOutput {
        kind: GadgetKind::X3cVoterPartitionTe,
        source: GadgetSource::X3c(x3c.clone()),
        election,
        groups,
        instances,
        identities,
        claim: Claim::Equivalent,
        expected_voters: u(n + 2 * n + (k - 1) + 3 * k + 2 * k + 3 * n + 1),
    })
}

/// Constructive partition and runoff partition of candidates from
/// constructive deletion: a `2r`-NRV election over `C + {a, b}`.
///
/// The deletion budget is taken as `min(limit, |C| - 1)`, the most that can
/// ever be deleted.
pub fn gadget_deletion_to_candidate_partition(
    source: &Election,
    w: &Candidate,
    limit: u64,
) -> Result<GadgetOutput, GadgetError> {
    let mc = source.candidates().len();
    if mc == 0 {
        return Err(GadgetError::EmptySource);
    }
    let w_at = source
        .index_of(w)
        .ok_or_else(|| GadgetError::MissingCandidate(w.to_string()))?;
    let deletion = ControlInstance::delete_candidates(System::Nrv, source.clone(), w.clone(), limit, Goal::Constructive)?;
    let r = source.range();
    let (m, n, ri) = (mc as i128, source.voter_count() as i128, i128::from(r));
    let k = i128::from(limit.min(mc as u64 - 1) as u32);
    let names: Vec<String> = source.candidates().iter().map(|c| c.to_string()).collect();
    let (ai, bi) = (mc, mc + 1);
    let mut b = Builder::new(2 * r, layout(&names, &["a", "b"])?);
    let blank = vec![0; b.width()];
    let top = 2 * r;

    for (g, ballot) in source.ballots().iter().enumerate() {
        let mut v = blank.clone();
        for (x, &s) in v.iter_mut().zip(ballot.scores()) {
            *x = 2 * s;
        }
        b.push(format!("0:V{}", g + 1), ballot.multiplicity(), v);
    }
    for col in 0..mc {
        let mut v = blank.clone();
        v[col] = top;
        v[ai] = r;
        b.push(format!("1:{}", names[col]), u(2 * n), v);
    }
    for col in (0..mc).filter(|&c| c != w_at) {
        let mut v = blank.clone();
        v[col] = top;
        b.push(format!("2:{}", names[col]), u(3 * n * m), v);
    }
    let mut v = blank.clone();
    v[w_at] = top;
    v[ai] = r;
    b.push("3", u(2 * n * m), v);
    let mut v = blank.clone();
    v[w_at] = top;
    b.push("4", u(n * m), v);
    let mut v = blank.clone();
    v[..mc].fill(top);
    b.push("5", u((m - k - 1) * n), v);
    let mut v = blank.clone();
    v[ai] = top;
    b.push("6", u(2 * n + 1), v);
    let mut v = blank.clone();
    v[bi] = top;
    b.push("7", u(3 * n + 3 * n * m + (m - k - 1) * n + 2), v);

    let (election, groups) = b.finish()?;
    let cands = election.candidates().to_vec();
    let (a, bb) = (cands[ai].clone(), cands[bi].clone());
    let mut instances = Vec::new();
    for family in [Family::PartitionCandidates, Family::RunoffPartitionCandidates] {
        for ties in [TieModel::Promote, TieModel::Eliminate] {
            instances.push(ControlInstance::partition(
                System::Nrv,
                election.clone(),
                family,
                w.clone(),
                ties,
                Goal::Constructive,
            )?);
        }
    }
    let sub = "(C', V')";
    let identities = vec![
        identity(
            sub,
            &cands,
            None,
            Quantity::Total(bb.clone()),
            Relation::Eq,
            6 * n * ri + 6 * n * m * ri + 2 * (m - k - 1) * n * ri + 4 * ri,
            "6nr+6nmr+2(m-k-1)nr+4r",
            false,
        ),
        identity(sub, &cands, None, Quantity::Total(a), Relation::Eq, 4 * n * m * ri + 4 * n * ri + 2 * ri, "4nmr+4nr+2r", false),
        identity(sub, &cands, None, Quantity::Lead(bb), Relation::Gt, 0, "0", false),
    ];
    let expected_voters = u(n + 2 * n * m + 3 * n * m * (m - 1) + 2 * n * m + n * m + (m - k - 1) * n + 2 * n + 1)
        + u(3 * n + 3 * n * m + (m - k - 1) * n + 2);
    Ok(GadgetOutput {
        kind: GadgetKind::DeletionToCandidatePartition,
        source: GadgetSource::Deletion(deletion),
        election,
        groups,
        instances,
        identities,
        claim: Claim::Equivalent,
        expected_voters,
    })
}

/// Destructive partition and runoff partition of candidates from Hitting
/// Set: 2-NRV over `B + {w}`, both tie models.
pub fn gadget_hs_destructive_candidate_partition(hs: &HittingSetInstance) -> Result<GadgetOutput, GadgetError> {
    let (m, n, k) = dims(hs);
    if k >= n {
        return Err(GadgetError::Precondition(format!("needs k < n, got k = {k}, n = {n}")));
    }
    let nb = hs.n();
    let wi = nb;
    let mut b = Builder::new(2, layout(hs.elements(), &["w"])?);
    let blank = vec![0; b.width()];

    for (i, s) in hs.sets().iter().enumerate() {
        let mut v = blank.clone();
        s.iter().for_each(|&e| v[e] = 2);
        v[wi] = 1;
        b.push(format!("1:S{}", i + 1), u(4 * (k + 1)), v);
    }
    for (i, s) in hs.sets().iter().enumerate() {
        let mut v = blank.clone();
        v[..nb].fill(2);
        s.iter().for_each(|&e| v[e] = 0);
        b.push(format!("2:S{}", i + 1), u(4 * (k + 1)), v);
    }
    for e in 0..nb {
        let mut v = blank.clone();
        v[..nb].fill(1);
        v[e] = 2;
        b.push(format!("3:b{}", e + 1), 4, v);
    }
    let mut v = blank.clone();
    v[wi] = 2;
    b.push("4", u(2 * (k + 1) * m + 4 * n - 2 * k + 1), v);
    let (election, groups) = b.finish()?;
    let cands = election.candidates().to_vec();
    let w = cands[wi].clone();
    let mut instances = Vec::new();
    for family in [Family::PartitionCandidates, Family::RunoffPartitionCandidates] {
        for ties in [TieModel::Promote, TieModel::Eliminate] {
            instances.push(ControlInstance::partition(
                System::Nrv,
                election.clone(),
                family,
                w.clone(),
                ties,
                Goal::Destructive,
            )?);
        }
    }
    let sub = "(C, V)";
    let mut identities = vec![identity(
        sub,
        &cands,
        None,
        Quantity::Total(w),
        Relation::Eq,
        8 * (k + 1) * m + 8 * n - 4 * k + 2,
        "8(k+1)m+8n-4k+2",
        true,
    )];
    identities.extend(cands[..nb].iter().map(|e| {
        identity(sub, &cands, None, Quantity::Total(e.clone()), Relation::Eq, 8 * (k + 1) * m + 4 * n + 4, "8(k+1)m+4n+4", true).for_row("b")
    }));
    Ok(GadgetOutput {
        kind: GadgetKind::HsDestructiveCandidatePartition,
        source: GadgetSource::HittingSet(hs.clone()),
        election,
        groups,
        instances,
        identities,
        claim: Claim::Equivalent,
        expected_voters: u(8 * (k + 1) * m + 4 * n + 2 * (k + 1) * m + 4 * n - 2 * k + 1),
    })
}

/// Builds a gadget of the given kind from a Hitting Set instance.
pub fn gadget_from_hitting_set(kind: GadgetKind, hs: &HittingSetInstance) -> Result<GadgetOutput, GadgetError> {
    match kind {
        GadgetKind::HsCandidates => gadget_hs_candidates(hs),
        GadgetKind::HsDeleteConstructive => gadget_hs_delete_constructive(hs),
        GadgetKind::RhsVoterPartitionTp => gadget_rhs_voter_partition_tp(hs),
        GadgetKind::HsDestructiveCandidatePartition => gadget_hs_destructive_candidate_partition(hs),
        other => Err(GadgetError::Precondition(format!("{other} is not built from a hitting-set instance"))),
    }
}

#[cfg(test)]
mod tests;
