//! Gadget audits: construct, solve, compare with the oracles, and check the
//! score tables.

mod generate;
mod report;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use generate::{gen_random_election, gen_random_hs, gen_random_x3c, gen_random_x3c_planted, GenerateError};
pub use report::{render_json_lines, render_text};

use crate::control::{ControlError, Decision, Family, Goal, SolveOptions, TieModel, Witness};
use crate::election::{Candidate, Election};
use crate::gadgets::{
    check_score_identities, gadget_deletion_to_candidate_partition, gadget_from_hitting_set,
    gadget_x3c_voter_partition_te, Claim, GadgetError, GadgetKind, GadgetOutput, GadgetSource, IdentityCheck,
};
use crate::oracles::{solve_hitting_set, solve_x3c};
use crate::problems::{HittingSetInstance, X3CInstance};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AuditError {
    #[error("invalid bounds `{0}`")]
    Bounds(String),
    #[error("{0}")]
    Unsupported(String),
    #[error(transparent)]
    Generate(#[from] GenerateError),
    #[error(transparent)]
    Gadget(#[from] GadgetError),
    #[error(transparent)]
    Control(#[from] ControlError),
}

/// Inclusive ranges for named parameters, written `n<=4,m=2..3,k=1`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Bounds {
    ranges: BTreeMap<String, (u64, u64)>,
}

impl Bounds {
    /// The range for `key`; `<=` bounds start at `default.0`.
    pub fn get(&self, key: &str, default: (u64, u64)) -> (u64, u64) {
        self.ranges.get(key).map_or(default, |&(lo, hi)| (if lo == u64::MAX { default.0 } else { lo }, hi))
    }

    fn check_keys(&self, allowed: &[&str]) -> Result<(), AuditError> {
        match self.ranges.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(AuditError::Bounds(format!("unknown parameter `{k}`; expected one of {}", allowed.join(", ")))),
            None => Ok(()),
        }
    }
}

impl FromStr for Bounds {
    type Err = AuditError;

    fn from_str(text: &str) -> Result<Self, AuditError> {
        let bad = || AuditError::Bounds(text.to_string());
        let num = |s: &str| s.trim().parse::<u64>().map_err(|_| bad());
        let mut ranges = BTreeMap::new();
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, range) = if let Some((key, hi)) = part.split_once("<=") {
                (key, (u64::MAX, num(hi)?))
            } else if let Some((key, value)) = part.split_once('=') {
                match value.split_once("..") {
                    Some((lo, hi)) => (key, (num(lo)?, num(hi)?)),
                    None => {
                        let v = num(value)?;
                        (key, (v, v))
                    }
                }
            } else {
                return Err(bad());
            };
            let key = key.trim();
            if key.is_empty() || (range.0 != u64::MAX && range.0 > range.1) {
                return Err(bad());
            }
            if ranges.insert(key.to_string(), range).is_some() {
                return Err(bad());
            }
        }
        Ok(Bounds { ranges })
    }
}

impl fmt::Display for Bounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .ranges
            .iter()
            .map(|(k, &(lo, hi))| match lo {
                u64::MAX => format!("{k}<={hi}"),
                lo if lo == hi => format!("{k}={lo}"),
                lo => format!("{k}={lo}..{hi}"),
            })
            .collect();
        f.write_str(&parts.join(","))
    }
}

/// A source-problem instance as stored in audit records.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "problem", rename_all = "kebab-case")]
pub enum SourceInstance {
    HittingSet(HittingSetInstance),
    X3c(X3CInstance),
    Deletion {
        election: Election,
        distinguished: Candidate,
        limit: u64,
    },
}

impl SourceInstance {
    /// `(n, m, k)` used to order records: for Hitting Set the usual sizes,
    /// for X3C `(|B|, |S|, k)`, for deletion `(|C|, groups, limit)`.
    pub fn dims(&self) -> (u64, u64, u64) {
        match self {
            SourceInstance::HittingSet(hs) => (hs.n() as u64, hs.m() as u64, hs.k()),
            SourceInstance::X3c(x) => (x.elements().len() as u64, x.sets().len() as u64, x.k() as u64),
            SourceInstance::Deletion { election, limit, .. } => (
                election.candidates().len() as u64,
                election.ballots().len() as u64,
                *limit,
            ),
        }
    }

    pub fn encoding(&self) -> String {
        match self {
            SourceInstance::HittingSet(hs) => hs.to_string(),
            SourceInstance::X3c(x) => x.to_string(),
            SourceInstance::Deletion {
                election,
                distinguished,
                limit,
            } => {
                let ballots: Vec<String> = election
                    .ballots()
                    .iter()
                    .map(|g| format!("{}x({})", g.multiplicity(), g.scores().iter().join(",")))
                    .collect();
                format!(
                    "range={} C={{{}}} V={{{}}} w={distinguished} limit={limit}",
                    election.range(),
                    election.candidates().iter().join(","),
                    ballots.join(",")
                )
            }
        }
    }
}

/// Builds the gadget of `kind` from a source instance.
pub fn build_gadget(kind: GadgetKind, source: &SourceInstance) -> Result<GadgetOutput, AuditError> {
    let mismatch = || AuditError::Unsupported(format!("{kind} cannot be built from this instance"));
    Ok(match (kind, source) {
        (GadgetKind::X3cVoterPartitionTe, SourceInstance::X3c(x)) => gadget_x3c_voter_partition_te(x)?,
        (GadgetKind::DeletionToCandidatePartition, SourceInstance::Deletion { election, distinguished, limit }) => {
            gadget_deletion_to_candidate_partition(election, distinguished, *limit)?
        }
        (GadgetKind::X3cVoterPartitionTe | GadgetKind::DeletionToCandidatePartition, _) => return Err(mismatch()),
        (kind, SourceInstance::HittingSet(hs)) => gadget_from_hitting_set(kind, hs)?,
        _ => return Err(mismatch()),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InstanceSource {
    /// Every instance within the bounds, in canonical order.
    Exhaustive(Bounds),
    /// `trials` instances with parameters drawn uniformly within the bounds.
    Random { bounds: Bounds, seed: u64, trials: usize },
    Listed(Vec<SourceInstance>),
}

impl fmt::Display for InstanceSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InstanceSource::Exhaustive(b) => write!(f, "exhaustive {b}"),
            InstanceSource::Random { bounds, seed, trials } => write!(f, "random {bounds} seed={seed} trials={trials}"),
            InstanceSource::Listed(list) => write!(f, "listed {}", list.len()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checks {
    /// Solve every emitted instance and compare with the source answer.
    pub equivalence: bool,
    /// Evaluate the score tables.
    pub identities: bool,
    /// Replay the explicit actions built from the source certificate.
    pub replay: bool,
}

impl Default for Checks {
    fn default() -> Self {
        Checks {
            equivalence: true,
            identities: true,
            replay: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditSpec {
    pub gadget: GadgetKind,
    pub source: InstanceSource,
    /// Per-solve action budget.
    pub budget: Option<u64>,
    pub checks: Checks,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverAnswer {
    pub instance: usize,
    pub family: Family,
    pub goal: Goal,
    pub ties: Option<TieModel>,
    /// `None` when the budget ran out.
    pub decision: Option<Decision>,
    pub explored: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayCheck {
    pub instance: usize,
    pub witness: Witness,
    pub achieved: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RecordStatus {
    Ok,
    Counterexample,
    BudgetExceeded,
}

impl RecordStatus {
    pub fn keyword(self) -> &'static str {
        match self {
            RecordStatus::Ok => "ok",
            RecordStatus::Counterexample => "counterexample",
            RecordStatus::BudgetExceeded => "budget-exceeded",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditRecord {
    pub gadget: GadgetKind,
    /// Position in the audit's enumeration.
    pub index: u64,
    pub n: u64,
    pub m: u64,
    pub k: u64,
    pub encoding: String,
    pub instance: SourceInstance,
    /// `None` when the source answer itself needed a search that ran out of
    /// budget.
    pub oracle: Option<bool>,
    pub certificate: Option<Vec<usize>>,
    pub solver: Vec<SolverAnswer>,
    pub claim_holds: Option<bool>,
    pub identities: Vec<IdentityCheck>,
    pub replays: Vec<ReplayCheck>,
    pub failures: Vec<String>,
    pub status: RecordStatus,
}

/// How often one table row held across the audit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormulaTally {
    pub row: String,
    pub held: u64,
    pub failed: u64,
    pub required: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditReport {
    pub spec: AuditSpec,
    /// Ordered by `(n, m, k, index)`.
    pub records: Vec<AuditRecord>,
    /// Whether solver and source answers agreed on every instance that
    /// finished; `None` when equivalence was not checked.
    pub agreement: Option<bool>,
    /// Indices of records with any failed check, in record order; the first
    /// is the minimal counterexample.
    pub counterexamples: Vec<u64>,
    pub budget_exceeded: Vec<u64>,
    pub formulas: Vec<FormulaTally>,
}

impl AuditReport {
    pub fn record(&self, index: u64) -> Option<&AuditRecord> {
        self.records.iter().find(|r| r.index == index)
    }

    /// No counterexamples and no unfinished instances.
    pub fn all_passed(&self) -> bool {
        self.counterexamples.is_empty() && self.budget_exceeded.is_empty()
    }
}

/// A source answer with its certificate, if any.
type SourceAnswer = (bool, Option<Vec<usize>>);

/// `None` when finding the source answer ran out of budget.
fn source_answer(gadget: &GadgetOutput, options: &SolveOptions) -> Result<Option<SourceAnswer>, AuditError> {
    Ok(Some(match &gadget.source {
        GadgetSource::HittingSet(hs) => {
            let cert = solve_hitting_set(hs);
            (cert.is_some(), cert)
        }
        GadgetSource::X3c(x) => {
            let cert = solve_x3c(x);
            (cert.is_some(), cert)
        }
        GadgetSource::Deletion(del) => match del.solve(options) {
            Ok(out) => {
                let cert = out.witness.map(|w| match w {
                    Witness::Candidates(deleted) => deleted
                        .iter()
                        .map(|c| del.base().index_of(c).expect("witness names source candidates"))
                        .collect(),
                    other => unreachable!("deletion witnesses are candidate lists, got {other:?}"),
                });
                (out.decision.is_yes(), cert)
            }
            Err(ControlError::BudgetExceeded { .. }) => return Ok(None),
            Err(e) => return Err(e.into()),
        },
    }))
}

/// Audits one source instance. Returns `None` when the instance violates
/// the gadget's preconditions.
pub fn audit_instance(spec: &AuditSpec, index: u64, source: &SourceInstance) -> Result<Option<AuditRecord>, AuditError> {
    let gadget = match build_gadget(spec.gadget, source) {
        Ok(g) => g,
        Err(AuditError::Gadget(GadgetError::Precondition(_))) => return Ok(None),
        Err(e) => return Err(e),
    };
    let options = SolveOptions {
        budget: spec.budget,
        parallel: true,
    };
    let answer = source_answer(&gadget, &options)?;
    let (oracle, certificate) = match answer {
        Some((yes, cert)) => (Some(yes), cert),
        None => (None, None),
    };
    let mut failures = Vec::new();
    let mut out_of_budget = oracle.is_none();

    let mut solver = Vec::new();
    if spec.checks.equivalence {
        for (i, inst) in gadget.instances.iter().enumerate() {
            let (decision, explored) = match inst.solve(&options) {
                Ok(out) => (Some(out.decision), out.explored),
                Err(ControlError::BudgetExceeded { explored }) => (None, explored),
                Err(e) => return Err(e.into()),
            };
            out_of_budget |= decision.is_none();
            solver.push(SolverAnswer {
                instance: i,
                family: inst.family(),
                goal: inst.goal(),
                ties: inst.tie_model(),
                decision,
                explored,
            });
        }
    }
    let claim_holds = match (spec.checks.equivalence, oracle) {
        (true, Some(yes)) if !out_of_budget => {
            let mut holds = true;
            for s in &solver {
                let got = s.decision.expect("finished").is_yes();
                let ok = match gadget.claim {
                    Claim::Equivalent => got == yes,
                    Claim::SourceYesImpliesYes => !yes || got,
                };
                if !ok {
                    holds = false;
                    failures.push(format!(
                        "instance {} ({} {}{}): solver {}, source {}",
                        s.instance,
                        s.family,
                        s.goal.keyword(),
                        s.ties.map_or(String::new(), |t| format!(" {}", t.keyword())),
                        if got { "yes" } else { "no" },
                        if yes { "yes" } else { "no" },
                    ));
                }
            }
            Some(holds)
        }
        _ => None,
    };

    let mut identities = Vec::new();
    if spec.checks.identities {
        identities = check_score_identities(&gadget);
        if let Some(cert) = &certificate {
            identities.extend(gadget.certificate_identities(cert).iter().map(|i| i.evaluate(&gadget.election)));
        }
        for c in identities.iter().filter(|c| c.required && !c.holds) {
            failures.push(format!(
                "identity {} {} {}: computed {}, expected {}",
                c.label,
                c.relation.symbol(),
                c.formula,
                c.computed,
                c.expected
            ));
        }
    }

    let mut replays = Vec::new();
    if spec.checks.replay {
        if let Some(cert) = &certificate {
            for (i, witness) in gadget.explicit_actions(cert) {
                let achieved = gadget.instances[i].replay(&witness)?;
                if !achieved {
                    failures.push(format!("explicit action on instance {i} does not achieve the goal"));
                }
                replays.push(ReplayCheck {
                    instance: i,
                    witness,
                    achieved,
                });
            }
        }
    }

    let status = if out_of_budget {
        RecordStatus::BudgetExceeded
    } else if failures.is_empty() {
        RecordStatus::Ok
    } else {
        RecordStatus::Counterexample
    };
    let (n, m, k) = source.dims();
    Ok(Some(AuditRecord {
        gadget: spec.gadget,
        index,
        n,
        m,
        k,
        encoding: source.encoding(),
        instance: source.clone(),
        oracle,
        certificate,
        solver,
        claim_holds,
        identities,
        replays,
        failures,
        status,
    }))
}

/// Re-audits a record's instance under `spec`; a faithful record replays to
/// itself.
pub fn replay_record(spec: &AuditSpec, record: &AuditRecord) -> Result<Option<AuditRecord>, AuditError> {
    audit_instance(spec, record.index, &record.instance)
}

fn range_of(bounds: &Bounds, key: &str, default: (u64, u64)) -> std::ops::RangeInclusive<u64> {
    let (lo, hi) = bounds.get(key, default);
    lo..=hi
}

fn hs_bounds(bounds: &Bounds) -> Result<[std::ops::RangeInclusive<u64>; 3], AuditError> {
    bounds.check_keys(&["n", "m", "k"])?;
    let n = range_of(bounds, "n", (1, 4));
    if *n.end() > 12 || *n.start() == 0 {
        return Err(AuditError::Bounds(format!("n must lie in 1..=12, got {bounds}")));
    }
    Ok([n, range_of(bounds, "m", (1, 2)), range_of(bounds, "k", (1, 1))])
}

fn x3c_bounds(bounds: &Bounds) -> Result<[std::ops::RangeInclusive<u64>; 2], AuditError> {
    bounds.check_keys(&["k", "s"])?;
    let k = range_of(bounds, "k", (1, 1));
    if *k.start() == 0 || *k.end() > 3 {
        return Err(AuditError::Bounds(format!("k must lie in 1..=3, got {bounds}")));
    }
    Ok([k, range_of(bounds, "s", (1, 3))])
}

/// Every multiset of `m` nonempty subsets of an `n`-element universe.
fn all_hitting_sets(bounds: &Bounds) -> Result<Vec<SourceInstance>, AuditError> {
    let [ns, ms, ks] = hs_bounds(bounds)?;
    let mut out = Vec::new();
    for n in ns {
        for m in ms.clone().filter(|&m| m > 0) {
            for k in ks.clone().filter(|&k| k >= 1 && k <= n) {
                for family in (1u64..1 << n).combinations_with_replacement(m as usize) {
                    let sets = family
                        .iter()
                        .map(|mask| (0..n as usize).filter(|i| mask >> i & 1 == 1).collect())
                        .collect();
                    let hs = HittingSetInstance::numbered(n as usize, sets, k).expect("enumerated instances are valid");
                    out.push(SourceInstance::HittingSet(hs));
                }
            }
        }
    }
    Ok(out)
}

/// Every multiset of `s` triples over a `3k`-element universe.
fn all_x3c(bounds: &Bounds) -> Result<Vec<SourceInstance>, AuditError> {
    let [ks, ss] = x3c_bounds(bounds)?;
    let mut out = Vec::new();
    for k in ks {
        let triples: Vec<Vec<usize>> = (0..3 * k as usize).combinations(3).collect();
        for s in ss.clone().filter(|&s| s >= k) {
            for family in (0..triples.len()).combinations_with_replacement(s as usize) {
                let sets = family.iter().map(|&t| triples[t].clone()).collect();
                let x = X3CInstance::numbered(k as usize, sets).expect("enumerated instances are valid");
                out.push(SourceInstance::X3c(x));
            }
        }
    }
    Ok(out)
}

fn pick(rng: &mut ChaCha8Rng, range: &std::ops::RangeInclusive<u64>) -> u64 {
    rng.random_range(range.clone())
}

const DRAW_ATTEMPTS: usize = 10_000;

fn random_instances(kind: GadgetKind, bounds: &Bounds, seed: u64, trials: usize) -> Result<Vec<SourceInstance>, AuditError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(trials);
    for _ in 0..trials {
        let mut drawn = None;
        for _ in 0..DRAW_ATTEMPTS {
            let candidate = match kind {
                GadgetKind::X3cVoterPartitionTe => {
                    let [ks, ss] = x3c_bounds(bounds)?;
                    let k = pick(&mut rng, &ks) as usize;
                    let s = pick(&mut rng, &ss) as usize;
                    let sub = rng.next_u64();
                    match gen_random_x3c(k, s, sub) {
                        Ok((x, _)) => SourceInstance::X3c(x),
                        Err(_) => continue,
                    }
                }
                GadgetKind::DeletionToCandidatePartition => {
                    bounds.check_keys(&["c", "g", "limit", "r"])?;
                    let c = pick(&mut rng, &range_of(bounds, "c", (1, 4))) as usize;
                    let g = pick(&mut rng, &range_of(bounds, "g", (1, 4))) as usize;
                    let limit = pick(&mut rng, &range_of(bounds, "limit", (1, 2)));
                    let r = pick(&mut rng, &range_of(bounds, "r", (2, 2))) as u32;
                    let sub = rng.next_u64();
                    let Ok(election) = gen_random_election(c, g, r, sub) else { continue };
                    let distinguished = election.candidates()[rng.random_range(0..c)].clone();
                    SourceInstance::Deletion {
                        election,
                        distinguished,
                        limit,
                    }
                }
                _ => {
                    let [ns, ms, ks] = hs_bounds(bounds)?;
                    let n = pick(&mut rng, &ns) as usize;
                    let m = pick(&mut rng, &ms) as usize;
                    let k = pick(&mut rng, &ks);
                    let sub = rng.next_u64();
                    let restricted = kind == GadgetKind::RhsVoterPartitionTp;
                    match gen_random_hs(n, m, k, sub, restricted) {
                        Ok(hs) => SourceInstance::HittingSet(hs),
                        Err(_) => continue,
                    }
                }
            };
            match build_gadget(kind, &candidate) {
                Ok(_) => {
                    drawn = Some(candidate);
                    break;
                }
                Err(AuditError::Gadget(GadgetError::Precondition(_))) => continue,
                Err(e) => return Err(e),
            }
        }
        out.push(drawn.ok_or_else(|| {
            AuditError::Bounds(format!("no instance within {bounds} satisfies the {kind} preconditions"))
        })?);
    }
    Ok(out)
}

/// The instances an audit visits, in enumeration order (before filtering
/// by gadget preconditions).
pub fn audit_instances(spec: &AuditSpec) -> Result<Vec<SourceInstance>, AuditError> {
    match &spec.source {
        InstanceSource::Listed(list) => Ok(list.clone()),
        InstanceSource::Exhaustive(bounds) => match spec.gadget {
            GadgetKind::X3cVoterPartitionTe => all_x3c(bounds),
            GadgetKind::DeletionToCandidatePartition => Err(AuditError::Unsupported(
                "deletion sources are audited in random or listed mode".to_string(),
            )),
            _ => all_hitting_sets(bounds),
        },
        InstanceSource::Random { bounds, seed, trials } => random_instances(spec.gadget, bounds, *seed, *trials),
    }
}

/// Runs an audit. Instances are processed in parallel; the report is a pure
/// function of the spec.
pub fn audit_gadget(spec: &AuditSpec) -> Result<AuditReport, AuditError> {
    let instances = audit_instances(spec)?;
    let mut records: Vec<AuditRecord> = instances
        .par_iter()
        .enumerate()
        .map(|(i, source)| audit_instance(spec, i as u64, source))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .flatten()
        .collect();
    records.sort_by_key(|r| (r.n, r.m, r.k, r.index));

    let agreement = spec.checks.equivalence.then(|| {
        records
            .iter()
            .filter(|r| r.status != RecordStatus::BudgetExceeded)
            .all(|r| r.claim_holds == Some(true))
    });
    let with_status = |s: RecordStatus| records.iter().filter(|r| r.status == s).map(|r| r.index).collect();
    let counterexamples = with_status(RecordStatus::Counterexample);
    let budget_exceeded = with_status(RecordStatus::BudgetExceeded);

    let mut tallies: BTreeMap<String, FormulaTally> = BTreeMap::new();
    for c in records.iter().flat_map(|r| &r.identities) {
        let row = format!("{} {} {} in {}", c.row, c.relation.symbol(), c.formula, c.subelection);
        let t = tallies.entry(row.clone()).or_insert(FormulaTally {
            row,
            held: 0,
            failed: 0,
            required: c.required,
        });
        if c.holds {
            t.held += 1;
        } else {
            t.failed += 1;
        }
    }
    Ok(AuditReport {
        spec: spec.clone(),
        records,
        agreement,
        counterexamples,
        budget_exceeded,
        formulas: tallies.into_values().collect(),
    })
}

#[cfg(test)]
mod tests;
