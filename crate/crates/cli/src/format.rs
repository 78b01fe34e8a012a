//! Line-based text formats for elections, control instances, and source
//! problems.
//!
//! Election files:
//!
//! ```text
//! range: 2
//! system: nrv
//! candidates: a b c
//! ballots:
//! 3 | 2 1 0
//! 2 | 0 2 1
//! action: delete-candidates
//! goal: constructive
//! distinguished: b
//! limit: 1
//! ```
//!
//! `#` starts a comment. Spoiler columns are listed in `candidates:` and
//! named again in `spoilers:`; `pool:` holds the ballots of addable voters.

use std::collections::{BTreeMap, HashSet};
use std::fmt::{self, Write};

use rangevote::{
    BallotGroup, Candidate, ControlInstance, Election, Family, Goal, HittingSetInstance, InstanceParams, System,
    TieModel, X3CInstance,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormatError {
    /// 1-based line, when the problem is tied to one.
    pub line: Option<usize>,
    pub message: String,
}

impl FormatError {
    fn at(line: usize, message: impl Into<String>) -> Self {
        FormatError {
            line: Some(line),
            message: message.into(),
        }
    }

    fn general(message: impl Into<String>) -> Self {
        FormatError {
            line: None,
            message: message.into(),
        }
    }
}

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for FormatError {}

/// A parsed election file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElectionFile {
    pub system: System,
    /// All columns, spoilers included.
    pub election: Election,
    pub instance: Option<ControlInstance>,
}

impl ElectionFile {
    pub fn plain(system: System, election: Election) -> Self {
        ElectionFile {
            system,
            election,
            instance: None,
        }
    }

    pub fn from_instance(instance: ControlInstance) -> Self {
        ElectionFile {
            system: instance.system(),
            election: instance.base().clone(),
            instance: Some(instance),
        }
    }

    /// The election without unregistered spoilers.
    pub fn registered(&self) -> Election {
        match &self.instance {
            Some(inst) if !inst.spoilers().is_empty() => {
                self.election.project(&inst.registered()).expect("registered candidates exist")
            }
            _ => self.election.clone(),
        }
    }
}

/// Splits text into `(line number, content)` with comments and blank lines
/// removed.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

fn split_key(line: usize, text: &str) -> Result<(&str, &str), FormatError> {
    let (key, value) = text
        .split_once(':')
        .ok_or_else(|| FormatError::at(line, format!("expected `key: value`, found `{text}`")))?;
    Ok((key.trim(), value.trim()))
}

fn parse_int<T: std::str::FromStr>(line: usize, what: &str, text: &str) -> Result<T, FormatError> {
    text.trim()
        .parse()
        .map_err(|_| FormatError::at(line, format!("invalid {what} `{}`", text.trim())))
}

fn parse_ids(line: usize, text: &str) -> Result<Vec<Candidate>, FormatError> {
    text.split_whitespace()
        .map(|id| Candidate::new(id).map_err(|e| FormatError::at(line, e.to_string())))
        .collect()
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    Ballots,
    Pool,
}

struct RawBallot {
    line: usize,
    multiplicity: u64,
    scores: Vec<u32>,
}

fn parse_ballot(line: usize, text: &str) -> Result<RawBallot, FormatError> {
    let (mult, scores) = text.split_once('|').expect("caller checked for `|`");
    let multiplicity: u64 = parse_int(line, "multiplicity", mult)?;
    if multiplicity == 0 {
        return Err(FormatError::at(line, "ballot multiplicity must be at least 1"));
    }
    let scores = scores
        .split_whitespace()
        .map(|s| parse_int(line, "score", s))
        .collect::<Result<_, _>>()?;
    Ok(RawBallot {
        line,
        multiplicity,
        scores,
    })
}

fn check_ballots(raw: Vec<RawBallot>, range: u32, width: usize) -> Result<Vec<BallotGroup>, FormatError> {
    raw.into_iter()
        .map(|b| {
            if b.scores.len() != width {
                return Err(FormatError::at(
                    b.line,
                    format!("ballot has {} scores but there are {width} candidates", b.scores.len()),
                ));
            }
            if let Some(&s) = b.scores.iter().find(|&&s| s > range) {
                return Err(FormatError::at(b.line, format!("score {s} is outside the range [0, {range}]")));
            }
            Ok(BallotGroup::new(b.multiplicity, b.scores))
        })
        .collect()
}

const ELECTION_KEYS: [&str; 11] = [
    "range",
    "system",
    "candidates",
    "ballots",
    "action",
    "goal",
    "ties",
    "distinguished",
    "limit",
    "spoilers",
    "pool",
];

/// Parses an election file. Identical ballot lines merge.
pub fn parse_election(text: &str) -> Result<ElectionFile, FormatError> {
    let mut fields: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
    let mut section = None;
    let mut ballots = Vec::new();
    let mut pool = Vec::new();
    for (line, content) in content_lines(text) {
        if content.contains('|') {
            match section {
                Some(Section::Ballots) => ballots.push(parse_ballot(line, content)?),
                Some(Section::Pool) => pool.push(parse_ballot(line, content)?),
                None => return Err(FormatError::at(line, "ballot line outside a `ballots:` or `pool:` section")),
            }
            continue;
        }
        let (key, value) = split_key(line, content)?;
        let Some(&key) = ELECTION_KEYS.iter().find(|&&k| k == key) else {
            return Err(FormatError::at(line, format!("unknown key `{key}`")));
        };
        if let Some((first, _)) = fields.insert(key, (line, value)) {
            return Err(FormatError::at(line, format!("`{key}` already given on line {first}")));
        }
        section = match key {
            "ballots" | "pool" if !value.is_empty() => {
                return Err(FormatError::at(line, format!("`{key}:` takes no value; list ballots on following lines")))
            }
            "ballots" => Some(Section::Ballots),
            "pool" => Some(Section::Pool),
            _ => None,
        };
    }

    let require = |key: &str| fields.get(key).copied().ok_or_else(|| FormatError::general(format!("missing `{key}:` header")));
    let (range_line, range_text) = require("range")?;
    let range: u32 = parse_int(range_line, "range", range_text)?;
    if range == 0 {
        return Err(FormatError::at(range_line, "score range must be at least 1"));
    }
    let (cand_line, cand_text) = require("candidates")?;
    let ids = parse_ids(cand_line, cand_text)?;
    let mut seen = HashSet::new();
    if let Some(dup) = ids.iter().find(|c| !seen.insert(*c)) {
        return Err(FormatError::at(cand_line, format!("duplicate candidate `{dup}`")));
    }
    require("ballots")?;
    let system = match fields.get("system") {
        Some(&(line, text)) => text.parse::<System>().map_err(|e| FormatError::at(line, e))?,
        None => System::Nrv,
    };
    let groups = check_ballots(ballots, range, ids.len())?;
    let election = Election::new(range, ids, groups).map_err(|e| FormatError::general(e.to_string()))?;

    let instance_keys = ["action", "goal", "ties", "distinguished", "limit", "spoilers", "pool"];
    if !instance_keys.iter().any(|k| fields.contains_key(k)) {
        return Ok(ElectionFile::plain(system, election));
    }
    let (action_line, action) = fields
        .get("action")
        .copied()
        .ok_or_else(|| FormatError::general("instance fields given without `action:`"))?;
    let family = Family::from_keyword(action).ok_or_else(|| FormatError::at(action_line, format!("unknown action `{action}`")))?;
    let (goal_line, goal) = require("goal")?;
    let goal = Goal::from_keyword(goal).ok_or_else(|| FormatError::at(goal_line, format!("unknown goal `{goal}`")))?;
    let (dist_line, dist) = require("distinguished")?;
    let distinguished = Candidate::new(dist).map_err(|e| FormatError::at(dist_line, e.to_string()))?;
    let tie_model = match fields.get("ties") {
        Some(&(line, t)) => {
            Some(TieModel::from_keyword(t).ok_or_else(|| FormatError::at(line, format!("unknown tie model `{t}`")))?)
        }
        None => None,
    };
    let limit = match fields.get("limit") {
        Some(&(line, l)) => Some(parse_int(line, "limit", l)?),
        None => None,
    };
    let spoilers = match fields.get("spoilers") {
        Some(&(line, s)) => parse_ids(line, s)?,
        None => Vec::new(),
    };
    let pool = check_ballots(pool, range, election.candidates().len())?;
    let params = InstanceParams {
        tie_model,
        limit,
        spoilers,
        pool,
    };
    let instance = ControlInstance::new(system, election.clone(), family, goal, distinguished, params)
        .map_err(|e| FormatError::at(action_line, e.to_string()))?;
    Ok(ElectionFile {
        system,
        election,
        instance: Some(instance),
    })
}

fn write_ballots(out: &mut String, groups: &[BallotGroup]) {
    for g in groups {
        let scores: Vec<String> = g.scores().iter().map(u32::to_string).collect();
        let _ = writeln!(out, "{} | {}", g.multiplicity(), scores.join(" "));
    }
}

fn join_ids(ids: &[Candidate]) -> String {
    ids.iter().map(Candidate::as_str).collect::<Vec<_>>().join(" ")
}

/// Canonical text: headers, ballots sorted by score vector, then the
/// instance section.
pub fn serialize_election(file: &ElectionFile) -> String {
    let mut out = String::new();
    let e = &file.election;
    let _ = writeln!(out, "range: {}", e.range());
    let _ = writeln!(out, "system: {}", file.system);
    let _ = writeln!(out, "candidates: {}", join_ids(e.candidates()));
    out.push_str("ballots:\n");
    write_ballots(&mut out, e.ballots());
    if let Some(inst) = &file.instance {
        let _ = writeln!(out, "action: {}", inst.family());
        let _ = writeln!(out, "goal: {}", inst.goal().keyword());
        if let Some(t) = inst.tie_model() {
            let _ = writeln!(out, "ties: {}", t.keyword());
        }
        let _ = writeln!(out, "distinguished: {}", inst.distinguished());
        if let Some(l) = inst.limit() {
            let _ = writeln!(out, "limit: {l}");
        }
        if !inst.spoilers().is_empty() {
            let _ = writeln!(out, "spoilers: {}", join_ids(inst.spoilers()));
        }
        if inst.family() == Family::AddVoters {
            out.push_str("pool:\n");
            write_ballots(&mut out, inst.pool());
        }
    }
    out
}

/// A source-problem instance file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProblemFile {
    HittingSet(HittingSetInstance),
    X3c(X3CInstance),
}

struct RawProblem<'a> {
    kind: Option<(usize, &'a str)>,
    elements: Option<(usize, &'a str)>,
    sets: Vec<(usize, Vec<String>)>,
    k: Option<(usize, &'a str)>,
    warnings: Vec<String>,
}

fn read_problem(text: &str) -> Result<RawProblem<'_>, FormatError> {
    let mut raw = RawProblem {
        kind: None,
        elements: None,
        sets: Vec::new(),
        k: None,
        warnings: Vec::new(),
    };
    for (line, content) in content_lines(text) {
        let (key, value) = split_key(line, content)?;
        let slot = match key {
            "problem" => &mut raw.kind,
            "elements" => &mut raw.elements,
            "k" => &mut raw.k,
            "set" => {
                let mut seen = HashSet::new();
                let mut set = Vec::new();
                for e in value.split_whitespace() {
                    if seen.insert(e) {
                        set.push(e.to_string());
                    } else {
                        raw.warnings.push(format!("line {line}: duplicate element `{e}` in set collapsed"));
                    }
                }
                if set.is_empty() {
                    return Err(FormatError::at(line, "empty set"));
                }
                raw.sets.push((line, set));
                continue;
            }
            other => return Err(FormatError::at(line, format!("unknown key `{other}`"))),
        };
        if let Some((first, _)) = slot.replace((line, value)) {
            return Err(FormatError::at(line, format!("`{key}` already given on line {first}")));
        }
    }
    Ok(raw)
}

fn universe(raw: &RawProblem<'_>) -> Result<Vec<String>, FormatError> {
    let (line, text) = raw.elements.ok_or_else(|| FormatError::general("missing `elements:` header"))?;
    let elements: Vec<String> = text.split_whitespace().map(str::to_string).collect();
    let mut seen = HashSet::new();
    if let Some(dup) = elements.iter().find(|e| !seen.insert(*e)) {
        return Err(FormatError::at(line, format!("duplicate element `{dup}`")));
    }
    for (set_line, set) in &raw.sets {
        if let Some(e) = set.iter().find(|e| !seen.contains(e)) {
            return Err(FormatError::at(*set_line, format!("element `{e}` is not in the universe")));
        }
    }
    Ok(elements)
}

fn hs_from(raw: RawProblem<'_>) -> Result<(HittingSetInstance, Vec<String>), FormatError> {
    let elements = universe(&raw)?;
    let (k_line, k_text) = raw.k.ok_or_else(|| FormatError::general("missing `k:` header"))?;
    let k = parse_int(k_line, "k", k_text)?;
    let sets: Vec<Vec<String>> = raw.sets.into_iter().map(|(_, s)| s).collect();
    let hs = HittingSetInstance::new(&elements, &sets, k).map_err(|e| FormatError::general(e.to_string()))?;
    Ok((hs, raw.warnings))
}

fn x3c_from(raw: RawProblem<'_>) -> Result<(X3CInstance, Vec<String>), FormatError> {
    if let Some((line, _)) = raw.k {
        return Err(FormatError::at(line, "X3C instances take no `k:`; it is |B| / 3"));
    }
    let elements = universe(&raw)?;
    if let Some((line, set)) = raw.sets.iter().find(|(_, s)| s.len() != 3) {
        return Err(FormatError::at(*line, format!("X3C sets have 3 elements, found {}", set.len())));
    }
    let sets: Vec<Vec<String>> = raw.sets.into_iter().map(|(_, s)| s).collect();
    let x = X3CInstance::new(&elements, &sets).map_err(|e| FormatError::general(e.to_string()))?;
    Ok((x, raw.warnings))
}

fn check_kind(raw: &RawProblem<'_>, want: &str) -> Result<(), FormatError> {
    match raw.kind {
        Some((line, kind)) if kind != want => Err(FormatError::at(line, format!("expected a {want} file, found `{kind}`"))),
        _ => Ok(()),
    }
}

/// Parses a Hitting Set file; the second value lists warnings.
pub fn parse_hs_instance(text: &str) -> Result<(HittingSetInstance, Vec<String>), FormatError> {
    let raw = read_problem(text)?;
    check_kind(&raw, "hitting-set")?;
    hs_from(raw)
}

pub fn parse_x3c_instance(text: &str) -> Result<(X3CInstance, Vec<String>), FormatError> {
    let raw = read_problem(text)?;
    check_kind(&raw, "x3c")?;
    x3c_from(raw)
}

/// Parses either problem kind. Without a `problem:` header, files with `k:`
/// are Hitting Set and the rest X3C.
pub fn parse_problem(text: &str) -> Result<(ProblemFile, Vec<String>), FormatError> {
    let raw = read_problem(text)?;
    match raw.kind {
        Some((_, "hitting-set")) => hs_from(raw).map(|(h, w)| (ProblemFile::HittingSet(h), w)),
        Some((_, "x3c")) => x3c_from(raw).map(|(x, w)| (ProblemFile::X3c(x), w)),
        Some((line, other)) => Err(FormatError::at(
            line,
            format!("unknown problem `{other}` (expected hitting-set or x3c)"),
        )),
        None if raw.k.is_some() => hs_from(raw).map(|(h, w)| (ProblemFile::HittingSet(h), w)),
        None => x3c_from(raw).map(|(x, w)| (ProblemFile::X3c(x), w)),
    }
}

fn write_sets(out: &mut String, elements: &[String], sets: &[Vec<usize>]) {
    let _ = writeln!(out, "elements: {}", elements.join(" "));
    for s in sets {
        let names: Vec<&str> = s.iter().map(|&i| elements[i].as_str()).collect();
        let _ = writeln!(out, "set: {}", names.join(" "));
    }
}

pub fn serialize_problem(problem: &ProblemFile) -> String {
    let mut out = String::new();
    match problem {
        ProblemFile::HittingSet(hs) => {
            out.push_str("problem: hitting-set\n");
            write_sets(&mut out, hs.elements(), hs.sets());
            let _ = writeln!(out, "k: {}", hs.k());
        }
        ProblemFile::X3c(x) => {
            out.push_str("problem: x3c\n");
            write_sets(&mut out, x.elements(), x.sets());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rangevote::Score;

    const EXAMPLE: &str = "\
# three voters groups over three candidates
range: 2
candidates: a b c
ballots:
5 | 2 0 1
4 | 0 2 1   # second group
1 | 2 1 0
";

    #[test]
    fn parses_example() {
        let file = parse_election(EXAMPLE).unwrap();
        assert_eq!(file.system, System::Nrv);
        assert_eq!(file.election.candidates().len(), 3);
        assert_eq!(file.election.ballots().len(), 3);
        assert_eq!(file.election.voter_count(), 10);
        assert!(file.instance.is_none());
        assert_eq!(file.election.tally(System::Nrv).total("a"), Some(Score::from_int(12)));
    }

    #[test]
    fn score_out_of_range_names_line() {
        let err = parse_election("range: 2\ncandidates: a b\nballots:\n1 | 0 2\n1 | 3 0\n").unwrap_err();
        assert_eq!(err.line, Some(5));
        assert!(err.to_string().starts_with("line 5: score 3"));
    }

    #[test]
    fn reports_errors() {
        let cases = [
            ("candidates: a\nballots:\n", None),
            ("range: 1\ncandidates: a a\nballots:\n", Some(2)),
            ("range: 1\ncandidates: a\n1 | 1\n", Some(3)),
            ("range: 1\ncandidates: a b\nballots:\n1 | 1\n", Some(4)),
            ("range: 1\ncolour: red\n", Some(2)),
            ("range: 1\nrange: 2\n", Some(2)),
            ("range: 1\ncandidates: a\nballots:\n0 | 1\n", Some(4)),
            ("range: 1\ncandidates: a b\nballots:\naction: delete-candidates\ngoal: constructive\ndistinguished: z\nlimit: 1\n", Some(4)),
        ];
        for (text, line) in cases {
            let err = parse_election(text).unwrap_err();
            assert_eq!(err.line, line, "{text:?}: {err}");
        }
    }

    #[test]
    fn merges_identical_ballots() {
        let file = parse_election("range: 1\ncandidates: a b\nballots:\n1 | 1 0\n2 | 0 1\n3 | 1 0\n").unwrap();
        assert_eq!(
            file.election.ballots(),
            &[BallotGroup::new(2, vec![0, 1]), BallotGroup::new(4, vec![1, 0])]
        );
        let text = serialize_election(&file);
        assert_eq!(text, "range: 1\nsystem: nrv\ncandidates: a b\nballots:\n2 | 0 1\n4 | 1 0\n");
        assert_eq!(serialize_election(&parse_election(&text).unwrap()), text);
    }

    #[test]
    fn empty_ballots_round_trip() {
        let text = "range: 3\nsystem: rv\ncandidates: x\nballots:\n";
        let file = parse_election(text).unwrap();
        assert_eq!(file.election.voter_count(), 0);
        assert_eq!(serialize_election(&file), text);
    }

    #[test]
    fn instance_sections_round_trip() {
        let text = "\
range: 2
system: nrv
candidates: a b c d
ballots:
1 | 0 1 2 0
action: add-candidates
goal: destructive
distinguished: a
limit: 1
spoilers: d
";
        let file = parse_election(text).unwrap();
        let inst = file.instance.as_ref().unwrap();
        assert_eq!(inst.spoilers(), &[Candidate::new("d").unwrap()]);
        assert_eq!(file.registered().candidates().len(), 3);
        assert_eq!(serialize_election(&file), text);

        let pool = "\
range: 1
system: rv
candidates: a b
ballots:
1 | 0 1
action: add-voters
goal: constructive
distinguished: a
limit: 2
pool:
3 | 1 0
";
        assert_eq!(serialize_election(&parse_election(pool).unwrap()), pool);
        let partition = "range: 1\nsystem: nrv\ncandidates: a b\nballots:\naction: partition-voters\ngoal: destructive\nties: eliminate\ndistinguished: b\n";
        assert_eq!(serialize_election(&parse_election(partition).unwrap()), partition);
    }

    #[test]
    fn hitting_set_files() {
        let (hs, warnings) = parse_hs_instance("elements: b1 b2\nset: b1\nk: 1\n").unwrap();
        assert_eq!((hs.n(), hs.m(), hs.k()), (2, 1, 1));
        assert!(warnings.is_empty());
        let (hs, warnings) = parse_hs_instance("elements: b1 b2\nset: b2 b1 b2\nk: 1\n").unwrap();
        assert_eq!(hs.sets(), &[vec![0, 1]]);
        assert_eq!(warnings.len(), 1);
        assert!(parse_hs_instance("elements: b1\nset: b2\nk: 1\n").unwrap_err().line == Some(2));
        assert!(parse_hs_instance("elements: b1\nset:\nk: 1\n").is_err());
        let text = serialize_problem(&ProblemFile::HittingSet(hs));
        assert_eq!(text, "problem: hitting-set\nelements: b1 b2\nset: b1 b2\nk: 1\n");
        assert!(matches!(parse_problem(&text).unwrap().0, ProblemFile::HittingSet(_)));
    }

    #[test]
    fn x3c_files() {
        assert!(parse_x3c_instance("elements: a b c\nset: a b\n").is_err());
        let (x, _) = parse_x3c_instance("elements: a b c\nset: a b c\n").unwrap();
        assert_eq!(x.k(), 1);
        let text = serialize_problem(&ProblemFile::X3c(x));
        assert_eq!(parse_problem(&text).unwrap().0, parse_problem("elements: a b c\nset: c b a\n").unwrap().0);
        assert!(parse_hs_instance(&text).is_err());
    }
}
