//! Command-line front end: file formats and the `rangevote` commands.

pub mod format;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rangevote::audit::{
    audit_gadget, render_json_lines, render_text, replay_record, AuditRecord, AuditSpec, Bounds, Checks, InstanceSource,
};
use rangevote::gadgets::{
    gadget_deletion_to_candidate_partition, gadget_from_hitting_set, gadget_x3c_voter_partition_te, GadgetKind,
    GadgetOutput,
};
use rangevote::oracles::{minimum_hitting_set, solve_x3c};
use rangevote::{BallotGroup, Candidate, ControlError, ControlInstance, Family, SolveOptions, System, Witness};

use format::{parse_election, parse_problem, serialize_election, ElectionFile, FormatError, ProblemFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "rangevote", version, about = "Range Voting tallies, control solvers, and gadget audits")]
struct Cli {
    /// Worker threads for the solvers (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print per-candidate totals and the winner.
    Tally {
        file: PathBuf,
        /// Overrides the file's `system:`.
        #[arg(long)]
        system: Option<System>,
    },
    /// Decide the control instance in an election file.
    Control {
        file: PathBuf,
        /// Print the first successful action.
        #[arg(long)]
        witness: bool,
        /// Give up after this many actions.
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Build a gadget election from a source instance.
    Gadget {
        kind: GadgetKind,
        /// A Hitting Set or X3C file, or an election file with a
        /// delete-candidates instance.
        input: PathBuf,
        /// Where to write the election file; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Which of the gadget's control instances to write.
        #[arg(long, default_value_t = 0)]
        instance: usize,
    },
    /// Solve a Hitting Set or X3C file exactly.
    Oracle { file: PathBuf },
    /// Audit a gadget against the oracles.
    Verify {
        #[arg(long)]
        gadget: GadgetKind,
        /// Every instance within bounds, e.g. `n<=4,m=2..3,k<=2`.
        #[arg(long, conflicts_with = "random", required_unless_present_any = ["random", "replay"])]
        exhaustive: Option<Bounds>,
        /// Random instances within bounds.
        #[arg(long)]
        random: Option<Bounds>,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Per-solve action budget.
        #[arg(long)]
        budget: Option<u64>,
        /// Text report destination; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// JSON Lines record destination.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Re-audit the records of a JSON Lines report and compare.
        #[arg(long, conflicts_with_all = ["exhaustive", "random"])]
        replay: Option<PathBuf>,
    },
    /// Print the published control classifications.
    Table,
}

struct CliError {
    code: i32,
    message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError {
            code: EXIT_FAILURE,
            message: e.to_string(),
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

fn parse_error(path: &Path, e: FormatError) -> CliError {
    CliError::usage(format!("{}: {e}", path.display()))
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError {
        code: EXIT_FAILURE,
        message: format!("{}: {e}", path.display()),
    })
}

/// Runs the CLI on `argv` (including the program name) and returns the exit
/// status.
pub fn run_cli<O: Write, E: Write>(argv: &[String], stdout: &mut O, stderr: &mut E) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(stdout, "{text}");
                EXIT_OK
            };
        }
    };
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let result = match cli.threads {
        Some(0) => Err(CliError::usage("--threads must be at least 1")),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(cli.command, &mut out, &mut err)),
            Err(e) => Err(CliError {
                code: EXIT_FAILURE,
                message: e.to_string(),
            }),
        },
        None => dispatch(cli.command, &mut out, &mut err),
    };
    let _ = stdout.write_all(&out);
    let _ = stderr.write_all(&err);
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message);
            e.code
        }
    }
}

fn dispatch<O: Write, E: Write>(command: Command, out: &mut O, err: &mut E) -> Result<i32, CliError> {
    match command {
        Command::Tally { file, system } => tally(&file, system, out),
        Command::Control { file, witness, budget } => control(&file, witness, budget, out),
        Command::Gadget {
            kind,
            input,
            output,
            instance,
        } => gadget(kind, &input, output.as_deref(), instance, out),
        Command::Oracle { file } => oracle(&file, out, err),
        Command::Verify {
            gadget,
            exhaustive,
            random,
            trials,
            seed,
            budget,
            output,
            json,
            replay,
        } => {
            let source = match (exhaustive, random) {
                (Some(b), _) => InstanceSource::Exhaustive(b),
                (_, Some(bounds)) => InstanceSource::Random { bounds, seed, trials },
                _ => InstanceSource::Listed(Vec::new()),
            };
            let spec = AuditSpec {
                gadget,
                source,
                budget,
                checks: Checks::default(),
            };
            match replay {
                Some(path) => verify_replay(&spec, &path, out),
                None => verify(&spec, output.as_deref(), json.as_deref(), out),
            }
        }
        Command::Table => {
            out.write_all(TABLE.as_bytes())?;
            Ok(EXIT_OK)
        }
    }
}

fn tally<O: Write>(path: &Path, system: Option<System>, out: &mut O) -> Result<i32, CliError> {
    let file = parse_election(&read(path)?).map_err(|e| parse_error(path, e))?;
    let system = system.unwrap_or(file.system);
    let tally = file.registered().tally(system);
    for (c, total) in tally.totals() {
        writeln!(out, "{c}: {total}")?;
    }
    match tally.winners() {
        [w] => writeln!(out, "winner: {w}")?,
        [] => writeln!(out, "winner: none")?,
        tied => writeln!(out, "winner: none (tie: {})", join(tied))?,
    }
    Ok(EXIT_OK)
}

fn join(ids: &[Candidate]) -> String {
    if ids.is_empty() {
        return "(none)".to_string();
    }
    ids.iter().map(Candidate::as_str).collect::<Vec<_>>().join(" ")
}

fn voter_list(groups: &[BallotGroup], counts: &[u64]) -> String {
    let parts: Vec<String> = groups
        .iter()
        .zip(counts)
        .filter(|(_, &n)| n > 0)
        .map(|(g, n)| {
            let scores: Vec<String> = g.scores().iter().map(u32::to_string).collect();
            format!("{n} x ({})", scores.join(" "))
        })
        .collect();
    if parts.is_empty() {
        "(none)".to_string()
    } else {
        parts.join(", ")
    }
}

/// Witness lines for `control --witness`.
pub fn describe_witness(instance: &ControlInstance, witness: &Witness) -> Vec<String> {
    let base = instance.base();
    match witness {
        Witness::Candidates(ids) => {
            let verb = if instance.family() == Family::AddCandidates { "add" } else { "delete" };
            vec![format!("{verb}: {}", join(ids))]
        }
        Witness::VoterCounts(counts) => {
            let (verb, groups) = match instance.family() {
                Family::AddVoters => ("add", instance.pool()),
                _ => ("delete", base.ballots()),
            };
            vec![format!("{verb}: {}", voter_list(groups, counts))]
        }
        Witness::CandidatePartition { first, second } => {
            vec![format!("first: {}", join(first)), format!("second: {}", join(second))]
        }
        Witness::VoterSplit(first) => {
            let rest: Vec<u64> = base.ballots().iter().zip(first).map(|(g, n)| g.multiplicity() - n).collect();
            vec![
                format!("first: {}", voter_list(base.ballots(), first)),
                format!("second: {}", voter_list(base.ballots(), &rest)),
            ]
        }
    }
}

fn control<O: Write>(path: &Path, witness: bool, budget: Option<u64>, out: &mut O) -> Result<i32, CliError> {
    let file = parse_election(&read(path)?).map_err(|e| parse_error(path, e))?;
    let instance = file
        .instance
        .ok_or_else(|| CliError::usage(format!("{}: no `action:` section", path.display())))?;
    let options = SolveOptions {
        budget,
        ..SolveOptions::default()
    };
    match instance.solve(&options) {
        Ok(outcome) => {
            writeln!(out, "{}", outcome.decision)?;
            if witness {
                if let Some(w) = &outcome.witness {
                    for line in describe_witness(&instance, w) {
                        writeln!(out, "{line}")?;
                    }
                }
            }
            writeln!(out, "explored: {}", outcome.explored)?;
            Ok(EXIT_OK)
        }
        Err(ControlError::BudgetExceeded { explored }) => Err(CliError {
            code: EXIT_BUDGET,
            message: format!("search budget exhausted after {explored} actions"),
        }),
        Err(e) => Err(CliError::usage(e.to_string())),
    }
}

fn build_gadget(kind: GadgetKind, path: &Path) -> Result<GadgetOutput, CliError> {
    let text = read(path)?;
    let built = match kind {
        GadgetKind::DeletionToCandidatePartition => {
            let file = parse_election(&text).map_err(|e| parse_error(path, e))?;
            let inst = match &file.instance {
                Some(i) if i.family() == Family::DeleteCandidates => i,
                _ => return Err(CliError::usage(format!("{}: expected a delete-candidates instance", path.display()))),
            };
            gadget_deletion_to_candidate_partition(inst.base(), inst.distinguished(), inst.limit().unwrap_or(0))
        }
        _ => {
            let (problem, _) = parse_problem(&text).map_err(|e| parse_error(path, e))?;
            match (kind, problem) {
                (GadgetKind::X3cVoterPartitionTe, ProblemFile::X3c(x)) => gadget_x3c_voter_partition_te(&x),
                (GadgetKind::X3cVoterPartitionTe, _) => {
                    return Err(CliError::usage(format!("{}: {kind} needs an X3C file", path.display())))
                }
                (_, ProblemFile::HittingSet(hs)) => gadget_from_hitting_set(kind, &hs),
                (_, ProblemFile::X3c(_)) => {
                    return Err(CliError::usage(format!("{}: {kind} needs a Hitting Set file", path.display())))
                }
            }
        }
    };
    built.map_err(|e| CliError::usage(e.to_string()))
}

fn gadget<O: Write>(kind: GadgetKind, input: &Path, output: Option<&Path>, index: usize, out: &mut O) -> Result<i32, CliError> {
    let g = build_gadget(kind, input)?;
    let Some(instance) = g.instances.get(index) else {
        return Err(CliError::usage(format!(
            "{kind} has {} instances; --instance {index} is out of range",
            g.instances.len()
        )));
    };
    let text = serialize_election(&ElectionFile::from_instance(instance.clone()));
    match output {
        Some(path) => {
            write_file(path, &text)?;
            writeln!(out, "gadget: {kind}")?;
            writeln!(out, "candidates: {}", g.election.candidates().len())?;
            writeln!(out, "voters: {}", g.election.voter_count())?;
            for (i, inst) in g.instances.iter().enumerate() {
                let ties = inst.tie_model().map_or(String::new(), |t| format!(" {}", t.keyword()));
                let mark = if i == index { "  (written)" } else { "" };
                writeln!(out, "instance {i}: {} {}{ties}{mark}", inst.family(), inst.goal().keyword())?;
            }
        }
        None => out.write_all(text.as_bytes())?,
    }
    Ok(EXIT_OK)
}

fn oracle<O: Write, E: Write>(path: &Path, out: &mut O, err: &mut E) -> Result<i32, CliError> {
    let (problem, warnings) = parse_problem(&read(path)?).map_err(|e| parse_error(path, e))?;
    for w in warnings {
        writeln!(err, "warning: {w}")?;
    }
    match problem {
        ProblemFile::HittingSet(hs) => {
            let min = minimum_hitting_set(&hs);
            let yes = min.len() as u64 <= hs.k();
            writeln!(out, "{}", if yes { "YES" } else { "NO" })?;
            writeln!(out, "minimum hitting set: {}", hs.names(&min).join(" "))?;
            writeln!(out, "size: {} (k = {})", min.len(), hs.k())?;
        }
        ProblemFile::X3c(x) => match solve_x3c(&x) {
            Some(cover) => {
                writeln!(out, "YES")?;
                for i in cover {
                    let names: Vec<&str> = x.sets()[i].iter().map(|&e| x.elements()[e].as_str()).collect();
                    writeln!(out, "set {}: {}", i + 1, names.join(" "))?;
                }
            }
            None => writeln!(out, "NO")?,
        },
    }
    Ok(EXIT_OK)
}

fn audit_error(e: rangevote::audit::AuditError) -> CliError {
    CliError::usage(e.to_string())
}

fn verify<O: Write>(spec: &AuditSpec, output: Option<&Path>, json: Option<&Path>, out: &mut O) -> Result<i32, CliError> {
    let report = audit_gadget(spec).map_err(audit_error)?;
    let text = render_text(&report);
    match output {
        Some(path) => {
            write_file(path, &text)?;
            writeln!(
                out,
                "{} instances, agreement {}, {} counterexamples, {} over budget",
                report.records.len(),
                report.agreement.map_or("not checked", |a| if a { "yes" } else { "no" }),
                report.counterexamples.len(),
                report.budget_exceeded.len()
            )?;
        }
        None => out.write_all(text.as_bytes())?,
    }
    if let Some(path) = json {
        write_file(path, &render_json_lines(&report))?;
    }
    Ok(if report.budget_exceeded.is_empty() { EXIT_OK } else { EXIT_BUDGET })
}

fn verify_replay<O: Write>(spec: &AuditSpec, path: &Path, out: &mut O) -> Result<i32, CliError> {
    let text = read(path)?;
    let mut differing = 0;
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let record: AuditRecord = serde_json::from_str(line)
            .map_err(|e| CliError::usage(format!("{}: line {}: {e}", path.display(), i + 1)))?;
        if record.gadget != spec.gadget {
            return Err(CliError::usage(format!(
                "{}: line {}: record is for {}, not {}",
                path.display(),
                i + 1,
                record.gadget,
                spec.gadget
            )));
        }
        let again = replay_record(spec, &record).map_err(audit_error)?;
        let same = again.as_ref() == Some(&record);
        differing += usize::from(!same);
        writeln!(
            out,
            "#{} {} {}",
            record.index,
            record.status.keyword(),
            if same { "reproduced" } else { "differs" }
        )?;
    }
    Ok(if differing == 0 { EXIT_OK } else { EXIT_FAILURE })
}

/// Published classifications: I = immune, V = vulnerable (polynomial-time
/// solvable), R = resistant (NP-hard); C = constructive, D = destructive.
const TABLE: &str = "\
control                        ties  approval  SP-AV  fallback  RV    NRV
                                     C  D      C  D   C  D      C  D  C  D
adding candidates                    I  V      R  R   R  R      I  V  R  R
deleting candidates                  V  I      R  R   R  R      V  I  R  R
partition of candidates        TE    V  I      R  R   R  R      V  I  R  R
                               TP    I  I      R  R   R  R      I  I  R  R
run-off partition of cands.    TE    V  I      R  R   R  R      V  I  R  R
                               TP    I  I      R  R   R  R      I  I  R  R
adding voters                        R  V      R  V   R  V      R  V  R  V
deleting voters                      R  V      R  V   R  V      R  V  R  V
partition of voters            TE    R  V      R  V   R  R      R  V  R  R
                               TP    R  V      R  R   R  R      R  V  R  R

I = immune, V = vulnerable, R = resistant; C = constructive, D = destructive.
Note: static reference classifications from the literature, reproduced as
metadata. They are not computed by this tool; `verify` audits the
reductions behind several NRV entries on small instances.
";
