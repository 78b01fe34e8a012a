use super::*;
use crate::election::{candidates, BallotGroup, Candidate, Election, System};
use crate::score::Score;

fn c(id: &str) -> Candidate {
    Candidate::new(id).unwrap()
}

fn election(range: u32, ids: &[&str], groups: &[(u64, &[u32])]) -> Election {
    Election::new(
        range,
        candidates(ids).unwrap(),
        groups.iter().map(|(m, s)| BallotGroup::new(*m, s.to_vec())).collect(),
    )
    .unwrap()
}

fn solve(instance: &ControlInstance) -> ControlOutcome {
    let seq = instance.solve(&SolveOptions::sequential()).unwrap();
    let par = instance.solve(&SolveOptions::default()).unwrap();
    assert_eq!(seq, par, "parallel search must match sequential search");
    if let Some(w) = &seq.witness {
        assert!(instance.replay(w).unwrap(), "witness must replay");
    }
    seq
}

fn names(ids: &[&str]) -> Vec<Candidate> {
    candidates(ids).unwrap()
}

#[test]
fn survivors_by_tie_model() {
    let unique = election(2, &["w", "x"], &[(2, &[2, 0])]);
    let tied = election(2, &["w", "x"], &[(1, &[2, 0]), (1, &[0, 2])]);
    assert_eq!(subelection_survivors(&unique, System::Nrv, TieModel::Eliminate), names(&["w"]));
    assert!(subelection_survivors(&tied, System::Nrv, TieModel::Eliminate).is_empty());
    assert_eq!(subelection_survivors(&tied, System::Nrv, TieModel::Promote), names(&["w", "x"]));
}

#[test]
fn add_candidates_already_winning() {
    let base = election(2, &["w", "x", "d"], &[(3, &[2, 0, 1])]);
    let inst = ControlInstance::add_candidates(System::Nrv, base, names(&["d"]), c("w"), 1, Goal::Constructive).unwrap();
    let out = solve(&inst);
    assert_eq!(out.decision, Decision::Yes);
    assert_eq!(out.witness, Some(Witness::Candidates(vec![])));
    assert_eq!(out.explored, 1);
}

#[test]
fn destructive_spoiler_example() {
    // Without d: c = 6 > w = 4. Adding d renormalizes the c-voters: c = 3, w = 4, d = 6.
    let base = election(2, &["c", "w", "d"], &[(3, &[1, 0, 2]), (2, &[0, 2, 0])]);
    let inst = ControlInstance::add_candidates(System::Nrv, base, names(&["d"]), c("c"), 1, Goal::Destructive).unwrap();
    let out = solve(&inst);
    assert_eq!(out.decision, Decision::Yes);
    assert_eq!(out.witness, Some(Witness::Candidates(names(&["d"]))));
    assert_eq!(out.explored, 2);
    let after = inst.base().tally(System::Nrv);
    assert_eq!(after.total("c"), Some(Score::from_int(3)));
    assert_eq!(after.total("w"), Some(Score::from_int(4)));
    assert_eq!(after.total("d"), Some(Score::from_int(6)));
}

#[test]
fn delete_candidates_examples() {
    let solo = election(2, &["w"], &[(1, &[2])]);
    let inst = ControlInstance::delete_candidates(System::Nrv, solo.clone(), c("w"), 1, Goal::Destructive).unwrap();
    assert_eq!(solve(&inst).decision, Decision::No);

    let inst = ControlInstance::delete_candidates(System::Nrv, solo, c("w"), 1, Goal::Constructive).unwrap();
    let out = solve(&inst);
    assert_eq!(out.decision, Decision::Yes);
    assert_eq!(out.witness, Some(Witness::Candidates(vec![])));
}

#[test]
fn add_voters_examples() {
    let base = election(1, &["a", "w"], &[(1, &[1, 0])]);
    let pool = vec![BallotGroup::new(2, vec![0, 1])];
    let one = ControlInstance::add_voters(System::Rv, base.clone(), pool.clone(), c("w"), 1, Goal::Constructive).unwrap();
    assert_eq!(solve(&one).decision, Decision::No);
    let two = ControlInstance::add_voters(System::Rv, base.clone(), pool, c("w"), 2, Goal::Constructive).unwrap();
    let out = solve(&two);
    assert_eq!(out.decision, Decision::Yes);
    assert_eq!(out.witness, Some(Witness::VoterCounts(vec![2])));

    let winning = election(1, &["a", "w"], &[(1, &[0, 1])]);
    let inst = ControlInstance::add_voters(System::Rv, winning, vec![], c("w"), 1, Goal::Constructive).unwrap();
    assert_eq!(solve(&inst).witness, Some(Witness::VoterCounts(vec![])));
}

#[test]
fn delete_voters_examples() {
    let tied = election(1, &["a", "w"], &[(1, &[1, 0]), (1, &[0, 1])]);
    let inst = ControlInstance::delete_voters(System::Rv, tied, c("w"), 1, Goal::Destructive).unwrap();
    assert_eq!(solve(&inst).witness, Some(Witness::VoterCounts(vec![0, 0])));

    let base = election(1, &["a", "w"], &[(2, &[1, 0]), (1, &[0, 1])]);
    let inst = ControlInstance::delete_voters(System::Rv, base.clone(), c("w"), 2, Goal::Constructive).unwrap();
    let out = solve(&inst);
    assert_eq!(out.decision, Decision::Yes);
    // groups sort as (0,1) then (1,0): remove both a-voters.
    assert_eq!(out.witness, Some(Witness::VoterCounts(vec![0, 2])));
    let inst = ControlInstance::delete_voters(System::Rv, base, c("w"), 1, Goal::Constructive).unwrap();
    assert_eq!(solve(&inst).decision, Decision::No);
}

#[test]
fn partition_candidates_small_cases() {
    let solo = election(2, &["w"], &[(1, &[2])]);
    for ties in [TieModel::Promote, TieModel::Eliminate] {
        for family in [Family::PartitionCandidates, Family::RunoffPartitionCandidates] {
            let d = ControlInstance::partition(System::Nrv, solo.clone(), family, c("w"), ties, Goal::Destructive).unwrap();
            assert_eq!(solve(&d).decision, Decision::No);
            let k = ControlInstance::partition(System::Nrv, solo.clone(), family, c("w"), ties, Goal::Constructive).unwrap();
            assert_eq!(solve(&k).decision, Decision::Yes);
        }
    }

    let winning = election(2, &["w", "x", "y"], &[(3, &[2, 1, 0]), (1, &[0, 2, 1])]);
    let inst = ControlInstance::partition(
        System::Nrv, winning, Family::PartitionCandidates, c("w"), TieModel::Eliminate, Goal::Constructive,
    )
    .unwrap();
    let out = solve(&inst);
    assert_eq!(
        out.witness,
        Some(Witness::CandidatePartition { first: vec![], second: names(&["w", "x", "y"]) })
    );
}

#[test]
fn runoff_with_everyone_tied() {
    // No voters: every subelection is a full tie, so under ties-eliminate
    // nobody reaches the final round unless a side has a single candidate.
    let silent = election(2, &["w", "x", "y", "z"], &[]);
    let cons = ControlInstance::partition(
        System::Nrv, silent.clone(), Family::RunoffPartitionCandidates, c("w"), TieModel::Eliminate, Goal::Constructive,
    )
    .unwrap();
    let des = ControlInstance::partition(
        System::Nrv, silent, Family::RunoffPartitionCandidates, c("w"), TieModel::Eliminate, Goal::Destructive,
    )
    .unwrap();
    // Constructive succeeds only through {w} alone against a tied side.
    let out = solve(&cons);
    assert_eq!(
        out.witness,
        Some(Witness::CandidatePartition { first: names(&["w"]), second: names(&["x", "y", "z"]) })
    );
    // The empty first part already leaves the final round empty.
    let out = solve(&des);
    assert_eq!(
        out.witness,
        Some(Witness::CandidatePartition { first: vec![], second: names(&["w", "x", "y", "z"]) })
    );
}

#[test]
fn partition_voters_small_cases() {
    let same = election(2, &["w", "x"], &[(3, &[2, 0])]);
    for ties in [TieModel::Promote, TieModel::Eliminate] {
        let inst = ControlInstance::partition(System::Nrv, same.clone(), Family::PartitionVoters, c("w"), ties, Goal::Destructive)
            .unwrap();
        let out = solve(&inst);
        assert_eq!(out.decision, Decision::No);
        assert_eq!(out.explored, 4);
    }
    let solo = election(2, &["w"], &[(2, &[1])]);
    for (goal, want) in [(Goal::Constructive, Decision::Yes), (Goal::Destructive, Decision::No)] {
        let inst = ControlInstance::partition(System::Nrv, solo.clone(), Family::PartitionVoters, c("w"), TieModel::Eliminate, goal)
            .unwrap();
        assert_eq!(solve(&inst).decision, want);
    }
}

#[test]
fn budget_is_reported_separately() {
    let base = election(2, &["w", "x", "y", "z"], &[(1, &[2, 1, 0, 0]), (1, &[0, 2, 1, 1])]);
    let inst = ControlInstance::partition(
        System::Nrv, base, Family::PartitionCandidates, c("x"), TieModel::Promote, Goal::Constructive,
    )
    .unwrap();
    let full = inst.solve(&SolveOptions::default()).unwrap();
    let tight = inst.solve(&SolveOptions::default().with_budget(full.explored.saturating_sub(1)));
    match full.decision {
        Decision::Yes if full.explored > 1 => {
            assert!(matches!(tight, Err(ControlError::BudgetExceeded { .. })))
        }
        Decision::No => assert!(matches!(tight, Err(ControlError::BudgetExceeded { .. }))),
        _ => {}
    }
}

#[test]
fn malformed_instances() {
    let base = election(2, &["w", "x"], &[(1, &[2, 0])]);
    assert_eq!(
        ControlInstance::delete_candidates(System::Nrv, base.clone(), c("q"), 1, Goal::Constructive),
        Err(ControlError::UnknownCandidate("q".into()))
    );
    assert_eq!(
        ControlInstance::add_candidates(System::Nrv, base.clone(), names(&["w"]), c("w"), 1, Goal::Constructive),
        Err(ControlError::DistinguishedIsSpoiler("w".into()))
    );
    assert!(matches!(
        ControlInstance::add_voters(System::Nrv, base.clone(), vec![BallotGroup::new(1, vec![1])], c("w"), 1, Goal::Constructive),
        Err(ControlError::Pool(_))
    ));
    assert!(matches!(
        ControlInstance::new(System::Nrv, base.clone(), Family::PartitionVoters, Goal::Constructive, c("w"), InstanceParams::default()),
        Err(ControlError::MissingField { field: "ties", .. })
    ));
    let del = ControlInstance::delete_candidates(System::Nrv, base, c("w"), 1, Goal::Constructive).unwrap();
    assert!(matches!(
        solve_add_candidates(&del, &SolveOptions::default()),
        Err(ControlError::WrongFamily { .. })
    ));
    assert!(matches!(del.replay(&Witness::VoterSplit(vec![0])), Err(ControlError::InvalidWitness(_))));
    assert!(matches!(
        del.replay(&Witness::Candidates(names(&["w"]))),
        Err(ControlError::InvalidWitness(_))
    ));
}
