use super::*;
use crate::control::{Decision, SolveOptions};
use crate::election::candidates;

fn hs(n: usize, sets: &[&[usize]], k: u64) -> HittingSetInstance {
    HittingSetInstance::numbered(n, sets.iter().map(|s| s.iter().map(|e| e - 1).collect()).collect(), k).unwrap()
}

fn total(e: &Election, subset: &[&str], id: &str) -> Score {
    e.project(&candidates(subset).unwrap()).unwrap().tally(System::Nrv).total(id).unwrap()
}

fn decide(g: &GadgetOutput, i: usize) -> Decision {
    g.instances[i].solve(&SolveOptions::default()).unwrap().decision
}

fn assert_voter_count(g: &GadgetOutput) {
    assert_eq!(g.election.voter_count(), g.expected_voters, "{}", g.kind);
    assert_eq!(g.groups.iter().map(|b| b.count).sum::<u64>(), g.expected_voters);
}

#[test]
fn hs_candidates_preconditions() {
    assert!(matches!(gadget_hs_candidates(&hs(2, &[&[1]], 1)), Err(GadgetError::Precondition(_))));
    assert!(matches!(gadget_hs_candidates(&hs(2, &[&[1], &[2]], 2)), Err(GadgetError::Precondition(_))));
}

#[test]
fn hs_candidates_tables() {
    let g = gadget_hs_candidates(&hs(2, &[&[1], &[1, 2]], 1)).unwrap();
    assert_voter_count(&g);
    assert_eq!(total(&g.election, &["c", "w"], "c"), Score::from_int(48));
    assert_eq!(total(&g.election, &["c", "w"], "w"), Score::from_int(46));
    for check in check_score_identities(&g) {
        assert!(check.holds, "{check:?}");
    }
    for check in g.certificate_identities(&[0]).iter().map(|i| i.evaluate(&g.election)) {
        assert!(check.holds, "{check:?}");
    }
}

#[test]
fn hs_candidates_answers() {
    let no = gadget_hs_candidates(&hs(2, &[&[1], &[2]], 1)).unwrap();
    let yes = gadget_hs_candidates(&hs(2, &[&[1], &[1, 2]], 1)).unwrap();
    for i in 0..3 {
        assert_eq!(decide(&no, i), Decision::No, "instance {i}");
        assert_eq!(decide(&yes, i), Decision::Yes, "instance {i}");
    }
    for (i, w) in yes.explicit_actions(&[0]) {
        assert!(yes.instances[i].replay(&w).unwrap());
    }
}

#[test]
fn hs_candidates_avoids_name_clashes() {
    let inst = HittingSetInstance::new(&["c", "w"], &[vec!["c"], vec!["w"]], 1).unwrap();
    let g = gadget_hs_candidates(&inst).unwrap();
    let names: Vec<&str> = g.election.candidates().iter().map(Candidate::as_str).collect();
    assert_eq!(names, ["c", "w", "c_1", "w_1"]);
}

#[test]
fn hs_delete_constructive_tallies() {
    let g = gadget_hs_delete_constructive(&hs(2, &[&[1]], 1)).unwrap();
    assert_voter_count(&g);
    let e = &g.election;
    assert_eq!(total(e, &["b1", "b2", "w"], "b1"), Score::from_int(22));
    assert_eq!(total(e, &["b1", "b2", "w"], "b2"), Score::from_int(27));
    assert_eq!(total(e, &["b1", "b2", "w"], "w"), Score::from_int(26));
    assert_eq!(total(e, &["b1", "w"], "w"), Score::from_int(26));
    assert_eq!(total(e, &["b1", "w"], "b1"), Score::from_int(22));
    let checks: Vec<_> = g.certificate_identities(&[0]).iter().map(|i| i.evaluate(e)).collect();
    assert!(checks[0].holds);
    assert!(!checks[1].holds);
    assert_eq!(checks[1].computed, Score::from_int(26));

    let two = gadget_hs_delete_constructive(&hs(2, &[&[1], &[2]], 1)).unwrap();
    // No hitting set of size 1, yet w already wins before any deletion.
    assert_eq!(total(&two.election, &["b1", "w"], "w"), Score::from_int(30));
    assert_eq!(total(&two.election, &["b1", "w"], "b1"), Score::from_int(32));
    assert_eq!(total(&two.election, &["b1", "b2", "w"], "w"), Score::from_int(40));
    assert_eq!(total(&two.election, &["b1", "b2", "w"], "b1"), Score::from_int(37));
    let out = two.instances[0].solve(&SolveOptions::default()).unwrap();
    assert_eq!(out.witness, Some(Witness::Candidates(vec![])));
}

#[test]
fn rhs_restriction_and_margin() {
    assert!(matches!(
        gadget_rhs_voter_partition_tp(&hs(6, &[&[1], &[2]], 1)),
        Err(GadgetError::Precondition(_))
    ));
    let g = gadget_rhs_voter_partition_tp(&hs(6, &[&[1]], 1)).unwrap();
    assert_voter_count(&g);
    let checks = check_score_identities(&g);
    assert!(checks.iter().all(|c| c.holds), "{checks:?}");
    let margin = checks.iter().find(|c| c.label.contains(" - ")).unwrap();
    assert_eq!(margin.computed, Score::from_int(2));
    let all = ["b1", "b2", "b3", "b4", "b5", "b6", "w", "c"];
    assert_eq!(total(&g.election, &all, "c"), Score::from_int(60));
    assert_eq!(total(&g.election, &all, "w"), Score::from_int(40));
    assert_eq!(total(&g.election, &all, "b1"), Score::from_int(18));
    for (i, w) in g.explicit_actions(&[0]) {
        assert!(g.instances[i].replay(&w).unwrap());
    }
}

#[test]
fn x3c_single_triple() {
    let x = X3CInstance::numbered(1, vec![vec![0, 1, 2]]).unwrap();
    let g = gadget_x3c_voter_partition_te(&x).unwrap();
    assert_voter_count(&g);
    let checks: Vec<_> = g.certificate_identities(&[0]).iter().map(|i| i.evaluate(&g.election)).collect();
    // The lone cover voter scores only c, so normalization lifts c to 4.
    assert_eq!(checks[0].computed, Score::from_int(4));
    assert!(!checks[0].holds);
    assert!(checks[1..].iter().all(|c| c.holds && c.computed == Score::ZERO));
    // At k = 1 both final-round formulas for c coincide.
    let finals = check_score_identities(&g);
    assert!(finals.iter().all(|c| c.holds && c.computed == Score::from_int(24)));
    assert_eq!(decide(&g, 0), Decision::Yes);
    for (i, w) in g.explicit_actions(&[0]) {
        assert!(g.instances[i].replay(&w).unwrap());
    }
}

#[test]
fn x3c_final_round_tie() {
    let x = X3CInstance::numbered(2, vec![vec![0, 1, 2], vec![3, 4, 5]]).unwrap();
    let g = gadget_x3c_voter_partition_te(&x).unwrap();
    assert_voter_count(&g);
    let finals = check_score_identities(&g);
    assert_eq!(finals[0].expected, Score::from_int(50));
    assert_eq!(finals[0].computed, Score::from_int(48));
    assert!(!finals[0].holds);
    assert!(finals[1].holds && finals[2].holds);
    let cover: Vec<_> = g.certificate_identities(&[0, 1]).iter().map(|i| i.evaluate(&g.election)).collect();
    assert!(cover.iter().all(|c| c.holds), "{cover:?}");
}

#[test]
fn x3c_requires_coverage() {
    let x = X3CInstance::numbered(2, vec![vec![0, 1, 2], vec![1, 2, 3], vec![0, 1, 3]]).unwrap();
    assert!(matches!(gadget_x3c_voter_partition_te(&x), Err(GadgetError::Precondition(_))));
}

/// In `({a, b} + D, V')` the lead of `a` over `b` is `2nr(k - l) - 2r`, so
/// deleting exactly `k` candidates never eliminates `b`.
#[test]
fn deletion_gadget_single_candidate() {
    let w = Candidate::new("w").unwrap();
    let source = Election::new(2, vec![w.clone()], vec![BallotGroup::new(1, vec![2])]).unwrap();
    let g = gadget_deletion_to_candidate_partition(&source, &w, 1).unwrap();
    assert_voter_count(&g);
    let GadgetSource::Deletion(del) = &g.source else { panic!() };
    assert_eq!(del.solve(&SolveOptions::default()).unwrap().decision, Decision::Yes);
    assert_eq!(total(&g.election, &["a", "b"], "a"), Score::from_int(28));
    assert_eq!(total(&g.election, &["a", "b"], "b"), Score::from_int(32));
    for i in 0..g.instances.len() {
        assert_eq!(decide(&g, i), Decision::No);
    }
}

#[test]
fn deletion_gadget_three_candidates() {
    let ids = candidates(&["w", "x", "y"]).unwrap();
    let source = Election::new(
        2,
        ids.clone(),
        vec![BallotGroup::new(2, vec![1, 2, 0]), BallotGroup::new(1, vec![2, 0, 0])],
    )
    .unwrap();
    let g = gadget_deletion_to_candidate_partition(&source, &ids[0], 1).unwrap();
    assert_voter_count(&g);
    let GadgetSource::Deletion(del) = &g.source else { panic!() };
    let want = del.solve(&SolveOptions::default()).unwrap();
    assert_eq!(want.witness, Some(Witness::Candidates(vec![ids[1].clone()])));
    for check in check_score_identities(&g) {
        assert!(check.holds, "{check:?}");
    }
    // The prescribed partition {x, a, b} leaves b ahead of a.
    for (i, w) in g.explicit_actions(&[1]) {
        assert!(!g.instances[i].replay(&w).unwrap(), "instance {i}");
    }
    let a_b_x = ["x", "a", "b"];
    assert!(total(&g.election, &a_b_x, "b") > total(&g.election, &a_b_x, "a"));
    for i in 0..g.instances.len() {
        assert_eq!(decide(&g, i), Decision::No, "instance {i}");
    }
}

#[test]
fn hs_destructive_partition_tables() {
    let g = gadget_hs_destructive_candidate_partition(&hs(2, &[&[1]], 1)).unwrap();
    assert_voter_count(&g);
    let checks = check_score_identities(&g);
    assert_eq!(checks[0].computed, Score::from_int(30));
    assert!(checks[1..].iter().all(|c| c.computed == Score::from_int(28)));
    assert!(checks.iter().all(|c| c.holds));
    // Runoff finds ({b1}, {b2, w}) first: b1 then ties w in the final.
    for i in 0..2 {
        let out = g.instances[i].solve(&SolveOptions::default()).unwrap();
        assert_eq!(
            out.witness,
            Some(Witness::CandidatePartition {
                first: candidates(&["b1", "w"]).unwrap(),
                second: candidates(&["b2"]).unwrap(),
            }),
            "instance {i}"
        );
    }
    for i in 2..4 {
        assert_eq!(decide(&g, i), Decision::Yes);
    }
    for (i, w) in g.explicit_actions(&[0]) {
        assert!(g.instances[i].replay(&w).unwrap(), "instance {i}");
    }
    // No hitting set of size 1 exists, yet w still loses ({b1, w}, V): the
    // b1-only voters of the first group normalize w from 1 down to 0.
    let no = gadget_hs_destructive_candidate_partition(&hs(2, &[&[1], &[2]], 1)).unwrap();
    assert_eq!(total(&no.election, &["b1", "w"], "b1"), Score::from_int(48));
    assert_eq!(total(&no.election, &["b1", "w"], "w"), Score::from_int(46));
    for i in 0..4 {
        assert_eq!(decide(&no, i), Decision::Yes);
    }
}

#[test]
fn scaling_keeps_gadget_answers() {
    let g = gadget_hs_candidates(&hs(3, &[&[1, 2], &[3]], 1)).unwrap();
    for inst in &g.instances {
        let plain = inst.solve(&SolveOptions::default()).unwrap().decision;
        for a in [2, 3] {
            assert_eq!(inst.scaled(a).solve(&SolveOptions::default()).unwrap().decision, plain);
        }
    }
}
