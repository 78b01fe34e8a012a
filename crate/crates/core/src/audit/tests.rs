use super::*;

fn spec(gadget: GadgetKind, source: InstanceSource) -> AuditSpec {
    AuditSpec {
        gadget,
        source,
        budget: None,
        checks: Checks::default(),
    }
}

fn bounds(text: &str) -> Bounds {
    text.parse().unwrap()
}

#[test]
fn bounds_parse_and_print() {
    let b = bounds("n<=4, m=2..3,k=1");
    assert_eq!(b.get("n", (1, 9)), (1, 4));
    assert_eq!(b.get("m", (1, 9)), (2, 3));
    assert_eq!(b.get("k", (5, 9)), (1, 1));
    assert_eq!(b.get("z", (5, 9)), (5, 9));
    assert_eq!(b.to_string(), "k=1,m=2..3,n<=4");
    assert_eq!(bounds(&b.to_string()), b);
    for bad in ["n", "n<=x", "m=3..2", "n=1,n=2", "=3"] {
        assert!(bad.parse::<Bounds>().is_err(), "{bad}");
    }
}

#[test]
fn exhaustive_hs_counts() {
    // Multisets of size 2 from the 3 nonempty subsets of a 2-set: 6.
    let s = spec(GadgetKind::HsCandidates, InstanceSource::Exhaustive(bounds("n=2,m=2,k=1")));
    assert_eq!(audit_instances(&s).unwrap().len(), 6);
    assert!(audit_instances(&spec(GadgetKind::HsCandidates, InstanceSource::Exhaustive(bounds("q=1")))).is_err());
}

#[test]
fn hs_candidates_small_audit_passes() {
    let s = spec(GadgetKind::HsCandidates, InstanceSource::Exhaustive(bounds("n<=3,m<=2,k<=2")));
    let report = audit_gadget(&s).unwrap();
    assert!(!report.records.is_empty());
    assert_eq!(report.agreement, Some(true));
    assert!(report.all_passed(), "{}", render_text(&report));
    let keys: Vec<_> = report.records.iter().map(|r| (r.n, r.m, r.k, r.index)).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
}

#[test]
fn hs_destructive_counterexample_is_found() {
    let s = spec(
        GadgetKind::HsDestructiveCandidatePartition,
        InstanceSource::Exhaustive(bounds("n=2,m<=2,k=1")),
    );
    let report = audit_gadget(&s).unwrap();
    assert_eq!(report.agreement, Some(false));
    // S = B makes group 2 a blank ballot, so the w row of (C, V) fails.
    let first = report.record(report.counterexamples[0]).unwrap();
    assert_eq!(first.encoding, "B={b1,b2} S={{b1,b2}} k=1");
    assert_eq!(first.claim_holds, Some(true));
    let false_yes = report.records.iter().find(|r| r.claim_holds == Some(false)).unwrap();
    assert_eq!(false_yes.encoding, "B={b1,b2} S={{b1},{b2}} k=1");
    assert_eq!(false_yes.oracle, Some(false));
    assert!(false_yes.solver.iter().all(|a| a.decision == Some(Decision::Yes)));
    let again = replay_record(&s, false_yes).unwrap().unwrap();
    assert_eq!(&again, false_yes);
}

#[test]
fn reports_are_deterministic() {
    let s = spec(
        GadgetKind::RhsVoterPartitionTp,
        InstanceSource::Random {
            bounds: bounds("n=6..8,m=1,k=1"),
            seed: 7,
            trials: 4,
        },
    );
    let a = audit_gadget(&s).unwrap();
    let b = audit_gadget(&s).unwrap();
    assert_eq!(render_text(&a), render_text(&b));
    assert_eq!(render_json_lines(&a), render_json_lines(&b));
    assert_eq!(render_json_lines(&a).lines().count(), 4);
    assert!(a.all_passed(), "{}", render_text(&a));
}

#[test]
fn records_round_trip_through_json() {
    let s = spec(GadgetKind::X3cVoterPartitionTe, InstanceSource::Exhaustive(bounds("k=1,s=1")));
    let report = audit_gadget(&s).unwrap();
    assert_eq!(report.records.len(), 1);
    for line in render_json_lines(&report).lines() {
        let r: AuditRecord = serde_json::from_str(line).unwrap();
        assert_eq!(replay_record(&s, &r).unwrap().unwrap(), r);
    }
}

#[test]
fn precondition_failures_are_skipped() {
    let listed = vec![
        SourceInstance::HittingSet(HittingSetInstance::numbered(2, vec![vec![0], vec![1]], 2).unwrap()),
        SourceInstance::HittingSet(HittingSetInstance::numbered(2, vec![vec![0], vec![1]], 1).unwrap()),
    ];
    let report = audit_gadget(&spec(GadgetKind::HsCandidates, InstanceSource::Listed(listed))).unwrap();
    assert_eq!(report.records.len(), 1);
    assert_eq!(report.records[0].index, 1);
}

#[test]
fn mismatched_source_is_an_error() {
    let x = SourceInstance::X3c(X3CInstance::numbered(1, vec![vec![0, 1, 2]]).unwrap());
    assert!(matches!(build_gadget(GadgetKind::HsCandidates, &x), Err(AuditError::Unsupported(_))));
}

#[test]
fn budget_exhaustion_is_reported() {
    let mut s = spec(GadgetKind::HsCandidates, InstanceSource::Exhaustive(bounds("n=3,m=2,k=1")));
    s.budget = Some(1);
    let report = audit_gadget(&s).unwrap();
    assert!(!report.budget_exceeded.is_empty());
    assert!(report.records.iter().any(|r| r.status == RecordStatus::BudgetExceeded));
}

#[test]
fn deletion_audit_records_defect() {
    let s = spec(
        GadgetKind::DeletionToCandidatePartition,
        InstanceSource::Random {
            bounds: bounds("c=1..3,g=1..3,limit=1,r=2"),
            seed: 3,
            trials: 6,
        },
    );
    let report = audit_gadget(&s).unwrap();
    assert_eq!(report.records.len(), 6);
    assert!(report.records.iter().any(|r| r.oracle == Some(true) && r.claim_holds == Some(false)));
}
