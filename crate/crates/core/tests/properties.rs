use proptest::prelude::*;

use rangevote::election::{candidates, normalize_ballot};
use rangevote::{
    BallotGroup, Candidate, ControlError, ControlInstance, Election, Family, Goal, InstanceParams, Score, SolveOptions,
    System, TieModel,
};

const NAMES: [&str; 5] = ["p", "q", "r", "s", "t"];

fn ballots(width: usize, range: u32, max_groups: usize) -> impl Strategy<Value = Vec<BallotGroup>> {
    prop::collection::vec(
        (1u64..=3, prop::collection::vec(0..=range, width)).prop_map(|(m, s)| BallotGroup::new(m, s)),
        0..=max_groups,
    )
}

fn election_with(max_candidates: usize, max_range: u32, max_groups: usize) -> impl Strategy<Value = Election> {
    (1..=max_candidates, 1..=max_range).prop_flat_map(move |(n, range)| {
        ballots(n, range, max_groups)
            .prop_map(move |groups| Election::new(range, candidates(&NAMES[..n]).unwrap(), groups).unwrap())
    })
}

fn election() -> impl Strategy<Value = Election> {
    election_with(4, 4, 5)
}

/// Totals computed directly from the definition, one ballot at a time.
fn reference_totals(e: &Election, system: System) -> Vec<Score> {
    let k = e.range() as i128;
    let mut totals = vec![Score::ZERO; e.candidates().len()];
    for g in e.ballots() {
        let s: Vec<i128> = g.scores().iter().map(|&x| x as i128).collect();
        let m = g.multiplicity() as i128;
        let (lo, hi) = (*s.iter().min().unwrap(), *s.iter().max().unwrap());
        for (t, &x) in totals.iter_mut().zip(&s) {
            *t += match system {
                System::Rv => Score::from_int(m * x),
                System::Nrv if hi == lo => Score::ZERO,
                System::Nrv => Score::new(m * k * (x - lo), hi - lo),
            };
        }
    }
    totals
}

fn totals(e: &Election, system: System) -> Vec<Score> {
    e.tally(system).totals().iter().map(|(_, s)| *s).collect()
}

fn winners(e: &Election, system: System) -> Vec<Candidate> {
    e.tally(system).winners().to_vec()
}

/// A small control instance of any family over `e`, with `p` distinguished.
fn instance(e: Election, family: Family, goal: Goal, ties: TieModel, limit: u64, system: System) -> ControlInstance {
    let p = e.candidates()[0].clone();
    let mut params = InstanceParams::default();
    match family {
        Family::PartitionCandidates | Family::RunoffPartitionCandidates | Family::PartitionVoters => {
            params.tie_model = Some(ties)
        }
        _ => params.limit = Some(limit),
    }
    if family == Family::AddCandidates {
        params.spoilers = e.candidates()[1..].iter().skip(1).cloned().collect();
    }
    if family == Family::AddVoters {
        params.pool = e.ballots().iter().rev().cloned().collect();
    }
    ControlInstance::new(system, e, family, goal, p, params).unwrap()
}

fn control_case() -> impl Strategy<Value = ControlInstance> {
    (
        election_with(4, 3, 3),
        prop::sample::select(Family::ALL.to_vec()),
        prop::sample::select(vec![Goal::Constructive, Goal::Destructive]),
        prop::sample::select(vec![TieModel::Promote, TieModel::Eliminate]),
        0u64..=2,
        prop::sample::select(vec![System::Rv, System::Nrv]),
    )
        .prop_map(|(e, f, g, t, l, s)| instance(e, f, g, t, l, s))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn tallies_match_reference(e in election()) {
        prop_assert_eq!(totals(&e, System::Rv), reference_totals(&e, System::Rv));
        prop_assert_eq!(totals(&e, System::Nrv), reference_totals(&e, System::Nrv));
    }

    #[test]
    fn normalization_spans_the_range(range in 1u32..=6, raw in prop::collection::vec(0u32..=6, 1..6)) {
        let scores: Vec<u32> = raw.iter().map(|s| s % (range + 1)).collect();
        match normalize_ballot(&scores, range) {
            None => prop_assert!(scores.iter().all(|&s| s == scores[0])),
            Some(n) => {
                prop_assert_eq!(*n.iter().min().unwrap(), Score::ZERO);
                prop_assert_eq!(*n.iter().max().unwrap(), Score::from(range));
                for (i, j) in (0..scores.len()).flat_map(|i| (0..scores.len()).map(move |j| (i, j))) {
                    prop_assert_eq!(scores[i].cmp(&scores[j]), n[i].cmp(&n[j]));
                }
            }
        }
    }

    #[test]
    fn nrv_ignores_affine_ballot_changes(e in election_with(4, 2, 5), shift in 0u32..=2, factor in 1u32..=2) {
        let range = e.range() * factor + shift;
        let moved: Vec<BallotGroup> = e
            .ballots()
            .iter()
            .map(|g| BallotGroup::new(g.multiplicity(), g.scores().iter().map(|s| s * factor + shift).collect()))
            .collect();
        let moved = Election::new(range, e.candidates().to_vec(), moved).unwrap();
        let rescale = Score::new(range as i128, e.range() as i128);
        let expected: Vec<Score> = totals(&e, System::Nrv).into_iter().map(|t| t * rescale).collect();
        prop_assert_eq!(totals(&moved, System::Nrv), expected);
    }

    #[test]
    fn totals_are_linear_in_multiplicity(e in election(), t in 1u64..=4) {
        let counts: Vec<u64> = e.ballots().iter().map(|g| g.multiplicity() * t).collect();
        let bigger = e.with_counts(&counts);
        for system in [System::Rv, System::Nrv] {
            let expected: Vec<Score> = totals(&e, system).into_iter().map(|x| x * Score::from_int(t as i128)).collect();
            prop_assert_eq!(totals(&bigger, system), expected);
        }
    }

    #[test]
    fn scaling_keeps_winners(e in election(), a in prop::sample::select(vec![2u32, 3, 7])) {
        let scaled = e.scale(a);
        prop_assert_eq!(scaled.range(), e.range() * a);
        for system in [System::Rv, System::Nrv] {
            prop_assert_eq!(winners(&scaled, system), winners(&e, system));
        }
    }

    #[test]
    fn one_range_systems_agree(e in election_with(5, 1, 6)) {
        let mut approvals = vec![0u64; e.candidates().len()];
        for g in e.ballots() {
            for (a, &s) in approvals.iter_mut().zip(g.scores()) {
                *a += g.multiplicity() * s as u64;
            }
        }
        let best = approvals.iter().copied().max().unwrap_or(0);
        let approval: Vec<Candidate> = e
            .candidates()
            .iter()
            .zip(&approvals)
            .filter(|(_, &a)| a == best)
            .map(|(c, _)| c.clone())
            .collect();
        prop_assert_eq!(winners(&e, System::Rv), approval.clone());
        prop_assert_eq!(winners(&e, System::Nrv), approval);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn scaling_keeps_control_answers(inst in control_case(), a in 2u32..=3) {
        let plain = inst.solve(&SolveOptions::default()).unwrap().decision;
        prop_assert_eq!(inst.scaled(a).solve(&SolveOptions::default()).unwrap().decision, plain);
    }

    #[test]
    fn parallel_and_sequential_agree(inst in control_case()) {
        let par = inst.solve(&SolveOptions::default()).unwrap();
        let seq = inst.solve(&SolveOptions::sequential()).unwrap();
        prop_assert_eq!(&par, &seq);
        prop_assert_eq!(inst.solve(&SolveOptions::default()).unwrap(), par);
    }

    #[test]
    fn witnesses_replay(inst in control_case()) {
        let out = inst.solve(&SolveOptions::default()).unwrap();
        prop_assert_eq!(out.witness.is_some(), out.decision.is_yes());
        if let Some(w) = &out.witness {
            prop_assert!(inst.replay(w).unwrap());
        }
    }

    #[test]
    fn goals_are_complementary(inst in control_case()) {
        let flipped_goal = match inst.goal() {
            Goal::Constructive => Goal::Destructive,
            Goal::Destructive => Goal::Constructive,
        };
        let params = InstanceParams {
            tie_model: inst.tie_model(),
            limit: inst.limit(),
            spoilers: inst.spoilers().to_vec(),
            pool: inst.pool().to_vec(),
        };
        let flipped = ControlInstance::new(
            inst.system(),
            inst.base().clone(),
            inst.family(),
            flipped_goal,
            inst.distinguished().clone(),
            params,
        )
        .unwrap();
        if let Some(w) = inst.solve(&SolveOptions::default()).unwrap().witness {
            prop_assert!(!flipped.replay(&w).unwrap());
        }
    }

    #[test]
    fn budget_is_monotone(inst in control_case()) {
        let full = inst.solve(&SolveOptions::default()).unwrap();
        let exact = inst.solve(&SolveOptions::default().with_budget(full.explored)).unwrap();
        prop_assert_eq!(&exact, &full);
        prop_assert_eq!(inst.solve(&SolveOptions::default().with_budget(full.explored + 5)).unwrap(), full.clone());
        if full.explored > 1 {
            let short = inst.solve(&SolveOptions::default().with_budget(full.explored - 1));
            prop_assert!(matches!(short, Err(ControlError::BudgetExceeded { .. })), "{:?}", short);
        }
    }

    #[test]
    fn voter_splits_are_complete(e in election_with(3, 2, 3), ties in prop::sample::select(vec![TieModel::Promote, TieModel::Eliminate])) {
        // A destructive goal on a candidate nobody can beat is never met, so
        // the search has to visit every split.
        let ids = candidates(&["z", "y"]).unwrap();
        let groups: Vec<BallotGroup> = e.ballots().iter().map(|g| BallotGroup::new(g.multiplicity(), vec![2, 0])).collect();
        let e = Election::new(2, ids.clone(), groups).unwrap();
        let inst = ControlInstance::partition(System::Nrv, e.clone(), Family::PartitionVoters, ids[0].clone(), ties, Goal::Destructive).unwrap();
        let out = inst.solve(&SolveOptions::default()).unwrap();
        prop_assume!(!out.decision.is_yes());
        let expected: u64 = e.ballots().iter().map(|g| g.multiplicity() + 1).product();
        prop_assert_eq!(out.explored, expected);
    }
}
