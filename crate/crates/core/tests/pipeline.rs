use transversal::constructive::hpartition::h_partition_on;
use transversal::generators::{transitive_tournament, fig1_counterexamples, prop14_collection, random_collection, random_collection_mostly_strong};
use transversal::oracle::{exact_transversal_ham_cycle, exact_transversal_ham_path, Shape};
use transversal::pipeline::{
    cycle_precondition, exchange_step, rainbow_dhp, solve, transversal_ham_cycle, transversal_ham_path, ColorLedger,
    PipelineParams, Route, SolveMode,
};
use transversal::{RainbowPath, Ratio, SearchBudget, Status, Tournament, TournamentCollection};

/// Forces vertex 0 to beat everyone and vertex 1 to lose to everyone in every
/// tournament, so `0 => W_1` and `W_r => 1` hold for any partition of the rest.
fn with_source_and_sink(t: &TournamentCollection) -> TournamentCollection {
    let ts = t
        .tournaments()
        .iter()
        .map(|x| {
            Tournament::from_fn(t.n(), |u, v| match (u, v) {
                (0, _) => true,
                (1, _) => false,
                (_, 1) => true,
                _ => x.has_arc(u, v),
            })
        })
        .collect();
    TournamentCollection::new(t.n(), ts).unwrap()
}

#[test]
fn dhp_at_400_validates_end_to_end() {
    let n = 400;
    let t = with_source_and_sink(&random_collection(n, n - 1, 11, false).unwrap());
    let tmaj = t.majority_subtournament(None, Ratio::new(1, 2)).unwrap();
    let inner: Vec<usize> = (2..n).collect();
    let params = PipelineParams::default().with_seed(11);
    let mut errors = Vec::new();
    for ell in [16, 32, 64] {
        let part = h_partition_on(&tmaj, &inner, ell, params.gamma).unwrap();
        part.check(&tmaj, Some(&inner)).unwrap();
        match rainbow_dhp(&t, &tmaj, &part, 0, 1, &params) {
            Ok(p) => {
                assert!(p.is_hamilton(&t), "not a transversal Hamilton path");
                assert_eq!((p.first(), p.last()), (0, 1));
                assert_eq!(p.colors.len(), n - 1);
                return;
            }
            Err(e) => errors.push(format!("ell={ell}: {e}")),
        }
    }
    panic!("no block size worked: {errors:?}");
}

#[test]
fn dhp_below_fallback_uses_endpoints() {
    let n = 9;
    let t = with_source_and_sink(&random_collection(n, n - 1, 3, false).unwrap());
    let tmaj = t.majority_subtournament(None, Ratio::new(1, 2)).unwrap();
    let inner: Vec<usize> = (2..n).collect();
    let part = h_partition_on(&tmaj, &inner, 3, Ratio::new(1, 6)).unwrap();
    let p = rainbow_dhp(&t, &tmaj, &part, 0, 1, &PipelineParams::default()).unwrap();
    assert!(p.is_hamilton(&t));
    assert_eq!((p.first(), p.last()), (0, 1));
}

#[test]
fn path_at_600_is_found() {
    let t = random_collection(600, 599, 2, false).unwrap();
    let r = transversal_ham_path(&t, &PipelineParams::default()).unwrap();
    assert_eq!(r.outcome.status, Status::Found);
    assert_eq!(r.route, Route::Constructive);
    assert!(r.constructive_succeeded);
    assert!(r.outcome.path().unwrap().is_hamilton(&t));
}

#[test]
fn fig1_instances_have_nothing() {
    let (p, c) = fig1_counterexamples();
    let params = PipelineParams::default();
    assert_eq!(transversal_ham_path(&p, &params).unwrap().outcome.status, Status::NotExists);
    assert_eq!(transversal_ham_cycle(&c, &params).unwrap().outcome.status, Status::NotExists);
}

#[test]
fn prop14_reports_not_exists_and_unmet_precondition() {
    for n in 3..=10 {
        let t = prop14_collection(n).unwrap();
        assert!(!cycle_precondition(&t), "n={n}");
        let r = transversal_ham_cycle(&t, &PipelineParams::default()).unwrap();
        assert!(!r.precondition_met, "n={n}");
        assert_eq!(r.outcome.status, Status::NotExists, "n={n}");
    }
}

#[test]
fn small_paths_agree_with_oracle() {
    for params in [PipelineParams::default(), PipelineParams::default().with_fallback_n(0)] {
        for seed in 0..500 {
            let t = random_collection(6, 5, seed, false).unwrap();
            let expected = exact_transversal_ham_path(&t, None, SearchBudget::unlimited()).unwrap().status;
            let r = transversal_ham_path(&t, &params).unwrap();
            assert_eq!(r.outcome.status, expected, "seed {seed}");
            if let Some(p) = r.outcome.path() {
                assert!(p.is_hamilton(&t), "seed {seed}");
            }
        }
    }
}

#[test]
fn small_cycles_agree_with_oracle() {
    for seed in 0..300 {
        let t = random_collection_mostly_strong(7, 7, 1, seed).unwrap();
        assert!(cycle_precondition(&t));
        let expected = exact_transversal_ham_cycle(&t, SearchBudget::unlimited()).unwrap().status;
        let r = transversal_ham_cycle(&t, &PipelineParams::default()).unwrap();
        assert_eq!(r.outcome.status, expected, "seed {seed}");
        if let Some(c) = r.outcome.cycle() {
            assert!(c.is_hamilton(&t), "seed {seed}");
        }
    }
}

#[test]
fn constructive_never_claims_nonexistence() {
    let (p, c) = fig1_counterexamples();
    let params = PipelineParams::default().with_fallback_n(0);
    for (t, shape) in [(&p, Shape::Path), (&c, Shape::Cycle)] {
        let r = solve(t, shape, SolveMode::Constructive, &params).unwrap();
        assert!(!r.constructive_succeeded);
        assert_eq!(r.outcome.status, Status::BudgetExhausted);
    }
    for seed in 0..20 {
        let t = random_collection(10, 9, seed, false).unwrap();
        let r = solve(&t, Shape::Path, SolveMode::Constructive, &params).unwrap();
        assert_ne!(r.outcome.status, Status::NotExists);
    }
}

#[test]
fn cycle_at_scale_is_constructive() {
    let t = random_collection_mostly_strong(200, 200, 1, 5).unwrap();
    let r = solve(&t, Shape::Cycle, SolveMode::Constructive, &PipelineParams::default()).unwrap();
    assert!(r.constructive_succeeded, "{:?}", r.constructive_error);
    assert!(r.outcome.cycle().unwrap().is_hamilton(&t));
}

#[test]
fn trace_is_json_lines() {
    let t = random_collection(100, 99, 4, false).unwrap();
    let r = transversal_ham_path(&t, &PipelineParams::default()).unwrap();
    let text = r.trace.to_jsonl();
    assert!(!text.is_empty());
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v.get("stage").is_some());
    }
}

#[test]
fn ledger_tracks_spending() {
    let mut l = ColorLedger::new(6, &[0, 2, 4]);
    assert!(!l.is_partition());
    l.spend(2).unwrap();
    assert!(l.spend(2).is_err());
    assert!(l.spend(1).is_err());
    assert!(l.spent_disjoint_from_unspent());
    assert!(!l.all_spent());
    l.spend(0).unwrap();
    l.spend(4).unwrap();
    assert!(l.all_spent());
}

#[test]
fn exchange_grows_by_one() {
    // vertex 2 missing, colors 1 and 2 unused
    let t = TournamentCollection::repeated(&transitive_tournament(3), 3);
    let p = RainbowPath::new(vec![0, 1], vec![0]);
    let q = exchange_step(&p, &[1, 2], &t).unwrap();
    assert_eq!(q.vertices.len(), 3);
    assert!(q.valid(&t));
    assert!(exchange_step(&q, &[2], &t).is_none());
}
