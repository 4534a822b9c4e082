use itertools::Itertools;
use transversal::harness::enumerate::{collection_count, collection_from_index, tournament_code, tournament_from_code};
use transversal::harness::{bench, replay, run_suite, BenchKind, BenchSpec, InstanceRecord, Mode, SuiteKind, SuiteReport, SuiteSpec, Verdict};
use transversal::TournamentCollection;

/// Whether some vertex order admits distinct colors on its arcs, by brute force.
fn has_transversal_path(t: &TournamentCollection) -> bool {
    let n = t.n();
    (0..n).permutations(n).any(|order| {
        let arcs: Vec<(usize, usize)> = order.windows(2).map(|w| (w[0], w[1])).collect();
        (0..t.m())
            .permutations(arcs.len())
            .any(|cs| arcs.iter().zip(&cs).all(|(&(u, v), &c)| t.tournament(c).has_arc(u, v)))
    })
}

fn exhaustive(kind: SuiteKind, n: usize) -> SuiteReport {
    run_suite(&SuiteSpec::new(kind, n, n, Mode::Exhaustive, 0)).unwrap()
}

#[test]
fn path_counterexamples_match_brute_force() {
    for n in [3, 4] {
        let m = n - 1;
        let total = collection_count(n, m).unwrap();
        let expected = (0..total)
            .filter(|&i| !has_transversal_path(&collection_from_index(n, m, i).unwrap()))
            .count() as u64;
        let r = exhaustive(SuiteKind::TheoremPath, n);
        assert_eq!(r.instances, total);
        assert_eq!(r.stat(n, "counterexamples"), expected, "n={n}");
        assert!(r.exhausted.is_empty());
        if n == 3 {
            assert!(expected > 0);
        }
    }
}

#[test]
fn enumeration_is_a_bijection() {
    assert_eq!(collection_count(3, 2), Some(64));
    assert_eq!(collection_count(4, 3), Some(262_144));
    for code in 0..64 {
        assert_eq!(tournament_code(&tournament_from_code(4, code).unwrap()), code);
    }
    let all: Vec<String> = (0..64).map(|i| collection_from_index(3, 2, i).unwrap().to_json()).collect();
    assert!(all.iter().all_unique());
}

#[test]
fn cycle_suite_counts_prop14() {
    let r = run_suite(&SuiteSpec::new(SuiteKind::Prop14, 3, 10, Mode::Random, 1)).unwrap();
    assert!(r.passed());
    assert_eq!(r.instances, 8);
    assert_eq!(r.stat_total("counterexamples"), 8);
}

#[test]
fn records_round_trip_and_replay() {
    let spec = SuiteSpec::new(SuiteKind::TheoremPath, 3, 3, Mode::Exhaustive, 0);
    let r = run_suite(&spec).unwrap();
    let line = r.to_json_line();
    let back: SuiteReport = serde_json::from_str(&line).unwrap();
    assert_eq!(back, r);
    assert!(!back.counterexamples.is_empty());
    for rec in &back.counterexamples {
        assert!(!has_transversal_path(&rec.collection().unwrap()));
        assert!(matches!(replay(&spec, rec).unwrap(), Verdict::Counterexample(_)));
    }
    let random = SuiteSpec::new(SuiteKind::TheoremCycle, 4, 4, Mode::Random, 50).with_seed(3);
    let r = run_suite(&random).unwrap();
    for rec in &r.counterexamples {
        let text = serde_json::to_string(rec).unwrap();
        let rec: InstanceRecord = serde_json::from_str(&text).unwrap();
        let (again, seed) = random.instance(rec.n, rec.index).unwrap();
        assert_eq!(again, rec.collection().unwrap());
        assert_eq!(seed, rec.seed);
    }
}

#[test]
fn reports_are_deterministic() {
    for spec in [
        SuiteSpec::new(SuiteKind::AgreementPath, 5, 6, Mode::Random, 40).with_seed(1),
        SuiteSpec::new(SuiteKind::OneSpare, 5, 20, Mode::Random, 30).with_seed(2),
        SuiteSpec::new(SuiteKind::TheoremPath, 4, 4, Mode::Exhaustive, 0).with_canonical(true),
    ] {
        let a = run_suite(&spec.clone().with_jobs(1)).unwrap();
        let b = run_suite(&spec.clone().with_jobs(3)).unwrap();
        let c = run_suite(&spec.with_jobs(1)).unwrap();
        assert_eq!(a.to_json_line_untimed(), b.to_json_line_untimed());
        assert_eq!(a.to_json_line_untimed(), c.to_json_line_untimed());
    }
}

#[test]
fn seeds_change_random_instances() {
    let a = SuiteSpec::new(SuiteKind::Oracles, 6, 6, Mode::Random, 1).with_seed(1);
    let b = a.clone().with_seed(2);
    assert_ne!(a.instance(6, 0).unwrap().0, b.instance(6, 0).unwrap().0);
    assert_ne!(a.instance(6, 0).unwrap().0, a.instance(6, 1).unwrap().0);
}

#[test]
fn forcing_set_suite_meets_its_hypotheses() {
    let r = run_suite(&SuiteSpec::new(SuiteKind::ForcingSet, 50, 60, Mode::Random, 2)).unwrap();
    assert!(r.passed(), "{:?}", r.failures.first());
    assert_eq!(r.stat_total("precondition_unmet"), 0);
    assert_eq!(r.stat_total("ok"), 22);
}

#[test]
fn every_suite_runs_small() {
    for kind in SuiteKind::ALL {
        let (lo, hi) = match kind {
            SuiteKind::ScalePath | SuiteKind::ScaleCycle => (60, 60),
            SuiteKind::ForcingSet => (25, 26),
            SuiteKind::Absorber => (8, 9),
            SuiteKind::Connect | SuiteKind::Prop14 => (5, 6),
            _ => (4, 6),
        };
        let r = run_suite(&SuiteSpec::new(kind, lo, hi, Mode::Random, 5).with_seed(7)).unwrap();
        assert!(r.passed(), "{}: {:?}", kind.name(), r.failures.first());
        assert!(r.instances > 0);
        let csv = r.csv_row();
        assert_eq!(csv.split(',').count(), SuiteReport::csv_header().split(',').count());
    }
}

#[test]
fn bench_reports_rows_and_fits() {
    for kind in BenchKind::ALL {
        let sizes = match kind {
            BenchKind::Oracle => vec![6, 8],
            BenchKind::Pipeline => vec![40, 80],
            _ => vec![50, 100],
        };
        let r = bench(&BenchSpec::new(kind, sizes, 2)).unwrap();
        assert_eq!(r.instances, 4);
        let timing = r.timing.as_ref().unwrap();
        assert_eq!(timing.bench_rows.len(), 4);
        assert!(timing.fits.contains_key(&format!("{}.time_exponent", kind.name())));
    }
}
