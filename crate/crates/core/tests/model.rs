use proptest::prelude::*;
use transversal::digraph::validate_transversal;
use transversal::generators::{
    directed_cycle_tournament, directed_triangle, fig1_counterexamples, prop14_collection, prop14_tprime, random_collection,
    transitive_tournament, GeneratorKind, GeneratorSpec,
};
use transversal::{
    color_set, ColoredArc, ColoredDigraph, RainbowCycle, RainbowPath, Ratio, Tournament, TournamentCollection,
};

fn set(bits: &fixedbitset::FixedBitSet) -> Vec<usize> {
    bits.ones().collect()
}

fn arb_collection(max_n: usize, max_m: usize) -> impl Strategy<Value = (TournamentCollection, u64)> {
    (2..=max_n, 1..=max_m, any::<u64>()).prop_map(|(n, m, seed)| (random_collection(n, m, seed, false).unwrap(), seed))
}

fn count(t: &TournamentCollection, colors: &[usize], u: usize, v: usize) -> usize {
    colors.iter().filter(|&&c| t.tournament(c).has_arc(u, v)).count()
}

/// `ceil(num/den * k)` in integers.
fn ceil_frac(g: Ratio, k: usize) -> usize {
    let (a, b) = (*g.numer() as usize, *g.denom() as usize);
    (a * k).div_ceil(b)
}

#[test]
fn color_sets_of_prop14() {
    let t = prop14_collection(3).unwrap();
    assert_eq!(set(&t.color_set_of_arc(1, 0).unwrap()), vec![2]);
    assert_eq!(set(&t.color_set_of_arc(0, 1).unwrap()), vec![0, 1]);
    assert!(t.color_set_of_arc(1, 1).is_err());
    assert!(t.color_set_of_arc(0, 3).is_err());
}

#[test]
fn thresholds_of_named_instances() {
    let (p, _) = fig1_counterexamples();
    assert_eq!(p.threshold_digraph(None, Ratio::new(1, 2)).unwrap().arc_count(), 6);
    let tr = transitive_tournament(5);
    let one = TournamentCollection::repeated(&tr, 1);
    let d = one.threshold_digraph(None, Ratio::from_integer(1)).unwrap();
    assert!(d.contains_tournament(&tr));
    assert_eq!(d.arc_count(), 10);
    let t = prop14_collection(3).unwrap();
    let d = t.threshold_digraph(None, Ratio::new(1, 2)).unwrap();
    let mut arcs = d.arcs();
    arcs.sort_unstable();
    assert_eq!(arcs, vec![(0, 1), (0, 2), (1, 2)]);
    assert!(t.threshold_digraph(Some(&color_set(3, [])), Ratio::new(1, 2)).is_err());
    assert!(t.threshold_digraph(None, Ratio::from_integer(0)).is_err());
}

#[test]
fn majority_of_named_instances() {
    let tr = transitive_tournament(4);
    assert_eq!(TournamentCollection::repeated(&tr, 1).majority_subtournament(None, Ratio::new(1, 2)).unwrap(), tr);
    let (p, _) = fig1_counterexamples();
    let maj = p.majority_subtournament(None, Ratio::new(1, 2)).unwrap();
    assert!(p.threshold_digraph(None, Ratio::new(1, 2)).unwrap().contains_tournament(&maj));
    let t = prop14_collection(3).unwrap();
    assert_eq!(t.majority_subtournament(None, Ratio::new(1, 2)).unwrap(), transitive_tournament(3));
    assert!(t.majority_subtournament(None, Ratio::new(2, 3)).is_err());
}

#[test]
fn induced_prop14_restriction() {
    let t = prop14_collection(4).unwrap();
    let (sub, relabel) = t.induced(Some(&[0, 1, 2]), Some(&[2, 3])).unwrap();
    assert_eq!((sub.n(), sub.m()), (3, 2));
    assert_eq!(relabel.vertices, vec![0, 1, 2]);
    for c in 0..2 {
        let x = sub.tournament(c);
        assert!(x.has_arc(0, 2) && x.has_arc(1, 0) && x.has_arc(2, 1));
    }
    assert!(t.induced(Some(&[]), None).is_err());
    let (all, _) = t.induced(None, None).unwrap();
    assert_eq!(all, t);
}

#[test]
fn strong_connectivity_of_named_tournaments() {
    assert!(directed_triangle().is_strongly_connected());
    for n in 2..8 {
        assert!(!transitive_tournament(n).is_strongly_connected());
    }
    for n in 3..10 {
        assert!(prop14_tprime(n).unwrap().is_strongly_connected());
        assert!(directed_cycle_tournament(n).is_strongly_connected());
    }
}

#[test]
fn validation_examples() {
    let tr = TournamentCollection::repeated(&transitive_tournament(3), 2);
    assert!(validate_transversal(&tr, &ColoredDigraph::default()));
    let p = RainbowPath::new(vec![0, 1, 2], vec![0, 1]);
    assert!(p.valid(&tr));
    assert!(validate_transversal(&tr, &p.to_digraph()));
    let back = RainbowPath::new(vec![1, 0], vec![0]);
    assert!(!back.valid(&tr));
    assert!(!validate_transversal(&tr, &back.to_digraph()));
    let repeat = RainbowPath::new(vec![0, 1, 2], vec![0, 0]);
    assert!(!repeat.valid(&tr));
    assert!(!repeat.to_digraph().violations(&tr).is_empty());
    let tri = TournamentCollection::repeated(&directed_triangle(), 3);
    let c = RainbowCycle::new(vec![0, 1, 2], vec![0, 1, 2]);
    assert!(c.valid(&tri) && c.is_hamilton(&tri));
    assert!(c.rotated(1).valid(&tri));
}

#[test]
fn file_format_is_bit_exact() {
    let t = prop14_collection(3).unwrap();
    let json = t.to_json();
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["n"], 3);
    assert_eq!(v["m"], 3);
    // pairs (0,1), (0,2), (1,2)
    assert_eq!(v["tournaments"][0], "111");
    assert_eq!(v["tournaments"][2], "010");
    assert_eq!(TournamentCollection::from_json(&json).unwrap(), t);
    assert!(TournamentCollection::from_json(r#"{"n":3,"m":1,"tournaments":["11"]}"#).is_err());
    assert!(TournamentCollection::from_json(r#"{"n":3,"m":2,"tournaments":["111"]}"#).is_err());
    assert!(TournamentCollection::from_json(r#"{"n":3,"m":1,"tournaments":["1x1"]}"#).is_err());
    let d = ColoredDigraph::new(vec![ColoredArc { tail: 0, head: 1, color: 2 }]);
    assert_eq!(d.to_json(), "[[0,1,2]]");
}

#[test]
fn generators_are_seed_determined() {
    for kind in [GeneratorKind::RandomUniform, GeneratorKind::RandomStronglyConnected] {
        let spec = GeneratorSpec { kind, n: 9, m: 4, seed: 77 };
        let a = spec.generate().unwrap();
        assert_eq!(a, spec.generate().unwrap());
        assert_ne!(a, GeneratorSpec { seed: 78, ..spec }.generate().unwrap());
        if kind == GeneratorKind::RandomStronglyConnected {
            assert!(a.tournaments().iter().all(Tournament::is_strongly_connected));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn antisymmetry_and_color_partition((t, _) in arb_collection(9, 6)) {
        let n = t.n();
        for c in 0..t.m() {
            for u in 0..n {
                prop_assert!(!t.tournament(c).has_arc(u, u));
                for v in 0..n {
                    if u != v {
                        prop_assert!(t.tournament(c).has_arc(u, v) ^ t.tournament(c).has_arc(v, u));
                    }
                }
            }
        }
        for u in 0..n {
            for v in u + 1..n {
                let a = t.color_set_of_arc(u, v).unwrap();
                let b = t.color_set_of_arc(v, u).unwrap();
                prop_assert!(a.is_disjoint(&b));
                prop_assert_eq!(a.count_ones(..) + b.count_ones(..), t.m());
            }
        }
    }

    #[test]
    fn threshold_matches_direct_count((t, seed) in arb_collection(8, 8), num in 1u64..=6, den in 1u64..=6) {
        prop_assume!(num <= den);
        let gamma = Ratio::new(num, den);
        let colors: Vec<usize> = (0..t.m()).filter(|c| (seed >> c) & 1 == 1).collect();
        prop_assume!(!colors.is_empty());
        let d = t.threshold_digraph(Some(&color_set(t.m(), colors.iter().copied())), gamma).unwrap();
        let need = ceil_frac(gamma, colors.len());
        for u in 0..t.n() {
            for v in 0..t.n() {
                if u != v {
                    prop_assert_eq!(d.has_arc(u, v), count(&t, &colors, u, v) >= need);
                }
            }
        }
        if gamma <= Ratio::new(1, 2) {
            let maj = t.majority_subtournament(Some(&color_set(t.m(), colors.iter().copied())), gamma).unwrap();
            prop_assert!(d.contains_tournament(&maj));
        }
    }

    #[test]
    fn threshold_is_monotone_in_gamma((t, _) in arb_collection(8, 8), a in 1u64..=12, b in 1u64..=12) {
        let (lo, hi) = (Ratio::new(a.min(b), 24), Ratio::new(a.max(b), 24));
        let dlo = t.threshold_digraph(None, lo).unwrap();
        let dhi = t.threshold_digraph(None, hi).unwrap();
        prop_assert!(dlo.contains_arcs_of(&dhi));
    }

    #[test]
    fn shrinking_colors_keeps_dense_arcs((t, seed) in arb_collection(7, 10), a in 1u64..=12, b in 1u64..=12) {
        let (alpha, beta) = (Ratio::new(a.min(b), 24), Ratio::new(a.max(b), 24));
        let c2: Vec<usize> = (0..t.m()).collect();
        let c1: Vec<usize> = c2.iter().copied().filter(|c| (seed >> c) & 1 == 1).collect();
        prop_assume!(!c1.is_empty());
        let one = Ratio::from_integer(1);
        let s1 = color_set(t.m(), c1.iter().copied());
        let s2 = color_set(t.m(), c2.iter().copied());
        let k1 = Ratio::from_integer(c1.len() as u64);
        let k2 = Ratio::from_integer(c2.len() as u64);
        if (one - alpha) * k1 >= (one - beta) * k2 {
            let big = t.threshold_digraph(Some(&s2), beta).unwrap();
            let small = t.threshold_digraph(Some(&s1), alpha).unwrap();
            prop_assert!(small.contains_arcs_of(&big));
        }
        if beta * k1 >= alpha * k2 {
            let small = t.threshold_digraph(Some(&s1), beta).unwrap();
            let big = t.threshold_digraph(Some(&s2), alpha).unwrap();
            prop_assert!(big.contains_arcs_of(&small));
        }
    }

    #[test]
    fn induced_commutes((t, seed) in arb_collection(8, 6)) {
        let xs: Vec<usize> = (0..t.n()).filter(|v| (seed >> v) & 1 == 1).collect();
        let cs: Vec<usize> = (0..t.m()).filter(|c| (seed >> (16 + c)) & 1 == 1).collect();
        prop_assume!(!xs.is_empty());
        let (a, _) = t.induced(Some(&xs), None).unwrap();
        let (a, _) = a.induced(None, Some(&cs)).unwrap();
        let (b, _) = t.induced(None, Some(&cs)).unwrap();
        let (b, _) = b.induced(Some(&xs), None).unwrap();
        let (c, _) = t.induced(Some(&xs), Some(&cs)).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(&a, &c);
    }

    #[test]
    fn json_round_trip((t, _) in arb_collection(12, 5)) {
        let back = TournamentCollection::from_json(&t.to_json()).unwrap();
        prop_assert_eq!(back, t);
    }

    #[test]
    fn path_validity_matches_digraph_validity((t, seed) in arb_collection(7, 7)) {
        let n = t.n();
        let k = 2 + (seed as usize % (n - 1));
        let vertices: Vec<usize> = (0..k).map(|i| (i + seed as usize) % n).collect();
        let colors: Vec<usize> = (0..k - 1).map(|i| (i * 3 + (seed >> 8) as usize) % t.m()).collect();
        let p = RainbowPath::new(vertices, colors);
        prop_assert_eq!(p.valid(&t), validate_transversal(&t, &p.to_digraph()));
    }
}
