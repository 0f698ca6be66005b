use proptest::prelude::*;
use proptest::test_runner::RngSeed;

use forge_core::area::bounded_area;
use forge_core::derivation::{self, check_derivation, Derivation, Move};
use forge_core::diagram::{diagram_from_derivation, trace_bands};
use forge_core::encode::hub_word;
use forge_core::lemma3::{self, closed_filling, loop_word};
use forge_core::presentation::{self, build_presentation, canonical_rotation, s4_fragment};
use forge_core::smachine::{self, AdmissibleWord};
use forge_core::word::special;
use forge_core::{Letter, Symbol, Word};

fn config(cases: u32) -> ProptestConfig {
    let mut c = ProptestConfig::with_cases(cases);
    if let Some(seed) = std::env::var("FORGE_SEED").ok().and_then(|s| s.parse().ok()) {
        c.rng_seed = RngSeed::Fixed(seed);
    }
    c
}

const NAMES: [&str; 5] = ["δ", "s2", "r1", "rule1", "rule4"];

fn letter() -> impl Strategy<Value = Letter> {
    (0..NAMES.len(), any::<bool>()).prop_map(|(i, pos)| Letter::new(Symbol::intern(NAMES[i]), pos))
}

fn raw() -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec(letter(), 0..16)
}

fn word() -> impl Strategy<Value = Word> {
    raw().prop_map(Word::reduce)
}

proptest! {
    #![proptest_config(config(256))]

    #[test]
    fn reduction_is_idempotent(r in raw()) {
        let w = Word::reduce(r);
        prop_assert_eq!(Word::reduce(w.letters().iter().copied()), w.clone());
        prop_assert!(w.letters().windows(2).all(|p| !p[0].cancels(p[1])));
    }

    #[test]
    fn group_laws(u in word(), v in word(), w in word()) {
        prop_assert_eq!(u.multiply(&v).multiply(&w), u.multiply(&v.multiply(&w)));
        prop_assert!(u.multiply(&u.inverse()).is_empty());
        prop_assert_eq!(u.inverse().inverse(), u.clone());
        prop_assert_eq!(u.multiply(&v).inverse(), v.inverse().multiply(&u.inverse()));
    }

    #[test]
    fn display_parses_back(w in word()) {
        prop_assert_eq!(w.to_string().parse::<Word>().unwrap(), w.clone());
        prop_assert_eq!(w.to_flat_string().parse::<Word>().unwrap(), w);
    }

    #[test]
    fn canonical_rotation_is_a_class_invariant(w in word(), k in 0usize..32, invert in any::<bool>()) {
        let c = w.cyclic_reduce();
        prop_assume!(!c.is_empty());
        let mut other = c.rotate(k % c.len());
        if invert {
            other = other.inverse();
        }
        prop_assert_eq!(canonical_rotation(&c), canonical_rotation(&other));
    }

    #[test]
    fn hub_has_4n_kappas(u in word(), n in 1usize..6) {
        let k = hub_word(&u, n).unwrap();
        prop_assert_eq!(k.letters().iter().filter(|l| special::is_kappa(l.symbol)).count(), 4 * n);
    }

    #[test]
    fn s1_rules_invert(exps in prop::collection::vec(-3i64..=3, 5), rule in 0usize..10) {
        let m = smachine::builtin("S1").unwrap();
        let rules = m.all_rules();
        let sigma = &rules[rule % rules.len()];
        let states = ["p1", "q1", "r1", "s1", "t1", "u1"].iter().map(|s| Symbol::intern(s)).collect();
        let w = AdmissibleWord::new(states, exps.iter().map(|&e| Word::power(special::delta(), e)).collect());
        if let Ok(mid) = m.apply(&w, &sigma.name) {
            prop_assert!(mid.check(&m.hardware).is_ok());
            prop_assert_eq!(m.apply(&mid, &sigma.inverse().name).unwrap(), w);
        }
    }

    #[test]
    fn free_moves_have_no_area(start in word(), ins in prop::collection::vec((0usize..32, letter()), 0..6)) {
        let mut moves = Vec::new();
        let mut len = start.len();
        for (pos, l) in ins {
            moves.push(Move::FreeInsert { pos: pos % (len + 1), letter: l });
            len += 2;
        }
        let d = Derivation { start: start.clone(), moves };
        let c = check_derivation(&s4_fragment(), &d).unwrap();
        prop_assert_eq!(c.area, 0);
        prop_assert_eq!(c.end_word, start);
        prop_assert_eq!(derivation::parse(&derivation::serialize(&d)).unwrap(), d);
    }
}

proptest! {
    #![proptest_config(config(16))]

    #[test]
    fn area_is_rotation_invariant(n in 1usize..=2, k in 0usize..20, invert in any::<bool>()) {
        let p = lemma3::core_presentation();
        let w = loop_word(n);
        let mut r = w.rotate(k % w.len());
        if invert {
            r = r.inverse();
        }
        let a = bounded_area(&p, &w, 256, 64).unwrap().area;
        prop_assert_eq!(bounded_area(&p, &r, 256, 64).unwrap().area, a);
    }
}

#[test]
fn presentations_are_normalized() {
    for name in ["S1", "S2", "S3", "S4"] {
        let m = smachine::builtin(name).unwrap();
        let p = build_presentation(&m, 0, None).unwrap();
        assert!(p.violations().is_empty(), "{name}: {:?}", p.violations());
        for r in &p.relators {
            assert!(r.word.is_cyclically_reduced() && !r.word.is_empty());
            assert_eq!(canonical_rotation(&r.word), r.word);
            assert!(r.word.letters().iter().all(|l| p.generators.contains(l.symbol)));
        }
        let reparsed = presentation::parse(&presentation::serialize(&p)).unwrap();
        assert_eq!(reparsed, p);
    }
}

#[test]
fn diagram_area_equals_derivation_area() {
    let p = s4_fragment();
    for n in 0..=4 {
        let d = closed_filling(n);
        let dg = diagram_from_derivation(&p, &d).unwrap();
        assert_eq!(dg.area(), d.area());
        assert_eq!(dg.perimeter(), 10 * n);
        assert!(dg.violations(&p, loop_word(n).letters()).is_empty());
    }
}

#[test]
fn bands_partition_the_rule_edges() {
    let p = s4_fragment();
    for n in 1..=3 {
        let dg = diagram_from_derivation(&p, &closed_filling(n)).unwrap();
        for x in [lemma3::sigma1(), lemma3::sigma4()] {
            let x_edges: Vec<usize> = (0..dg.edges.len()).filter(|&e| dg.edges[e].symbol == x).collect();
            let mut covered: Vec<usize> = trace_bands(&dg, x).iter().flat_map(|b| b.edges.clone()).collect();
            covered.sort();
            assert_eq!(covered, x_edges, "n={n} {x}");
        }
    }
}
