use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zalc_automata::*;

fn random_nbw(rng: &mut ChaCha8Rng, max_states: usize, letters: u8) -> ExplicitNbw<u8> {
    let n = rng.gen_range(1..=max_states);
    let mut a = ExplicitNbw::new(n);
    a.initial.push(0);
    for q in 0..n {
        a.accepting[q] = rng.gen_bool(0.4);
        for x in 0..letters {
            for p in 0..n {
                if rng.gen_bool(0.35) {
                    a.add_transition(q, x, p);
                }
            }
        }
    }
    a
}

#[test]
fn complement_and_determinization_on_lassos() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..40 {
        let a = random_nbw(&mut rng, 3, 2);
        let n = a.num_states;
        let ta = nbw_lasso_table(&a, &[0, 1], 3, 3);
        let tc = nbw_lasso_table(&RankComplement::new(a.clone(), n), &[0, 1], 3, 3);
        let td = dpw_lasso_table(&SafraDpw::new(a.clone(), n), &[0, 1], 3, 3);
        let tdual = dpw_lasso_table(&DualDpw(SafraDpw::new(a.clone(), n)), &[0, 1], 3, 3);
        for i in 0..ta.len() {
            assert_ne!(ta[i], tc[i]);
            assert_eq!(ta[i], td[i]);
            assert_ne!(ta[i], tdual[i]);
        }
    }
}

#[test]
fn lasso_tables_agree_with_single_lasso_checks() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10 {
        let a = random_nbw(&mut rng, 3, 2);
        let d = SafraDpw::new(a.clone(), a.num_states);
        let lassos = all_lassos(&[0u8, 1], 2, 3);
        let ta = nbw_lasso_table(&a, &[0, 1], 2, 3);
        let td = dpw_lasso_table(&d, &[0, 1], 2, 3);
        for (i, l) in lassos.iter().enumerate() {
            assert_eq!(nbw_accepts_lasso(&a, l), ta[i]);
            assert_eq!(dpw_accepts_lasso(&d, l), td[i]);
        }
    }
}

fn random_tree_automaton(rng: &mut ChaCha8Rng) -> ExplicitTreeAutomaton<u8> {
    let n = rng.gen_range(1..=3);
    let mut transitions = Vec::new();
    for q in 0..n {
        for x in 0..2u8 {
            if rng.gen_bool(0.7) {
                transitions.push((q, x, vec![rng.gen_range(0..n), rng.gen_range(0..n)]));
            }
        }
    }
    let pairs = (0..rng.gen_range(1..=2))
        .map(|_| {
            let l: BTreeSet<usize> = (0..n).filter(|_| rng.gen_bool(0.3)).collect();
            let u: BTreeSet<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
            (l, u)
        })
        .collect();
    ExplicitTreeAutomaton {
        degree: 2,
        num_states: n,
        initial: 0,
        transitions,
        pairs,
    }
}

fn random_regular_tree(rng: &mut ChaCha8Rng) -> LabeledRegularTree<u8> {
    let n = rng.gen_range(1..=3);
    LabeledRegularTree {
        labels: (0..n).map(|_| rng.gen_range(0..2)).collect(),
        children: (0..n)
            .map(|_| vec![rng.gen_range(0..n), rng.gen_range(0..n)])
            .collect(),
    }
}

#[test]
fn product_language_is_intersection() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..150 {
        let a = random_tree_automaton(&mut rng);
        let b = random_tree_automaton(&mut rng);
        let p = Product::new(a.clone(), b.clone()).unwrap();
        for _ in 0..10 {
            let t = random_regular_tree(&mut rng);
            let in_a = accepts_regular_tree(&a, &t, 10_000).unwrap();
            let in_b = accepts_regular_tree(&b, &t, 10_000).unwrap();
            let in_p = accepts_regular_tree(&p, &t, 10_000).unwrap();
            assert_eq!(in_p, in_a && in_b);
        }
    }
}

#[test]
fn witnesses_are_members() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut nonempty = 0;
    for _ in 0..200 {
        let a = random_tree_automaton(&mut rng);
        let b = random_tree_automaton(&mut rng);
        let p = Product::new(a, b).unwrap();
        let r = emptiness(&p, 10_000).unwrap();
        if let Some(w) = r.witness {
            nonempty += 1;
            verify_witness(&p, &w).unwrap();
            assert!(accepts_regular_tree(&p, &w.tree(), 10_000).unwrap());
        } else {
            // no small regular tree is accepted either
            for _ in 0..20 {
                let t = random_regular_tree(&mut rng);
                assert!(!accepts_regular_tree(&p, &t, 10_000).unwrap());
            }
        }
    }
    assert!(nonempty > 10);
}

#[test]
fn degree_mismatch_is_an_error() {
    let a = ExplicitTreeAutomaton::<u8> {
        degree: 2,
        num_states: 1,
        initial: 0,
        transitions: vec![],
        pairs: vec![],
    };
    let mut b = a.clone();
    b.degree = 3;
    assert!(matches!(
        Product::new(a, b),
        Err(AutomataError::DegreeMismatch(2, 3))
    ));
}

proptest! {
    #[test]
    fn lifted_dpw_accepts_tree_iff_all_paths_accepted(seed in 0u64..500) {
        // on a tree whose paths are all the same word, lifting agrees with the word automaton
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_nbw(&mut rng, 3, 2);
        let d = SafraDpw::new(a.clone(), a.num_states);
        let stem: Vec<u8> = (0..rng.gen_range(0..3)).map(|_| rng.gen_range(0..2)).collect();
        let cycle: Vec<u8> = (0..rng.gen_range(1..4)).map(|_| rng.gen_range(0..2)).collect();
        let k = stem.len() + cycle.len();
        let mut t = LabeledRegularTree { labels: Vec::new(), children: Vec::new() };
        for i in 0..k {
            let next = if i + 1 < k { i + 1 } else { stem.len() };
            t.labels.push(if i < stem.len() { stem[i] } else { cycle[i - stem.len()] });
            t.children.push(vec![next, next]);
        }
        let lift = LiftAllPaths { dpw: d, degree: 2, alphabet: vec![0, 1] };
        let word = nbw_accepts_lasso(&a, &Lasso::new(stem, cycle));
        prop_assert_eq!(accepts_regular_tree(&lift, &t, 100_000).unwrap(), word);
    }
}
