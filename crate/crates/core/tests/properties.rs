use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zalc_automata::{
    accepts_regular_tree, emptiness, LabeledRegularTree, Paired, Product, TreeAutomaton,
};
use zalc_core::abstraction::{
    frame_of_graph, frame_valid, frames_consistent, framify, Frame, FrameGraph, FrameIter,
    Signature, ULabel, TOP,
};
use zalc_core::cgraph::{
    check_star, embed_finite, embed_regular, framed_graph, ConstraintGraph, StarResult, TreeShape,
    Unary,
};
use zalc_core::normalize::{normalize, normalize_shallow};
use zalc_core::pipeline::{build_a_emb, prepare, SolveOptions};
use zalc_core::syntax::{
    parse_problem, problem_to_string, Constraint, Interpretation, Name, Problem,
};

mod common;

use common::{random_problem, random_regular_tree};

fn sig(regs: &[&str], c0: i64, calpha: i64, und: bool) -> Signature {
    let mut s = Signature::new(regs.iter().map(|r| Name::new(r)).collect(), c0, calpha);
    s.und = und;
    s
}

/// Every frame obtained by brute force over explicit graphs on the vertex set.
fn explicit_frames(sig: &Signature, root: bool) -> BTreeSet<Frame> {
    let m = sig.m() as u32;
    let mut vertices: Vec<u32> = (0..m).collect();
    if !root {
        vertices.extend((0..m).map(|i| i + TOP));
    }
    let n = vertices.len();
    let labels = sig.labels();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .collect();
    let mut out = BTreeSet::new();
    for code in 0..4usize.pow(pairs.len() as u32) {
        let mut g = FrameGraph {
            vertices: vertices.clone(),
            ..Default::default()
        };
        let mut c = code;
        for &(a, b) in &pairs {
            match c % 4 {
                1 => {
                    g.less.insert((a, b));
                }
                2 => {
                    g.less.insert((b, a));
                }
                3 => {
                    g.equal.insert((a, b));
                    g.equal.insert((b, a));
                }
                _ => {}
            }
            c /= 4;
        }
        for lc in 0..labels.len().pow(n as u32) {
            let mut l = lc;
            g.labels = (0..n)
                .map(|_| {
                    let x = labels[l % labels.len()];
                    l /= labels.len();
                    vec![x]
                })
                .collect();
            if frame_valid(&g) {
                out.insert(frame_of_graph(&g, root));
            }
        }
    }
    out
}

#[test]
fn frame_enumeration_matches_explicit_graphs() {
    for s in [
        sig(&["x"], 0, 0, false),
        sig(&["x"], 0, 1, true),
        sig(&["x", "y"], 0, 0, false),
    ] {
        let roots: BTreeSet<Frame> = FrameIter::roots(&s, vec![]).collect();
        assert_eq!(roots, explicit_frames(&s, true));
        let all: Vec<Frame> = FrameIter::all(&s, vec![]).collect();
        let set: BTreeSet<Frame> = all.iter().cloned().collect();
        assert_eq!(set.len(), all.len(), "frames enumerated twice");
        assert_eq!(set, explicit_frames(&s, false));
    }
}

/// A random interpretation over arbitrary (not necessarily tree) role graphs.
fn random_interpretation(rng: &mut ChaCha8Rng, p: &Problem, size: usize) -> Interpretation {
    let mut i = Interpretation::new(size);
    for r in p.roles() {
        let edges = (0..size)
            .flat_map(|a| (0..size).map(move |b| (a, b)))
            .filter(|_| rng.gen_bool(0.3))
            .collect();
        i.roles.insert(r, edges);
    }
    for a in p.concept_names() {
        i.concepts
            .insert(a, (0..size).map(|_| rng.gen_bool(0.5)).collect());
    }
    for x in p.registers() {
        i.registers
            .insert(x, (0..size).map(|_| rng.gen_range(-2..=3)).collect());
    }
    i
}

/// Registers that the negation normal form adds for negated constant
/// equalities, set to their constant.
fn bind_constant_registers(i: &mut Interpretation, nnf: &Problem, original: &Problem) {
    let known = original.registers();
    for c in nnf.all_concepts() {
        for (_, t, _) in c.path_constraints() {
            for s in t.subconstraints() {
                if let Constraint::EqualConst(x, k) = s {
                    if !known.contains(&x.reg) {
                        let k = i64::try_from(k.clone()).expect("small constant");
                        i.registers.insert(x.reg.clone(), vec![k; i.size]);
                    }
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn printing_round_trips(seed in any::<u64>()) {
        let p = random_problem(&mut ChaCha8Rng::seed_from_u64(seed));
        let text = problem_to_string(&p);
        let back = parse_problem(&text).expect("printed problem parses");
        prop_assert_eq!(back, p);
    }

    #[test]
    fn negation_normal_form_preserves_models(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_problem(&mut rng);
        let n = normalize(&p).expect("normalizes");
        for size in 1..=3 {
            let mut i = random_interpretation(&mut rng, &p, size);
            bind_constant_registers(&mut i, &n.nnf, &p);
            prop_assert_eq!(i.models(&p), i.models(&n.nnf));
        }
    }

    #[test]
    fn shallow_normalization_is_identity_on_normal_forms(seed in any::<u64>()) {
        let p = random_problem(&mut ChaCha8Rng::seed_from_u64(seed));
        for n in [normalize(&p).expect("normalizes"), normalize_shallow(&p).expect("normalizes")] {
            let again = normalize_shallow(&n.anf).expect("normal form normalizes");
            prop_assert!(again.copies.is_empty() && again.tests.is_empty());
            prop_assert_eq!(&again.anf, &n.anf);
        }
    }
}

/// A random tree-shaped constraint graph: edges only within a node or
/// between a node and its parent.
fn random_tree_graph(rng: &mut ChaCha8Rng, m: usize) -> (TreeShape, ConstraintGraph) {
    let nodes = rng.gen_range(1..=5);
    let parent: Vec<Option<usize>> = (0..nodes)
        .map(|u| (u > 0).then(|| rng.gen_range(0..u)))
        .collect();
    let shape = TreeShape { parent };
    let mut g = ConstraintGraph::with_vertices(nodes * m);
    for u in 0..nodes {
        let scope: Vec<usize> = std::iter::once(u).chain(shape.parent[u]).collect();
        for _ in 0..rng.gen_range(0..=3) {
            let a = shape.vertex(scope[rng.gen_range(0..scope.len())], rng.gen_range(0..m), m);
            let b = shape.vertex(scope[rng.gen_range(0..scope.len())], rng.gen_range(0..m), m);
            if rng.gen_bool(0.6) {
                g.less.push((a, b));
            } else {
                g.equal.push((a, b));
            }
        }
        if rng.gen_bool(0.3) {
            g.unary
                .push((shape.vertex(u, rng.gen_range(0..m), m), Unary::Eq(rng.gen_range(0..=1))));
        }
    }
    (shape, g)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn framify_exactly_on_embeddable_graphs(seed in any::<u64>(), m in 1usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = sig(&["x", "y"][..m], 0, 1, false);
        let (shape, g) = random_tree_graph(&mut rng, m);
        match framify(&shape, &g, &s) {
            None => prop_assert!(embed_finite(&g).is_err()),
            Some(ft) => {
                for (u, p) in ft.parent.iter().enumerate() {
                    prop_assert!(ft.frames[u].well_formed(&s));
                    prop_assert_eq!(ft.frames[u].root, p.is_none());
                    if let Some(p) = p {
                        prop_assert!(frames_consistent(&ft.frames[*p], &ft.frames[u]));
                    }
                }
                let fg = framed_graph(&shape, &ft.frames, &s);
                let kappa = embed_finite(&fg).expect("framed graph embeds");
                prop_assert!(g.satisfied_by(&kappa));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn path_pair_condition_is_necessary_and_sufficient(seed in any::<u64>(), degree in 1usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = sig(&["x", "y"], 0, 0, false);
        let rt = random_regular_tree(&mut rng, &s, degree, 4);
        prop_assert!(rt.validate(&s).is_ok());
        let a = build_a_emb(&s, degree).expect("automaton");
        let labeled = LabeledRegularTree {
            labels: rt.nodes.iter().map(|n| n.frame.clone()).collect(),
            children: rt.nodes.iter().map(|n| n.children.clone()).collect(),
        };
        let member = accepts_regular_tree(&a, &labeled, 1_000_000).expect("within limit");
        match check_star(&rt, &s) {
            StarResult::Satisfied => {
                prop_assert!(member);
                for d in 1..=5 {
                    prop_assert!(embed_regular(&rt, &s, d).is_ok());
                }
            }
            StarResult::Violated(w) => {
                prop_assert!(!member);
                prop_assert!(w.verify(&rt, &s).is_ok());
            }
        }
    }
}

/// Small problems for comparing the fused automaton with the generic
/// composition of its parts.
const SMALL: &[&str] = &[
    "(tbox (sub (top) (somep (r) (< (s 0 x) (s 1 x))))) (check (top))",
    "(tbox (sub (top) (somep (r) (< (s 1 x) (s 0 x))))) (check (somep () (= (s 0 x) 0)))",
    "(check (and (somep (r) (< (s 0 x) (s 1 x))) (somep (r) (< (s 1 x) (s 0 x)))))",
    "(func f) (check (and (somep (f) (< (s 0 x) (s 1 x))) (somep (f) (< (s 1 x) (s 0 x)))))",
    "(func f) (check (and (some f A) (all f (not A))))",
    "(tbox (sub A (some r A))) (check (and A (allp (r) (= (s 0 x) (s 1 x)))))",
    "(check (and (somep () (= (s 0 x) 0)) (somep (r) (and (< (s 0 x) (s 1 x)) (= (s 1 x) 1)))))",
    "(check (and (somep () (= (s 0 x) 0)) (somep () (= (s 0 y) 1)) (somep () (< (s 0 x) (s 0 z))) (somep () (< (s 0 z) (s 0 y)))))",
];

#[test]
fn fused_automaton_agrees_with_generic_composition() {
    let mut nonempty = 0;
    for src in SMALL {
        let p = parse_problem(src).expect("parses");
        let prep = prepare(&p, &SolveOptions::default()).expect("prepares");
        let sat = &prep.automaton;
        let generic = Product::new(
            Paired::new(
                build_a_emb(&sat.sig, sat.degree()).expect("a_emb"),
                sat.alcf.clone(),
            )
            .expect("paired"),
            sat.matching.clone(),
        )
        .expect("product");
        let fused = emptiness(sat, 1_000_000).expect("fused within limit");
        let plain = emptiness(&generic, 1_000_000).expect("generic within limit");
        assert_eq!(fused.is_empty(), plain.is_empty(), "{src}");
        if let Some(w) = &fused.witness {
            nonempty += 1;
            assert!(accepts_regular_tree(&generic, &w.tree(), 1_000_000).expect("within limit"), "{src}");
        }
        if let Some(w) = &plain.witness {
            assert!(accepts_regular_tree(sat, &w.tree(), 1_000_000).expect("within limit"), "{src}");
        }
    }
    assert!(nonempty > 0 && nonempty < SMALL.len());
}

#[test]
fn undefined_label_frames_are_consistent() {
    let s = sig(&["x"], 0, 0, true);
    for root in FrameIter::roots(&s, vec![]) {
        for child in FrameIter::children(&s, &root.bot_layer(), vec![]) {
            assert!(frames_consistent(&root, &child));
            if root.label(0) == Some(ULabel::Undefined) {
                assert_eq!(child.label(TOP), Some(ULabel::Undefined));
            }
        }
    }
}
