//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::collections::{BTreeSet, HashMap};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zalc_automata::{
    accepts_regular_tree, dpw_lasso_table, nbw_lasso_table, ExplicitNbw, LabeledRegularTree,
    RankComplement, SafraDpw,
};
use zalc_core::abstraction::{Frame, FrameIter, Layer, Signature, ULabel, TOP};
use zalc_core::cgraph::{
    check_star, embed_brute, embed_finite, embed_regular, ConstraintGraph, RegularTree, RtNode,
    StarResult, Unary,
};
use zalc_core::normalize::{normalize, normalize_shallow, Normalized};
use zalc_core::pipeline::{build_a_emb, solve, SolveOptions, Verdict};
mod common;

use common::{random_problem, random_regular_tree};
use zalc_core::syntax::{
    parse_alcp_problem, parse_problem, problem_to_string, translate_alcp, Axiom, Concept,
    Constraint, Interpretation, Name, Problem,
};

// Pinned bounds.
const C1_MAX_VERTICES: usize = 5;
const C1_TIME_LIMIT: Duration = Duration::from_secs(60);
const C1_RANDOM_GRAPHS: usize = 50_000;
const C2_AUTOMATA: usize = 200;
const C2_MAX_STATES: usize = 4;
const C2_MAX_LETTERS: u8 = 3;
const C2_MAX_STEM: usize = 5;
const C2_MAX_CYCLE: usize = 5;
const C3_RANDOM_TREES: usize = 40;
const C3_MIN_TREES: usize = 30;
const C3_DEPTHS: std::ops::RangeInclusive<usize> = 1..=6;
const C4_TIME_LIMIT: Duration = Duration::from_secs(600);
const C6_RANDOM_PROBLEMS: usize = 40;
const C6_MAX_VERTICES: usize = 5;
const C6_MAX_NODES: usize = 4;
const STATE_LIMIT: usize = 2_000_000;

struct Outcome {
    pass: bool,
    detail: String,
}

fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 6] = [
        ("oracle equivalence", criterion_oracle),
        ("word automaton algebra", criterion_words),
        ("regular tree cross-validation", criterion_trees),
        ("end-to-end verdicts", criterion_verdicts),
        ("witness validity", criterion_witnesses),
        (
            "normal form golden and equisatisfiability",
            criterion_normal_form,
        ),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {} {name}: {verdict} ({}; {:.1}s)",
            i + 1,
            o.detail,
            start.elapsed().as_secs_f64()
        );
        if !o.pass {
            failed += 1;
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}

// ---------------------------------------------------------------------------
// 1. embed_finite against exhaustive assignment search

/// Vertex labels of the exhaustive scan: none, `= 0`, `= 1`.
fn label_unary(l: u8) -> Option<Unary> {
    match l {
        1 => Some(Unary::Eq(0)),
        2 => Some(Unary::Eq(1)),
        _ => None,
    }
}

/// Relation code of a vertex pair `a < b`: 0 none, 1 `a<b`, 2 `b<a`, 3 `a=b`.
fn rel(code: u64, idx: &[[usize; C1_MAX_VERTICES]; C1_MAX_VERTICES], a: usize, b: usize) -> u64 {
    if a < b {
        (code >> (2 * idx[a][b])) & 3
    } else {
        match (code >> (2 * idx[b][a])) & 3 {
            1 => 2,
            2 => 1,
            r => r,
        }
    }
}

/// Whether swapping `i` and `i + 1` does not yield a smaller code. Every
/// isomorphism class keeps its least code, so filtering on this is sound.
fn minimal_under_swap(
    code: u64,
    n: usize,
    i: usize,
    idx: &[[usize; C1_MAX_VERTICES]; C1_MAX_VERTICES],
) -> bool {
    let swap = |v: usize| {
        if v == i {
            i + 1
        } else if v == i + 1 {
            i
        } else {
            v
        }
    };
    let mut image = 0u64;
    for a in 0..n {
        for b in a + 1..n {
            image |= rel(code, idx, swap(a), swap(b)) << (2 * idx[a][b]);
        }
    }
    code <= image
}

fn sorted_labelings(n: usize) -> Vec<Vec<u8>> {
    let mut out: Vec<Vec<u8>> = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|l| {
                let lo = l.last().copied().unwrap_or(0);
                (lo..3).map(move |x| {
                    let mut l = l.clone();
                    l.push(x);
                    l
                })
            })
            .collect();
    }
    out
}

fn criterion_oracle() -> Outcome {
    let start = Instant::now();
    let mut idx = [[0usize; C1_MAX_VERTICES]; C1_MAX_VERTICES];
    let mut checked = 0u64;
    let (mut bad, mut examples) = (0u64, Vec::new());
    for n in 0..=C1_MAX_VERTICES {
        let mut pairs = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                idx[a][b] = pairs.len();
                pairs.push((a, b));
            }
        }
        for lab in sorted_labelings(n) {
            let swaps: Vec<usize> = (0..n.saturating_sub(1))
                .filter(|&i| lab[i] == lab[i + 1])
                .collect();
            let mut g = ConstraintGraph::with_vertices(n);
            for code in 0..1u64 << (2 * pairs.len()) {
                if !swaps.iter().all(|&i| minimal_under_swap(code, n, i, &idx)) {
                    continue;
                }
                g.less.clear();
                g.equal.clear();
                g.unary.clear();
                for (k, &(a, b)) in pairs.iter().enumerate() {
                    match (code >> (2 * k)) & 3 {
                        1 => g.less.push((a, b)),
                        2 => g.less.push((b, a)),
                        3 => g.equal.push((a, b)),
                        _ => {}
                    }
                }
                g.unary.extend(
                    lab.iter()
                        .enumerate()
                        .filter_map(|(v, &l)| label_unary(l).map(|u| (v, u))),
                );
                checked += 1;
                record(&g, &mut bad, &mut examples);
            }
        }
    }
    // random graphs with all unary kinds and repeated or reflexive edges
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..C1_RANDOM_GRAPHS {
        let n = rng.gen_range(1..=C1_MAX_VERTICES);
        let mut g = ConstraintGraph::with_vertices(n);
        for _ in 0..rng.gen_range(0..=2 * n) {
            let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if rng.gen_bool(0.7) {
                g.less.push((a, b));
            } else {
                g.equal.push((a, b));
            }
        }
        for _ in 0..rng.gen_range(0..=n) {
            let c = rng.gen_range(0..=1);
            let u = [Unary::Eq(c), Unary::Lt(c), Unary::Gt(c)][rng.gen_range(0..3)];
            g.unary.push((rng.gen_range(0..n), u));
        }
        record(&g, &mut bad, &mut examples);
    }
    let elapsed = start.elapsed();
    for d in &examples {
        eprintln!("oracle disagreement on:\n{d}");
    }
    Outcome {
        pass: bad == 0 && elapsed < C1_TIME_LIMIT,
        detail: format!(
            "{checked} graphs up to isomorphism with <= {C1_MAX_VERTICES} vertices plus {C1_RANDOM_GRAPHS} random, \
             {bad} disagreements, {:.1}s of {}s",
            elapsed.as_secs_f64(),
            C1_TIME_LIMIT.as_secs()
        ),
    }
}

fn record(g: &ConstraintGraph, bad: &mut u64, examples: &mut Vec<String>) {
    if !oracles_agree(g) {
        *bad += 1;
        if examples.len() < 3 {
            examples.push(g.to_text());
        }
    }
}

/// With constants in {0, 1}, an embeddable graph on `n` vertices has an
/// assignment in `[-n, n + 1]`: sort the classes and close the gaps.
fn oracles_agree(g: &ConstraintGraph) -> bool {
    let fast = embed_finite(g);
    let brute = embed_brute(g, g.len() as i64 + 1);
    match (&fast, &brute) {
        (Ok(k), Some(_)) => g.satisfied_by(k),
        (Err(_), None) => true,
        _ => false,
    }
}

// ---------------------------------------------------------------------------
// 2. complementation and determinization on lassos

fn random_nbw(rng: &mut ChaCha8Rng, n: usize, letters: u8) -> ExplicitNbw<u8> {
    let mut a = ExplicitNbw::new(n);
    a.initial.push(0);
    if n > 1 && rng.gen_bool(0.3) {
        a.initial.push(rng.gen_range(1..n));
    }
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

fn criterion_words() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut lassos = 0usize;
    let mut complement_violations = 0usize;
    let mut determinization_violations = 0usize;
    let mut accepted = 0usize;
    for _ in 0..C2_AUTOMATA {
        let n = rng.gen_range(1..=C2_MAX_STATES);
        let letters = rng.gen_range(1..=C2_MAX_LETTERS);
        let sigma: Vec<u8> = (0..letters).collect();
        let a = random_nbw(&mut rng, n, letters);
        let ta = nbw_lasso_table(&a, &sigma, C2_MAX_STEM, C2_MAX_CYCLE);
        let tc = nbw_lasso_table(
            &RankComplement::new(a.clone(), n),
            &sigma,
            C2_MAX_STEM,
            C2_MAX_CYCLE,
        );
        let td = dpw_lasso_table(
            &SafraDpw::new(a.clone(), n),
            &sigma,
            C2_MAX_STEM,
            C2_MAX_CYCLE,
        );
        lassos += ta.len();
        accepted += ta.iter().filter(|&&b| b).count();
        complement_violations += ta.iter().zip(&tc).filter(|(x, y)| x == y).count();
        determinization_violations += ta.iter().zip(&td).filter(|(x, y)| x != y).count();
    }
    Outcome {
        pass: complement_violations == 0 && determinization_violations == 0,
        detail: format!(
            "{C2_AUTOMATA} automata, {lassos} lassos ({accepted} accepted), {complement_violations} complement and \
             {determinization_violations} determinization violations"
        ),
    }
}

// ---------------------------------------------------------------------------
// 3. A_emb membership against the path-pair check

fn two_registers() -> Signature {
    Signature::new(vec![Name::new("x"), Name::new("y")], 0, 0)
}

fn one_register() -> Signature {
    Signature::new(vec![Name::new("x")], 0, 0)
}

/// The first root frame satisfying `pred`.
fn root_frame(sig: &Signature, pred: impl Fn(&Frame) -> bool) -> Frame {
    FrameIter::roots(sig, vec![])
        .find(|f| pred(f))
        .expect("root frame")
}

/// The first child frame of `parent` satisfying `pred`.
fn child_frame(sig: &Signature, parent: &Layer, pred: impl Fn(&Frame) -> bool) -> Frame {
    FrameIter::children(sig, parent, vec![])
        .find(|f| pred(f))
        .expect("child frame")
}

/// Root, then one node repeating forever.
fn lollipop(sig: &Signature, root: Frame, step: impl Fn(&Frame) -> bool) -> RegularTree {
    let loop_frame = child_frame(sig, &root.bot_layer(), &step);
    assert_eq!(
        loop_frame.top_layer(),
        loop_frame.bot_layer(),
        "step must preserve the layer"
    );
    RegularTree {
        degree: 1,
        nodes: vec![
            RtNode {
                frame: root,
                children: vec![1],
            },
            RtNode {
                frame: loop_frame,
                children: vec![1],
            },
        ],
    }
}

const X: u32 = 0;
const Y: u32 = 1;

fn hand_built_trees() -> Vec<(&'static str, Signature, RegularTree)> {
    let s2 = two_registers();
    let s1 = one_register();
    let base = |f: &Frame| {
        f.less(X, Y) && f.label(X) == Some(ULabel::Above) && f.label(Y) == Some(ULabel::Above)
    };
    let root2 = root_frame(&s2, |f| base(f));
    let mut out = Vec::new();
    // x grows below an unchanging y
    out.push((
        "x grows under fixed y",
        s2.clone(),
        lollipop(&s2, root2.clone(), |f| {
            base(f) && f.less(X + TOP, X) && f.equal(Y + TOP, Y)
        }),
    ));
    // both grow, y stays ahead
    out.push((
        "x and y grow together",
        s2.clone(),
        lollipop(&s2, root2.clone(), |f| {
            base(f) && f.less(X + TOP, X) && f.less(Y + TOP, Y) && f.less(Y + TOP, X)
        }),
    ));
    // nested intervals
    out.push((
        "shrinking interval",
        s2.clone(),
        lollipop(&s2, root2.clone(), |f| {
            base(f) && f.less(X + TOP, X) && f.less(Y, Y + TOP)
        }),
    ));
    // y falls toward a fixed x
    out.push((
        "y falls above fixed x",
        s2.clone(),
        lollipop(&s2, root2.clone(), |f| {
            base(f) && f.equal(X + TOP, X) && f.less(Y, Y + TOP)
        }),
    ));
    // both fall
    out.push((
        "x and y fall together",
        s2.clone(),
        lollipop(&s2, root2.clone(), |f| {
            base(f) && f.less(X, X + TOP) && f.less(Y, Y + TOP) && f.less(Y, X + TOP)
        }),
    ));
    out.push((
        "constant padding",
        s2.clone(),
        lollipop(&s2, root2.clone(), |f| {
            base(f) && f.equal(X + TOP, X) && f.equal(Y + TOP, Y)
        }),
    ));
    let root1 = root_frame(&s1, |f| f.label(X) == Some(ULabel::Above));
    out.push((
        "single register increasing",
        s1.clone(),
        lollipop(&s1, root1.clone(), |f| f.less(X + TOP, X)),
    ));
    out.push((
        "single register decreasing",
        s1.clone(),
        lollipop(&s1, root1, |f| {
            f.less(X, X + TOP) && f.label(X) == f.label(X + TOP)
        }),
    ));
    // binary: a bad branch next to a harmless one, and two harmless branches
    let bad = child_frame(&s2, &root2.bot_layer(), |f| {
        base(f) && f.less(X + TOP, X) && f.equal(Y + TOP, Y)
    });
    let good = child_frame(&s2, &root2.bot_layer(), |f| {
        base(f) && f.less(X + TOP, X) && f.less(Y + TOP, Y) && f.less(Y + TOP, X)
    });
    let pad = root2.bot_layer().padding_frame();
    let binary = |left: &Frame, right: &Frame| RegularTree {
        degree: 2,
        nodes: vec![
            RtNode {
                frame: root2.clone(),
                children: vec![1, 2],
            },
            RtNode {
                frame: left.clone(),
                children: vec![1, 2],
            },
            RtNode {
                frame: right.clone(),
                children: vec![2, 2],
            },
        ],
    };
    out.push((
        "binary with a fixed-y branch",
        s2.clone(),
        binary(&bad, &pad),
    ));
    out.push((
        "binary with growing branches",
        s2.clone(),
        binary(&good, &pad),
    ));
    out
}

fn criterion_trees() -> Outcome {
    let mut trees: Vec<(String, Signature, RegularTree)> = hand_built_trees()
        .into_iter()
        .map(|(n, s, t)| (n.to_string(), s, t))
        .collect();
    // random trees, kept so that both verdicts are equally represented
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut quota = [C3_RANDOM_TREES / 2; 2];
    for i in 0..100 * C3_RANDOM_TREES {
        if quota == [0, 0] {
            break;
        }
        let sig = if i % 4 == 0 {
            one_register()
        } else {
            two_registers()
        };
        let degree = 1 + i % 2;
        let t = random_regular_tree(&mut rng, &sig, degree, 5);
        let class = usize::from(matches!(check_star(&t, &sig), StarResult::Violated(_)));
        if quota[class] > 0 {
            quota[class] -= 1;
            trees.push((format!("random {i}"), sig, t));
        }
    }
    let mut problems = Vec::new();
    let (mut satisfied, mut violated) = (0, 0);
    for (name, sig, rt) in &trees {
        if let Err(e) = rt.validate(sig) {
            problems.push(format!("{name}: invalid tree: {e}"));
            continue;
        }
        let star = check_star(rt, sig);
        let a = match build_a_emb(sig, rt.degree) {
            Ok(a) => a,
            Err(e) => {
                problems.push(format!("{name}: {e}"));
                continue;
            }
        };
        let labeled = LabeledRegularTree {
            labels: rt.nodes.iter().map(|n| n.frame.clone()).collect(),
            children: rt.nodes.iter().map(|n| n.children.clone()).collect(),
        };
        let member = match accepts_regular_tree(&a, &labeled, STATE_LIMIT) {
            Ok(b) => b,
            Err(e) => {
                problems.push(format!("{name}: {e}"));
                continue;
            }
        };
        match &star {
            StarResult::Satisfied => {
                satisfied += 1;
                for d in C3_DEPTHS {
                    if embed_regular(rt, sig, d).is_err() {
                        problems.push(format!(
                            "{name}: satisfied but depth {d} unfolding is not embeddable"
                        ));
                    }
                }
            }
            StarResult::Violated(w) => {
                violated += 1;
                if let Err(e) = w.verify(rt, sig) {
                    problems.push(format!("{name}: bad violation witness: {e}"));
                }
            }
        }
        if member != matches!(star, StarResult::Satisfied) {
            problems.push(format!(
                "{name}: automaton says {member}, path check says {star:?}"
            ));
        }
    }
    for p in &problems {
        eprintln!("{p}");
    }
    Outcome {
        pass: problems.is_empty() && trees.len() >= C3_MIN_TREES && satisfied > 0 && violated > 0,
        detail: format!(
            "{} trees ({satisfied} satisfied, {violated} violated), {} problems",
            trees.len(),
            problems.len()
        ),
    }
}

// ---------------------------------------------------------------------------
// 4 and 5. corpus verdicts and witness validation

struct CorpusEntry {
    name: String,
    problem: Problem,
    expect: Verdict,
}

fn load_file(path: &Path) -> Result<Problem, String> {
    let src = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    if path.extension().is_some_and(|e| e == "alcp") {
        let p = parse_alcp_problem(&src).map_err(|e| e.to_string())?;
        translate_alcp(&p).map_err(|e| e.to_string())
    } else {
        parse_problem(&src).map_err(|e| e.to_string())
    }
}

fn load_corpus() -> Result<Vec<CorpusEntry>, String> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(corpus_dir())
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "zalc" || e == "alcp"))
        .collect();
    paths.sort();
    let mut out = Vec::new();
    for path in paths {
        let src = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
        let expect = match src.lines().next().map(str::trim) {
            Some("; expect: SAT") => Verdict::Sat,
            Some("; expect: UNSAT") => Verdict::Unsat,
            _ => return Err(format!("{}: missing expect line", path.display())),
        };
        let problem = load_file(&path).map_err(|e| format!("{}: {e}", path.display()))?;
        let name = path
            .file_name()
            .expect("file name")
            .to_string_lossy()
            .into_owned();
        out.push(CorpusEntry {
            name,
            problem,
            expect,
        });
    }
    Ok(out)
}

fn criterion_verdicts() -> Outcome {
    let start = Instant::now();
    let corpus = match load_corpus() {
        Ok(c) => c,
        Err(e) => {
            return Outcome {
                pass: false,
                detail: e,
            }
        }
    };
    let mut wrong = Vec::new();
    let (mut sat, mut unsat) = (0, 0);
    let opts = SolveOptions {
        state_limit: STATE_LIMIT,
        ..SolveOptions::default()
    };
    for e in &corpus {
        match solve(&e.problem, &opts) {
            Ok(r) if r.verdict == e.expect => {
                if r.verdict == Verdict::Sat {
                    sat += 1;
                } else {
                    unsat += 1;
                }
            }
            Ok(r) => wrong.push(format!(
                "{}: got {}, expected {}",
                e.name, r.verdict, e.expect
            )),
            Err(err) => wrong.push(format!("{}: {err}", e.name)),
        }
    }
    let elapsed = start.elapsed();
    for w in &wrong {
        eprintln!("{w}");
    }
    Outcome {
        pass: wrong.is_empty() && elapsed < C4_TIME_LIMIT,
        detail: format!(
            "{} instances ({sat} SAT, {unsat} UNSAT as expected), {} wrong, {:.1}s of {}s",
            corpus.len(),
            wrong.len(),
            elapsed.as_secs_f64(),
            C4_TIME_LIMIT.as_secs()
        ),
    }
}

fn criterion_witnesses() -> Outcome {
    let corpus = match load_corpus() {
        Ok(c) => c,
        Err(e) => {
            return Outcome {
                pass: false,
                detail: e,
            }
        }
    };
    let mut problems = Vec::new();
    let mut checked = 0;
    for full in [false, true] {
        let opts = SolveOptions {
            state_limit: STATE_LIMIT,
            full_normal_form: full,
            ..SolveOptions::default()
        };
        for e in &corpus {
            let r = match solve(&e.problem, &opts) {
                Ok(r) => r,
                Err(err) => {
                    problems.push(format!("{}: {err}", e.name));
                    continue;
                }
            };
            if r.verdict != Verdict::Sat {
                continue;
            }
            checked += 1;
            match &r.validation {
                Some(v) if v.ok() => {}
                Some(v) => problems.push(format!("{}: {}", e.name, v.problems.join("; "))),
                None => problems.push(format!("{}: SAT without validation", e.name)),
            }
        }
    }
    for p in &problems {
        eprintln!("{p}");
    }
    Outcome {
        pass: problems.is_empty() && checked > 0,
        detail: format!(
            "{checked} SAT reports over both normal forms, {} failed re-validation",
            problems.len()
        ),
    }
}

// ---------------------------------------------------------------------------
// 6. golden normal form and bounded-model equisatisfiability

/// Order types of `k` integers relative to the constants 0 and 1, each
/// realized by `embed_finite` on the graph describing the type.
fn realized_order_types(k: usize) -> Result<Vec<Vec<i64>>, String> {
    let range: Vec<i64> = (-(k as i64)..=k as i64 + 1).collect();
    let mut types: BTreeSet<Vec<i8>> = BTreeSet::new();
    let mut vals = vec![0i64; k];
    let key = |v: &[i64]| -> Vec<i8> {
        let mut out = Vec::new();
        for (i, &a) in v.iter().enumerate() {
            out.push(a.cmp(&0) as i8);
            out.push(a.cmp(&1) as i8);
            for &b in &v[i + 1..] {
                out.push(a.cmp(&b) as i8);
            }
        }
        out
    };
    fn rec(i: usize, vals: &mut Vec<i64>, range: &[i64], f: &mut dyn FnMut(&[i64])) {
        if i == vals.len() {
            f(vals);
            return;
        }
        for &v in range {
            vals[i] = v;
            rec(i + 1, vals, range, f);
        }
    }
    rec(0, &mut vals, &range, &mut |v| {
        types.insert(key(v));
    });
    let mut out = Vec::new();
    for t in types {
        let mut g = ConstraintGraph::with_vertices(k);
        let mut pos = 0;
        for i in 0..k {
            let (c0, c1) = (t[pos], t[pos + 1]);
            pos += 2;
            g.unary.push((
                i,
                match (c0, c1) {
                    (-1, _) => Unary::Lt(0),
                    (0, _) => Unary::Eq(0),
                    (_, 0) => Unary::Eq(1),
                    _ => Unary::Gt(1),
                },
            ));
            for j in i + 1..k {
                match t[pos] {
                    -1 => g.less.push((i, j)),
                    0 => g.equal.push((i, j)),
                    _ => g.less.push((j, i)),
                }
                pos += 1;
            }
        }
        let kappa = embed_finite(&g).map_err(|_| format!("order type {t:?} is not realizable"))?;
        if key(&kappa) != t {
            return Err(format!("order type {t:?} realized as {kappa:?}"));
        }
        out.push(kappa);
    }
    Ok(out)
}

/// Parent arrays of all rooted trees with `n` nodes in breadth-first order.
fn tree_shapes(n: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![vec![usize::MAX]];
    for i in 1..n {
        out = out
            .into_iter()
            .flat_map(|p| {
                let lo = p.last().copied().filter(|&x| x != usize::MAX).unwrap_or(0);
                (lo..i).map(move |q| {
                    let mut p = p.clone();
                    p.push(q);
                    p
                })
            })
            .collect();
    }
    out
}

fn ancestor(parent: &[usize], mut e: usize, k: u32) -> Option<usize> {
    for _ in 0..k {
        if parent[e] == usize::MAX {
            return None;
        }
        e = parent[e];
    }
    Some(e)
}

/// Adds copy registers and the largest consistent test-name assignment.
fn extend(i: &Interpretation, parent: &[usize], n: &Normalized, anf: &Problem) -> Interpretation {
    let mut j = i.clone();
    for c in &n.copies {
        let vals = (0..i.size)
            .map(|e| ancestor(parent, e, c.level).map_or(0, |a| i.value(a, &c.register)))
            .collect();
        j.registers.insert(c.name.clone(), vals);
    }
    let tests: BTreeSet<Name> = n.tests.iter().map(|t| t.name.clone()).collect();
    for t in &tests {
        j.concepts.insert(t.clone(), vec![true; i.size]);
    }
    let defs: Vec<&Axiom> = anf
        .tbox
        .axioms
        .iter()
        .filter(|a| matches!(&a.lhs, Concept::Name(t) if tests.contains(t)))
        .collect();
    loop {
        let mut changed = false;
        for ax in &defs {
            let Concept::Name(t) = &ax.lhs else {
                unreachable!()
            };
            let rhs = j.eval(&ax.rhs);
            let cur = j.concepts.get_mut(t).expect("test name");
            for (c, r) in cur.iter_mut().zip(rhs) {
                if *c && !r {
                    *c = false;
                    changed = true;
                }
            }
        }
        if !changed {
            return j;
        }
    }
}

/// Registers introduced for negated constant equalities, with their constant.
fn constant_registers(nnf: &Problem, original: &Problem) -> Vec<(Name, i64)> {
    let known = original.registers();
    let mut out = BTreeSet::new();
    for c in nnf.all_concepts() {
        for (_, t, _) in c.path_constraints() {
            for s in t.subconstraints() {
                if let Constraint::EqualConst(x, k) = s {
                    if !known.contains(&x.reg) {
                        out.insert((
                            x.reg.clone(),
                            i64::try_from(k.clone()).expect("small constant"),
                        ));
                    }
                }
            }
        }
    }
    out.into_iter().collect()
}

#[derive(Default)]
struct Equisat {
    interpretations: usize,
    models: usize,
    mismatches: usize,
    /// Disagreements of the negation, full and shallow normal forms.
    by_stage: [usize; 3],
    example: Option<String>,
}

fn root_model(i: &Interpretation, p: &Problem) -> bool {
    i.models(p).is_some_and(|v| v[0])
}

/// Compares the problem, its negation normal form and both atomic normal
/// forms on every tree interpretation within the bounds.
fn bounded_equisat(
    p: &Problem,
    cache: &mut HashMap<usize, Vec<Vec<i64>>>,
) -> Result<Equisat, String> {
    let full = normalize(p).map_err(|e| e.to_string())?;
    let shallow = normalize_shallow(p).map_err(|e| e.to_string())?;
    let shallow_anf = shallow.pruned();
    let regs: Vec<Name> = p.registers().into_iter().collect();
    let consts = constant_registers(&full.nnf, p);
    let roles: Vec<Name> = p.roles().into_iter().collect();
    let names: Vec<Name> = p.concept_names().into_iter().collect();
    let max_nodes = if regs.is_empty() {
        C6_MAX_NODES
    } else {
        (C6_MAX_VERTICES / regs.len()).min(C6_MAX_NODES)
    };
    let mut out = Equisat::default();
    for nodes in 1..=max_nodes {
        let k = nodes * regs.len();
        if !cache.contains_key(&k) {
            cache.insert(k, realized_order_types(k)?);
        }
        let kappas = &cache[&k];
        for parent in tree_shapes(nodes) {
            let edges = nodes - 1;
            let role_choices = roles.len().max(1).pow(edges as u32);
            for rc in 0..role_choices {
                let mut i = Interpretation::new(nodes);
                for (z, k) in &consts {
                    i.registers.insert(z.clone(), vec![*k; nodes]);
                }
                let mut code = rc;
                for r in &roles {
                    i.roles.insert(r.clone(), Vec::new());
                }
                for (e, &pa) in parent.iter().enumerate().skip(1) {
                    if roles.is_empty() {
                        break;
                    }
                    let r = &roles[code % roles.len()];
                    code /= roles.len();
                    i.roles.get_mut(r).expect("role").push((pa, e));
                }
                for nc in 0..1usize << (nodes * names.len()) {
                    for (a, nm) in names.iter().enumerate() {
                        i.concepts.insert(
                            nm.clone(),
                            (0..nodes).map(|e| nc >> (a * nodes + e) & 1 == 1).collect(),
                        );
                    }
                    for kappa in kappas {
                        for (a, r) in regs.iter().enumerate() {
                            i.registers
                                .insert(r.clone(), kappa[a * nodes..(a + 1) * nodes].to_vec());
                        }
                        out.interpretations += 1;
                        let orig = root_model(&i, p);
                        let nnf = root_model(&i, &full.nnf);
                        let anf = root_model(&extend(&i, &parent, &full, &full.anf), &full.anf);
                        let sh =
                            root_model(&extend(&i, &parent, &shallow, &shallow_anf), &shallow_anf);
                        if orig {
                            out.models += 1;
                        }
                        if orig != nnf || orig != anf || orig != sh {
                            out.mismatches += 1;
                            for (k, b) in [nnf, anf, sh].into_iter().enumerate() {
                                out.by_stage[k] += usize::from(b != orig);
                            }
                            if out.example.is_none() {
                                out.example = Some(format!(
                                    "original {orig}, nnf {nnf}, full {anf}, shallow {sh} on {i:?} with parents {parent:?}"
                                ));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

fn criterion_normal_form() -> Outcome {
    let mut problems = Vec::new();
    // golden file
    let dir = corpus_dir();
    let golden = std::fs::read_to_string(dir.join("a1_worked_example.anf.golden"));
    let produced = load_file(&dir.join("a1_worked_example.zalc"))
        .and_then(|p| normalize(&p).map_err(|e| e.to_string()))
        .map(|n| n.render());
    match (golden, produced) {
        (Ok(g), Ok(p)) if g == p => {}
        (Ok(_), Ok(_)) => problems.push("worked example differs from the golden file".to_string()),
        (Err(e), _) => problems.push(format!("golden file: {e}")),
        (_, Err(e)) => problems.push(format!("worked example: {e}")),
    }
    // bounded models
    let mut cache = HashMap::new();
    let mut inputs: Vec<(String, Problem)> = Vec::new();
    match load_corpus() {
        Ok(c) => inputs.extend(c.into_iter().map(|e| (e.name, e.problem))),
        Err(e) => problems.push(e),
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for i in 0..C6_RANDOM_PROBLEMS {
        inputs.push((format!("random {i}"), random_problem(&mut rng)));
    }
    let mut total = Equisat::default();
    let (mut sat_inputs, mut checked_inputs) = (0, 0);
    for (name, p) in &inputs {
        // only inputs whose register count leaves room for at least two nodes
        if p.registers().len() * 2 > C6_MAX_VERTICES {
            continue;
        }
        checked_inputs += 1;
        match bounded_equisat(p, &mut cache) {
            Ok(r) => {
                if r.models > 0 {
                    sat_inputs += 1;
                }
                if r.mismatches > 0 {
                    problems.push(format!(
                        "{name}: {} of {} interpretations disagree (nnf {}, full {}, shallow {})",
                        r.mismatches,
                        r.interpretations,
                        r.by_stage[0],
                        r.by_stage[1],
                        r.by_stage[2]
                    ));
                    eprintln!(
                        "{}\n{}",
                        problem_to_string(p),
                        r.example.as_deref().unwrap_or("")
                    );
                }
                total.interpretations += r.interpretations;
                total.models += r.models;
                total.mismatches += r.mismatches;
            }
            Err(e) => problems.push(format!("{name}: {e}")),
        }
    }
    for p in &problems {
        eprintln!("{p}");
    }
    Outcome {
        pass: problems.is_empty(),
        detail: format!(
            "golden file checked; {checked_inputs} inputs ({sat_inputs} with bounded models), {} interpretations, \
             {} mismatches",
            total.interpretations, total.mismatches
        ),
    }
}
