//! From a parsed problem to a verdict: normalization, abstraction, the tree
//! automata and their emptiness check, and re-validation of witnesses.

pub mod act;
pub mod alcf;
pub mod bw;
pub mod sat;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;
use zalc_automata::{emptiness, verify_witness, AutomataError, RegularTreeWitness, TreeAutomaton};

pub use act::{build_a_emb, AEmb, Act, CtState};
pub use alcf::{Alcf, AlcfState, Link, Xi};
pub use bw::{emb_dpw, Bw, BwState, EmbDpw};
pub use sat::{is_identity_frame, Matching, PairedLetter, SatAutomaton, SatState};

use crate::abstraction::{abstract_problem, AbstractError, AbstractProblem, Frame};
use crate::cgraph::{
    build_constraint_graph, embed_finite, framed_graph, TreeInterpretation, TreeShape,
};
use crate::normalize::{normalize, normalize_shallow, NormalizeError, Normalized};
use crate::syntax::ast::{Name, Problem};
use crate::syntax::semantics::Interpretation;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error(transparent)]
    Normalize(#[from] NormalizeError),
    #[error(transparent)]
    Abstract(#[from] AbstractError),
    #[error("automaton construction failed: {0}")]
    Automata(#[from] AutomataError),
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    /// Depth of the integer prefix computed for a witness.
    pub witness_depth: usize,
    /// Allow registers without a value.
    pub und: bool,
    /// Bound on explored automaton states.
    pub state_limit: usize,
    /// Route every constraint with a nonempty path through copy registers,
    /// instead of keeping atomic single-role constraints.
    pub full_normal_form: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            witness_depth: 4,
            und: false,
            state_limit: 1_000_000,
            full_normal_form: false,
        }
    }
}

/// The stages leading up to the automaton.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub normalized: Normalized,
    /// The normal form actually used, with unused copy levels removed.
    pub anf: Problem,
    pub abstracted: AbstractProblem,
    pub automaton: SatAutomaton,
}

pub fn prepare(p: &Problem, opts: &SolveOptions) -> Result<Prepared, SolveError> {
    let normalized = if opts.full_normal_form {
        normalize(p)?
    } else {
        normalize_shallow(p)?
    };
    let anf = normalized.pruned();
    let mut abstracted = abstract_problem(&anf)?;
    abstracted.signature.und = opts.und;
    let automaton = SatAutomaton::new(&abstracted, normalized.degree.n);
    Ok(Prepared {
        normalized,
        anf,
        abstracted,
        automaton,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "SAT")]
    Sat,
    #[serde(rename = "UNSAT")]
    Unsat,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Sat => "SAT",
            Verdict::Unsat => "UNSAT",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessRow {
    pub id: usize,
    pub link: String,
    pub names: Vec<String>,
    pub frame: String,
    pub children: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PrefixNode {
    pub id: usize,
    pub parent: Option<usize>,
    /// Witness node this prefix node unfolds.
    pub origin: usize,
    /// `None` for undefined registers.
    pub values: BTreeMap<String, Option<i64>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Prefix {
    pub depth: usize,
    pub nodes: Vec<PrefixNode>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Validation {
    /// The annotated run re-checks as an accepting run.
    pub run: bool,
    /// The prefix values satisfy the placeholder constraint graph and frames.
    pub prefix: bool,
    /// The concept-name projection is a model of the abstract problem.
    pub model: bool,
    pub problems: Vec<String>,
}

impl Validation {
    pub fn ok(&self) -> bool {
        self.run && self.prefix && self.model
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Stats {
    pub registers: usize,
    pub placeholders: usize,
    pub subconcepts: usize,
    pub degree: usize,
    pub max_priority: u32,
    pub automaton_states: usize,
    pub moves: usize,
    pub game_vertices: usize,
    pub conversion: String,
    pub millis: u128,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    pub verdict: Verdict,
    pub witness: Option<Vec<WitnessRow>>,
    pub prefix: Option<Prefix>,
    pub validation: Option<Validation>,
    pub stats: Stats,
    #[serde(skip)]
    pub run: Option<RegularTreeWitness<SatState, PairedLetter>>,
}

/// Decides satisfiability of the problem's concept w.r.t. its TBox.
pub fn solve(p: &Problem, opts: &SolveOptions) -> Result<SolveReport, SolveError> {
    let start = Instant::now();
    let prep = prepare(p, opts)?;
    solve_prepared(&prep, opts, start)
}

pub fn solve_prepared(
    prep: &Prepared,
    opts: &SolveOptions,
    start: Instant,
) -> Result<SolveReport, SolveError> {
    let a = &prep.automaton;
    let ap = &prep.abstracted;
    log::info!(
        "{} registers, {} placeholders, {} subconcepts, degree {}",
        ap.signature.m(),
        ap.placeholders.len(),
        a.alcf.closure.len(),
        a.degree()
    );
    let result = emptiness(a, opts.state_limit)?;
    let mut stats = Stats {
        registers: ap.signature.m(),
        placeholders: ap.placeholders.len(),
        subconcepts: a.alcf.closure.len(),
        degree: a.degree(),
        max_priority: zalc_automata::DetParityWordAutomaton::max_priority(&a.dpw),
        automaton_states: result.stats.automaton_states,
        moves: result.stats.moves,
        game_vertices: result.stats.game_vertices,
        conversion: result.stats.conversion.clone(),
        millis: 0,
    };
    let Some(run) = result.witness else {
        stats.millis = start.elapsed().as_millis();
        return Ok(SolveReport {
            verdict: Verdict::Unsat,
            witness: None,
            prefix: None,
            validation: None,
            stats,
            run: None,
        });
    };
    let rows = witness_rows(&run, ap);
    let (prefix, validation) = validate(&run, a, ap, opts.witness_depth);
    stats.millis = start.elapsed().as_millis();
    Ok(SolveReport {
        verdict: Verdict::Sat,
        witness: Some(rows),
        prefix,
        validation: Some(validation),
        stats,
        run: Some(run),
    })
}

fn link_text(l: &Link) -> String {
    match l {
        Link::Root => "root".into(),
        Link::Role(r) => r.to_string(),
        Link::Padding => "padding".into(),
    }
}

pub fn witness_rows(
    w: &RegularTreeWitness<SatState, PairedLetter>,
    ap: &AbstractProblem,
) -> Vec<WitnessRow> {
    w.nodes
        .iter()
        .enumerate()
        .map(|(id, n)| WitnessRow {
            id,
            link: link_text(&n.letter.1.link),
            names: n.letter.1.names.iter().map(|x| x.to_string()).collect(),
            frame: n.letter.0.render(&ap.signature),
            children: n.children.clone(),
        })
        .collect()
}

/// The finite interpretation read off the non-padding witness nodes; also
/// returns the element of each witness node.
pub fn witness_interpretation(
    w: &RegularTreeWitness<SatState, PairedLetter>,
) -> (Interpretation, Vec<Option<usize>>) {
    let mut elem = vec![None; w.nodes.len()];
    let mut count = 0;
    for (i, n) in w.nodes.iter().enumerate() {
        if !n.letter.1.is_padding() {
            elem[i] = Some(count);
            count += 1;
        }
    }
    let mut it = Interpretation::new(count);
    for (i, n) in w.nodes.iter().enumerate() {
        let Some(e) = elem[i] else { continue };
        for a in &n.letter.1.names {
            it.concepts
                .entry(a.clone())
                .or_insert_with(|| vec![false; count])[e] = true;
        }
        let mut seen = BTreeSet::new();
        for &c in &n.children {
            if let (Some(d), Link::Role(r)) = (elem[c], &w.nodes[c].letter.1.link) {
                if seen.insert((r.clone(), d)) {
                    it.roles.entry(r.clone()).or_default().push((e, d));
                }
            }
        }
    }
    (it, elem)
}

/// Unfolding of the witness to `depth`, skipping padding subtrees.
pub fn unfold_witness(
    w: &RegularTreeWitness<SatState, PairedLetter>,
    depth: usize,
) -> (TreeShape, Vec<Frame>, Vec<BTreeSet<Name>>, Vec<usize>) {
    let mut parent = vec![None];
    let mut origin = vec![0usize];
    let mut level = vec![0usize];
    let mut queue = VecDeque::from([0usize]);
    while let Some(u) = queue.pop_front() {
        if level[u] == depth {
            continue;
        }
        for &c in &w.nodes[origin[u]].children {
            if w.nodes[c].letter.1.is_padding() {
                continue;
            }
            let id = parent.len();
            parent.push(Some(u));
            origin.push(c);
            level.push(level[u] + 1);
            queue.push_back(id);
        }
    }
    let frames = origin
        .iter()
        .map(|&o| w.nodes[o].letter.0.clone())
        .collect();
    let names = origin
        .iter()
        .map(|&o| w.nodes[o].letter.1.names.iter().cloned().collect())
        .collect();
    (TreeShape { parent }, frames, names, origin)
}

/// Re-checks a witness independently of the emptiness game: the run, the
/// integer prefix and the model property of the name projection.
pub fn validate(
    w: &RegularTreeWitness<SatState, PairedLetter>,
    a: &SatAutomaton,
    ap: &AbstractProblem,
    depth: usize,
) -> (Option<Prefix>, Validation) {
    let mut v = Validation::default();
    match verify_witness(a, w) {
        Ok(()) => v.run = true,
        Err(e) => v.problems.push(format!("run: {e}")),
    }
    let sig = &ap.signature;
    let m = sig.m();
    let (shape, frames, names, origin) = unfold_witness(w, depth);
    let mut prefix = None;
    let t = TreeInterpretation {
        shape: shape.clone(),
        names,
    };
    match build_constraint_graph(&t, &ap.placeholders, sig) {
        None => v
            .problems
            .push("prefix: edge constraint at the root".into()),
        Some(g) => {
            let gf = framed_graph(&shape, &frames, sig);
            match embed_finite(&gf) {
                Err(c) => v.problems.push(format!(
                    "prefix: frames not embeddable: {}",
                    c.describe(&gf)
                )),
                Ok(kappa) => {
                    if g.satisfied_by(&kappa) {
                        v.prefix = true;
                    } else {
                        v.problems
                            .push("prefix: values violate a placeholder".into());
                    }
                    let nodes = (0..shape.len())
                        .map(|u| PrefixNode {
                            id: u,
                            parent: shape.parent[u],
                            origin: origin[u],
                            values: sig
                                .registers
                                .iter()
                                .enumerate()
                                .map(|(i, r)| {
                                    let und = frames[u].undefined >> i & 1 == 1;
                                    (r.to_string(), (!und).then(|| kappa[shape.vertex(u, i, m)]))
                                })
                                .collect(),
                        })
                        .collect();
                    prefix = Some(Prefix { depth, nodes });
                }
            }
        }
    }
    let (it, elem) = witness_interpretation(w);
    match it.models(&ap.problem) {
        Some(sat) if elem[0].is_some_and(|e| sat[e]) => v.model = true,
        Some(_) => v
            .problems
            .push("model: root does not satisfy the concept".into()),
        None => v
            .problems
            .push("model: an axiom or functionality fails".into()),
    }
    (prefix, v)
}

/// Human-readable report.
pub fn render_report(r: &SolveReport, with_witness: bool, with_stats: bool) -> String {
    let mut s = format!("{}\n", r.verdict);
    if with_witness {
        if let Some(rows) = &r.witness {
            s.push_str("witness:\n");
            for row in rows {
                let kids: Vec<String> = row.children.iter().map(|c| c.to_string()).collect();
                writeln!(
                    s,
                    "  {} [{}] {{{}}} {} -> {}",
                    row.id,
                    row.link,
                    row.names.join(" "),
                    row.frame,
                    kids.join(" ")
                )
                .expect("write to string");
            }
        }
        if let Some(p) = &r.prefix {
            writeln!(s, "prefix (depth {}):", p.depth).expect("write to string");
            for n in &p.nodes {
                let vals: Vec<String> = n
                    .values
                    .iter()
                    .map(|(k, v)| match v {
                        Some(x) => format!("{k}={x}"),
                        None => format!("{k}=und"),
                    })
                    .collect();
                let parent = n.parent.map_or("-".to_string(), |p| p.to_string());
                writeln!(
                    s,
                    "  {} parent {} node {}: {}",
                    n.id,
                    parent,
                    n.origin,
                    vals.join(" ")
                )
                .expect("write to string");
            }
        }
        if let Some(v) = &r.validation {
            writeln!(
                s,
                "validation: run {} prefix {} model {}",
                ok(v.run),
                ok(v.prefix),
                ok(v.model)
            )
            .expect("write to string");
            for p in &v.problems {
                writeln!(s, "  {p}").expect("write to string");
            }
        }
    }
    if with_stats {
        let st = &r.stats;
        writeln!(
            s,
            "stats: registers {} placeholders {} subconcepts {} degree {} max-priority {} states {} moves {} game-vertices {} conversion {} time {}ms",
            st.registers,
            st.placeholders,
            st.subconcepts,
            st.degree,
            st.max_priority,
            st.automaton_states,
            st.moves,
            st.game_vertices,
            st.conversion,
            st.millis
        )
        .expect("write to string");
    }
    s
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "FAILED"
    }
}

/// Graphviz rendering of a witness.
pub fn witness_dot(w: &RegularTreeWitness<SatState, PairedLetter>, ap: &AbstractProblem) -> String {
    let mut s = String::from("digraph witness {\n  node [shape=box];\n");
    for (i, n) in w.nodes.iter().enumerate() {
        let label = format!("{i}: {}\\n{}", n.letter.1, n.letter.0.render(&ap.signature))
            .replace('"', "\\\"");
        writeln!(s, "  w{i} [label=\"{label}\"];").expect("write to string");
        for (d, c) in n.children.iter().enumerate() {
            if !w.nodes[*c].letter.1.is_padding() {
                writeln!(s, "  w{i} -> w{c} [label=\"{}\"];", d + 1).expect("write to string");
            }
        }
    }
    s.push_str("}\n");
    s
}

/// Summary of the automata for `--dump automata`.
pub fn describe_automata(prep: &Prepared) -> String {
    let a = &prep.automaton;
    let ap = &prep.abstracted;
    let b = Bw::new(&ap.signature);
    let mut s = String::new();
    writeln!(
        s,
        "registers: {}",
        ap.signature
            .registers
            .iter()
            .map(|r| r.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    )
    .expect("write to string");
    writeln!(
        s,
        "constant range: {} .. {}",
        ap.signature.c0, ap.signature.calpha
    )
    .expect("write to string");
    writeln!(s, "path-pair automaton: at most {} states", b.state_count())
        .expect("write to string");
    writeln!(
        s,
        "determinized complement: priorities 0..={}",
        zalc_automata::DetParityWordAutomaton::max_priority(&a.dpw)
    )
    .expect("write to string");
    writeln!(
        s,
        "alcf automaton: {} subconcepts, degree {}",
        a.alcf.closure.len(),
        a.degree()
    )
    .expect("write to string");
    for p in &ap.placeholders {
        writeln!(s, "placeholder {}", p.describe()).expect("write to string");
    }
    s
}
