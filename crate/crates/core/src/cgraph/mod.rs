//! Finite constraint graphs over integers and their embeddability, plus
//! finite and regular tree-shaped graphs built from frames.

pub mod tree;

use std::collections::HashMap;
use std::fmt::Write;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use thiserror::Error;

pub use tree::{
    build_constraint_graph, check_star, embed_regular, framed_graph, unfold, RegularTree, RtNode,
    StarResult, StarState, StarWitness, TreeInterpretation, TreeShape,
};

/// Unary constraint against a constant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Unary {
    Eq(i64),
    Lt(i64),
    Gt(i64),
}

impl Unary {
    pub fn holds(self, v: i64) -> bool {
        match self {
            Unary::Eq(c) => v == c,
            Unary::Lt(c) => v < c,
            Unary::Gt(c) => v > c,
        }
    }
}

/// A directed graph with strict edges (`a < b`), equality edges (`a = b`) and
/// unary constant constraints.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConstraintGraph {
    pub names: Vec<String>,
    pub less: Vec<(usize, usize)>,
    pub equal: Vec<(usize, usize)>,
    pub unary: Vec<(usize, Unary)>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl ConstraintGraph {
    pub fn with_vertices(n: usize) -> Self {
        ConstraintGraph {
            names: (0..n).map(|i| format!("v{i}")).collect(),
            ..Default::default()
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn add_vertex(&mut self, name: impl Into<String>) -> usize {
        self.names.push(name.into());
        self.names.len() - 1
    }

    /// Whether an assignment satisfies every edge and unary constraint.
    pub fn satisfied_by(&self, kappa: &[i64]) -> bool {
        kappa.len() == self.len()
            && self.less.iter().all(|&(a, b)| kappa[a] < kappa[b])
            && self.equal.iter().all(|&(a, b)| kappa[a] == kappa[b])
            && self.unary.iter().all(|&(a, u)| u.holds(kappa[a]))
    }

    /// Line format: `less A B`, `equal A B`, `const A C`, `lt A C`, `gt A C`,
    /// `vertex A`; `#` starts a comment. Vertices are declared on first use.
    pub fn parse(src: &str) -> Result<Self, GraphError> {
        let mut g = ConstraintGraph::default();
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut vertex = |g: &mut ConstraintGraph, name: &str| {
            *index
                .entry(name.to_string())
                .or_insert_with(|| g.add_vertex(name.to_string()))
        };
        for (i, raw) in src.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| GraphError::Parse {
                line: i + 1,
                message,
            };
            let parts: Vec<&str> = line.split_whitespace().collect();
            let int = |s: &str| {
                s.parse::<i64>()
                    .map_err(|_| err(format!("expected integer, found `{s}`")))
            };
            match parts.as_slice() {
                ["vertex", a] => {
                    vertex(&mut g, a);
                }
                ["less", a, b] => {
                    let (a, b) = (vertex(&mut g, a), vertex(&mut g, b));
                    g.less.push((a, b));
                }
                ["equal", a, b] => {
                    let (a, b) = (vertex(&mut g, a), vertex(&mut g, b));
                    g.equal.push((a, b));
                }
                [kw @ ("const" | "lt" | "gt"), a, c] => {
                    let c = int(c)?;
                    let a = vertex(&mut g, a);
                    let u = match *kw {
                        "const" => Unary::Eq(c),
                        "lt" => Unary::Lt(c),
                        _ => Unary::Gt(c),
                    };
                    g.unary.push((a, u));
                }
                _ => return Err(err(format!("unrecognized line `{line}`"))),
            }
        }
        Ok(g)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for n in &self.names {
            writeln!(s, "vertex {n}").expect("write to string");
        }
        for &(a, b) in &self.less {
            writeln!(s, "less {} {}", self.names[a], self.names[b]).expect("write to string");
        }
        for &(a, b) in &self.equal {
            writeln!(s, "equal {} {}", self.names[a], self.names[b]).expect("write to string");
        }
        for &(a, u) in &self.unary {
            let (kw, c) = match u {
                Unary::Eq(c) => ("const", c),
                Unary::Lt(c) => ("lt", c),
                Unary::Gt(c) => ("gt", c),
            };
            writeln!(s, "{kw} {} {c}", self.names[a]).expect("write to string");
        }
        s
    }

    /// Graphviz rendering: strict edges solid, equalities dashed, unary
    /// constraints in the vertex label.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph constraints {\n");
        for (i, n) in self.names.iter().enumerate() {
            let extra: Vec<String> = self
                .unary
                .iter()
                .filter(|(a, _)| *a == i)
                .map(|(_, u)| match u {
                    Unary::Eq(c) => format!("={c}"),
                    Unary::Lt(c) => format!("<{c}"),
                    Unary::Gt(c) => format!(">{c}"),
                })
                .collect();
            let label = if extra.is_empty() {
                n.clone()
            } else {
                format!("{n} [{}]", extra.join(","))
            };
            writeln!(s, "  v{i} [label=\"{label}\"];").expect("write to string");
        }
        for &(a, b) in &self.less {
            writeln!(s, "  v{a} -> v{b};").expect("write to string");
        }
        for &(a, b) in &self.equal {
            writeln!(s, "  v{a} -> v{b} [style=dashed, arrowhead=none];").expect("write to string");
        }
        s.push_str("}\n");
        s
    }
}

/// One constraint on a negative cycle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CycleStep {
    Less(usize, usize),
    Equal(usize, usize),
    Unary(usize, Unary),
}

/// Certificate of non-embeddability: constraints whose difference bounds sum
/// to a negative number around a cycle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NegativeCycle {
    pub steps: Vec<CycleStep>,
}

impl NegativeCycle {
    pub fn describe(&self, g: &ConstraintGraph) -> String {
        self.steps
            .iter()
            .map(|s| match *s {
                CycleStep::Less(a, b) => format!("{} < {}", g.names[a], g.names[b]),
                CycleStep::Equal(a, b) => format!("{} = {}", g.names[a], g.names[b]),
                CycleStep::Unary(a, Unary::Eq(c)) => format!("{} = {c}", g.names[a]),
                CycleStep::Unary(a, Unary::Lt(c)) => format!("{} < {c}", g.names[a]),
                CycleStep::Unary(a, Unary::Gt(c)) => format!("{} > {c}", g.names[a]),
            })
            .collect::<Vec<_>>()
            .join(", ")
    }
}

/// Integer embedding by difference constraints: `κ(v) - κ(u) ≤ w` for every
/// weighted edge `u -> v`, with an extra vertex fixed at zero for constants.
/// Bellman-Ford either yields potentials or a negative cycle.
pub fn embed_finite(g: &ConstraintGraph) -> Result<Vec<i64>, NegativeCycle> {
    let n = g.len();
    let zero = n;
    let mut edges: Vec<(usize, usize, i128, CycleStep)> =
        Vec::with_capacity(g.less.len() + 2 * g.equal.len() + 2 * g.unary.len());
    for &(a, b) in &g.less {
        edges.push((b, a, -1, CycleStep::Less(a, b)));
    }
    for &(a, b) in &g.equal {
        edges.push((a, b, 0, CycleStep::Equal(a, b)));
        edges.push((b, a, 0, CycleStep::Equal(a, b)));
    }
    for &(a, u) in &g.unary {
        let s = CycleStep::Unary(a, u);
        match u {
            Unary::Eq(c) => {
                edges.push((zero, a, c as i128, s));
                edges.push((a, zero, -(c as i128), s));
            }
            Unary::Lt(c) => edges.push((zero, a, c as i128 - 1, s)),
            Unary::Gt(c) => edges.push((a, zero, -(c as i128) - 1, s)),
        }
    }
    let total = n + 1;
    let mut dist = vec![0i128; total];
    let mut pred: Vec<Option<usize>> = vec![None; total];
    let mut last = None;
    for _ in 0..total {
        last = None;
        for (i, &(u, v, w, _)) in edges.iter().enumerate() {
            if dist[u] + w < dist[v] {
                dist[v] = dist[u] + w;
                pred[v] = Some(i);
                last = Some(v);
            }
        }
        if last.is_none() {
            break;
        }
    }
    if let Some(mut v) = last {
        for _ in 0..total {
            v = edges[pred[v].expect("relaxed vertex has a predecessor")].0;
        }
        let start = v;
        let mut steps = Vec::new();
        loop {
            let e = pred[v].expect("cycle vertex has a predecessor");
            steps.push(edges[e].3);
            v = edges[e].0;
            if v == start {
                break;
            }
        }
        steps.reverse();
        return Err(NegativeCycle { steps });
    }
    let base = dist[zero];
    let kappa: Vec<i64> = dist[..n]
        .iter()
        .map(|&d| i64::try_from(d - base).expect("embedding fits in i64"))
        .collect();
    debug_assert!(g.satisfied_by(&kappa));
    Ok(kappa)
}

/// Exhaustive search over assignments in `[-radius, radius]` (radius at
/// most 31), by backtracking in vertex order with forward checking on
/// bitmask domains.
pub fn embed_brute(g: &ConstraintGraph, radius: i64) -> Option<Vec<i64>> {
    assert!((0..=31).contains(&radius), "radius out of range");
    let n = g.len();
    let width = (2 * radius + 1) as u32;
    let full: u64 = (1u64 << width) - 1;
    let values = |pred: &dyn Fn(i64) -> bool| -> u64 {
        (-radius..=radius)
            .filter(|&v| pred(v))
            .fold(0, |m, v| m | 1u64 << (v + radius))
    };
    let mut dom = vec![full; n];
    for &(a, u) in &g.unary {
        dom[a] &= values(&|v| u.holds(v));
    }
    // relations to later vertices: -1 if self < other, 0 if equal, 1 if self > other
    let mut adj: Vec<Vec<(usize, i8)>> = vec![Vec::new(); n];
    for &(a, b) in &g.less {
        if a == b {
            return None;
        }
        if a < b {
            adj[a].push((b, -1));
        } else {
            adj[b].push((a, 1));
        }
    }
    for &(a, b) in &g.equal {
        if a != b {
            adj[a.min(b)].push((a.max(b), 0));
        }
    }
    struct Search<'a> {
        dom: Vec<u64>,
        adj: &'a [Vec<(usize, i8)>],
        full: u64,
        kappa: Vec<u32>,
        trail: Vec<(usize, u64)>,
    }
    impl Search<'_> {
        fn go(&mut self, i: usize) -> bool {
            if i == self.dom.len() {
                return true;
            }
            let mut cands = self.dom[i];
            while cands != 0 {
                let b = cands.trailing_zeros();
                cands &= cands - 1;
                self.kappa[i] = b;
                let mark = self.trail.len();
                let mut ok = true;
                for &(j, rel) in &self.adj[i] {
                    self.trail.push((j, self.dom[j]));
                    self.dom[j] &= match rel {
                        -1 => self.full & !((1u64 << (b + 1)) - 1),
                        0 => 1u64 << b,
                        _ => (1u64 << b) - 1,
                    };
                    if self.dom[j] == 0 {
                        ok = false;
                        break;
                    }
                }
                if ok && self.go(i + 1) {
                    return true;
                }
                while self.trail.len() > mark {
                    let (j, d) = self.trail.pop().expect("trail entry");
                    self.dom[j] = d;
                }
            }
            false
        }
    }
    let mut s = Search {
        dom,
        adj: &adj,
        full,
        kappa: vec![0; n],
        trail: Vec::new(),
    };
    s.go(0)
        .then(|| s.kappa.iter().map(|&b| b as i64 - radius).collect())
}

/// Longest number of strict edges on a path between two vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Distance {
    Unreachable,
    Finite(u64),
    /// The graph has a strict cycle.
    Infinite,
}

pub fn truncation_distance(g: &ConstraintGraph, src: usize, dst: usize) -> Distance {
    let mut dg: DiGraph<(), bool> = DiGraph::new();
    let nodes: Vec<_> = (0..g.len()).map(|_| dg.add_node(())).collect();
    for &(a, b) in &g.less {
        dg.add_edge(nodes[a], nodes[b], true);
    }
    for &(a, b) in &g.equal {
        dg.add_edge(nodes[a], nodes[b], false);
        dg.add_edge(nodes[b], nodes[a], false);
    }
    // tarjan_scc yields components in reverse topological order
    let sccs = tarjan_scc(&dg);
    let mut comp = vec![0usize; g.len()];
    for (i, c) in sccs.iter().enumerate() {
        for v in c {
            comp[v.index()] = i;
        }
    }
    if g.less.iter().any(|&(a, b)| comp[a] == comp[b]) {
        return Distance::Infinite;
    }
    let k = sccs.len();
    let mut best: Vec<Option<u64>> = vec![None; k];
    best[comp[src]] = Some(0);
    let mut out: Vec<Vec<(usize, u64)>> = vec![Vec::new(); k];
    for &(a, b) in &g.less {
        out[comp[a]].push((comp[b], 1));
    }
    for &(a, b) in &g.equal {
        if comp[a] != comp[b] {
            out[comp[a]].push((comp[b], 0));
            out[comp[b]].push((comp[a], 0));
        }
    }
    for c in (0..k).rev() {
        if let Some(d) = best[c] {
            for &(t, w) in &out[c] {
                let nd = d + w;
                if best[t].is_none_or(|x| x < nd) {
                    best[t] = Some(nd);
                }
            }
        }
    }
    match best[comp[dst]] {
        Some(d) => Distance::Finite(d),
        None => Distance::Unreachable,
    }
}
