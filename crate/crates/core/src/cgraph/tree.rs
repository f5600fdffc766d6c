//! Tree-shaped constraint graphs: graphs induced by abstract interpretations,
//! graphs of frame-labeled trees, and regular trees given as finite graphs.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Write;

use num_traits::ToPrimitive;
use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use super::{embed_finite, ConstraintGraph, NegativeCycle, Unary};
use crate::abstraction::{frames_consistent, Frame, Placeholder, Scope, Signature, ULabel, TOP};
use crate::syntax::ast::{Constraint, Name, Term};

/// Parent pointers of a finite tree; node 0 is the root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeShape {
    pub parent: Vec<Option<usize>>,
}

impl TreeShape {
    pub fn vertex(&self, node: usize, reg: usize, m: usize) -> usize {
        node * m + reg
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn depth(&self, mut v: usize) -> usize {
        let mut d = 0;
        while let Some(p) = self.parent[v] {
            v = p;
            d += 1;
        }
        d
    }

    fn named_graph(&self, sig: &Signature) -> ConstraintGraph {
        let mut g = ConstraintGraph::default();
        for u in 0..self.len() {
            for r in &sig.registers {
                g.add_vertex(format!("n{u}.{r}"));
            }
        }
        g
    }
}

/// A finite tree-shaped abstract interpretation: concept names per node.
#[derive(Clone, Debug)]
pub struct TreeInterpretation {
    pub shape: TreeShape,
    pub names: Vec<BTreeSet<Name>>,
}

/// Constraint graph induced by the placeholders holding at each node.
/// Returns `None` if an edge placeholder holds at the root.
pub fn build_constraint_graph(
    t: &TreeInterpretation,
    placeholders: &[Placeholder],
    sig: &Signature,
) -> Option<ConstraintGraph> {
    let m = sig.m();
    let mut g = t.shape.named_graph(sig);
    let by_name: HashMap<&Name, &Placeholder> = placeholders.iter().map(|p| (&p.name, p)).collect();
    for (v, names) in t.names.iter().enumerate() {
        for n in names {
            let Some(p) = by_name.get(n) else { continue };
            let node_of = |term: &Term| -> Option<usize> {
                let reg = sig.index(&term.reg).expect("register in signature");
                let node = match (p.scope, term.shift) {
                    (Scope::Edge, 0) => t.shape.parent[v]?,
                    _ => v,
                };
                Some(t.shape.vertex(node, reg, m))
            };
            match &p.atom {
                Constraint::Less(a, b) => g.less.push((node_of(a)?, node_of(b)?)),
                Constraint::Equal(a, b) => g.equal.push((node_of(a)?, node_of(b)?)),
                Constraint::EqualConst(a, k) => g.unary.push((
                    node_of(a)?,
                    Unary::Eq(k.to_i64().expect("checked constant")),
                )),
                other => unreachable!("placeholder for non-atomic constraint {other:?}"),
            }
        }
    }
    Some(g)
}

/// Constraint graph of a frame-labeled tree, with label bounds as unary
/// constraints. Classes are chained, which preserves embeddability and
/// strict path lengths.
pub fn framed_graph(shape: &TreeShape, frames: &[Frame], sig: &Signature) -> ConstraintGraph {
    let m = sig.m();
    let mut g = shape.named_graph(sig);
    for (u, f) in frames.iter().enumerate() {
        let vert = |bit: u32| -> usize {
            if bit >= TOP {
                shape.vertex(
                    shape.parent[u].expect("top row needs a parent"),
                    (bit - TOP) as usize,
                    m,
                )
            } else {
                shape.vertex(u, bit as usize, m)
            }
        };
        let mut prev: Option<usize> = None;
        for c in &f.classes {
            let members: Vec<usize> = crate::abstraction::frame::bits(c.members)
                .map(vert)
                .collect();
            let rep = members[0];
            for &v in &members[1..] {
                g.equal.push((rep, v));
            }
            if let Some(p) = prev {
                g.less.push((p, rep));
            }
            prev = Some(rep);
            let unary = match c.label {
                ULabel::Below => Some(Unary::Lt(sig.c0)),
                ULabel::Const(k) => Some(Unary::Eq(k)),
                ULabel::Above => Some(Unary::Gt(sig.calpha)),
                ULabel::Undefined => None,
            };
            if let Some(un) = unary {
                for &v in &members {
                    g.unary.push((v, un));
                }
            }
        }
    }
    g
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RtNode {
    pub frame: Frame,
    pub children: Vec<usize>,
}

/// A regular frame tree as a finite rooted graph; node 0 is the root and
/// every node has exactly `degree` ordered children.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegularTree {
    pub degree: usize,
    pub nodes: Vec<RtNode>,
}

impl RegularTree {
    /// Checks the root kind, degree, frame encoding and parent/child consistency.
    pub fn validate(&self, sig: &Signature) -> Result<(), String> {
        if self.nodes.is_empty() {
            return Err("no nodes".into());
        }
        if !self.nodes[0].frame.root {
            return Err("root frame has a top row".into());
        }
        for (i, n) in self.nodes.iter().enumerate() {
            if i > 0 && n.frame.root {
                return Err(format!("node {i} carries a root frame"));
            }
            if !n.frame.well_formed(sig) {
                return Err(format!("node {i} has a malformed frame"));
            }
            if n.children.len() != self.degree {
                return Err(format!("node {i} has {} children", n.children.len()));
            }
            for &c in &n.children {
                if c >= self.nodes.len() || !frames_consistent(&n.frame, &self.nodes[c].frame) {
                    return Err(format!("edge {i} -> {c} is inconsistent"));
                }
            }
        }
        Ok(())
    }

    pub fn to_dot(&self, sig: &Signature) -> String {
        let mut s = String::from("digraph tree {\n  node [shape=box];\n");
        for (i, n) in self.nodes.iter().enumerate() {
            let label = n.frame.render(sig).replace('"', "\\\"");
            writeln!(s, "  t{i} [label=\"{i}: {label}\"];").expect("write to string");
            for (d, c) in n.children.iter().enumerate() {
                writeln!(s, "  t{i} -> t{c} [label=\"{}\"];", d + 1).expect("write to string");
            }
        }
        s.push_str("}\n");
        s
    }
}

/// Unfolding to the given depth; also returns the origin node of each tree node.
pub fn unfold(rt: &RegularTree, depth: usize) -> (TreeShape, Vec<Frame>, Vec<usize>) {
    let mut parent = vec![None];
    let mut origin = vec![0usize];
    let mut level = vec![0usize];
    let mut queue = VecDeque::from([0usize]);
    while let Some(u) = queue.pop_front() {
        if level[u] == depth {
            continue;
        }
        for &c in &rt.nodes[origin[u]].children {
            let id = parent.len();
            parent.push(Some(u));
            origin.push(c);
            level.push(level[u] + 1);
            queue.push_back(id);
        }
    }
    let frames = origin.iter().map(|&o| rt.nodes[o].frame.clone()).collect();
    (TreeShape { parent }, frames, origin)
}

/// Integer values for the depth-bounded unfolding, indexed by
/// `node * m + register`.
pub fn embed_regular(
    rt: &RegularTree,
    sig: &Signature,
    depth: usize,
) -> Result<(TreeShape, Vec<i64>), NegativeCycle> {
    let (shape, frames, _) = unfold(rt, depth);
    let g = framed_graph(&shape, &frames, sig);
    embed_finite(&g).map(|k| (shape, k))
}

/// Search state for a violating path pair: either still looking for the
/// node where the pair starts, or following forward register `x` and backward
/// register `y` of the parent, with the strict side and a strict-step flag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StarState {
    Seek,
    Path {
        x: u32,
        y: u32,
        forward: bool,
        strict: bool,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarWitness {
    /// Product vertices `(node, state)` from the root to the cycle entry.
    pub stem: Vec<(usize, StarState)>,
    /// Cycle vertices; the successor of the last is the first.
    pub cycle: Vec<(usize, StarState)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StarResult {
    Satisfied,
    Violated(StarWitness),
}

fn star_successors(
    rt: &RegularTree,
    m: u32,
    node: usize,
    st: StarState,
) -> Vec<(usize, StarState)> {
    let f = &rt.nodes[node].frame;
    let mut out = Vec::new();
    for &c in &rt.nodes[node].children {
        match st {
            StarState::Seek => {
                out.push((c, StarState::Seek));
                for x in 0..m {
                    for y in 0..m {
                        if f.less(x, y) {
                            for forward in [true, false] {
                                out.push((
                                    c,
                                    StarState::Path {
                                        x,
                                        y,
                                        forward,
                                        strict: false,
                                    },
                                ));
                            }
                        }
                    }
                }
            }
            StarState::Path { x, y, forward, .. } => {
                if f.root {
                    continue;
                }
                for z in 0..m {
                    if !f.less_eq(x + TOP, z) {
                        continue;
                    }
                    for w in 0..m {
                        if f.less(z, w) && f.less_eq(w, y + TOP) {
                            let strict = if forward {
                                f.less(x + TOP, z)
                            } else {
                                f.less(w, y + TOP)
                            };
                            out.push((
                                c,
                                StarState::Path {
                                    x: z,
                                    y: w,
                                    forward,
                                    strict,
                                },
                            ));
                        }
                    }
                }
            }
        }
    }
    out
}

fn accepting(st: StarState) -> bool {
    matches!(st, StarState::Path { strict: true, .. })
}

/// Searches for a pair of aligned forward and backward paths with strict
/// cross edges, one of them strict, by lasso search on the product of the
/// tree's nodes with the search states.
pub fn check_star(rt: &RegularTree, sig: &Signature) -> StarResult {
    let m = sig.m() as u32;
    let mut g: DiGraph<(usize, StarState), ()> = DiGraph::new();
    let mut index: HashMap<(usize, StarState), NodeIndex> = HashMap::new();
    let start = (0usize, StarState::Seek);
    index.insert(start, g.add_node(start));
    let mut queue = VecDeque::from([start]);
    let mut pred: HashMap<(usize, StarState), (usize, StarState)> = HashMap::new();
    while let Some(v) = queue.pop_front() {
        for w in star_successors(rt, m, v.0, v.1) {
            let wi = match index.get(&w) {
                Some(&i) => i,
                None => {
                    let i = g.add_node(w);
                    index.insert(w, i);
                    pred.insert(w, v);
                    queue.push_back(w);
                    i
                }
            };
            g.update_edge(index[&v], wi, ());
        }
    }
    for scc in tarjan_scc(&g) {
        let members: BTreeSet<NodeIndex> = scc.iter().copied().collect();
        let nontrivial = scc.len() > 1 || g.contains_edge(scc[0], scc[0]);
        if !nontrivial {
            continue;
        }
        let Some(&acc) = scc.iter().find(|&&i| accepting(g[i].1)) else {
            continue;
        };
        // stem by BFS predecessors, cycle by BFS inside the component
        let mut stem = vec![g[acc]];
        let mut cur = g[acc];
        while let Some(&p) = pred.get(&cur) {
            stem.push(p);
            cur = p;
        }
        stem.reverse();
        stem.pop();
        let mut back: HashMap<NodeIndex, NodeIndex> = HashMap::new();
        let mut q = VecDeque::from([acc]);
        let mut found = None;
        'bfs: while let Some(u) = q.pop_front() {
            for w in g.neighbors(u) {
                if !members.contains(&w) {
                    continue;
                }
                if w == acc {
                    found = Some(u);
                    break 'bfs;
                }
                if let std::collections::hash_map::Entry::Vacant(e) = back.entry(w) {
                    e.insert(u);
                    q.push_back(w);
                }
            }
        }
        let mut cycle = Vec::new();
        let mut u = found.expect("nontrivial component has a cycle through each member");
        while u != acc {
            cycle.push(g[u]);
            u = back[&u];
        }
        cycle.push(g[acc]);
        cycle.reverse();
        return StarResult::Violated(StarWitness { stem, cycle });
    }
    StarResult::Satisfied
}

impl StarWitness {
    /// Re-checks the witness against the tree step by step.
    pub fn verify(&self, rt: &RegularTree, sig: &Signature) -> Result<(), String> {
        let m = sig.m() as u32;
        if self.cycle.is_empty() {
            return Err("empty cycle".into());
        }
        let seq: Vec<(usize, StarState)> =
            self.stem.iter().chain(self.cycle.iter()).copied().collect();
        if seq[0] != (0, StarState::Seek) {
            return Err("witness does not start at the root".into());
        }
        let mut steps: Vec<((usize, StarState), (usize, StarState))> =
            seq.windows(2).map(|w| (w[0], w[1])).collect();
        steps.push((*self.cycle.last().expect("nonempty"), self.cycle[0]));
        for (a, b) in steps {
            if !star_successors(rt, m, a.0, a.1).contains(&b) {
                return Err(format!("invalid step {a:?} -> {b:?}"));
            }
        }
        if !self.cycle.iter().any(|&(_, s)| accepting(s)) {
            return Err("cycle has no strict step".into());
        }
        Ok(())
    }

    /// The register pair and node where the violating paths start.
    pub fn origin(&self) -> Option<(usize, u32, u32)> {
        let seq: Vec<&(usize, StarState)> = self.stem.iter().chain(self.cycle.iter()).collect();
        for w in seq.windows(2) {
            if let (StarState::Seek, StarState::Path { x, y, .. }) = (w[0].1, w[1].1) {
                return Some((w[0].0, x, y));
            }
        }
        None
    }
}
