//! Frames: labeled total preorders over the top and bottom copies of the
//! registers, used as the letters of tree representations.

use std::collections::BTreeSet;
use std::fmt;

use crate::syntax::ast::Name;

/// Offset of the top copies in a vertex mask; bottom copy `i` is bit `i`.
pub const TOP: u32 = 64;

/// Position of a value relative to the constants of the input.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub enum ULabel {
    Below,
    Const(i64),
    Above,
    Undefined,
}

impl fmt::Display for ULabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ULabel::Below => write!(f, "U_<"),
            ULabel::Const(c) => write!(f, "U_{c}"),
            ULabel::Above => write!(f, "U_>"),
            ULabel::Undefined => write!(f, "U_und"),
        }
    }
}

impl ULabel {
    /// Whether a value with label `self` may be strictly below one with label `other`.
    pub fn may_precede(self, other: ULabel) -> bool {
        match (self, other) {
            (ULabel::Undefined, _) | (_, ULabel::Undefined) => false,
            (ULabel::Below, _) | (_, ULabel::Above) => true,
            (ULabel::Const(a), ULabel::Const(b)) => a < b,
            _ => false,
        }
    }

    /// Whether the label admits the integer `v`.
    pub fn admits(self, v: i64, c0: i64, calpha: i64) -> bool {
        match self {
            ULabel::Below => v < c0,
            ULabel::Const(c) => v == c,
            ULabel::Above => v > calpha,
            ULabel::Undefined => false,
        }
    }

    pub fn of_value(v: i64, c0: i64, calpha: i64) -> ULabel {
        if v < c0 {
            ULabel::Below
        } else if v > calpha {
            ULabel::Above
        } else {
            ULabel::Const(v)
        }
    }
}

/// Registers and constant range a frame alphabet is built over.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    pub registers: Vec<Name>,
    pub c0: i64,
    pub calpha: i64,
    pub und: bool,
}

impl Signature {
    pub fn new(registers: Vec<Name>, c0: i64, calpha: i64) -> Self {
        assert!(registers.len() <= 64, "at most 64 registers");
        assert!(c0 <= calpha);
        Signature {
            registers,
            c0,
            calpha,
            und: false,
        }
    }

    pub fn m(&self) -> usize {
        self.registers.len()
    }

    pub fn index(&self, r: &Name) -> Option<usize> {
        self.registers.iter().position(|x| x == r)
    }

    pub fn bot_mask(&self) -> u128 {
        low_bits(self.m())
    }

    pub fn all_mask(&self) -> u128 {
        self.bot_mask() | (self.bot_mask() << TOP)
    }

    /// Labels in increasing order, `Undefined` last when enabled.
    pub fn labels(&self) -> Vec<ULabel> {
        let mut out = vec![ULabel::Below];
        out.extend((self.c0..=self.calpha).map(ULabel::Const));
        out.push(ULabel::Above);
        if self.und {
            out.push(ULabel::Undefined);
        }
        out
    }

    pub fn vertex_name(&self, v: u32) -> String {
        if v >= TOP {
            format!("{}_top", self.registers[(v - TOP) as usize])
        } else {
            format!("{}_bot", self.registers[v as usize])
        }
    }
}

fn low_bits(k: usize) -> u128 {
    if k >= 128 {
        u128::MAX
    } else {
        (1u128 << k) - 1
    }
}

pub fn bits(mask: u128) -> impl Iterator<Item = u32> {
    let mut m = mask;
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let b = m.trailing_zeros();
            m &= m - 1;
            Some(b)
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Class {
    pub members: u128,
    pub label: ULabel,
}

/// A frame as an ordered list of equivalence classes, strictly increasing,
/// plus the set of undefined vertices. Root frames only have bottom vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Frame {
    pub root: bool,
    pub classes: Vec<Class>,
    pub undefined: u128,
}

/// Restriction of a frame to one layer, expressed over bottom bits.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Layer {
    pub classes: Vec<Class>,
    pub undefined: u128,
}

impl Layer {
    /// A frame whose bottom layer is `self`; used as a root frame.
    pub fn as_root_frame(&self) -> Frame {
        Frame {
            root: true,
            classes: self.classes.clone(),
            undefined: self.undefined,
        }
    }

    /// The child frame that repeats this layer on both rows with equal edges.
    pub fn padding_frame(&self) -> Frame {
        Frame {
            root: false,
            classes: self
                .classes
                .iter()
                .map(|c| Class {
                    members: c.members | (c.members << TOP),
                    label: c.label,
                })
                .collect(),
            undefined: self.undefined | (self.undefined << TOP),
        }
    }
}

impl Frame {
    pub fn empty_root() -> Self {
        Frame {
            root: true,
            classes: Vec::new(),
            undefined: 0,
        }
    }

    pub fn vertices(&self) -> u128 {
        self.classes
            .iter()
            .fold(self.undefined, |a, c| a | c.members)
    }

    fn class_of(&self, v: u32) -> Option<usize> {
        let bit = 1u128 << v;
        self.classes.iter().position(|c| c.members & bit != 0)
    }

    pub fn label(&self, v: u32) -> Option<ULabel> {
        if self.undefined >> v & 1 == 1 {
            return Some(ULabel::Undefined);
        }
        self.class_of(v).map(|i| self.classes[i].label)
    }

    /// Strict edge `u < v`.
    pub fn less(&self, u: u32, v: u32) -> bool {
        matches!((self.class_of(u), self.class_of(v)), (Some(a), Some(b)) if a < b)
    }

    /// Equality edge; undefined vertices are pairwise equal.
    pub fn equal(&self, u: u32, v: u32) -> bool {
        let und = self.undefined;
        if und >> u & 1 == 1 || und >> v & 1 == 1 {
            return und >> u & 1 == 1 && und >> v & 1 == 1;
        }
        matches!((self.class_of(u), self.class_of(v)), (Some(a), Some(b)) if a == b)
    }

    /// Non-strict edge `u ≤ v` between defined vertices.
    pub fn less_eq(&self, u: u32, v: u32) -> bool {
        matches!((self.class_of(u), self.class_of(v)), (Some(a), Some(b)) if a <= b)
    }

    fn layer(&self, mask: u128, shift: u32) -> Layer {
        Layer {
            classes: self
                .classes
                .iter()
                .filter(|c| c.members & mask != 0)
                .map(|c| Class {
                    members: (c.members & mask) >> shift,
                    label: c.label,
                })
                .collect(),
            undefined: (self.undefined & mask) >> shift,
        }
    }

    pub fn bot_layer(&self) -> Layer {
        self.layer(low_bits(TOP as usize), 0)
    }

    /// Top layer renamed to bottom bits.
    pub fn top_layer(&self) -> Layer {
        self.layer(!low_bits(TOP as usize), TOP)
    }

    /// Checks the structural invariants of the class encoding.
    pub fn well_formed(&self, sig: &Signature) -> bool {
        let expected = if self.root {
            sig.bot_mask()
        } else {
            sig.all_mask()
        };
        let mut seen = self.undefined;
        if self.undefined != 0 && !sig.und {
            return false;
        }
        for c in &self.classes {
            if c.members == 0 || c.members & seen != 0 || c.label == ULabel::Undefined {
                return false;
            }
            if let ULabel::Const(k) = c.label {
                if k < sig.c0 || k > sig.calpha {
                    return false;
                }
            }
            seen |= c.members;
        }
        seen == expected
            && self
                .classes
                .windows(2)
                .all(|w| w[0].label.may_precede(w[1].label))
    }

    /// Explicit edge-set view of the frame.
    pub fn to_graph(&self, sig: &Signature) -> FrameGraph {
        let vs: Vec<u32> = bits(self.vertices()).collect();
        let mut g = FrameGraph {
            vertices: vs.clone(),
            less: BTreeSet::new(),
            equal: BTreeSet::new(),
            labels: vs
                .iter()
                .map(|&v| vec![self.label(v).expect("vertex")])
                .collect(),
        };
        for (i, &u) in vs.iter().enumerate() {
            for (j, &v) in vs.iter().enumerate() {
                if i == j {
                    continue;
                }
                if self.less(u, v) {
                    g.less.insert((i, j));
                } else if self.equal(u, v) {
                    g.equal.insert((i, j));
                }
            }
        }
        let _ = sig;
        g
    }

    /// Canonical text: classes in increasing order, members sorted by register.
    pub fn render(&self, sig: &Signature) -> String {
        let names = |mask: u128| {
            let mut vs: Vec<(String, bool)> = bits(mask)
                .map(|v| {
                    if v >= TOP {
                        (sig.registers[(v - TOP) as usize].to_string(), true)
                    } else {
                        (sig.registers[v as usize].to_string(), false)
                    }
                })
                .collect();
            vs.sort();
            vs.iter()
                .map(|(n, top)| format!("{n}_{}", if *top { "top" } else { "bot" }))
                .collect::<Vec<_>>()
                .join(",")
        };
        let mut s = self
            .classes
            .iter()
            .map(|c| format!("class{{{}}}@{}", names(c.members), c.label))
            .collect::<Vec<_>>()
            .join(" < ");
        if self.undefined != 0 {
            s.push_str(&format!(" | class{{{}}}@U_und", names(self.undefined)));
        }
        if s.is_empty() {
            s.push_str("empty");
        }
        s
    }
}

/// Whether a child frame agrees with its parent on the shared layer.
pub fn frames_consistent(parent: &Frame, child: &Frame) -> bool {
    !child.root && parent.bot_layer() == child.top_layer()
}

/// A frame candidate given by explicit edges, for checking the frame
/// conditions directly.
#[derive(Clone, Debug, Default)]
pub struct FrameGraph {
    pub vertices: Vec<u32>,
    pub less: BTreeSet<(usize, usize)>,
    pub equal: BTreeSet<(usize, usize)>,
    pub labels: Vec<Vec<ULabel>>,
}

/// Checks the frame conditions on an explicit candidate. Vertices labeled
/// `Undefined` are exempt from totality but may only be equal to each other.
pub fn frame_valid(g: &FrameGraph) -> bool {
    let n = g.vertices.len();
    // exactly one label
    if g.labels.len() != n || g.labels.iter().any(|l| l.len() != 1) {
        return false;
    }
    let lab = |i: usize| g.labels[i][0];
    let und = |i: usize| lab(i) == ULabel::Undefined;
    let edge = |i: usize, j: usize| g.less.contains(&(i, j)) || g.equal.contains(&(i, j));
    for i in 0..n {
        for j in 0..n {
            if i == j {
                if g.less.contains(&(i, i)) {
                    return false;
                }
                continue;
            }
            // totality
            if !und(i) && !und(j) && !edge(i, j) && !edge(j, i) {
                return false;
            }
            // symmetric equality
            if g.equal.contains(&(i, j)) && !g.equal.contains(&(j, i)) {
                return false;
            }
            // equality iff same label, relaxed for the unbounded labels
            if g.equal.contains(&(i, j)) && lab(i) != lab(j) {
                return false;
            }
            if lab(i) == lab(j)
                && matches!(lab(i), ULabel::Const(_) | ULabel::Undefined)
                && !g.equal.contains(&(i, j))
            {
                return false;
            }
            if g.less.contains(&(i, j)) && !lab(i).may_precede(lab(j)) {
                return false;
            }
        }
    }
    // no strict cycles: no strict edge (i,j) with j reaching i
    let mut reach = vec![vec![false; n]; n];
    for &(i, j) in g.less.iter().chain(g.equal.iter()) {
        reach[i][j] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                for j in 0..n {
                    if reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    g.less.iter().all(|&(i, j)| !reach[j][i])
}

/// A relation a frame must satisfy, over vertex bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Requirement {
    Less(u32, u32),
    Equal(u32, u32),
    Label(u32, ULabel),
}

impl Requirement {
    fn vertices(&self) -> u128 {
        match *self {
            Requirement::Less(a, b) | Requirement::Equal(a, b) => 1u128 << a | 1u128 << b,
            Requirement::Label(a, _) => 1u128 << a,
        }
    }

    pub fn holds(&self, f: &Frame) -> bool {
        match *self {
            Requirement::Less(a, b) => f.less(a, b),
            Requirement::Equal(a, b) => f.equal(a, b) && f.undefined >> a & 1 == 0,
            Requirement::Label(a, l) => f.label(a) == Some(l),
        }
    }
}

/// Lazy enumeration of all frames extending a partial frame by inserting
/// further vertices, each frame exactly once and in a fixed order.
pub struct FrameIter {
    c0: i64,
    calpha: i64,
    und: bool,
    order: Vec<u32>,
    reqs: Vec<Requirement>,
    stack: Vec<(Frame, usize, u128)>,
}

impl FrameIter {
    fn new(sig: &Signature, base: Frame, order: Vec<u32>, reqs: Vec<Requirement>) -> Self {
        let placed = base.vertices();
        FrameIter {
            c0: sig.c0,
            calpha: sig.calpha,
            und: sig.und,
            order,
            reqs,
            stack: vec![(base, 0, placed)],
        }
    }

    /// Root frames (bottom vertices only).
    pub fn roots(sig: &Signature, reqs: Vec<Requirement>) -> Self {
        FrameIter::new(
            sig,
            Frame::empty_root(),
            (0..sig.m() as u32).collect(),
            reqs,
        )
    }

    /// All non-root frames.
    pub fn all(sig: &Signature, reqs: Vec<Requirement>) -> Self {
        let m = sig.m() as u32;
        let order = (0..m).map(|i| i + TOP).chain(0..m).collect();
        let base = Frame {
            root: false,
            classes: Vec::new(),
            undefined: 0,
        };
        FrameIter::new(sig, base, order, reqs)
    }

    /// Non-root frames whose top layer equals `parent`.
    pub fn children(sig: &Signature, parent: &Layer, reqs: Vec<Requirement>) -> Self {
        let base = Frame {
            root: false,
            classes: parent
                .classes
                .iter()
                .map(|c| Class {
                    members: c.members << TOP,
                    label: c.label,
                })
                .collect(),
            undefined: parent.undefined << TOP,
        };
        FrameIter::new(sig, base, (0..sig.m() as u32).collect(), reqs)
    }

    fn admissible(&self, f: &Frame, placed: u128, new: u32) -> bool {
        self.reqs.iter().all(|r| {
            let vs = r.vertices();
            vs >> new & 1 == 0 || vs & !placed != 0 || r.holds(f)
        })
    }

    fn new_labels(&self, left: Option<ULabel>, right: Option<ULabel>) -> Vec<ULabel> {
        let fits = |l: ULabel| {
            left.is_none_or(|a| a.may_precede(l)) && right.is_none_or(|b| l.may_precede(b))
        };
        let mut out = Vec::new();
        if fits(ULabel::Below) {
            out.push(ULabel::Below);
        }
        let lo = match left {
            Some(ULabel::Const(c)) => c.saturating_add(1).max(self.c0),
            _ => self.c0,
        };
        let hi = match right {
            Some(ULabel::Const(c)) => c.saturating_sub(1).min(self.calpha),
            _ => self.calpha,
        };
        if !matches!(left, Some(ULabel::Above)) && !matches!(right, Some(ULabel::Below)) {
            let mut c = lo;
            while c <= hi {
                out.push(ULabel::Const(c));
                if c == i64::MAX {
                    break;
                }
                c += 1;
            }
        }
        if fits(ULabel::Above) {
            out.push(ULabel::Above);
        }
        out
    }
}

impl Iterator for FrameIter {
    type Item = Frame;

    fn next(&mut self) -> Option<Frame> {
        while let Some((f, k, placed)) = self.stack.pop() {
            if k == self.order.len() {
                return Some(f);
            }
            let v = self.order[k];
            let bit = 1u128 << v;
            let placed2 = placed | bit;
            let mut options = Vec::new();
            // joining an existing class
            for i in 0..f.classes.len() {
                let mut g = f.clone();
                g.classes[i].members |= bit;
                options.push(g);
            }
            // a new class in some gap
            for gap in 0..=f.classes.len() {
                let left = gap.checked_sub(1).map(|i| f.classes[i].label);
                let right = f.classes.get(gap).map(|c| c.label);
                for l in self.new_labels(left, right) {
                    let mut g = f.clone();
                    g.classes.insert(
                        gap,
                        Class {
                            members: bit,
                            label: l,
                        },
                    );
                    options.push(g);
                }
            }
            if self.und {
                let mut g = f.clone();
                g.undefined |= bit;
                options.push(g);
            }
            for g in options.into_iter().rev() {
                if self.admissible(&g, placed2, v) {
                    self.stack.push((g, k + 1, placed2));
                }
            }
        }
        None
    }
}

/// Canonical frame for an explicit graph that passes [`frame_valid`].
pub fn frame_of_graph(g: &FrameGraph, root: bool) -> Frame {
    let n = g.vertices.len();
    let mut undefined = 0u128;
    let mut defined: Vec<usize> = Vec::new();
    for i in 0..n {
        if g.labels[i][0] == ULabel::Undefined {
            undefined |= 1u128 << g.vertices[i];
        } else {
            defined.push(i);
        }
    }
    // rank = number of vertices strictly below
    let rank = |i: usize| {
        defined
            .iter()
            .filter(|&&j| g.less.contains(&(j, i)))
            .count()
    };
    let mut ranked: Vec<(usize, usize)> = defined.iter().map(|&i| (rank(i), i)).collect();
    ranked.sort();
    let mut classes: Vec<Class> = Vec::new();
    let mut last = None;
    for (r, i) in ranked {
        let bit = 1u128 << g.vertices[i];
        if last == Some(r) {
            classes.last_mut().expect("class").members |= bit;
        } else {
            classes.push(Class {
                members: bit,
                label: g.labels[i][0],
            });
            last = Some(r);
        }
    }
    Frame {
        root,
        classes,
        undefined,
    }
}
