//! Tree automaton for the tree models of a plain ALCF problem.
//!
//! States are requirement sets: the subconcepts a node has promised to its
//! parent, not full Hintikka sets. A move saturates the requirements into a
//! minimal clash-free set and emits its concept names as the letter.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use zalc_automata::{Move, Shape, StateMarks, TreeAutomaton};

use crate::syntax::ast::{Concept, Name, Problem};
use crate::syntax::nnf::to_nnf;

/// How a node hangs off its parent.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Link {
    Root,
    Role(Name),
    Padding,
}

/// The concept-name half of a tree letter.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Xi {
    /// Sorted.
    pub names: Vec<Name>,
    pub link: Link,
}

impl Xi {
    pub fn padding() -> Self {
        Xi {
            names: Vec::new(),
            link: Link::Padding,
        }
    }

    pub fn is_padding(&self) -> bool {
        self.link == Link::Padding
    }
}

impl fmt::Display for Xi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.names.iter().map(|n| n.as_str()).collect();
        match &self.link {
            Link::Padding => write!(f, "padding"),
            Link::Root => write!(f, "root {{{}}}", names.join(" ")),
            Link::Role(r) => write!(f, "{r} {{{}}}", names.join(" ")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AlcfState {
    /// Requirements are sorted subconcept ids.
    Node {
        link: Link,
        req: Vec<u32>,
    },
    Padding,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Item {
    Top,
    Bottom,
    Name(Name),
    NotName(Name),
    And(Vec<u32>),
    Or(Vec<u32>),
    Exists(Name, u32),
    Forall(Name, u32),
}

/// Interned subconcepts of a problem together with its axioms.
#[derive(Clone, Debug, Default)]
pub struct Closure {
    items: Vec<Item>,
    concepts: Vec<Concept>,
    index: HashMap<Concept, u32>,
    /// The complementary literal of each literal id.
    neg: HashMap<u32, u32>,
    global: Vec<u32>,
    lazy: HashMap<Name, Vec<u32>>,
    root: u32,
}

impl Closure {
    pub fn new(p: &Problem) -> Self {
        let mut c = Closure::default();
        c.root = c.intern(&to_nnf(&p.concept));
        for ax in &p.tbox.axioms {
            match &ax.lhs {
                Concept::Top => {
                    let r = c.intern(&to_nnf(&ax.rhs));
                    c.global.push(r);
                }
                Concept::Name(a) => {
                    let r = c.intern(&to_nnf(&ax.rhs));
                    c.lazy.entry(a.clone()).or_default().push(r);
                }
                lhs => {
                    let g = to_nnf(&Concept::or(vec![
                        Concept::not(lhs.clone()),
                        ax.rhs.clone(),
                    ]));
                    let r = c.intern(&g);
                    c.global.push(r);
                }
            }
        }
        c
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn concept(&self, id: u32) -> &Concept {
        &self.concepts[id as usize]
    }

    fn intern(&mut self, c: &Concept) -> u32 {
        if let Some(&i) = self.index.get(c) {
            return i;
        }
        let item = match c {
            Concept::Top => Item::Top,
            Concept::Bottom => Item::Bottom,
            Concept::Name(a) => Item::Name(a.clone()),
            Concept::Not(d) => match d.as_ref() {
                Concept::Name(a) => Item::NotName(a.clone()),
                _ => return self.intern(&to_nnf(c)),
            },
            Concept::And(cs) => Item::And(cs.iter().map(|d| self.intern(d)).collect()),
            Concept::Or(cs) => Item::Or(cs.iter().map(|d| self.intern(d)).collect()),
            Concept::Exists(r, d) => Item::Exists(r.clone(), self.intern(d)),
            Concept::Forall(r, d) => Item::Forall(r.clone(), self.intern(d)),
            Concept::ExistsPath(..) | Concept::ForallPath(..) => {
                unreachable!("path constraint left after abstraction")
            }
        };
        let id = self.items.len() as u32;
        let dual = match &item {
            Item::Name(a) => Some(Concept::not(Concept::Name(a.clone()))),
            Item::NotName(a) => Some(Concept::Name(a.clone())),
            _ => None,
        };
        self.items.push(item);
        self.concepts.push(c.clone());
        self.index.insert(c.clone(), id);
        if let Some(d) = dual {
            if let Some(&j) = self.index.get(&d) {
                self.neg.insert(id, j);
                self.neg.insert(j, id);
            }
        }
        id
    }

    /// Closes `s` under conjunction and the axioms; `false` on a clash.
    fn saturate(&self, s: &mut BTreeSet<u32>, mut todo: Vec<u32>) -> bool {
        while let Some(i) = todo.pop() {
            match &self.items[i as usize] {
                Item::Bottom => return false,
                Item::Name(a) => {
                    if self.neg.get(&i).is_some_and(|j| s.contains(j)) {
                        return false;
                    }
                    for &d in self.lazy.get(a).into_iter().flatten() {
                        if s.insert(d) {
                            todo.push(d);
                        }
                    }
                }
                Item::NotName(_) => {
                    if self.neg.get(&i).is_some_and(|j| s.contains(j)) {
                        return false;
                    }
                }
                Item::And(cs) => {
                    for &d in cs {
                        if s.insert(d) {
                            todo.push(d);
                        }
                    }
                }
                _ => {}
            }
        }
        true
    }

    /// The inclusion-minimal clash-free sets containing `req` and the global
    /// axioms that are closed under the local rules.
    pub fn expansions(&self, req: &[u32]) -> Vec<Vec<u32>> {
        let mut s: BTreeSet<u32> = req.iter().copied().collect();
        s.extend(self.global.iter().copied());
        let todo: Vec<u32> = s.iter().copied().collect();
        if !self.saturate(&mut s, todo) {
            return Vec::new();
        }
        let mut done: BTreeSet<Vec<u32>> = BTreeSet::new();
        let mut stack = vec![s];
        while let Some(s) = stack.pop() {
            let open = s.iter().find_map(|&i| match &self.items[i as usize] {
                Item::Or(cs) if !cs.iter().any(|d| s.contains(d)) => Some(cs),
                _ => None,
            });
            match open {
                None => {
                    done.insert(s.into_iter().collect());
                }
                Some(cs) => {
                    for &d in cs {
                        let mut t = s.clone();
                        t.insert(d);
                        if self.saturate(&mut t, vec![d]) {
                            stack.push(t);
                        }
                    }
                }
            }
        }
        let all: Vec<Vec<u32>> = done.into_iter().collect();
        all.iter()
            .filter(|a| !all.iter().any(|b| b.len() < a.len() && is_subset(b, a)))
            .cloned()
            .collect()
    }
}

fn is_subset(a: &[u32], b: &[u32]) -> bool {
    a.iter().all(|x| b.binary_search(x).is_ok())
}

/// The ALCF automaton of a problem without path constraints.
#[derive(Clone, Debug)]
pub struct Alcf {
    pub closure: Closure,
    pub functional: BTreeSet<Name>,
    pub degree: usize,
}

/// A move of [`Alcf`] from a non-padding state, before pairing with frames.
#[derive(Clone, Debug)]
pub struct AlcfMove {
    pub letter: Xi,
    pub children: Vec<AlcfState>,
}

impl Alcf {
    /// `degree` is raised to the number of children a node may need.
    pub fn new(p: &Problem, degree: usize) -> Self {
        let closure = Closure::new(p);
        let functional: BTreeSet<Name> = p.tbox.functional.iter().cloned().collect();
        let mut a = Alcf {
            closure,
            functional,
            degree: 0,
        };
        a.degree = degree.max(a.child_bound()).max(1);
        a
    }

    /// Most children a single move can create.
    pub fn child_bound(&self) -> usize {
        let mut plain = BTreeSet::new();
        let mut func = BTreeSet::new();
        for (i, it) in self.closure.items.iter().enumerate() {
            if let Item::Exists(r, _) = it {
                if self.functional.contains(r) {
                    func.insert(r.clone());
                } else {
                    plain.insert(i);
                }
            }
        }
        plain.len() + func.len()
    }

    pub fn root_state(&self) -> AlcfState {
        AlcfState::Node {
            link: Link::Root,
            req: vec![self.closure.root],
        }
    }

    /// All moves of a state, with one letter per minimal expansion.
    pub fn node_moves(&self, q: &AlcfState) -> Vec<AlcfMove> {
        let AlcfState::Node { link, req } = q else {
            return vec![AlcfMove {
                letter: Xi::padding(),
                children: vec![AlcfState::Padding; self.degree],
            }];
        };
        let mut out = Vec::new();
        for s in self.closure.expansions(req) {
            let mut names = Vec::new();
            let mut foralls: BTreeMap<&Name, Vec<u32>> = BTreeMap::new();
            let mut exists: Vec<(&Name, u32)> = Vec::new();
            for &i in &s {
                match &self.closure.items[i as usize] {
                    Item::Name(a) => names.push(a.clone()),
                    Item::Forall(r, d) => foralls.entry(r).or_default().push(*d),
                    Item::Exists(r, d) => exists.push((r, *d)),
                    _ => {}
                }
            }
            names.sort();
            let mut kids: Vec<(Name, BTreeSet<u32>)> = Vec::new();
            let mut grouped: BTreeMap<&Name, BTreeSet<u32>> = BTreeMap::new();
            for (r, d) in exists {
                if self.functional.contains(r) {
                    grouped.entry(r).or_default().insert(d);
                } else {
                    kids.push((r.clone(), BTreeSet::from([d])));
                }
            }
            kids.extend(grouped.into_iter().map(|(r, ds)| (r.clone(), ds)));
            if kids.len() > self.degree {
                log::warn!(
                    "expansion needs {} children but the degree is {}",
                    kids.len(),
                    self.degree
                );
                continue;
            }
            let mut children: Vec<AlcfState> = kids
                .into_iter()
                .map(|(r, mut ds)| {
                    ds.extend(foralls.get(&r).into_iter().flatten().copied());
                    AlcfState::Node {
                        link: Link::Role(r),
                        req: ds.into_iter().collect(),
                    }
                })
                .collect();
            children.resize(self.degree, AlcfState::Padding);
            out.push(AlcfMove {
                letter: Xi {
                    names,
                    link: link.clone(),
                },
                children,
            });
        }
        out
    }

    fn holds(&self, i: u32, names: &BTreeSet<&Name>, kids: &[(&Name, &[u32])]) -> bool {
        match &self.closure.items[i as usize] {
            Item::Top => true,
            Item::Bottom => false,
            Item::Name(a) => names.contains(a),
            Item::NotName(a) => !names.contains(a),
            Item::And(cs) => cs.iter().all(|&d| self.holds(d, names, kids)),
            Item::Or(cs) => cs.iter().any(|&d| self.holds(d, names, kids)),
            Item::Exists(r, d) => kids
                .iter()
                .any(|(s, req)| s == &r && req.binary_search(d).is_ok()),
            Item::Forall(r, d) => kids
                .iter()
                .all(|(s, req)| s != &r || req.binary_search(d).is_ok()),
        }
    }
}

impl TreeAutomaton for Alcf {
    type State = AlcfState;
    type Letter = Xi;

    fn degree(&self) -> usize {
        self.degree
    }
    fn initial(&self) -> AlcfState {
        self.root_state()
    }
    fn shape(&self) -> Shape {
        vec![1]
    }
    fn marks(&self, _: &AlcfState) -> StateMarks {
        StateMarks::trivial()
    }
    fn moves(&self, q: &AlcfState) -> Vec<Move<Xi, AlcfState>> {
        self.node_moves(q)
            .into_iter()
            .map(|m| Move {
                letter: m.letter,
                children: m.children.into_iter().map(|c| vec![c]).collect(),
            })
            .collect()
    }

    /// Exact local check: the letter's names satisfy the requirements and the
    /// axioms, with role successors read off the children's requirements.
    fn accepts_step(&self, q: &AlcfState, a: &Xi, children: &[AlcfState]) -> bool {
        if children.len() != self.degree {
            return false;
        }
        let (link, req) = match q {
            AlcfState::Padding => {
                return a.is_padding() && children.iter().all(|c| c == &AlcfState::Padding);
            }
            AlcfState::Node { link, req } => (link, req),
        };
        if &a.link != link {
            return false;
        }
        let mut kids: Vec<(&Name, &[u32])> = Vec::new();
        for c in children {
            match c {
                AlcfState::Padding => {}
                AlcfState::Node {
                    link: Link::Role(r),
                    req,
                } => kids.push((r, req)),
                AlcfState::Node { .. } => return false,
            }
        }
        for f in &self.functional {
            if kids.iter().filter(|(r, _)| r == &f).count() > 1 {
                return false;
            }
        }
        let names: BTreeSet<&Name> = a.names.iter().collect();
        let lazy = names
            .iter()
            .flat_map(|n| self.closure.lazy.get(*n).into_iter().flatten().copied());
        req.iter()
            .copied()
            .chain(self.closure.global.iter().copied())
            .chain(lazy)
            .all(|i| self.holds(i, &names, &kids))
    }

    fn moves_on(&self, q: &AlcfState, a: &Xi) -> Vec<Vec<Vec<AlcfState>>> {
        self.node_moves(q)
            .into_iter()
            .filter(|m| &m.letter == a)
            .map(|m| m.children.into_iter().map(|c| vec![c]).collect())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse::parse_problem;
    use zalc_automata::{emptiness, verify_witness};

    fn solve(src: &str) -> Option<zalc_automata::RegularTreeWitness<AlcfState, Xi>> {
        let p = parse_problem(src).unwrap();
        let a = Alcf::new(&p, 1);
        let w = emptiness(&a, 100_000).unwrap().witness;
        if let Some(w) = &w {
            verify_witness(&a, w).unwrap();
        }
        w
    }

    #[test]
    fn propositional_clash() {
        assert!(solve("(check (and A (not A)))").is_none());
        assert!(solve("(check (or A (not A)))").is_some());
    }

    #[test]
    fn functional_roles_merge_successors() {
        assert!(solve("(func f)\n(check (and (some f A) (some f (not A))))").is_none());
        assert!(solve("(check (and (some f A) (some f (not A))))").is_some());
        let w = solve("(func f)\n(check (and (some f A) (some f B)))").unwrap();
        let root = &w.nodes[0];
        let kids: Vec<_> = root
            .children
            .iter()
            .map(|&c| &w.nodes[c].letter)
            .filter(|x| !x.is_padding())
            .collect();
        assert_eq!(kids.len(), 1);
        assert_eq!(kids[0].names, vec![Name::new("A"), Name::new("B")]);
    }

    #[test]
    fn tbox_axioms_are_enforced() {
        assert!(solve("(tbox (sub A (not A)))\n(check A)").is_none());
        assert!(
            solve("(tbox (sub (top) (some r B)) (sub B (all r (not B))))\n(check (top))").is_none()
        );
        assert!(solve("(tbox (sub (top) (some r B)))\n(check (top))").is_some());
    }

    #[test]
    fn minimal_expansions_only() {
        let p = parse_problem("(check (or A (and A B)))").unwrap();
        let a = Alcf::new(&p, 1);
        let e = a.closure.expansions(&[a.closure.root]);
        assert_eq!(e.len(), 1);
    }
}
