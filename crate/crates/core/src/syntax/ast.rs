use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;

/// An interned-by-sharing identifier for concept names, roles and registers.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Name(Arc<str>);

impl Name {
    pub fn new(s: &str) -> Self {
        Name(Arc::from(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Name {
    fn from(s: &str) -> Self {
        Name::new(s)
    }
}

/// `S^shift reg`: register `reg` at the `shift`-th element of a path.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term {
    pub shift: u32,
    pub reg: Name,
}

impl Term {
    pub fn new(shift: u32, reg: &str) -> Self {
        Term {
            shift,
            reg: Name::new(reg),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Constraint {
    Less(Term, Term),
    Equal(Term, Term),
    EqualConst(Term, BigInt),
    Not(Box<Constraint>),
    And(Vec<Constraint>),
    Or(Vec<Constraint>),
}

impl Constraint {
    /// Largest shift of any term.
    pub fn depth(&self) -> u32 {
        match self {
            Constraint::Less(a, b) | Constraint::Equal(a, b) => a.shift.max(b.shift),
            Constraint::EqualConst(a, _) => a.shift,
            Constraint::Not(c) => c.depth(),
            Constraint::And(cs) | Constraint::Or(cs) => {
                cs.iter().map(|c| c.depth()).max().unwrap_or(0)
            }
        }
    }

    pub fn is_atomic(&self) -> bool {
        matches!(
            self,
            Constraint::Less(..) | Constraint::Equal(..) | Constraint::EqualConst(..)
        )
    }

    pub fn registers(&self, out: &mut BTreeSet<Name>) {
        match self {
            Constraint::Less(a, b) | Constraint::Equal(a, b) => {
                out.insert(a.reg.clone());
                out.insert(b.reg.clone());
            }
            Constraint::EqualConst(a, _) => {
                out.insert(a.reg.clone());
            }
            Constraint::Not(c) => c.registers(out),
            Constraint::And(cs) | Constraint::Or(cs) => cs.iter().for_each(|c| c.registers(out)),
        }
    }

    pub fn constants(&self, out: &mut BTreeSet<BigInt>) {
        match self {
            Constraint::EqualConst(_, c) => {
                out.insert(c.clone());
            }
            Constraint::Not(c) => c.constants(out),
            Constraint::And(cs) | Constraint::Or(cs) => cs.iter().for_each(|c| c.constants(out)),
            _ => {}
        }
    }

    /// All subconstraints including `self`, parents before children.
    pub fn subconstraints(&self) -> Vec<&Constraint> {
        let mut out = vec![self];
        match self {
            Constraint::Not(c) => out.extend(c.subconstraints()),
            Constraint::And(cs) | Constraint::Or(cs) => {
                for c in cs {
                    out.extend(c.subconstraints());
                }
            }
            _ => {}
        }
        out
    }
}

/// A sequence of role names; the empty path is `ε`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct RolePath(pub Vec<Name>);

impl RolePath {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `r1.r2.r3`, or `eps` for the empty path.
    pub fn dotted(&self) -> String {
        if self.0.is_empty() {
            "eps".to_string()
        } else {
            self.0
                .iter()
                .map(|r| r.as_str())
                .collect::<Vec<_>>()
                .join(".")
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Concept {
    Top,
    Bottom,
    Name(Name),
    Not(Box<Concept>),
    And(Vec<Concept>),
    Or(Vec<Concept>),
    Exists(Name, Box<Concept>),
    Forall(Name, Box<Concept>),
    ExistsPath(RolePath, Constraint),
    ForallPath(RolePath, Constraint),
}

impl Concept {
    pub fn name(s: &str) -> Self {
        Concept::Name(Name::new(s))
    }

    pub fn not(c: Concept) -> Self {
        Concept::Not(Box::new(c))
    }

    pub fn exists(r: &str, c: Concept) -> Self {
        Concept::Exists(Name::new(r), Box::new(c))
    }

    pub fn forall(r: &str, c: Concept) -> Self {
        Concept::Forall(Name::new(r), Box::new(c))
    }

    /// Conjunction, collapsing the unary and empty cases.
    pub fn and(mut cs: Vec<Concept>) -> Self {
        match cs.len() {
            0 => Concept::Top,
            1 => cs.pop().expect("one element"),
            _ => Concept::And(cs),
        }
    }

    /// Disjunction, collapsing the unary and empty cases.
    pub fn or(mut cs: Vec<Concept>) -> Self {
        match cs.len() {
            0 => Concept::Bottom,
            1 => cs.pop().expect("one element"),
            _ => Concept::Or(cs),
        }
    }

    /// `∃r1.∃r2...C` along a path.
    pub fn exists_along(path: &RolePath, c: Concept) -> Self {
        path.0
            .iter()
            .rev()
            .fold(c, |acc, r| Concept::Exists(r.clone(), Box::new(acc)))
    }

    /// `∀r1.∀r2...C` along a path.
    pub fn forall_along(path: &RolePath, c: Concept) -> Self {
        path.0
            .iter()
            .rev()
            .fold(c, |acc, r| Concept::Forall(r.clone(), Box::new(acc)))
    }

    /// Direct subconcepts.
    pub fn children(&self) -> Vec<&Concept> {
        match self {
            Concept::Not(c) | Concept::Exists(_, c) | Concept::Forall(_, c) => vec![c],
            Concept::And(cs) | Concept::Or(cs) => cs.iter().collect(),
            _ => vec![],
        }
    }

    /// All subconcepts including `self`, in preorder.
    pub fn subconcepts(&self) -> Vec<&Concept> {
        let mut out = vec![self];
        for c in self.children() {
            out.extend(c.subconcepts());
        }
        out
    }

    pub fn concept_names(&self, out: &mut BTreeSet<Name>) {
        for c in self.subconcepts() {
            if let Concept::Name(n) = c {
                out.insert(n.clone());
            }
        }
    }

    pub fn roles(&self, out: &mut BTreeSet<Name>) {
        for c in self.subconcepts() {
            match c {
                Concept::Exists(r, _) | Concept::Forall(r, _) => {
                    out.insert(r.clone());
                }
                Concept::ExistsPath(p, _) | Concept::ForallPath(p, _) => {
                    out.extend(p.0.iter().cloned())
                }
                _ => {}
            }
        }
    }

    pub fn registers(&self, out: &mut BTreeSet<Name>) {
        for c in self.subconcepts() {
            if let Concept::ExistsPath(_, t) | Concept::ForallPath(_, t) = c {
                t.registers(out);
            }
        }
    }

    pub fn constants(&self, out: &mut BTreeSet<BigInt>) {
        for c in self.subconcepts() {
            if let Concept::ExistsPath(_, t) | Concept::ForallPath(_, t) = c {
                t.constants(out);
            }
        }
    }

    /// Path constraints `(P, Θ, existential?)` occurring in the concept.
    pub fn path_constraints(&self) -> Vec<(&RolePath, &Constraint, bool)> {
        self.subconcepts()
            .into_iter()
            .filter_map(|c| match c {
                Concept::ExistsPath(p, t) => Some((p, t, true)),
                Concept::ForallPath(p, t) => Some((p, t, false)),
                _ => None,
            })
            .collect()
    }

    /// Applies `f` bottom-up to every path constraint.
    pub fn map_constraints(
        &self,
        f: &mut impl FnMut(&RolePath, &Constraint) -> Constraint,
    ) -> Concept {
        match self {
            Concept::Top | Concept::Bottom | Concept::Name(_) => self.clone(),
            Concept::Not(c) => Concept::Not(Box::new(c.map_constraints(f))),
            Concept::And(cs) => Concept::And(cs.iter().map(|c| c.map_constraints(f)).collect()),
            Concept::Or(cs) => Concept::Or(cs.iter().map(|c| c.map_constraints(f)).collect()),
            Concept::Exists(r, c) => Concept::Exists(r.clone(), Box::new(c.map_constraints(f))),
            Concept::Forall(r, c) => Concept::Forall(r.clone(), Box::new(c.map_constraints(f))),
            Concept::ExistsPath(p, t) => Concept::ExistsPath(p.clone(), f(p, t)),
            Concept::ForallPath(p, t) => Concept::ForallPath(p.clone(), f(p, t)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Axiom {
    pub lhs: Concept,
    pub rhs: Concept,
}

/// A TBox together with the declared functional roles.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct TBox {
    pub functional: Vec<Name>,
    pub axioms: Vec<Axiom>,
}

impl TBox {
    pub fn is_functional(&self, r: &Name) -> bool {
        self.functional.contains(r)
    }

    /// All concepts occurring on either side of an axiom.
    pub fn concepts(&self) -> impl Iterator<Item = &Concept> {
        self.axioms.iter().flat_map(|a| [&a.lhs, &a.rhs])
    }
}

/// A satisfiability question: is `concept` satisfiable w.r.t. `tbox`?
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Problem {
    pub tbox: TBox,
    pub concept: Concept,
}

impl Problem {
    pub fn all_concepts(&self) -> impl Iterator<Item = &Concept> {
        std::iter::once(&self.concept).chain(self.tbox.concepts())
    }

    pub fn registers(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        for c in self.all_concepts() {
            c.registers(&mut out);
        }
        out
    }

    pub fn roles(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        for c in self.all_concepts() {
            c.roles(&mut out);
        }
        out.extend(self.tbox.functional.iter().cloned());
        out
    }

    pub fn concept_names(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        for c in self.all_concepts() {
            c.concept_names(&mut out);
        }
        out
    }

    pub fn constants(&self) -> BTreeSet<BigInt> {
        let mut out = BTreeSet::new();
        for c in self.all_concepts() {
            c.constants(&mut out);
        }
        out
    }
}
