//! Abstraction of atomic normal form problems to plain ALCF with placeholder
//! concept names, and the frame alphabet.

pub mod frame;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use num_traits::ToPrimitive;
use thiserror::Error;

use crate::cgraph::{embed_finite, ConstraintGraph, TreeShape};
use crate::syntax::ast::{Axiom, Concept, Constraint, Name, Problem, TBox, Term};
use crate::syntax::nnf::{used_names, FreshNames};
use crate::syntax::print::{constraint_to_string, problem_to_string};

pub use frame::{
    frame_of_graph, frame_valid, frames_consistent, Class, Frame, FrameGraph, FrameIter, Layer,
    Requirement, Signature, ULabel, TOP,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AbstractError {
    #[error("input is not in atomic normal form: {0}")]
    NotAnf(String),
    #[error("constant {0} does not fit in 64 bits")]
    ConstantOverflow(String),
    #[error("{0} registers exceed the supported maximum of 64")]
    TooManyRegisters(usize),
}

/// Where the terms of a placeholder's constraint live. A `Local` placeholder
/// talks about the element carrying it; an `Edge` placeholder sits on a child
/// and reads `S⁰` at the parent and `S¹` at the child.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub enum Scope {
    Local,
    Edge,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Placeholder {
    pub name: Name,
    pub scope: Scope,
    pub atom: Constraint,
}

impl Placeholder {
    /// Frame vertex of a term: `Edge` maps `S⁰` to the top row.
    pub fn vertex(&self, sig: &Signature, t: &Term) -> u32 {
        let i = sig.index(&t.reg).expect("register in signature") as u32;
        match (self.scope, t.shift) {
            (Scope::Edge, 0) => i + TOP,
            _ => i,
        }
    }

    /// Frame relations this placeholder demands.
    pub fn requirement(&self, sig: &Signature) -> Requirement {
        match &self.atom {
            Constraint::Less(a, b) => Requirement::Less(self.vertex(sig, a), self.vertex(sig, b)),
            Constraint::Equal(a, b) => Requirement::Equal(self.vertex(sig, a), self.vertex(sig, b)),
            Constraint::EqualConst(a, k) => Requirement::Label(
                self.vertex(sig, a),
                ULabel::Const(k.to_i64().expect("checked constant")),
            ),
            other => unreachable!("placeholder for non-atomic constraint {other:?}"),
        }
    }

    pub fn describe(&self) -> String {
        let scope = match self.scope {
            Scope::Local => "local",
            Scope::Edge => "edge",
        };
        format!(
            "{} = {scope} {}",
            self.name,
            constraint_to_string(&self.atom)
        )
    }
}

/// A path-constraint-free problem plus the placeholder table.
#[derive(Clone, Debug)]
pub struct AbstractProblem {
    pub problem: Problem,
    pub placeholders: Vec<Placeholder>,
    pub signature: Signature,
}

impl AbstractProblem {
    pub fn placeholder(&self, n: &Name) -> Option<&Placeholder> {
        self.placeholders.iter().find(|p| &p.name == n)
    }

    pub fn render(&self) -> String {
        let mut s = problem_to_string(&self.problem);
        for p in &self.placeholders {
            writeln!(s, "; placeholder {}", p.describe()).expect("write to string");
        }
        s
    }
}

struct Abstractor {
    fresh: FreshNames,
    table: BTreeMap<(Scope, Constraint), Name>,
    order: Vec<Placeholder>,
}

impl Abstractor {
    fn placeholder(&mut self, scope: Scope, atom: &Constraint) -> Name {
        let key = (scope, atom.clone());
        if let Some(n) = self.table.get(&key) {
            return n.clone();
        }
        let name = self.fresh.fresh("_B");
        self.table.insert(key, name.clone());
        self.order.push(Placeholder {
            name: name.clone(),
            scope,
            atom: atom.clone(),
        });
        name
    }

    fn concept(&mut self, c: &Concept) -> Result<Concept, AbstractError> {
        Ok(match c {
            Concept::Top | Concept::Bottom | Concept::Name(_) => c.clone(),
            Concept::Not(d) => Concept::Not(Box::new(self.concept(d)?)),
            Concept::And(cs) => Concept::And(
                cs.iter()
                    .map(|d| self.concept(d))
                    .collect::<Result<_, _>>()?,
            ),
            Concept::Or(cs) => Concept::Or(
                cs.iter()
                    .map(|d| self.concept(d))
                    .collect::<Result<_, _>>()?,
            ),
            Concept::Exists(r, d) => Concept::Exists(r.clone(), Box::new(self.concept(d)?)),
            Concept::Forall(r, d) => Concept::Forall(r.clone(), Box::new(self.concept(d)?)),
            Concept::ExistsPath(p, t) | Concept::ForallPath(p, t) => {
                if !t.is_atomic() || p.len() > 1 {
                    return Err(AbstractError::NotAnf(
                        crate::syntax::print::concept_to_string(c),
                    ));
                }
                if p.is_empty() {
                    Concept::Name(self.placeholder(Scope::Local, t))
                } else {
                    let b = Box::new(Concept::Name(self.placeholder(Scope::Edge, t)));
                    if matches!(c, Concept::ExistsPath(..)) {
                        Concept::Exists(p.0[0].clone(), b)
                    } else {
                        Concept::Forall(p.0[0].clone(), b)
                    }
                }
            }
        })
    }
}

/// Frame signature of a problem: its registers and constant range.
pub fn signature_of(p: &Problem) -> Result<Signature, AbstractError> {
    let registers: Vec<Name> = p.registers().into_iter().collect();
    if registers.len() > 64 {
        return Err(AbstractError::TooManyRegisters(registers.len()));
    }
    let mut consts = Vec::new();
    for c in p.constants() {
        consts.push(
            c.to_i64()
                .ok_or_else(|| AbstractError::ConstantOverflow(c.to_string()))?,
        );
    }
    let c0 = consts.iter().copied().min().unwrap_or(0);
    let calpha = consts.iter().copied().max().unwrap_or(0);
    Ok(Signature::new(registers, c0, calpha))
}

/// Replaces every path constraint of an atomic normal form problem by a
/// placeholder concept name.
pub fn abstract_problem(p: &Problem) -> Result<AbstractProblem, AbstractError> {
    let signature = signature_of(p)?;
    let mut a = Abstractor {
        fresh: FreshNames::new(used_names(p)),
        table: BTreeMap::new(),
        order: Vec::new(),
    };
    let concept = a.concept(&p.concept)?;
    let mut axioms = Vec::new();
    for ax in &p.tbox.axioms {
        axioms.push(Axiom {
            lhs: a.concept(&ax.lhs)?,
            rhs: a.concept(&ax.rhs)?,
        });
    }
    Ok(AbstractProblem {
        problem: Problem {
            tbox: TBox {
                functional: p.tbox.functional.clone(),
                axioms,
            },
            concept,
        },
        placeholders: a.order,
        signature,
    })
}

/// A finite tree whose nodes carry frames.
#[derive(Clone, Debug)]
pub struct FramedTree {
    pub parent: Vec<Option<usize>>,
    pub frames: Vec<Frame>,
}

/// Frames for a finite tree-shaped constraint graph, read off an integer
/// embedding; `None` when the graph is not embeddable.
pub fn framify(shape: &TreeShape, g: &ConstraintGraph, sig: &Signature) -> Option<FramedTree> {
    let kappa = embed_finite(g).ok()?;
    let m = sig.m();
    let value = |node: usize, reg: usize| kappa[shape.vertex(node, reg, m)];
    let mut frames = Vec::new();
    for (u, p) in shape.parent.iter().enumerate() {
        let mut vals: Vec<(i64, u32)> = (0..m).map(|i| (value(u, i), i as u32)).collect();
        if let Some(p) = p {
            vals.extend((0..m).map(|i| (value(*p, i), i as u32 + TOP)));
        }
        vals.sort();
        let mut classes: Vec<Class> = Vec::new();
        let mut last = None;
        for (v, bit) in vals {
            if last == Some(v) {
                classes.last_mut().expect("class").members |= 1u128 << bit;
            } else {
                classes.push(Class {
                    members: 1u128 << bit,
                    label: ULabel::of_value(v, sig.c0, sig.calpha),
                });
                last = Some(v);
            }
        }
        frames.push(Frame {
            root: p.is_none(),
            classes,
            undefined: 0,
        });
    }
    Some(FramedTree {
        parent: shape.parent.clone(),
        frames,
    })
}

/// Placeholders of a set of concept names.
pub fn placeholders_in<'a>(
    ap: &'a AbstractProblem,
    names: &'a BTreeSet<Name>,
) -> impl Iterator<Item = &'a Placeholder> {
    ap.placeholders
        .iter()
        .filter(move |p| names.contains(&p.name))
}
