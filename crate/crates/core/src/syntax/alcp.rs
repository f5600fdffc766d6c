//! Front end for concepts with register comparisons between two role paths and
//! register-to-constant tests, translated into path constraints.
//!
//! Extra forms on top of the plain concept grammar:
//! `(somev (P) x op c)` / `(allv (P) x op c)` with `op` in `= !=`, and
//! `(some2 (P1) x1 (P2) x2 op)` / `(all2 (P1) x1 (P2) x2 op)` with `op` in
//! `< <= = != > >=`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use thiserror::Error;

use super::ast::{Axiom, Concept, Constraint, Name, Problem, RolePath, TBox, Term};
use super::nnf::FreshNames;
use super::parse::{arity, list, parse_file_with, parse_int, parse_name, parse_path};
use super::sexp::{error, Sexp};
use super::ParseError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Lt,
    Le,
    Eq,
    Ne,
    Gt,
    Ge,
}

impl CmpOp {
    fn parse(s: &str) -> Option<CmpOp> {
        Some(match s {
            "<" => CmpOp::Lt,
            "<=" => CmpOp::Le,
            "=" => CmpOp::Eq,
            "!=" => CmpOp::Ne,
            ">" => CmpOp::Gt,
            ">=" => CmpOp::Ge,
            _ => return None,
        })
    }

    pub fn negate(self) -> CmpOp {
        match self {
            CmpOp::Lt => CmpOp::Ge,
            CmpOp::Le => CmpOp::Gt,
            CmpOp::Eq => CmpOp::Ne,
            CmpOp::Ne => CmpOp::Eq,
            CmpOp::Gt => CmpOp::Le,
            CmpOp::Ge => CmpOp::Lt,
        }
    }

    /// The relation as a constraint over two terms.
    pub fn relate(self, a: Term, b: Term) -> Constraint {
        match self {
            CmpOp::Lt => Constraint::Less(a, b),
            CmpOp::Le => Constraint::Or(vec![
                Constraint::Less(a.clone(), b.clone()),
                Constraint::Equal(a, b),
            ]),
            CmpOp::Eq => Constraint::Equal(a, b),
            CmpOp::Ne => Constraint::Or(vec![
                Constraint::Less(a.clone(), b.clone()),
                Constraint::Less(b, a),
            ]),
            CmpOp::Gt => Constraint::Less(b, a),
            CmpOp::Ge => Constraint::Or(vec![
                Constraint::Less(b.clone(), a.clone()),
                Constraint::Equal(a, b),
            ]),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlcpConcept {
    Top,
    Bottom,
    Name(Name),
    Not(Box<AlcpConcept>),
    And(Vec<AlcpConcept>),
    Or(Vec<AlcpConcept>),
    Exists(Name, Box<AlcpConcept>),
    Forall(Name, Box<AlcpConcept>),
    /// `∃P x. op c` with `op` in `= !=`.
    ExistsValue(RolePath, Name, bool, BigInt),
    ForallValue(RolePath, Name, bool, BigInt),
    ExistsPair(RolePath, Name, RolePath, Name, CmpOp),
    ForallPair(RolePath, Name, RolePath, Name, CmpOp),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlcpProblem {
    pub functional: Vec<Name>,
    pub axioms: Vec<(AlcpConcept, AlcpConcept)>,
    pub concept: AlcpConcept,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlcpError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("out of scope: universal {0} comparison over non-functional paths")]
    OutOfScope(String),
}

fn parse_alcp_concept(e: &Sexp) -> Result<AlcpConcept, ParseError> {
    if e.as_atom().is_some() {
        return Ok(AlcpConcept::Name(parse_name(e, "concept")?));
    }
    let items = list(e, "concept")?;
    let head = e.head().ok_or_else(|| error(e.pos(), "expected concept"))?;
    match head {
        "top" => {
            arity(e, items, 0)?;
            Ok(AlcpConcept::Top)
        }
        "bot" => {
            arity(e, items, 0)?;
            Ok(AlcpConcept::Bottom)
        }
        "not" => {
            arity(e, items, 1)?;
            Ok(AlcpConcept::Not(Box::new(parse_alcp_concept(&items[1])?)))
        }
        "and" | "or" => {
            if items.len() < 3 {
                return Err(error(
                    e.pos(),
                    format!("'{head}' expects at least 2 arguments"),
                ));
            }
            let cs = items[1..]
                .iter()
                .map(parse_alcp_concept)
                .collect::<Result<Vec<_>, _>>()?;
            Ok(if head == "and" {
                AlcpConcept::And(cs)
            } else {
                AlcpConcept::Or(cs)
            })
        }
        "some" | "all" => {
            arity(e, items, 2)?;
            let r = parse_name(&items[1], "role")?;
            let c = Box::new(parse_alcp_concept(&items[2])?);
            Ok(if head == "some" {
                AlcpConcept::Exists(r, c)
            } else {
                AlcpConcept::Forall(r, c)
            })
        }
        "somev" | "allv" => {
            arity(e, items, 4)?;
            let p = parse_path(&items[1])?;
            let x = parse_name(&items[2], "register")?;
            let eq = match items[3].as_atom() {
                Some("=") => true,
                Some("!=") => false,
                _ => return Err(error(items[3].pos(), "expected '=' or '!='")),
            };
            let c = parse_int(&items[4])?;
            Ok(if head == "somev" {
                AlcpConcept::ExistsValue(p, x, eq, c)
            } else {
                AlcpConcept::ForallValue(p, x, eq, c)
            })
        }
        "some2" | "all2" => {
            arity(e, items, 5)?;
            let p1 = parse_path(&items[1])?;
            let x1 = parse_name(&items[2], "register")?;
            let p2 = parse_path(&items[3])?;
            let x2 = parse_name(&items[4], "register")?;
            let op = items[5]
                .as_atom()
                .and_then(CmpOp::parse)
                .ok_or_else(|| error(items[5].pos(), "expected comparison operator"))?;
            Ok(if head == "some2" {
                AlcpConcept::ExistsPair(p1, x1, p2, x2, op)
            } else {
                AlcpConcept::ForallPair(p1, x1, p2, x2, op)
            })
        }
        _ => Err(error(e.pos(), format!("unknown concept form '{head}'"))),
    }
}

pub fn parse_alcp_problem(src: &str) -> Result<AlcpProblem, ParseError> {
    let (functional, axioms, concept) = parse_file_with(src, parse_alcp_concept)?;
    Ok(AlcpProblem {
        functional,
        axioms,
        concept,
    })
}

fn alcp_nnf(c: &AlcpConcept, neg: bool) -> AlcpConcept {
    use AlcpConcept as A;
    match c {
        A::Top => {
            if neg {
                A::Bottom
            } else {
                A::Top
            }
        }
        A::Bottom => {
            if neg {
                A::Top
            } else {
                A::Bottom
            }
        }
        A::Name(_) => {
            if neg {
                A::Not(Box::new(c.clone()))
            } else {
                c.clone()
            }
        }
        A::Not(d) => alcp_nnf(d, !neg),
        A::And(cs) | A::Or(cs) => {
            let parts = cs.iter().map(|d| alcp_nnf(d, neg)).collect();
            if matches!(c, A::And(_)) != neg {
                A::And(parts)
            } else {
                A::Or(parts)
            }
        }
        A::Exists(r, d) | A::Forall(r, d) => {
            let inner = Box::new(alcp_nnf(d, neg));
            if matches!(c, A::Exists(..)) != neg {
                A::Exists(r.clone(), inner)
            } else {
                A::Forall(r.clone(), inner)
            }
        }
        A::ExistsValue(p, x, eq, k) | A::ForallValue(p, x, eq, k) => {
            let eq2 = *eq != neg;
            if matches!(c, A::ExistsValue(..)) != neg {
                A::ExistsValue(p.clone(), x.clone(), eq2, k.clone())
            } else {
                A::ForallValue(p.clone(), x.clone(), eq2, k.clone())
            }
        }
        A::ExistsPair(p1, x1, p2, x2, op) | A::ForallPair(p1, x1, p2, x2, op) => {
            let op2 = if neg { op.negate() } else { *op };
            if matches!(c, A::ExistsPair(..)) != neg {
                A::ExistsPair(p1.clone(), x1.clone(), p2.clone(), x2.clone(), op2)
            } else {
                A::ForallPair(p1.clone(), x1.clone(), p2.clone(), x2.clone(), op2)
            }
        }
    }
}

fn has_pair_or_value(c: &AlcpConcept) -> bool {
    use AlcpConcept as A;
    match c {
        A::Top | A::Bottom | A::Name(_) => false,
        A::Not(d) | A::Exists(_, d) | A::Forall(_, d) => has_pair_or_value(d),
        A::And(cs) | A::Or(cs) => cs.iter().any(has_pair_or_value),
        _ => true,
    }
}

struct Translator<'a> {
    functional: &'a [Name],
    fresh: FreshNames,
}

impl Translator<'_> {
    fn end(p: &RolePath, x: &Name) -> Term {
        Term {
            shift: p.len() as u32,
            reg: x.clone(),
        }
    }

    fn start(c: &Name) -> Term {
        Term {
            shift: 0,
            reg: c.clone(),
        }
    }

    /// `∃P1.[S⁰c1 = x1] ⊓ ∃P2.[S⁰c2 = x2] ⊓ ∃ε.[c1 op c2]`.
    fn exists_pair(
        &mut self,
        p1: &RolePath,
        x1: &Name,
        p2: &RolePath,
        x2: &Name,
        op: CmpOp,
    ) -> Concept {
        let c1 = self.fresh.fresh_like(&format!("copy-{x1}"));
        let c2 = self.fresh.fresh_like(&format!("copy-{x2}"));
        Concept::And(vec![
            Concept::ExistsPath(
                p1.clone(),
                Constraint::Equal(Self::start(&c1), Self::end(p1, x1)),
            ),
            Concept::ExistsPath(
                p2.clone(),
                Constraint::Equal(Self::start(&c2), Self::end(p2, x2)),
            ),
            Concept::ExistsPath(
                RolePath::default(),
                op.relate(Self::start(&c1), Self::start(&c2)),
            ),
        ])
    }

    fn translate(&mut self, c: &AlcpConcept) -> Result<Concept, AlcpError> {
        use AlcpConcept as A;
        Ok(match c {
            A::Top => Concept::Top,
            A::Bottom => Concept::Bottom,
            A::Name(n) => Concept::Name(n.clone()),
            A::Not(d) => Concept::Not(Box::new(self.translate(d)?)),
            A::And(cs) => Concept::And(
                cs.iter()
                    .map(|d| self.translate(d))
                    .collect::<Result<_, _>>()?,
            ),
            A::Or(cs) => Concept::Or(
                cs.iter()
                    .map(|d| self.translate(d))
                    .collect::<Result<_, _>>()?,
            ),
            A::Exists(r, d) => Concept::Exists(r.clone(), Box::new(self.translate(d)?)),
            A::Forall(r, d) => Concept::Forall(r.clone(), Box::new(self.translate(d)?)),
            A::ExistsValue(p, x, eq, k) | A::ForallValue(p, x, eq, k) => {
                let atom = Constraint::EqualConst(Self::end(p, x), k.clone());
                let t = if *eq {
                    atom
                } else {
                    Constraint::Not(Box::new(atom))
                };
                if matches!(c, A::ExistsValue(..)) {
                    Concept::ExistsPath(p.clone(), t)
                } else {
                    Concept::ForallPath(p.clone(), t)
                }
            }
            A::ExistsPair(p1, x1, p2, x2, op) => self.exists_pair(p1, x1, p2, x2, *op),
            A::ForallPair(p1, x1, p2, x2, op) => {
                let no_p1 = Concept::forall_along(p1, Concept::Bottom);
                let functional =
                    p1.0.iter()
                        .chain(&p2.0)
                        .all(|r| self.functional.contains(r));
                if functional {
                    let no_p2 = Concept::forall_along(p2, Concept::Bottom);
                    let e = self.exists_pair(p1, x1, p2, x2, *op);
                    return Ok(Concept::Or(vec![no_p1, no_p2, e]));
                }
                let c = self.fresh.fresh_like(&format!("copy-{x1}"));
                let (e1, c0) = (Self::end(p1, x1), Self::start(&c));
                let e2 = Self::end(p2, x2);
                // c is the maximum (for < and <=) or minimum (for > and >=) of x1 over P1
                let (bound1, bound2) = match op {
                    CmpOp::Lt => (
                        CmpOp::Le.relate(e1.clone(), c0.clone()),
                        CmpOp::Lt.relate(c0.clone(), e2),
                    ),
                    CmpOp::Le => (
                        CmpOp::Le.relate(e1.clone(), c0.clone()),
                        CmpOp::Le.relate(c0.clone(), e2),
                    ),
                    CmpOp::Gt => (
                        CmpOp::Ge.relate(e1.clone(), c0.clone()),
                        CmpOp::Lt.relate(e2, c0.clone()),
                    ),
                    CmpOp::Ge => (
                        CmpOp::Ge.relate(e1.clone(), c0.clone()),
                        CmpOp::Le.relate(e2, c0.clone()),
                    ),
                    CmpOp::Eq => (
                        CmpOp::Eq.relate(e1.clone(), c0.clone()),
                        CmpOp::Eq.relate(e2, c0.clone()),
                    ),
                    CmpOp::Ne => return Err(AlcpError::OutOfScope("'!='".into())),
                };
                Concept::Or(vec![
                    no_p1,
                    Concept::And(vec![
                        Concept::ExistsPath(p1.clone(), Constraint::Equal(e1, c0)),
                        Concept::ForallPath(p1.clone(), bound1),
                        Concept::ForallPath(p2.clone(), bound2),
                    ]),
                ])
            }
        })
    }
}

fn alcp_names(c: &AlcpConcept, out: &mut BTreeSet<Name>) {
    use AlcpConcept as A;
    match c {
        A::Top | A::Bottom => {}
        A::Name(n) => {
            out.insert(n.clone());
        }
        A::Not(d) => alcp_names(d, out),
        A::And(cs) | A::Or(cs) => cs.iter().for_each(|d| alcp_names(d, out)),
        A::Exists(r, d) | A::Forall(r, d) => {
            out.insert(r.clone());
            alcp_names(d, out);
        }
        A::ExistsValue(p, x, _, _) | A::ForallValue(p, x, _, _) => {
            out.extend(p.0.iter().cloned());
            out.insert(x.clone());
        }
        A::ExistsPair(p1, x1, p2, x2, _) | A::ForallPair(p1, x1, p2, x2, _) => {
            out.extend(p1.0.iter().cloned());
            out.extend(p2.0.iter().cloned());
            out.insert(x1.clone());
            out.insert(x2.clone());
        }
    }
}

/// Translates into an equisatisfiable problem with path constraints only.
/// Universal comparisons with `!=` along non-functional paths are rejected.
pub fn translate_alcp(p: &AlcpProblem) -> Result<Problem, AlcpError> {
    let mut used = BTreeSet::new();
    alcp_names(&p.concept, &mut used);
    for (l, r) in &p.axioms {
        alcp_names(l, &mut used);
        alcp_names(r, &mut used);
    }
    used.extend(p.functional.iter().cloned());
    let mut t = Translator {
        functional: &p.functional,
        fresh: FreshNames::new(used),
    };
    let concept = t.translate(&alcp_nnf(&p.concept, false))?;
    let mut axioms = Vec::new();
    for (l, r) in &p.axioms {
        let ax = if has_pair_or_value(l) {
            let internal = AlcpConcept::Or(vec![alcp_nnf(l, true), alcp_nnf(r, false)]);
            Axiom {
                lhs: Concept::Top,
                rhs: t.translate(&internal)?,
            }
        } else {
            Axiom {
                lhs: t.translate(l)?,
                rhs: t.translate(&alcp_nnf(r, false))?,
            }
        };
        axioms.push(ax);
    }
    Ok(Problem {
        tbox: TBox {
            functional: p.functional.clone(),
            axioms,
        },
        concept,
    })
}
