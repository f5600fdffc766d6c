//! Normal forms for problems: negation normal form with negation-free
//! constraints, and the atomic normal form in which every path constraint is
//! atomic and runs along at most one role.
//!
//! The atomic normal form introduces copy registers `x@P#k` holding the value of
//! `x` at the `k`-th ancestor, and test concept names `T@P#i` that stand for a
//! constraint evaluated at the end of path `P`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write;

use thiserror::Error;

use crate::syntax::ast::{Axiom, Concept, Constraint, Name, Problem, RolePath, TBox, Term};
use crate::syntax::nnf::{eliminate_negation_in_concept, to_nnf, used_names, FreshNames};
use crate::syntax::print::{constraint_to_string, path_to_string, problem_to_string};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NormalizeError {
    #[error("constraint still contains negation after elimination: {0}")]
    NegatedConstraint(String),
    #[error("constraint depth {depth} exceeds path length {len}")]
    DepthExceedsPath { depth: u32, len: usize },
}

/// Size parameters of a problem in negation normal form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Degree {
    /// Largest length of an existential path constraint.
    pub d: usize,
    /// Number of distinct existential subconcepts, excluding `∃ε`.
    pub e: usize,
    /// `max(d,1) * e`, at least 1.
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CopyRegister {
    pub register: Name,
    pub path: RolePath,
    pub level: u32,
    pub name: Name,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TestConcept {
    pub path: RolePath,
    pub constraint: Constraint,
    pub name: Name,
}

#[derive(Clone, Debug)]
pub struct Normalized {
    /// Negation normal form with negation-free constraints.
    pub nnf: Problem,
    /// Concept and TBox in atomic normal form (`tbox = t_star ∪ t_prop ∪ t_loc`).
    pub anf: Problem,
    pub t_star: Vec<Axiom>,
    pub t_prop: Vec<Axiom>,
    pub t_loc: Vec<Axiom>,
    pub copies: Vec<CopyRegister>,
    pub tests: Vec<TestConcept>,
    pub degree: Degree,
}

/// Negation normal form of a problem with constraint negation eliminated.
/// Axioms with a concept name or `⊤` on the left keep their shape; all others
/// become `⊤ ⊑ ¬C ⊔ D`.
pub fn nnf_problem(p: &Problem, fresh: &mut FreshNames) -> Problem {
    let norm =
        |c: &Concept, fresh: &mut FreshNames| eliminate_negation_in_concept(&to_nnf(c), fresh);
    let concept = norm(&p.concept, fresh);
    let mut axioms: Vec<Axiom> = Vec::new();
    for ax in &p.tbox.axioms {
        let new = match &ax.lhs {
            Concept::Name(_) | Concept::Top => Axiom {
                lhs: ax.lhs.clone(),
                rhs: norm(&ax.rhs, fresh),
            },
            lhs => Axiom {
                lhs: Concept::Top,
                rhs: norm(
                    &Concept::Or(vec![Concept::not(lhs.clone()), ax.rhs.clone()]),
                    fresh,
                ),
            },
        };
        if !axioms.contains(&new) {
            axioms.push(new);
        }
    }
    Problem {
        tbox: TBox {
            functional: p.tbox.functional.clone(),
            axioms,
        },
        concept,
    }
}

pub fn compute_degree(p: &Problem) -> Degree {
    let mut d = 0usize;
    let mut existentials: BTreeSet<&Concept> = BTreeSet::new();
    for c in p.all_concepts() {
        for s in c.subconcepts() {
            match s {
                Concept::Exists(..) => {
                    existentials.insert(s);
                }
                Concept::ExistsPath(path, _) if !path.is_empty() => {
                    d = d.max(path.len());
                    existentials.insert(s);
                }
                _ => {}
            }
        }
    }
    let e = existentials.len();
    Degree {
        d,
        e,
        n: (d.max(1) * e).max(1),
    }
}

/// Whether every path constraint is atomic with a path of length at most one.
pub fn is_anf(p: &Problem) -> bool {
    p.all_concepts().all(|c| {
        c.path_constraints()
            .iter()
            .all(|(path, t, _)| path.len() <= 1 && t.is_atomic())
    })
}

struct Anf {
    keep_shallow: bool,
    fresh: FreshNames,
    copies: BTreeMap<(Name, RolePath, u32), Name>,
    copy_order: Vec<(Name, RolePath, u32)>,
    tests: HashMap<(RolePath, Constraint), Name>,
    test_order: Vec<TestConcept>,
    t_loc: Vec<Axiom>,
}

impl Anf {
    fn copy(&mut self, x: &Name, p: &RolePath, level: u32) -> Name {
        if level == 0 {
            return x.clone();
        }
        let key = (x.clone(), p.clone(), level);
        if let Some(n) = self.copies.get(&key) {
            return n.clone();
        }
        let n = self
            .fresh
            .fresh_like(&format!("{x}@{}#{level}", p.dotted()));
        self.copies.insert(key.clone(), n.clone());
        self.copy_order.push(key);
        n
    }

    /// `S^j x` becomes `S⁰ x@P#(|P|-j)`.
    fn loc_term(&mut self, t: &Term, p: &RolePath) -> Term {
        let level = p.len() as u32 - t.shift;
        Term {
            shift: 0,
            reg: self.copy(&t.reg, p, level),
        }
    }

    fn loc(&mut self, c: &Constraint, p: &RolePath) -> Constraint {
        match c {
            Constraint::Less(a, b) => Constraint::Less(self.loc_term(a, p), self.loc_term(b, p)),
            Constraint::Equal(a, b) => Constraint::Equal(self.loc_term(a, p), self.loc_term(b, p)),
            Constraint::EqualConst(a, k) => Constraint::EqualConst(self.loc_term(a, p), k.clone()),
            other => unreachable!("loc of non-atomic constraint {other:?}"),
        }
    }

    /// Name of `T_{P,Θ}`, creating its definition and those of its parts.
    fn test(&mut self, p: &RolePath, c: &Constraint) -> Result<Name, NormalizeError> {
        let key = (p.clone(), c.clone());
        if let Some(n) = self.tests.get(&key) {
            return Ok(n.clone());
        }
        if c.depth() as usize > p.len() {
            return Err(NormalizeError::DepthExceedsPath {
                depth: c.depth(),
                len: p.len(),
            });
        }
        let name = self
            .fresh
            .fresh_like(&format!("T@{}#{}", p.dotted(), self.test_order.len()));
        self.tests.insert(key, name.clone());
        self.test_order.push(TestConcept {
            path: p.clone(),
            constraint: c.clone(),
            name: name.clone(),
        });
        let rhs = match c {
            Constraint::Less(..) | Constraint::Equal(..) | Constraint::EqualConst(..) => {
                Concept::ExistsPath(RolePath::default(), self.loc(c, p))
            }
            Constraint::And(cs) => Concept::And(
                cs.iter()
                    .map(|d| self.test(p, d).map(Concept::Name))
                    .collect::<Result<_, _>>()?,
            ),
            Constraint::Or(cs) => Concept::Or(
                cs.iter()
                    .map(|d| self.test(p, d).map(Concept::Name))
                    .collect::<Result<_, _>>()?,
            ),
            Constraint::Not(_) => {
                return Err(NormalizeError::NegatedConstraint(constraint_to_string(c)))
            }
        };
        self.t_loc.push(Axiom {
            lhs: Concept::Name(name.clone()),
            rhs,
        });
        Ok(name)
    }

    /// Path constraints left as they are.
    fn stays(&self, p: &RolePath, t: &Constraint) -> bool {
        t.is_atomic() && (p.is_empty() || self.keep_shallow && p.len() == 1)
    }

    fn rewrite(&mut self, c: &Concept) -> Result<Concept, NormalizeError> {
        Ok(match c {
            Concept::Top | Concept::Bottom | Concept::Name(_) => c.clone(),
            Concept::Not(d) => Concept::Not(Box::new(self.rewrite(d)?)),
            Concept::And(cs) => Concept::And(
                cs.iter()
                    .map(|d| self.rewrite(d))
                    .collect::<Result<_, _>>()?,
            ),
            Concept::Or(cs) => Concept::Or(
                cs.iter()
                    .map(|d| self.rewrite(d))
                    .collect::<Result<_, _>>()?,
            ),
            Concept::Exists(r, d) => Concept::Exists(r.clone(), Box::new(self.rewrite(d)?)),
            Concept::Forall(r, d) => Concept::Forall(r.clone(), Box::new(self.rewrite(d)?)),
            Concept::ExistsPath(p, t) | Concept::ForallPath(p, t) => {
                if self.stays(p, t) {
                    c.clone()
                } else {
                    let name = Concept::Name(self.test(p, t)?);
                    if matches!(c, Concept::ExistsPath(..)) {
                        Concept::exists_along(p, name)
                    } else {
                        Concept::forall_along(p, name)
                    }
                }
            }
        })
    }
}

/// Rewrites a problem into atomic normal form.
pub fn normalize(p: &Problem) -> Result<Normalized, NormalizeError> {
    normalize_impl(p, false)
}

/// Like [`normalize`], but atomic constraints along a single role are kept
/// instead of being routed through copy registers. The result is still in
/// atomic normal form and needs fewer registers.
pub fn normalize_shallow(p: &Problem) -> Result<Normalized, NormalizeError> {
    normalize_impl(p, true)
}

fn normalize_impl(p: &Problem, keep_shallow: bool) -> Result<Normalized, NormalizeError> {
    let mut fresh = FreshNames::new(used_names(p));
    let nnf = nnf_problem(p, &mut fresh);
    let degree = compute_degree(&nnf);
    let mut anf = Anf {
        keep_shallow,
        fresh,
        copies: BTreeMap::new(),
        copy_order: Vec::new(),
        tests: HashMap::new(),
        test_order: Vec::new(),
        t_loc: Vec::new(),
    };
    // original registers before copies are introduced
    let registers: Vec<Name> = nnf.registers().into_iter().collect();
    let roles: Vec<Name> = nnf.roles().into_iter().collect();
    let mut paths: BTreeSet<RolePath> = BTreeSet::new();
    let mut dmax = 0usize;
    for c in nnf.all_concepts() {
        for (path, t, _) in c.path_constraints() {
            if !path.is_empty() && !anf.stays(path, t) {
                paths.insert(path.clone());
                dmax = dmax.max(path.len());
            }
        }
    }
    let concept = anf.rewrite(&nnf.concept)?;
    let mut t_star = Vec::new();
    for ax in &nnf.tbox.axioms {
        t_star.push(Axiom {
            lhs: anf.rewrite(&ax.lhs)?,
            rhs: anf.rewrite(&ax.rhs)?,
        });
    }
    let mut t_prop = Vec::new();
    for r in &roles {
        for x in &registers {
            for path in &paths {
                for k in 1..=dmax as u32 {
                    let child = anf.copy(x, path, k);
                    let parent = anf.copy(x, path, k - 1);
                    t_prop.push(Axiom {
                        lhs: Concept::Top,
                        rhs: Concept::ForallPath(
                            RolePath(vec![r.clone()]),
                            Constraint::Equal(
                                Term {
                                    shift: 1,
                                    reg: child,
                                },
                                Term {
                                    shift: 0,
                                    reg: parent,
                                },
                            ),
                        ),
                    });
                }
            }
        }
    }
    let copies = anf
        .copy_order
        .iter()
        .map(|k| CopyRegister {
            register: k.0.clone(),
            path: k.1.clone(),
            level: k.2,
            name: anf.copies[k].clone(),
        })
        .collect();
    let mut axioms = t_star.clone();
    axioms.extend(t_prop.iter().cloned());
    axioms.extend(anf.t_loc.iter().cloned());
    Ok(Normalized {
        anf: Problem {
            tbox: TBox {
                functional: nnf.tbox.functional.clone(),
                axioms,
            },
            concept,
        },
        nnf,
        t_star,
        t_prop,
        t_loc: anf.t_loc,
        copies,
        tests: anf.test_order,
        degree,
    })
}

impl Normalized {
    /// The normal form with copy chains cut at the highest level some test uses.
    /// Higher copies only constrain themselves, so this is equisatisfiable.
    pub fn pruned(&self) -> Problem {
        let mut used: BTreeSet<Name> = BTreeSet::new();
        for ax in &self.t_loc {
            ax.rhs.registers(&mut used);
        }
        self.anf.concept.registers(&mut used);
        for ax in &self.t_star {
            ax.lhs.registers(&mut used);
            ax.rhs.registers(&mut used);
        }
        // keep level k of a chain iff some level >= k is used
        let mut top: HashMap<(Name, RolePath), u32> = HashMap::new();
        for c in &self.copies {
            if used.contains(&c.name) {
                let e = top.entry((c.register.clone(), c.path.clone())).or_insert(0);
                *e = (*e).max(c.level);
            }
        }
        let keep: BTreeSet<Name> = self
            .copies
            .iter()
            .filter(|c| {
                top.get(&(c.register.clone(), c.path.clone()))
                    .is_some_and(|&t| c.level <= t)
            })
            .map(|c| c.name.clone())
            .collect();
        let mut axioms = self.t_star.clone();
        for ax in &self.t_prop {
            let mut regs = BTreeSet::new();
            ax.rhs.registers(&mut regs);
            let copy_names: BTreeSet<&Name> = self.copies.iter().map(|c| &c.name).collect();
            if regs
                .iter()
                .filter(|r| copy_names.contains(r))
                .all(|r| keep.contains(r))
            {
                axioms.push(ax.clone());
            }
        }
        axioms.extend(self.t_loc.iter().cloned());
        Problem {
            tbox: TBox {
                functional: self.anf.tbox.functional.clone(),
                axioms,
            },
            concept: self.anf.concept.clone(),
        }
    }

    /// Naming table as comment lines.
    pub fn sidecar(&self) -> String {
        let mut s = String::new();
        for c in &self.copies {
            writeln!(
                s,
                "; copy {} = {} at level {} of {}",
                c.name,
                c.register,
                c.level,
                path_to_string(&c.path)
            )
            .expect("write to string");
        }
        for t in &self.tests {
            writeln!(
                s,
                "; test {} = {} {}",
                t.name,
                path_to_string(&t.path),
                constraint_to_string(&t.constraint)
            )
            .expect("write to string");
        }
        s
    }

    /// Normal form followed by the naming table.
    pub fn render(&self) -> String {
        let mut s = problem_to_string(&self.anf);
        s.push_str(&self.sidecar());
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse::parse_problem;

    #[test]
    fn degree_of_small_examples() {
        let p =
            parse_problem("(tbox (sub (top) (somep (r) (< (s 0 x) (s 1 x)))))\n(check A)").unwrap();
        let n = normalize(&p).unwrap();
        assert_eq!(n.degree, Degree { d: 1, e: 1, n: 1 });
        let p =
            parse_problem("(check (and (some r A) (some r B) (somep (r r) (= (s 0 x) (s 2 x)))))")
                .unwrap();
        assert_eq!(normalize(&p).unwrap().degree, Degree { d: 2, e: 3, n: 6 });
        let p = parse_problem("(check (and A (not B)))").unwrap();
        assert_eq!(normalize(&p).unwrap().degree.n, 1);
    }

    #[test]
    fn anf_shape_and_sizes() {
        let p = parse_problem(
            "(tbox (sub A (somep (r s) (or (< (s 0 x) (s 2 y)) (= (s 1 y) 3)))))\n(check (and A (somep (r) (= (s 1 x) (s 0 y)))))",
        )
        .unwrap();
        let n = normalize(&p).unwrap();
        assert!(is_anf(&n.anf));
        // roles r,s ; registers x,y ; paths (r), (r s) ; d = 2
        assert_eq!(n.t_prop.len(), 2 * 2 * 2 * 2);
        assert!(is_anf(&n.pruned()));
    }
}
