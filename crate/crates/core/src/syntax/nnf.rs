use std::collections::BTreeSet;

use super::ast::{Concept, Constraint, Name, Problem, Term};

/// Supplies names that do not clash with a given set of used names.
#[derive(Clone, Debug)]
pub struct FreshNames {
    used: BTreeSet<Name>,
    counter: usize,
}

impl FreshNames {
    pub fn new(used: BTreeSet<Name>) -> Self {
        FreshNames { used, counter: 0 }
    }

    /// Next unused name of the form `{prefix}{k}`.
    pub fn fresh(&mut self, prefix: &str) -> Name {
        loop {
            let n = Name::new(&format!("{prefix}{}", self.counter));
            self.counter += 1;
            if self.used.insert(n.clone()) {
                return n;
            }
        }
    }

    /// `base` itself if unused, otherwise `base'`, `base''`, ...
    pub fn fresh_like(&mut self, base: &str) -> Name {
        let mut s = base.to_string();
        loop {
            let n = Name::new(&s);
            if self.used.insert(n.clone()) {
                return n;
            }
            s.push('\'');
        }
    }

    pub fn reserve(&mut self, n: &Name) {
        self.used.insert(n.clone());
    }
}

/// Negation normal form on constraints: `not` only directly above atoms.
pub fn constraint_nnf(c: &Constraint) -> Constraint {
    nnf_c(c, false)
}

fn nnf_c(c: &Constraint, neg: bool) -> Constraint {
    match c {
        Constraint::Less(..) | Constraint::Equal(..) | Constraint::EqualConst(..) => {
            if neg {
                Constraint::Not(Box::new(c.clone()))
            } else {
                c.clone()
            }
        }
        Constraint::Not(d) => nnf_c(d, !neg),
        Constraint::And(cs) => {
            let parts = cs.iter().map(|d| nnf_c(d, neg)).collect();
            if neg {
                Constraint::Or(parts)
            } else {
                Constraint::And(parts)
            }
        }
        Constraint::Or(cs) => {
            let parts = cs.iter().map(|d| nnf_c(d, neg)).collect();
            if neg {
                Constraint::And(parts)
            } else {
                Constraint::Or(parts)
            }
        }
    }
}

/// Negation normal form: negation only on concept names, constraints in
/// constraint negation normal form.
pub fn to_nnf(c: &Concept) -> Concept {
    nnf(c, false)
}

fn nnf(c: &Concept, neg: bool) -> Concept {
    match c {
        Concept::Top => {
            if neg {
                Concept::Bottom
            } else {
                Concept::Top
            }
        }
        Concept::Bottom => {
            if neg {
                Concept::Top
            } else {
                Concept::Bottom
            }
        }
        Concept::Name(_) => {
            if neg {
                Concept::Not(Box::new(c.clone()))
            } else {
                c.clone()
            }
        }
        Concept::Not(d) => nnf(d, !neg),
        Concept::And(cs) => {
            let parts = cs.iter().map(|d| nnf(d, neg)).collect();
            if neg {
                Concept::Or(parts)
            } else {
                Concept::And(parts)
            }
        }
        Concept::Or(cs) => {
            let parts = cs.iter().map(|d| nnf(d, neg)).collect();
            if neg {
                Concept::And(parts)
            } else {
                Concept::Or(parts)
            }
        }
        Concept::Exists(r, d) => {
            let inner = Box::new(nnf(d, neg));
            if neg {
                Concept::Forall(r.clone(), inner)
            } else {
                Concept::Exists(r.clone(), inner)
            }
        }
        Concept::Forall(r, d) => {
            let inner = Box::new(nnf(d, neg));
            if neg {
                Concept::Exists(r.clone(), inner)
            } else {
                Concept::Forall(r.clone(), inner)
            }
        }
        Concept::ExistsPath(p, t) => {
            let t2 = nnf_c(t, neg);
            if neg {
                Concept::ForallPath(p.clone(), t2)
            } else {
                Concept::ExistsPath(p.clone(), t2)
            }
        }
        Concept::ForallPath(p, t) => {
            let t2 = nnf_c(t, neg);
            if neg {
                Concept::ExistsPath(p.clone(), t2)
            } else {
                Concept::ForallPath(p.clone(), t2)
            }
        }
    }
}

pub fn is_nnf(c: &Concept) -> bool {
    c.subconcepts().into_iter().all(|d| match d {
        Concept::Not(x) => matches!(**x, Concept::Name(_)),
        Concept::ExistsPath(_, t) | Concept::ForallPath(_, t) => constraint_is_nnf(t),
        _ => true,
    })
}

pub fn constraint_is_nnf(t: &Constraint) -> bool {
    t.subconstraints().into_iter().all(|d| match d {
        Constraint::Not(x) => x.is_atomic(),
        _ => true,
    })
}

/// Removes negated atoms from a constraint in negation normal form:
/// `¬(t=t')` becomes `t<t' ∨ t'<t`, `¬(t<t')` becomes `t=t' ∨ t'<t`, and
/// `¬(t=c)` becomes `z=c ∧ (t<z ∨ z<t)` for a fresh register `z` at the path start.
pub fn eliminate_constraint_negation(c: &Constraint, fresh: &mut FreshNames) -> Constraint {
    match c {
        Constraint::Not(a) => match &**a {
            Constraint::Equal(x, y) => Constraint::Or(vec![
                Constraint::Less(x.clone(), y.clone()),
                Constraint::Less(y.clone(), x.clone()),
            ]),
            Constraint::Less(x, y) => Constraint::Or(vec![
                Constraint::Equal(x.clone(), y.clone()),
                Constraint::Less(y.clone(), x.clone()),
            ]),
            Constraint::EqualConst(x, k) => {
                let z = Term {
                    shift: 0,
                    reg: fresh.fresh("_z"),
                };
                Constraint::And(vec![
                    Constraint::EqualConst(z.clone(), k.clone()),
                    Constraint::Or(vec![
                        Constraint::Less(x.clone(), z.clone()),
                        Constraint::Less(z, x.clone()),
                    ]),
                ])
            }
            other => eliminate_constraint_negation(
                &constraint_nnf(&Constraint::Not(Box::new(other.clone()))),
                fresh,
            ),
        },
        Constraint::And(cs) => Constraint::And(
            cs.iter()
                .map(|d| eliminate_constraint_negation(d, fresh))
                .collect(),
        ),
        Constraint::Or(cs) => Constraint::Or(
            cs.iter()
                .map(|d| eliminate_constraint_negation(d, fresh))
                .collect(),
        ),
        atom => atom.clone(),
    }
}

/// Applies [`eliminate_constraint_negation`] to every path constraint of a concept.
pub fn eliminate_negation_in_concept(c: &Concept, fresh: &mut FreshNames) -> Concept {
    c.map_constraints(&mut |_, t| eliminate_constraint_negation(&constraint_nnf(t), fresh))
}

/// Names of every kind used anywhere in the problem.
pub fn used_names(p: &Problem) -> BTreeSet<Name> {
    let mut used = p.registers();
    used.extend(p.roles());
    used.extend(p.concept_names());
    used
}
