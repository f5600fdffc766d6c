//! Direct evaluation of concepts over finite interpretations.

use std::collections::HashMap;

use num_bigint::BigInt;

use super::ast::{Concept, Constraint, Name, Problem, RolePath, Term};

/// A finite interpretation with a total register assignment (missing values
/// read as 0).
#[derive(Clone, Debug, Default)]
pub struct Interpretation {
    pub size: usize,
    pub concepts: HashMap<Name, Vec<bool>>,
    pub roles: HashMap<Name, Vec<(usize, usize)>>,
    pub registers: HashMap<Name, Vec<i64>>,
}

impl Interpretation {
    pub fn new(size: usize) -> Self {
        Interpretation {
            size,
            ..Default::default()
        }
    }

    pub fn value(&self, e: usize, x: &Name) -> i64 {
        self.registers.get(x).map_or(0, |v| v[e])
    }

    fn successors(&self, e: usize, r: &Name) -> impl Iterator<Item = usize> + '_ {
        self.roles
            .get(r)
            .into_iter()
            .flatten()
            .filter(move |(a, _)| *a == e)
            .map(|(_, b)| *b)
    }

    /// All element sequences following `path` from `e`.
    pub fn paths(&self, e: usize, path: &RolePath) -> Vec<Vec<usize>> {
        let mut out = vec![vec![e]];
        for r in &path.0 {
            let mut next = Vec::new();
            for p in &out {
                let last = *p.last().expect("nonempty path");
                for s in self.successors(last, r) {
                    let mut q = p.clone();
                    q.push(s);
                    next.push(q);
                }
            }
            out = next;
        }
        out
    }

    fn term(&self, path: &[usize], t: &Term) -> i64 {
        self.value(path[t.shift as usize], &t.reg)
    }

    pub fn eval_constraint(&self, path: &[usize], c: &Constraint) -> bool {
        match c {
            Constraint::Less(a, b) => self.term(path, a) < self.term(path, b),
            Constraint::Equal(a, b) => self.term(path, a) == self.term(path, b),
            Constraint::EqualConst(a, k) => BigInt::from(self.term(path, a)) == *k,
            Constraint::Not(d) => !self.eval_constraint(path, d),
            Constraint::And(cs) => cs.iter().all(|d| self.eval_constraint(path, d)),
            Constraint::Or(cs) => cs.iter().any(|d| self.eval_constraint(path, d)),
        }
    }

    /// Extension of a concept.
    pub fn eval(&self, c: &Concept) -> Vec<bool> {
        match c {
            Concept::Top => vec![true; self.size],
            Concept::Bottom => vec![false; self.size],
            Concept::Name(n) => self
                .concepts
                .get(n)
                .cloned()
                .unwrap_or_else(|| vec![false; self.size]),
            Concept::Not(d) => self.eval(d).into_iter().map(|b| !b).collect(),
            Concept::And(cs) => {
                let mut out = vec![true; self.size];
                for d in cs {
                    for (o, b) in out.iter_mut().zip(self.eval(d)) {
                        *o &= b;
                    }
                }
                out
            }
            Concept::Or(cs) => {
                let mut out = vec![false; self.size];
                for d in cs {
                    for (o, b) in out.iter_mut().zip(self.eval(d)) {
                        *o |= b;
                    }
                }
                out
            }
            Concept::Exists(r, d) => {
                let inner = self.eval(d);
                (0..self.size)
                    .map(|e| self.successors(e, r).any(|s| inner[s]))
                    .collect()
            }
            Concept::Forall(r, d) => {
                let inner = self.eval(d);
                (0..self.size)
                    .map(|e| self.successors(e, r).all(|s| inner[s]))
                    .collect()
            }
            Concept::ExistsPath(p, t) => (0..self.size)
                .map(|e| self.paths(e, p).iter().any(|q| self.eval_constraint(q, t)))
                .collect(),
            Concept::ForallPath(p, t) => (0..self.size)
                .map(|e| self.paths(e, p).iter().all(|q| self.eval_constraint(q, t)))
                .collect(),
        }
    }

    /// Every declared functional role has at most one successor per element.
    pub fn respects_functionality(&self, functional: &[Name]) -> bool {
        functional
            .iter()
            .all(|f| (0..self.size).all(|e| self.successors(e, f).count() <= 1))
    }

    /// Elements satisfying the problem's concept, or `None` if some axiom fails.
    pub fn models(&self, p: &Problem) -> Option<Vec<bool>> {
        if !self.respects_functionality(&p.tbox.functional) {
            return None;
        }
        for ax in &p.tbox.axioms {
            let l = self.eval(&ax.lhs);
            let r = self.eval(&ax.rhs);
            if l.iter().zip(&r).any(|(a, b)| *a && !*b) {
                return None;
            }
        }
        Some(self.eval(&p.concept))
    }
}
