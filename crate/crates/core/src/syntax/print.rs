use std::fmt::Write;

use super::ast::{Concept, Constraint, Problem, RolePath, Term};

pub fn term_to_string(t: &Term) -> String {
    format!("(s {} {})", t.shift, t.reg)
}

pub fn constraint_to_string(c: &Constraint) -> String {
    match c {
        Constraint::Less(a, b) => format!("(< {} {})", term_to_string(a), term_to_string(b)),
        Constraint::Equal(a, b) => format!("(= {} {})", term_to_string(a), term_to_string(b)),
        Constraint::EqualConst(a, k) => format!("(= {} {})", term_to_string(a), k),
        Constraint::Not(c) => format!("(not {})", constraint_to_string(c)),
        Constraint::And(cs) => nary("and", cs.iter().map(constraint_to_string)),
        Constraint::Or(cs) => nary("or", cs.iter().map(constraint_to_string)),
    }
}

fn nary(head: &str, parts: impl Iterator<Item = String>) -> String {
    let mut s = format!("({head}");
    for p in parts {
        s.push(' ');
        s.push_str(&p);
    }
    s.push(')');
    s
}

pub fn path_to_string(p: &RolePath) -> String {
    let roles: Vec<&str> = p.0.iter().map(|r| r.as_str()).collect();
    format!("({})", roles.join(" "))
}

pub fn concept_to_string(c: &Concept) -> String {
    match c {
        Concept::Top => "(top)".into(),
        Concept::Bottom => "(bot)".into(),
        Concept::Name(n) => n.to_string(),
        Concept::Not(c) => format!("(not {})", concept_to_string(c)),
        Concept::And(cs) => nary("and", cs.iter().map(concept_to_string)),
        Concept::Or(cs) => nary("or", cs.iter().map(concept_to_string)),
        Concept::Exists(r, c) => format!("(some {r} {})", concept_to_string(c)),
        Concept::Forall(r, c) => format!("(all {r} {})", concept_to_string(c)),
        Concept::ExistsPath(p, t) => {
            format!("(somep {} {})", path_to_string(p), constraint_to_string(t))
        }
        Concept::ForallPath(p, t) => {
            format!("(allp {} {})", path_to_string(p), constraint_to_string(t))
        }
    }
}

/// Canonical file form: declarations, one axiom per line, check.
pub fn problem_to_string(p: &Problem) -> String {
    let mut s = String::new();
    for r in &p.tbox.functional {
        writeln!(s, "(func {r})").expect("write to string");
    }
    if p.tbox.axioms.is_empty() {
        s.push_str("(tbox)\n");
    } else {
        s.push_str("(tbox\n");
        for a in &p.tbox.axioms {
            writeln!(
                s,
                "  (sub {} {})",
                concept_to_string(&a.lhs),
                concept_to_string(&a.rhs)
            )
            .expect("write to string");
        }
        s.push_str(")\n");
    }
    writeln!(s, "(check {})", concept_to_string(&p.concept)).expect("write to string");
    s
}
