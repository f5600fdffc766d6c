use num_bigint::BigInt;

use super::ast::{Axiom, Concept, Constraint, Name, Problem, RolePath, TBox, Term};
use super::sexp::{error, read_all, Sexp};
use super::ParseError;

pub(crate) fn is_int(s: &str) -> bool {
    let digits = s.strip_prefix('-').unwrap_or(s);
    !digits.is_empty() && digits.chars().all(|c| c.is_ascii_digit())
}

pub(crate) fn parse_name(e: &Sexp, what: &str) -> Result<Name, ParseError> {
    match e.as_atom() {
        Some(s) if !is_int(s) && !s.starts_with(|c: char| c.is_ascii_digit()) => Ok(Name::new(s)),
        _ => Err(error(e.pos(), format!("expected {what} name"))),
    }
}

pub(crate) fn parse_int(e: &Sexp) -> Result<BigInt, ParseError> {
    match e.as_atom() {
        Some(s) if is_int(s) => s
            .parse::<BigInt>()
            .map_err(|_| error(e.pos(), "malformed integer")),
        _ => Err(error(e.pos(), "expected integer")),
    }
}

pub(crate) fn list<'a>(e: &'a Sexp, what: &str) -> Result<&'a [Sexp], ParseError> {
    e.as_list()
        .ok_or_else(|| error(e.pos(), format!("expected {what}")))
}

pub(crate) fn arity(e: &Sexp, items: &[Sexp], n: usize) -> Result<(), ParseError> {
    if items.len() != n + 1 {
        let head = items.first().and_then(|h| h.as_atom()).unwrap_or("form");
        return Err(error(e.pos(), format!("'{head}' expects {n} argument(s)")));
    }
    Ok(())
}

pub(crate) fn parse_path(e: &Sexp) -> Result<RolePath, ParseError> {
    let items = list(e, "role path list")?;
    Ok(RolePath(
        items
            .iter()
            .map(|r| parse_name(r, "role"))
            .collect::<Result<_, _>>()?,
    ))
}

pub fn parse_term(e: &Sexp) -> Result<Term, ParseError> {
    let items = list(e, "register term (s k reg)")?;
    if items.len() != 3 || items[0].as_atom() != Some("s") {
        return Err(error(e.pos(), "expected register term (s k reg)"));
    }
    let k = match items[1].as_atom() {
        Some(s) if s.chars().all(|c| c.is_ascii_digit()) && !s.is_empty() => s
            .parse::<u32>()
            .map_err(|_| error(items[1].pos(), "shift too large"))?,
        _ => return Err(error(items[1].pos(), "expected nonnegative shift")),
    };
    Ok(Term {
        shift: k,
        reg: parse_name(&items[2], "register")?,
    })
}

pub fn parse_constraint(e: &Sexp) -> Result<Constraint, ParseError> {
    let items = list(e, "constraint")?;
    let head = e
        .head()
        .ok_or_else(|| error(e.pos(), "expected constraint"))?;
    match head {
        "<" => {
            arity(e, items, 2)?;
            Ok(Constraint::Less(
                parse_term(&items[1])?,
                parse_term(&items[2])?,
            ))
        }
        "=" => {
            arity(e, items, 2)?;
            let a = parse_term(&items[1])?;
            if items[2].as_atom().is_some() {
                Ok(Constraint::EqualConst(a, parse_int(&items[2])?))
            } else {
                Ok(Constraint::Equal(a, parse_term(&items[2])?))
            }
        }
        "not" => {
            arity(e, items, 1)?;
            Ok(Constraint::Not(Box::new(parse_constraint(&items[1])?)))
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
                .map(parse_constraint)
                .collect::<Result<Vec<_>, _>>()?;
            Ok(if head == "and" {
                Constraint::And(cs)
            } else {
                Constraint::Or(cs)
            })
        }
        _ => Err(error(e.pos(), format!("unknown constraint form '{head}'"))),
    }
}

fn check_depth(e: &Sexp, p: &RolePath, t: &Constraint) -> Result<(), ParseError> {
    if t.depth() as usize > p.len() {
        return Err(error(
            e.pos(),
            format!(
                "constraint depth {} exceeds path length {}",
                t.depth(),
                p.len()
            ),
        ));
    }
    Ok(())
}

pub fn parse_concept(e: &Sexp) -> Result<Concept, ParseError> {
    if let Some(s) = e.as_atom() {
        return match s {
            _ if is_int(s) => Err(error(e.pos(), "expected concept, found integer")),
            _ => Ok(Concept::Name(parse_name(e, "concept")?)),
        };
    }
    let items = list(e, "concept")?;
    let head = e.head().ok_or_else(|| error(e.pos(), "expected concept"))?;
    match head {
        "top" => {
            arity(e, items, 0)?;
            Ok(Concept::Top)
        }
        "bot" => {
            arity(e, items, 0)?;
            Ok(Concept::Bottom)
        }
        "not" => {
            arity(e, items, 1)?;
            Ok(Concept::Not(Box::new(parse_concept(&items[1])?)))
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
                .map(parse_concept)
                .collect::<Result<Vec<_>, _>>()?;
            Ok(if head == "and" {
                Concept::And(cs)
            } else {
                Concept::Or(cs)
            })
        }
        "some" | "all" => {
            arity(e, items, 2)?;
            let r = parse_name(&items[1], "role")?;
            let c = Box::new(parse_concept(&items[2])?);
            Ok(if head == "some" {
                Concept::Exists(r, c)
            } else {
                Concept::Forall(r, c)
            })
        }
        "somep" | "allp" => {
            arity(e, items, 2)?;
            let p = parse_path(&items[1])?;
            let t = parse_constraint(&items[2])?;
            check_depth(e, &p, &t)?;
            Ok(if head == "somep" {
                Concept::ExistsPath(p, t)
            } else {
                Concept::ForallPath(p, t)
            })
        }
        _ => Err(error(e.pos(), format!("unknown concept form '{head}'"))),
    }
}

/// Splits a problem file into functional declarations, TBox axioms and the
/// checked expression. `axiom` and `concept` parse the respective parts.
pub(crate) fn parse_file_with<C>(
    src: &str,
    concept: impl Fn(&Sexp) -> Result<C, ParseError>,
) -> Result<(Vec<Name>, Vec<(C, C)>, C), ParseError> {
    let top = read_all(src)?;
    let mut functional: Vec<Name> = Vec::new();
    let mut axioms = Vec::new();
    let mut seen_tbox = false;
    let mut check: Option<C> = None;
    for e in &top {
        let items = list(e, "top-level form")?;
        match e.head() {
            Some("func") => {
                if seen_tbox || check.is_some() {
                    return Err(error(e.pos(), "functional declaration after tbox"));
                }
                arity(e, items, 1)?;
                let r = parse_name(&items[1], "role")?;
                if functional.contains(&r) {
                    return Err(error(
                        e.pos(),
                        format!("duplicate functional declaration of '{r}'"),
                    ));
                }
                functional.push(r);
            }
            Some("tbox") => {
                if seen_tbox {
                    return Err(error(e.pos(), "duplicate tbox"));
                }
                if check.is_some() {
                    return Err(error(e.pos(), "tbox after check"));
                }
                seen_tbox = true;
                for ax in &items[1..] {
                    let parts = list(ax, "axiom (sub C D)")?;
                    if ax.head() != Some("sub") {
                        return Err(error(ax.pos(), "expected axiom (sub C D)"));
                    }
                    arity(ax, parts, 2)?;
                    axioms.push((concept(&parts[1])?, concept(&parts[2])?));
                }
            }
            Some("check") => {
                if check.is_some() {
                    return Err(error(e.pos(), "duplicate check"));
                }
                arity(e, items, 1)?;
                check = Some(concept(&items[1])?);
            }
            Some(h) => return Err(error(e.pos(), format!("unknown top-level form '{h}'"))),
            None => return Err(error(e.pos(), "expected top-level form")),
        }
    }
    let check = check.ok_or_else(|| ParseError {
        line: 1,
        col: 1,
        message: "missing (check C)".into(),
    })?;
    Ok((functional, axioms, check))
}

/// Parses a problem file: `(func r)*`, optional `(tbox (sub C D)*)`, `(check C)`.
pub fn parse_problem(src: &str) -> Result<Problem, ParseError> {
    let (functional, axioms, concept) = parse_file_with(src, parse_concept)?;
    let mut tbox = TBox {
        functional,
        axioms: Vec::new(),
    };
    for (lhs, rhs) in axioms {
        let ax = Axiom { lhs, rhs };
        if !tbox.axioms.contains(&ax) {
            tbox.axioms.push(ax);
        }
    }
    Ok(Problem { tbox, concept })
}

/// Parses a single concept.
pub fn parse_concept_str(src: &str) -> Result<Concept, ParseError> {
    let top = read_all(src)?;
    match top.as_slice() {
        [e] => parse_concept(e),
        _ => Err(ParseError {
            line: 1,
            col: 1,
            message: "expected exactly one concept".into(),
        }),
    }
}

/// Parses a single constraint.
pub fn parse_constraint_str(src: &str) -> Result<Constraint, ParseError> {
    let top = read_all(src)?;
    match top.as_slice() {
        [e] => parse_constraint(e),
        _ => Err(ParseError {
            line: 1,
            col: 1,
            message: "expected exactly one constraint".into(),
        }),
    }
}
