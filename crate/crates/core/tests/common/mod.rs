//! Random generators shared by the integration tests.
#![allow(dead_code)]

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use zalc_core::abstraction::{Frame, FrameIter, Signature};
use zalc_core::cgraph::{RegularTree, RtNode};
use zalc_core::syntax::{Axiom, Concept, Constraint, Name, Problem, RolePath, TBox, Term};

pub fn random_regular_tree(
    rng: &mut ChaCha8Rng,
    sig: &Signature,
    degree: usize,
    max_nodes: usize,
) -> RegularTree {
    let roots: Vec<Frame> = FrameIter::roots(sig, vec![]).collect();
    let mut nodes = vec![RtNode {
        frame: roots.choose(rng).expect("root frames").clone(),
        children: Vec::new(),
    }];
    let mut i = 0;
    while i < nodes.len() {
        let layer = nodes[i].frame.bot_layer();
        for _ in 0..degree {
            let reuse: Vec<usize> = (1..nodes.len())
                .filter(|&j| nodes[j].frame.top_layer() == layer)
                .collect();
            let full = nodes.len() >= max_nodes;
            let c = if !reuse.is_empty() && (full || rng.gen_bool(0.5)) {
                *reuse.choose(rng).expect("nonempty")
            } else {
                let frame = if full {
                    layer.padding_frame()
                } else {
                    let kids: Vec<Frame> = FrameIter::children(sig, &layer, vec![]).collect();
                    kids.choose(rng).expect("child frames").clone()
                };
                nodes.push(RtNode {
                    frame,
                    children: Vec::new(),
                });
                nodes.len() - 1
            };
            nodes[i].children.push(c);
        }
        i += 1;
    }
    RegularTree { degree, nodes }
}

pub fn random_term(rng: &mut ChaCha8Rng, regs: &[&str], depth: u32) -> Term {
    Term::new(rng.gen_range(0..=depth), regs[rng.gen_range(0..regs.len())])
}

pub fn random_constraint(rng: &mut ChaCha8Rng, regs: &[&str], depth: u32, nest: u32) -> Constraint {
    let atom = |rng: &mut ChaCha8Rng| match rng.gen_range(0..3) {
        0 => Constraint::Less(random_term(rng, regs, depth), random_term(rng, regs, depth)),
        1 => Constraint::Equal(random_term(rng, regs, depth), random_term(rng, regs, depth)),
        _ => Constraint::EqualConst(
            random_term(rng, regs, depth),
            BigInt::from(rng.gen_range(0..=1)),
        ),
    };
    if nest == 0 || rng.gen_bool(0.5) {
        return atom(rng);
    }
    match rng.gen_range(0..3) {
        0 => Constraint::Not(Box::new(random_constraint(rng, regs, depth, nest - 1))),
        1 => Constraint::And(vec![
            random_constraint(rng, regs, depth, nest - 1),
            random_constraint(rng, regs, depth, nest - 1),
        ]),
        _ => Constraint::Or(vec![
            random_constraint(rng, regs, depth, nest - 1),
            random_constraint(rng, regs, depth, nest - 1),
        ]),
    }
}

pub fn random_concept(rng: &mut ChaCha8Rng, regs: &[&str], roles: &[&str], budget: u32) -> Concept {
    let path = |rng: &mut ChaCha8Rng, len: usize| -> RolePath {
        RolePath(
            (0..len)
                .map(|_| Name::new(roles[rng.gen_range(0..roles.len())]))
                .collect(),
        )
    };
    let leaf = |rng: &mut ChaCha8Rng| -> Concept {
        match rng.gen_range(0..4) {
            0 => Concept::name("A"),
            1 => Concept::not(Concept::name("A")),
            _ => {
                let len = rng.gen_range(0..=budget.min(2) as usize);
                let p = path(rng, len);
                let c = random_constraint(rng, regs, len as u32, 1);
                if rng.gen_bool(0.6) {
                    Concept::ExistsPath(p, c)
                } else {
                    Concept::ForallPath(p, c)
                }
            }
        }
    };
    if budget == 0 || rng.gen_bool(0.3) {
        return leaf(rng);
    }
    let r = roles[rng.gen_range(0..roles.len())];
    match rng.gen_range(0..5) {
        0 => Concept::exists(r, random_concept(rng, regs, roles, budget - 1)),
        1 => Concept::forall(r, random_concept(rng, regs, roles, budget - 1)),
        2 => Concept::Or(vec![
            random_concept(rng, regs, roles, budget - 1),
            random_concept(rng, regs, roles, budget - 1),
        ]),
        3 => Concept::not(random_concept(rng, regs, roles, budget - 1)),
        _ => Concept::And(vec![
            random_concept(rng, regs, roles, budget - 1),
            random_concept(rng, regs, roles, budget - 1),
        ]),
    }
}

pub fn random_problem(rng: &mut ChaCha8Rng) -> Problem {
    let regs: &[&str] = if rng.gen_bool(0.6) {
        &["x"]
    } else {
        &["x", "y"]
    };
    let functional = rng.gen_bool(0.3);
    let roles: &[&str] = if functional { &["f"] } else { &["r"] };
    let concept = random_concept(rng, regs, roles, 2);
    let mut axioms = Vec::new();
    if rng.gen_bool(0.4) {
        let lhs = if rng.gen_bool(0.5) {
            Concept::Top
        } else {
            Concept::name("A")
        };
        axioms.push(Axiom {
            lhs,
            rhs: random_concept(rng, regs, roles, 1),
        });
    }
    Problem {
        tbox: TBox {
            functional: if functional {
                vec![Name::new("f")]
            } else {
                Vec::new()
            },
            axioms,
        },
        concept,
    }
}
