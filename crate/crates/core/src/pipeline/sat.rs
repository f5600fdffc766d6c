//! Matching of placeholders against frames, and the combined automaton whose
//! emptiness decides satisfiability.

use std::collections::HashMap;

use zalc_automata::{
    acceptance::parity_shape, DetParityWordAutomaton, Move, SafraState, Shape, StateMarks,
    TreeAutomaton,
};

use super::act::CtState;
use super::alcf::{Alcf, AlcfState, Xi};
use super::bw::{emb_dpw, BwState, EmbDpw};
use crate::abstraction::{AbstractProblem, Frame, FrameIter, Requirement, Signature, TOP};
use crate::syntax::ast::Name;

/// A tree letter: a frame and the concept names of the node.
pub type PairedLetter = (Frame, Xi);

/// Whether the frame repeats its top layer on the bottom with equal edges.
pub fn is_identity_frame(f: &Frame) -> bool {
    let low = (1u128 << TOP) - 1;
    !f.root
        && f.undefined >> TOP == f.undefined & low
        && f.classes
            .iter()
            .all(|c| c.members >> TOP == c.members & low)
}

/// Single-state automaton over paired letters: every placeholder named by
/// the letter must hold in its frame, and padding nodes carry the identity
/// frame. Its alphabet is implicit, so it only answers per-letter queries.
#[derive(Clone, Debug)]
pub struct Matching {
    pub reqs: HashMap<Name, Requirement>,
    pub degree: usize,
}

impl Matching {
    pub fn new(ap: &AbstractProblem, degree: usize) -> Self {
        let reqs = ap
            .placeholders
            .iter()
            .map(|p| (p.name.clone(), p.requirement(&ap.signature)))
            .collect();
        Matching { reqs, degree }
    }

    pub fn requirements(&self, xi: &Xi) -> Vec<Requirement> {
        xi.names
            .iter()
            .filter_map(|n| self.reqs.get(n))
            .copied()
            .collect()
    }

    pub fn matches(&self, f: &Frame, xi: &Xi) -> bool {
        if xi.is_padding() {
            return is_identity_frame(f);
        }
        xi.names
            .iter()
            .filter_map(|n| self.reqs.get(n))
            .all(|r| r.holds(f))
    }
}

impl TreeAutomaton for Matching {
    type State = ();
    type Letter = PairedLetter;

    fn degree(&self) -> usize {
        self.degree
    }
    fn initial(&self) {}
    fn shape(&self) -> Shape {
        vec![1]
    }
    fn marks(&self, _: &()) -> StateMarks {
        StateMarks::trivial()
    }
    fn moves(&self, _: &()) -> Vec<Move<PairedLetter, ()>> {
        Vec::new()
    }
    fn moves_on(&self, _: &(), a: &PairedLetter) -> Vec<Vec<Vec<()>>> {
        if self.matches(&a.0, &a.1) {
            vec![vec![vec![()]; self.degree]]
        } else {
            Vec::new()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SatState {
    pub ct: CtState,
    pub emb: SafraState<BwState>,
    pub alcf: AlcfState,
}

/// Product of frame consistency, the all-paths embeddability automaton, the
/// ALCF automaton and matching. Frames are generated per ALCF move, already
/// filtered by the placeholders of its letter.
#[derive(Clone, Debug)]
pub struct SatAutomaton {
    pub sig: Signature,
    pub dpw: EmbDpw,
    pub alcf: Alcf,
    pub matching: Matching,
}

impl SatAutomaton {
    pub fn new(ap: &AbstractProblem, degree: usize) -> Self {
        let alcf = Alcf::new(&ap.problem, degree);
        let matching = Matching::new(ap, alcf.degree);
        SatAutomaton {
            sig: ap.signature.clone(),
            dpw: emb_dpw(&ap.signature),
            alcf,
            matching,
        }
    }

    fn frames(&self, ct: &CtState, xi: &Xi) -> Vec<Frame> {
        let reqs = self.matching.requirements(xi);
        match ct {
            CtState::Init if xi.is_padding() => Vec::new(),
            CtState::Prev(l) if xi.is_padding() => vec![l.padding_frame()],
            CtState::Init => FrameIter::roots(&self.sig, reqs.clone())
                .filter(|f| reqs.iter().all(|r| r.holds(f)))
                .collect(),
            CtState::Prev(l) => FrameIter::children(&self.sig, l, reqs.clone())
                .filter(|f| reqs.iter().all(|r| r.holds(f)))
                .collect(),
        }
    }

    fn letter_ok(&self, q: &SatState, a: &PairedLetter) -> bool {
        q.ct.admits(&a.0) && a.0.well_formed(&self.sig) && self.matching.matches(&a.0, &a.1)
    }
}

impl TreeAutomaton for SatAutomaton {
    type State = SatState;
    type Letter = PairedLetter;

    fn degree(&self) -> usize {
        self.alcf.degree
    }
    fn initial(&self) -> SatState {
        SatState {
            ct: CtState::Init,
            emb: self.dpw.initial(),
            alcf: self.alcf.root_state(),
        }
    }
    fn shape(&self) -> Shape {
        parity_shape(self.dpw.max_priority())
    }
    fn marks(&self, q: &SatState) -> StateMarks {
        StateMarks::from_priority(self.dpw.priority(&q.emb), self.dpw.max_priority())
    }
    fn moves(&self, q: &SatState) -> Vec<Move<PairedLetter, SatState>> {
        let mut out = Vec::new();
        for m in self.alcf.node_moves(&q.alcf) {
            for f in self.frames(&q.ct, &m.letter) {
                let ct = CtState::Prev(f.bot_layer());
                let emb = self.dpw.step(&q.emb, &f);
                let children = m
                    .children
                    .iter()
                    .map(|a| {
                        vec![SatState {
                            ct: ct.clone(),
                            emb: emb.clone(),
                            alcf: a.clone(),
                        }]
                    })
                    .collect();
                out.push(Move {
                    letter: (f, m.letter.clone()),
                    children,
                });
            }
        }
        out
    }
    fn moves_on(&self, q: &SatState, a: &PairedLetter) -> Vec<Vec<Vec<SatState>>> {
        if !self.letter_ok(q, a) {
            return Vec::new();
        }
        let ct = CtState::Prev(a.0.bot_layer());
        let emb = self.dpw.step(&q.emb, &a.0);
        self.alcf
            .moves_on(&q.alcf, &a.1)
            .into_iter()
            .map(|cs| {
                cs.into_iter()
                    .map(|set| {
                        set.into_iter()
                            .map(|alcf| SatState {
                                ct: ct.clone(),
                                emb: emb.clone(),
                                alcf,
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect()
    }
    fn accepts_step(&self, q: &SatState, a: &PairedLetter, children: &[SatState]) -> bool {
        if !self.letter_ok(q, a) || children.len() != self.degree() {
            return false;
        }
        let ct = CtState::Prev(a.0.bot_layer());
        let emb = self.dpw.step(&q.emb, &a.0);
        if children.iter().any(|c| c.ct != ct || c.emb != emb) {
            return false;
        }
        let kids: Vec<AlcfState> = children.iter().map(|c| c.alcf.clone()).collect();
        self.alcf.accepts_step(&q.alcf, &a.1, &kids)
    }
}
