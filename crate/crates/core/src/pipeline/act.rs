//! Consistency of frame trees and the embeddability automaton built from it.

use zalc_automata::{AutomataError, LiftAllPaths, Move, Product, Shape, StateMarks, TreeAutomaton};

use super::bw::{emb_dpw, EmbDpw};
use crate::abstraction::{Frame, FrameIter, Layer, Signature};

/// `Init` at the root, afterwards the bottom layer of the parent's frame.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CtState {
    Init,
    Prev(Layer),
}

impl CtState {
    /// Whether a node in this state may carry `f`.
    pub fn admits(&self, f: &Frame) -> bool {
        match self {
            CtState::Init => f.root,
            CtState::Prev(l) => !f.root && &f.top_layer() == l,
        }
    }
}

/// Accepts the trees whose root carries a root frame and whose
/// parent/child frames agree on the shared layer. Letters are generated
/// from the state, so no explicit alphabet is needed.
#[derive(Clone, Debug)]
pub struct Act {
    pub sig: Signature,
    pub degree: usize,
}

impl TreeAutomaton for Act {
    type State = CtState;
    type Letter = Frame;

    fn degree(&self) -> usize {
        self.degree
    }
    fn initial(&self) -> CtState {
        CtState::Init
    }
    fn shape(&self) -> Shape {
        vec![1]
    }
    fn marks(&self, _: &CtState) -> StateMarks {
        StateMarks::trivial()
    }
    fn moves(&self, q: &CtState) -> Vec<Move<Frame, CtState>> {
        let frames: Box<dyn Iterator<Item = Frame>> = match q {
            CtState::Init => Box::new(FrameIter::roots(&self.sig, vec![])),
            CtState::Prev(l) => Box::new(FrameIter::children(&self.sig, l, vec![])),
        };
        frames
            .map(|f| {
                let next = CtState::Prev(f.bot_layer());
                Move {
                    letter: f,
                    children: vec![vec![next]; self.degree],
                }
            })
            .collect()
    }
    fn moves_on(&self, q: &CtState, f: &Frame) -> Vec<Vec<Vec<CtState>>> {
        if q.admits(f) && f.well_formed(&self.sig) {
            vec![vec![vec![CtState::Prev(f.bot_layer())]; self.degree]]
        } else {
            vec![]
        }
    }
}

/// Frame trees that are consistent and satisfy the path-pair condition on
/// every branch.
pub type AEmb = Product<Act, LiftAllPaths<EmbDpw>>;

pub fn build_a_emb(sig: &Signature, degree: usize) -> Result<AEmb, AutomataError> {
    Product::new(
        Act {
            sig: sig.clone(),
            degree,
        },
        LiftAllPaths {
            dpw: emb_dpw(sig),
            degree,
            alphabet: Vec::new(),
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abstraction::frames_consistent;
    use crate::syntax::ast::Name;
    use zalc_automata::emptiness;

    #[test]
    fn consistency_automaton_is_nonempty() {
        let sig = Signature::new(vec![Name::new("x")], 0, 0);
        let a = Act { sig, degree: 1 };
        let r = emptiness(&a, 10_000).unwrap();
        assert!(r.witness.is_some());
    }

    #[test]
    fn root_frame_required_at_root() {
        let sig = Signature::new(vec![Name::new("x")], 0, 0);
        let root = FrameIter::roots(&sig, vec![]).next().unwrap();
        let child = root.bot_layer().padding_frame();
        assert!(CtState::Init.admits(&root));
        assert!(!CtState::Init.admits(&child));
        assert!(CtState::Prev(root.bot_layer()).admits(&child));
        assert!(frames_consistent(&root, &child));
    }
}
