//! The word automaton that guesses a violating pair of register paths along
//! one branch of a frame tree, and its determinized complement.

use zalc_automata::{DualDpw, OmegaWordAutomaton, SafraDpw};

use crate::abstraction::{Frame, Signature, TOP};

/// State of the path-pair automaton. `Path` refers to registers of the
/// previous node: `x` starts the forward path, `y` the backward one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BwState {
    Seek,
    Path {
        x: u32,
        y: u32,
        forward: bool,
        strict: bool,
    },
}

/// Büchi automaton over frames accepting the branches along which an
/// aligned forward/backward path pair with strict cross edges exists and the
/// chosen side has infinitely many strict steps.
#[derive(Clone, Debug)]
pub struct Bw {
    pub m: u32,
}

impl Bw {
    pub fn new(sig: &Signature) -> Self {
        Bw { m: sig.m() as u32 }
    }

    /// Upper bound on the number of states.
    pub fn state_count(&self) -> usize {
        1 + 4 * (self.m as usize).pow(2)
    }
}

impl OmegaWordAutomaton for Bw {
    type State = BwState;
    type Letter = Frame;

    fn initial_states(&self) -> Vec<BwState> {
        vec![BwState::Seek]
    }

    fn successors(&self, q: &BwState, f: &Frame) -> Vec<BwState> {
        let m = self.m;
        let mut out = Vec::new();
        match *q {
            BwState::Seek => {
                out.push(BwState::Seek);
                for x in 0..m {
                    for y in 0..m {
                        if f.less(x, y) {
                            for forward in [true, false] {
                                out.push(BwState::Path {
                                    x,
                                    y,
                                    forward,
                                    strict: false,
                                });
                            }
                        }
                    }
                }
            }
            BwState::Path { x, y, forward, .. } => {
                if f.root {
                    return out;
                }
                for z in 0..m {
                    if !f.less_eq(x + TOP, z) {
                        continue;
                    }
                    for w in 0..m {
                        if f.less(z, w) && f.less_eq(w, y + TOP) {
                            let strict = if forward {
                                f.less(x + TOP, z)
                            } else {
                                f.less(w, y + TOP)
                            };
                            out.push(BwState::Path {
                                x: z,
                                y: w,
                                forward,
                                strict,
                            });
                        }
                    }
                }
            }
        }
        out
    }

    fn is_accepting(&self, q: &BwState) -> bool {
        matches!(q, BwState::Path { strict: true, .. })
    }
}

/// Deterministic parity automaton for the branches without a violating pair.
pub type EmbDpw = DualDpw<SafraDpw<Bw>>;

pub fn emb_dpw(sig: &Signature) -> EmbDpw {
    let b = Bw::new(sig);
    let bound = b.state_count();
    DualDpw(SafraDpw::new(b, bound))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abstraction::FrameIter;
    use crate::syntax::ast::Name;
    use zalc_automata::{dpw_accepts_lasso, nbw_accepts_lasso, Lasso};

    fn sig2() -> Signature {
        Signature::new(vec![Name::new("x"), Name::new("y")], 0, 0)
    }

    #[test]
    fn constant_branch_is_not_violating() {
        let sig = sig2();
        let root = FrameIter::roots(&sig, vec![]).next().unwrap();
        let pad = root.bot_layer().padding_frame();
        let b = Bw::new(&sig);
        let lasso = Lasso::new(vec![root], vec![pad]);
        assert!(!nbw_accepts_lasso(&b, &lasso));
        assert!(dpw_accepts_lasso(&emb_dpw(&sig), &lasso));
    }
}
