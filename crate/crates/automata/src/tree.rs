//! Generalized Rabin tree automata over `n`-ary trees and their combinators.

use std::collections::BTreeSet;
use std::fmt::Debug;
use std::hash::Hash;

use crate::acceptance::{parity_shape, product_shape, Shape, StateMarks};
use crate::error::AutomataError;
use crate::word::DetParityWordAutomaton;

/// One transition family: a letter and, per child coordinate, the set of states
/// the automaton may choose for that child. The represented tuples are the
/// cartesian product of the coordinate sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Move<L, S> {
    pub letter: L,
    pub children: Vec<Vec<S>>,
}

/// A nondeterministic tree automaton with generalized Rabin acceptance on states.
///
/// Transitions are produced in product form by [`TreeAutomaton::moves`]. The
/// union of the products over all moves is the transition relation used by the
/// emptiness game. [`TreeAutomaton::accepts_step`] decides membership of a single
/// tuple and may be more permissive than the moves as long as it recognizes the
/// same language.
pub trait TreeAutomaton {
    type State: Clone + Eq + Hash + Ord + Debug;
    type Letter: Clone + Eq + Hash + Debug;

    fn degree(&self) -> usize;
    fn initial(&self) -> Self::State;
    fn shape(&self) -> Shape;
    fn marks(&self, q: &Self::State) -> StateMarks;
    fn moves(&self, q: &Self::State) -> Vec<Move<Self::Letter, Self::State>>;

    /// Moves restricted to one letter.
    fn moves_on(&self, q: &Self::State, a: &Self::Letter) -> Vec<Vec<Vec<Self::State>>> {
        self.moves(q)
            .into_iter()
            .filter(|m| &m.letter == a)
            .map(|m| m.children)
            .collect()
    }

    fn accepts_step(&self, q: &Self::State, a: &Self::Letter, children: &[Self::State]) -> bool {
        self.moves_on(q, a).iter().any(|cs| {
            cs.len() == children.len() && cs.iter().zip(children).all(|(set, c)| set.contains(c))
        })
    }
}

/// Explicit automaton with dense states and plain Rabin pairs.
#[derive(Clone, Debug)]
pub struct ExplicitTreeAutomaton<L> {
    pub degree: usize,
    pub num_states: usize,
    pub initial: usize,
    pub transitions: Vec<(usize, L, Vec<usize>)>,
    /// Pairs `(L, U)` given as state sets.
    pub pairs: Vec<(BTreeSet<usize>, BTreeSet<usize>)>,
}

impl<L: Clone + Eq + Hash + Debug> TreeAutomaton for ExplicitTreeAutomaton<L> {
    type State = usize;
    type Letter = L;

    fn degree(&self) -> usize {
        self.degree
    }
    fn initial(&self) -> usize {
        self.initial
    }
    fn shape(&self) -> Shape {
        vec![1; self.pairs.len()]
    }
    fn marks(&self, q: &usize) -> StateMarks {
        StateMarks {
            in_l: self.pairs.iter().map(|(l, _)| l.contains(q)).collect(),
            in_u: self
                .pairs
                .iter()
                .map(|(_, u)| vec![u.contains(q)])
                .collect(),
        }
    }
    fn moves(&self, q: &usize) -> Vec<Move<L, usize>> {
        self.transitions
            .iter()
            .filter(|(p, _, _)| p == q)
            .map(|(_, a, cs)| Move {
                letter: a.clone(),
                children: cs.iter().map(|&c| vec![c]).collect(),
            })
            .collect()
    }
}

/// Intersection of two automata over the same alphabet and degree.
#[derive(Clone, Debug)]
pub struct Product<A, B> {
    pub left: A,
    pub right: B,
}

impl<A, B> Product<A, B>
where
    A: TreeAutomaton,
    B: TreeAutomaton<Letter = A::Letter>,
{
    pub fn new(left: A, right: B) -> Result<Self, AutomataError> {
        if left.degree() != right.degree() {
            return Err(AutomataError::DegreeMismatch(left.degree(), right.degree()));
        }
        Ok(Product { left, right })
    }
}

/// Cartesian product of two coordinate-wise choice lists.
pub fn zip_children<S: Clone, T: Clone>(a: &[Vec<S>], b: &[Vec<T>]) -> Vec<Vec<(S, T)>> {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let mut out = Vec::with_capacity(x.len() * y.len());
            for s in x {
                for t in y {
                    out.push((s.clone(), t.clone()));
                }
            }
            out
        })
        .collect()
}

impl<A, B> TreeAutomaton for Product<A, B>
where
    A: TreeAutomaton,
    B: TreeAutomaton<Letter = A::Letter>,
{
    type State = (A::State, B::State);
    type Letter = A::Letter;

    fn degree(&self) -> usize {
        self.left.degree()
    }
    fn initial(&self) -> Self::State {
        (self.left.initial(), self.right.initial())
    }
    fn shape(&self) -> Shape {
        product_shape(&self.left.shape(), &self.right.shape())
    }
    fn marks(&self, q: &Self::State) -> StateMarks {
        self.left.marks(&q.0).product(&self.right.marks(&q.1))
    }
    fn moves(&self, q: &Self::State) -> Vec<Move<Self::Letter, Self::State>> {
        let mut out = Vec::new();
        for m in self.left.moves(&q.0) {
            for cs in self.right.moves_on(&q.1, &m.letter) {
                out.push(Move {
                    letter: m.letter.clone(),
                    children: zip_children(&m.children, &cs),
                });
            }
        }
        out
    }
    fn moves_on(&self, q: &Self::State, a: &Self::Letter) -> Vec<Vec<Vec<Self::State>>> {
        let mut out = Vec::new();
        for l in self.left.moves_on(&q.0, a) {
            for r in self.right.moves_on(&q.1, a) {
                out.push(zip_children(&l, &r));
            }
        }
        out
    }
    fn accepts_step(&self, q: &Self::State, a: &Self::Letter, children: &[Self::State]) -> bool {
        let l: Vec<A::State> = children.iter().map(|c| c.0.clone()).collect();
        let r: Vec<B::State> = children.iter().map(|c| c.1.clone()).collect();
        self.left.accepts_step(&q.0, a, &l) && self.right.accepts_step(&q.1, a, &r)
    }
}

/// Automaton over pair letters `(a, b)` running `A` on the first and `B` on the
/// second component.
#[derive(Clone, Debug)]
pub struct Paired<A, B> {
    pub left: A,
    pub right: B,
}

impl<A: TreeAutomaton, B: TreeAutomaton> Paired<A, B> {
    pub fn new(left: A, right: B) -> Result<Self, AutomataError> {
        if left.degree() != right.degree() {
            return Err(AutomataError::DegreeMismatch(left.degree(), right.degree()));
        }
        Ok(Paired { left, right })
    }
}

impl<A: TreeAutomaton, B: TreeAutomaton> TreeAutomaton for Paired<A, B> {
    type State = (A::State, B::State);
    type Letter = (A::Letter, B::Letter);

    fn degree(&self) -> usize {
        self.left.degree()
    }
    fn initial(&self) -> Self::State {
        (self.left.initial(), self.right.initial())
    }
    fn shape(&self) -> Shape {
        product_shape(&self.left.shape(), &self.right.shape())
    }
    fn marks(&self, q: &Self::State) -> StateMarks {
        self.left.marks(&q.0).product(&self.right.marks(&q.1))
    }
    fn moves(&self, q: &Self::State) -> Vec<Move<Self::Letter, Self::State>> {
        let mut out = Vec::new();
        let rights = self.right.moves(&q.1);
        for l in self.left.moves(&q.0) {
            for r in &rights {
                out.push(Move {
                    letter: (l.letter.clone(), r.letter.clone()),
                    children: zip_children(&l.children, &r.children),
                });
            }
        }
        out
    }
    fn moves_on(&self, q: &Self::State, a: &Self::Letter) -> Vec<Vec<Vec<Self::State>>> {
        let mut out = Vec::new();
        let rights = self.right.moves_on(&q.1, &a.1);
        for l in self.left.moves_on(&q.0, &a.0) {
            for r in &rights {
                out.push(zip_children(&l, r));
            }
        }
        out
    }
    fn accepts_step(&self, q: &Self::State, a: &Self::Letter, children: &[Self::State]) -> bool {
        let l: Vec<A::State> = children.iter().map(|c| c.0.clone()).collect();
        let r: Vec<B::State> = children.iter().map(|c| c.1.clone()).collect();
        self.left.accepts_step(&q.0, &a.0, &l) && self.right.accepts_step(&q.1, &a.1, &r)
    }
}

/// Runs a deterministic parity word automaton along every path of a tree, with
/// an explicitly enumerated alphabet. Without direction tags the letter read on a
/// path is the node label.
#[derive(Clone, Debug)]
pub struct LiftAllPaths<D: DetParityWordAutomaton> {
    pub dpw: D,
    pub degree: usize,
    pub alphabet: Vec<D::Letter>,
}

impl<D: DetParityWordAutomaton> TreeAutomaton for LiftAllPaths<D> {
    type State = D::State;
    type Letter = D::Letter;

    fn degree(&self) -> usize {
        self.degree
    }
    fn initial(&self) -> D::State {
        self.dpw.initial()
    }
    fn shape(&self) -> Shape {
        parity_shape(self.dpw.max_priority())
    }
    fn marks(&self, q: &D::State) -> StateMarks {
        StateMarks::from_priority(self.dpw.priority(q), self.dpw.max_priority())
    }
    fn moves(&self, q: &D::State) -> Vec<Move<D::Letter, D::State>> {
        self.alphabet
            .iter()
            .map(|a| {
                let s = self.dpw.step(q, a);
                Move {
                    letter: a.clone(),
                    children: vec![vec![s]; self.degree],
                }
            })
            .collect()
    }
    fn moves_on(&self, q: &D::State, a: &D::Letter) -> Vec<Vec<Vec<D::State>>> {
        vec![vec![vec![self.dpw.step(q, a)]; self.degree]]
    }
}

/// Like [`LiftAllPaths`] but the word automaton reads `(label, direction)` where the
/// direction is the index of the child the path continues to.
#[derive(Clone, Debug)]
pub struct LiftAllPathsTagged<D: DetParityWordAutomaton, L> {
    pub dpw: D,
    pub degree: usize,
    pub alphabet: Vec<L>,
}

impl<L, D> TreeAutomaton for LiftAllPathsTagged<D, L>
where
    L: Clone + Eq + Hash + Debug,
    D: DetParityWordAutomaton<Letter = (L, usize)>,
{
    type State = D::State;
    type Letter = L;

    fn degree(&self) -> usize {
        self.degree
    }
    fn initial(&self) -> D::State {
        self.dpw.initial()
    }
    fn shape(&self) -> Shape {
        parity_shape(self.dpw.max_priority())
    }
    fn marks(&self, q: &D::State) -> StateMarks {
        StateMarks::from_priority(self.dpw.priority(q), self.dpw.max_priority())
    }
    fn moves(&self, q: &D::State) -> Vec<Move<L, D::State>> {
        self.alphabet
            .iter()
            .map(|a| Move {
                letter: a.clone(),
                children: self.moves_on(q, a).remove(0),
            })
            .collect()
    }
    fn moves_on(&self, q: &D::State, a: &L) -> Vec<Vec<Vec<D::State>>> {
        vec![(0..self.degree)
            .map(|i| vec![self.dpw.step(q, &(a.clone(), i))])
            .collect()]
    }
}
