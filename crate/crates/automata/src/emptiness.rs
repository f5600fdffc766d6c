//! Emptiness of tree automata through parity games.
//!
//! From a state the Automaton player picks a move (a letter with one choice set
//! per child coordinate), the Pathfinder picks a coordinate and the Automaton
//! picks a state from that coordinate's set. The automaton is nonempty iff the
//! Automaton player wins from the initial state; a positional winning strategy is
//! a regular witness tree.

use std::collections::HashMap;
use std::fmt::Debug;

use log::{debug, info};

use crate::acceptance::{Memory, ParityConverter, Shape, StateMarks};
use crate::error::AutomataError;
use crate::game::{ParityGame, Player};
use crate::tree::{Move, TreeAutomaton};

/// Explored transition structure of a tree automaton.
#[derive(Clone, Debug)]
pub struct Skeleton<S, L> {
    pub states: Vec<S>,
    pub marks: Vec<StateMarks>,
    pub moves: Vec<Vec<SkeletonMove<L>>>,
    pub choice_sets: Vec<Vec<u32>>,
    pub shape: Shape,
}

#[derive(Clone, Debug)]
pub struct SkeletonMove<L> {
    pub letter: L,
    /// Choice set id per coordinate.
    pub children: Vec<u32>,
}

/// Regular tree with a run annotation: node 0 is the root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegularTreeWitness<S, L> {
    pub nodes: Vec<WitnessNode<S, L>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessNode<S, L> {
    pub state: S,
    pub letter: L,
    pub children: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EmptinessStats {
    pub automaton_states: usize,
    pub moves: usize,
    pub game_vertices: usize,
    pub conversion: String,
}

#[derive(Clone, Debug)]
pub struct EmptinessResult<S, L> {
    pub witness: Option<RegularTreeWitness<S, L>>,
    pub stats: EmptinessStats,
}

impl<S, L> EmptinessResult<S, L> {
    pub fn is_empty(&self) -> bool {
        self.witness.is_none()
    }
}

/// Explores all states reachable from the initial state. Fails once more than
/// `limit` states are found.
pub fn explore<A: TreeAutomaton>(
    a: &A,
    limit: usize,
) -> Result<Skeleton<A::State, A::Letter>, AutomataError> {
    let mut index: HashMap<A::State, u32> = HashMap::new();
    let mut sets: HashMap<Vec<u32>, u32> = HashMap::new();
    let mut sk = Skeleton {
        states: Vec::new(),
        marks: Vec::new(),
        moves: Vec::new(),
        choice_sets: Vec::new(),
        shape: a.shape(),
    };
    let init = a.initial();
    index.insert(init.clone(), 0);
    sk.states.push(init);
    let mut next = 0usize;
    while next < sk.states.len() {
        let q = sk.states[next].clone();
        sk.marks.push(a.marks(&q));
        let mut ms = Vec::new();
        for Move { letter, children } in a.moves(&q) {
            if children.len() != a.degree() {
                return Err(AutomataError::DegreeMismatch(a.degree(), children.len()));
            }
            let mut ids = Vec::with_capacity(children.len());
            for set in children {
                let mut members: Vec<u32> = Vec::with_capacity(set.len());
                for s in set {
                    let id = match index.get(&s) {
                        Some(&id) => id,
                        None => {
                            let id = sk.states.len() as u32;
                            if sk.states.len() >= limit {
                                return Err(AutomataError::StateLimit(limit));
                            }
                            index.insert(s.clone(), id);
                            sk.states.push(s);
                            id
                        }
                    };
                    members.push(id);
                }
                members.sort_unstable();
                members.dedup();
                let next_id = sk.choice_sets.len() as u32;
                let cid = *sets.entry(members.clone()).or_insert(next_id);
                if cid == next_id {
                    sk.choice_sets.push(members);
                }
                ids.push(cid);
            }
            ms.push(SkeletonMove {
                letter,
                children: ids,
            });
        }
        sk.moves.push(ms);
        next += 1;
    }
    debug!(
        "explored {} states, {} choice sets",
        sk.states.len(),
        sk.choice_sets.len()
    );
    Ok(sk)
}

enum Vertex {
    Auto { state: u32, mem: Memory },
    Path { mv: u32 },
    Choose { set: u32, mem: Memory },
    Sink,
}

struct GameBuild {
    game: ParityGame,
    info: Vec<Vertex>,
    /// For path vertices: choose vertex per coordinate.
    coords: HashMap<u32, Vec<u32>>,
}

/// Builds the emptiness game of a skeleton and solves it.
pub fn solve_skeleton<S: Clone, L: Clone>(
    sk: &Skeleton<S, L>,
) -> (Option<RegularTreeWitness<S, L>>, EmptinessStats) {
    let conv = ParityConverter::for_states(&sk.shape, &sk.marks);
    let conversion = match &conv {
        ParityConverter::AllAccepting => "all-accepting".to_string(),
        ParityConverter::NoneAccepting => "none-accepting".to_string(),
        ParityConverter::Chain { pairs } => format!("chain({})", pairs.len()),
        ParityConverter::Iar { pairs } => format!("iar({})", pairs.len()),
    };
    let neutral = conv.max_priority() + 1;
    let mut b = GameBuild {
        game: ParityGame::new(),
        info: Vec::new(),
        coords: HashMap::new(),
    };
    // sink lost by the Automaton player
    let sink = b.game.add_vertex(Player::Odd, 1);
    b.game.add_edge(sink, sink);
    b.info.push(Vertex::Sink);
    let mut autos: HashMap<(u32, Memory, u32), u32> = HashMap::new();
    let mut chooses: HashMap<(u32, Memory), u32> = HashMap::new();
    let mut pending: Vec<u32> = Vec::new();
    let (m0, p0) = conv.visit(&conv.initial_memory(), &sk.marks[0]);
    let root = b.game.add_vertex(Player::Even, p0);
    b.info.push(Vertex::Auto {
        state: 0,
        mem: m0.clone(),
    });
    autos.insert((0, m0, p0), root);
    pending.push(root);
    while let Some(v) = pending.pop() {
        match &b.info[v as usize] {
            Vertex::Auto { state, mem } => {
                let (state, mem) = (*state, mem.clone());
                let moves = &sk.moves[state as usize];
                if moves.is_empty() {
                    b.game.add_edge(v, sink);
                    continue;
                }
                for (mi, mv) in moves.iter().enumerate() {
                    let pv = b.game.add_vertex(Player::Odd, neutral);
                    b.info.push(Vertex::Path { mv: mi as u32 });
                    b.game.add_edge(v, pv);
                    let mut coord = Vec::with_capacity(mv.children.len());
                    for &cs in &mv.children {
                        let key = (cs, mem.clone());
                        let cv = match chooses.get(&key) {
                            Some(&cv) => cv,
                            None => {
                                let cv = b.game.add_vertex(Player::Even, neutral);
                                b.info.push(Vertex::Choose {
                                    set: cs,
                                    mem: mem.clone(),
                                });
                                chooses.insert(key, cv);
                                pending.push(cv);
                                cv
                            }
                        };
                        coord.push(cv);
                        if !b.game.succ[pv as usize].contains(&cv) {
                            b.game.add_edge(pv, cv);
                        }
                    }
                    b.coords.insert(pv, coord);
                }
            }
            Vertex::Choose { set, mem } => {
                let (set, mem) = (*set, mem.clone());
                let members = &sk.choice_sets[set as usize];
                if members.is_empty() {
                    b.game.add_edge(v, sink);
                    continue;
                }
                for &q in members {
                    let (m2, p) = conv.visit(&mem, &sk.marks[q as usize]);
                    let key = (q, m2.clone(), p);
                    let av = match autos.get(&key) {
                        Some(&av) => av,
                        None => {
                            let av = b.game.add_vertex(Player::Even, p);
                            b.info.push(Vertex::Auto { state: q, mem: m2 });
                            autos.insert(key, av);
                            pending.push(av);
                            av
                        }
                    };
                    b.game.add_edge(v, av);
                }
            }
            Vertex::Path { .. } | Vertex::Sink => {}
        }
    }
    let stats = EmptinessStats {
        automaton_states: sk.states.len(),
        moves: sk.moves.iter().map(|m| m.len()).sum(),
        game_vertices: b.game.len(),
        conversion,
    };
    info!(
        "emptiness game: {} vertices from {} automaton states ({})",
        stats.game_vertices, stats.automaton_states, stats.conversion
    );
    let sol = b.game.solve();
    if sol.winner[root as usize] != Player::Even {
        return (None, stats);
    }
    // extract the witness from the Automaton player's strategy
    let mut ids: HashMap<u32, usize> = HashMap::new();
    let mut order: Vec<u32> = vec![root];
    ids.insert(root, 0);
    let mut nodes: Vec<WitnessNode<S, L>> = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let av = order[i];
        let Vertex::Auto { state, .. } = &b.info[av as usize] else {
            unreachable!("witness nodes are automaton vertices")
        };
        let pv = sol.strategy[av as usize].expect("strategy at winning automaton vertex");
        let Vertex::Path { mv, .. } = &b.info[pv as usize] else {
            unreachable!("automaton vertices move to path vertices")
        };
        let mv = &sk.moves[*state as usize][*mv as usize];
        let mut children = Vec::new();
        for &cv in &b.coords[&pv] {
            let next = sol.strategy[cv as usize].expect("strategy at winning choice vertex");
            let id = *ids.entry(next).or_insert_with(|| {
                order.push(next);
                order.len() - 1
            });
            children.push(id);
        }
        nodes.push(WitnessNode {
            state: sk.states[*state as usize].clone(),
            letter: mv.letter.clone(),
            children,
        });
        i += 1;
    }
    (Some(RegularTreeWitness { nodes }), stats)
}

/// Decides emptiness of `a` and produces a regular witness if it is nonempty.
pub fn emptiness<A: TreeAutomaton>(
    a: &A,
    limit: usize,
) -> Result<EmptinessResult<A::State, A::Letter>, AutomataError> {
    let sk = explore(a, limit)?;
    let (witness, stats) = solve_skeleton(&sk);
    Ok(EmptinessResult { witness, stats })
}

/// A labeled regular tree: node 0 is the root, every node has `degree` children.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledRegularTree<L> {
    pub labels: Vec<L>,
    pub children: Vec<Vec<usize>>,
}

impl<S, L: Clone> RegularTreeWitness<S, L> {
    pub fn tree(&self) -> LabeledRegularTree<L> {
        LabeledRegularTree {
            labels: self.nodes.iter().map(|n| n.letter.clone()).collect(),
            children: self.nodes.iter().map(|n| n.children.clone()).collect(),
        }
    }
}

struct Membership<'a, A: TreeAutomaton> {
    a: &'a A,
    tree: &'a LabeledRegularTree<A::Letter>,
}

impl<A: TreeAutomaton> TreeAutomaton for Membership<'_, A> {
    type State = (usize, A::State);
    type Letter = ();

    fn degree(&self) -> usize {
        self.a.degree()
    }
    fn initial(&self) -> Self::State {
        (0, self.a.initial())
    }
    fn shape(&self) -> Shape {
        self.a.shape()
    }
    fn marks(&self, q: &Self::State) -> StateMarks {
        self.a.marks(&q.1)
    }
    fn moves(&self, q: &Self::State) -> Vec<Move<(), Self::State>> {
        let kids = &self.tree.children[q.0];
        self.a
            .moves_on(&q.1, &self.tree.labels[q.0])
            .into_iter()
            .map(|cs| Move {
                letter: (),
                children: cs
                    .into_iter()
                    .zip(kids)
                    .map(|(set, &k)| set.into_iter().map(|s| (k, s)).collect())
                    .collect(),
            })
            .collect()
    }
}

/// Whether `a` accepts the regular tree (solves the finite membership game).
pub fn accepts_regular_tree<A: TreeAutomaton>(
    a: &A,
    tree: &LabeledRegularTree<A::Letter>,
    limit: usize,
) -> Result<bool, AutomataError> {
    let m = Membership { a, tree };
    Ok(!emptiness(&m, limit)?.is_empty())
}

struct FixedRun<'a, A: TreeAutomaton> {
    a: &'a A,
    w: &'a RegularTreeWitness<A::State, A::Letter>,
}

impl<A: TreeAutomaton> TreeAutomaton for FixedRun<'_, A> {
    type State = usize;
    type Letter = ();

    fn degree(&self) -> usize {
        self.a.degree()
    }
    fn initial(&self) -> usize {
        0
    }
    fn shape(&self) -> Shape {
        self.a.shape()
    }
    fn marks(&self, q: &usize) -> StateMarks {
        self.a.marks(&self.w.nodes[*q].state)
    }
    fn moves(&self, q: &usize) -> Vec<Move<(), usize>> {
        vec![Move {
            letter: (),
            children: self.w.nodes[*q].children.iter().map(|&c| vec![c]).collect(),
        }]
    }
}

/// Checks that the annotation of `w` is an accepting run of `a`: local
/// transitions via [`TreeAutomaton::accepts_step`] and acceptance on every path.
pub fn verify_witness<A: TreeAutomaton>(
    a: &A,
    w: &RegularTreeWitness<A::State, A::Letter>,
) -> Result<(), String> {
    if w.nodes.is_empty() {
        return Err("empty witness".into());
    }
    if w.nodes[0].state != a.initial() {
        return Err("root is not annotated with the initial state".into());
    }
    for (i, n) in w.nodes.iter().enumerate() {
        if n.children.len() != a.degree() {
            return Err(format!(
                "node {i} has {} children, expected {}",
                n.children.len(),
                a.degree()
            ));
        }
        let kids: Vec<A::State> = n
            .children
            .iter()
            .map(|&c| w.nodes[c].state.clone())
            .collect();
        if !a.accepts_step(&n.state, &n.letter, &kids) {
            return Err(format!("node {i} is not a valid transition"));
        }
    }
    let run = FixedRun { a, w };
    match emptiness(&run, usize::MAX) {
        Ok(r) if !r.is_empty() => Ok(()),
        Ok(_) => Err("some path of the run is rejecting".into()),
        Err(e) => Err(e.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::ExplicitTreeAutomaton;
    use std::collections::BTreeSet;

    fn set(v: &[usize]) -> BTreeSet<usize> {
        v.iter().copied().collect()
    }

    #[test]
    fn empty_without_accepting_loop() {
        // only transition loops in state 0 which is in L of the only pair
        let a = ExplicitTreeAutomaton {
            degree: 2,
            num_states: 1,
            initial: 0,
            transitions: vec![(0, 'a', vec![0, 0])],
            pairs: vec![(set(&[0]), set(&[0]))],
        };
        assert!(emptiness(&a, 100).unwrap().is_empty());
    }

    #[test]
    fn nonempty_with_witness() {
        let a = ExplicitTreeAutomaton {
            degree: 2,
            num_states: 2,
            initial: 0,
            transitions: vec![
                (0, 'a', vec![1, 0]),
                (0, 'b', vec![1, 1]),
                (1, 'c', vec![1, 1]),
            ],
            pairs: vec![(set(&[]), set(&[1]))],
        };
        let r = emptiness(&a, 100).unwrap();
        let w = r.witness.expect("nonempty");
        verify_witness(&a, &w).unwrap();
        assert!(accepts_regular_tree(&a, &w.tree(), 1000).unwrap());
    }

    #[test]
    fn witness_must_pick_escaping_move() {
        // 'a' keeps state 0 forever on the right path, which is rejecting
        let a = ExplicitTreeAutomaton {
            degree: 2,
            num_states: 2,
            initial: 0,
            transitions: vec![
                (0, 'a', vec![1, 0]),
                (0, 'b', vec![1, 1]),
                (1, 'c', vec![1, 1]),
            ],
            pairs: vec![(set(&[0]), set(&[1]))],
        };
        let w = emptiness(&a, 100).unwrap().witness.expect("nonempty");
        assert_eq!(w.nodes[0].letter, 'b');
        verify_witness(&a, &w).unwrap();
    }
}
