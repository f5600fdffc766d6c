//! Nondeterministic Büchi and deterministic parity word automata.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt::Debug;
use std::hash::Hash;

/// A nondeterministic Büchi automaton over an arbitrary (possibly implicit) alphabet.
pub trait OmegaWordAutomaton {
    type State: Clone + Eq + Hash + Ord + Debug;
    type Letter: Clone + Eq + Hash + Debug;

    fn initial_states(&self) -> Vec<Self::State>;
    fn successors(&self, q: &Self::State, a: &Self::Letter) -> Vec<Self::State>;
    fn is_accepting(&self, q: &Self::State) -> bool;
}

/// A deterministic parity word automaton. Priorities sit on states and follow
/// the min-even convention: a run is accepting iff the least priority seen
/// infinitely often is even.
pub trait DetParityWordAutomaton {
    type State: Clone + Eq + Hash + Ord + Debug;
    type Letter: Clone + Eq + Hash + Debug;

    fn initial(&self) -> Self::State;
    fn step(&self, q: &Self::State, a: &Self::Letter) -> Self::State;
    fn priority(&self, q: &Self::State) -> u32;
    /// Inclusive upper bound on every priority returned by [`Self::priority`].
    fn max_priority(&self) -> u32;
}

/// Ultimately periodic word `stem · cycle^ω`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lasso<L> {
    pub stem: Vec<L>,
    pub cycle: Vec<L>,
}

impl<L: Clone> Lasso<L> {
    pub fn new(stem: Vec<L>, cycle: Vec<L>) -> Self {
        assert!(!cycle.is_empty(), "lasso cycle must be nonempty");
        Lasso { stem, cycle }
    }

    /// Letter at position `i` of the infinite word.
    pub fn letter(&self, i: usize) -> &L {
        if i < self.stem.len() {
            &self.stem[i]
        } else {
            &self.cycle[(i - self.stem.len()) % self.cycle.len()]
        }
    }

    fn positions(&self) -> usize {
        self.stem.len() + self.cycle.len()
    }

    fn next_position(&self, i: usize) -> usize {
        if i + 1 < self.positions() {
            i + 1
        } else {
            self.stem.len()
        }
    }
}

/// Explicit NBW with dense states `0..n` and explicit letters.
#[derive(Clone, Debug)]
pub struct ExplicitNbw<L> {
    pub num_states: usize,
    pub initial: Vec<usize>,
    pub accepting: Vec<bool>,
    pub transitions: Vec<HashMap<L, Vec<usize>>>,
}

impl<L: Clone + Eq + Hash + Debug> ExplicitNbw<L> {
    pub fn new(num_states: usize) -> Self {
        ExplicitNbw {
            num_states,
            initial: Vec::new(),
            accepting: vec![false; num_states],
            transitions: vec![HashMap::new(); num_states],
        }
    }

    pub fn add_transition(&mut self, from: usize, a: L, to: usize) {
        let succ = self.transitions[from].entry(a).or_default();
        if !succ.contains(&to) {
            succ.push(to);
            succ.sort_unstable();
        }
    }
}

impl<L: Clone + Eq + Hash + Debug> OmegaWordAutomaton for ExplicitNbw<L> {
    type State = usize;
    type Letter = L;

    fn initial_states(&self) -> Vec<usize> {
        let mut v = self.initial.clone();
        v.sort_unstable();
        v.dedup();
        v
    }

    fn successors(&self, q: &usize, a: &L) -> Vec<usize> {
        self.transitions[*q].get(a).cloned().unwrap_or_default()
    }

    fn is_accepting(&self, q: &usize) -> bool {
        self.accepting[*q]
    }
}

/// Decides whether a Büchi automaton accepts `lasso` by searching the product of
/// the automaton with the lasso positions for a reachable accepting cycle.
pub fn nbw_accepts_lasso<A: OmegaWordAutomaton>(a: &A, lasso: &Lasso<A::Letter>) -> bool {
    let starts: Vec<(A::State, usize)> = a.initial_states().into_iter().map(|q| (q, 0)).collect();
    nbw_accepts_lasso_from(a, lasso, starts)
}

/// Like [`nbw_accepts_lasso`] but starting from arbitrary product nodes.
pub fn nbw_accepts_lasso_from<A: OmegaWordAutomaton>(
    a: &A,
    lasso: &Lasso<A::Letter>,
    starts: Vec<(A::State, usize)>,
) -> bool {
    // explore product graph
    let mut index: HashMap<(A::State, usize), usize> = HashMap::new();
    let mut nodes: Vec<(A::State, usize)> = Vec::new();
    let mut succ: Vec<Vec<usize>> = Vec::new();
    let mut queue = VecDeque::new();
    for s in starts {
        if !index.contains_key(&s) {
            index.insert(s.clone(), nodes.len());
            nodes.push(s);
            succ.push(Vec::new());
            queue.push_back(nodes.len() - 1);
        }
    }
    while let Some(i) = queue.pop_front() {
        let (q, pos) = nodes[i].clone();
        let next = lasso.next_position(pos);
        for q2 in a.successors(&q, lasso.letter(pos)) {
            let key = (q2, next);
            let j = match index.get(&key) {
                Some(&j) => j,
                None => {
                    let j = nodes.len();
                    index.insert(key.clone(), j);
                    nodes.push(key);
                    succ.push(Vec::new());
                    queue.push_back(j);
                    j
                }
            };
            succ[i].push(j);
        }
    }
    let stem_len = lasso.stem.len();
    // nodes in the cycle part that are accepting and lie on a cycle
    let sccs = tarjan_scc(&succ);
    let mut comp = vec![0usize; nodes.len()];
    for (ci, c) in sccs.iter().enumerate() {
        for &v in c {
            comp[v] = ci;
        }
    }
    for (ci, c) in sccs.iter().enumerate() {
        let nontrivial = c.len() > 1 || succ[c[0]].contains(&c[0]);
        if !nontrivial {
            continue;
        }
        if c.iter()
            .any(|&v| nodes[v].1 >= stem_len && a.is_accepting(&nodes[v].0) && comp[v] == ci)
        {
            return true;
        }
    }
    false
}

/// Runs a deterministic parity automaton on a lasso and reports acceptance.
pub fn dpw_accepts_lasso<D: DetParityWordAutomaton>(d: &D, lasso: &Lasso<D::Letter>) -> bool {
    let mut q = d.initial();
    for a in &lasso.stem {
        q = d.step(&q, a);
    }
    // iterate the cycle until the state at its start repeats
    let mut seen: HashMap<D::State, usize> = HashMap::new();
    let mut mins: Vec<u32> = Vec::new();
    loop {
        if let Some(&k) = seen.get(&q) {
            let m = mins[k..].iter().copied().min().expect("nonempty loop");
            return m % 2 == 0;
        }
        seen.insert(q.clone(), mins.len());
        let mut m = u32::MAX;
        for a in &lasso.cycle {
            q = d.step(&q, a);
            m = m.min(d.priority(&q));
        }
        mins.push(m);
    }
}

/// Complement of a deterministic parity automaton by shifting every priority by one.
#[derive(Clone, Debug)]
pub struct DualDpw<D>(pub D);

impl<D: DetParityWordAutomaton> DetParityWordAutomaton for DualDpw<D> {
    type State = D::State;
    type Letter = D::Letter;

    fn initial(&self) -> D::State {
        self.0.initial()
    }
    fn step(&self, q: &D::State, a: &D::Letter) -> D::State {
        self.0.step(q, a)
    }
    fn priority(&self, q: &D::State) -> u32 {
        self.0.priority(q) + 1
    }
    fn max_priority(&self) -> u32 {
        self.0.max_priority() + 1
    }
}

/// Strongly connected components (iterative Tarjan). Components come out in
/// reverse topological order.
pub fn tarjan_scc(succ: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = succ.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut out = Vec::new();
    let mut counter = 0usize;
    let mut call: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        call.push((root, 0));
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut k)) = call.last_mut() {
            if *k < succ[v].len() {
                let w = succ[v][*k];
                *k += 1;
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(p, _)) = call.last() {
                    low[p] = low[p].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut c = Vec::new();
                    loop {
                        let w = stack.pop().expect("stack");
                        on_stack[w] = false;
                        c.push(w);
                        if w == v {
                            break;
                        }
                    }
                    out.push(c);
                }
            }
        }
    }
    out
}

/// All lassos over `alphabet` with `|stem| <= max_stem` and `1 <= |cycle| <= max_cycle`.
pub fn all_lassos<L: Clone>(alphabet: &[L], max_stem: usize, max_cycle: usize) -> Vec<Lasso<L>> {
    let stems = all_words(alphabet, 0, max_stem);
    let cycles = all_words(alphabet, 1, max_cycle);
    let mut out = Vec::with_capacity(stems.len() * cycles.len());
    for s in &stems {
        for c in &cycles {
            out.push(Lasso::new(s.clone(), c.clone()));
        }
    }
    out
}

/// All words with length in `min..=max`.
pub fn all_words<L: Clone>(alphabet: &[L], min: usize, max: usize) -> Vec<Vec<L>> {
    let mut out = Vec::new();
    let mut layer: Vec<Vec<L>> = vec![Vec::new()];
    for len in 0..=max {
        if len >= min {
            out.extend(layer.iter().cloned());
        }
        if len == max {
            break;
        }
        let mut next = Vec::with_capacity(layer.len() * alphabet.len());
        for w in &layer {
            for a in alphabet {
                let mut w2 = w.clone();
                w2.push(a.clone());
                next.push(w2);
            }
        }
        layer = next;
    }
    out
}

/// States of `a` reachable from its initial states (explicit exploration over a
/// finite alphabet).
pub fn reachable_states<A: OmegaWordAutomaton>(
    a: &A,
    alphabet: &[A::Letter],
) -> BTreeSet<A::State> {
    let mut seen: HashSet<A::State> = HashSet::new();
    let mut queue: VecDeque<A::State> = VecDeque::new();
    for q in a.initial_states() {
        if seen.insert(q.clone()) {
            queue.push_back(q);
        }
    }
    while let Some(q) = queue.pop_front() {
        for x in alphabet {
            for q2 in a.successors(&q, x) {
                if seen.insert(q2.clone()) {
                    queue.push_back(q2);
                }
            }
        }
    }
    seen.into_iter().collect()
}

/// Acceptance of every lasso in `all_lassos(alphabet, max_stem, max_cycle)` (same
/// order). Successors are memoized and work is shared between lassos with a
/// common stem or cycle.
pub fn nbw_lasso_table<A: OmegaWordAutomaton>(
    a: &A,
    alphabet: &[A::Letter],
    max_stem: usize,
    max_cycle: usize,
) -> Vec<bool> {
    let mut ids: HashMap<A::State, u32> = HashMap::new();
    let mut states: Vec<A::State> = Vec::new();
    let mut cache: HashMap<(u32, usize), Vec<u32>> = HashMap::new();
    let intern =
        |q: A::State, ids: &mut HashMap<A::State, u32>, states: &mut Vec<A::State>| -> u32 {
            *ids.entry(q.clone()).or_insert_with(|| {
                states.push(q);
                (states.len() - 1) as u32
            })
        };
    let letters: Vec<usize> = (0..alphabet.len()).collect();
    let mut init: Vec<u32> = Vec::new();
    for q in a.initial_states() {
        init.push(intern(q, &mut ids, &mut states));
    }
    init.sort_unstable();
    init.dedup();
    let mut succ = |s: u32,
                    x: usize,
                    ids: &mut HashMap<A::State, u32>,
                    states: &mut Vec<A::State>|
     -> Vec<u32> {
        if let Some(v) = cache.get(&(s, x)) {
            return v.clone();
        }
        let q = states[s as usize].clone();
        let mut out: Vec<u32> = a
            .successors(&q, &alphabet[x])
            .into_iter()
            .map(|q2| intern(q2, ids, states))
            .collect();
        out.sort_unstable();
        out.dedup();
        cache.insert((s, x), out.clone());
        out
    };
    // stems
    let stems = all_words(&letters, 0, max_stem);
    let mut reach: HashMap<Vec<usize>, Vec<u32>> = HashMap::new();
    reach.insert(Vec::new(), init.clone());
    for w in &stems {
        if w.is_empty() {
            continue;
        }
        let prev = reach[&w[..w.len() - 1]].clone();
        let mut cur: Vec<u32> = Vec::new();
        for s in prev {
            cur.extend(succ(s, w[w.len() - 1], &mut ids, &mut states));
        }
        cur.sort_unstable();
        cur.dedup();
        reach.insert(w.clone(), cur);
    }
    let mut starts: Vec<u32> = reach.values().flatten().copied().collect();
    starts.sort_unstable();
    starts.dedup();
    // cycles
    let cycles = all_words(&letters, 1, max_cycle);
    let mut good_sets: Vec<HashSet<u32>> = Vec::with_capacity(cycles.len());
    for v in &cycles {
        let k = v.len();
        let mut index: HashMap<(u32, usize), usize> = HashMap::new();
        let mut nodes: Vec<(u32, usize)> = Vec::new();
        let mut edges: Vec<Vec<usize>> = Vec::new();
        for &s in &starts {
            index.insert((s, 0), nodes.len());
            nodes.push((s, 0));
            edges.push(Vec::new());
        }
        let mut i = 0;
        while i < nodes.len() {
            let (s, pos) = nodes[i];
            let np = (pos + 1) % k;
            for s2 in succ(s, v[pos], &mut ids, &mut states) {
                let j = *index.entry((s2, np)).or_insert_with(|| {
                    nodes.push((s2, np));
                    edges.push(Vec::new());
                    nodes.len() - 1
                });
                edges[i].push(j);
            }
            i += 1;
        }
        let sccs = tarjan_scc(&edges);
        let mut good = vec![false; nodes.len()];
        // reverse topological order: successors' components come first
        for c in &sccs {
            let nontrivial = c.len() > 1 || edges[c[0]].contains(&c[0]);
            let acc = nontrivial
                && c.iter()
                    .any(|&x| a.is_accepting(&states[nodes[x].0 as usize]));
            let reaches = acc || c.iter().any(|&x| edges[x].iter().any(|&y| good[y]));
            if reaches {
                for &x in c {
                    good[x] = true;
                }
            }
        }
        good_sets.push(
            nodes
                .iter()
                .enumerate()
                .filter(|(x, n)| n.1 == 0 && good[*x])
                .map(|(_, n)| n.0)
                .collect(),
        );
    }
    let mut out = Vec::with_capacity(stems.len() * cycles.len());
    for u in &stems {
        let r = &reach[u];
        for g in &good_sets {
            out.push(r.iter().any(|s| g.contains(s)));
        }
    }
    out
}

/// Acceptance of every lasso in `all_lassos(alphabet, max_stem, max_cycle)` by a
/// deterministic parity automaton, with memoized transitions.
pub fn dpw_lasso_table<D: DetParityWordAutomaton>(
    d: &D,
    alphabet: &[D::Letter],
    max_stem: usize,
    max_cycle: usize,
) -> Vec<bool> {
    let mut ids: HashMap<D::State, u32> = HashMap::new();
    let mut states: Vec<D::State> = Vec::new();
    let mut trans: HashMap<(u32, usize), u32> = HashMap::new();
    let mut step =
        |s: u32, x: usize, ids: &mut HashMap<D::State, u32>, states: &mut Vec<D::State>| -> u32 {
            if let Some(&t) = trans.get(&(s, x)) {
                return t;
            }
            let q2 = d.step(&states[s as usize], &alphabet[x]);
            let t = *ids.entry(q2.clone()).or_insert_with(|| {
                states.push(q2);
                (states.len() - 1) as u32
            });
            trans.insert((s, x), t);
            t
        };
    let q0 = d.initial();
    ids.insert(q0.clone(), 0);
    states.push(q0);
    let letters: Vec<usize> = (0..alphabet.len()).collect();
    let stems = all_words(&letters, 0, max_stem);
    let cycles = all_words(&letters, 1, max_cycle);
    let mut after: HashMap<Vec<usize>, u32> = HashMap::new();
    after.insert(Vec::new(), 0);
    for w in &stems {
        if !w.is_empty() {
            let p = after[&w[..w.len() - 1]];
            let t = step(p, w[w.len() - 1], &mut ids, &mut states);
            after.insert(w.clone(), t);
        }
    }
    let mut memo: HashMap<(u32, usize), bool> = HashMap::new();
    let mut out = Vec::with_capacity(stems.len() * cycles.len());
    for u in &stems {
        let s0 = after[u];
        for (ci, v) in cycles.iter().enumerate() {
            if let Some(&b) = memo.get(&(s0, ci)) {
                out.push(b);
                continue;
            }
            let mut seen: HashMap<u32, usize> = HashMap::new();
            let mut mins: Vec<u32> = Vec::new();
            let mut q = s0;
            let b = loop {
                if let Some(&k) = seen.get(&q) {
                    break mins[k..].iter().copied().min().expect("nonempty") % 2 == 0;
                }
                seen.insert(q, mins.len());
                let mut m = u32::MAX;
                for &x in v {
                    q = step(q, x, &mut ids, &mut states);
                    m = m.min(d.priority(&states[q as usize]));
                }
                mins.push(m);
            };
            memo.insert((s0, ci), b);
            out.push(b);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inf_a() -> ExplicitNbw<char> {
        // accepts words with infinitely many 'a'
        let mut n = ExplicitNbw::new(2);
        n.initial.push(0);
        n.accepting[1] = true;
        for q in 0..2 {
            n.add_transition(q, 'a', 1);
            n.add_transition(q, 'b', 0);
        }
        n
    }

    #[test]
    fn lasso_acceptance_inf_a() {
        let n = inf_a();
        assert!(nbw_accepts_lasso(
            &n,
            &Lasso::new(vec!['b'], vec!['a', 'b'])
        ));
        assert!(!nbw_accepts_lasso(
            &n,
            &Lasso::new(vec!['a', 'a'], vec!['b'])
        ));
    }

    #[test]
    fn scc_simple() {
        let succ = vec![vec![1], vec![0, 2], vec![]];
        let s = tarjan_scc(&succ);
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn lasso_table_matches_direct() {
        let n = inf_a();
        let table = nbw_lasso_table(&n, &['a', 'b'], 3, 3);
        let lassos = all_lassos(&['a', 'b'], 3, 3);
        for (l, t) in lassos.iter().zip(table) {
            assert_eq!(nbw_accepts_lasso(&n, l), t);
        }
    }

    #[test]
    fn lasso_counts() {
        let l = all_lassos(&[0u8, 1], 2, 2);
        assert_eq!(l.len(), 7 * 6);
    }
}
