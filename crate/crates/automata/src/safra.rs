//! Determinization of Büchi automata into parity automata with compact Safra
//! trees whose nodes carry dynamic names.

use std::collections::BTreeSet;

use crate::word::{DetParityWordAutomaton, OmegaWordAutomaton};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SafraNode<S> {
    pub name: u32,
    /// Name of the parent; `None` for the root.
    pub parent: Option<u32>,
    /// Sorted, nonempty.
    pub label: Vec<S>,
}

/// A compact Safra tree. Nodes are kept sorted by name and names are `1..=k`.
/// Older siblings carry smaller names. The priority of the step that produced
/// the tree is stored alongside.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SafraState<S> {
    pub nodes: Vec<SafraNode<S>>,
    pub priority: u32,
}

impl<S> SafraState<S> {
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Lazily determinized NBW. `state_bound` must bound the number of NBW states
/// that can co-occur in a single tree label; it fixes the priority range.
#[derive(Clone, Debug)]
pub struct SafraDpw<A> {
    pub nbw: A,
    pub state_bound: u32,
}

impl<A: OmegaWordAutomaton> SafraDpw<A> {
    pub fn new(nbw: A, state_bound: usize) -> Self {
        SafraDpw {
            nbw,
            state_bound: state_bound.max(1) as u32,
        }
    }

    fn neutral(&self) -> u32 {
        2 * self.state_bound + 1
    }

    fn post(&self, label: &[A::State], a: &A::Letter) -> Vec<A::State> {
        let mut out: BTreeSet<A::State> = BTreeSet::new();
        for q in label {
            out.extend(self.nbw.successors(q, a));
        }
        out.into_iter().collect()
    }
}

struct Work<S> {
    name: u32,
    parent: Option<usize>,
    label: Vec<S>,
    fresh: bool,
    alive: bool,
}

impl<A: OmegaWordAutomaton> DetParityWordAutomaton for SafraDpw<A> {
    type State = SafraState<A::State>;
    type Letter = A::Letter;

    fn initial(&self) -> Self::State {
        let mut init = self.nbw.initial_states();
        init.sort();
        init.dedup();
        let nodes = if init.is_empty() {
            Vec::new()
        } else {
            vec![SafraNode {
                name: 1,
                parent: None,
                label: init,
            }]
        };
        SafraState {
            nodes,
            priority: self.neutral(),
        }
    }

    fn step(&self, q: &Self::State, a: &A::Letter) -> Self::State {
        if q.nodes.is_empty() {
            return SafraState {
                nodes: Vec::new(),
                priority: self.neutral(),
            };
        }
        // index by position; nodes are sorted by name so parents precede children
        let mut work: Vec<Work<A::State>> = Vec::with_capacity(q.nodes.len() * 2);
        for n in &q.nodes {
            let parent = n.parent.map(|p| {
                q.nodes
                    .iter()
                    .position(|m| m.name == p)
                    .expect("parent exists")
            });
            work.push(Work {
                name: n.name,
                parent,
                label: n.label.clone(),
                fresh: false,
                alive: true,
            });
        }
        // 1. spawn children holding accepting states
        let mut next_name = q.nodes.iter().map(|n| n.name).max().unwrap_or(0) + 1;
        let old = work.len();
        for i in 0..old {
            let acc: Vec<A::State> = work[i]
                .label
                .iter()
                .filter(|s| self.nbw.is_accepting(s))
                .cloned()
                .collect();
            if !acc.is_empty() {
                work.push(Work {
                    name: next_name,
                    parent: Some(i),
                    label: acc,
                    fresh: true,
                    alive: true,
                });
                next_name += 1;
            }
        }
        // 2. subset step
        for w in work.iter_mut() {
            w.label = self.post(&w.label, a);
        }
        // children lists ordered by name (work is sorted by name)
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); work.len()];
        for (i, w) in work.iter().enumerate() {
            if let Some(p) = w.parent {
                children[p].push(i);
            }
        }
        // 3. horizontal merge
        fn merge<S: Ord + Clone>(
            v: usize,
            forbidden: &BTreeSet<S>,
            work: &mut [Work<S>],
            children: &[Vec<usize>],
        ) {
            work[v].label.retain(|s| !forbidden.contains(s));
            let mut f = forbidden.clone();
            for &c in &children[v] {
                merge(c, &f, work, children);
                f.extend(work[c].label.iter().cloned());
            }
        }
        merge(0, &BTreeSet::new(), &mut work, &children);
        // 4. remove empty nodes, 5. vertical merge (top-down)
        let mut red: Option<u32> = None;
        let mut green: Option<u32> = None;
        let note_removed = |w: &Work<A::State>, red: &mut Option<u32>| {
            if !w.fresh {
                *red = Some(red.map_or(w.name, |r| r.min(w.name)));
            }
        };
        for i in 0..work.len() {
            // parents precede children in `work`
            let parent_dead = work[i].parent.is_some_and(|p| !work[p].alive);
            if parent_dead || work[i].label.is_empty() {
                if work[i].alive {
                    work[i].alive = false;
                    note_removed(&work[i], &mut red);
                }
            }
        }
        for i in 0..work.len() {
            if !work[i].alive {
                continue;
            }
            let mut union: BTreeSet<&A::State> = BTreeSet::new();
            let mut any_child = false;
            for &c in &children[i] {
                if work[c].alive {
                    any_child = true;
                    union.extend(work[c].label.iter());
                }
            }
            if any_child && union.len() == work[i].label.len() {
                green = Some(green.map_or(work[i].name, |g| g.min(work[i].name)));
                let mut stack: Vec<usize> = children[i].clone();
                while let Some(c) = stack.pop() {
                    if work[c].alive {
                        work[c].alive = false;
                        note_removed(&work[c], &mut red);
                    }
                    stack.extend(children[c].iter().copied());
                }
            }
        }
        let mut priority = self.neutral();
        if let Some(r) = red {
            priority = priority.min(2 * r - 1);
        }
        if let Some(g) = green {
            priority = priority.min(2 * g);
        }
        // 6. compact names
        let mut rename = vec![0u32; work.len()];
        let mut k = 0u32;
        for (i, w) in work.iter().enumerate() {
            if w.alive {
                k += 1;
                rename[i] = k;
            }
        }
        let nodes = work
            .iter()
            .enumerate()
            .filter(|(_, w)| w.alive)
            .map(|(i, w)| SafraNode {
                name: rename[i],
                parent: w.parent.map(|p| rename[p]),
                label: w.label.clone(),
            })
            .collect();
        SafraState { nodes, priority }
    }

    fn priority(&self, q: &Self::State) -> u32 {
        q.priority
    }

    fn max_priority(&self) -> u32 {
        self.neutral()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::{dpw_accepts_lasso, nbw_accepts_lasso, ExplicitNbw, Lasso};

    #[test]
    fn eventually_always_a() {
        // classic NBW without a deterministic Büchi equivalent: (a+b)* a^ω
        let mut n = ExplicitNbw::new(2);
        n.initial.push(0);
        n.accepting[1] = true;
        n.add_transition(0, 'a', 0);
        n.add_transition(0, 'b', 0);
        n.add_transition(0, 'a', 1);
        n.add_transition(1, 'a', 1);
        let d = SafraDpw::new(n.clone(), 2);
        for l in [
            Lasso::new(vec!['b'], vec!['a']),
            Lasso::new(vec![], vec!['a', 'b']),
            Lasso::new(vec!['a', 'b', 'b'], vec!['a', 'a', 'b']),
            Lasso::new(vec!['b', 'b'], vec!['a', 'a']),
        ] {
            assert_eq!(
                dpw_accepts_lasso(&d, &l),
                nbw_accepts_lasso(&n, &l),
                "{l:?}"
            );
        }
    }

    #[test]
    fn empty_tree_is_rejecting_sink() {
        let n: ExplicitNbw<char> = ExplicitNbw::new(1);
        let d = SafraDpw::new(n, 1);
        let q = d.initial();
        assert!(q.is_empty());
        let q2 = d.step(&q, &'a');
        assert!(q2.is_empty());
        assert_eq!(d.priority(&q2) % 2, 1);
    }
}
