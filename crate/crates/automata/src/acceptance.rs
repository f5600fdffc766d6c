//! Generalized Rabin acceptance on states and its conversion to min-even parity.
//!
//! A condition is a list of pairs `(L, U_1..U_k)`. An infinite sequence of states
//! satisfies pair `p` if it visits `L` finitely often and every `U_j` infinitely
//! often. The condition holds if some pair is satisfied.

/// Number of `U` sets in every pair.
pub type Shape = Vec<usize>;

/// Membership of one state in the sets of a generalized Rabin condition.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StateMarks {
    pub in_l: Vec<bool>,
    pub in_u: Vec<Vec<bool>>,
}

impl StateMarks {
    /// Marks for the single trivial pair `(∅, Q)`.
    pub fn trivial() -> Self {
        StateMarks {
            in_l: vec![false],
            in_u: vec![vec![true]],
        }
    }

    /// Marks induced by a min-even parity priority over pairs
    /// `(prio < e, prio = e)` for even `e <= max`.
    pub fn from_priority(priority: u32, max: u32) -> Self {
        let mut in_l = Vec::new();
        let mut in_u = Vec::new();
        for e in (0..=max).step_by(2) {
            in_l.push(priority < e);
            in_u.push(vec![priority == e]);
        }
        StateMarks { in_l, in_u }
    }

    /// Marks of the state pair in a product. Pair `(i, j)` uses `L_i ∪ L_j` and
    /// the concatenated `U` sets.
    pub fn product(&self, other: &StateMarks) -> StateMarks {
        let mut in_l = Vec::new();
        let mut in_u = Vec::new();
        for i in 0..self.in_l.len() {
            for j in 0..other.in_l.len() {
                in_l.push(self.in_l[i] || other.in_l[j]);
                let mut u = self.in_u[i].clone();
                u.extend(other.in_u[j].iter().copied());
                in_u.push(u);
            }
        }
        StateMarks { in_l, in_u }
    }
}

pub fn parity_shape(max: u32) -> Shape {
    vec![1; (max / 2 + 1) as usize]
}

pub fn product_shape(a: &Shape, b: &Shape) -> Shape {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x + y);
        }
    }
    out
}

/// Evaluates the condition on the set of states visited infinitely often.
pub fn satisfied_by_inf_set(marks: &[&StateMarks]) -> bool {
    let Some(first) = marks.first() else {
        return false;
    };
    (0..first.in_l.len()).any(|p| {
        marks.iter().all(|m| !m.in_l[p])
            && (0..first.in_u[p].len()).all(|j| marks.iter().any(|m| m.in_u[p][j]))
    })
}

/// A deterministic parity condition with memory obtained from a generalized
/// Rabin condition.
#[derive(Clone, Debug)]
pub enum ParityConverter {
    /// Every infinite sequence is accepting.
    AllAccepting,
    /// No infinite sequence is accepting.
    NoneAccepting,
    /// Pairs form a chain `L_0 ∪ U_0 ⊆ L_1`, `L_1 ∪ U_1 ⊆ L_2`, ... and need no memory.
    Chain { pairs: Vec<(usize, usize)> },
    /// Index appearance record over the kept pairs, with a round-robin counter
    /// per pair for its `U` sets.
    Iar { pairs: Vec<(usize, Vec<usize>)> },
}

/// Memory of the index appearance record: pair permutation and counters.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Memory {
    pub order: Vec<u16>,
    pub counters: Vec<u16>,
}

impl ParityConverter {
    /// Picks a conversion for a condition restricted to the given states. Pairs
    /// and `U` sets that are trivial over these states are dropped.
    pub fn for_states(shape: &Shape, marks: &[StateMarks]) -> ParityConverter {
        let mut kept: Vec<(usize, Vec<usize>)> = Vec::new();
        for (p, &k) in shape.iter().enumerate() {
            if marks.iter().all(|m| m.in_l[p]) {
                continue;
            }
            let mut us = Vec::new();
            let mut dead = false;
            for j in 0..k {
                let any = marks.iter().any(|m| m.in_u[p][j]);
                let all = marks.iter().all(|m| m.in_u[p][j]);
                if !any {
                    dead = true;
                    break;
                }
                if !all {
                    us.push(j);
                }
            }
            if dead {
                continue;
            }
            if us.is_empty() && marks.iter().all(|m| !m.in_l[p]) {
                return ParityConverter::AllAccepting;
            }
            kept.push((p, us));
        }
        if kept.is_empty() {
            return ParityConverter::NoneAccepting;
        }
        if kept.iter().all(|(_, us)| us.len() <= 1) {
            if let Some(chain) = chain_order(&kept, marks) {
                return ParityConverter::Chain { pairs: chain };
            }
        }
        ParityConverter::Iar { pairs: kept }
    }

    pub fn initial_memory(&self) -> Memory {
        match self {
            ParityConverter::Iar { pairs } => Memory {
                order: (0..pairs.len() as u16).collect(),
                counters: vec![0; pairs.len()],
            },
            _ => Memory::default(),
        }
    }

    /// Largest priority [`Self::visit`] may emit.
    pub fn max_priority(&self) -> u32 {
        match self {
            ParityConverter::AllAccepting => 0,
            ParityConverter::NoneAccepting => 1,
            ParityConverter::Chain { pairs } => 2 * pairs.len() as u32 + 1,
            ParityConverter::Iar { pairs } => 2 * pairs.len() as u32 + 2,
        }
    }

    /// Updates memory on visiting a state and returns the emitted priority.
    pub fn visit(&self, mem: &Memory, m: &StateMarks) -> (Memory, u32) {
        match self {
            ParityConverter::AllAccepting => (Memory::default(), 0),
            ParityConverter::NoneAccepting => (Memory::default(), 1),
            ParityConverter::Chain { pairs } => {
                for (i, &(p, u)) in pairs.iter().enumerate() {
                    if m.in_l[p] {
                        return (Memory::default(), 2 * i as u32 + 1);
                    }
                    if u == usize::MAX || m.in_u[p][u] {
                        return (Memory::default(), 2 * i as u32 + 2);
                    }
                }
                (Memory::default(), 2 * pairs.len() as u32 + 1)
            }
            ParityConverter::Iar { pairs } => {
                let n = pairs.len();
                let mut counters = mem.counters.clone();
                let mut good = vec![false; n];
                let mut bad = vec![false; n];
                for (k, (p, us)) in pairs.iter().enumerate() {
                    bad[k] = m.in_l[*p];
                    if us.is_empty() {
                        good[k] = true;
                        continue;
                    }
                    let mut c = counters[k] as usize;
                    while m.in_u[*p][us[c]] {
                        c += 1;
                        if c == us.len() {
                            c = 0;
                            good[k] = true;
                            break;
                        }
                    }
                    counters[k] = c as u16;
                }
                let mut p_bad: i64 = -1;
                let mut p_good: i64 = -1;
                for (pos, &k) in mem.order.iter().enumerate() {
                    let k = k as usize;
                    if bad[k] {
                        p_bad = pos as i64;
                    } else if good[k] {
                        p_good = pos as i64;
                    }
                }
                let max_parity = if p_good > p_bad {
                    2 * p_good as u32 + 2
                } else if p_bad >= 0 {
                    2 * p_bad as u32 + 3
                } else {
                    1
                };
                let mut order: Vec<u16> = mem
                    .order
                    .iter()
                    .copied()
                    .filter(|&k| bad[k as usize])
                    .collect();
                order.extend(mem.order.iter().copied().filter(|&k| !bad[k as usize]));
                let top = 2 * n as u32 + 2;
                (Memory { order, counters }, top - max_parity)
            }
        }
    }
}

/// Orders single-`U` pairs into a chain if possible. A pair without `U` (all states
/// count) is encoded with `usize::MAX`.
fn chain_order(kept: &[(usize, Vec<usize>)], marks: &[StateMarks]) -> Option<Vec<(usize, usize)>> {
    let set = |p: usize, u: Option<usize>, with_l: bool| -> Vec<bool> {
        marks
            .iter()
            .map(|m| {
                (with_l && m.in_l[p]) || u.is_some_and(|j| m.in_u[p][j]) || (u.is_none() && !with_l)
            })
            .collect()
    };
    let mut items: Vec<(usize, Option<usize>, Vec<bool>, Vec<bool>)> = kept
        .iter()
        .map(|(p, us)| {
            let u = us.first().copied();
            let l: Vec<bool> = marks.iter().map(|m| m.in_l[*p]).collect();
            let lu: Vec<bool> = l
                .iter()
                .zip(set(*p, u, false))
                .map(|(a, b)| *a || b)
                .collect();
            (*p, u, l, lu)
        })
        .collect();
    let count = |v: &Vec<bool>| v.iter().filter(|b| **b).count();
    items.sort_by_key(|(_, _, l, lu)| (count(l), count(lu)));
    for w in items.windows(2) {
        let (lu_prev, l_next) = (&w[0].3, &w[1].2);
        if lu_prev.iter().zip(l_next).any(|(a, b)| *a && !*b) {
            return None;
        }
    }
    Some(
        items
            .into_iter()
            .map(|(p, u, _, _)| (p, u.unwrap_or(usize::MAX)))
            .collect(),
    )
}
