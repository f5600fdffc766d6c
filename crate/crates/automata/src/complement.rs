//! Rank-based complementation of Büchi automata with tight level rankings.
//!
//! States are either a plain subset (before the ranking is guessed) or a tuple
//! `(S, O, f, i)` where `f` is a tight level ranking on `S`, `i` is the even rank
//! currently being tracked and `O` the states of rank `i` still owing a visit to
//! an odd rank. A run accepts when `O` empties infinitely often.

use std::collections::BTreeSet;

use crate::word::OmegaWordAutomaton;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RankState<S> {
    Subset(Vec<S>),
    Ranked {
        /// Sorted by state.
        ranking: Vec<(S, u32)>,
        owing: Vec<S>,
        tracked: u32,
    },
    /// All runs have died.
    Sink,
}

/// Complement of `nbw`. `state_bound` bounds the number of NBW states that may
/// occur in one level; ranks range over `0..2*state_bound`.
#[derive(Clone, Debug)]
pub struct RankComplement<A> {
    pub nbw: A,
    pub max_rank: u32,
}

impl<A: OmegaWordAutomaton> RankComplement<A> {
    pub fn new(nbw: A, state_bound: usize) -> Self {
        RankComplement {
            nbw,
            max_rank: (2 * state_bound.max(1) - 1) as u32,
        }
    }

    fn post(&self, set: &[A::State], a: &A::Letter) -> Vec<A::State> {
        let mut out = BTreeSet::new();
        for q in set {
            out.extend(self.nbw.successors(q, a));
        }
        out.into_iter().collect()
    }

    /// All tight rankings `f'` on `targets` with `f'(q) <= bounds[q]`, even ranks on
    /// accepting states and maximal odd rank exactly `rank` (or any rank when `None`).
    fn tight_rankings(
        &self,
        targets: &[A::State],
        bounds: &[u32],
        rank: Option<u32>,
    ) -> Vec<Vec<(A::State, u32)>> {
        let mut out = Vec::new();
        let mut current: Vec<u32> = Vec::with_capacity(targets.len());
        self.rank_rec(targets, bounds, rank, &mut current, &mut out);
        out
    }

    fn rank_rec(
        &self,
        targets: &[A::State],
        bounds: &[u32],
        rank: Option<u32>,
        current: &mut Vec<u32>,
        out: &mut Vec<Vec<(A::State, u32)>>,
    ) {
        let i = current.len();
        if i == targets.len() {
            let max = current.iter().copied().max().unwrap_or(0);
            let r = match rank {
                Some(r) => r,
                None => {
                    if max % 2 == 0 {
                        return;
                    }
                    max
                }
            };
            if max != r || r % 2 == 0 {
                return;
            }
            let used: BTreeSet<u32> = current.iter().copied().collect();
            if (1..=r).step_by(2).all(|o| used.contains(&o)) {
                out.push(
                    targets
                        .iter()
                        .cloned()
                        .zip(current.iter().copied())
                        .collect(),
                );
            }
            return;
        }
        let cap = match rank {
            Some(r) => bounds[i].min(r),
            None => bounds[i],
        };
        let acc = self.nbw.is_accepting(&targets[i]);
        // remaining positions must be able to cover the missing odd ranks
        for v in 0..=cap {
            if acc && v % 2 == 1 {
                continue;
            }
            current.push(v);
            if self.feasible(targets.len() - i - 1, current, rank) {
                self.rank_rec(targets, bounds, rank, current, out);
            }
            current.pop();
        }
    }

    fn feasible(&self, remaining: usize, current: &[u32], rank: Option<u32>) -> bool {
        let Some(r) = rank else { return true };
        let used: BTreeSet<u32> = current.iter().copied().collect();
        let missing = (1..=r).step_by(2).filter(|o| !used.contains(o)).count();
        missing <= remaining
    }
}

impl<A: OmegaWordAutomaton> OmegaWordAutomaton for RankComplement<A> {
    type State = RankState<A::State>;
    type Letter = A::Letter;

    fn initial_states(&self) -> Vec<Self::State> {
        let mut init = self.nbw.initial_states();
        init.sort();
        init.dedup();
        if init.is_empty() {
            vec![RankState::Sink]
        } else {
            vec![RankState::Subset(init)]
        }
    }

    fn successors(&self, q: &Self::State, a: &A::Letter) -> Vec<Self::State> {
        match q {
            RankState::Sink => vec![RankState::Sink],
            RankState::Subset(s) => {
                let s2 = self.post(s, a);
                if s2.is_empty() {
                    return vec![RankState::Sink];
                }
                let mut out = vec![RankState::Subset(s2.clone())];
                let bounds = vec![self.max_rank; s2.len()];
                for f in self.tight_rankings(&s2, &bounds, None) {
                    out.push(RankState::Ranked {
                        ranking: f,
                        owing: Vec::new(),
                        tracked: 0,
                    });
                }
                out
            }
            RankState::Ranked {
                ranking,
                owing,
                tracked,
            } => {
                let dom: Vec<A::State> = ranking.iter().map(|(s, _)| s.clone()).collect();
                let s2 = self.post(&dom, a);
                if s2.is_empty() {
                    return vec![RankState::Sink];
                }
                let rank = ranking.iter().map(|&(_, r)| r).max().unwrap_or(0);
                let mut bounds = vec![u32::MAX; s2.len()];
                for (p, r) in ranking {
                    for p2 in self.nbw.successors(p, a) {
                        let j = s2.binary_search(&p2).expect("successor in post");
                        bounds[j] = bounds[j].min(*r);
                    }
                }
                let mut out = Vec::new();
                let owing_post = if owing.is_empty() {
                    Vec::new()
                } else {
                    self.post(owing, a)
                };
                for f in self.tight_rankings(&s2, &bounds, Some(rank)) {
                    let (i2, o2): (u32, Vec<A::State>) = if owing.is_empty() {
                        let i2 = (tracked + 2) % (rank + 1);
                        let o2 = f
                            .iter()
                            .filter(|(_, r)| *r == i2)
                            .map(|(s, _)| s.clone())
                            .collect();
                        (i2, o2)
                    } else {
                        let o2 = owing_post
                            .iter()
                            .filter(|s| {
                                let j = f.binary_search_by(|(x, _)| x.cmp(s)).expect("in domain");
                                f[j].1 == *tracked
                            })
                            .cloned()
                            .collect();
                        (*tracked, o2)
                    };
                    out.push(RankState::Ranked {
                        ranking: f,
                        owing: o2,
                        tracked: i2,
                    });
                }
                out
            }
        }
    }

    fn is_accepting(&self, q: &Self::State) -> bool {
        match q {
            RankState::Sink => true,
            RankState::Subset(_) => false,
            RankState::Ranked { owing, .. } => owing.is_empty(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::{nbw_accepts_lasso, ExplicitNbw, Lasso};

    #[test]
    fn complement_of_inf_a() {
        let mut n = ExplicitNbw::new(2);
        n.initial.push(0);
        n.accepting[1] = true;
        for q in 0..2 {
            n.add_transition(q, 'a', 1);
            n.add_transition(q, 'b', 0);
        }
        let c = RankComplement::new(n.clone(), 2);
        for l in [
            Lasso::new(vec![], vec!['a']),
            Lasso::new(vec!['a'], vec!['b']),
            Lasso::new(vec!['b'], vec!['a', 'b', 'b']),
        ] {
            assert_ne!(
                nbw_accepts_lasso(&n, &l),
                nbw_accepts_lasso(&c, &l),
                "{l:?}"
            );
        }
    }
}
