//! Parity games (min-even convention) solved with Zielonka's recursive algorithm.

use log::debug;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Player {
    /// Wins plays whose least infinitely recurring priority is even.
    Even,
    Odd,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::Even => Player::Odd,
            Player::Odd => Player::Even,
        }
    }

    fn of_priority(p: u32) -> Player {
        if p % 2 == 0 {
            Player::Even
        } else {
            Player::Odd
        }
    }
}

/// A parity game. Every vertex must have at least one successor.
#[derive(Clone, Debug, Default)]
pub struct ParityGame {
    pub owner: Vec<Player>,
    pub priority: Vec<u32>,
    pub succ: Vec<Vec<u32>>,
}

/// Winning regions and positional strategies. `strategy[v]` is defined for vertices
/// owned by the player that wins `v`.
#[derive(Clone, Debug)]
pub struct Solution {
    pub winner: Vec<Player>,
    pub strategy: Vec<Option<u32>>,
}

#[derive(Clone)]
struct VSet {
    bits: Vec<u64>,
}

impl VSet {
    fn empty(n: usize) -> Self {
        VSet {
            bits: vec![0; n.div_ceil(64)],
        }
    }
    fn contains(&self, v: usize) -> bool {
        self.bits[v / 64] >> (v % 64) & 1 == 1
    }
    fn insert(&mut self, v: usize) {
        self.bits[v / 64] |= 1 << (v % 64);
    }
    fn remove(&mut self, v: usize) {
        self.bits[v / 64] &= !(1 << (v % 64));
    }
    fn is_empty(&self) -> bool {
        self.bits.iter().all(|w| *w == 0)
    }
    fn minus(&self, o: &VSet) -> VSet {
        VSet {
            bits: self.bits.iter().zip(&o.bits).map(|(a, b)| a & !b).collect(),
        }
    }
    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(i * 64 + t)
                }
            })
        })
    }
}

impl ParityGame {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, owner: Player, priority: u32) -> u32 {
        self.owner.push(owner);
        self.priority.push(priority);
        self.succ.push(Vec::new());
        (self.owner.len() - 1) as u32
    }

    pub fn add_edge(&mut self, from: u32, to: u32) {
        self.succ[from as usize].push(to);
    }

    pub fn len(&self) -> usize {
        self.owner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.owner.is_empty()
    }

    fn predecessors(&self) -> Vec<Vec<u32>> {
        let mut pred = vec![Vec::new(); self.len()];
        for (v, s) in self.succ.iter().enumerate() {
            for &w in s {
                pred[w as usize].push(v as u32);
            }
        }
        pred
    }

    /// Solves the game.
    pub fn solve(&self) -> Solution {
        let n = self.len();
        for (v, s) in self.succ.iter().enumerate() {
            assert!(!s.is_empty(), "vertex {v} has no successor");
        }
        let pred = self.predecessors();
        let mut all = VSet::empty(n);
        for v in 0..n {
            all.insert(v);
        }
        let mut strategy = vec![None; n];
        let mut winner = vec![Player::Even; n];
        let mut z = Zielonka {
            game: self,
            pred: &pred,
            strategy: &mut strategy,
        };
        let (w_even, _w_odd) = z.solve(all);
        for v in 0..n {
            winner[v] = if w_even.contains(v) {
                Player::Even
            } else {
                Player::Odd
            };
        }
        debug!("solved parity game with {n} vertices");
        Solution { winner, strategy }
    }
}

struct Zielonka<'a> {
    game: &'a ParityGame,
    pred: &'a [Vec<u32>],
    strategy: &'a mut Vec<Option<u32>>,
}

impl Zielonka<'_> {
    /// Attractor of `target` for `player` within `sub`; records attracting edges.
    fn attractor(&mut self, sub: &VSet, target: &VSet, player: Player) -> VSet {
        let n = self.game.len();
        let mut attr = target.clone();
        let mut count = vec![0u32; n];
        let mut queue: Vec<usize> = target.iter().collect();
        for v in sub.iter() {
            if !attr.contains(v) && self.game.owner[v] != player {
                count[v] = self.game.succ[v]
                    .iter()
                    .filter(|&&w| sub.contains(w as usize))
                    .count() as u32;
            }
        }
        while let Some(w) = queue.pop() {
            for &u in &self.pred[w] {
                let u = u as usize;
                if !sub.contains(u) || attr.contains(u) {
                    continue;
                }
                if self.game.owner[u] == player {
                    attr.insert(u);
                    self.strategy[u] = Some(w as u32);
                    queue.push(u);
                } else {
                    count[u] -= 1;
                    if count[u] == 0 {
                        attr.insert(u);
                        queue.push(u);
                    }
                }
            }
        }
        attr
    }

    /// Returns the winning regions (Even, Odd) of the subgame on `sub`.
    fn solve(&mut self, mut sub: VSet) -> (VSet, VSet) {
        let n = self.game.len();
        let mut won_even = VSet::empty(n);
        let mut won_odd = VSet::empty(n);
        loop {
            if sub.is_empty() {
                return (won_even, won_odd);
            }
            let p = sub
                .iter()
                .map(|v| self.game.priority[v])
                .min()
                .expect("nonempty");
            let alpha = Player::of_priority(p);
            let mut u = VSet::empty(n);
            for v in sub.iter() {
                if self.game.priority[v] == p {
                    u.insert(v);
                }
            }
            let a = self.attractor(&sub, &u, alpha);
            let (w0, w1) = self.solve(sub.minus(&a));
            let w_opp = match alpha {
                Player::Even => &w1,
                Player::Odd => &w0,
            };
            if w_opp.is_empty() {
                // alpha wins everything left; fix moves on priority-p vertices
                for v in u.iter() {
                    if self.game.owner[v] == alpha {
                        let w = self.game.succ[v]
                            .iter()
                            .copied()
                            .find(|&w| sub.contains(w as usize))
                            .expect("subgame is a trap");
                        self.strategy[v] = Some(w);
                    }
                }
                let won = match alpha {
                    Player::Even => &mut won_even,
                    Player::Odd => &mut won_odd,
                };
                for v in sub.iter() {
                    won.insert(v);
                }
                return (won_even, won_odd);
            }
            let opp = alpha.opponent();
            let b = self.attractor(&sub, w_opp, opp);
            let won = match opp {
                Player::Even => &mut won_even,
                Player::Odd => &mut won_odd,
            };
            for v in b.iter() {
                won.insert(v);
                sub.remove(v);
            }
        }
    }
}
