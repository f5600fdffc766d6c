//! Automata over infinite words and trees: Büchi complementation,
//! determinization to parity, generalized Rabin tree automata and emptiness
//! checking through parity games.

pub mod acceptance;
pub mod complement;
pub mod emptiness;
mod error;
pub mod game;
pub mod safra;
pub mod tree;
pub mod word;

pub use acceptance::{ParityConverter, Shape, StateMarks};
pub use complement::{RankComplement, RankState};
pub use emptiness::{
    accepts_regular_tree, emptiness, explore, solve_skeleton, verify_witness, EmptinessResult,
    EmptinessStats, LabeledRegularTree, RegularTreeWitness, Skeleton, WitnessNode,
};
pub use error::AutomataError;
pub use game::{ParityGame, Player, Solution};
pub use safra::{SafraDpw, SafraState};
pub use tree::{
    ExplicitTreeAutomaton, LiftAllPaths, LiftAllPathsTagged, Move, Paired, Product, TreeAutomaton,
};
pub use word::{
    all_lassos, dpw_accepts_lasso, dpw_lasso_table, nbw_accepts_lasso, nbw_lasso_table,
    DetParityWordAutomaton, DualDpw, ExplicitNbw, Lasso, OmegaWordAutomaton,
};
