//! Stochastic parity games, simple stochastic games and the gadget reduction
//! between them, with exact rational solvers.

pub mod arena;
pub mod audit;
pub mod bounds;
pub mod examples;
pub mod gen;
pub mod io;
pub mod linsolve;
pub mod markov;
pub mod rational;
pub mod reduction;
pub mod solvers;

pub use arena::{
    delta_min, induce, max_denominator, validate, Arena, Edge, Game, GameError, Objective, Owner,
    Player, PriorityFn, PureStrategy, ValueVector, VertexId, Violation,
};
pub use markov::{
    bsccs, classify_bsccs, crosspath_probability, parity_value, reach_probability, win_in_pbscc,
    BsccDecomposition, MarkovChain, MarkovError, ParityClass,
};
pub use rational::{format_exact, parse_exact, Rational};
pub use reduction::{default_alpha, reduce, AlphaSchedule, ReductionError, ReductionOutput};
