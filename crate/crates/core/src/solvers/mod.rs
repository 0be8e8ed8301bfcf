//! Exhaustive oracle, value iteration, strategy iteration and the checks
//! built on them.

mod enumerate;
mod iteration;
mod oracle;
mod transfer;

use std::fmt;

use crate::arena::{induce_unchecked, Game, Objective, PureStrategy};
use crate::markov::{parity_value, reach_probability};
use crate::rational::{to_f64, Rational};

pub use enumerate::{enumerate_strategies, strategy_count, StrategyIter};
pub use iteration::{strategy_iteration, value_iteration, ViOptions};
pub use oracle::{oracle_table, oracle_values, OracleReport, OracleTable};
pub use transfer::{separation_check, verify_transfer, SeparationReport, TransferFailure, TransferReport};

pub const DEFAULT_CAP: u128 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Oracle,
    Vi,
    Si,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Oracle => "oracle",
            Method::Vi => "vi",
            Method::Si => "si",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Values {
    Exact(Vec<Rational>),
    Approx(Vec<f64>),
}

impl Values {
    pub fn len(&self) -> usize {
        match self {
            Values::Exact(v) => v.len(),
            Values::Approx(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn exact(&self) -> Option<&[Rational]> {
        match self {
            Values::Exact(v) => Some(v),
            Values::Approx(_) => None,
        }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        match self {
            Values::Exact(v) => v.iter().map(to_f64).collect(),
            Values::Approx(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub values: Values,
    pub eve_strategy: PureStrategy,
    pub adam_strategy: PureStrategy,
    pub method: Method,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolveError {
    #[error("{pairs} strategy pairs exceed the enumeration cap of {cap}")]
    EnumerationCapExceeded { pairs: u128, cap: u128 },
    #[error("value iteration did not converge within {} iterations", .0.iterations)]
    DidNotConverge(Box<SolveResult>),
    #[error("{0}")]
    Unsupported(String),
    #[error("invalid game: {0}")]
    InvalidGame(String),
    #[error(transparent)]
    Reduction(#[from] crate::reduction::ReductionError),
}

/// Exact value vector of one strategy pair.
pub fn pair_value(game: &Game, sigma: &PureStrategy, gamma: &PureStrategy) -> Vec<Rational> {
    let mc = induce_unchecked(&game.arena, sigma, gamma);
    match &game.objective {
        Objective::Parity(p) => parity_value(&mc, p),
        Objective::Reachability(t) => {
            let target = t.iter().map(|v| v.0).collect();
            reach_probability(&mc, &target).expect("reachability system is non-singular")
        }
    }
}

pub(crate) fn check_game(game: &Game) -> Result<(), SolveError> {
    let v = game.validate();
    if v.is_empty() {
        Ok(())
    } else {
        let msgs: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        Err(SolveError::InvalidGame(msgs.join("; ")))
    }
}
