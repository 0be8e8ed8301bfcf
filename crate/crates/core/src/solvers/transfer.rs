use std::collections::BTreeSet;

use rayon::prelude::*;

use super::oracle::guard;
use super::{check_game, enumerate_strategies, oracle_table, pair_value, SolveError};
use crate::arena::{max_denominator, Game, Objective, Player, PureStrategy, VertexId};
use crate::bounds::epsilon;
use crate::rational::Rational;
use crate::reduction::{reduce, AlphaSchedule};

/// A strategy optimal in the reduced game but not in the parity game.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferFailure {
    pub player: Player,
    /// The strategy on the parity game.
    pub strategy: PureStrategy,
    pub spg_guarantee: Vec<Rational>,
    pub spg_value: Vec<Rational>,
    pub ssg_guarantee: Vec<Rational>,
    pub ssg_value: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransferReport {
    pub spg_value: Vec<Rational>,
    pub ssg_value: Vec<Rational>,
    /// Reduced-game optimal strategies examined, per player.
    pub eve_checked: usize,
    pub adam_checked: usize,
    pub failures: Vec<TransferFailure>,
    /// Parity-optimal strategies that are not optimal in the reduced game.
    /// The reduction only promises the other direction, so these are
    /// informational.
    pub reciprocal_eve: usize,
    pub reciprocal_adam: usize,
}

impl TransferReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks that every strategy optimal (from all vertices) in the reduced
/// game is optimal in the parity game, for both players.
pub fn verify_transfer(
    spg: &Game,
    alpha: &AlphaSchedule,
    cap: u128,
) -> Result<TransferReport, SolveError> {
    check_game(spg)?;
    let Objective::Parity(p) = &spg.objective else {
        return Err(SolveError::Unsupported("transfer verification takes a parity game".into()));
    };
    let red = reduce(&spg.arena, p, alpha)?;
    let g = oracle_table(spg, cap)?;
    let h = oracle_table(&red.ssg, cap)?;
    debug_assert_eq!(g.eve_strategies.len(), h.eve_strategies.len());
    debug_assert_eq!(g.adam_strategies.len(), h.adam_strategies.len());

    let g_eve: BTreeSet<usize> = g.eve_optimal().into_iter().collect();
    let g_adam: BTreeSet<usize> = g.adam_optimal().into_iter().collect();
    let h_eve: BTreeSet<usize> = h.eve_optimal().into_iter().collect();
    let h_adam: BTreeSet<usize> = h.adam_optimal().into_iter().collect();

    let mut failures = Vec::new();
    for &i in h_eve.difference(&g_eve) {
        failures.push(TransferFailure {
            player: Player::Eve,
            strategy: g.eve_strategies[i].clone(),
            spg_guarantee: g.eve_guarantee[i].clone(),
            spg_value: g.sup_inf.clone(),
            ssg_guarantee: h.eve_guarantee[i].clone(),
            ssg_value: h.sup_inf.clone(),
        });
    }
    for &j in h_adam.difference(&g_adam) {
        failures.push(TransferFailure {
            player: Player::Adam,
            strategy: g.adam_strategies[j].clone(),
            spg_guarantee: g.adam_guarantee[j].clone(),
            spg_value: g.inf_sup.clone(),
            ssg_guarantee: h.adam_guarantee[j].clone(),
            ssg_value: h.inf_sup.clone(),
        });
    }
    Ok(TransferReport {
        spg_value: g.sup_inf.clone(),
        ssg_value: h.sup_inf.clone(),
        eve_checked: h_eve.len(),
        adam_checked: h_adam.len(),
        failures,
        reciprocal_eve: g_eve.difference(&h_eve).count(),
        reciprocal_adam: g_adam.difference(&h_adam).count(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeparationReport {
    pub epsilon: Rational,
    /// Smallest nonzero difference between two strategy-pair values at the
    /// same vertex; `None` if every vertex has a single value.
    pub min_gap: Option<Rational>,
    /// `(vertex, smaller value, larger value)` with a gap of at most ε.
    pub violations: Vec<(VertexId, Rational, Rational)>,
    pub pairs: usize,
}

impl SeparationReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Distinct values of every strategy pair at every vertex, sorted.
pub fn distinct_pair_values(game: &Game, cap: u128) -> Result<Vec<BTreeSet<Rational>>, SolveError> {
    check_game(game)?;
    guard(game, cap)?;
    let n = game.arena.num_vertices();
    let eve: Vec<PureStrategy> = enumerate_strategies(&game.arena, Player::Eve).collect();
    let adam: Vec<PureStrategy> = enumerate_strategies(&game.arena, Player::Adam).collect();
    let empty = || vec![BTreeSet::new(); n];
    Ok(eve
        .par_iter()
        .fold(empty, |mut acc, sigma| {
            for gamma in &adam {
                for (v, x) in pair_value(game, sigma, gamma).into_iter().enumerate() {
                    acc[v].insert(x);
                }
            }
            acc
        })
        .reduce(empty, |mut a, b| {
            for (x, y) in a.iter_mut().zip(b) {
                x.extend(y);
            }
            a
        }))
}

/// Checks that distinct strategy-pair values at a vertex differ by more than
/// ε = 1/((n!)^2 M^(2n^2)).
pub fn separation_check(game: &Game, cap: u128) -> Result<SeparationReport, SolveError> {
    let per_vertex = distinct_pair_values(game, cap)?;
    let eps = epsilon(game.arena.num_vertices(), &max_denominator(&game.arena));
    let mut min_gap: Option<Rational> = None;
    let mut violations = Vec::new();
    for (v, vals) in per_vertex.iter().enumerate() {
        let sorted: Vec<&Rational> = vals.iter().collect();
        for w in sorted.windows(2) {
            let gap = w[1] - w[0];
            if gap <= eps {
                violations.push((VertexId(v), w[0].clone(), w[1].clone()));
            }
            if min_gap.as_ref().is_none_or(|m| gap < *m) {
                min_gap = Some(gap);
            }
        }
    }
    let pairs = super::strategy_count(&game.arena, Player::Eve) as usize
        * super::strategy_count(&game.arena, Player::Adam) as usize;
    Ok(SeparationReport { epsilon: eps, min_gap, violations, pairs })
}
