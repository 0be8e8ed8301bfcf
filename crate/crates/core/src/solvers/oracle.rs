use rayon::prelude::*;

use num_traits::One;

use super::{check_game, enumerate_strategies, pair_value, strategy_count, Method, SolveError, SolveResult, Values};
use crate::arena::{Game, Player, PureStrategy};
use crate::rational::Rational;

/// Every Eve and Adam strategy together with what each guarantees.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleTable {
    pub eve_strategies: Vec<PureStrategy>,
    pub adam_strategies: Vec<PureStrategy>,
    /// For Eve strategy `i`: the vertexwise infimum over Adam strategies.
    pub eve_guarantee: Vec<Vec<Rational>>,
    /// For Adam strategy `j`: the vertexwise supremum over Eve strategies.
    pub adam_guarantee: Vec<Vec<Rational>>,
    pub sup_inf: Vec<Rational>,
    pub inf_sup: Vec<Rational>,
}

impl OracleTable {
    /// Indices of Eve strategies achieving the value at every vertex.
    pub fn eve_optimal(&self) -> Vec<usize> {
        (0..self.eve_strategies.len())
            .filter(|&i| self.eve_guarantee[i] == self.sup_inf)
            .collect()
    }

    /// Indices of Adam strategies holding Eve to the value at every vertex.
    pub fn adam_optimal(&self) -> Vec<usize> {
        (0..self.adam_strategies.len())
            .filter(|&j| self.adam_guarantee[j] == self.inf_sup)
            .collect()
    }

    pub fn determinacy_holds(&self) -> bool {
        self.sup_inf == self.inf_sup
    }

    pub fn num_pairs(&self) -> usize {
        self.eve_strategies.len() * self.adam_strategies.len()
    }
}

fn merge_with(acc: &mut [Rational], v: &[Rational], keep_max: bool) {
    for (a, b) in acc.iter_mut().zip(v) {
        if (keep_max && b > a) || (!keep_max && b < a) {
            *a = b.clone();
        }
    }
}

pub(crate) fn guard(game: &Game, cap: u128) -> Result<(), SolveError> {
    let pairs = strategy_count(&game.arena, Player::Eve)
        .saturating_mul(strategy_count(&game.arena, Player::Adam));
    if pairs > cap {
        return Err(SolveError::EnumerationCapExceeded { pairs, cap });
    }
    Ok(())
}

/// Evaluates every strategy pair exactly.
pub fn oracle_table(game: &Game, cap: u128) -> Result<OracleTable, SolveError> {
    check_game(game)?;
    guard(game, cap)?;
    let eve: Vec<PureStrategy> = enumerate_strategies(&game.arena, Player::Eve).collect();
    let adam: Vec<PureStrategy> = enumerate_strategies(&game.arena, Player::Adam).collect();

    type Acc = (Vec<(usize, Vec<Rational>)>, Vec<Option<Vec<Rational>>>);
    let empty = || -> Acc { (Vec::new(), vec![None; adam.len()]) };
    let (mut rows, adam_max): Acc = (0..eve.len())
        .into_par_iter()
        .fold(empty, |(mut rows, mut amax), i| {
            let mut inf: Option<Vec<Rational>> = None;
            for (j, gamma) in adam.iter().enumerate() {
                let v = pair_value(game, &eve[i], gamma);
                match &mut inf {
                    Some(acc) => merge_with(acc, &v, false),
                    None => inf = Some(v.clone()),
                }
                match &mut amax[j] {
                    Some(acc) => merge_with(acc, &v, true),
                    None => amax[j] = Some(v),
                }
            }
            rows.push((i, inf.expect("at least one Adam strategy")));
            (rows, amax)
        })
        .reduce(empty, |(mut ra, mut ma), (rb, mb)| {
            ra.extend(rb);
            for (a, b) in ma.iter_mut().zip(mb) {
                match (a.as_mut(), b) {
                    (Some(x), Some(y)) => merge_with(x, &y, true),
                    (None, Some(y)) => *a = Some(y),
                    _ => {}
                }
            }
            (ra, ma)
        });
    rows.sort_by_key(|(i, _)| *i);
    let eve_guarantee: Vec<Vec<Rational>> = rows.into_iter().map(|(_, v)| v).collect();
    let adam_guarantee: Vec<Vec<Rational>> = adam_max
        .into_iter()
        .map(|v| v.expect("at least one Eve strategy"))
        .collect();

    let mut sup_inf = eve_guarantee[0].clone();
    for g in &eve_guarantee[1..] {
        merge_with(&mut sup_inf, g, true);
    }
    let mut inf_sup = adam_guarantee[0].clone();
    for g in &adam_guarantee[1..] {
        merge_with(&mut inf_sup, g, false);
    }
    Ok(OracleTable {
        eve_strategies: eve,
        adam_strategies: adam,
        eve_guarantee,
        adam_guarantee,
        sup_inf,
        inf_sup,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    /// Eve's value with lexicographically first vertexwise-optimal witnesses.
    pub result: SolveResult,
    /// sup over Eve of inf over Adam, per vertex.
    pub sup_inf: Vec<Rational>,
    /// inf over Adam of sup over Eve, per vertex.
    pub inf_sup: Vec<Rational>,
    /// Adam's value for the complementary objective: 1 - inf_sup.
    pub adam_values: Vec<Rational>,
    pub determinacy: bool,
    pub num_pairs: usize,
}

/// Ground-truth values by enumerating all pure memoryless strategy pairs.
pub fn oracle_values(game: &Game, cap: u128) -> Result<OracleReport, SolveError> {
    let table = oracle_table(game, cap)?;
    let determinacy = table.determinacy_holds();
    let eve_i = table.eve_optimal().first().copied();
    let adam_j = table.adam_optimal().first().copied();
    let (Some(i), Some(j)) = (eve_i, adam_j) else {
        return Err(SolveError::Unsupported(
            "no strategy is optimal from every vertex; determinacy failed".into(),
        ));
    };
    let adam_values = table.inf_sup.iter().map(|v| Rational::one() - v).collect();
    Ok(OracleReport {
        result: SolveResult {
            values: Values::Exact(table.sup_inf.clone()),
            eve_strategy: table.eve_strategies[i].clone(),
            adam_strategy: table.adam_strategies[j].clone(),
            method: Method::Oracle,
            iterations: table.num_pairs(),
            converged: true,
        },
        num_pairs: table.num_pairs(),
        sup_inf: table.sup_inf,
        inf_sup: table.inf_sup,
        adam_values,
        determinacy,
    })
}
