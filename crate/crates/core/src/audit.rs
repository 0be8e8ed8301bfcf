//! Per-strategy-pair soundness audit of the closed-form bounds against exact
//! probabilities in the reduced game.

use std::collections::BTreeSet;
use std::fmt;

use crate::arena::{delta_min, induce_unchecked, Game, Objective, Player, PureStrategy, VertexId};
use crate::bounds::{
    crosspath_lower_bound, interval_bounds, win_even_lower_bound, win_odd_upper_bound, BoundsError,
};
use crate::markov::{
    bsccs, classify_bsccs, crosspath_probability, parity_value, reach_probability, win_in_pbscc,
    ParityClass,
};
use crate::rational::{format_exact, Rational};
use crate::reduction::{bar, reduce, AlphaSchedule, ReductionError, ReductionOutput};
use crate::solvers::enumerate_strategies;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    CrossPath,
    WinEven,
    WinOdd,
    IntervalLow,
    IntervalHigh,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundViolation {
    pub kind: BoundKind,
    pub eve: PureStrategy,
    pub adam: PureStrategy,
    pub vertex: VertexId,
    pub exact: Rational,
    pub bound: Rational,
}

impl fmt::Display for BoundViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:?} at vertex {} under σ={} γ={}: exact {} vs bound {}",
            self.kind,
            self.vertex,
            self.eve,
            self.adam,
            format_exact(&self.exact),
            format_exact(&self.bound)
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AuditReport {
    pub pairs: usize,
    pub crosspath_checks: usize,
    pub win_even_checks: usize,
    pub win_odd_checks: usize,
    pub interval_checks: usize,
    pub violations: Vec<BoundViolation>,
}

impl AuditReport {
    pub fn merge(&mut self, other: AuditReport) {
        self.pairs += other.pairs;
        self.crosspath_checks += other.crosspath_checks;
        self.win_even_checks += other.win_even_checks;
        self.win_odd_checks += other.win_odd_checks;
        self.interval_checks += other.interval_checks;
        self.violations.extend(other.violations);
    }

    pub fn checks(&self) -> usize {
        self.crosspath_checks + self.win_even_checks + self.win_odd_checks + self.interval_checks
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AuditError {
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Reduction(#[from] ReductionError),
    #[error("the audit takes a parity game")]
    NotParity,
    #[error("alpha is undefined for priority {0}")]
    AlphaUndefined(u32),
}

struct Params {
    n: usize,
    delta: Rational,
    x: Rational,
    y: Rational,
    alphas: Vec<(u32, Rational, Rational)>,
}

impl Params {
    fn win_bounds(&self, k: u32) -> (Rational, Rational) {
        let (_, ak, ak1) = self.alphas.iter().find(|(p, _, _)| *p == k).expect("priority in use");
        (
            win_even_lower_bound(self.n, &self.delta, ak, ak1),
            win_odd_upper_bound(self.n, &self.delta, ak, ak1),
        )
    }
}

/// Checks, for one strategy pair, every bound against the exact reduced-game
/// probabilities.
fn audit_pair(
    game: &Game,
    red: &ReductionOutput,
    params: &Params,
    sigma: &PureStrategy,
    gamma: &PureStrategy,
    report: &mut AuditReport,
) {
    let p = game.objective.priorities().expect("parity game");
    let mc = induce_unchecked(&game.arena, sigma, gamma);
    let spg_value = parity_value(&mc, p);
    let decomp = classify_bsccs(&bsccs(&mc), p);

    let ls = red.lift_strategy(sigma);
    let lg = red.lift_strategy(gamma);
    let rmc = induce_unchecked(red.arena(), &ls, &lg);
    let all_pbscc: BTreeSet<usize> = red.gadget_image(decomp.bsccs.iter().flatten().copied());
    let cross = crosspath_probability(&rmc, &all_pbscc);
    let ssg_value = reach_probability(&rmc, &BTreeSet::from([red.v_win.0]))
        .expect("reachability system is non-singular");
    report.pairs += 1;

    let mut violate = |kind, vertex, exact: &Rational, bound: &Rational| {
        report.violations.push(BoundViolation {
            kind,
            eve: sigma.clone(),
            adam: gamma.clone(),
            vertex,
            exact: exact.clone(),
            bound: bound.clone(),
        })
    };

    let mut counts = (0, 0, 0, 0);
    for v in game.arena.vertex_ids() {
        let b = bar(v).0;
        counts.0 += 1;
        if cross[b] < params.x {
            violate(BoundKind::CrossPath, v, &cross[b], &params.x);
        }
        counts.3 += 1;
        let (lo, hi) = interval_bounds(&params.x, &params.y, &spg_value[v.0]);
        if ssg_value[b] < lo {
            violate(BoundKind::IntervalLow, v, &ssg_value[b], &lo);
        }
        if ssg_value[b] > hi {
            violate(BoundKind::IntervalHigh, v, &ssg_value[b], &hi);
        }
    }
    for (comp, class) in decomp.bsccs.iter().zip(&decomp.classes) {
        let k = comp.iter().map(|&s| p.get(VertexId(s))).min().expect("non-empty BSCC");
        let image = red.gadget_image(comp.iter().copied());
        let (lo, hi) = win_in_pbscc(&rmc, &image, red.v_win.0);
        let (even_bound, odd_bound) = params.win_bounds(k);
        let at = VertexId(comp[0]);
        match class {
            ParityClass::Even => {
                counts.1 += 1;
                if lo < even_bound {
                    violate(BoundKind::WinEven, at, &lo, &even_bound);
                }
            }
            ParityClass::Odd => {
                counts.2 += 1;
                if hi > odd_bound {
                    violate(BoundKind::WinOdd, at, &hi, &odd_bound);
                }
            }
            ParityClass::Unclassified => {}
        }
    }
    report.crosspath_checks += counts.0;
    report.win_even_checks += counts.1;
    report.win_odd_checks += counts.2;
    report.interval_checks += counts.3;
}

/// Audits every strategy pair of a parity game under `alpha`.
///
/// The crossPath bound uses α_0, the winEven/winOdd bounds of a pBSCC use
/// α_k and α_{k+1} for its minimum priority k, and the interval check uses
/// the smallest winEven bound over the priorities in use.
pub fn audit_game(game: &Game, alpha: &AlphaSchedule) -> Result<AuditReport, AuditError> {
    let Objective::Parity(p) = &game.objective else {
        return Err(AuditError::NotParity);
    };
    let delta = delta_min(&game.arena).map_err(BoundsError::from)?;
    if delta > crate::rational::frac(1, 2) {
        return Err(BoundsError::DeltaMinTooLarge(format_exact(&delta)).into());
    }
    let red = reduce(&game.arena, p, alpha)?;
    let n = game.arena.num_vertices();
    let get = |k: u32| alpha.get(k).ok_or(AuditError::AlphaUndefined(k));
    let mut alphas = Vec::new();
    for k in p.used() {
        alphas.push((k, get(k)?, get(k + 1)?));
    }
    let x = crosspath_lower_bound(n, &delta, &get(0)?);
    let y = alphas
        .iter()
        .map(|(_, ak, ak1)| win_even_lower_bound(n, &delta, ak, ak1))
        .min()
        .expect("some priority is used");
    let params = Params { n, delta, x, y, alphas };

    let eve: Vec<PureStrategy> = enumerate_strategies(&game.arena, Player::Eve).collect();
    let adam: Vec<PureStrategy> = enumerate_strategies(&game.arena, Player::Adam).collect();
    let mut report = AuditReport::default();
    for sigma in &eve {
        for gamma in &adam {
            audit_pair(game, &red, &params, sigma, gamma, &mut report);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::running_example;
    use crate::rational::frac;
    use crate::reduction::default_alpha;
    use num_bigint::BigInt;

    #[test]
    fn running_example_bounds_hold() {
        let g = running_example();
        let r = audit_game(&g, &default_alpha(6, &BigInt::from(10))).unwrap();
        assert_eq!(r.pairs, 6);
        assert!(r.violations.is_empty(), "{:?}", r.violations);
        assert!(r.win_odd_checks > 0);

        let r = audit_game(&g, &AlphaSchedule::geometric(frac(1, 4), frac(1, 2))).unwrap();
        assert!(r.violations.is_empty(), "{:?}", r.violations);
    }
}
