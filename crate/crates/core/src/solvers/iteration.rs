use std::collections::BTreeSet;

use num_traits::One;

use super::{check_game, Method, SolveError, SolveResult, Values};
use crate::arena::{induce_unchecked, Arena, Game, Objective, Owner, Player, PureStrategy, VertexId};
use crate::markov::reach_probability;
use crate::rational::{to_f64, Rational};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ViOptions {
    pub tolerance: f64,
    pub max_iters: usize,
}

impl Default for ViOptions {
    fn default() -> Self {
        ViOptions { tolerance: 1e-12, max_iters: 1_000_000 }
    }
}

fn reach_target(game: &Game) -> Result<&BTreeSet<VertexId>, SolveError> {
    check_game(game)?;
    match &game.objective {
        Objective::Reachability(t) => Ok(t),
        Objective::Parity(_) => Err(SolveError::Unsupported(
            "this solver takes a reachability game; reduce the parity game first".into(),
        )),
    }
}

/// Lowest-indexed successor maximising (Eve) or minimising (Adam) `score`.
fn greedy<T: PartialOrd>(arena: &Arena, player: Player, score: impl Fn(VertexId) -> T) -> PureStrategy {
    let mut s = PureStrategy::empty(player, arena.num_vertices());
    for v in arena.owned_by(player) {
        let mut best = arena.edges(v)[0].target;
        let mut best_score = score(best);
        for e in &arena.edges(v)[1..] {
            let sc = score(e.target);
            let better = match player {
                Player::Eve => sc > best_score,
                Player::Adam => sc < best_score,
            };
            if better {
                best = e.target;
                best_score = sc;
            }
        }
        s.set(v, best);
    }
    s
}

/// Jacobi value iteration in `f64` from the target indicator.
pub fn value_iteration(game: &Game, opts: ViOptions) -> Result<SolveResult, SolveError> {
    if opts.tolerance.is_nan() || opts.tolerance <= 0.0 {
        return Err(SolveError::Unsupported("tolerance must be positive".into()));
    }
    let target = reach_target(game)?;
    let arena = &game.arena;
    let n = arena.num_vertices();
    let is_target: Vec<bool> = (0..n).map(|v| target.contains(&VertexId(v))).collect();
    let probs: Vec<Vec<(usize, f64)>> = arena
        .vertex_ids()
        .map(|v| {
            arena
                .edges(v)
                .iter()
                .map(|e| (e.target.0, e.prob.as_ref().map(to_f64).unwrap_or(0.0)))
                .collect()
        })
        .collect();

    let mut x: Vec<f64> = is_target.iter().map(|&t| if t { 1.0 } else { 0.0 }).collect();
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iters {
        iterations += 1;
        let next: Vec<f64> = (0..n)
            .map(|v| {
                if is_target[v] {
                    return 1.0;
                }
                let succ = probs[v].iter().map(|(t, _)| x[*t]);
                match arena.owner(VertexId(v)) {
                    Owner::Eve => succ.fold(f64::NEG_INFINITY, f64::max),
                    Owner::Adam => succ.fold(f64::INFINITY, f64::min),
                    Owner::Random => probs[v].iter().map(|(t, p)| p * x[*t]).sum(),
                }
            })
            .collect();
        let change = next.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        x = next;
        if change < opts.tolerance {
            converged = true;
            break;
        }
    }
    let result = SolveResult {
        eve_strategy: greedy(arena, Player::Eve, |w| x[w.0]),
        adam_strategy: greedy(arena, Player::Adam, |w| x[w.0]),
        values: Values::Approx(x),
        method: Method::Vi,
        iterations,
        converged,
    };
    if converged {
        Ok(result)
    } else {
        Err(SolveError::DidNotConverge(Box::new(result)))
    }
}

/// Vertices from which Adam can keep the play out of `target` forever when
/// Eve plays `sigma`.
fn adam_safe_region(arena: &Arena, target: &BTreeSet<VertexId>, sigma: &PureStrategy) -> Vec<bool> {
    let n = arena.num_vertices();
    let mut x: Vec<bool> = (0..n).map(|v| !target.contains(&VertexId(v))).collect();
    loop {
        let mut changed = false;
        for v in arena.vertex_ids() {
            if !x[v.0] {
                continue;
            }
            let keep = match arena.owner(v) {
                Owner::Random => arena.successors(v).all(|w| x[w.0]),
                Owner::Eve => x[sigma.get(v).expect("total Eve strategy").0],
                Owner::Adam => arena.successors(v).any(|w| x[w.0]),
            };
            if !keep {
                x[v.0] = false;
                changed = true;
            }
        }
        if !changed {
            return x;
        }
    }
}

/// Adam's exact best response to `sigma` by policy iteration, together with
/// its value vector.
fn adam_best_response(
    arena: &Arena,
    target: &BTreeSet<VertexId>,
    sigma: &PureStrategy,
) -> (PureStrategy, Vec<Rational>) {
    let safe = adam_safe_region(arena, target, sigma);
    let tgt: BTreeSet<usize> = target.iter().map(|v| v.0).collect();
    let mut gamma = PureStrategy::empty(Player::Adam, arena.num_vertices());
    for v in arena.owned_by(Player::Adam) {
        let pick = if safe[v.0] {
            arena.successors(v).find(|w| safe[w.0]).expect("safe vertex has a safe successor")
        } else {
            arena.edges(v)[0].target
        };
        gamma.set(v, pick);
    }
    loop {
        let mc = induce_unchecked(arena, sigma, &gamma);
        let x = reach_probability(&mc, &tgt).expect("reachability system is non-singular");
        let mut improved = false;
        for v in arena.owned_by(Player::Adam) {
            if safe[v.0] {
                continue;
            }
            let cur = gamma.get(v).expect("total Adam strategy");
            let best_val = arena.successors(v).map(|w| &x[w.0]).min().expect("non-blocking");
            let best = arena
                .successors(v)
                .find(|w| x[w.0] == *best_val)
                .expect("minimiser exists");
            if x[best.0] < x[cur.0] {
                gamma.set(v, best);
                improved = true;
            }
        }
        if !improved {
            return (gamma, x);
        }
    }
}

/// Exact strategy iteration: Eve improves against Adam's exact best
/// response until no strict improvement is left.
pub fn strategy_iteration(game: &Game) -> Result<SolveResult, SolveError> {
    let target = reach_target(game)?;
    let arena = &game.arena;
    let mut sigma = PureStrategy::empty(Player::Eve, arena.num_vertices());
    for v in arena.owned_by(Player::Eve) {
        sigma.set(v, arena.edges(v)[0].target);
    }
    let mut iterations = 0;
    let values = loop {
        iterations += 1;
        let (_, x) = adam_best_response(arena, target, &sigma);
        let mut improved = false;
        for v in arena.owned_by(Player::Eve) {
            let cur = sigma.get(v).expect("total Eve strategy");
            let best_val = arena.successors(v).map(|w| &x[w.0]).max().expect("non-blocking");
            if *best_val > x[cur.0] {
                let best = arena
                    .successors(v)
                    .find(|w| x[w.0] == *best_val)
                    .expect("maximiser exists");
                sigma.set(v, best);
                improved = true;
            }
        }
        if !improved {
            break x;
        }
    };
    // Any choice minimising the game value is optimal for the reachability
    // minimiser.
    let adam = greedy(arena, Player::Adam, |w| values[w.0].clone());
    debug_assert!(values.iter().all(|v| *v <= Rational::one()));
    Ok(SolveResult {
        values: Values::Exact(values),
        eve_strategy: sigma,
        adam_strategy: adam,
        method: Method::Si,
        iterations,
        converged: true,
    })
}
