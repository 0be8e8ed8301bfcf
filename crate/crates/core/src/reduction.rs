//! The gadget reduction from parity to reachability and its α-schedules.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::arena::{Arena, Game, Objective, Owner, PriorityFn, PureStrategy, VertexId, Violation};
use crate::rational::{factorial, format_exact, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlphaValues {
    /// α_k = first · ratio^k
    Geometric { first: Rational, ratio: Rational },
    /// α_k = table[k]; undefined beyond the table.
    Table(Vec<Rational>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlphaProvenance {
    Default { n: usize, m: BigInt },
    UserSupplied,
}

/// Sink probabilities per priority.
///
/// Monotonicity is not enforced here: flat or increasing schedules are
/// useful to exhibit games where the reduction stops preserving optimality.
/// [`crate::bounds::check_alpha`] decides whether a schedule is compliant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlphaSchedule {
    pub values: AlphaValues,
    pub provenance: AlphaProvenance,
}

impl AlphaSchedule {
    pub fn geometric(first: Rational, ratio: Rational) -> Self {
        AlphaSchedule {
            values: AlphaValues::Geometric { first, ratio },
            provenance: AlphaProvenance::UserSupplied,
        }
    }

    pub fn table(values: Vec<Rational>) -> Self {
        AlphaSchedule { values: AlphaValues::Table(values), provenance: AlphaProvenance::UserSupplied }
    }

    /// The same value for every priority.
    pub fn flat(value: Rational) -> Self {
        Self::geometric(value, Rational::one())
    }

    pub fn get(&self, k: u32) -> Option<Rational> {
        match &self.values {
            AlphaValues::Geometric { first, ratio } => {
                Some(first * num_traits::pow(ratio.clone(), k as usize))
            }
            AlphaValues::Table(t) => t.get(k as usize).cloned(),
        }
    }

    /// Strictly decreasing over the given priorities (ascending order).
    pub fn is_strictly_decreasing_on(&self, priorities: &BTreeSet<u32>) -> bool {
        let vals: Option<Vec<Rational>> = priorities.iter().map(|&k| self.get(k)).collect();
        match vals {
            Some(v) => v.windows(2).all(|w| w[1] < w[0]),
            None => false,
        }
    }
}

impl fmt::Display for AlphaSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.values {
            AlphaValues::Geometric { first, ratio } => write!(
                f,
                "alpha_k = {} * ({})^k",
                format_exact(first),
                format_exact(ratio)
            ),
            AlphaValues::Table(t) => {
                let parts: Vec<String> = t.iter().map(format_exact).collect();
                write!(f, "alpha = [{}]", parts.join(", "))
            }
        }
    }
}

/// `16 (n!)^2 M^(2n^2+n) + 1`, the reciprocal of the default α_0.
pub fn default_alpha_base(n: usize, m: &BigInt) -> BigInt {
    let f = BigInt::from(factorial(n as u64));
    let exp = 2 * n * n + n;
    BigInt::from(16) * &f * &f * num_traits::pow(m.clone(), exp) + 1
}

/// α_k = (1 / (16 (n!)^2 M^(2n^2+n) + 1))^(k+1).
pub fn default_alpha(n: usize, m: &BigInt) -> AlphaSchedule {
    let base = Rational::new(BigInt::one(), default_alpha_base(n, m));
    AlphaSchedule {
        values: AlphaValues::Geometric { first: base.clone(), ratio: base },
        provenance: AlphaProvenance::Default { n, m: m.clone() },
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReductionError {
    #[error("alpha is undefined for priority {0}")]
    AlphaUndefinedForPriority(u32),
    #[error("alpha_{k} = {value} is outside (0,1)")]
    AlphaOutOfRange { k: u32, value: String },
    #[error("input game is invalid: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidGame(Vec<Violation>),
    #[error("the reduction takes a parity game")]
    NotParity,
}

/// Reduced game plus the addressing between the two arenas.
///
/// Vertex `v` of the parity game becomes `bar(v) = 2v` and `hat(v) = 2v+1`;
/// the sinks are `v_win = 2n` and `v_lose = 2n+1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionOutput {
    pub ssg: Game,
    pub n: usize,
    pub v_win: VertexId,
    pub v_lose: VertexId,
    pub alphas: Vec<(u32, Rational)>,
}

pub fn bar(v: VertexId) -> VertexId {
    VertexId(2 * v.0)
}

pub fn hat(v: VertexId) -> VertexId {
    VertexId(2 * v.0 + 1)
}

impl ReductionOutput {
    pub fn arena(&self) -> &Arena {
        &self.ssg.arena
    }

    pub fn target(&self) -> BTreeSet<VertexId> {
        BTreeSet::from([self.v_win])
    }

    pub fn mapping(&self, v: VertexId) -> (VertexId, VertexId) {
        (bar(v), hat(v))
    }

    /// Original vertex behind a bar- or hat-vertex, `None` for sinks.
    pub fn original(&self, w: VertexId) -> Option<VertexId> {
        (w.0 < 2 * self.n).then_some(VertexId(w.0 / 2))
    }

    /// σ on G becomes σ̃(ū) = ŵ for σ(u) = w.
    pub fn lift_strategy(&self, s: &PureStrategy) -> PureStrategy {
        PureStrategy::from_pairs(
            s.player,
            2 * self.n + 2,
            s.pairs().map(|(u, w)| (bar(u), hat(w))),
        )
    }

    /// Inverse of [`lift_strategy`](Self::lift_strategy).
    pub fn project_strategy(&self, s: &PureStrategy) -> PureStrategy {
        PureStrategy::from_pairs(
            s.player,
            self.n,
            s.pairs().map(|(u, w)| (VertexId(u.0 / 2), VertexId(w.0 / 2))),
        )
    }

    /// The bar- and hat-copies of a set of original vertices.
    pub fn gadget_image(&self, vertices: impl IntoIterator<Item = usize>) -> BTreeSet<usize> {
        vertices.into_iter().flat_map(|v| [2 * v, 2 * v + 1]).collect()
    }
}

pub fn reduce(
    arena: &Arena,
    priorities: &PriorityFn,
    alpha: &AlphaSchedule,
) -> Result<ReductionOutput, ReductionError> {
    let violations = crate::arena::validate(arena, &Objective::Parity(priorities.clone()));
    if !violations.is_empty() {
        return Err(ReductionError::InvalidGame(violations));
    }
    let mut alphas = Vec::new();
    for k in priorities.used() {
        let a = alpha.get(k).ok_or(ReductionError::AlphaUndefinedForPriority(k))?;
        if !a.is_positive() || a >= Rational::one() {
            return Err(ReductionError::AlphaOutOfRange { k, value: format_exact(&a) });
        }
        alphas.push((k, a));
    }
    let alpha_of = |k: u32| -> &Rational {
        &alphas.iter().find(|(p, _)| *p == k).expect("alpha collected for every priority").1
    };

    let n = arena.num_vertices();
    let mut out = Arena::new();
    for v in arena.vertex_ids() {
        let name = arena.display_name(v);
        out.add_vertex(arena.owner(v), Some(format!("{name}_bar")));
        out.add_vertex(Owner::Random, Some(format!("{name}_hat")));
    }
    let v_win = out.add_vertex(Owner::Random, Some("v_win".into()));
    let v_lose = out.add_vertex(Owner::Random, Some("v_lose".into()));

    for u in arena.vertex_ids() {
        for e in arena.edges(u) {
            match &e.prob {
                Some(p) => out.add_random_edge(bar(u), hat(e.target), p.clone()),
                None => out.add_edge(bar(u), hat(e.target)),
            }
        }
        let k = priorities.get(u);
        let a = alpha_of(k);
        out.add_random_edge(hat(u), bar(u), Rational::one() - a);
        let sink = if k % 2 == 0 { v_win } else { v_lose };
        out.add_random_edge(hat(u), sink, a.clone());
    }
    out.add_random_edge(v_win, v_win, Rational::one());
    out.add_random_edge(v_lose, v_lose, Rational::one());

    Ok(ReductionOutput {
        ssg: Game::reachability(out, [v_win]),
        n,
        v_win,
        v_lose,
        alphas,
    })
}

/// Reduces a parity [`Game`]; errors if the objective is reachability.
pub fn reduce_game(game: &Game, alpha: &AlphaSchedule) -> Result<ReductionOutput, ReductionError> {
    match &game.objective {
        Objective::Parity(p) => reduce(&game.arena, p, alpha),
        Objective::Reachability(_) => Err(ReductionError::NotParity),
    }
}
