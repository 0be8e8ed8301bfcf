//! Stochastic arenas, objectives and pure memoryless strategies.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::markov::MarkovChain;
use crate::rational::{format_exact, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub usize);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<usize> for VertexId {
    fn from(i: usize) -> Self {
        VertexId(i)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Player {
    Eve,
    Adam,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::Eve => Player::Adam,
            Player::Adam => Player::Eve,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Player::Eve => f.write_str("Eve"),
            Player::Adam => f.write_str("Adam"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Owner {
    Eve,
    Adam,
    Random,
}

impl Owner {
    pub fn player(self) -> Option<Player> {
        match self {
            Owner::Eve => Some(Player::Eve),
            Owner::Adam => Some(Player::Adam),
            Owner::Random => None,
        }
    }

    pub fn is_random(self) -> bool {
        self == Owner::Random
    }
}

impl From<Player> for Owner {
    fn from(p: Player) -> Self {
        match p {
            Player::Eve => Owner::Eve,
            Player::Adam => Owner::Adam,
        }
    }
}

/// An outgoing edge. `prob` is present exactly on edges leaving random
/// vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub target: VertexId,
    pub prob: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub owner: Owner,
    pub label: Option<String>,
}

/// A finite stochastic arena with index-addressed vertices.
///
/// Construction never fails; [`validate`] reports structural problems so that
/// arbitrary candidate input can be inspected.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Arena {
    vertices: Vec<Vertex>,
    edges: Vec<Vec<Edge>>,
}

impl Arena {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_owners(owners: &[Owner]) -> Self {
        let mut a = Self::new();
        for &o in owners {
            a.add_vertex(o, None);
        }
        a
    }

    pub fn add_vertex(&mut self, owner: Owner, label: Option<String>) -> VertexId {
        self.vertices.push(Vertex { owner, label });
        self.edges.push(Vec::new());
        VertexId(self.vertices.len() - 1)
    }

    /// Adds a player edge (no probability attached).
    pub fn add_edge(&mut self, from: VertexId, to: VertexId) {
        self.insert_edge(from, Edge { target: to, prob: None });
    }

    pub fn add_random_edge(&mut self, from: VertexId, to: VertexId, prob: Rational) {
        self.insert_edge(from, Edge { target: to, prob: Some(prob) });
    }

    // Successor lists stay sorted by target so that "successor index" is a
    // canonical, order-independent notion.
    fn insert_edge(&mut self, from: VertexId, edge: Edge) {
        let list = &mut self.edges[from.0];
        let pos = list.partition_point(|e| e.target <= edge.target);
        list.insert(pos, edge);
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.vertices.len()).map(VertexId)
    }

    pub fn owner(&self, v: VertexId) -> Owner {
        self.vertices[v.0].owner
    }

    pub fn label(&self, v: VertexId) -> Option<&str> {
        self.vertices[v.0].label.as_deref()
    }

    pub fn set_label(&mut self, v: VertexId, label: Option<String>) {
        self.vertices[v.0].label = label;
    }

    pub fn display_name(&self, v: VertexId) -> String {
        match self.label(v) {
            Some(l) => l.to_string(),
            None => format!("v{}", v.0),
        }
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self, v: VertexId) -> &[Edge] {
        &self.edges[v.0]
    }

    pub fn successors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.edges[v.0].iter().map(|e| e.target)
    }

    pub fn has_edge(&self, from: VertexId, to: VertexId) -> bool {
        from.0 < self.edges.len() && self.edges[from.0].iter().any(|e| e.target == to)
    }

    /// Transition probability Δ(u, v) at a random vertex; zero elsewhere.
    pub fn prob(&self, from: VertexId, to: VertexId) -> Rational {
        self.edges[from.0]
            .iter()
            .filter(|e| e.target == to)
            .filter_map(|e| e.prob.clone())
            .fold(Rational::zero(), |acc, p| acc + p)
    }

    pub fn owned_by(&self, player: Player) -> impl Iterator<Item = VertexId> + '_ {
        let owner = Owner::from(player);
        self.vertex_ids().filter(move |&v| self.owner(v) == owner)
    }

    /// Positive probabilities on edges leaving random vertices.
    pub fn random_probabilities(&self) -> impl Iterator<Item = &Rational> + '_ {
        self.vertex_ids()
            .filter(|&v| self.owner(v).is_random())
            .flat_map(move |v| self.edges[v.0].iter())
            .filter_map(|e| e.prob.as_ref())
            .filter(|p| p.is_positive())
    }
}

/// Priority assignment `p : V -> N`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PriorityFn(pub Vec<u32>);

impl PriorityFn {
    pub fn new(priorities: Vec<u32>) -> Self {
        PriorityFn(priorities)
    }

    pub fn get(&self, v: VertexId) -> u32 {
        self.0[v.0]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_priority(&self) -> Option<u32> {
        self.0.iter().copied().max()
    }

    /// The priorities actually in use, ascending.
    pub fn used(&self) -> BTreeSet<u32> {
        self.0.iter().copied().collect()
    }

    pub fn shifted(&self, by: u32) -> PriorityFn {
        PriorityFn(self.0.iter().map(|p| p + by).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Objective {
    Parity(PriorityFn),
    Reachability(BTreeSet<VertexId>),
}

impl Objective {
    pub fn priorities(&self) -> Option<&PriorityFn> {
        match self {
            Objective::Parity(p) => Some(p),
            Objective::Reachability(_) => None,
        }
    }

    pub fn target(&self) -> Option<&BTreeSet<VertexId>> {
        match self {
            Objective::Reachability(t) => Some(t),
            Objective::Parity(_) => None,
        }
    }
}

/// An arena together with Eve's objective.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Game {
    pub arena: Arena,
    pub objective: Objective,
}

impl Game {
    pub fn parity(arena: Arena, priorities: PriorityFn) -> Self {
        Game { arena, objective: Objective::Parity(priorities) }
    }

    pub fn reachability(arena: Arena, target: impl IntoIterator<Item = VertexId>) -> Self {
        Game {
            arena,
            objective: Objective::Reachability(target.into_iter().collect()),
        }
    }
}

/// A pure memoryless strategy: one chosen successor per owned vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PureStrategy {
    pub player: Player,
    choice: Vec<Option<VertexId>>,
}

impl PureStrategy {
    /// Builds a strategy from `(vertex, successor)` pairs over an arena of
    /// `n` vertices.
    pub fn from_pairs(
        player: Player,
        n: usize,
        pairs: impl IntoIterator<Item = (VertexId, VertexId)>,
    ) -> Self {
        let mut choice = vec![None; n];
        for (u, v) in pairs {
            choice[u.0] = Some(v);
        }
        PureStrategy { player, choice }
    }

    pub fn empty(player: Player, n: usize) -> Self {
        PureStrategy { player, choice: vec![None; n] }
    }

    pub fn get(&self, v: VertexId) -> Option<VertexId> {
        self.choice.get(v.0).copied().flatten()
    }

    pub fn set(&mut self, v: VertexId, to: VertexId) {
        self.choice[v.0] = Some(to);
    }

    pub fn len(&self) -> usize {
        self.choice.len()
    }

    pub fn is_empty(&self) -> bool {
        self.choice.iter().all(Option::is_none)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.choice
            .iter()
            .enumerate()
            .filter_map(|(u, c)| c.map(|v| (VertexId(u), v)))
    }

    /// Checks that the strategy is total on the player's vertices and only
    /// picks existing edges.
    pub fn check(&self, arena: &Arena) -> Result<(), GameError> {
        let owner = Owner::from(self.player);
        for v in arena.vertex_ids() {
            let picked = self.get(v);
            if arena.owner(v) == owner {
                match picked {
                    None => {
                        return Err(GameError::StrategyIncomplete { player: self.player, vertex: v })
                    }
                    Some(t) if !arena.has_edge(v, t) => {
                        return Err(GameError::StrategyEdgeMissing { from: v, to: t })
                    }
                    _ => {}
                }
            } else if picked.is_some() {
                return Err(GameError::StrategyForeignVertex { player: self.player, vertex: v });
            }
        }
        Ok(())
    }
}

impl fmt::Display for PureStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, (u, v)) in self.pairs().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{u}->{v}")?;
        }
        f.write_str("]")
    }
}

/// Exact per-vertex values in [0,1].
pub type ValueVector = Vec<Rational>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GameError {
    #[error("strategy picks ({from}, {to}), which is not an edge")]
    StrategyEdgeMissing { from: VertexId, to: VertexId },
    #[error("{player} strategy has no choice at owned vertex {vertex}")]
    StrategyIncomplete { player: Player, vertex: VertexId },
    #[error("{player} strategy assigns a choice at vertex {vertex}, which {player} does not own")]
    StrategyForeignVertex { player: Player, vertex: VertexId },
    #[error("arena has no random transition with probability in (0,1); delta_min is undefined")]
    ArenaHasNoRandomTransitions,
    #[error("invalid arena: {0}")]
    Invalid(String),
}

/// One violated structural invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    EmptyArena,
    Blocking { vertex: VertexId },
    DanglingEdge { from: VertexId, to: VertexId },
    DuplicateEdge { from: VertexId, to: VertexId },
    MissingProbability { from: VertexId, to: VertexId },
    ProbabilityOnPlayerEdge { from: VertexId, to: VertexId },
    ProbabilityOutOfRange { from: VertexId, to: VertexId, prob: Rational },
    DistributionSum { vertex: VertexId, sum: Rational },
    PriorityCount { expected: usize, found: usize },
    EmptyTarget,
    TargetOutOfRange { vertex: VertexId },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyArena => write!(f, "arena has no vertices"),
            Violation::Blocking { vertex } => write!(f, "vertex {vertex} has no successor"),
            Violation::DanglingEdge { from, to } => {
                write!(f, "edge ({from}, {to}) points outside the vertex set")
            }
            Violation::DuplicateEdge { from, to } => write!(f, "edge ({from}, {to}) appears twice"),
            Violation::MissingProbability { from, to } => {
                write!(f, "random edge ({from}, {to}) has no probability")
            }
            Violation::ProbabilityOnPlayerEdge { from, to } => {
                write!(f, "player edge ({from}, {to}) carries a probability")
            }
            Violation::ProbabilityOutOfRange { from, to, prob } => {
                write!(f, "probability {} on edge ({from}, {to}) is outside (0,1]", format_exact(prob))
            }
            Violation::DistributionSum { vertex, sum } => {
                write!(f, "distribution at vertex {vertex} sums to {} ≠ 1", format_exact(sum))
            }
            Violation::PriorityCount { expected, found } => {
                write!(f, "priority function covers {found} vertices, arena has {expected}")
            }
            Violation::EmptyTarget => write!(f, "reachability target set is empty"),
            Violation::TargetOutOfRange { vertex } => {
                write!(f, "target vertex {vertex} is not in the arena")
            }
        }
    }
}

pub fn validate_arena(arena: &Arena) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = arena.num_vertices();
    if n == 0 {
        out.push(Violation::EmptyArena);
    }
    for v in arena.vertex_ids() {
        let edges = arena.edges(v);
        if edges.is_empty() {
            out.push(Violation::Blocking { vertex: v });
        }
        let mut seen = HashSet::new();
        let random = arena.owner(v).is_random();
        let mut sum = Rational::zero();
        for e in edges {
            if e.target.0 >= n {
                out.push(Violation::DanglingEdge { from: v, to: e.target });
            }
            if !seen.insert(e.target) {
                out.push(Violation::DuplicateEdge { from: v, to: e.target });
            }
            match (&e.prob, random) {
                (None, true) => out.push(Violation::MissingProbability { from: v, to: e.target }),
                (Some(_), false) => {
                    out.push(Violation::ProbabilityOnPlayerEdge { from: v, to: e.target })
                }
                (Some(p), true) => {
                    // an edge with probability 0 is outside supp(Δ(v)) and must not exist
                    if !p.is_positive() || *p > Rational::one() {
                        out.push(Violation::ProbabilityOutOfRange {
                            from: v,
                            to: e.target,
                            prob: p.clone(),
                        });
                    }
                    sum += p;
                }
                (None, false) => {}
            }
        }
        if random && !edges.is_empty() && !sum.is_one() {
            out.push(Violation::DistributionSum { vertex: v, sum });
        }
    }
    out
}

/// Every violated Arena and Objective invariant; empty iff the game is valid.
pub fn validate(arena: &Arena, objective: &Objective) -> Vec<Violation> {
    let mut out = validate_arena(arena);
    let n = arena.num_vertices();
    match objective {
        Objective::Parity(p) => {
            if p.len() != n {
                out.push(Violation::PriorityCount { expected: n, found: p.len() });
            }
        }
        Objective::Reachability(t) => {
            if t.is_empty() {
                out.push(Violation::EmptyTarget);
            }
            for &v in t {
                if v.0 >= n {
                    out.push(Violation::TargetOutOfRange { vertex: v });
                }
            }
        }
    }
    out
}

impl Game {
    pub fn validate(&self) -> Vec<Violation> {
        validate(&self.arena, &self.objective)
    }
}

/// Minimum positive transition probability over random vertices.
pub fn delta_min(arena: &Arena) -> Result<Rational, GameError> {
    arena
        .random_probabilities()
        .min()
        .cloned()
        .ok_or(GameError::ArenaHasNoRandomTransitions)
}

/// Largest denominator among random-transition probabilities (1 if none).
pub fn max_denominator(arena: &Arena) -> BigInt {
    arena
        .random_probabilities()
        .map(|p| p.denom().clone())
        .max()
        .unwrap_or_else(BigInt::one)
}

/// The Markov chain obtained by fixing both players' choices.
pub fn induce(
    arena: &Arena,
    sigma: &PureStrategy,
    gamma: &PureStrategy,
) -> Result<MarkovChain, GameError> {
    if sigma.player != Player::Eve || gamma.player != Player::Adam {
        return Err(GameError::Invalid("induce expects (Eve strategy, Adam strategy)".into()));
    }
    sigma.check(arena)?;
    gamma.check(arena)?;
    Ok(induce_unchecked(arena, sigma, gamma))
}

/// [`induce`] without the strategy checks, for hot enumeration loops where
/// strategies come from [`crate::solvers::enumerate_strategies`].
pub fn induce_unchecked(arena: &Arena, sigma: &PureStrategy, gamma: &PureStrategy) -> MarkovChain {
    let rows = arena
        .vertex_ids()
        .map(|u| match arena.owner(u) {
            Owner::Random => arena
                .edges(u)
                .iter()
                .map(|e| (e.target.0, e.prob.clone().unwrap_or_else(Rational::zero)))
                .collect(),
            Owner::Eve => vec![(sigma.get(u).expect("total Eve strategy").0, Rational::one())],
            Owner::Adam => vec![(gamma.get(u).expect("total Adam strategy").0, Rational::one())],
        })
        .collect();
    MarkovChain::from_rows_unchecked(rows)
}
