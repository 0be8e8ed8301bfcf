//! Seeded random and exhaustive game generators for test corpora.

use num_traits::One;
use rand::seq::index::sample;
use rand::Rng;

use crate::arena::{Arena, Game, Owner, PriorityFn, VertexId};
use crate::rational::{frac, int, Rational};

/// Distributions over `k` successors whose probabilities have denominators
/// at most 3.
pub fn small_distributions(k: usize) -> Vec<Vec<Rational>> {
    match k {
        1 => vec![vec![int(1)]],
        2 => vec![
            vec![frac(1, 2), frac(1, 2)],
            vec![frac(1, 3), frac(2, 3)],
            vec![frac(2, 3), frac(1, 3)],
        ],
        3 => vec![vec![frac(1, 3), frac(1, 3), frac(1, 3)]],
        _ => Vec::new(),
    }
}

/// One vertex's owner and outgoing edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexConfig {
    pub owner: Owner,
    pub succ: Vec<usize>,
    pub probs: Option<Vec<Rational>>,
}

fn subsets(n: usize, max_size: usize) -> Vec<Vec<usize>> {
    (1u32..(1 << n))
        .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).collect::<Vec<_>>())
        .filter(|s| s.len() <= max_size)
        .collect()
}

/// Every vertex configuration in an `n`-vertex arena with out-degree at most
/// `max_out` and denominators at most 3.
pub fn vertex_configs(n: usize, max_out: usize) -> Vec<VertexConfig> {
    let sets = subsets(n, max_out);
    let mut out = Vec::new();
    for owner in [Owner::Eve, Owner::Adam] {
        for s in &sets {
            out.push(VertexConfig { owner, succ: s.clone(), probs: None });
        }
    }
    for s in &sets {
        for d in small_distributions(s.len()) {
            out.push(VertexConfig { owner: Owner::Random, succ: s.clone(), probs: Some(d) });
        }
    }
    out
}

pub fn build_arena(configs: &[&VertexConfig]) -> Arena {
    let owners: Vec<Owner> = configs.iter().map(|c| c.owner).collect();
    let mut a = Arena::with_owners(&owners);
    for (v, c) in configs.iter().enumerate() {
        match &c.probs {
            Some(ps) => {
                for (t, p) in c.succ.iter().zip(ps) {
                    a.add_random_edge(VertexId(v), VertexId(*t), p.clone());
                }
            }
            None => {
                for t in &c.succ {
                    a.add_edge(VertexId(v), VertexId(*t));
                }
            }
        }
    }
    a
}

/// Whether some random vertex branches, so that δ_min ≤ 1/2.
pub fn has_branching_random(arena: &Arena) -> bool {
    arena.random_probabilities().any(|p| !p.is_one())
}

/// Every arena on `n` vertices with out-degree at most `max_out`, in a fixed
/// order.
pub fn exhaustive_arenas(n: usize, max_out: usize) -> impl Iterator<Item = Arena> {
    let configs = vertex_configs(n, max_out);
    let k = configs.len();
    let total = k.pow(n as u32);
    (0..total).map(move |mut idx| {
        let mut chosen = Vec::with_capacity(n);
        for _ in 0..n {
            chosen.push(&configs[idx % k]);
            idx /= k;
        }
        build_arena(&chosen)
    })
}

/// All priority vectors over `0..=max_priority` for `n` vertices.
pub fn all_priorities(n: usize, max_priority: u32) -> Vec<PriorityFn> {
    let base = max_priority as usize + 1;
    (0..base.pow(n as u32))
        .map(|mut idx| {
            let mut p = Vec::with_capacity(n);
            for _ in 0..n {
                p.push((idx % base) as u32);
                idx /= base;
            }
            PriorityFn::new(p)
        })
        .collect()
}

pub fn random_priorities<R: Rng>(rng: &mut R, n: usize, max_priority: u32) -> PriorityFn {
    PriorityFn::new((0..n).map(|_| rng.gen_range(0..=max_priority)).collect())
}

fn random_configs<R: Rng>(rng: &mut R, n: usize, max_out: usize) -> Vec<VertexConfig> {
    (0..n)
        .map(|_| {
            let owner = match rng.gen_range(0..3) {
                0 => Owner::Eve,
                1 => Owner::Adam,
                _ => Owner::Random,
            };
            let deg = rng.gen_range(1..=max_out.min(n).min(3));
            let mut succ = sample(rng, n, deg).into_vec();
            succ.sort_unstable();
            let probs = (owner == Owner::Random).then(|| {
                let ds = small_distributions(deg);
                ds[rng.gen_range(0..ds.len())].clone()
            });
            VertexConfig { owner, succ, probs }
        })
        .collect()
}

fn random_arena_with<R: Rng>(
    rng: &mut R,
    n: usize,
    max_out: usize,
    absorbing: Option<usize>,
) -> Arena {
    loop {
        let mut configs = random_configs(rng, n, max_out);
        if let Some(t) = absorbing {
            configs[t] = VertexConfig { owner: Owner::Random, succ: vec![t], probs: Some(vec![int(1)]) };
        }
        let refs: Vec<&VertexConfig> = configs.iter().collect();
        let a = build_arena(&refs);
        // a single vertex cannot branch
        if n < 2 || has_branching_random(&a) {
            return a;
        }
    }
}

/// A random arena with out-degree at most `max_out` and denominators at most
/// 3, containing at least one branching random vertex when `n >= 2`.
pub fn random_arena<R: Rng>(rng: &mut R, n: usize, max_out: usize) -> Arena {
    random_arena_with(rng, n, max_out, None)
}

pub fn random_spg<R: Rng>(rng: &mut R, n: usize, max_out: usize, max_priority: u32) -> Game {
    let a = random_arena(rng, n, max_out);
    let p = random_priorities(rng, n, max_priority);
    Game::parity(a, p)
}

/// A random reachability game whose single target is absorbing.
pub fn random_ssg<R: Rng>(rng: &mut R, n: usize, max_out: usize) -> Game {
    let t = rng.gen_range(0..n);
    Game::reachability(random_arena_with(rng, n, max_out, Some(t)), [VertexId(t)])
}
