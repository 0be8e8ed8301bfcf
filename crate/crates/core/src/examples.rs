//! The running example: a six-vertex arena with three random vertices on a
//! line, an Eve and an Adam vertex, and a random vertex between them.

use crate::arena::{Arena, Game, Owner, Player, PriorityFn, PureStrategy, VertexId};
use crate::rational::frac;

pub fn running_example_arena() -> Arena {
    let mut a = Arena::new();
    let owners = [
        Owner::Random,
        Owner::Random,
        Owner::Random,
        Owner::Eve,
        Owner::Adam,
        Owner::Random,
    ];
    for (i, o) in owners.into_iter().enumerate() {
        a.add_vertex(o, Some(format!("v{i}")));
    }
    let v = VertexId;
    a.add_random_edge(v(0), v(0), frac(9, 10));
    a.add_random_edge(v(0), v(1), frac(1, 10));
    a.add_random_edge(v(1), v(0), frac(9, 10));
    a.add_random_edge(v(1), v(2), frac(1, 10));
    a.add_random_edge(v(2), v(0), frac(9, 10));
    a.add_random_edge(v(2), v(4), frac(1, 10));
    a.add_edge(v(3), v(2));
    a.add_edge(v(3), v(5));
    a.add_edge(v(4), v(1));
    a.add_edge(v(4), v(3));
    a.add_edge(v(4), v(5));
    a.add_random_edge(v(5), v(3), frac(1, 2));
    a.add_random_edge(v(5), v(4), frac(1, 2));
    a
}

/// Priorities (0, 0, 0, 3, 4, 5).
pub fn running_example() -> Game {
    Game::parity(running_example_arena(), PriorityFn::new(vec![0, 0, 0, 3, 4, 5]))
}

/// σ(v3) = v5 for Eve and γ(v4) = v5 for Adam.
pub fn running_example_strategies() -> (PureStrategy, PureStrategy) {
    (
        PureStrategy::from_pairs(Player::Eve, 6, [(VertexId(3), VertexId(5))]),
        PureStrategy::from_pairs(Player::Adam, 6, [(VertexId(4), VertexId(5))]),
    )
}
