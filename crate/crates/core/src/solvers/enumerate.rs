use crate::arena::{Arena, Player, PureStrategy, VertexId};

/// Number of pure memoryless strategies of `player`, saturating at `u128::MAX`.
pub fn strategy_count(arena: &Arena, player: Player) -> u128 {
    arena
        .owned_by(player)
        .map(|v| arena.edges(v).len() as u128)
        .fold(1u128, |acc, d| acc.saturating_mul(d))
}

/// Lexicographic odometer over the successor choices of one player: the
/// lowest-indexed vertex is the most significant digit.
#[derive(Debug, Clone)]
pub struct StrategyIter<'a> {
    arena: &'a Arena,
    player: Player,
    owned: Vec<VertexId>,
    digits: Vec<usize>,
    done: bool,
}

pub fn enumerate_strategies(arena: &Arena, player: Player) -> StrategyIter<'_> {
    let owned: Vec<VertexId> = arena.owned_by(player).collect();
    let done = owned.iter().any(|&v| arena.edges(v).is_empty());
    StrategyIter { arena, player, digits: vec![0; owned.len()], owned, done }
}

impl Iterator for StrategyIter<'_> {
    type Item = PureStrategy;

    fn next(&mut self) -> Option<PureStrategy> {
        if self.done {
            return None;
        }
        let current = PureStrategy::from_pairs(
            self.player,
            self.arena.num_vertices(),
            self.owned
                .iter()
                .zip(&self.digits)
                .map(|(&v, &d)| (v, self.arena.edges(v)[d].target)),
        );
        // advance
        let mut i = self.owned.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            self.digits[i] += 1;
            if self.digits[i] < self.arena.edges(self.owned[i]).len() {
                break;
            }
            self.digits[i] = 0;
        }
        Some(current)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arena::Owner;

    #[test]
    fn no_owned_vertices_gives_single_empty_strategy() {
        let mut a = Arena::with_owners(&[Owner::Adam]);
        a.add_edge(VertexId(0), VertexId(0));
        let all: Vec<_> = enumerate_strategies(&a, Player::Eve).collect();
        assert_eq!(all.len(), 1);
        assert!(all[0].is_empty());
        assert_eq!(strategy_count(&a, Player::Eve), 1);
    }

    #[test]
    fn three_successors() {
        let mut a = Arena::with_owners(&[Owner::Eve, Owner::Adam, Owner::Adam, Owner::Adam]);
        for t in 1..4 {
            a.add_edge(VertexId(0), VertexId(t));
            a.add_edge(VertexId(t), VertexId(t));
        }
        assert_eq!(enumerate_strategies(&a, Player::Eve).count(), 3);
    }

    #[test]
    fn lexicographic_product() {
        let mut a = Arena::with_owners(&[Owner::Eve, Owner::Eve, Owner::Random]);
        a.add_edge(VertexId(0), VertexId(1));
        a.add_edge(VertexId(0), VertexId(2));
        a.add_edge(VertexId(1), VertexId(0));
        a.add_edge(VertexId(1), VertexId(1));
        a.add_edge(VertexId(1), VertexId(2));
        a.add_random_edge(VertexId(2), VertexId(2), crate::rational::int(1));
        let got: Vec<(usize, usize)> = enumerate_strategies(&a, Player::Eve)
            .map(|s| (s.get(VertexId(0)).unwrap().0, s.get(VertexId(1)).unwrap().0))
            .collect();
        assert_eq!(got, vec![(1, 0), (1, 1), (1, 2), (2, 0), (2, 1), (2, 2)]);
        assert_eq!(strategy_count(&a, Player::Eve), 6);
    }
}
