use std::collections::BTreeSet;

use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use spg2ssg::arena::{induce_unchecked, validate_arena};
use spg2ssg::gen::{random_spg, random_ssg, small_distributions};
use spg2ssg::io::{parse, serialize};
use spg2ssg::rational::{format_exact, frac, parse_exact, to_f64, Rational};
use spg2ssg::reduction::{bar, hat};
use spg2ssg::solvers::{
    enumerate_strategies, oracle_table, strategy_iteration, value_iteration, ViOptions, DEFAULT_CAP,
};
use spg2ssg::{
    bsccs, classify_bsccs, delta_min, max_denominator, parity_value, reach_probability, reduce,
    AlphaSchedule, Game, MarkovChain, Objective, Owner, Player, VertexId,
};

fn rational() -> impl Strategy<Value = Rational> {
    (-50i64..50, 1i64..30).prop_map(|(n, d)| frac(n, d))
}

/// Random chains whose rows use 1 to 3 successors with denominators <= 3.
fn chain() -> impl Strategy<Value = MarkovChain> {
    (1usize..9).prop_flat_map(|n| {
        let row = (1usize..=n.min(3), any::<u64>()).prop_map(move |(k, seed)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let succ = rand::seq::index::sample(&mut rng, n, k).into_vec();
            let ds = small_distributions(k);
            let d = &ds[(seed as usize) % ds.len()];
            succ.into_iter().zip(d.iter().cloned()).collect::<Vec<_>>()
        });
        proptest::collection::vec(row, n).prop_map(|rows| MarkovChain::from_rows(rows).unwrap())
    })
}

fn spg() -> impl Strategy<Value = Game> {
    (2usize..5, any::<u64>()).prop_map(|(n, seed)| {
        random_spg(&mut ChaCha8Rng::seed_from_u64(seed), n, 3, 3)
    })
}

fn all_pairs(g: &Game) -> Vec<(spg2ssg::PureStrategy, spg2ssg::PureStrategy)> {
    let eve: Vec<_> = enumerate_strategies(&g.arena, Player::Eve).collect();
    let adam: Vec<_> = enumerate_strategies(&g.arena, Player::Adam).collect();
    eve.iter().flat_map(|s| adam.iter().map(move |a| (s.clone(), a.clone()))).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rational_laws(a in rational(), b in rational(), c in rational()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!((&a + &b) + &c, &a + (&b + &c));
        prop_assert_eq!((&a * &b) * &c, &a * (&b * &c));
        prop_assert_eq!(&a * (&b + &c), &a * &b + &a * &c);
        if a < b && b < c {
            prop_assert!(a < c);
        }
        prop_assert_eq!(a < b, to_f64(&a) < to_f64(&b));
        prop_assert_eq!(parse_exact(&format_exact(&a)).unwrap(), a);
    }

    #[test]
    fn induced_chains_are_valid_arenas(g in spg()) {
        for (s, a) in all_pairs(&g) {
            let mc = induce_unchecked(&g.arena, &s, &a);
            prop_assert!(mc.check().is_ok());
            prop_assert!(validate_arena(&mc.to_arena()).is_empty());
        }
    }

    #[test]
    fn delta_and_denominator_bounds(g in spg()) {
        let d = delta_min(&g.arena).unwrap();
        let m = max_denominator(&g.arena);
        for p in g.arena.random_probabilities() {
            prop_assert!(&d <= p);
            prop_assert!(&m >= p.denom());
        }
        prop_assert!(d >= Rational::new(1.into(), m));
    }

    #[test]
    fn reach_is_a_fixed_point(mc in chain(), t in any::<prop::sample::Index>()) {
        let target = BTreeSet::from([t.index(mc.num_states())]);
        let x = reach_probability(&mc, &target).unwrap();
        for s in 0..mc.num_states() {
            prop_assert!(x[s] >= Rational::zero() && x[s] <= Rational::one());
            if !target.contains(&s) {
                let step: Rational = mc.row(s).iter().map(|(u, p)| p * &x[*u]).sum();
                prop_assert_eq!(&step, &x[s]);
            }
        }
    }

    #[test]
    fn bsccs_absorb_all_mass(mc in chain()) {
        let d = bsccs(&mc);
        let all: BTreeSet<usize> = d.bsccs.iter().flatten().copied().collect();
        prop_assert_eq!(all.len(), d.bsccs.iter().map(Vec::len).sum::<usize>());
        for comp in &d.bsccs {
            for &s in comp {
                prop_assert!(mc.successors(s).all(|t| comp.contains(&t)));
            }
        }
        let x = reach_probability(&mc, &all).unwrap();
        prop_assert!(x.iter().all(One::is_one));
    }

    #[test]
    fn bsccs_invariant_under_relabelling(mc in chain(), seed in any::<u64>()) {
        let n = mc.num_states();
        let perm = rand::seq::index::sample(&mut ChaCha8Rng::seed_from_u64(seed), n, n).into_vec();
        let mapped: BTreeSet<Vec<usize>> = bsccs(&mc)
            .bsccs
            .iter()
            .map(|c| {
                let mut c: Vec<usize> = c.iter().map(|&s| perm[s]).collect();
                c.sort_unstable();
                c
            })
            .collect();
        let direct: BTreeSet<Vec<usize>> = bsccs(&mc.permuted(&perm)).bsccs.into_iter().collect();
        prop_assert_eq!(mapped, direct);
    }

    #[test]
    fn parity_complement(mc in chain(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = spg2ssg::gen::random_priorities(&mut rng, mc.num_states(), 4);
        let even = parity_value(&mc, &p);
        let odd = parity_value(&mc, &p.shifted(1));
        for (a, b) in even.iter().zip(&odd) {
            prop_assert_eq!(a + b, Rational::one());
        }
        let d = classify_bsccs(&bsccs(&mc), &p);
        prop_assert_eq!(d.even_states().len() + d.odd_states().len(),
            d.bsccs.iter().map(Vec::len).sum::<usize>());
    }

    #[test]
    fn reduction_structure(g in spg(), first in 1i64..8) {
        let Objective::Parity(p) = &g.objective else { unreachable!() };
        let alpha = AlphaSchedule::geometric(frac(1, first + 1), frac(1, 2));
        let red = reduce(&g.arena, p, &alpha).unwrap();
        let a = red.arena();
        let n = g.arena.num_vertices();
        prop_assert_eq!(a.num_vertices(), 2 * n + 2);
        prop_assert_eq!(a.num_edges(), g.arena.num_edges() + 2 * n + 2);
        prop_assert!(red.ssg.validate().is_empty());
        for v in g.arena.vertex_ids() {
            prop_assert_eq!(a.owner(bar(v)), g.arena.owner(v));
            prop_assert_eq!(a.owner(hat(v)), Owner::Random);
            let sink = if p.get(v) % 2 == 0 { red.v_win } else { red.v_lose };
            prop_assert_eq!(a.prob(hat(v), sink), alpha.get(p.get(v)).unwrap());
            let targets: Vec<VertexId> = a.successors(bar(v)).collect();
            let expected: Vec<VertexId> = g.arena.successors(v).map(hat).collect();
            prop_assert_eq!(targets, expected);
        }
        for (s, _) in all_pairs(&g) {
            prop_assert_eq!(red.project_strategy(&red.lift_strategy(&s)), s);
        }
    }

    #[test]
    fn serialization_round_trip(g in spg()) {
        prop_assert_eq!(parse(&serialize(&g, false)).unwrap(), g);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn iteration_solvers_agree_with_oracle(n in 2usize..6, seed in any::<u64>()) {
        let g = random_ssg(&mut ChaCha8Rng::seed_from_u64(seed), n, 3);
        let oracle = oracle_table(&g, DEFAULT_CAP).unwrap().sup_inf;
        let si = strategy_iteration(&g).unwrap();
        prop_assert_eq!(si.values.exact().unwrap(), &oracle[..]);
        let vi = value_iteration(&g, ViOptions { tolerance: 1e-14, max_iters: 1_000_000 }).unwrap();
        for (a, b) in vi.values.to_f64().iter().zip(&oracle) {
            prop_assert!((a - to_f64(b)).abs() < 1e-9);
        }
    }
}
