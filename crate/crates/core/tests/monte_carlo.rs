use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spg2ssg::rational::{frac, int, to_f64};
use spg2ssg::{reach_probability, MarkovChain};

/// Gambler chain where every rung also drops into a losing sink w.p. 1/2:
/// rungs 0, 1 move up w.p. 1/4 and back to 0 w.p. 1/4; rung 2 is the target.
fn leaky_gambler() -> MarkovChain {
    MarkovChain::from_rows(vec![
        vec![(0, frac(1, 4)), (1, frac(1, 4)), (3, frac(1, 2))],
        vec![(0, frac(1, 4)), (2, frac(1, 4)), (3, frac(1, 2))],
        vec![(2, int(1))],
        vec![(3, int(1))],
    ])
    .unwrap()
}

fn simulate(mc: &MarkovChain, start: usize, target: usize, sink: usize, rng: &mut ChaCha8Rng) -> bool {
    let mut s = start;
    loop {
        if s == target {
            return true;
        }
        if s == sink {
            return false;
        }
        let mut u: f64 = rng.gen();
        let row = mc.row(s);
        s = row.last().unwrap().0;
        for (t, p) in row {
            let p = to_f64(p);
            if u < p {
                s = *t;
                break;
            }
            u -= p;
        }
    }
}

#[test]
fn leaky_gambler_matches_sampling() {
    let mc = leaky_gambler();
    let x = reach_probability(&mc, &BTreeSet::from([2])).unwrap();
    assert_eq!(x[0], frac(1, 11));
    assert_eq!(x[1], frac(3, 11));

    let samples = 1_000_000;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let hits = (0..samples).filter(|_| simulate(&mc, 0, 2, 3, &mut rng)).count();
    let est = hits as f64 / samples as f64;
    let p = to_f64(&x[0]);
    let se = (p * (1.0 - p) / samples as f64).sqrt();
    assert!((est - p).abs() < 3.0 * se, "estimate {est} vs exact {p} (se {se})");
}
