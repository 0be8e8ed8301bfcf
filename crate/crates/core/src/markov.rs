//! Finite Markov chains: bottom SCCs, exact reachability and parity values.

use std::collections::{BTreeSet, VecDeque};

use num_traits::{One, Signed, Zero};

use crate::arena::{Arena, Owner, PriorityFn, VertexId};
use crate::linsolve;
use crate::rational::{format_exact, Rational};

/// Row-stochastic chain with sparse rows sorted by target state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkovChain {
    rows: Vec<Vec<(usize, Rational)>>,
    pub initial: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MarkovError {
    #[error("row {state} sums to {sum}, expected 1")]
    RowSum { state: usize, sum: String },
    #[error("entry ({from}, {to}) = {prob} is outside [0,1]")]
    EntryOutOfRange { from: usize, to: usize, prob: String },
    #[error("entry ({from}, {to}) points outside the chain")]
    Dangling { from: usize, to: usize },
    #[error("singular linear system while solving reachability (this is a bug)")]
    SingularSystem,
}

impl MarkovChain {
    /// Builds a chain, merging duplicate entries and dropping zeros, then
    /// checks row-stochasticity.
    pub fn from_rows(rows: Vec<Vec<(usize, Rational)>>) -> Result<Self, MarkovError> {
        let mc = Self::from_rows_unchecked(rows);
        mc.check()?;
        Ok(mc)
    }

    pub fn from_rows_unchecked(rows: Vec<Vec<(usize, Rational)>>) -> Self {
        let rows = rows
            .into_iter()
            .map(|mut row| {
                row.sort_by_key(|(t, _)| *t);
                let mut merged: Vec<(usize, Rational)> = Vec::with_capacity(row.len());
                for (t, p) in row {
                    match merged.last_mut() {
                        Some((lt, lp)) if *lt == t => *lp += p,
                        _ => merged.push((t, p)),
                    }
                }
                merged.retain(|(_, p)| !p.is_zero());
                merged
            })
            .collect();
        MarkovChain { rows, initial: None }
    }

    pub fn check(&self) -> Result<(), MarkovError> {
        let n = self.rows.len();
        for (s, row) in self.rows.iter().enumerate() {
            let mut sum = Rational::zero();
            for (t, p) in row {
                if *t >= n {
                    return Err(MarkovError::Dangling { from: s, to: *t });
                }
                if p.is_negative() || *p > Rational::one() {
                    return Err(MarkovError::EntryOutOfRange {
                        from: s,
                        to: *t,
                        prob: format_exact(p),
                    });
                }
                sum += p;
            }
            if !sum.is_one() {
                return Err(MarkovError::RowSum { state: s, sum: format_exact(&sum) });
            }
        }
        Ok(())
    }

    pub fn num_states(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, s: usize) -> &[(usize, Rational)] {
        &self.rows[s]
    }

    pub fn rows(&self) -> &[Vec<(usize, Rational)>] {
        &self.rows
    }

    pub fn prob(&self, from: usize, to: usize) -> Rational {
        self.rows[from]
            .iter()
            .find(|(t, _)| *t == to)
            .map(|(_, p)| p.clone())
            .unwrap_or_else(Rational::zero)
    }

    pub fn successors(&self, s: usize) -> impl Iterator<Item = usize> + '_ {
        self.rows[s].iter().map(|(t, _)| *t)
    }

    /// The chain as an arena with only random vertices.
    pub fn to_arena(&self) -> Arena {
        let mut a = Arena::with_owners(&vec![Owner::Random; self.num_states()]);
        for (s, row) in self.rows.iter().enumerate() {
            for (t, p) in row {
                a.add_random_edge(VertexId(s), VertexId(*t), p.clone());
            }
        }
        a
    }

    /// Relabels states: state `s` becomes `perm[s]`.
    pub fn permuted(&self, perm: &[usize]) -> MarkovChain {
        let mut rows = vec![Vec::new(); self.num_states()];
        for (s, row) in self.rows.iter().enumerate() {
            rows[perm[s]] = row.iter().map(|(t, p)| (perm[*t], p.clone())).collect();
        }
        let mut mc = MarkovChain::from_rows_unchecked(rows);
        mc.initial = self.initial.map(|i| perm[i]);
        mc
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParityClass {
    Even,
    Odd,
    Unclassified,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BsccDecomposition {
    /// Each BSCC sorted ascending; the list sorted by smallest member.
    pub bsccs: Vec<Vec<usize>>,
    pub classes: Vec<ParityClass>,
}

impl BsccDecomposition {
    pub fn even_states(&self) -> BTreeSet<usize> {
        self.states_of(ParityClass::Even)
    }

    pub fn odd_states(&self) -> BTreeSet<usize> {
        self.states_of(ParityClass::Odd)
    }

    fn states_of(&self, class: ParityClass) -> BTreeSet<usize> {
        self.bsccs
            .iter()
            .zip(&self.classes)
            .filter(|(_, c)| **c == class)
            .flat_map(|(b, _)| b.iter().copied())
            .collect()
    }
}

/// Strongly connected components of a graph given as successor lists,
/// computed by an iterative Tarjan so deep chains cannot overflow the stack.
pub fn tarjan_scc(succ: &[Vec<usize>]) -> Vec<Vec<usize>> {
    const UNVISITED: usize = usize::MAX;
    let n = succ.len();
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut components = Vec::new();
    let mut next_index = 0;
    // (vertex, position in its successor list)
    let mut call: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != UNVISITED {
            continue;
        }
        call.push((root, 0));
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if let Some(&w) = succ[v].get(*pos) {
                *pos += 1;
                if index[w] == UNVISITED {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                components.push(comp);
            }
        }
    }
    components
}

pub fn bsccs(mc: &MarkovChain) -> BsccDecomposition {
    let n = mc.num_states();
    let succ: Vec<Vec<usize>> = (0..n).map(|s| mc.successors(s).collect()).collect();
    let comps = tarjan_scc(&succ);
    let mut comp_of = vec![0usize; n];
    for (i, c) in comps.iter().enumerate() {
        for &s in c {
            comp_of[s] = i;
        }
    }
    let mut bottom: Vec<Vec<usize>> = comps
        .into_iter()
        .enumerate()
        .filter(|(i, c)| c.iter().all(|&s| succ[s].iter().all(|&t| comp_of[t] == *i)))
        .map(|(_, mut c)| {
            c.sort_unstable();
            c
        })
        .collect();
    bottom.sort_unstable_by_key(|c| c[0]);
    let classes = vec![ParityClass::Unclassified; bottom.len()];
    BsccDecomposition { bsccs: bottom, classes }
}

pub fn classify_bsccs(decomp: &BsccDecomposition, p: &PriorityFn) -> BsccDecomposition {
    let classes = decomp
        .bsccs
        .iter()
        .map(|b| {
            let min = b.iter().map(|&s| p.get(VertexId(s))).min().expect("BSCC is never empty");
            if min % 2 == 0 {
                ParityClass::Even
            } else {
                ParityClass::Odd
            }
        })
        .collect();
    BsccDecomposition { bsccs: decomp.bsccs.clone(), classes }
}

/// States that can reach `target` with positive probability.
pub fn pre_star(mc: &MarkovChain, target: &BTreeSet<usize>) -> Vec<bool> {
    let n = mc.num_states();
    let mut preds = vec![Vec::new(); n];
    for s in 0..n {
        for t in mc.successors(s) {
            preds[t].push(s);
        }
    }
    let mut seen = vec![false; n];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for &t in target {
        if !seen[t] {
            seen[t] = true;
            queue.push_back(t);
        }
    }
    while let Some(t) = queue.pop_front() {
        for &s in &preds[t] {
            if !seen[s] {
                seen[s] = true;
                queue.push_back(s);
            }
        }
    }
    seen
}

/// Exact probability of eventually reaching `target` from every state.
///
/// An empty target yields the zero vector.
pub fn reach_probability(
    mc: &MarkovChain,
    target: &BTreeSet<usize>,
) -> Result<Vec<Rational>, MarkovError> {
    let n = mc.num_states();
    let mut x = vec![Rational::zero(); n];
    if target.is_empty() {
        return Ok(x);
    }
    let can_reach = pre_star(mc, target);
    let unknowns: Vec<usize> =
        (0..n).filter(|s| can_reach[*s] && !target.contains(s)).collect();
    let mut col = vec![usize::MAX; n];
    for (i, &s) in unknowns.iter().enumerate() {
        col[s] = i;
    }

    // (I - A) x = b on the unknowns
    let k = unknowns.len();
    let mut a = vec![vec![Rational::zero(); k]; k];
    let mut b = vec![Rational::zero(); k];
    for (i, &s) in unknowns.iter().enumerate() {
        a[i][i] = Rational::one();
        for (t, p) in mc.row(s) {
            if target.contains(t) {
                b[i] += p;
            } else if col[*t] != usize::MAX {
                a[i][col[*t]] -= p;
            }
        }
    }
    let sol = linsolve::solve(a, b).ok_or(MarkovError::SingularSystem)?;
    for &t in target {
        x[t] = Rational::one();
    }
    for (i, &s) in unknowns.iter().enumerate() {
        x[s] = sol[i].clone();
    }
    Ok(x)
}

/// Probability of satisfying the parity condition: reaching an even BSCC.
pub fn parity_value(mc: &MarkovChain, p: &PriorityFn) -> Vec<Rational> {
    let decomp = classify_bsccs(&bsccs(mc), p);
    reach_probability(mc, &decomp.even_states()).expect("reachability system is non-singular")
}

/// Probability of reaching any pBSCC vertex in a gadget-induced chain.
pub fn crosspath_probability(mc: &MarkovChain, pbscc_vertices: &BTreeSet<usize>) -> Vec<Rational> {
    reach_probability(mc, pbscc_vertices).expect("reachability system is non-singular")
}

/// Minimum and maximum, over the vertices of one pBSCC, of the probability of
/// reaching `win_sink`.
pub fn win_in_pbscc(
    mc: &MarkovChain,
    pbscc: &BTreeSet<usize>,
    win_sink: usize,
) -> (Rational, Rational) {
    let x = reach_probability(mc, &BTreeSet::from([win_sink]))
        .expect("reachability system is non-singular");
    let vals = pbscc.iter().map(|&v| &x[v]);
    let min = vals.clone().min().expect("pBSCC is never empty").clone();
    let max = vals.max().expect("pBSCC is never empty").clone();
    (min, max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn chain(rows: Vec<Vec<(usize, Rational)>>) -> MarkovChain {
        MarkovChain::from_rows(rows).unwrap()
    }

    pub(crate) fn fig2() -> MarkovChain {
        chain(vec![
            vec![(0, frac(9, 10)), (1, frac(1, 10))],
            vec![(0, frac(9, 10)), (2, frac(1, 10))],
            vec![(0, frac(9, 10)), (4, frac(1, 10))],
            vec![(5, int(1))],
            vec![(5, int(1))],
            vec![(3, frac(1, 2)), (4, frac(1, 2))],
        ])
    }

    #[test]
    fn fig2_has_one_odd_bscc() {
        let mc = fig2();
        let d = bsccs(&mc);
        assert_eq!(d.bsccs, vec![vec![3, 4, 5]]);
        let c = classify_bsccs(&d, &PriorityFn::new(vec![0, 0, 0, 3, 4, 5]));
        assert_eq!(c.classes, vec![ParityClass::Odd]);
        let x = reach_probability(&mc, &BTreeSet::from([3, 4, 5])).unwrap();
        assert_eq!(x[0], int(1));
        let v = parity_value(&mc, &PriorityFn::new(vec![0, 0, 0, 3, 4, 5]));
        assert!(v.iter().all(Zero::is_zero));
    }

    #[test]
    fn absorbing_pair_and_cycle_into_sink() {
        let d = bsccs(&chain(vec![vec![(0, int(1))], vec![(1, int(1))]]));
        assert_eq!(d.bsccs, vec![vec![0], vec![1]]);

        let mc = chain(vec![
            vec![(1, int(1))],
            vec![(2, int(1))],
            vec![(0, frac(1, 2)), (3, frac(1, 2))],
            vec![(3, int(1))],
        ]);
        assert_eq!(bsccs(&mc).bsccs, vec![vec![3]]);
    }

    #[test]
    fn classification_examples() {
        let d = BsccDecomposition {
            bsccs: vec![vec![0], vec![1, 2]],
            classes: vec![ParityClass::Unclassified; 2],
        };
        let c = classify_bsccs(&d, &PriorityFn::new(vec![0, 2, 7]));
        assert_eq!(c.classes, vec![ParityClass::Even, ParityClass::Even]);
    }

    #[test]
    fn one_step_absorption() {
        let mc = chain(vec![
            vec![(1, frac(1, 3)), (2, frac(2, 3))],
            vec![(1, int(1))],
            vec![(2, int(1))],
        ]);
        let x = reach_probability(&mc, &BTreeSet::from([1])).unwrap();
        assert_eq!(x, vec![frac(1, 3), int(1), int(0)]);
    }

    #[test]
    fn gambler_chain_reaches_top() {
        let mc = chain(vec![
            vec![(0, frac(1, 2)), (1, frac(1, 2))],
            vec![(0, frac(1, 2)), (2, frac(1, 2))],
            vec![(2, int(1))],
        ]);
        assert_eq!(bsccs(&mc).bsccs, vec![vec![2]]);
        let x = reach_probability(&mc, &BTreeSet::from([2])).unwrap();
        assert_eq!(x, vec![int(1), int(1), int(1)]);
    }

    #[test]
    fn even_and_odd_sinks_half_each() {
        let mc = chain(vec![
            vec![(1, frac(1, 2)), (2, frac(1, 2))],
            vec![(1, int(1))],
            vec![(2, int(1))],
        ]);
        let v = parity_value(&mc, &PriorityFn::new(vec![1, 0, 1]));
        assert_eq!(v, vec![frac(1, 2), int(1), int(0)]);
    }

    #[test]
    fn crosspath_through_single_hat() {
        // 0 -> hat 1; hat -> pBSCC 2 w.p. 1-a, sink 3 w.p. a
        let a = frac(1, 8);
        let mc = chain(vec![
            vec![(1, int(1))],
            vec![(2, int(1) - &a), (3, a.clone())],
            vec![(2, int(1))],
            vec![(3, int(1))],
        ]);
        let x = crosspath_probability(&mc, &BTreeSet::from([2]));
        assert_eq!(x[0], frac(7, 8));
        assert_eq!(x[2], int(1));
    }

    #[test]
    fn symmetric_pbscc_splits_evenly() {
        // bars 0,2; hats 1,3; win 4, lose 5
        let a = frac(1, 4);
        let sym = chain(vec![
            vec![(1, frac(1, 2)), (3, frac(1, 2))],
            vec![(0, int(1) - &a), (4, a.clone())],
            vec![(1, frac(1, 2)), (3, frac(1, 2))],
            vec![(2, int(1) - &a), (5, a.clone())],
            vec![(4, int(1))],
            vec![(5, int(1))],
        ]);
        let (lo, hi) = win_in_pbscc(&sym, &BTreeSet::from([0, 2]), 4);
        assert_eq!((lo, hi), (frac(1, 2), frac(1, 2)));
    }

    #[test]
    fn only_winning_sink_gives_one() {
        let a = frac(1, 3);
        let mc = chain(vec![
            vec![(1, int(1))],
            vec![(0, int(1) - &a), (2, a.clone())],
            vec![(2, int(1))],
        ]);
        assert_eq!(win_in_pbscc(&mc, &BTreeSet::from([0, 1]), 2), (int(1), int(1)));
    }

    #[test]
    fn deep_chain_is_stack_safe() {
        let n = 100_000;
        let rows = (0..n)
            .map(|i| vec![((i + 1).min(n - 1), int(1))])
            .collect();
        let d = bsccs(&MarkovChain::from_rows_unchecked(rows));
        assert_eq!(d.bsccs, vec![vec![n - 1]]);

        let cyc = (0..n).map(|i| vec![((i + 1) % n, int(1))]).collect();
        let d = bsccs(&MarkovChain::from_rows_unchecked(cyc));
        assert_eq!(d.bsccs.len(), 1);
        assert_eq!(d.bsccs[0].len(), n);
    }

    #[test]
    fn rejects_bad_rows() {
        assert!(matches!(
            MarkovChain::from_rows(vec![vec![(0, frac(1, 2))]]),
            Err(MarkovError::RowSum { .. })
        ));
        assert!(matches!(
            MarkovChain::from_rows(vec![vec![(1, int(1))]]),
            Err(MarkovError::Dangling { .. })
        ));
    }
}
