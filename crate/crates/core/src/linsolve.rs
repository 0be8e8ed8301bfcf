//! Exact dense Gaussian elimination over rationals.

use num_traits::{Signed, Zero};

use crate::rational::Rational;

/// Solves `a · x = b` exactly. Returns `None` if `a` is singular.
///
/// Partial pivoting picks the entry of largest magnitude in the column; with
/// exact arithmetic any nonzero pivot would do, but this keeps intermediate
/// fractions smaller in practice.
pub fn solve(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    debug_assert!(a.len() == n && a.iter().all(|r| r.len() == n));

    for col in 0..n {
        let pivot = (col..n)
            .filter(|&r| !a[r][col].is_zero())
            .max_by(|&r, &s| a[r][col].abs().cmp(&a[s][col].abs()).then(s.cmp(&r)))?;
        a.swap(col, pivot);
        b.swap(col, pivot);

        let inv = a[col][col].recip();
        for j in col..n {
            a[col][j] *= &inv;
        }
        b[col] *= &inv;

        let (top, rest) = a.split_at_mut(col + 1);
        let prow = &top[col];
        for (off, row) in rest.iter_mut().enumerate() {
            let factor = row[col].clone();
            if factor.is_zero() {
                continue;
            }
            for j in col..n {
                if !prow[j].is_zero() {
                    row[j] -= &factor * &prow[j];
                }
            }
            let r = col + 1 + off;
            let sub = &factor * &b[col];
            b[r] -= sub;
        }
    }

    let mut x = vec![Rational::zero(); n];
    for i in (0..n).rev() {
        let mut acc = b[i].clone();
        for j in i + 1..n {
            if !a[i][j].is_zero() {
                acc -= &a[i][j] * &x[j];
            }
        }
        x[i] = acc;
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    #[test]
    fn solves_small_system() {
        // 2x + y = 3, x - y = 0
        let a = vec![vec![int(2), int(1)], vec![int(1), int(-1)]];
        let x = solve(a, vec![int(3), int(0)]).unwrap();
        assert_eq!(x, vec![int(1), int(1)]);
    }

    #[test]
    fn needs_row_swap() {
        let a = vec![vec![int(0), int(1)], vec![frac(1, 3), int(0)]];
        let x = solve(a, vec![int(2), int(1)]).unwrap();
        assert_eq!(x, vec![int(3), int(2)]);
    }

    #[test]
    fn detects_singular() {
        let a = vec![vec![int(1), int(2)], vec![int(2), int(4)]];
        assert!(solve(a, vec![int(1), int(2)]).is_none());
    }

    #[test]
    fn empty_system() {
        assert_eq!(solve(vec![], vec![]), Some(vec![]));
    }
}
