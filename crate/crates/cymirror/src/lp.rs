//! Exact feasibility of `{x >= 0 : A x = b}` by a phase-one simplex with
//! Bland's rule, so it always terminates.

use crate::linalg::RatMatrix;
use crate::rational::Rational;
use num_traits::{Signed, Zero};

/// A nonnegative solution of `a x = b`, or `None` when none exists.
pub fn feasible(a: &RatMatrix, cols: usize, b: &[Rational]) -> Option<Vec<Rational>> {
    let m = a.len();
    let width = cols + m + 1;
    let rhs = cols + m;
    let mut t: Vec<Vec<Rational>> = Vec::with_capacity(m);
    for (i, row) in a.iter().enumerate() {
        let flip = b[i].is_negative();
        let mut r = vec![Rational::zero(); width];
        for j in 0..cols {
            r[j] = if flip { -row[j].clone() } else { row[j].clone() };
        }
        r[cols + i] = Rational::from_integer(1.into());
        r[rhs] = if flip { -b[i].clone() } else { b[i].clone() };
        t.push(r);
    }
    let mut basis: Vec<usize> = (cols..cols + m).collect();
    let mut cost = vec![Rational::zero(); width];
    for r in &t {
        for j in 0..cols {
            cost[j] -= &r[j];
        }
        cost[rhs] -= &r[rhs];
    }
    loop {
        let Some(enter) = (0..cols + m).find(|&j| cost[j].is_negative()) else {
            break;
        };
        let mut leave: Option<(usize, Rational)> = None;
        for i in 0..m {
            if t[i][enter].is_positive() {
                let ratio = &t[i][rhs] / &t[i][enter];
                let better = match &leave {
                    None => true,
                    Some((k, best)) => ratio < *best || (ratio == *best && basis[i] < basis[*k]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let (p, _) = leave.expect("phase one objective is bounded below");
        let inv = t[p][enter].recip();
        for x in t[p].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = t[p].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i != p && !row[enter].is_zero() {
                let f = row[enter].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
        let f = cost[enter].clone();
        for (x, y) in cost.iter_mut().zip(&pivot_row) {
            *x -= &f * y;
        }
        basis[p] = enter;
    }
    if !cost[rhs].is_zero() {
        return None;
    }
    let mut x = vec![Rational::zero(); cols];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < cols {
            x[bv] = t[i][rhs].clone();
        }
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{from_int_rows, mat_vec};
    use crate::rational::int;

    #[test]
    fn finds_nonnegative_point() {
        let a = from_int_rows(&[vec![1, 1, 0], vec![0, 1, 1]]);
        let b = [int(2), int(3)];
        let x = feasible(&a, 3, &b).unwrap();
        assert!(x.iter().all(|v| !v.is_negative()));
        assert_eq!(mat_vec(&a, &x), b.to_vec());
    }

    #[test]
    fn detects_infeasibility() {
        let a = from_int_rows(&[vec![1, 1]]);
        assert!(feasible(&a, 2, &[int(-1)]).is_none());
        let a = from_int_rows(&[vec![1, -1], vec![1, 1]]);
        assert!(feasible(&a, 2, &[int(3), int(1)]).is_none());
    }
}
