//! Dense linear algebra over the rationals for the small systems that
//! polytope, fan and lattice computations produce.

use crate::rational::{primitive_integer, Rational};
use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Row-major rational matrix.
pub type RatMatrix = Vec<Vec<Rational>>;

/// Converts integer rows to rationals.
pub fn from_int_rows(rows: &[Vec<i64>]) -> RatMatrix {
    rows.iter()
        .map(|r| r.iter().map(|&x| Rational::from_integer(BigInt::from(x))).collect())
        .collect()
}

pub fn from_bigint_rows(rows: &[Vec<BigInt>]) -> RatMatrix {
    rows.iter()
        .map(|r| r.iter().map(|x| Rational::from_integer(x.clone())).collect())
        .collect()
}

pub fn transpose(m: &RatMatrix, cols: usize) -> RatMatrix {
    (0..cols).map(|j| m.iter().map(|r| r[j].clone()).collect()).collect()
}

/// Reduced row echelon form and the list of pivot columns.
pub fn rref(m: &RatMatrix, cols: usize) -> (RatMatrix, Vec<usize>) {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row >= a.len() {
            break;
        }
        let Some(p) = (row..a.len()).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(row, p);
        let inv = a[row][col].recip();
        for x in a[row].iter_mut() {
            *x *= &inv;
        }
        for i in 0..a.len() {
            if i != row && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                let pivot_row = a[row].clone();
                for (x, y) in a[i].iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    (a, pivots)
}

pub fn rank(m: &RatMatrix, cols: usize) -> usize {
    rref(m, cols).1.len()
}

/// Basis of `{x : m x = 0}`.
pub fn nullspace(m: &RatMatrix, cols: usize) -> Vec<Vec<Rational>> {
    let (r, pivots) = rref(m, cols);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); cols];
            v[f] = Rational::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -r[i][f].clone();
            }
            v
        })
        .collect()
}

/// Primitive integer vectors spanning the rational nullspace.
pub fn integer_nullspace(m: &RatMatrix, cols: usize) -> Vec<Vec<BigInt>> {
    nullspace(m, cols)
        .iter()
        .map(|v| primitive_integer(v).expect("nullspace vectors are nonzero"))
        .collect()
}

/// Some solution of `m x = b`, if one exists.
pub fn solve(m: &RatMatrix, cols: usize, b: &[Rational]) -> Option<Vec<Rational>> {
    let aug: RatMatrix = m
        .iter()
        .zip(b)
        .map(|(r, bi)| {
            let mut r = r.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let (r, pivots) = rref(&aug, cols + 1);
    if pivots.contains(&cols) {
        return None;
    }
    let mut x = vec![Rational::zero(); cols];
    for (i, &p) in pivots.iter().enumerate() {
        x[p] = r[i][cols].clone();
    }
    Some(x)
}

/// Determinant of a square matrix by elimination.
pub fn det(m: &RatMatrix) -> Rational {
    let n = m.len();
    let mut a = m.clone();
    let mut d = Rational::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&i| !a[i][col].is_zero()) else {
            return Rational::zero();
        };
        if p != col {
            a.swap(p, col);
            d = -d;
        }
        d *= &a[col][col];
        let inv = a[col][col].recip();
        for i in col + 1..n {
            if a[i][col].is_zero() {
                continue;
            }
            let f = &a[i][col] * &inv;
            let pivot_row = a[col].clone();
            for (x, y) in a[i].iter_mut().zip(&pivot_row) {
                *x -= &f * y;
            }
        }
    }
    d
}

/// Inverse of a square matrix, if invertible.
pub fn inverse(m: &RatMatrix) -> Option<RatMatrix> {
    let n = m.len();
    let aug: RatMatrix = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut r = r.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    let (r, pivots) = rref(&aug, 2 * n);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(r.into_iter().map(|row| row[n..].to_vec()).collect())
}

pub fn mat_vec(m: &RatMatrix, v: &[Rational]) -> Vec<Rational> {
    m.iter()
        .map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn nullspace_of_row() {
        let m = from_int_rows(&[vec![1, 1, 1]]);
        let ns = nullspace(&m, 3);
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!(mat_vec(&m, &v).iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn determinant_and_inverse() {
        let m = from_int_rows(&[vec![2, 1], vec![1, 1]]);
        assert_eq!(det(&m), int(1));
        let inv = inverse(&m).unwrap();
        assert_eq!(inv, from_int_rows(&[vec![1, -1], vec![-1, 2]]));
        let singular = from_int_rows(&[vec![1, 2], vec![2, 4]]);
        assert!(inverse(&singular).is_none());
        assert_eq!(det(&singular), int(0));
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let m = from_int_rows(&[vec![2, 0], vec![0, 4]]);
        assert_eq!(solve(&m, 2, &[int(1), int(1)]).unwrap(), vec![rat(1, 2), rat(1, 4)]);
        let m = from_int_rows(&[vec![1, 1], vec![1, 1]]);
        assert!(solve(&m, 2, &[int(1), int(2)]).is_none());
    }
}
