//! Integer linear algebra: Smith normal form, saturated kernels, lattice
//! indices and sublattice or dual-lattice comparisons.

use crate::linalg::{self, RatMatrix};
use crate::rational::{common_denominator, gcd_all, Rational};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("lattice is not contained in the reference lattice")]
    NotSublattice,
    #[error("ranks differ ({0} vs {1}), so the index is infinite")]
    RankMismatch(usize, usize),
    #[error("basis vectors are linearly dependent")]
    DependentBasis,
    #[error("zero vector has no primitive generator")]
    ZeroVector,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// Rectangular matrix of arbitrary-precision integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, entries: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    /// Builds from rows; every row must have length `cols`.
    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Result<Self, LatticeError> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(LatticeError::DimensionMismatch("ragged rows".into()));
        }
        let entries = rows.iter().flat_map(|r| r.iter().cloned().map(Into::into)).collect();
        Ok(IntMatrix { rows: rows.len(), cols, entries })
    }

    /// Builds from columns; every column must have length `rows`.
    pub fn from_columns<T: Into<BigInt> + Clone>(
        rows: usize,
        columns: &[Vec<T>],
    ) -> Result<Self, LatticeError> {
        if columns.iter().any(|c| c.len() != rows) {
            return Err(LatticeError::DimensionMismatch("ragged columns".into()));
        }
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            for (i, x) in c.iter().enumerate() {
                m.set(i, j, x.clone().into());
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<BigInt> {
        self.entries[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn row_vecs(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn column_vecs(&self) -> Vec<Vec<BigInt>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix, LatticeError> {
        if self.cols != other.rows {
            return Err(LatticeError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut m = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let s: BigInt = (0..self.cols).map(|k| self.get(i, k) * other.get(k, j)).sum();
                m.set(i, j, s);
            }
        }
        Ok(m)
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|k| self.get(i, k) * &v[k]).sum())
            .collect()
    }

    pub fn to_rational(&self) -> RatMatrix {
        linalg::from_bigint_rows(&self.row_vecs())
    }

    pub fn rank(&self) -> usize {
        linalg::rank(&self.to_rational(), self.cols)
    }

    /// Determinant of a square matrix.
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant needs a square matrix");
        linalg::det(&self.to_rational()).to_integer()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.entries.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.entries.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// `row[dst] += f * row[src]`.
    fn add_row(&mut self, dst: usize, src: usize, f: &BigInt) {
        for j in 0..self.cols {
            let v = self.get(src, j) * f;
            self.entries[dst * self.cols + j] += v;
        }
    }

    /// `col[dst] += f * col[src]`.
    fn add_col(&mut self, dst: usize, src: usize, f: &BigInt) {
        for i in 0..self.rows {
            let v = self.get(i, src) * f;
            self.entries[i * self.cols + dst] += v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self.get(i, j).clone();
            self.set(i, j, v);
        }
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = self
            .row_vecs()
            .iter()
            .map(|r| r.iter().map(ToString::to_string).collect())
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows: Vec<Vec<String>> = Vec::deserialize(d)?;
        let parsed: Result<Vec<Vec<BigInt>>, _> = rows
            .iter()
            .map(|r| r.iter().map(|x| x.parse::<BigInt>()).collect())
            .collect();
        let parsed = parsed.map_err(serde::de::Error::custom)?;
        IntMatrix::from_rows(&parsed).map_err(serde::de::Error::custom)
    }
}

/// Smith normal form `(U, D, V)` with `U·A·V = D`.
pub fn smith_normal_form(a: &IntMatrix) -> (IntMatrix, IntMatrix, IntMatrix) {
    let (m, n) = (a.rows, a.cols);
    let mut d = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);
    for t in 0..m.min(n) {
        let Some((pi, pj)) = min_nonzero(&d, (t..m).flat_map(|i| (t..n).map(move |j| (i, j))))
        else {
            break;
        };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);
        loop {
            let mut clean = true;
            for i in t + 1..m {
                if !d.get(i, t).is_zero() {
                    let q = -(d.get(i, t) / d.get(t, t));
                    d.add_row(i, t, &q);
                    u.add_row(i, t, &q);
                    clean &= d.get(i, t).is_zero();
                }
            }
            for j in t + 1..n {
                if !d.get(t, j).is_zero() {
                    let q = -(d.get(t, j) / d.get(t, t));
                    d.add_col(j, t, &q);
                    v.add_col(j, t, &q);
                    clean &= d.get(t, j).is_zero();
                }
            }
            if !clean {
                let cells = (t..m).map(|i| (i, t)).chain((t + 1..n).map(|j| (t, j)));
                let (pi, pj) = min_nonzero(&d, cells).expect("pivot is nonzero");
                d.swap_rows(t, pi);
                u.swap_rows(t, pi);
                d.swap_cols(t, pj);
                v.swap_cols(t, pj);
                continue;
            }
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !d.get(i, j).is_multiple_of(d.get(t, t))));
            match bad {
                Some(i) => {
                    d.add_row(t, i, &BigInt::one());
                    u.add_row(t, i, &BigInt::one());
                }
                None => break,
            }
        }
        if d.get(t, t).is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    (u, d, v)
}

fn min_nonzero(
    d: &IntMatrix,
    cells: impl Iterator<Item = (usize, usize)>,
) -> Option<(usize, usize)> {
    cells
        .filter(|&(i, j)| !d.get(i, j).is_zero())
        .min_by(|&(a, b), &(c, e)| d.get(a, b).abs().cmp(&d.get(c, e).abs()))
}

/// Nonzero diagonal entries of the Smith form.
pub fn invariant_factors(a: &IntMatrix) -> Vec<BigInt> {
    let (_, d, _) = smith_normal_form(a);
    (0..d.rows.min(d.cols))
        .map(|i| d.get(i, i).clone())
        .filter(|x| !x.is_zero())
        .collect()
}

/// Row-style Hermite normal form of the lattice spanned by `rows`, with
/// zero rows dropped.
pub fn hermite_rows(rows: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let Some(n) = rows.first().map(Vec::len) else {
        return Vec::new();
    };
    let mut a: Vec<Vec<BigInt>> = rows.to_vec();
    let mut r = 0;
    for col in 0..n {
        loop {
            let nz: Vec<usize> = (r..a.len()).filter(|&i| !a[i][col].is_zero()).collect();
            if nz.is_empty() {
                break;
            }
            let p = *nz.iter().min_by_key(|&&i| a[i][col].abs()).expect("nonempty");
            a.swap(r, p);
            let mut done = true;
            for i in r + 1..a.len() {
                if !a[i][col].is_zero() {
                    let q = &a[i][col] / &a[r][col];
                    let pivot = a[r].clone();
                    for (x, y) in a[i].iter_mut().zip(&pivot) {
                        *x -= &q * y;
                    }
                    done &= a[i][col].is_zero();
                }
            }
            if done {
                break;
            }
        }
        if r < a.len() && !a[r][col].is_zero() {
            if a[r][col].is_negative() {
                for x in a[r].iter_mut() {
                    *x = -x.clone();
                }
            }
            for i in 0..r {
                let q = a[i][col].div_floor(&a[r][col]);
                if !q.is_zero() {
                    let pivot = a[r].clone();
                    for (x, y) in a[i].iter_mut().zip(&pivot) {
                        *x -= &q * y;
                    }
                }
            }
            r += 1;
        }
    }
    a.truncate(r);
    a
}

/// Saturated kernel of `a`; the columns of the result are a ℤ-basis in
/// Hermite normal form.
pub fn kernel_basis(a: &IntMatrix) -> IntMatrix {
    let (_, d, v) = smith_normal_form(a);
    let r = (0..d.rows.min(d.cols)).filter(|&i| !d.get(i, i).is_zero()).count();
    let vecs: Vec<Vec<BigInt>> = (r..a.cols).map(|j| v.column(j)).collect();
    let canon = hermite_rows(&vecs);
    IntMatrix::from_columns(a.cols, &canon).expect("columns share the ambient rank")
}

/// Whether the entries of a nonzero vector are coprime.
pub fn is_primitive(v: &[BigInt]) -> Result<bool, LatticeError> {
    let g = gcd_all(v);
    if g.is_zero() {
        return Err(LatticeError::ZeroVector);
    }
    Ok(g.is_one())
}

/// Convenience wrapper taking machine integers.
pub fn is_primitive_i64(v: &[i64]) -> Result<bool, LatticeError> {
    is_primitive(&v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>())
}

/// Sublattice of ℤⁿ generated by linearly independent columns.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sublattice {
    basis: IntMatrix,
}

impl Sublattice {
    pub fn new(basis: IntMatrix) -> Result<Self, LatticeError> {
        if basis.rank() != basis.cols {
            return Err(LatticeError::DependentBasis);
        }
        Ok(Sublattice { basis })
    }

    pub fn from_columns(ambient: usize, columns: &[Vec<i64>]) -> Result<Self, LatticeError> {
        Self::new(IntMatrix::from_columns(ambient, columns)?)
    }

    /// The lattice spanned by arbitrary generators, dependent or not.
    pub fn spanned_by(ambient: usize, generators: &[Vec<BigInt>]) -> Result<Self, LatticeError> {
        if generators.iter().any(|g| g.len() != ambient) {
            return Err(LatticeError::DimensionMismatch("generator length".into()));
        }
        let rows = hermite_rows(generators);
        Self::new(IntMatrix::from_columns(ambient, &rows)?)
    }

    pub fn full(n: usize) -> Self {
        Sublattice { basis: IntMatrix::identity(n) }
    }

    /// `k·ℤⁿ`.
    pub fn scaled_full(n: usize, k: i64) -> Self {
        let mut b = IntMatrix::zeros(n, n);
        for i in 0..n {
            b.set(i, i, BigInt::from(k));
        }
        Sublattice::new(b).expect("k is nonzero")
    }

    pub fn ambient_rank(&self) -> usize {
        self.basis.rows
    }

    pub fn rank(&self) -> usize {
        self.basis.cols
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    /// Coordinates of a rational vector in this basis, if it lies in the
    /// rational span.
    pub fn rational_coordinates(&self, v: &[Rational]) -> Option<Vec<Rational>> {
        linalg::solve(&self.basis.to_rational(), self.rank(), v)
    }

    /// Integer coordinates of `v`, if `v` lies in the lattice.
    pub fn coordinates(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        let rv: Vec<Rational> = v.iter().cloned().map(Rational::from_integer).collect();
        let c = self.rational_coordinates(&rv)?;
        c.iter().all(Rational::is_integer).then(|| c.iter().map(Rational::to_integer).collect())
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        v.len() == self.ambient_rank() && self.coordinates(v).is_some()
    }

    pub fn contains_lattice(&self, other: &Sublattice) -> bool {
        other.basis.column_vecs().iter().all(|c| self.contains(c))
    }

    /// Equality as sets.
    pub fn same_lattice(&self, other: &Sublattice) -> bool {
        self.rank() == other.rank() && self.contains_lattice(other) && other.contains_lattice(self)
    }
}

/// `[sup : sub]`, the absolute determinant of the change of basis.
pub fn lattice_index(sub: &Sublattice, sup: &Sublattice) -> Result<BigInt, LatticeError> {
    if sub.ambient_rank() != sup.ambient_rank() {
        return Err(LatticeError::DimensionMismatch("ambient ranks differ".into()));
    }
    if sub.rank() != sup.rank() {
        return Err(LatticeError::RankMismatch(sub.rank(), sup.rank()));
    }
    let cols: Option<Vec<Vec<BigInt>>> =
        sub.basis.column_vecs().iter().map(|c| sup.coordinates(c)).collect();
    let cols = cols.ok_or(LatticeError::NotSublattice)?;
    let change = IntMatrix::from_columns(sup.rank(), &cols)?;
    Ok(change.det().abs())
}

/// A lattice `(1/denom)·L` in the ambient rational space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatLattice {
    denom: BigInt,
    lattice: Sublattice,
}

impl RatLattice {
    pub fn integral(lattice: Sublattice) -> Self {
        RatLattice { denom: BigInt::one(), lattice }
    }

    /// The lattice spanned by rational generators.
    pub fn spanned_by(ambient: usize, generators: &[Vec<Rational>]) -> Result<Self, LatticeError> {
        let all: Vec<Rational> = generators.iter().flatten().cloned().collect();
        let denom = common_denominator(&all);
        let ints: Vec<Vec<BigInt>> = generators
            .iter()
            .map(|g| g.iter().map(|x| (x * &denom).to_integer()).collect())
            .collect();
        Ok(RatLattice { denom, lattice: Sublattice::spanned_by(ambient, &ints)? })
    }

    /// Dual lattice `{m : ⟨m, n⟩ ∈ ℤ for all n ∈ L}` of a full-rank lattice.
    pub fn dual_of(l: &Sublattice) -> Result<Self, LatticeError> {
        if l.rank() != l.ambient_rank() {
            return Err(LatticeError::RankMismatch(l.rank(), l.ambient_rank()));
        }
        let inv = linalg::inverse(&l.basis.to_rational()).ok_or(LatticeError::DependentBasis)?;
        let n = l.rank();
        let generators: Vec<Vec<Rational>> = (0..n).map(|i| inv[i].clone()).collect();
        Self::spanned_by(n, &generators)
    }

    pub fn denominator(&self) -> &BigInt {
        &self.denom
    }

    pub fn scaled_lattice(&self) -> &Sublattice {
        &self.lattice
    }

    pub fn ambient_rank(&self) -> usize {
        self.lattice.ambient_rank()
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        let scaled: Vec<Rational> = v.iter().map(|x| x * Rational::from_integer(self.denom.clone())).collect();
        scaled.iter().all(Rational::is_integer)
            && self.lattice.contains(&scaled.iter().map(Rational::to_integer).collect::<Vec<_>>())
    }

    /// Integer lattice `k·self` for a multiple `k` of the denominator.
    fn rescaled(&self, k: &BigInt) -> Sublattice {
        let f = k / &self.denom;
        let cols: Vec<Vec<BigInt>> = self
            .lattice
            .basis
            .column_vecs()
            .into_iter()
            .map(|c| c.into_iter().map(|x| x * &f).collect())
            .collect();
        Sublattice::new(IntMatrix::from_columns(self.ambient_rank(), &cols).expect("same shape"))
            .expect("scaling keeps independence")
    }

    /// `ray^⊥ ∩ self`.
    pub fn perp_section(&self, ray: &[BigInt]) -> RatLattice {
        let b = &self.lattice.basis;
        let functional = IntMatrix::from_rows(&[b.transpose().mul_vec(ray)]).expect("one row");
        let k = kernel_basis(&functional);
        let section = b.mul(&k).expect("shapes agree");
        RatLattice { denom: self.denom.clone(), lattice: Sublattice { basis: section } }
    }

    /// Equality as subsets of the rational space.
    pub fn same_lattice(&self, other: &RatLattice) -> bool {
        let k = self.denom.lcm(&other.denom);
        self.rescaled(&k).same_lattice(&other.rescaled(&k))
    }
}

/// Whether `ray^⊥ ∩ m1 = ray^⊥ ∩ m2`.
pub fn perp_sections_equal(ray: &[BigInt], m1: &RatLattice, m2: &RatLattice) -> bool {
    m1.perp_section(ray).same_lattice(&m2.perp_section(ray))
}

/// Helper turning machine-integer vectors into big-integer ones.
pub fn big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_snf(a: &IntMatrix) {
        let (u, d, v) = smith_normal_form(a);
        assert_eq!(u.mul(a).unwrap().mul(&v).unwrap(), d);
        assert_eq!(u.det().abs(), BigInt::one());
        assert_eq!(v.det().abs(), BigInt::one());
        let diag: Vec<BigInt> = (0..d.rows().min(d.cols())).map(|i| d.get(i, i).clone()).collect();
        for w in diag.windows(2) {
            assert!(w[0].is_zero() && w[1].is_zero() || (!w[0].is_zero() && w[1].is_multiple_of(&w[0])));
        }
    }

    #[test]
    fn snf_small_cases() {
        let a = IntMatrix::from_rows(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]).unwrap();
        check_snf(&a);
        assert_eq!(invariant_factors(&a), big(&[2, 6, 12]));
        let a = IntMatrix::from_rows(&[vec![2, 0], vec![0, 4]]).unwrap();
        assert_eq!(invariant_factors(&a), big(&[2, 4]));
        let a = IntMatrix::from_rows(&[vec![0, 0, 3], vec![0, 0, 0]]).unwrap();
        check_snf(&a);
    }

    #[test]
    fn kernel_is_saturated() {
        let a = IntMatrix::from_rows(&[vec![2, 4]]).unwrap();
        let k = kernel_basis(&a);
        assert_eq!(k.column(0), big(&[2, -1]));
        let id = IntMatrix::identity(3);
        assert_eq!(kernel_basis(&id).cols(), 0);
    }

    #[test]
    fn index_and_dual() {
        let n = Sublattice::full(2);
        let two = Sublattice::scaled_full(2, 2);
        assert_eq!(lattice_index(&two, &n).unwrap(), BigInt::from(4));
        assert_eq!(lattice_index(&n, &two), Err(LatticeError::NotSublattice));
        let line = Sublattice::from_columns(2, &[vec![1, 0]]).unwrap();
        assert!(matches!(lattice_index(&line, &n), Err(LatticeError::RankMismatch(1, 2))));
        let dual = RatLattice::dual_of(&two).unwrap();
        assert!(dual.contains(&[Rational::new(1.into(), 2.into()), Rational::zero()]));
    }

    #[test]
    fn perp_sections() {
        let m1 = RatLattice::integral(Sublattice::scaled_full(2, 2));
        let m2 = RatLattice::integral(Sublattice::full(2));
        assert!(!perp_sections_equal(&big(&[1, 0]), &m1, &m2));
        assert!(perp_sections_equal(&big(&[1, 0]), &m2, &m2));
    }

    #[test]
    fn primitivity() {
        assert!(is_primitive_i64(&[1, -1, 1, -1, 1, -1, 1]).unwrap());
        assert!(!is_primitive_i64(&[2, 0, 0]).unwrap());
        assert!(is_primitive_i64(&[0, 0, 1]).unwrap());
        assert_eq!(is_primitive_i64(&[0, 0]), Err(LatticeError::ZeroVector));
    }
}
