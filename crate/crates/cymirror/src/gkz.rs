//! GKZ systems of nef-partitions and their one-parameter Picard–Fuchs operators.
//!
//! [`build_aext`] assembles the extended matrix `A_ext` from a fan and a
//! nef-partition, [`build_abar`] the matrix `Ā` of the contracted toric
//! variety. Holomorphic solutions are summed from exact Γ-ratios that are
//! never evaluated as Γ values, only as finite rational products.

use crate::fan::{is_nef, Fan, FanError};
use crate::lattice::{kernel_basis, IntMatrix};
use crate::rational::{int, pow, serde_vec, Rational};
use crate::series::{Bound, Series1, SeriesM};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// Failures of GKZ assembly and Picard–Fuchs derivation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GkzError {
    #[error("invalid nef-partition: {0}")]
    InvalidPartition(String),
    #[error("ray layout: {0}")]
    RayLayout(String),
    #[error("Gamma ratio has a pole in the numerator at column {0}")]
    NumeratorPole(usize),
    #[error("Gamma arguments {0} and {1} do not differ by an integer")]
    NonIntegralShift(String, String),
    #[error("expected a rank-one kernel, found rank {0}")]
    KernelRank(usize),
    #[error("ratio denominator does not vanish at n = -1")]
    Indicial,
    #[error("entry does not fit a machine integer")]
    Overflow,
    #[error(transparent)]
    Fan(#[from] FanError),
}

/// Exponent matrix with Euler data `β`, the fixed exponent `γ` and the
/// saturated kernel (one lattice relation per column of `kernel`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GkzSystem {
    pub matrix: IntMatrix,
    #[serde(with = "serde_vec")]
    pub beta: Vec<Rational>,
    #[serde(with = "serde_vec")]
    pub gamma: Vec<Rational>,
    pub kernel: IntMatrix,
    pub labels: Vec<String>,
}

impl GkzSystem {
    fn assemble(matrix: IntMatrix, gamma: Vec<Rational>, labels: Vec<String>) -> Self {
        let rat = matrix.to_rational();
        let beta: Vec<Rational> = rat.iter().map(|row| row.iter().zip(&gamma).map(|(a, g)| a * g).sum()).collect();
        let mut kernel = kernel_basis(&matrix);
        if kernel.cols() == 1 {
            let v = kernel.column(0);
            let pivot = gamma.iter().position(|g| !g.is_zero());
            let flip = match pivot {
                Some(j) => v[j].is_positive(),
                None => v.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()),
            };
            if flip {
                kernel = IntMatrix::from_columns(v.len(), &[v.iter().map(|x| -x).collect::<Vec<_>>()])
                    .expect("same ambient rank");
            }
        }
        GkzSystem { matrix, beta, gamma, kernel, labels }
    }

    /// Number of kernel generators.
    pub fn kernel_rank(&self) -> usize {
        self.kernel.cols()
    }

    /// The `a`-th kernel generator as machine integers.
    pub fn kernel_vector(&self, a: usize) -> Result<Vec<i64>, GkzError> {
        self.kernel.column(a).iter().map(|x| x.to_i64().ok_or(GkzError::Overflow)).collect()
    }

    /// Exact check of `matrix · gamma = beta`.
    pub fn gamma_consistent(&self) -> bool {
        self.matrix
            .to_rational()
            .iter()
            .zip(&self.beta)
            .all(|(row, b)| row.iter().zip(&self.gamma).map(|(a, g)| a * g).sum::<Rational>() == *b)
    }
}

/// Extended matrix of a nef-partition.
///
/// Rows: the `r` partition rows first, then the lattice rows. Columns per
/// part `i`: `ν_{i,0} = (δ_i | 0)` followed by `ν_{i,j} = (δ_i | ρ_{i,j})` in
/// the order the part lists its rays. `γ` is `−1/2` on every `ν_{i,0}`.
pub fn build_aext(fan: &Fan, partition: &[Vec<usize>]) -> Result<GkzSystem, GkzError> {
    validate_partition(fan, partition)?;
    let n = fan.ambient_rank();
    let r = partition.len();
    let mut columns: Vec<Vec<i64>> = Vec::new();
    let mut gamma = Vec::new();
    let mut labels = Vec::new();
    for (i, part) in partition.iter().enumerate() {
        let mut head = vec![0i64; r + n];
        head[i] = 1;
        columns.push(head);
        gamma.push(Rational::new(BigInt::from(-1), BigInt::from(2)));
        labels.push(format!("x_{{{},0}}", i + 1));
        for (j, &ray) in part.iter().enumerate() {
            let mut col = vec![0i64; r];
            col[i] = 1;
            col.extend_from_slice(&fan.rays()[ray]);
            columns.push(col);
            gamma.push(Rational::zero());
            labels.push(format!("x_{{{},{}}}", i + 1, j + 1));
        }
    }
    let matrix = IntMatrix::from_columns(r + n, &columns).expect("columns share the row count");
    Ok(GkzSystem::assemble(matrix, gamma, labels))
}

fn validate_partition(fan: &Fan, partition: &[Vec<usize>]) -> Result<(), GkzError> {
    let p = fan.rays().len();
    let mut seen = vec![false; p];
    for part in partition {
        if part.is_empty() {
            return Err(GkzError::InvalidPartition("empty part".into()));
        }
        for &i in part {
            if i >= p || seen[i] {
                return Err(GkzError::InvalidPartition(format!("ray {i} missing or repeated")));
            }
            seen[i] = true;
        }
    }
    if partition.is_empty() || seen.iter().any(|s| !s) {
        return Err(GkzError::InvalidPartition("parts do not cover the rays".into()));
    }
    for part in partition {
        let coeffs: Vec<i64> = (0..p).map(|i| part.contains(&i) as i64).collect();
        if !is_nef(fan, &coeffs)? {
            return Err(GkzError::InvalidPartition(format!("part {part:?} is not nef")));
        }
    }
    Ok(())
}

/// The matrix `Ā` of a contracted variety whose rays are `ν_j = (ρ_j, 1)`
/// and one ray `(0, −1)`.
///
/// Columns: `x_0 = (0, 0, 1)`, then `x_j = (ρ_j, 1, 1)` in fan order, then
/// `x_{p+1} = (0, −1, 1)`. `γ̄` is `−1` on `x_0`, so `β̄ = (0, …, 0, −1)`.
pub fn build_abar(xprime: &Fan) -> Result<GkzSystem, GkzError> {
    let m = xprime.ambient_rank();
    if m == 0 {
        return Err(GkzError::RayLayout("rank zero".into()));
    }
    let mut nus = Vec::new();
    let mut apex = None;
    for ray in xprime.rays() {
        let last = ray[m - 1];
        if last == 1 {
            nus.push(ray.clone());
        } else if last == -1 && ray[..m - 1].iter().all(|&x| x == 0) && apex.is_none() {
            apex = Some(ray.clone());
        } else {
            return Err(GkzError::RayLayout(format!("unexpected ray {ray:?}")));
        }
    }
    let apex = apex.ok_or_else(|| GkzError::RayLayout("no ray (0,…,0,−1)".into()))?;
    let mut columns = vec![[vec![0i64; m], vec![1]].concat()];
    let mut labels = vec!["x_0".to_string()];
    for (j, nu) in nus.iter().enumerate() {
        columns.push([nu.clone(), vec![1]].concat());
        labels.push(format!("x_{}", j + 1));
    }
    columns.push([apex, vec![1]].concat());
    labels.push(format!("x_{}", nus.len() + 1));
    let mut gamma = vec![Rational::zero(); columns.len()];
    gamma[0] = int(-1);
    let matrix = IntMatrix::from_columns(m + 1, &columns).expect("columns share the row count");
    Ok(GkzSystem::assemble(matrix, gamma, labels))
}

/// Per-part version of `Ā` built directly from a nef-partition.
///
/// Rows: lattice rows, then `r` rows `δ_i` with `−1` on the apex column of
/// part `i`, then `r` rows `δ_i`. Columns per part `i`: `x_{i,0} = (0,0,e_i)`,
/// `x_{i,j} = (ρ_{i,j}, e_i, e_i)`, `x_{i,∞} = (0, −e_i, e_i)`. With one part
/// this is [`build_abar`] of the lifted fan.
pub fn build_abar_parts(fan: &Fan, partition: &[Vec<usize>]) -> Result<GkzSystem, GkzError> {
    validate_partition(fan, partition)?;
    let n = fan.ambient_rank();
    let r = partition.len();
    let mut columns = Vec::new();
    let mut gamma = Vec::new();
    let mut labels = Vec::new();
    let column = |lattice: &[i64], mid: i64, i: usize| {
        let mut c = lattice.to_vec();
        c.extend((0..r).map(|k| if k == i { mid } else { 0 }));
        c.extend((0..r).map(|k| (k == i) as i64));
        c
    };
    for (i, part) in partition.iter().enumerate() {
        columns.push(column(&vec![0; n], 0, i));
        gamma.push(int(-1));
        labels.push(format!("x_{{{},0}}", i + 1));
        for (j, &ray) in part.iter().enumerate() {
            columns.push(column(&fan.rays()[ray], 1, i));
            gamma.push(Rational::zero());
            labels.push(format!("x_{{{},{}}}", i + 1, j + 1));
        }
        columns.push(column(&vec![0; n], -1, i));
        gamma.push(Rational::zero());
        labels.push(format!("x_{{{},inf}}", i + 1));
    }
    let matrix = IntMatrix::from_columns(n + 2 * r, &columns).expect("columns share the row count");
    Ok(GkzSystem::assemble(matrix, gamma, labels))
}

/// Per-part lift of a relation of [`build_aext`]: each part's block
/// `(ℓ_{i,0}, ℓ_{i,1}, …)` becomes `(2ℓ_{i,0}, ℓ_{i,1}, …, −ℓ_{i,0})`.
pub fn lift_relation_parts(ell: &[i64], part_sizes: &[usize]) -> Vec<i64> {
    let mut out = Vec::new();
    let mut at = 0;
    for &k in part_sizes {
        out.extend(lift_relation(&ell[at..at + k + 1]));
        at += k + 1;
    }
    out
}

/// Kernel vector of `Ā` induced by a relation `ℓ = (ℓ_0, ℓ_1, …, ℓ_p)` of
/// the one-part `A_ext`: `(2ℓ_0, ℓ_1, …, ℓ_p, −ℓ_0)`.
pub fn lift_relation(ell: &[i64]) -> Vec<i64> {
    let mut out = vec![2 * ell[0]];
    out.extend_from_slice(&ell[1..]);
    out.push(-ell[0]);
    out
}

fn nonpositive_integer(x: &Rational) -> Option<BigInt> {
    (x.is_integer() && !x.is_positive()).then(|| -x.to_integer())
}

fn factorial(n: &BigInt) -> BigInt {
    let mut acc = BigInt::one();
    let mut k = BigInt::one();
    while &k <= n {
        acc *= &k;
        k += 1;
    }
    acc
}

/// `Γ(a)/Γ(b)` for `a − b ∈ ℤ`, as an exact rational.
///
/// When both arguments are poles the ratio is the limit
/// `(−1)^{a'−b'} b'!/a'!` with `a' = −a`, `b' = −b`. A pole only in the
/// denominator gives `0`; a pole only in the numerator is an error.
pub fn gamma_ratio(a: &Rational, b: &Rational) -> Result<Rational, GkzError> {
    let d = a - b;
    if !d.is_integer() {
        return Err(GkzError::NonIntegralShift(a.to_string(), b.to_string()));
    }
    match (nonpositive_integer(a), nonpositive_integer(b)) {
        (Some(ap), Some(bp)) => {
            let sign = if (&ap - &bp).is_odd() { -1 } else { 1 };
            Ok(Rational::new(factorial(&bp) * sign, factorial(&ap)))
        }
        (Some(_), None) => Err(GkzError::NumeratorPole(0)),
        (None, Some(_)) => Ok(Rational::zero()),
        (None, None) => {
            let d = d.to_integer().to_i64().ok_or(GkzError::Overflow)?;
            let mut acc = Rational::one();
            if d >= 0 {
                for k in 0..d {
                    acc *= b + int(k);
                }
            } else {
                for k in 0..-d {
                    acc *= a + int(k);
                }
                acc = acc.recip();
            }
            Ok(acc)
        }
    }
}

/// `c(ℓ) = ∏_j Γ(γ_j+1)/Γ(γ_j+ℓ_j+1)`.
pub fn holo_coefficient(gamma: &[Rational], ell: &[i64]) -> Result<Rational, GkzError> {
    let mut acc = Rational::one();
    for (j, (g, &l)) in gamma.iter().zip(ell).enumerate() {
        let s = g + int(1);
        let f = gamma_ratio(&s, &(&s + int(l))).map_err(|e| match e {
            GkzError::NumeratorPole(_) => GkzError::NumeratorPole(j),
            other => other,
        })?;
        if f.is_zero() {
            return Ok(f);
        }
        acc *= f;
    }
    Ok(acc)
}

/// Holomorphic solution `Σ_n c(nℓ) z^n` of a rank-one system, or the
/// constant `1` when the kernel is trivial.
pub fn holo_series(sys: &GkzSystem, order: usize) -> Result<Series1, GkzError> {
    match sys.kernel_rank() {
        0 => Ok(Series1::constant("z", order, Rational::one())),
        1 => {
            let ell = sys.kernel_vector(0)?;
            let mut coeffs = Vec::with_capacity(order);
            for n in 0..order as i64 {
                let v: Vec<i64> = ell.iter().map(|x| x * n).collect();
                coeffs.push(holo_coefficient(&sys.gamma, &v)?);
            }
            Ok(Series1::from_coeffs("z", coeffs))
        }
        k => Err(GkzError::KernelRank(k)),
    }
}

/// Holomorphic solution `Σ_k c(Σ k_a ℓ^{(a)}) z^k` over the kernel basis,
/// for exponents `k` inside `bound`.
pub fn holo_series_multi(sys: &GkzSystem, bound: Bound) -> Result<SeriesM, GkzError> {
    let m = sys.kernel_rank();
    let names: Vec<String> = (1..=m).map(|a| format!("z{a}")).collect();
    let vars: Vec<&str> = names.iter().map(String::as_str).collect();
    let basis: Vec<Vec<i64>> = (0..m).map(|a| sys.kernel_vector(a)).collect::<Result<_, _>>()?;
    let mut out = SeriesM::zero(&vars, bound.clone());
    let top = bound.max_total_degree();
    let mut k = vec![0u32; m];
    loop {
        if bound.contains(&k) {
            let mut ell = vec![0i64; sys.gamma.len()];
            for (a, v) in basis.iter().enumerate() {
                for (e, x) in ell.iter_mut().zip(v) {
                    *e += x * k[a] as i64;
                }
            }
            out.add_term(k.clone(), holo_coefficient(&sys.gamma, &ell)?);
        }
        let mut i = 0;
        loop {
            if i == m {
                return Ok(out);
            }
            k[i] += 1;
            if k[i] <= top {
                break;
            }
            k[i] = 0;
            i += 1;
        }
    }
}

/// `a(n+1)/a(n) = scale · ∏(n + num_roots) / ∏(n + den_roots)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearRatio {
    #[serde(with = "crate::rational::serde_rat")]
    pub scale: Rational,
    #[serde(with = "serde_vec")]
    pub num_roots: Vec<Rational>,
    #[serde(with = "serde_vec")]
    pub den_roots: Vec<Rational>,
}

impl LinearRatio {
    /// Builds the ratio and cancels common linear factors.
    pub fn new(scale: Rational, num_roots: Vec<Rational>, den_roots: Vec<Rational>) -> Self {
        let mut num = num_roots;
        let mut den = Vec::new();
        for r in den_roots {
            match num.iter().position(|x| *x == r) {
                Some(i) => {
                    num.remove(i);
                }
                None => den.push(r),
            }
        }
        num.sort();
        den.sort();
        LinearRatio { scale, num_roots: num, den_roots: den }
    }

    /// The ratio `c((n+1)ℓ)/c(nℓ)` predicted by the Γ-ratio formula.
    pub fn from_relation(gamma: &[Rational], ell: &[i64]) -> Self {
        let mut scale = Rational::one();
        let mut num = Vec::new();
        let mut den = Vec::new();
        for (g, &l) in gamma.iter().zip(ell) {
            let s = g + int(1);
            if l > 0 {
                scale /= pow(&int(l), l);
                den.extend((0..l).map(|k| (&s + int(k)) / int(l)));
            } else if l < 0 {
                let m = -l;
                scale *= pow(&int(-m), m);
                num.extend((1..=m).map(|k| (int(k) - &s) / int(m)));
            }
        }
        Self::new(scale, num, den)
    }

    /// Value at `n`, or `None` at a pole.
    pub fn eval(&self, n: &Rational) -> Option<Rational> {
        let d: Rational = self.den_roots.iter().map(|r| n + r).product();
        if d.is_zero() {
            return None;
        }
        let num: Rational = self.num_roots.iter().map(|r| n + r).product();
        Some(&self.scale * num / d)
    }

    /// The series with `a(0) = 1` and the given successive ratios.
    pub fn series(&self, order: usize) -> Series1 {
        let mut coeffs = Vec::with_capacity(order);
        let mut a = Rational::one();
        for n in 0..order {
            coeffs.push(a.clone());
            a = match self.eval(&int(n as i64)) {
                Some(r) => a * r,
                None => Rational::zero(),
            };
        }
        Series1::from_coeffs("z", coeffs)
    }
}

/// `Σ_k z^k P_k(θ)`, each `P_k` as ascending coefficients in `θ = z d/dz`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PfOperator {
    pub polys: Vec<Vec<Rational>>,
}

fn poly_from_roots(scale: &Rational, shifts: &[Rational]) -> Vec<Rational> {
    let mut p = vec![scale.clone()];
    for r in shifts {
        let mut next = vec![Rational::zero(); p.len() + 1];
        for (i, c) in p.iter().enumerate() {
            next[i] += c * r;
            next[i + 1] += c;
        }
        p = next;
    }
    p
}

fn poly_eval(p: &[Rational], x: &Rational) -> Rational {
    p.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
}

impl PfOperator {
    /// Order in `θ`.
    pub fn order(&self) -> usize {
        self.polys.first().map_or(0, |p| p.len().saturating_sub(1))
    }

    /// Applies the operator to a truncated series, keeping its order.
    pub fn apply(&self, s: &Series1) -> Series1 {
        let t = s.order();
        let coeffs = (0..t)
            .map(|m| {
                self.polys
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| *k <= m)
                    .map(|(k, p)| poly_eval(p, &int((m - k) as i64)) * s.coeff(m - k))
                    .sum()
            })
            .collect();
        Series1::from_coeffs(s.var(), coeffs)
    }
}

fn write_poly(f: &mut fmt::Formatter<'_>, p: &[Rational]) -> fmt::Result {
    let mut first = true;
    for (i, c) in p.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let sign = if c.is_negative() { "-" } else { "+" };
        if first {
            if c.is_negative() {
                write!(f, "-")?;
            }
        } else {
            write!(f, " {sign} ")?;
        }
        let a = c.abs();
        let mono = match i {
            0 => String::new(),
            1 => "θ".to_string(),
            _ => format!("θ^{i}"),
        };
        if mono.is_empty() {
            write!(f, "{a}")?;
        } else if a.is_one() {
            write!(f, "{mono}")?;
        } else {
            write!(f, "{a}*{mono}")?;
        }
        first = false;
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

impl fmt::Display for PfOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, p) in self.polys.iter().enumerate() {
            if k == 0 {
                write_poly(f, p)?;
                continue;
            }
            let lead = p.iter().rev().find(|c| !c.is_zero());
            let Some(lead) = lead else { continue };
            let p: Vec<Rational> = if lead.is_negative() {
                write!(f, " - ")?;
                p.iter().map(|c| -c).collect()
            } else {
                write!(f, " + ")?;
                p.clone()
            };
            let z = if k == 1 { "z".to_string() } else { format!("z^{k}") };
            if p.len() == 1 {
                write!(f, "{}{z}", if p[0].is_one() { String::new() } else { format!("{}*", p[0]) })?;
            } else {
                write!(f, "{z}*(")?;
                write_poly(f, &p)?;
                write!(f, ")")?;
            }
        }
        Ok(())
    }
}

/// The operator `D(θ−1) − z·N(θ)` annihilating the series with successive
/// ratios `N(n)/D(n)`, normalized so `D(θ−1)` is monic.
pub fn derive_pf(ratio: &LinearRatio) -> Result<PfOperator, GkzError> {
    let ratio = LinearRatio::new(ratio.scale.clone(), ratio.num_roots.clone(), ratio.den_roots.clone());
    if !ratio.den_roots.iter().any(|r| r.is_one()) {
        return Err(GkzError::Indicial);
    }
    let shifted: Vec<Rational> = ratio.den_roots.iter().map(|r| r - int(1)).collect();
    let p0 = poly_from_roots(&Rational::one(), &shifted);
    let p1 = poly_from_roots(&-ratio.scale.clone(), &ratio.num_roots);
    Ok(PfOperator { polys: vec![p0, p1] })
}

/// Whether `op` kills `s` through degree `T − 1` (capped at the series order).
pub fn verify_annihilation(op: &PfOperator, s: &Series1, t: usize) -> bool {
    let r = op.apply(s);
    (0..t.min(r.order())).all(|m| r.coeff(m).is_zero())
}

/// A box relation `∂^{ℓ⁺} − ∂^{ℓ⁻}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxRelation {
    pub plus: Vec<i64>,
    pub minus: Vec<i64>,
}

/// Box and Euler data of a system.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxEulerData {
    pub relations: Vec<BoxRelation>,
    pub euler: Vec<Vec<i64>>,
    /// `matrix · (ℓ + γ) = β` for every kernel generator.
    pub euler_consistent: bool,
}

/// Box relations from the kernel generators and the Euler vectors (rows).
pub fn box_euler_data(sys: &GkzSystem) -> Result<BoxEulerData, GkzError> {
    let mut relations = Vec::new();
    let rat = sys.matrix.to_rational();
    let mut consistent = sys.gamma_consistent();
    for a in 0..sys.kernel_rank() {
        let ell = sys.kernel_vector(a)?;
        relations.push(BoxRelation {
            plus: ell.iter().map(|&x| x.max(0)).collect(),
            minus: ell.iter().map(|&x| (-x).max(0)).collect(),
        });
        let shifted: Vec<Rational> = ell.iter().zip(&sys.gamma).map(|(&l, g)| int(l) + g).collect();
        consistent &= rat
            .iter()
            .zip(&sys.beta)
            .all(|(row, b)| row.iter().zip(&shifted).map(|(x, y)| x * y).sum::<Rational>() == *b);
    }
    let euler = sys
        .matrix
        .row_vecs()
        .iter()
        .map(|r| r.iter().map(|x| x.to_i64().ok_or(GkzError::Overflow)).collect())
        .collect::<Result<_, _>>()?;
    Ok(BoxEulerData { relations, euler, euler_consistent: consistent })
}
