//! Fans and stacky fans: smoothness, star subdivisions, canonical
//! liftings, Cartier data, semiample contractions, Box elements and the
//! reduction function.

use crate::lattice::{kernel_basis, smith_normal_form, IntMatrix, LatticeError, Sublattice};
use crate::linalg::{self, RatMatrix};
use crate::lp;
use crate::polytope::{self, LatticePolytope, PolytopeError};
use crate::rational::{ceil, frac, gcd_all, Rational};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FanError {
    #[error("invalid ray: {0}")]
    InvalidRay(String),
    #[error("invalid cone: {0}")]
    InvalidCone(String),
    #[error("cones {0} and {1} do not meet in a common face")]
    Inconsistent(usize, usize),
    #[error("cone {0} is not simplicial")]
    NotSimplicial(usize),
    #[error("fan is not complete")]
    NotComplete,
    #[error("vector is not in the support of the fan")]
    NotInSupport,
    #[error("vector is not primitive in the fan lattice")]
    NotPrimitive,
    #[error("divisor is not Cartier on cone {0}")]
    NotCartier(usize),
    #[error("support function is not convex")]
    NotNef,
    #[error("merged cone is not strongly convex")]
    NotStronglyConvex,
    #[error("vector is not in the relation lattice tensored with Q")]
    NotInRelations,
    #[error("vector is not in Λ_σ: {0}")]
    NotInLambda(String),
    #[error("invalid Mori generator: {0}")]
    InvalidMori(String),
    #[error("stacky map: {0}")]
    InvalidRayMap(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
}

fn q(x: i64) -> Rational {
    Rational::from_integer(x.into())
}

fn qv(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| q(x)).collect()
}

fn big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn to_i64(v: &[Rational]) -> Option<Vec<i64>> {
    v.iter().map(|x| if x.is_integer() { x.to_integer().to_i64() } else { None }).collect()
}

/// Matrix whose columns are the given vectors.
fn columns(vs: &[&Vec<i64>], rank: usize) -> RatMatrix {
    (0..rank).map(|i| vs.iter().map(|v| q(v[i])).collect()).collect()
}

/// Nonnegative coefficients writing `target` in the cone of `gens`.
fn cone_coefficients(gens: &[&Vec<i64>], target: &[i64]) -> Option<Vec<Rational>> {
    let rank = target.len();
    lp::feasible(&columns(gens, rank), gens.len(), &qv(target))
}

/// Whether the cone spanned by `gens` contains a line.
fn contains_line(gens: &[&Vec<i64>]) -> bool {
    let Some(rank) = gens.first().map(|g| g.len()) else {
        return false;
    };
    let mut a = columns(gens, rank);
    a.push(vec![Rational::one(); gens.len()]);
    let mut b = vec![Rational::zero(); rank];
    b.push(Rational::one());
    lp::feasible(&a, gens.len(), &b).is_some()
}

/// A fan in a sublattice of ℤⁿ, given by primitive rays and maximal cones.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "FanJson", into = "FanJson")]
pub struct Fan {
    lattice: Sublattice,
    rays: Vec<Vec<i64>>,
    cones: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct FanJson {
    #[serde(default)]
    lattice_basis: Vec<Vec<i64>>,
    rays: Vec<Vec<i64>>,
    max_cones: Vec<Vec<usize>>,
}

impl TryFrom<FanJson> for Fan {
    type Error = FanError;
    fn try_from(j: FanJson) -> Result<Self, FanError> {
        let ambient = j.rays.first().map(Vec::len).or(j.lattice_basis.first().map(Vec::len)).unwrap_or(0);
        let lattice = if j.lattice_basis.is_empty() {
            Sublattice::full(ambient)
        } else {
            Sublattice::from_columns(ambient, &j.lattice_basis)?
        };
        Fan::new(lattice, j.rays, j.max_cones)
    }
}

impl From<Fan> for FanJson {
    fn from(f: Fan) -> Self {
        let lattice_basis = f
            .lattice
            .basis()
            .column_vecs()
            .iter()
            .map(|c| c.iter().map(|x| x.to_i64().expect("fits in i64")).collect())
            .collect();
        FanJson { lattice_basis, rays: f.rays, max_cones: f.cones }
    }
}

/// Per-cone smoothness classification.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConeKind {
    Smooth,
    Singular { multiplicity: BigInt },
    NonSimplicial,
}

impl Fan {
    /// Validates primitivity, simpliciality data and pairwise face
    /// intersections of simplicial cones.
    pub fn new(lattice: Sublattice, rays: Vec<Vec<i64>>, cones: Vec<Vec<usize>>) -> Result<Self, FanError> {
        let n = lattice.ambient_rank();
        for (i, r) in rays.iter().enumerate() {
            if r.len() != n {
                return Err(FanError::InvalidRay(format!("ray {i} has length {}", r.len())));
            }
            let coords = lattice
                .coordinates(&big(r))
                .ok_or_else(|| FanError::InvalidRay(format!("ray {i} is not in the lattice")))?;
            if !gcd_all(&coords).is_one() {
                return Err(FanError::InvalidRay(format!("ray {i} is not primitive in the lattice")));
            }
        }
        let mut seen = BTreeSet::new();
        let mut canon = Vec::new();
        for c in cones {
            let c: Vec<usize> = c.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
            if c.is_empty() || c.iter().any(|&i| i >= rays.len()) {
                return Err(FanError::InvalidCone(format!("{c:?}")));
            }
            if seen.insert(c.clone()) {
                canon.push(c);
            }
        }
        let fan = Fan { lattice, rays, cones: canon };
        fan.check_intersections()?;
        Ok(fan)
    }

    /// Fan in the full lattice ℤⁿ.
    pub fn standard(rays: Vec<Vec<i64>>, cones: Vec<Vec<usize>>) -> Result<Self, FanError> {
        let n = rays.first().map(Vec::len).unwrap_or(0);
        Fan::new(Sublattice::full(n), rays, cones)
    }

    fn check_intersections(&self) -> Result<(), FanError> {
        let simplicial: Vec<bool> = (0..self.cones.len()).map(|i| self.is_simplicial(i)).collect();
        for a in 0..self.cones.len() {
            for b in a + 1..self.cones.len() {
                if simplicial[a] && simplicial[b] && !self.meet_in_face(a, b) {
                    return Err(FanError::Inconsistent(a, b));
                }
            }
        }
        Ok(())
    }

    /// No point of both cones has a positive coefficient on a ray outside
    /// their common rays.
    fn meet_in_face(&self, a: usize, b: usize) -> bool {
        let (sa, sb) = (&self.cones[a], &self.cones[b]);
        let n = self.ambient_rank();
        let cols = sa.len() + sb.len();
        let mut m: RatMatrix = vec![vec![Rational::zero(); cols]; n + 1];
        for (j, &r) in sa.iter().chain(sb.iter()).enumerate() {
            let sign = if j < sa.len() { 1 } else { -1 };
            for i in 0..n {
                m[i][j] = q(sign * self.rays[r][i]);
            }
            let outside = if j < sa.len() { !sb.contains(&r) } else { !sa.contains(&r) };
            if outside {
                m[n][j] = Rational::one();
            }
        }
        let mut rhs = vec![Rational::zero(); n];
        rhs.push(Rational::one());
        lp::feasible(&m, cols, &rhs).is_none()
    }

    pub fn lattice(&self) -> &Sublattice {
        &self.lattice
    }

    pub fn ambient_rank(&self) -> usize {
        self.lattice.ambient_rank()
    }

    /// Rank of the fan lattice.
    pub fn rank(&self) -> usize {
        self.lattice.rank()
    }

    pub fn rays(&self) -> &[Vec<i64>] {
        &self.rays
    }

    pub fn max_cones(&self) -> &[Vec<usize>] {
        &self.cones
    }

    fn cone_rays(&self, c: usize) -> Vec<&Vec<i64>> {
        self.cones[c].iter().map(|&i| &self.rays[i]).collect()
    }

    /// Lattice coordinates of a ray.
    fn lattice_coords(&self, v: &[i64]) -> Vec<BigInt> {
        self.lattice.coordinates(&big(v)).expect("rays lie in the lattice")
    }

    pub fn is_simplicial(&self, c: usize) -> bool {
        let rays = self.cone_rays(c);
        linalg::rank(&columns(&rays, self.ambient_rank()), rays.len()) == rays.len()
    }

    /// Index of the sublattice spanned by a simplicial cone's rays in its
    /// saturation.
    pub fn multiplicity(&self, c: usize) -> Result<BigInt, FanError> {
        if !self.is_simplicial(c) {
            return Err(FanError::NotSimplicial(c));
        }
        let cols: Vec<Vec<BigInt>> = self.cones[c].iter().map(|&i| self.lattice_coords(&self.rays[i])).collect();
        let m = IntMatrix::from_columns(self.rank(), &cols)?;
        Ok(crate::lattice::invariant_factors(&m).iter().product())
    }

    /// Smooth, singular with multiplicity, or non-simplicial, per max cone.
    pub fn smoothness(&self) -> Vec<ConeKind> {
        (0..self.cones.len())
            .map(|c| match self.multiplicity(c) {
                Ok(m) if m.is_one() => ConeKind::Smooth,
                Ok(m) => ConeKind::Singular { multiplicity: m },
                Err(_) => ConeKind::NonSimplicial,
            })
            .collect()
    }

    /// Simplicial, full-dimensional cones whose walls each lie in exactly
    /// two max cones.
    pub fn is_complete(&self) -> bool {
        let r = self.rank();
        if self.cones.is_empty() || (0..self.cones.len()).any(|c| !self.is_simplicial(c) || self.cones[c].len() != r) {
            return false;
        }
        let mut walls: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        for c in &self.cones {
            for skip in 0..c.len() {
                let w: Vec<usize> = c.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &x)| x).collect();
                *walls.entry(w).or_default() += 1;
            }
        }
        walls.values().all(|&k| k == 2)
    }

    /// Index of a max cone containing `v`, with the coefficients on its rays.
    pub fn locate(&self, v: &[i64]) -> Option<(usize, Vec<Rational>)> {
        (0..self.cones.len()).find_map(|c| cone_coefficients(&self.cone_rays(c), v).map(|x| (c, x)))
    }

    /// Canonical form: sorted rays and cones as sorted index lists.
    pub fn canonical(&self) -> (Vec<Vec<i64>>, Vec<Vec<usize>>) {
        let mut order: Vec<usize> = (0..self.rays.len()).collect();
        order.sort_by(|&a, &b| self.rays[a].cmp(&self.rays[b]));
        let mut pos = vec![0; self.rays.len()];
        for (new, &old) in order.iter().enumerate() {
            pos[old] = new;
        }
        let rays = order.iter().map(|&i| self.rays[i].clone()).collect();
        let mut cones: Vec<Vec<usize>> = self
            .cones
            .iter()
            .map(|c| {
                let mut c: Vec<usize> = c.iter().map(|&i| pos[i]).collect();
                c.sort_unstable();
                c
            })
            .collect();
        cones.sort();
        (rays, cones)
    }

    /// Polytope of the divisor `Σ a_ρ D_ρ`.
    pub fn section_polytope(&self, coeffs: &[i64]) -> Result<LatticePolytope, FanError> {
        Ok(polytope::section_polytope(&self.rays, coeffs)?)
    }
}

impl PartialEq for Fan {
    fn eq(&self, other: &Self) -> bool {
        self.lattice.same_lattice(&other.lattice) && self.canonical() == other.canonical()
    }
}

impl Eq for Fan {}

/// Star subdivision at a primitive vector of the support.
pub fn star_subdivision(fan: &Fan, mu: &[i64]) -> Result<Fan, FanError> {
    let coords = fan.lattice.coordinates(&big(mu)).ok_or(FanError::NotPrimitive)?;
    if !gcd_all(&coords).is_one() {
        return Err(FanError::NotPrimitive);
    }
    if fan.rays.iter().any(|r| r == mu) {
        return Ok(fan.clone());
    }
    let new = fan.rays.len();
    let mut rays = fan.rays.clone();
    rays.push(mu.to_vec());
    let mut cones = Vec::new();
    let mut hit = false;
    for (c, cone) in fan.cones.iter().enumerate() {
        let Some(coef) = cone_coefficients(&fan.cone_rays(c), mu) else {
            cones.push(cone.clone());
            continue;
        };
        if !fan.is_simplicial(c) {
            return Err(FanError::NotSimplicial(c));
        }
        hit = true;
        for (k, a) in coef.iter().enumerate() {
            if a.is_positive() {
                let mut face: Vec<usize> = cone.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, &r)| r).collect();
                face.push(new);
                cones.push(face);
            }
        }
    }
    if !hit {
        return Err(FanError::NotInSupport);
    }
    Fan::new(fan.lattice.clone(), rays, cones)
}

fn extend_lattice(l: &Sublattice) -> Sublattice {
    let n = l.ambient_rank();
    let mut cols: Vec<Vec<BigInt>> = l
        .basis()
        .column_vecs()
        .into_iter()
        .map(|mut c| {
            c.push(BigInt::zero());
            c
        })
        .collect();
    let mut e = vec![BigInt::zero(); n + 1];
    e[n] = BigInt::one();
    cols.push(e);
    Sublattice::new(IntMatrix::from_columns(n + 1, &cols).expect("shape")).expect("independent")
}

/// Lifting to `N × ℤ` with cones `Cone({(ρ,1)} ∪ {(0,−1)})`.
pub fn canonical_lifting(fan: &Fan) -> Result<Fan, FanError> {
    if !fan.is_complete() {
        return Err(FanError::NotComplete);
    }
    let n = fan.ambient_rank();
    let mut rays: Vec<Vec<i64>> = fan
        .rays
        .iter()
        .map(|r| {
            let mut r = r.clone();
            r.push(1);
            r
        })
        .collect();
    let mut bottom = vec![0; n];
    bottom.push(-1);
    rays.push(bottom);
    let apex = fan.rays.len();
    let cones = fan
        .cones
        .iter()
        .map(|c| {
            let mut c = c.clone();
            c.push(apex);
            c
        })
        .collect();
    Fan::new(extend_lattice(&fan.lattice), rays, cones)
}

/// One vector `m_σ` per max cone with `⟨ρ, m_σ⟩ = −a_ρ` for `ρ ∈ σ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CartierData {
    pub m: Vec<Vec<Rational>>,
}

/// Whether `m` pairs integrally with the fan lattice.
fn in_dual(lattice: &Sublattice, m: &[Rational]) -> bool {
    lattice.basis().column_vecs().iter().all(|b| {
        let v: Rational = b.iter().zip(m).map(|(x, y)| Rational::from_integer(x.clone()) * y).sum();
        v.is_integer()
    })
}

pub fn cartier_data(fan: &Fan, coeffs: &[i64]) -> Result<CartierData, FanError> {
    if coeffs.len() != fan.rays.len() {
        return Err(FanError::InvalidCone("one coefficient per ray is required".into()));
    }
    let n = fan.ambient_rank();
    let mut out = Vec::new();
    for (c, cone) in fan.cones.iter().enumerate() {
        let mut rows: RatMatrix = cone.iter().map(|&i| qv(&fan.rays[i])).collect();
        let mut rhs: Vec<Rational> = cone.iter().map(|&i| q(-coeffs[i])).collect();
        // Pin the component orthogonal to the lattice when it is not full rank.
        for w in orthogonal_complement(&fan.lattice) {
            rows.push(w);
            rhs.push(Rational::zero());
        }
        let m = linalg::solve(&rows, n, &rhs).ok_or(FanError::NotCartier(c))?;
        if !in_dual(&fan.lattice, &m) {
            return Err(FanError::NotCartier(c));
        }
        out.push(m);
    }
    Ok(CartierData { m: out })
}

fn orthogonal_complement(l: &Sublattice) -> Vec<Vec<Rational>> {
    let rows = l.basis().transpose().to_rational();
    linalg::nullspace(&rows, l.ambient_rank())
}

fn pair(v: &[i64], m: &[Rational]) -> Rational {
    v.iter().zip(m).map(|(&x, y)| q(x) * y).sum()
}

/// Convexity of the support function: every `m_σ` lies in `Δ_D`.
pub fn is_nef(fan: &Fan, coeffs: &[i64]) -> Result<bool, FanError> {
    let data = cartier_data(fan, coeffs)?;
    Ok(data
        .m
        .iter()
        .all(|m| fan.rays.iter().zip(coeffs).all(|(r, &a)| pair(r, m) >= q(-a))))
}

/// Merges max cones with equal Cartier data. Returns the coarser fan and,
/// for each original max cone, the index of the merged cone containing it.
pub fn contract_semiample(fan: &Fan, coeffs: &[i64]) -> Result<(Fan, Vec<usize>), FanError> {
    if !is_nef(fan, coeffs)? {
        return Err(FanError::NotNef);
    }
    let data = cartier_data(fan, coeffs)?;
    let mut groups: Vec<(Vec<Rational>, BTreeSet<usize>)> = Vec::new();
    let mut cone_map = Vec::new();
    for (c, m) in data.m.iter().enumerate() {
        let g = match groups.iter().position(|(k, _)| k == m) {
            Some(g) => g,
            None => {
                groups.push((m.clone(), BTreeSet::new()));
                groups.len() - 1
            }
        };
        groups[g].1.extend(fan.cones[c].iter().copied());
        cone_map.push(g);
    }
    let mut merged = Vec::new();
    for (_, rays) in &groups {
        let gens: Vec<&Vec<i64>> = rays.iter().map(|&i| &fan.rays[i]).collect();
        if contains_line(&gens) {
            return Err(FanError::NotStronglyConvex);
        }
        let extreme: Vec<usize> = rays
            .iter()
            .copied()
            .filter(|&i| {
                let others: Vec<&Vec<i64>> = rays.iter().filter(|&&j| j != i).map(|&j| &fan.rays[j]).collect();
                others.is_empty() || cone_coefficients(&others, &fan.rays[i]).is_none()
            })
            .collect();
        merged.push(extreme);
    }
    let used: BTreeSet<usize> = merged.iter().flatten().copied().collect();
    let index: BTreeMap<usize, usize> = used.iter().enumerate().map(|(new, &old)| (old, new)).collect();
    let rays = used.iter().map(|&i| fan.rays[i].clone()).collect();
    let cones = merged.iter().map(|c| c.iter().map(|i| index[i]).collect()).collect();
    Ok((Fan::new(fan.lattice.clone(), rays, cones)?, cone_map))
}

/// Placing triangulation of every non-simplicial max cone, inserting rays
/// in index order. Simplicial cones are kept as they are.
pub fn simplicialize(fan: &Fan) -> Result<Fan, FanError> {
    let n = fan.ambient_rank();
    let mut cones = Vec::new();
    for (c, cone) in fan.cones.iter().enumerate() {
        if fan.is_simplicial(c) {
            cones.push(cone.clone());
            continue;
        }
        let dim = linalg::rank(&columns(&fan.cone_rays(c), n), cone.len());
        let mut start = Vec::new();
        for &r in cone {
            let mut trial = start.clone();
            trial.push(r);
            let gens: Vec<&Vec<i64>> = trial.iter().map(|&i| &fan.rays[i]).collect();
            if linalg::rank(&columns(&gens, n), gens.len()) == trial.len() {
                start = trial;
            }
            if start.len() == dim {
                break;
            }
        }
        let mut simplices = vec![start.clone()];
        let perp = linalg::nullspace(&fan.cone_rays(c).iter().map(|r| qv(r)).collect::<RatMatrix>(), n);
        for &p in cone.iter().filter(|r| !start.contains(r)) {
            let mut facet_count: BTreeMap<Vec<usize>, (usize, usize)> = BTreeMap::new();
            for simplex in &simplices {
                for (k, &opp) in simplex.iter().enumerate() {
                    let mut f: Vec<usize> = simplex.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, &x)| x).collect();
                    f.sort_unstable();
                    let e = facet_count.entry(f).or_insert((0, opp));
                    e.0 += 1;
                }
            }
            let mut added = Vec::new();
            for (f, (count, opp)) in facet_count {
                if count != 1 {
                    continue;
                }
                let mut rows: RatMatrix = f.iter().map(|&i| qv(&fan.rays[i])).collect();
                rows.extend(perp.iter().cloned());
                let normal = linalg::nullspace(&rows, n);
                let Some(w) = normal.first() else { continue };
                let side = pair(&fan.rays[opp], w);
                let pv = pair(&fan.rays[p], w);
                if (side.is_positive() && pv.is_negative()) || (side.is_negative() && pv.is_positive()) {
                    let mut s = f.clone();
                    s.push(p);
                    added.push(s);
                }
            }
            simplices.extend(added);
        }
        cones.extend(simplices);
    }
    Fan::new(fan.lattice.clone(), fan.rays.clone(), cones)
}

/// Whether `Σ a_ρ D_ρ` and `Σ b_ρ D_ρ` differ by a principal divisor.
pub fn linearly_equivalent(fan: &Fan, a: &[i64], b: &[i64]) -> bool {
    let n = fan.ambient_rank();
    let mut rows: RatMatrix = fan.rays.iter().map(|r| qv(r)).collect();
    let mut rhs: Vec<Rational> = a.iter().zip(b).map(|(x, y)| q(x - y)).collect();
    for w in orthogonal_complement(&fan.lattice) {
        rows.push(w);
        rhs.push(Rational::zero());
    }
    linalg::solve(&rows, n, &rhs).is_some_and(|m| in_dual(&fan.lattice, &m))
}

/// Intersection number of distinct toric divisors on a complete simplicial
/// fan: `1/mult` when the rays span a max cone, zero when they span no cone.
pub fn distinct_intersection(fan: &Fan, rays: &[usize]) -> Result<Rational, FanError> {
    let set: BTreeSet<usize> = rays.iter().copied().collect();
    if set.len() != rays.len() || rays.len() != fan.rank() {
        return Err(FanError::InvalidCone("need rank-many distinct rays".into()));
    }
    let Some(c) = fan.cones.iter().position(|c| c.iter().copied().collect::<BTreeSet<_>>() == set) else {
        return Ok(Rational::zero());
    };
    Ok(Rational::new(BigInt::one(), fan.multiplicity(c)?))
}

/// A fan with a stacky ray map `eᵢ ↦ bᵢ`, each `bᵢ` a positive multiple
/// of the `i`-th ray.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "StackyFanJson", into = "StackyFanJson")]
pub struct StackyFan {
    fan: Fan,
    ray_map: Vec<Vec<i64>>,
}

#[derive(Serialize, Deserialize)]
struct StackyFanJson {
    lattice_basis: Vec<Vec<i64>>,
    rays: Vec<Vec<i64>>,
    max_cones: Vec<Vec<usize>>,
    ray_map: Vec<Vec<i64>>,
}

impl TryFrom<StackyFanJson> for StackyFan {
    type Error = FanError;
    fn try_from(j: StackyFanJson) -> Result<Self, FanError> {
        let fan = Fan::try_from(FanJson { lattice_basis: j.lattice_basis, rays: j.rays, max_cones: j.max_cones })?;
        StackyFan::new(fan, j.ray_map)
    }
}

impl From<StackyFan> for StackyFanJson {
    fn from(s: StackyFan) -> Self {
        let f = FanJson::from(s.fan);
        StackyFanJson { lattice_basis: f.lattice_basis, rays: f.rays, max_cones: f.max_cones, ray_map: s.ray_map }
    }
}

/// Element of `Box(σ)`: a lattice point `Σ aᵢ bᵢ` with `0 ≤ aᵢ < 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxElement {
    /// Max cone the element was found in.
    pub cone: usize,
    /// Nonzero coefficients, keyed by ray index.
    pub coeffs: Vec<(usize, Rational)>,
    pub point: Vec<i64>,
}

impl BoxElement {
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl StackyFan {
    pub fn new(fan: Fan, ray_map: Vec<Vec<i64>>) -> Result<Self, FanError> {
        if ray_map.len() != fan.rays.len() {
            return Err(FanError::InvalidRayMap("one image per ray is required".into()));
        }
        for (i, (b, r)) in ray_map.iter().zip(&fan.rays).enumerate() {
            let k = r.iter().zip(b).find(|(x, _)| **x != 0).map(|(x, y)| y / x).unwrap_or(0);
            if k <= 0 || b.len() != r.len() || b.iter().zip(r).any(|(y, x)| *y != k * x) {
                return Err(FanError::InvalidRayMap(format!("image {i} is not a positive multiple of its ray")));
            }
        }
        Ok(StackyFan { fan, ray_map })
    }

    /// The stacky fan whose ray map sends `eᵢ` to the primitive ray.
    pub fn canonical(fan: Fan) -> Self {
        let ray_map = fan.rays.clone();
        StackyFan { fan, ray_map }
    }

    pub fn fan(&self) -> &Fan {
        &self.fan
    }

    pub fn ray_map(&self) -> &[Vec<i64>] {
        &self.ray_map
    }

    /// Elements of `Box(σ)` for one simplicial max cone.
    pub fn cone_box(&self, c: usize) -> Result<Vec<BoxElement>, FanError> {
        let fan = &self.fan;
        if !fan.is_simplicial(c) {
            return Err(FanError::NotSimplicial(c));
        }
        let r = fan.rank();
        let cone = &fan.cones[c];
        let k = cone.len();
        let gens: Vec<Vec<BigInt>> = cone.iter().map(|&i| fan.lattice_coords(&self.ray_map[i])).collect();
        let cmat = IntMatrix::from_columns(r, &gens)?;
        // Basis of the saturation of the span, in lattice coordinates.
        let sat = if k == r {
            IntMatrix::identity(r)
        } else {
            let w = kernel_basis(&cmat.transpose());
            kernel_basis(&w.transpose())
        };
        let sat_l = Sublattice::new(sat.clone())?;
        let local: Vec<Vec<BigInt>> = gens.iter().map(|g| sat_l.coordinates(g).expect("in saturation")).collect();
        let b = IntMatrix::from_columns(k, &local)?;
        let (u, d, _) = smith_normal_form(&b);
        let u_inv = linalg::inverse(&u.to_rational()).expect("unimodular");
        let b_inv = linalg::inverse(&b.to_rational()).expect("simplicial");
        let diag: Vec<i64> = (0..k).map(|i| d.get(i, i).to_i64().expect("small multiplicity")).collect();
        let mut out = Vec::new();
        let mut z = vec![0i64; k];
        loop {
            let y = linalg::mat_vec(&u_inv, &qv(&z));
            let a: Vec<Rational> = linalg::mat_vec(&b_inv, &y).iter().map(frac).collect();
            let n = fan.ambient_rank();
            let point: Vec<Rational> = (0..n)
                .map(|i| cone.iter().zip(&a).map(|(&ri, ai)| ai * q(self.ray_map[ri][i])).sum())
                .collect();
            out.push(BoxElement {
                cone: c,
                coeffs: cone.iter().zip(&a).filter(|(_, x)| !x.is_zero()).map(|(&i, x)| (i, x.clone())).collect(),
                point: to_i64(&point).expect("box points are integral"),
            });
            let mut i = 0;
            loop {
                if i == k {
                    return Ok(out);
                }
                z[i] += 1;
                if z[i] < diag[i] {
                    break;
                }
                z[i] = 0;
                i += 1;
            }
        }
    }
}

/// `Box(Σ)`: union over max cones, deduplicated by lattice point, with the
/// zero element first.
pub fn box_elements(sfan: &StackyFan) -> Result<Vec<BoxElement>, FanError> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for c in 0..sfan.fan.cones.len() {
        for e in sfan.cone_box(c)? {
            if seen.insert(e.point.clone()) {
                out.push(e);
            }
        }
    }
    out.sort_by_key(|e| !e.is_zero());
    Ok(out)
}

/// Class of each Box element in `N / Im(ρ)`, numbered by first
/// appearance. The number of distinct classes is the order of the group
/// the Box elements represent.
pub fn box_group_classes(sfan: &StackyFan, elements: &[BoxElement]) -> Result<Vec<usize>, FanError> {
    let image = Sublattice::spanned_by(sfan.fan.ambient_rank(), &sfan.ray_map.iter().map(|b| big(b)).collect::<Vec<_>>())?;
    let mut keys: Vec<Vec<Rational>> = Vec::new();
    let mut out = Vec::new();
    for e in elements {
        let c = image.rational_coordinates(&qv(&e.point)).ok_or(FanError::NotInSupport)?;
        let key: Vec<Rational> = c.iter().map(frac).collect();
        let idx = match keys.iter().position(|k| *k == key) {
            Some(i) => i,
            None => {
                keys.push(key);
                keys.len() - 1
            }
        };
        out.push(idx);
    }
    Ok(out)
}

fn check_relation(sfan: &StackyFan, lambda: &[Rational]) -> Result<(), FanError> {
    if lambda.len() != sfan.ray_map.len() {
        return Err(FanError::NotInRelations);
    }
    let n = sfan.fan.ambient_rank();
    let zero = (0..n).all(|i| {
        let s: Rational = lambda.iter().zip(&sfan.ray_map).map(|(l, b)| l * q(b[i])).sum();
        s.is_zero()
    });
    if zero {
        Ok(())
    } else {
        Err(FanError::NotInRelations)
    }
}

/// Reduction `v(λ)` into `Box`. With a declared max cone, `λ` must lie in
/// `Λ_σ`; otherwise `Σ ⌈λᵢ⌉ bᵢ` is located among the Box elements.
pub fn reduction_v(sfan: &StackyFan, lambda: &[Rational], cone: Option<usize>) -> Result<BoxElement, FanError> {
    check_relation(sfan, lambda)?;
    match cone {
        Some(c) => {
            let cone_rays = sfan.fan.cones.get(c).ok_or_else(|| FanError::InvalidCone(format!("{c}")))?;
            if let Some(i) = (0..lambda.len()).find(|i| !cone_rays.contains(i) && !lambda[*i].is_integer()) {
                return Err(FanError::NotInLambda(format!("coordinate {i} is not integral outside the cone")));
            }
            let a: Vec<(usize, Rational)> =
                cone_rays.iter().map(|&i| (i, Rational::from_integer(ceil(&lambda[i])) - &lambda[i])).filter(|(_, x)| !x.is_zero()).collect();
            let n = sfan.fan.ambient_rank();
            let point: Vec<Rational> =
                (0..n).map(|k| a.iter().map(|(i, x)| x * q(sfan.ray_map[*i][k])).sum()).collect();
            Ok(BoxElement { cone: c, coeffs: a, point: to_i64(&point).expect("integral") })
        }
        None => {
            let n = sfan.fan.ambient_rank();
            let point: Vec<i64> = (0..n)
                .map(|k| {
                    let s: Rational = lambda.iter().zip(&sfan.ray_map).map(|(l, b)| Rational::from_integer(ceil(l)) * q(b[k])).sum();
                    s.to_integer().to_i64().expect("fits")
                })
                .collect();
            box_elements(sfan)?
                .into_iter()
                .find(|e| e.point == point)
                .ok_or_else(|| FanError::NotInLambda("ceiling sum is not a Box element".into()))
        }
    }
}

/// Result of the bounded search for nonempty `NE_g`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NeSupport {
    pub elements: Vec<BoxElement>,
    pub nonempty: Vec<bool>,
    /// Multiples `k/denominator` of each generator were tried for `k ≤ bound`.
    pub denominator: BigInt,
    pub bound: u32,
    pub decided_up_to_bound: bool,
}

/// For each Box element `g`, whether some `λ` in the cone spanned by the
/// Mori generators, with bounded coordinates, lies in some `Λ_σ` and
/// reduces to `g`.
pub fn ne_g_support(
    sfan: &StackyFan,
    mori: &[Vec<Rational>],
    nef: &[Vec<i64>],
    bound: u32,
) -> Result<NeSupport, FanError> {
    for (j, g) in mori.iter().enumerate() {
        check_relation(sfan, g).map_err(|_| FanError::InvalidMori(format!("generator {j} is not a relation")))?;
        for d in nef {
            let p: Rational = g.iter().zip(d).map(|(x, &a)| x * q(a)).sum();
            if p.is_negative() {
                return Err(FanError::InvalidMori(format!("generator {j} pairs negatively with a nef divisor")));
            }
        }
    }
    let elements = box_elements(sfan)?;
    let denominator = (0..sfan.fan.cones.len())
        .map(|c| sfan.cone_box(c).map(|b| BigInt::from(b.len())))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold(BigInt::one(), |acc, m| acc.lcm(&m));
    let mut nonempty = vec![false; elements.len()];
    let mut ks = vec![0u32; mori.len()];
    let p = sfan.ray_map.len();
    loop {
        let lambda: Vec<Rational> = (0..p)
            .map(|i| {
                mori.iter()
                    .zip(&ks)
                    .map(|(g, &k)| &g[i] * Rational::new(BigInt::from(k), denominator.clone()))
                    .sum()
            })
            .collect();
        for c in 0..sfan.fan.cones.len() {
            if let Ok(e) = reduction_v(sfan, &lambda, Some(c)) {
                if let Some(pos) = elements.iter().position(|x| x.point == e.point) {
                    nonempty[pos] = true;
                }
            }
        }
        let mut i = 0;
        loop {
            if i == ks.len() {
                return Ok(NeSupport { elements, nonempty, denominator, bound, decided_up_to_bound: true });
            }
            ks[i] += 1;
            if ks[i] <= bound {
                break;
            }
            ks[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2() -> Fan {
        Fan::standard(vec![vec![1, 0], vec![0, 1], vec![-1, -1]], vec![vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap()
    }

    #[test]
    fn rejects_overlapping_cones() {
        let r = Fan::standard(vec![vec![1, 0], vec![0, 1], vec![1, 1]], vec![vec![0, 1], vec![0, 2]]);
        assert_eq!(r.unwrap_err(), FanError::Inconsistent(0, 1));
    }

    #[test]
    fn p2_is_smooth_and_complete() {
        let f = p2();
        assert!(f.is_complete());
        assert!(f.smoothness().iter().all(|k| *k == ConeKind::Smooth));
        assert_eq!(star_subdivision(&f, &[1, 0]).unwrap(), f);
    }

    #[test]
    fn blow_up_corner() {
        let f = Fan::standard(vec![vec![1, 0], vec![0, 1]], vec![vec![0, 1]]).unwrap();
        let s = star_subdivision(&f, &[1, 1]).unwrap();
        assert_eq!(s.max_cones().len(), 2);
        assert_eq!(star_subdivision(&f, &[2, 2]), Err(FanError::NotPrimitive));
        assert_eq!(star_subdivision(&f, &[-1, 0]), Err(FanError::NotInSupport));
    }

    #[test]
    fn cartier_and_nef() {
        let f = p2();
        let m = cartier_data(&f, &[1, 1, 1]).unwrap();
        assert_eq!(m.m[0], vec![q(-1), q(-1)]);
        assert!(is_nef(&f, &[1, 1, 1]).unwrap());
        assert!(is_nef(&f, &[0, 0, 0]).unwrap());
        assert!(!is_nef(&f, &[-1, 0, 0]).unwrap());
        assert_eq!(contract_semiample(&f, &[0, 0, 0]).unwrap_err(), FanError::NotStronglyConvex);
        let (same, map) = contract_semiample(&f, &[1, 1, 1]).unwrap();
        assert_eq!(same, f);
        assert_eq!(map, vec![0, 1, 2]);
    }

    #[test]
    fn weighted_box() {
        // P(1,1,2): rays (1,0), (−1,−2)... use (−1,2) relation (1,1,2) on e1, e2.
        let f = Fan::standard(vec![vec![1, 0], vec![-1, 2], vec![0, -1]], vec![vec![0, 1], vec![1, 2], vec![0, 2]])
            .unwrap();
        let kinds = f.smoothness();
        assert_eq!(kinds[0], ConeKind::Singular { multiplicity: BigInt::from(2) });
        let b = box_elements(&StackyFan::canonical(f)).unwrap();
        assert_eq!(b.len(), 2);
        assert!(b[0].is_zero());
    }

    #[test]
    fn placing_triangulation_of_square_cone() {
        let f = Fan::standard(
            vec![vec![1, 0, 1], vec![0, 1, 1], vec![-1, 0, 1], vec![0, -1, 1]],
            vec![vec![0, 1, 2, 3]],
        )
        .unwrap();
        assert_eq!(f.smoothness(), vec![ConeKind::NonSimplicial]);
        let s = simplicialize(&f).unwrap();
        assert_eq!(s.max_cones().len(), 2);
    }
}
