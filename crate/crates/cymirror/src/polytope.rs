//! Lattice polytopes: facets, polar duals, reflexivity, lattice points,
//! Minkowski sums, nef-partition duals, section polytopes and pyramids.

use crate::linalg::{self, from_int_rows};
use crate::lp;
use crate::rational::Rational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolytopeError {
    #[error("polytope has no points")]
    Empty,
    #[error("polytope has dimension {dim} in rank {rank}")]
    LowerDimensional { dim: usize, rank: usize },
    #[error("origin is not an interior point")]
    OriginNotInterior,
    #[error("polar dual has a non-integral vertex")]
    NonLatticeDual,
    #[error("ambient ranks differ ({0} vs {1})")]
    RankMismatch(usize, usize),
    #[error("polyhedron is unbounded")]
    Unbounded,
    #[error("polyhedron has a non-integral vertex")]
    NonLatticeVertex,
    #[error("polytope is not reflexive: {0}")]
    NonReflexive(String),
    #[error("invalid nef-partition: {0}")]
    InvalidPartition(String),
    #[error("nested-pyramid check failed: {0:?}")]
    MorrisonFailed(MorrisonReport),
}

/// Convex hull of finitely many lattice points, stored by its sorted
/// vertex list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "PolytopeJson", into = "PolytopeJson")]
pub struct LatticePolytope {
    rank: usize,
    vertices: Vec<Vec<i64>>,
}

#[derive(Serialize, Deserialize)]
struct PolytopeJson {
    rank: usize,
    vertices: Vec<Vec<i64>>,
}

impl TryFrom<PolytopeJson> for LatticePolytope {
    type Error = PolytopeError;
    fn try_from(j: PolytopeJson) -> Result<Self, PolytopeError> {
        LatticePolytope::hull(j.rank, &j.vertices)
    }
}

impl From<LatticePolytope> for PolytopeJson {
    fn from(p: LatticePolytope) -> Self {
        PolytopeJson { rank: p.rank, vertices: p.vertices }
    }
}

/// Inequality `⟨m, normal⟩ ≥ −offset`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Facet {
    pub normal: Vec<i64>,
    pub offset: i64,
}

impl Facet {
    pub fn value(&self, m: &[i64]) -> i64 {
        dot(m, &self.normal)
    }

    pub fn holds(&self, m: &[i64]) -> bool {
        self.value(m) >= -self.offset
    }
}

/// Irredundant inequality description with primitive normals.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FacetSystem {
    pub inequalities: Vec<Facet>,
}

/// Affine hull equations plus facet inequalities lifted to the ambient
/// space; valid for polytopes of any dimension.
#[derive(Clone, Debug)]
struct HRep {
    dim: usize,
    equalities: Vec<(Vec<i64>, i64)>,
    facets: Vec<Facet>,
}

impl HRep {
    fn contains(&self, m: &[i64]) -> bool {
        self.equalities.iter().all(|(w, c)| dot(m, w) == *c) && self.facets.iter().all(|f| f.holds(m))
    }
}

pub(crate) fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn to_i64(v: &[num_bigint::BigInt]) -> Vec<i64> {
    v.iter().map(|x| x.to_i64().expect("coordinates fit in i64")).collect()
}

fn h_rep(rank: usize, points: &[Vec<i64>]) -> HRep {
    let p0 = &points[0];
    let diffs: Vec<Vec<i64>> =
        points[1..].iter().map(|p| p.iter().zip(p0).map(|(a, b)| a - b).collect()).collect();
    let dm = from_int_rows(&diffs);
    let (_, pivots) = linalg::rref(&dm, rank);
    let equalities = linalg::integer_nullspace(&dm, rank)
        .iter()
        .map(|w| {
            let w = to_i64(w);
            let c = dot(p0, &w);
            (w, c)
        })
        .collect();
    let k = pivots.len();
    let proj: Vec<Vec<i64>> = points.iter().map(|p| pivots.iter().map(|&i| p[i]).collect()).collect();
    let mut found = BTreeSet::new();
    if k > 0 {
        for subset in combinations(proj.len(), k) {
            let base = &proj[subset[0]];
            let rows: Vec<Vec<i64>> = subset[1..]
                .iter()
                .map(|&i| proj[i].iter().zip(base).map(|(a, b)| a - b).collect())
                .collect();
            let rm = from_int_rows(&rows);
            let ns = linalg::integer_nullspace(&rm, k);
            if ns.len() != 1 {
                continue;
            }
            let w = to_i64(&ns[0]);
            let t = dot(base, &w);
            let values: Vec<i64> = proj.iter().map(|p| dot(p, &w)).collect();
            let facet = if values.iter().all(|&v| v >= t) {
                Facet { normal: w, offset: -t }
            } else if values.iter().all(|&v| v <= t) {
                Facet { normal: w.iter().map(|x| -x).collect(), offset: t }
            } else {
                continue;
            };
            found.insert(facet);
        }
    }
    let facets = found
        .into_iter()
        .map(|f| {
            let mut normal = vec![0; rank];
            for (j, &i) in pivots.iter().enumerate() {
                normal[i] = f.normal[j];
            }
            Facet { normal, offset: f.offset }
        })
        .collect();
    HRep { dim: k, equalities, facets }
}

/// All `k`-element subsets of `0..n` in lexicographic order.
pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

impl LatticePolytope {
    /// Convex hull of the given points, canonicalized to sorted vertices.
    pub fn hull(rank: usize, points: &[Vec<i64>]) -> Result<Self, PolytopeError> {
        if let Some(p) = points.iter().find(|p| p.len() != rank) {
            return Err(PolytopeError::RankMismatch(p.len(), rank));
        }
        let pts: Vec<Vec<i64>> = points.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
        if pts.is_empty() {
            return Err(PolytopeError::Empty);
        }
        let h = h_rep(rank, &pts);
        let vertices = if h.dim == 0 {
            pts
        } else {
            pts.into_iter()
                .filter(|p| {
                    let tight: Vec<Vec<i64>> =
                        h.facets.iter().filter(|f| f.value(p) == -f.offset).map(|f| f.normal.clone()).collect();
                    linalg::rank(&from_int_rows(&tight), rank) == h.dim
                })
                .collect()
        };
        Ok(LatticePolytope { rank, vertices })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn vertices(&self) -> &[Vec<i64>] {
        &self.vertices
    }

    fn h(&self) -> HRep {
        h_rep(self.rank, &self.vertices)
    }

    pub fn dimension(&self) -> usize {
        self.h().dim
    }

    pub fn contains(&self, m: &[i64]) -> bool {
        m.len() == self.rank && self.h().contains(m)
    }

    pub fn contains_polytope(&self, other: &LatticePolytope) -> bool {
        let h = self.h();
        other.rank == self.rank && other.vertices.iter().all(|v| h.contains(v))
    }
}

/// Irredundant H-representation of a full-dimensional polytope.
pub fn facets(p: &LatticePolytope) -> Result<FacetSystem, PolytopeError> {
    let h = p.h();
    if h.dim != p.rank {
        return Err(PolytopeError::LowerDimensional { dim: h.dim, rank: p.rank });
    }
    Ok(FacetSystem { inequalities: h.facets })
}

/// `{y : ⟨x, y⟩ ≥ −1 for all x ∈ P}` as a lattice polytope.
pub fn polar_dual(p: &LatticePolytope) -> Result<LatticePolytope, PolytopeError> {
    let fs = facets(p).map_err(|_| PolytopeError::OriginNotInterior)?;
    if fs.inequalities.iter().any(|f| f.offset <= 0) {
        return Err(PolytopeError::OriginNotInterior);
    }
    let mut verts = Vec::new();
    for f in &fs.inequalities {
        if f.normal.iter().any(|x| x % f.offset != 0) {
            return Err(PolytopeError::NonLatticeDual);
        }
        verts.push(f.normal.iter().map(|x| x / f.offset).collect());
    }
    LatticePolytope::hull(p.rank, &verts)
}

/// Full-dimensional, origin interior, every facet at lattice distance one.
pub fn is_reflexive(p: &LatticePolytope) -> bool {
    match facets(p) {
        Ok(fs) => fs.inequalities.iter().all(|f| f.offset == 1),
        Err(_) => false,
    }
}

/// Every lattice point of `P`.
pub fn integral_points(p: &LatticePolytope) -> Vec<Vec<i64>> {
    let h = p.h();
    let lo: Vec<i64> = (0..p.rank).map(|i| p.vertices.iter().map(|v| v[i]).min().unwrap_or(0)).collect();
    let hi: Vec<i64> = (0..p.rank).map(|i| p.vertices.iter().map(|v| v[i]).max().unwrap_or(0)).collect();
    let mut out = Vec::new();
    let mut cur = lo.clone();
    loop {
        if h.contains(&cur) {
            out.push(cur.clone());
        }
        let mut i = 0;
        loop {
            if i == p.rank {
                return out;
            }
            if cur[i] < hi[i] {
                cur[i] += 1;
                break;
            }
            cur[i] = lo[i];
            i += 1;
        }
    }
}

pub fn minkowski_sum(p: &LatticePolytope, q: &LatticePolytope) -> Result<LatticePolytope, PolytopeError> {
    if p.rank != q.rank {
        return Err(PolytopeError::RankMismatch(p.rank, q.rank));
    }
    let sums: Vec<Vec<i64>> = p
        .vertices
        .iter()
        .flat_map(|a| q.vertices.iter().map(move |b| a.iter().zip(b).map(|(x, y)| x + y).collect()))
        .collect();
    LatticePolytope::hull(p.rank, &sums)
}

/// Batyrev–Borisov dual of a nef-partition: `∇ₖ = Conv({0} ∪ Iₖ)` and
/// their Minkowski sum, checked against `∇^∨ = Conv(Δ₁, …, Δᵣ)`.
pub fn nef_partition_dual(
    rays: &[Vec<i64>],
    partition: &[Vec<usize>],
    delta_parts: &[LatticePolytope],
) -> Result<(Vec<LatticePolytope>, LatticePolytope), PolytopeError> {
    let rank = rays.first().map(Vec::len).ok_or(PolytopeError::Empty)?;
    let mut seen = vec![false; rays.len()];
    for &i in partition.iter().flatten() {
        if i >= rays.len() || std::mem::replace(&mut seen[i], true) {
            return Err(PolytopeError::InvalidPartition(format!("ray {i} is out of range or repeated")));
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(PolytopeError::InvalidPartition("partition does not cover every ray".into()));
    }
    if delta_parts.len() != partition.len() {
        return Err(PolytopeError::InvalidPartition("one section polytope per part is required".into()));
    }
    let mut parts = Vec::new();
    for part in partition {
        let mut pts = vec![vec![0; rank]];
        pts.extend(part.iter().map(|&i| rays[i].clone()));
        parts.push(LatticePolytope::hull(rank, &pts)?);
    }
    let mut nabla = LatticePolytope::hull(rank, &[vec![0; rank]])?;
    for p in &parts {
        nabla = minkowski_sum(&nabla, p)?;
    }
    if !is_reflexive(&nabla) {
        return Err(PolytopeError::NonReflexive("Minkowski sum of the parts".into()));
    }
    let union: Vec<Vec<i64>> = delta_parts.iter().flat_map(|d| d.vertices.clone()).collect();
    if polar_dual(&nabla)? != LatticePolytope::hull(rank, &union)? {
        return Err(PolytopeError::InvalidPartition("dual of the sum is not the hull of the parts".into()));
    }
    Ok((parts, nabla))
}

/// `P_k = Conv({(k·u, 1) : u ∈ Vert(P)} ∪ {(0, −1)})`.
pub fn pyramid_k(p: &LatticePolytope, k: i64) -> LatticePolytope {
    let mut pts: Vec<Vec<i64>> = p
        .vertices
        .iter()
        .map(|u| {
            let mut v: Vec<i64> = u.iter().map(|x| k * x).collect();
            v.push(1);
            v
        })
        .collect();
    let mut apex = vec![0; p.rank];
    apex.push(-1);
    pts.push(apex);
    LatticePolytope::hull(p.rank + 1, &pts).expect("pyramid points share a rank")
}

/// Vertices of `{m : ⟨m, ρ⟩ ≥ −a_ρ}`.
pub fn section_polytope(rays: &[Vec<i64>], coeffs: &[i64]) -> Result<LatticePolytope, PolytopeError> {
    let rank = rays.first().map(Vec::len).ok_or(PolytopeError::Unbounded)?;
    if coeffs.len() != rays.len() {
        return Err(PolytopeError::RankMismatch(coeffs.len(), rays.len()));
    }
    if !positively_spanning(rank, rays) {
        return Err(PolytopeError::Unbounded);
    }
    let mut verts = Vec::new();
    for subset in combinations(rays.len(), rank) {
        let m: Vec<Vec<i64>> = subset.iter().map(|&i| rays[i].clone()).collect();
        let rm = from_int_rows(&m);
        if linalg::rank(&rm, rank) < rank {
            continue;
        }
        let b: Vec<Rational> = subset.iter().map(|&i| Rational::from_integer((-coeffs[i]).into())).collect();
        let x = linalg::solve(&rm, rank, &b).expect("square system of full rank");
        let feasible = rays.iter().zip(coeffs).all(|(r, &a)| {
            let v: Rational = x.iter().zip(r).map(|(xi, ri)| xi * Rational::from_integer((*ri).into())).sum();
            v >= Rational::from_integer((-a).into())
        });
        if !feasible {
            continue;
        }
        if !x.iter().all(Rational::is_integer) {
            return Err(PolytopeError::NonLatticeVertex);
        }
        verts.push(x.iter().map(|c| c.to_integer().to_i64().expect("fits in i64")).collect());
    }
    if verts.is_empty() {
        return Err(PolytopeError::Empty);
    }
    LatticePolytope::hull(rank, &verts)
}

/// Whether the cone generated by `rays` is the whole space.
pub(crate) fn positively_spanning(rank: usize, rays: &[Vec<i64>]) -> bool {
    let cols = rays.len();
    let a: Vec<Vec<Rational>> = (0..rank)
        .map(|i| rays.iter().map(|r| Rational::from_integer(r[i].into())).collect())
        .collect();
    if linalg::rank(&a, cols) < rank {
        return false;
    }
    let b: Vec<Rational> = (0..rank).map(|i| -rays.iter().map(|r| Rational::from_integer(r[i].into())).sum::<Rational>()).collect();
    lp::feasible(&a, cols, &b).is_some()
}

/// Outcome of the nested-pyramid checks for a reflexive polytope.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorrisonReport {
    pub delta1_in_delta2: bool,
    pub nabla1_in_nabla2: bool,
    pub delta2_dual_is_nabla1: bool,
    pub nabla2_dual_is_delta1: bool,
    pub all_reflexive: bool,
}

impl MorrisonReport {
    pub fn all_pass(&self) -> bool {
        self.delta1_in_delta2
            && self.nabla1_in_nabla2
            && self.delta2_dual_is_nabla1
            && self.nabla2_dual_is_delta1
            && self.all_reflexive
    }
}

/// Checks `Δ₁ ⊆ Δ₂`, `∇₁ ⊆ ∇₂`, `Δ₂^∨ = ∇₁`, `∇₂^∨ = Δ₁` and reflexivity of
/// all four, where `Pₖ` is [`pyramid_k`] and `∇ = Δ^∨`.
pub fn morrison_check(delta: &LatticePolytope) -> Result<MorrisonReport, PolytopeError> {
    if !is_reflexive(delta) {
        return Err(PolytopeError::NonReflexive("input".into()));
    }
    let nabla = polar_dual(delta)?;
    let (d1, d2) = (pyramid_k(delta, 1), pyramid_k(delta, 2));
    let (n1, n2) = (pyramid_k(&nabla, 1), pyramid_k(&nabla, 2));
    let report = MorrisonReport {
        delta1_in_delta2: d2.contains_polytope(&d1),
        nabla1_in_nabla2: n2.contains_polytope(&n1),
        delta2_dual_is_nabla1: polar_dual(&d2).ok().as_ref() == Some(&n1),
        nabla2_dual_is_delta1: polar_dual(&n2).ok().as_ref() == Some(&d1),
        all_reflexive: [&d1, &d2, &n1, &n2].iter().all(|p| is_reflexive(p)),
    };
    if report.all_pass() {
        Ok(report)
    } else {
        Err(PolytopeError::MorrisonFailed(report))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p3() -> LatticePolytope {
        LatticePolytope::hull(
            3,
            &[vec![3, -1, -1], vec![-1, 3, -1], vec![-1, -1, 3], vec![-1, -1, -1]],
        )
        .unwrap()
    }

    #[test]
    fn simplex_facets() {
        let s = LatticePolytope::hull(2, &[vec![0, 0], vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(facets(&s).unwrap().inequalities.len(), 3);
    }

    #[test]
    fn hull_drops_interior_points() {
        let s = LatticePolytope::hull(2, &[vec![0, 0], vec![2, 0], vec![0, 2], vec![1, 1], vec![1, 0]]).unwrap();
        assert_eq!(s.vertices().len(), 3);
        let seg = LatticePolytope::hull(2, &[vec![0, 0], vec![1, 1], vec![2, 2]]).unwrap();
        assert_eq!(seg.vertices(), &[vec![0, 0], vec![2, 2]]);
        assert!(facets(&seg).is_err());
    }

    #[test]
    fn projective_space_duals() {
        let d = p3();
        assert!(is_reflexive(&d));
        let n = polar_dual(&d).unwrap();
        let expected =
            LatticePolytope::hull(3, &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![-1, -1, -1]]).unwrap();
        assert_eq!(n, expected);
        assert_eq!(polar_dual(&n).unwrap(), d);
        assert_eq!(integral_points(&n).len(), 5);
        assert_eq!(integral_points(&d).len(), 35);
    }

    #[test]
    fn non_reflexive() {
        let p = LatticePolytope::hull(2, &[vec![2, 0], vec![-2, 0], vec![0, 1], vec![0, -1]]).unwrap();
        assert!(!is_reflexive(&p));
        assert_eq!(polar_dual(&p), Err(PolytopeError::NonLatticeDual));
    }

    #[test]
    fn pyramid_of_point() {
        let pt = LatticePolytope::hull(0, &[vec![]]).unwrap();
        let seg = pyramid_k(&pt, 1);
        assert_eq!(seg.vertices(), &[vec![-1], vec![1]]);
    }

    #[test]
    fn unbounded_section() {
        assert_eq!(section_polytope(&[vec![1, 0], vec![0, 1]], &[1, 1]), Err(PolytopeError::Unbounded));
    }
}
