//! Pre-quotient covering data: lattice towers `N″ ⊆ N′ ⊆ N`, the graph
//! embedding into the `ℙ(L ⊕ C)`-bundle, the lifted fan `X′`, and the
//! branch-locus checks.

use crate::fan::{
    cartier_data, contract_semiample, linearly_equivalent, simplicialize, star_subdivision, Fan, FanError,
};
use crate::lattice::{big, lattice_index, perp_sections_equal, IntMatrix, LatticeError, RatLattice, Sublattice};
use crate::linalg;
use crate::rational::Rational;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

/// Failures of the covering constructions.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuotientError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Fan(#[from] FanError),
    #[error("construction check failed: {0}")]
    Check(String),
}

/// A lattice tower `N″ ⊆ N′ ⊆ N = ℤⁿ` under a fan with rays `uᵢ ∈ N`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverSpec {
    pub name: String,
    pub fan: Fan,
    pub n: Sublattice,
    pub n_prime: Sublattice,
    pub n_double_prime: Sublattice,
    /// `|G| = [N : N″]`.
    pub group_order: u64,
    /// `|G′| = [N′ : N″]`.
    pub prime_group_order: u64,
    /// `[N : N′]`.
    pub cover_degree: u64,
    /// Primitive generators `ρᵢ = 2uᵢ` of the rays in `N′`, in the basis of `N′`.
    pub rays_in_prime_basis: Vec<Vec<i64>>,
}

impl CoverSpec {
    /// Dual lattice `M′` of `N′`.
    pub fn m_prime(&self) -> RatLattice {
        RatLattice::dual_of(&self.n_prime).expect("full rank")
    }

    /// Dual lattice `M` of `N`.
    pub fn m(&self) -> RatLattice {
        RatLattice::dual_of(&self.n).expect("full rank")
    }
}

fn index(sub: &Sublattice, sup: &Sublattice) -> Result<u64, QuotientError> {
    lattice_index(sub, sup)?.to_u64().ok_or_else(|| QuotientError::Check("index overflow".into()))
}

fn simplex_cones(n: usize) -> Vec<Vec<usize>> {
    (0..n).map(|skip| (0..n).filter(|&i| i != skip).collect()).collect()
}

/// Builds the tower `(2ℤ)ⁿ ⊆ N′ ⊆ ℤⁿ` where `N′` has the given basis.
pub fn build_cover(name: &str, rays: Vec<Vec<i64>>, prime_basis: &[Vec<i64>]) -> Result<CoverSpec, QuotientError> {
    let dim = prime_basis.len();
    let fan = Fan::standard(rays, simplex_cones(dim + 1))?;
    let n = Sublattice::full(dim);
    let n_prime = Sublattice::from_columns(dim, prime_basis)?;
    let n_double_prime = Sublattice::scaled_full(dim, 2);
    if !n_prime.contains_lattice(&n_double_prime) || !n.contains_lattice(&n_prime) {
        return Err(QuotientError::Check("tower inclusions fail".into()));
    }
    let group_order = index(&n_double_prime, &n)?;
    let prime_group_order = index(&n_double_prime, &n_prime)?;
    let cover_degree = index(&n_prime, &n)?;
    if group_order != prime_group_order * cover_degree {
        return Err(QuotientError::Check("indices are not multiplicative".into()));
    }
    let rays_in_prime_basis = fan
        .rays()
        .iter()
        .map(|u| {
            let rho: Vec<i64> = u.iter().map(|x| 2 * x).collect();
            n_prime
                .coordinates(&big(&rho))
                .map(|c| c.iter().map(|x| x.to_i64().expect("small")).collect())
                .ok_or_else(|| QuotientError::Check("2u is not in N′".into()))
        })
        .collect::<Result<_, _>>()?;
    Ok(CoverSpec {
        name: name.into(),
        fan,
        n,
        n_prime,
        n_double_prime,
        group_order,
        prime_group_order,
        cover_degree,
        rays_in_prime_basis,
    })
}

/// The `ℙ⁷` tower with `N′ = {Σaᵢ even}` in the basis `vᵢ = eᵢ + eᵢ₊₁`, `v₇ = e₁ + e₇`.
pub fn build_cover_hhhh() -> CoverSpec {
    let mut rays: Vec<Vec<i64>> = (0..7).map(|i| (0..7).map(|j| (i == j) as i64).collect()).collect();
    rays.push(vec![-1; 7]);
    let mut basis: Vec<Vec<i64>> = (0..6).map(|i| (0..7).map(|j| (j == i || j == i + 1) as i64).collect()).collect();
    basis.push(vec![1, 0, 0, 0, 0, 0, 1]);
    build_cover("hhhh", rays, &basis).expect("ℙ⁷ tower is valid")
}

/// The `ℙ(1,1,1,1,4)` tower with `N′ = {Σaᵢ even}` in the basis
/// `(1,−1,0,0), (0,1,1,0), (0,0,1,1), (1,0,0,1)`.
pub fn build_cover_4h() -> CoverSpec {
    let rays = vec![vec![1, 0, 0, 0], vec![0, 1, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1], vec![-1, -1, -1, -4]];
    let basis = vec![vec![1, -1, 0, 0], vec![0, 1, 1, 0], vec![0, 0, 1, 1], vec![1, 0, 0, 1]];
    build_cover("4h", rays, &basis).expect("ℙ(1,1,1,1,4) tower is valid")
}

/// Whether `ρ^⊥ ∩ M_sub = ρ^⊥ ∩ M_sup` for every ray, where `M_sub`, `M_sup`
/// are the duals of `sup ⊇ sub` (so `M_sub ⊇ M_sup`).
pub fn branch_divisor_check_rays(rays: &[Vec<i64>], sub: &Sublattice, sup: &Sublattice) -> Result<bool, QuotientError> {
    let m_sub = RatLattice::dual_of(sub)?;
    let m_sup = RatLattice::dual_of(sup)?;
    Ok(rays.iter().all(|r| perp_sections_equal(&big(r), &m_sup, &m_sub)))
}

/// Double-cover branch check `N′ ⊆ N` on the tower's rays.
pub fn branch_divisor_check(tower: &CoverSpec) -> Result<bool, QuotientError> {
    branch_divisor_check_rays(tower.fan.rays(), &tower.n_prime, &tower.n)
}

/// Fan `Σ_Z` of `ℙ(O(−K) ⊕ O)` over a complete fan: rays `νⱼ = (ρⱼ, 1)`,
/// `e₀ = (0, −1)`, `e∞ = (0, 1)`; cones `σ ∪ {e₀}` and `σ ∪ {e∞}`.
pub fn bundle_fan(base: &Fan) -> Result<Fan, FanError> {
    let n = base.ambient_rank();
    let mut rays: Vec<Vec<i64>> = base.rays().iter().map(|r| [r.clone(), vec![1]].concat()).collect();
    let p = rays.len();
    rays.push([vec![0; n], vec![-1]].concat());
    rays.push([vec![0; n], vec![1]].concat());
    let mut cones = Vec::new();
    for c in base.max_cones() {
        cones.push([c.clone(), vec![p]].concat());
        cones.push([c.clone(), vec![p + 1]].concat());
    }
    Fan::standard(rays, cones)
}

/// The graph embedding `X → Z` and the lifted fan `X′`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphEmbeddingData {
    pub base: Fan,
    pub bundle: Fan,
    pub xprime: Fan,
    /// Index in `xprime` of the ray `(ρⱼ, 1)` for each base ray.
    pub ray_correspondence: Vec<usize>,
    /// Index in `xprime` of `(0, −1)`.
    pub apex: usize,
    /// `D_{e₀} ∼ Σ D_{νⱼ}` on `X′`, with `e₀ = (0, −1)`.
    pub e0_equivalent: bool,
}

fn cones_as_ray_sets(fan: &Fan, containing: &[i64]) -> BTreeSet<BTreeSet<Vec<i64>>> {
    fan.max_cones()
        .iter()
        .map(|c| c.iter().map(|&i| fan.rays()[i].clone()).collect::<BTreeSet<_>>())
        .filter(|s| s.contains(containing))
        .collect()
}

/// Builds `Σ_Z`, contracts along `H = D_{e∞} + Σ D_{νⱼ}`, subdivides at
/// each `(ρⱼ, 1)`, simplicializes, and verifies the finite part and the
/// Cartier property of `K_{X′}`.
pub fn build_xprime(base: &Fan) -> Result<GraphEmbeddingData, QuotientError> {
    if !base.is_complete() {
        return Err(QuotientError::Fan(FanError::NotComplete));
    }
    let n = base.ambient_rank();
    let p = base.rays().len();
    let bundle = bundle_fan(base)?;
    let mut h = vec![1i64; p + 2];
    h[p] = 0;
    let (mut fan, _) = contract_semiample(&bundle, &h)?;
    for r in bundle.rays().iter().take(p) {
        fan = star_subdivision(&fan, r)?;
    }
    let apex_ray = [vec![0; n], vec![-1]].concat();
    let before = cones_as_ray_sets(&fan, &apex_ray);
    let fan = simplicialize(&fan)?;
    if cones_as_ray_sets(&fan, &apex_ray) != before {
        return Err(QuotientError::Check("simplicialization touched the finite part".into()));
    }
    if before != cones_as_ray_sets(&bundle, &apex_ray) {
        return Err(QuotientError::Check("finite part differs from the τ₀-subfan of Z".into()));
    }
    cartier_data(&fan, &vec![1; fan.rays().len()])?;
    let position = |v: &[i64]| fan.rays().iter().position(|r| r == v);
    let ray_correspondence: Vec<usize> = bundle.rays()[..p]
        .iter()
        .map(|r| position(r).ok_or_else(|| QuotientError::Check("lifted ray missing".into())))
        .collect::<Result<_, _>>()?;
    let apex = position(&apex_ray).ok_or_else(|| QuotientError::Check("apex ray missing".into()))?;
    let mut e0 = vec![0i64; fan.rays().len()];
    e0[apex] = 1;
    let mut nus = vec![0i64; fan.rays().len()];
    for &i in &ray_correspondence {
        nus[i] = 1;
    }
    let e0_equivalent = linearly_equivalent(&fan, &e0, &nus);
    Ok(GraphEmbeddingData { base: base.clone(), bundle, xprime: fan, ray_correspondence, apex, e0_equivalent })
}

/// A unimodular `T` with `T·a = b` as fans (rays and cones), found by
/// matching one maximal cone of `a` against every ordering of every maximal
/// cone of `b`.
pub fn find_fan_isomorphism(a: &Fan, b: &Fan) -> Option<IntMatrix> {
    let n = a.ambient_rank();
    if n != b.ambient_rank() || a.rays().len() != b.rays().len() || a.max_cones().len() != b.max_cones().len() {
        return None;
    }
    let source = a.max_cones().iter().find(|c| c.len() == n)?;
    let src: Vec<Vec<i64>> = source.iter().map(|&i| a.rays()[i].clone()).collect();
    let src_inv = linalg::inverse(&linalg::transpose(&linalg::from_int_rows(&src), n))?;
    for cone in b.max_cones().iter().filter(|c| c.len() == n) {
        for perm in permutations(cone) {
            let dst: Vec<Vec<i64>> = perm.iter().map(|&i| b.rays()[i].clone()).collect();
            let dst_cols = linalg::transpose(&linalg::from_int_rows(&dst), n);
            let t = mat_mul(&dst_cols, &src_inv);
            if let Some(m) = unimodular(&t) {
                let rays: Vec<Vec<i64>> = a.rays().iter().map(|r| apply(&m, r)).collect();
                if Fan::standard(rays, a.max_cones().to_vec()).map(|f| f == *b).unwrap_or(false) {
                    return Some(IntMatrix::from_rows(&m).expect("square"));
                }
            }
        }
    }
    None
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

fn mat_mul(a: &linalg::RatMatrix, b: &linalg::RatMatrix) -> linalg::RatMatrix {
    a.iter()
        .map(|row| (0..b[0].len()).map(|j| row.iter().zip(b).map(|(x, r)| x * &r[j]).sum()).collect())
        .collect()
}

fn unimodular(t: &linalg::RatMatrix) -> Option<Vec<Vec<i64>>> {
    if !t.iter().flatten().all(Rational::is_integer) || !linalg::det(t).abs().is_one() {
        return None;
    }
    t.iter().map(|r| r.iter().map(|x| x.to_integer().to_i64()).collect()).collect()
}

fn apply(m: &[Vec<i64>], v: &[i64]) -> Vec<i64> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

/// Whether the half-integral point `a/2` lies in `M′`.
pub fn in_m_prime(tower: &CoverSpec, a: &[i64]) -> bool {
    let half: Vec<Rational> = a.iter().map(|&x| Rational::new(x.into(), 2.into())).collect();
    tower.m_prime().contains(&half)
}

/// `[N̄ : N̄′]` for `N̄′ = N × 2ℤ ⊆ N̄ = ℤⁿ⁺¹`.
pub fn lifted_tower(n: usize) -> (Sublattice, Sublattice) {
    let full = Sublattice::full(n + 1);
    let mut b = IntMatrix::identity(n + 1);
    b.set(n, n, 2.into());
    (Sublattice::new(b).expect("nonsingular"), full)
}
