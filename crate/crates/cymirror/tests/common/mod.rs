//! Shared test corpora.

#![allow(dead_code)]

use cymirror::fan::Fan;
use cymirror::polytope::{is_reflexive, polar_dual, LatticePolytope};
use std::collections::BTreeSet;

/// Reflexive polygons spanned by boundary points of `[−1,1]²`, with their
/// polar duals.
pub fn reflexive_polygons() -> Vec<LatticePolytope> {
    let ring: Vec<Vec<i64>> =
        vec![vec![1, 0], vec![1, 1], vec![0, 1], vec![-1, 1], vec![-1, 0], vec![-1, -1], vec![0, -1], vec![1, -1]];
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for mask in 1u32..256 {
        let pts: Vec<Vec<i64>> = (0..8).filter(|i| mask >> i & 1 == 1).map(|i| ring[i].clone()).collect();
        let Ok(p) = LatticePolytope::hull(2, &pts) else { continue };
        if !is_reflexive(&p) {
            continue;
        }
        for q in [p.clone(), polar_dual(&p).expect("reflexive")] {
            if seen.insert(q.vertices().to_vec()) {
                out.push(q);
            }
        }
    }
    out
}

/// Face fan of a polygon containing the origin in its interior.
pub fn face_fan_2d(p: &LatticePolytope) -> Fan {
    let mut rays = p.vertices().to_vec();
    rays.sort_by(|a, b| {
        let t = |v: &Vec<i64>| (v[1] as f64).atan2(v[0] as f64);
        t(a).partial_cmp(&t(b)).expect("finite")
    });
    let n = rays.len();
    let cones = (0..n).map(|i| vec![i, (i + 1) % n]).collect();
    Fan::standard(rays, cones).expect("face fan")
}

/// Boundary lattice points of a polygon that are not vertices.
pub fn edge_points(p: &LatticePolytope) -> Vec<Vec<i64>> {
    cymirror::polytope::integral_points(p)
        .into_iter()
        .filter(|v| v.iter().any(|&x| x != 0) && !p.vertices().contains(v))
        .collect()
}

pub fn simplex_cones(n: usize) -> Vec<Vec<usize>> {
    (0..n).map(|skip| (0..n).filter(|&i| i != skip).collect()).collect()
}
