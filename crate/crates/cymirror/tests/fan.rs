mod common;

use cymirror::fan::*;
use cymirror::rational::{int, rat};
use num_bigint::BigInt;

fn simplex_cones(n: usize) -> Vec<Vec<usize>> {
    (0..n).map(|skip| (0..n).filter(|&i| i != skip).collect()).collect()
}

fn p7_in_n_prime() -> Fan {
    let rays = vec![
        vec![1, -1, 1, -1, 1, -1, 1],
        vec![1, 1, -1, 1, -1, 1, -1],
        vec![-1, 1, 1, -1, 1, -1, 1],
        vec![1, -1, 1, 1, -1, 1, -1],
        vec![-1, 1, -1, 1, 1, -1, 1],
        vec![1, -1, 1, -1, 1, 1, -1],
        vec![-1, 1, -1, 1, -1, 1, 1],
        vec![-1, -1, -1, -1, -1, -1, -1],
    ];
    Fan::standard(rays, simplex_cones(8)).unwrap()
}

fn p11114() -> Fan {
    let rays = vec![vec![1, 0, 0, 0], vec![0, 1, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1], vec![-1, -1, -1, -4]];
    Fan::standard(rays, simplex_cones(5)).unwrap()
}

fn p3() -> Fan {
    let rays = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![-1, -1, -1]];
    Fan::standard(rays, simplex_cones(4)).unwrap()
}

/// Fan of the bundle `P(O(−K) ⊕ O)` over a fan with rays `ρ`: rays
/// `(ρ,1)`, `e₀ = (0,−1)`, `e∞ = (0,1)`.
fn bundle_fan(base: &Fan) -> Fan {
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
    Fan::standard(rays, cones).unwrap()
}

#[test]
fn p7_in_n_prime_multiplicities() {
    let f = p7_in_n_prime();
    assert!(f.is_complete());
    for k in f.smoothness() {
        assert_eq!(k, ConeKind::Singular { multiplicity: BigInt::from(64) });
    }
    let s = StackyFan::canonical(f.clone());
    for c in 0..8 {
        assert_eq!(s.cone_box(c).unwrap().len(), 64);
    }
    let b = box_elements(&s).unwrap();
    assert_eq!(b.len(), 127);
    let classes = box_group_classes(&s, &b).unwrap();
    assert_eq!(classes.iter().max().unwrap() + 1, 64);
}

#[test]
fn p11114_singular_cone() {
    let f = p11114();
    let kinds = f.smoothness();
    for (c, k) in kinds.iter().enumerate() {
        if f.max_cones()[c] == vec![0, 1, 2, 4] {
            assert_eq!(*k, ConeKind::Singular { multiplicity: BigInt::from(4) });
        } else {
            assert_eq!(*k, ConeKind::Smooth);
        }
    }
    let s = StackyFan::canonical(f);
    let b = box_elements(&s).unwrap();
    assert_eq!(b.len(), 4);
    let mut pts: Vec<Vec<i64>> = b.iter().map(|e| e.point.clone()).collect();
    pts.sort();
    assert_eq!(pts, vec![vec![0, 0, 0, -3], vec![0, 0, 0, -2], vec![0, 0, 0, -1], vec![0, 0, 0, 0]]);
    for e in &b {
        if !e.is_zero() {
            let c = &e.coeffs[0].1;
            assert!(e.coeffs.iter().all(|(i, x)| x == c && [0, 1, 2, 4].contains(i)));
        }
    }
}

#[test]
fn p11114_in_n_prime() {
    let rays = vec![vec![1, 1, -1, 1], vec![-1, 1, -1, 1], vec![1, 1, 1, -1], vec![-1, -1, 1, 1], vec![3, 1, -3, -5]];
    let f = Fan::standard(rays, simplex_cones(5)).unwrap();
    let singular = ConeKind::Singular { multiplicity: BigInt::from(32) };
    for (c, k) in f.max_cones().iter().zip(f.smoothness()) {
        let m = if *c == vec![0, 1, 2, 4] { singular.clone() } else { ConeKind::Singular { multiplicity: BigInt::from(8) } };
        assert_eq!(k, m);
    }
}

#[test]
fn reductions() {
    let s = StackyFan::canonical(p7_in_n_prime());
    let half = vec![rat(1, 2); 8];
    assert!(reduction_v(&s, &half, None).unwrap().is_zero());
    assert!(reduction_v(&s, &vec![int(3); 8], Some(0)).unwrap().is_zero());
    assert!(matches!(reduction_v(&s, &half, Some(0)), Err(FanError::NotInLambda(_))));

    let s = StackyFan::canonical(p11114());
    let lam = vec![rat(1, 4), rat(1, 4), rat(1, 4), int(1), rat(1, 4)];
    let v = reduction_v(&s, &lam, None).unwrap();
    assert_eq!(v.point, vec![0, 0, 0, -3]);
    let sing = s.fan().max_cones().iter().position(|c| *c == vec![0, 1, 2, 4]).unwrap();
    let w = reduction_v(&s, &lam, Some(sing)).unwrap();
    assert_eq!(w.point, v.point);
    assert!(w.coeffs.iter().all(|(_, x)| *x == rat(3, 4)));
    let not_relation = vec![rat(1, 4); 5];
    assert_eq!(reduction_v(&s, &not_relation, None), Err(FanError::NotInRelations));
}

#[test]
fn ne_g_supports() {
    let s = StackyFan::canonical(p7_in_n_prime());
    let nef: Vec<Vec<i64>> = (0..8).map(|i| (0..8).map(|j| (i == j) as i64).collect()).collect();
    let r = ne_g_support(&s, &[vec![int(1); 8]], &nef, 4 * 64).unwrap();
    let hits: Vec<bool> = r.nonempty.clone();
    assert!(hits[0]);
    assert_eq!(hits.iter().filter(|&&h| h).count(), 1);

    let s = StackyFan::canonical(p11114());
    let gen = vec![int(1), int(1), int(1), int(4), int(1)];
    let nef: Vec<Vec<i64>> = vec![vec![1, 0, 0, 0, 0]];
    let r = ne_g_support(&s, &[gen.clone()], &nef, 16).unwrap();
    assert!(r.nonempty.iter().all(|&h| h));
    assert_eq!(r.elements.len(), 4);

    let bad = vec![int(-1), int(-1), int(-1), int(-4), int(-1)];
    assert!(matches!(ne_g_support(&s, &[bad], &nef, 4), Err(FanError::InvalidMori(_))));
}

#[test]
fn square_fan_subdivision_and_lifting() {
    let rays = vec![vec![1, 1], vec![-1, 1], vec![-1, -1], vec![1, -1]];
    let f = Fan::standard(rays, vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]]).unwrap();
    let s = star_subdivision(&f, &[1, 0]).unwrap();
    assert_eq!(s.rays().len(), 5);
    assert_eq!(s.max_cones().len(), 5);
    let left = canonical_lifting(&s).unwrap();
    let right = star_subdivision(&canonical_lifting(&f).unwrap(), &[1, 0, 1]).unwrap();
    assert_eq!(left, right);
}

#[test]
fn lifting_of_p3_and_p1() {
    let l = canonical_lifting(&p3()).unwrap();
    assert_eq!(l.max_cones().len(), 4);
    assert!(l.max_cones().iter().all(|c| c.len() == 4));
    let p1 = Fan::standard(vec![vec![1], vec![-1]], vec![vec![0], vec![1]]).unwrap();
    let l = canonical_lifting(&p1).unwrap();
    assert_eq!(l.max_cones().len(), 2);
    assert_eq!(l.ambient_rank(), 2);
}

#[test]
fn bundle_over_p3() {
    let z = bundle_fan(&p3());
    let h = [1, 1, 1, 1, 0, 1];
    assert!(is_nef(&z, &h).unwrap());
    assert!(!is_nef(&z, &[0, 0, 0, 0, 0, -1]).unwrap());
    let data = cartier_data(&z, &h).unwrap();
    let cones = z.max_cones();
    for (c, m) in cones.iter().zip(&data.m) {
        if c.contains(&5) {
            assert_eq!(*m, vec![int(0), int(0), int(0), int(-1)]);
        } else {
            assert_eq!(m[3], int(0));
        }
    }
    let (x, map) = contract_semiample(&z, &h).unwrap();
    assert_eq!(map.len(), 8);
    let expected = Fan::standard(
        vec![vec![1, 0, 0, 1], vec![0, 1, 0, 1], vec![0, 0, 1, 1], vec![-1, -1, -1, 1], vec![0, 0, 0, -1]],
        simplex_cones(5),
    )
    .unwrap();
    assert_eq!(x, expected);
    let polytope = z.section_polytope(&h).unwrap();
    assert!(polytope.vertices().contains(&vec![0, 0, 0, -1]));
}

#[test]
fn lifting_commutes_with_subdivision_on_polygons() {
    let mut cases = 0;
    for p in common::reflexive_polygons() {
        let f = common::face_fan_2d(&p);
        let lifted = canonical_lifting(&f).unwrap();
        for v in common::edge_points(&p) {
            let left = canonical_lifting(&star_subdivision(&f, &v).unwrap()).unwrap();
            let right = star_subdivision(&lifted, &[v[0], v[1], 1]).unwrap();
            assert_eq!(left, right, "{v:?}");
            cases += 1;
        }
    }
    assert!(cases > 100);
}
