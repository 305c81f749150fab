use cymirror::examples::p3_fan;
use cymirror::fan::Fan;
use cymirror::lattice::{lattice_index, Sublattice};
use cymirror::quotientgeom::*;

fn simplex_cones(n: usize) -> Vec<Vec<usize>> {
    (0..n).map(|skip| (0..n).filter(|&i| i != skip).collect()).collect()
}

#[test]
fn hhhh_tower() {
    let t = build_cover_hhhh();
    assert_eq!(t.group_order, 128);
    assert_eq!(t.cover_degree, 2);
    assert_eq!(t.prime_group_order, 64);
    let printed = [
        [1, -1, 1, -1, 1, -1, 1],
        [1, 1, -1, 1, -1, 1, -1],
        [-1, 1, 1, -1, 1, -1, 1],
        [1, -1, 1, 1, -1, 1, -1],
        [-1, 1, -1, 1, 1, -1, 1],
        [1, -1, 1, -1, 1, 1, -1],
        [-1, 1, -1, 1, -1, 1, 1],
        [-1, -1, -1, -1, -1, -1, -1],
    ];
    for (got, want) in t.rays_in_prime_basis.iter().zip(printed) {
        assert_eq!(got, &want.to_vec());
    }
    assert!(branch_divisor_check(&t).unwrap());
}

#[test]
fn m_prime_membership_is_parity_condition() {
    let t = build_cover_hhhh();
    // All a ∈ {0,1,2}⁷ with a handful of sign flips.
    for code in 0..3i64.pow(7) {
        let mut a = Vec::with_capacity(7);
        let mut c = code;
        for i in 0..7 {
            let digit = c % 3 - if i % 2 == 0 { 0 } else { 1 };
            a.push(digit);
            c /= 3;
        }
        let parity = a.windows(2).all(|w| (w[0] - w[1]).rem_euclid(2) == 0);
        assert_eq!(in_m_prime(&t, &a), parity, "{a:?}");
    }
}

#[test]
fn four_h_tower() {
    let t = build_cover_4h();
    let printed = [[1, 1, -1, 1], [-1, 1, -1, 1], [1, 1, 1, -1], [-1, -1, 1, 1], [3, 1, -3, -5]];
    for (got, want) in t.rays_in_prime_basis.iter().zip(printed) {
        assert_eq!(got, &want.to_vec());
    }
    // The parity sublattice of ℤ⁴ has index 2; the printed pair (8, 2) is swapped.
    assert_eq!(t.group_order, 16);
    assert_eq!((t.cover_degree, t.prime_group_order), (2, 8));
    assert!(branch_divisor_check(&t).unwrap());
}

#[test]
fn branch_check_negative_example() {
    let sub = Sublattice::from_columns(2, &[vec![2, 0], vec![0, 1]]).unwrap();
    let sup = Sublattice::full(2);
    assert!(!branch_divisor_check_rays(&[vec![0, 1]], &sub, &sup).unwrap());
    assert!(branch_divisor_check_rays(&[vec![1, 0]], &sub, &sup).unwrap());
}

#[test]
fn xprime_of_p3_is_weighted_projective() {
    let g = build_xprime(&p3_fan()).unwrap();
    assert!(g.e0_equivalent);
    assert_eq!(g.xprime.rays()[g.apex], vec![0, 0, 0, -1]);
    let p11114 = Fan::standard(
        vec![vec![1, 0, 0, 0], vec![0, 1, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1], vec![-1, -1, -1, -4]],
        simplex_cones(5),
    )
    .unwrap();
    let t = find_fan_isomorphism(&g.xprime, &p11114).expect("isomorphic fans");
    assert_eq!(t.det().magnitude().to_string(), "1");
    // The lifted tower N × 2ℤ ⊆ ℤ⁴ is a double cover branched along every divisor.
    let (sub, sup) = lifted_tower(3);
    assert_eq!(lattice_index(&sub, &sup).unwrap(), 2.into());
    assert!(branch_divisor_check_rays(g.xprime.rays(), &sub, &sup).unwrap());
}

#[test]
fn xprime_of_p1() {
    let p1 = Fan::standard(vec![vec![1], vec![-1]], vec![vec![0], vec![1]]).unwrap();
    let g = build_xprime(&p1).unwrap();
    let p112 = Fan::standard(vec![vec![1, 1], vec![-1, 1], vec![0, -1]], simplex_cones(3)).unwrap();
    assert_eq!(g.xprime, p112);
    assert!(g.e0_equivalent);
}

#[test]
fn non_isomorphic_fans() {
    let p2 = Fan::standard(vec![vec![1, 0], vec![0, 1], vec![-1, -1]], simplex_cones(3)).unwrap();
    let p112 = Fan::standard(vec![vec![1, 1], vec![-1, 1], vec![0, -1]], simplex_cones(3)).unwrap();
    assert!(find_fan_isomorphism(&p2, &p112).is_none());
    assert!(find_fan_isomorphism(&p2, &p2).is_some());
}
