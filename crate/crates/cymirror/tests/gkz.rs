use cymirror::fan::Fan;
use cymirror::gkz::*;
use cymirror::rational::{int, pow, rat, Rational};
use cymirror::series::Series1;
use num_bigint::BigInt;
use num_traits::One;
use proptest::prelude::*;

fn simplex_cones(n: usize) -> Vec<Vec<usize>> {
    (0..n).map(|skip| (0..n).filter(|&i| i != skip).collect()).collect()
}

fn p3() -> Fan {
    let rays = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![-1, -1, -1]];
    Fan::standard(rays, simplex_cones(4)).unwrap()
}

fn p1() -> Fan {
    Fan::standard(vec![vec![1], vec![-1]], vec![vec![0], vec![1]]).unwrap()
}

fn lifted(base: &Fan) -> Fan {
    let n = base.ambient_rank();
    let mut rays: Vec<Vec<i64>> = base.rays().iter().map(|r| [r.clone(), vec![1]].concat()).collect();
    rays.push([vec![0; n], vec![-1]].concat());
    Fan::standard(rays, simplex_cones(base.rays().len() + 1)).unwrap()
}

fn fact(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, k| a * k)
}

/// `Γ(m+1/2)/Γ(1/2) = (2m)!/(4^m m!)`.
fn half_gamma(m: u64) -> Rational {
    Rational::new(fact(2 * m), BigInt::from(4).pow(m as u32) * fact(m))
}

fn rows(sys: &GkzSystem) -> Vec<Vec<i64>> {
    sys.matrix.row_vecs().iter().map(|r| r.iter().map(|x| i64::try_from(x).unwrap()).collect()).collect()
}

fn hhhh() -> GkzSystem {
    build_aext(&p3(), &[vec![0], vec![1], vec![2], vec![3]]).unwrap()
}

fn four_h() -> GkzSystem {
    build_aext(&p3(), &[vec![0, 1, 2, 3]]).unwrap()
}

#[test]
fn hhhh_matrix_matches_printed_up_to_pair_swap() {
    let sys = hhhh();
    let printed = vec![
        vec![1, 1, 0, 0, 0, 0, 0, 0],
        vec![0, 0, 1, 1, 0, 0, 0, 0],
        vec![0, 0, 0, 0, 1, 1, 0, 0],
        vec![0, 0, 0, 0, 0, 0, 1, 1],
        vec![1, 0, 0, 0, 0, 0, -1, 0],
        vec![0, 0, 1, 0, 0, 0, -1, 0],
        vec![0, 0, 0, 0, 1, 0, -1, 0],
    ];
    let swapped: Vec<Vec<i64>> = rows(&sys)
        .iter()
        .map(|r| (0..8).map(|j| r[j ^ 1]).collect())
        .collect();
    assert_eq!(swapped, printed);
    let h = rat(-1, 2);
    assert_eq!(sys.beta, vec![h.clone(), h.clone(), h.clone(), h, int(0), int(0), int(0)]);
    assert_eq!(sys.kernel_vector(0).unwrap(), vec![-1, 1, -1, 1, -1, 1, -1, 1]);
    assert!(sys.gamma_consistent());
}

#[test]
fn four_h_matrix() {
    let sys = four_h();
    assert_eq!(
        rows(&sys),
        vec![vec![1, 1, 1, 1, 1], vec![0, 1, 0, 0, -1], vec![0, 0, 1, 0, -1], vec![0, 0, 0, 1, -1]]
    );
    assert_eq!(sys.beta, vec![rat(-1, 2), int(0), int(0), int(0)]);
    assert_eq!(sys.kernel_vector(0).unwrap(), vec![-4, 1, 1, 1, 1]);
}

#[test]
fn p1_one_part() {
    let sys = build_aext(&p1(), &[vec![0, 1]]).unwrap();
    assert_eq!(rows(&sys), vec![vec![1, 1, 1], vec![0, 1, -1]]);
    assert_eq!(sys.kernel_vector(0).unwrap(), vec![-2, 1, 1]);
}

#[test]
fn invalid_partitions() {
    assert!(matches!(build_aext(&p3(), &[vec![0, 1]]), Err(GkzError::InvalidPartition(_))));
    assert!(matches!(build_aext(&p3(), &[vec![0, 1], vec![1, 2, 3]]), Err(GkzError::InvalidPartition(_))));
}

#[test]
fn coefficients() {
    let sys = hhhh();
    let ell = sys.kernel_vector(0).unwrap();
    assert_eq!(holo_coefficient(&sys.gamma, &ell).unwrap(), rat(1, 16));
    assert_eq!(holo_coefficient(&sys.gamma, &[0; 8]).unwrap(), int(1));
    let s = holo_series(&sys, 12).unwrap();
    for n in 0..12u64 {
        let expect = pow(&half_gamma(n), 4) / Rational::from_integer(fact(n).pow(4));
        assert_eq!(s.coeff(n as usize), expect);
    }
    assert_eq!(s.coeff(2), rat(81, 4096));

    let sys = four_h();
    assert_eq!(holo_coefficient(&sys.gamma, &[-4, 1, 1, 1, 1]).unwrap(), rat(105, 16));
}

#[test]
fn picard_fuchs_operators() {
    let sys = hhhh();
    let ratio = LinearRatio::from_relation(&sys.gamma, &sys.kernel_vector(0).unwrap());
    assert_eq!(ratio, LinearRatio::new(int(1), vec![rat(1, 2); 4], vec![int(1); 4]));
    let op = derive_pf(&ratio).unwrap();
    // θ⁴ − z(θ+1/2)⁴ expanded by the binomial theorem.
    let binom = [1, 4, 6, 4, 1];
    let p1: Vec<Rational> = (0..5).map(|k| -int(binom[k]) * pow(&rat(1, 2), 4 - k as i64)).collect();
    assert_eq!(op.polys, vec![vec![int(0), int(0), int(0), int(0), int(1)], p1]);
    assert!(verify_annihilation(&op, &holo_series(&sys, 12).unwrap(), 12));

    let sys = four_h();
    let ratio = LinearRatio::from_relation(&sys.gamma, &sys.kernel_vector(0).unwrap());
    let roots: Vec<Rational> = (1..=4).map(|i| rat(2 * i - 1, 8)).collect();
    assert_eq!(ratio, LinearRatio::new(int(256), roots.clone(), vec![int(1); 4]));
    let op = derive_pf(&ratio).unwrap();
    assert_eq!(op.order(), 4);
    let single = Series1::from_fn("z", 10, |n| {
        half_gamma(4 * n as u64) / Rational::from_integer(fact(n as u64).pow(4))
    });
    assert_eq!(single, holo_series(&sys, 10).unwrap());
    assert!(verify_annihilation(&op, &single, 10));
    let fourth = Series1::from_fn("z", 10, |n| {
        pow(&half_gamma(4 * n as u64), 4) / Rational::from_integer(fact(n as u64).pow(4))
    });
    assert!(!verify_annihilation(&op, &fourth, 10));
}

#[test]
fn box_and_euler() {
    let d = box_euler_data(&hhhh()).unwrap();
    assert_eq!(d.relations[0].plus, vec![0, 1, 0, 1, 0, 1, 0, 1]);
    assert_eq!(d.relations[0].minus, vec![1, 0, 1, 0, 1, 0, 1, 0]);
    assert!(d.euler_consistent);
    assert_eq!(d.euler.len(), 7);
    let d = box_euler_data(&four_h()).unwrap();
    assert_eq!(d.relations[0].plus, vec![0, 1, 1, 1, 1]);
    assert_eq!(d.relations[0].minus, vec![4, 0, 0, 0, 0]);
    assert!(d.euler_consistent);
}

#[test]
fn abar_of_p11114() {
    let bar = build_abar(&lifted(&p3())).unwrap();
    assert_eq!(
        rows(&bar),
        vec![
            vec![0, 1, 0, 0, -1, 0],
            vec![0, 0, 1, 0, -1, 0],
            vec![0, 0, 0, 1, -1, 0],
            vec![0, 1, 1, 1, 1, -1],
            vec![1, 1, 1, 1, 1, 1],
        ]
    );
    assert_eq!(bar.beta, vec![int(0), int(0), int(0), int(0), int(-1)]);
    let ell = four_h().kernel_vector(0).unwrap();
    assert_eq!(bar.kernel_vector(0).unwrap(), lift_relation(&ell));

    // c̄(nℓ̄)·(−4)^{nℓ₀} = c(nℓ): the Ā series at z/256 is the A_ext series.
    let a = holo_series(&four_h(), 8).unwrap();
    let b = holo_series(&bar, 8).unwrap();
    for n in 0..8 {
        assert_eq!(b.coeff(n) * pow(&int(-4), -4 * n as i64), a.coeff(n));
    }
}

#[test]
fn abar_of_p1_base() {
    let bar = build_abar(&lifted(&p1())).unwrap();
    assert_eq!(bar.matrix.rows(), 3);
    assert_eq!(bar.matrix.cols(), 4);
    let k = bar.kernel_vector(0).unwrap();
    assert_eq!(k, vec![-4, 1, 1, 2]);
    assert!(bar.matrix.mul_vec(&k.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>()).iter().all(|x| *x == BigInt::from(0)));
    let a = holo_series(&build_aext(&p1(), &[vec![0, 1]]).unwrap(), 8).unwrap();
    let b = holo_series(&bar, 8).unwrap();
    for n in 0..8 {
        assert_eq!(b.coeff(n) * pow(&int(-4), -2 * n as i64), a.coeff(n));
    }
}

#[test]
fn abar_layout_errors() {
    let bad = Fan::standard(vec![vec![1, 1], vec![-1, 2], vec![0, -1]], simplex_cones(3));
    if let Ok(f) = bad {
        assert!(matches!(build_abar(&f), Err(GkzError::RayLayout(_))));
    }
}

#[test]
fn doubling_gamma_identity() {
    // Γ(1−2ℓ₀)/Γ(1−ℓ₀) = Γ(1/2−ℓ₀) 2^{−2ℓ₀} / Γ(1/2) for ℓ₀ = 0, −1, …, −8.
    for m in 0..=8i64 {
        let lhs = gamma_ratio(&int(1 + 2 * m), &int(1 + m)).unwrap();
        let rhs = gamma_ratio(&(rat(1, 2) + int(m)), &rat(1, 2)).unwrap() * pow(&int(2), 2 * m);
        assert_eq!(lhs, rhs);
    }
}

fn small_root() -> impl Strategy<Value = Rational> {
    (1i64..12, 1i64..6).prop_map(|(n, d)| rat(n, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn derived_operator_annihilates(
        scale in (-5i64..6).prop_filter("nonzero", |s| *s != 0),
        num in prop::collection::vec(small_root().prop_filter("keeps n+1 in D", |r| *r != int(1)), 0..4),
        den in prop::collection::vec(small_root(), 0..3),
    ) {
        let mut den = den;
        den.push(int(1));
        let r = LinearRatio::new(int(scale), num, den);
        let op = derive_pf(&r).unwrap();
        prop_assert!(verify_annihilation(&op, &r.series(10), 10));
    }

    #[test]
    fn coefficient_recursion(n in 0i64..10) {
        for sys in [hhhh(), four_h()] {
            let ell = sys.kernel_vector(0).unwrap();
            let r = LinearRatio::from_relation(&sys.gamma, &ell);
            let at = |k: i64| holo_coefficient(&sys.gamma, &ell.iter().map(|x| x * k).collect::<Vec<_>>()).unwrap();
            prop_assert_eq!(at(n + 1), at(n) * r.eval(&int(n)).unwrap());
        }
    }
}

#[test]
fn abar_parts() {
    let one = build_abar_parts(&p3(), &[vec![0, 1, 2, 3]]).unwrap();
    let lifted_bar = build_abar(&lifted(&p3())).unwrap();
    assert_eq!(one.matrix, lifted_bar.matrix);
    assert_eq!(one.gamma, lifted_bar.gamma);

    let parts = [vec![0], vec![1], vec![2], vec![3]];
    let bar = build_abar_parts(&p3(), &parts).unwrap();
    assert_eq!(bar.kernel_rank(), 1);
    let ell = hhhh().kernel_vector(0).unwrap();
    assert_eq!(bar.kernel_vector(0).unwrap(), lift_relation_parts(&ell, &[1, 1, 1, 1]));
    let a = holo_series(&hhhh(), 8).unwrap();
    let b = holo_series(&bar, 8).unwrap();
    for n in 0..8 {
        assert_eq!(b.coeff(n) * pow(&int(-4), -4 * n as i64), a.coeff(n));
    }
}
