use cymirror::amodel::*;
use cymirror::bmodel::{frobenius_system, mirror_map, run};
use cymirror::examples::{p3_fan, Example};
use cymirror::gkz::{derive_pf, LinearRatio};
use cymirror::rational::{int, parse_rational, pow, rat, Rational};
use cymirror::series::{Bound, Series1};

fn ints(v: &[&str]) -> Vec<Rational> {
    v.iter().map(|s| parse_rational(s).unwrap()).collect()
}

/// `ℙ⁷/G′` style I-function on `ℚ[H]/(H⁴)`: eight untwisted classes of
/// pairing `a` and modification by `deg·H` for each CI degree.
fn projective_i(top_integral: Rational, weights: usize, mods: &[i64], order: u32) -> CohSeries {
    let r = CohRing::truncated("H", 3, top_integral);
    let h = r.gen(0);
    let classes = vec![h.clone(); weights];
    let pairings = vec![vec![int(1)]; weights];
    let i = toric_i_function(&r, &classes, &pairings, Bound::Total(order)).unwrap();
    let spec: Vec<Modification> = mods.iter().map(|&k| Modification { class: h.scale(&int(k)), pairings: vec![k] }).collect();
    hypergeometric_modification(&i, &spec).unwrap()
}

#[test]
fn bundle_ring_intersections() {
    let z = bundle_ring().unwrap();
    assert!(z.is_confluent());
    let h = z.gen(0);
    let xi = z.gen(1);
    assert_eq!(z.integrate(&z.mul(&z.pow(&h, 3), &xi)), int(1));
    let e = xi.scale(&int(2)).add(&h.scale(&int(8)));
    assert_eq!(z.integrate(&z.mul(&z.pow(&h, 3), &e)), int(2));
    assert_eq!(z.integrate(&z.pow(&h, 4)), int(0));
}

#[test]
fn leading_i0_coefficients() {
    // hhhh: ℙ⁷ with four quadrics, q-coefficient (2!)⁴ = 16.
    let i = projective_i(int(16), 8, &[2, 2, 2, 2], 3);
    let c = j_components(&i).unwrap();
    assert_eq!(c[0].coeff(&[1]), int(16));
    // 4h: weighted degree-eight hypersurface, 8!/4! = 1680.
    let r = CohRing::truncated("H", 3, int(2));
    let h = r.gen(0);
    let classes = vec![h.clone(), h.clone(), h.clone(), h.clone(), h.scale(&int(4))];
    let pairings = vec![vec![int(1)], vec![int(1)], vec![int(1)], vec![int(1)], vec![int(4)]];
    let i = toric_i_function(&r, &classes, &pairings, Bound::Total(3)).unwrap();
    let i = hypergeometric_modification(&i, &[Modification { class: h.scale(&int(8)), pairings: vec![8] }]).unwrap();
    let c = j_components(&i).unwrap();
    assert_eq!(c[0].coeff(&[1]), int(1680));
    // Without modification the untwisted I₀ is 1.
    let bare = projective_i(int(16), 8, &[], 3);
    let c = j_components(&bare).unwrap();
    assert_eq!(c[0].coeff(&[1]), int(0));
    assert_eq!(c[0].coeff(&[0]), int(1));
}

#[test]
fn non_integral_pairing_rejected() {
    let r = CohRing::truncated("H", 3, int(2));
    let err = toric_i_function(&r, &[r.gen(0)], &[vec![rat(1, 2)]], Bound::Total(2)).unwrap_err();
    assert!(matches!(err, AModelError::NonIntegralPairing(_)));
}

#[test]
fn mirror_map_matches_b_side() {
    let i = projective_i(int(16), 8, &[2, 2, 2, 2], 6);
    let t = mirror_transform(&i, 6).unwrap();
    let fp = frobenius_system(&Example::Hhhh.system(), 6).unwrap();
    let mm = mirror_map(&fp, 6).unwrap();
    // q_I = z/256.
    for n in 1..6 {
        assert_eq!(t.mirror.forward.coeff(n), mm.forward.coeff(n) * pow(&int(256), n as i64));
    }
    assert_eq!(t.w[0], Series1::one("Q", 6));
    assert!(t.w[1].coeffs().iter().all(|c| *c == int(0)));
}

#[test]
fn correlations_scale_with_classical_value() {
    let i = projective_i(int(16), 8, &[2, 2, 2, 2], 6);
    let t = mirror_transform(&i, 6).unwrap();
    let k16 = correlation_from_w2(&t.w[2], &int(16));
    let k2 = correlation_from_w2(&t.w[2], &int(2));
    for n in 0..6 {
        assert_eq!(k16.coeff(n), k2.coeff(n) * int(8));
    }
    let sys = Example::Hhhh.system();
    let op = derive_pf(&LinearRatio::from_relation(&sys.gamma, &sys.kernel_vector(0).unwrap())).unwrap();
    let b = run(&sys, &op, int(2), 6).unwrap();
    for n in 0..5 {
        assert_eq!(k2.coeff(n), b.correlation.coeff(n));
    }
}

#[test]
fn quotient_diagram_values() {
    let hhhh = QuotientDiagram { group_order: 64, scale: 2, ambient_integral: int(1), ci_degrees: vec![2, 2, 2, 2], ambient_dim: 7 };
    let q = quotient_intersections(&hhhh).unwrap();
    assert_eq!(q.cover_integral, int(16));
    assert_eq!(q.quotient_integral, int(2));
    assert_eq!(q.basis_scalings, vec![int(1), int(1), rat(1, 2), rat(1, 2)]);
    let four_h = QuotientDiagram { group_order: 8, scale: 2, ambient_integral: rat(1, 4), ci_degrees: vec![8], ambient_dim: 4 };
    assert_eq!(quotient_intersections(&four_h).unwrap().quotient_integral, int(2));
    let bad = QuotientDiagram { group_order: 0, ..hhhh };
    assert!(quotient_intersections(&bad).is_err());
}

#[test]
fn b_series_identity() {
    let r = CohRing::truncated("H", 3, int(2));
    let h = r.gen(0);
    for ex in Example::ALL {
        let rep = mirror_identity(&r, &p3_fan(), &ex.partition(), &vec![h.clone(); 4], 6).unwrap();
        assert!(rep.pass, "{ex}");
    }
    // Negative control: perturb one coefficient.
    let ext = Example::FourH.system();
    let (ce, _) = column_classes(&vec![h.clone(); 4], &Example::FourH.partition());
    let b = b_series(&r, &ext, &ce, 4).unwrap();
    let mut other = b.clone();
    other[2] = other[2].add(&r.one());
    let rep = verify_mirror_identity(&b, &other, &[0]);
    assert!(!rep.pass);
    assert_eq!(rep.first_mismatch, Some(2));
}

#[test]
fn appendix_values() {
    let rep = appendix_pipeline(2, 8).unwrap();
    let q1 = &rep.q1;
    let expect = [
        ([1, 0], "1"), ([1, 1], "-16"), ([1, 2], "96"), ([1, 3], "-256"), ([1, 4], "256"),
        ([2, 4], "-15808"), ([2, 5], "252928"), ([2, 6], "-1517568"), ([2, 7], "4046848"), ([2, 8], "-4046848"),
    ];
    for (k, v) in expect {
        assert_eq!(q1.coeff(&k), parse_rational(v).unwrap(), "{k:?}");
    }
    assert_eq!(rep.w2.coeff(&[1, 4]), int(14752));
    assert_eq!(rep.w2.coeff(&[2, 8]), int(128838600));
    assert_eq!(rep.w3.coeff(&[1, 4]), int(-59008));
    assert_eq!(rep.w3.coeff(&[2, 8]), int(-257677200));
    assert_eq!(rep.generating, ints(&["29504", "128838600"]));
}

#[test]
fn appendix_values_to_degree_five() {
    let rep = appendix_pipeline(5, 20).unwrap();
    let w2: Vec<Rational> = (1..=5u32).map(|d| rep.w2.coeff(&[d, 4 * d])).collect();
    assert_eq!(w2, ints(&["14752", "128838600", "19220227397632/9", "46386112081796274", "29242279664078082314752/25"]));
    let w3: Vec<Rational> = (1..=5u32).map(|d| rep.w3.coeff(&[d, 4 * d])).collect();
    assert_eq!(w3, ints(&["-59008", "-257677200", "-76880909590528/27", "-46386112081796274", "-116969118656312329259008/125"]));
    assert_eq!(rep.generating, ints(&["29504", "128838600", "38440454795264/27", "23193056040898137", "58484559328156164629504/125"]));
}

