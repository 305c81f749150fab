//! Verification pipelines for the two examples, the two-parameter model and
//! the nested-pyramid checks.

use crate::config::RunConfig;
use crate::error::{input, CliError};
use crate::report::{Origin, Report};
use cymirror::amodel::{
    appendix_pipeline, bundle_ring, correlation_from_w2, hypergeometric_modification, mirror_identity,
    mirror_transform, quotient_intersections, toric_i_function, CohRing, Modification, QuotientDiagram,
};
use cymirror::bmodel::{run, Pipeline};
use cymirror::examples::{p3_fan, Example};
use cymirror::fan::{box_elements, ne_g_support, ConeKind, Fan, StackyFan};
use cymirror::gkz::{gamma_ratio, holo_series, verify_annihilation, PfOperator};
use cymirror::polytope::{morrison_check, LatticePolytope, PolytopeError};
use cymirror::quotientgeom::{branch_divisor_check, build_cover_4h, build_cover_hhhh, build_xprime, find_fan_isomorphism};
use cymirror::rational::{int, parse_rational, pow, rat, Rational};
use cymirror::series::{Bound, Series1};
use num_traits::{One, Zero};

fn rats(v: &[&str]) -> Vec<Rational> {
    v.iter().map(|s| parse_rational(s).expect("valid literal")).collect()
}

fn coeffs(s: &Series1, range: std::ops::RangeInclusive<usize>) -> Vec<Rational> {
    range.map(|n| s.coeff(n)).collect()
}

fn need_order(cfg: &RunConfig, min: usize, what: &str) -> Result<(), CliError> {
    if cfg.order < min {
        return Err(CliError::Config(format!("{what} needs --order of at least {min}")));
    }
    Ok(())
}

fn pipeline(ex: Example, classical: Rational, order: usize) -> Result<Pipeline, CliError> {
    run(&ex.system(), &ex.operator(), classical, order).map_err(input)
}

fn simplex_cones(n: usize) -> Vec<Vec<usize>> {
    (0..n).map(|skip| (0..n).filter(|&i| i != skip).collect()).collect()
}

fn p11114() -> Fan {
    let rays = vec![vec![1, 0, 0, 0], vec![0, 1, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1], vec![-1, -1, -1, -4]];
    Fan::standard(rays, simplex_cones(5)).expect("valid fan")
}

/// `Γ(1−2ℓ)/Γ(1−ℓ) = Γ(1/2−ℓ)·2^{−2ℓ}/Γ(1/2)` for `ℓ = 0, −1, …, −8`.
fn doubling_identity(report: &mut Report) -> Result<(), CliError> {
    let mut lhs = Vec::new();
    let mut rhs = Vec::new();
    for l in (-8..=0i64).rev() {
        lhs.push(gamma_ratio(&int(1 - 2 * l), &int(1 - l)).map_err(input)?);
        rhs.push(gamma_ratio(&(rat(1, 2) - int(l)), &rat(1, 2)).map_err(input)? * pow(&int(2), -2 * l));
    }
    report.check_list("Γ doubling identity, ℓ₀ = 0..−8", Origin::Derived, &rhs, &lhs);
    Ok(())
}

fn holomorphic_identity(report: &mut Report, ex: Example) -> Result<(), CliError> {
    let ring = CohRing::truncated("H", 3, int(2));
    let h = ring.gen(0);
    let r = mirror_identity(&ring, &p3_fan(), &ex.partition(), &vec![h; 4], 9).map_err(input)?;
    report.check("B-series of Ā and A_ext agree through degree 8", Origin::Printed, "true".to_string(), r.pass.to_string());
    Ok(())
}

/// The four-quadric example.
pub fn verify_hhhh(cfg: &RunConfig) -> Result<Report, CliError> {
    need_order(cfg, 6, "verify hhhh")?;
    let t = cfg.order;
    let mut r = Report::new("hhhh");
    let classical = cfg.classical.clone().unwrap_or_else(|| Example::Hhhh.classical());
    let p = pipeline(Example::Hhhh, classical.clone(), t)?;
    r.check_list(
        "mirror map q(z), z¹..z⁵",
        Origin::Printed,
        &rats(&["1/256", "1/1024", "221/524288", "121/524288", "9924061/68719476736"]),
        &coeffs(&p.mirror.forward, 1..=5),
    );
    r.check_list(
        "inverse mirror map z(q), q¹..q⁵",
        Origin::Printed,
        &rats(&["256", "-16384", "286720", "-9961472", "-393334784"]),
        &coeffs(&p.mirror.inverse, 1..=5),
    );
    r.check_list(
        "correlation K(q), q⁰..q⁵",
        Origin::Printed,
        &rats(&["2", "64", "9792", "1404928", "205641280", "30593496064"]),
        &coeffs(&p.correlation, 0..=5),
    );
    let n: Vec<Rational> = (1..=4).map(|d| p.instantons.n[&d].clone()).collect();
    r.check_list("instanton numbers n₁..n₄", Origin::Printed, &rats(&["64", "1216", "52032", "3212992"]), &n);
    r.check(
        "instanton table re-expands to K(q)",
        Origin::Derived,
        crate::report::list(p.correlation.coeffs()),
        crate::report::list(p.instantons.correlation(p.correlation.order()).coeffs()),
    );
    let big = pipeline(Example::Hhhh, classical * int(8), t)?;
    let dmax = 6.min(t - 1);
    let scaled: Vec<Rational> = (1..=dmax).map(|d| &p.instantons.n[&d] * int(8)).collect();
    let at16: Vec<Rational> = (1..=dmax).map(|d| big.instantons.n[&d].clone()).collect();
    r.check_list(&format!("C = 16 multiplies n_d by 8, d ≤ {dmax}"), Origin::Printed, &scaled, &at16);

    let cover = build_cover_hhhh();
    r.check_list(
        "[N:N″], [N:N′], [N′:N″]",
        Origin::Printed,
        &[128, 2, 64],
        &[cover.group_order, cover.cover_degree, cover.prime_group_order],
    );
    r.check(
        "ρ₁ in the basis of N′",
        Origin::Printed,
        crate::report::list(&[1, -1, 1, -1, 1, -1, 1]),
        crate::report::list(&cover.rays_in_prime_basis[0]),
    );
    let branch = branch_divisor_check(&cover).map_err(input)?;
    r.check("ρ^⊥ ∩ M = ρ^⊥ ∩ M′ for all eight rays", Origin::Printed, true, branch);

    let prime_fan = Fan::standard(cover.rays_in_prime_basis.clone(), simplex_cones(8)).map_err(input)?;
    let stacky = StackyFan::canonical(prime_fan);
    let nef: Vec<Vec<i64>> = (0..8).map(|i| (0..8).map(|j| (i == j) as i64).collect()).collect();
    let bound = cfg.scan_bound.unwrap_or(4 * 64);
    let ne = ne_g_support(&stacky, &[vec![int(1); 8]], &nef, bound).map_err(input)?;
    let hits: Vec<bool> = ne.nonempty.clone();
    r.check(
        "sectors with nonempty NE_g on ℙ⁷/G′",
        Origin::Printed,
        "identity only".to_string(),
        if hits.iter().filter(|&&h| h).count() == 1 && hits[0] { "identity only".into() } else { format!("{hits:?}") },
    );

    let q = quotient_intersections(&QuotientDiagram {
        group_order: cover.prime_group_order,
        scale: 2,
        ambient_integral: int(1),
        ci_degrees: vec![2, 2, 2, 2],
        ambient_dim: 7,
    })
    .map_err(input)?;
    r.check("∫ H³ on the quotient", Origin::Printed, int(2), q.quotient_integral.clone());
    r.check("∫ h³ on ℙ⁷[2,2,2,2]", Origin::Printed, int(16), q.cover_integral.clone());

    // A-side: modified I-function on ℚ[H]/(H⁴).
    let ring = CohRing::truncated("H", 3, q.cover_integral.clone());
    let hcls = ring.gen(0);
    let i = toric_i_function(&ring, &vec![hcls.clone(); 8], &vec![vec![int(1)]; 8], Bound::Total(t as u32 - 1))
        .map_err(input)?;
    let mods: Vec<Modification> =
        (0..4).map(|_| Modification { class: hcls.scale(&int(2)), pairings: vec![2] }).collect();
    let i = hypergeometric_modification(&i, &mods).map_err(input)?;
    let tr = mirror_transform(&i, t).map_err(input)?;
    let rescaled: Vec<Rational> = (1..t).map(|n| p.mirror.forward.coeff(n) * pow(&int(256), n as i64)).collect();
    r.check_list("I-function mirror map equals q(z) at q_I = z/256", Origin::Derived, &rescaled, &tr.mirror.forward.coeffs()[1..]);
    let k2 = correlation_from_w2(&tr.w[2], &q.quotient_integral);
    r.check_list("A-model K(Q) equals B-model K(q)", Origin::Derived, &coeffs(&p.correlation, 0..=t - 2), &coeffs(&k2, 0..=t - 2));

    holomorphic_identity(&mut r, Example::Hhhh)?;
    doubling_identity(&mut r)?;
    Ok(r)
}

/// `θ⁴ − 256z∏_{i=1}^{4}(θ + (2i−1)/8)`.
pub fn printed_4h_operator() -> PfOperator {
    let mut p1 = vec![int(-256)];
    for i in 1..=4 {
        let root = rat(2 * i - 1, 8);
        let mut next = vec![Rational::zero(); p1.len() + 1];
        for (k, c) in p1.iter().enumerate() {
            next[k] += c * &root;
            next[k + 1] += c.clone();
        }
        p1 = next;
    }
    PfOperator { polys: vec![vec![int(0), int(0), int(0), int(0), int(1)], p1] }
}

/// `Σ (Γ(4n+1/2)/Γ(1/2))⁴/n!⁴ zⁿ`, the fourth-power variant of the 4h period.
pub fn fourth_power_variant(order: usize) -> Result<Series1, CliError> {
    let mut c = Vec::with_capacity(order);
    let mut fact = Rational::one();
    for n in 0..order {
        if n > 0 {
            fact *= int(n as i64);
        }
        let g = gamma_ratio(&(rat(1, 2) + int(4 * n as i64)), &rat(1, 2)).map_err(input)?;
        c.push(pow(&g, 4) / pow(&fact, 4));
    }
    Ok(Series1::from_coeffs("z", c))
}

/// The quartic example.
pub fn verify_4h(cfg: &RunConfig) -> Result<Report, CliError> {
    need_order(cfg, 4, "verify 4h")?;
    let t = cfg.order;
    let mut r = Report::new("4h");
    let op = Example::FourH.operator();
    r.check("Picard–Fuchs operator", Origin::Printed, printed_4h_operator().to_string(), op.to_string());
    let p = pipeline(Example::FourH, cfg.classical.clone().unwrap_or_else(|| Example::FourH.classical()), t)?;
    r.check_list(
        "mirror map q(z), z¹..z³",
        Origin::Derived,
        &rats(&["1/256", "247/1024", "13386541/524288"]),
        &coeffs(&p.mirror.forward, 1..=3),
    );
    r.note(
        "the printed third mirror-map coefficient 13368541/524288 transposes two digits of 13386541/524288; \
         the printed inverse coefficient 18282602496 is consistent only with the latter",
    );
    r.check_list(
        "inverse mirror map z(q), q¹..q³",
        Origin::Printed,
        &rats(&["256", "-4046848", "18282602496"]),
        &coeffs(&p.mirror.inverse, 1..=3),
    );
    r.check_list(
        "correlation K(q), q⁰..q³",
        Origin::Printed,
        &rats(&["2", "29504", "1030708800", "38440454795264"]),
        &coeffs(&p.correlation, 0..=3),
    );
    let n: Vec<Rational> = (1..=3).map(|d| p.instantons.n[&d].clone()).collect();
    r.check_list("instanton numbers n₁..n₃", Origin::Printed, &rats(&["29504", "128834912", "1423720546880"]), &n);

    let single = holo_series(&Example::FourH.system(), 10).map_err(input)?;
    r.check("operator annihilates the single-power period", Origin::Derived, true, verify_annihilation(&op, &single, 10));
    let fourth = fourth_power_variant(10)?;
    r.check("operator rejects the fourth-power variant", Origin::Derived, false, verify_annihilation(&op, &fourth, 10));

    let cover = build_cover_4h();
    r.check(
        "ρ₅ in the basis of N′",
        Origin::Printed,
        crate::report::list(&[3, 1, -3, -5]),
        crate::report::list(&cover.rays_in_prime_basis[4]),
    );
    r.check_list("[N:N′], [N′:N″]", Origin::Derived, &[2, 8], &[cover.cover_degree, cover.prime_group_order]);
    r.note("the printed indices read [N:N′] = 8 and [N′:N″] = 2; the parity-sum sublattice of ℤ⁴ has index 2 in N");
    r.check("ρ^⊥ ∩ M = ρ^⊥ ∩ M′ for all five rays", Origin::Printed, true, branch_divisor_check(&cover).map_err(input)?);

    let f = p11114();
    let singular: Vec<Vec<usize>> = f
        .max_cones()
        .iter()
        .zip(f.smoothness())
        .filter(|(_, k)| *k != ConeKind::Smooth)
        .map(|(c, _)| c.clone())
        .collect();
    r.check(
        "unique singular cone of ℙ(1,1,1,1,4)",
        Origin::Printed,
        crate::report::list(&[crate::report::list(&[0, 1, 2, 4])]),
        crate::report::list(&singular.iter().map(|c| crate::report::list(c)).collect::<Vec<_>>()),
    );
    let stacky = StackyFan::canonical(f);
    let elements = box_elements(&stacky).map_err(input)?;
    let ne = ne_g_support(&stacky, &[vec![int(1), int(1), int(1), int(4), int(1)]], &[vec![1, 0, 0, 0, 0]], cfg.scan_bound.unwrap_or(16))
        .map_err(input)?;
    r.check(
        "sectors with nonempty NE_g on ℙ(1,1,1,1,4)/G′",
        Origin::Printed,
        "c = 0..3".to_string(),
        if elements.len() == 4 && ne.nonempty.iter().all(|&h| h) { "c = 0..3".into() } else { format!("{:?}", ne.nonempty) },
    );

    let q = quotient_intersections(&QuotientDiagram {
        group_order: cover.prime_group_order,
        scale: 2,
        ambient_integral: rat(1, 4),
        ci_degrees: vec![8],
        ambient_dim: 4,
    })
    .map_err(input)?;
    r.check("∫ H³ on the quotient", Origin::Printed, int(2), q.quotient_integral);

    let g = build_xprime(&p3_fan()).map_err(input)?;
    r.check("X′(ℙ³) ≅ ℙ(1,1,1,1,4)", Origin::Printed, true, find_fan_isomorphism(&g.xprime, &p11114()).is_some());
    holomorphic_identity(&mut r, Example::FourH)?;
    Ok(r)
}

/// The two-parameter model along `Q = Q₁Q₂⁴`.
pub fn verify_appendix(cfg: &RunConfig) -> Result<Report, CliError> {
    let [b1, b2] = cfg.appendix_bounds;
    let mut r = Report::new("appendix");
    let rep = appendix_pipeline(b1, b2).map_err(input)?;
    let z = bundle_ring().map_err(input)?;
    let (h, xi) = (z.gen(0), z.gen(1));
    let e = xi.scale(&int(2)).add(&h.scale(&int(8)));
    r.check("∫_Z h³(2ξ + 8h)", Origin::Printed, int(2), z.integrate(&z.mul(&z.pow(&h, 3), &e)));

    let q1_terms: [([u32; 2], &str); 10] = [
        ([1, 0], "1"),
        ([1, 1], "-16"),
        ([1, 2], "96"),
        ([1, 3], "-256"),
        ([1, 4], "256"),
        ([2, 4], "-15808"),
        ([2, 5], "252928"),
        ([2, 6], "-1517568"),
        ([2, 7], "4046848"),
        ([2, 8], "-4046848"),
    ];
    let in_bound: Vec<&([u32; 2], &str)> = q1_terms.iter().filter(|(k, _)| k[0] <= b1 && k[1] <= b2).collect();
    let expected: Vec<Rational> = in_bound.iter().map(|(_, v)| parse_rational(v).expect("literal")).collect();
    let computed: Vec<Rational> = in_bound.iter().map(|(k, _)| rep.q1.coeff(k)).collect();
    r.check_list("inverse mirror map q₁(Q₁, Q₂)", Origin::Printed, &expected, &computed);

    let dmax = b1.min(b2 / 4) as usize;
    let w2 = rats(&["14752", "128838600", "19220227397632/9", "46386112081796274", "29242279664078082314752/25"]);
    let w3 = rats(&[
        "-59008",
        "-257677200",
        "-76880909590528/27",
        "-46386112081796274",
        "-116969118656312329259008/125",
    ]);
    let gen = rats(&["29504", "128838600", "38440454795264/27", "23193056040898137", "58484559328156164629504/125"]);
    let m = dmax.min(5);
    let along = |s: &cymirror::series::SeriesM| -> Vec<Rational> { (1..=m as u32).map(|d| s.coeff(&[d, 4 * d])).collect() };
    r.check_list("W₂ along Q₁^d Q₂^{4d}", Origin::Printed, &w2[..m], &along(&rep.w2));
    r.check_list("W₃ along Q₁^d Q₂^{4d}", Origin::Printed, &w3[..m], &along(&rep.w3));
    let mut series = vec![int(2)];
    series.extend(rep.generating.iter().take(m).cloned());
    let mut expected = vec![int(2)];
    expected.extend(gen[..m].iter().cloned());
    r.check_list("generating series in Q", Origin::Printed, &expected, &series);
    r.check(
        "−W₃/2 and (2/d)·W₂ agree",
        Origin::Derived,
        true,
        rep.generating.iter().enumerate().all(|(i, c)| {
            let d = int(i as i64 + 1);
            let w2d = rep.w2.coeff(&[i as u32 + 1, 4 * (i as u32 + 1)]);
            let w3d = rep.w3.coeff(&[i as u32 + 1, 4 * (i as u32 + 1)]);
            *c == int(2) * w2d / d && *c == -w3d / int(2)
        }),
    );
    let k = pipeline(Example::FourH, int(2), 4)?;
    let dk = 3.min(m);
    let lhs: Vec<Rational> = (1..=dk).map(|d| k.correlation.coeff(d)).collect();
    r.check_list("d³·c_d equals the one-parameter K(q), d ≤ 3", Origin::Derived, &lhs, &rep.correlation[..dk]);
    if m < 5 {
        r.note(format!("bounds ({b1}, {b2}) cover degrees d ≤ {m} only"));
    }
    Ok(r)
}

/// Nested-pyramid checks for a reflexive polytope.
pub fn verify_morrison(delta: &LatticePolytope) -> Result<Report, CliError> {
    let rep = match morrison_check(delta) {
        Ok(r) => r,
        Err(PolytopeError::MorrisonFailed(r)) => r,
        Err(e) => return Err(input(e)),
    };
    let mut r = Report::new("morrison");
    r.check("Δ₁ ⊆ Δ₂", Origin::Printed, true, rep.delta1_in_delta2);
    r.check("∇₁ ⊆ ∇₂", Origin::Printed, true, rep.nabla1_in_nabla2);
    r.check("Δ₂^∨ = ∇₁", Origin::Printed, true, rep.delta2_dual_is_nabla1);
    r.check("∇₂^∨ = Δ₁", Origin::Printed, true, rep.nabla2_dual_is_delta1);
    r.check("Δ₁, Δ₂, ∇₁, ∇₂ reflexive", Origin::Printed, true, rep.all_reflexive);
    Ok(r)
}

