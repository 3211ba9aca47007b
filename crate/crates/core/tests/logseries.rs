use std::collections::BTreeMap;

use fusionlab::logseries::{
    binomial_identity_xy, binomial_identity_yxmy, iota_xy, iota_y_xmy, log_x_substitute, Flavor, LogPowerSeries,
    Monomial2, MonomialSeries2,
};
use fusionlab::scalar::{q, GaussRational, Scalar, Q};
use fusionlab::Error;
use num_complex::Complex64;
use num_traits::{One, Zero};
use proptest::prelude::*;

type Lps = LogPowerSeries<GaussRational>;

fn g(n: i64) -> GaussRational {
    GaussRational::from_i64(n)
}

fn gq(n: i64, d: i64) -> GaussRational {
    GaussRational::real(q(n, d))
}

/// `C(n, j)` for integer `n` by the falling factorial, kept separate from
/// the library's binomial.
fn choose(n: i64, j: u32) -> Q {
    let mut acc = Q::one();
    for i in 0..j as i64 {
        acc = acc * Q::from_integer((n - i).into()) / Q::from_integer((i + 1).into());
    }
    acc
}

const M: u32 = 12;
const K: u32 = 8;

/// One exponent class: `z^d Σ c_{m,t} z^m log^t z` with a nonzero leading
/// coefficient, so the class base is `d` itself.
fn series(d: GaussRational) -> impl Strategy<Value = Lps> {
    (1i64..6, prop::collection::vec((0u32..5, 0u32..3, -5i64..6, 1i64..4), 0..6)).prop_map(move |(lead, rest)| {
        let mut raw = vec![(d.clone(), 0, g(lead))];
        for (m, t, n, den) in rest {
            if (m, t) == (0, 0) {
                continue;
            }
            raw.push((d.clone() + g(m as i64), t, gq(n, den)));
        }
        Lps::from_terms("z", raw, M, K)
    })
}

fn base() -> impl Strategy<Value = GaussRational> {
    prop_oneof![Just(g(0)), Just(gq(1, 2)), Just(gq(-1, 3)), Just(GaussRational::new(q(1, 4), q(1, 1)))]
}

fn any_series() -> impl Strategy<Value = Lps> {
    base().prop_flat_map(series)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn addition_is_commutative_and_associative(a in any_series(), b in any_series(), c in any_series()) {
        prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
        prop_assert_eq!(a.add(&b).unwrap().add(&c).unwrap(), a.add(&b.add(&c).unwrap()).unwrap());
        prop_assert!(a.sub(&a).unwrap().is_zero());
    }

    #[test]
    fn multiplication_is_commutative_and_associative(a in any_series(), b in any_series(), c in any_series()) {
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
    }

    #[test]
    fn multiplication_distributes(a in any_series(), (b, c) in base().prop_flat_map(|d| (series(d.clone()), series(d)))) {
        // equal bases with positive leading coefficients, so b + c keeps its base
        let lhs = a.mul(&b.add(&c).unwrap()).unwrap();
        let rhs = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn derivative_obeys_leibniz(a in any_series(), b in any_series()) {
        let lhs = a.mul(&b).unwrap().derive();
        let rhs = a.derive().mul(&b).unwrap().add(&a.mul(&b.derive()).unwrap()).unwrap();
        let anchor = a.bases()[0].clone() + b.bases()[0].clone() - g(1);
        for (s, t, c) in lhs.terms().chain(rhs.terms()) {
            let off = s.integer_offset(&anchor).unwrap();
            if off < M as i64 - 1 {
                prop_assert_eq!(lhs.coeff(&s, t), rhs.coeff(&s, t), "z^{} log^{} ({})", s, t, c);
            }
        }
    }

    #[test]
    fn evaluation_is_multiplicative(a in any_series(), b in any_series(), r in 0.05f64..0.9, phi in -3.0f64..3.0) {
        let z = Complex64::from_polar(r, phi);
        let (a, b) = (a.to_c64(), b.to_c64());
        let p = a.mul(&b).unwrap();
        // both factors have offsets below 5, so the product is never cut
        prop_assert!(!p.truncated());
        let (va, _) = a.eval(z).unwrap();
        let (vb, _) = b.eval(z).unwrap();
        let (vp, _) = p.eval(z).unwrap();
        prop_assert!((vp - va * vb).norm() <= 1e-9 * (1.0 + (va * vb).norm()), "{} vs {}", vp, va * vb);
    }

    #[test]
    fn exact_json_round_trip(a in any_series()) {
        let back = Lps::from_json_str(&a.to_json_string()).unwrap();
        prop_assert_eq!(&back, &a);
        prop_assert_eq!(back.m_max(), a.m_max());
    }

    #[test]
    fn float_json_round_trip_is_bit_exact(a in any_series(), noise in -1.0f64..1.0) {
        let f = a.to_c64().scale(&Complex64::new(std::f64::consts::PI, noise));
        let back = LogPowerSeries::<Complex64>::from_json_str(&f.to_json_string()).unwrap();
        for ((s1, t1, c1), (s2, t2, c2)) in f.terms().zip(back.terms()) {
            prop_assert_eq!(t1, t2);
            prop_assert_eq!(s1.re.to_bits(), s2.re.to_bits());
            prop_assert_eq!(c1.re.to_bits(), c2.re.to_bits());
            prop_assert_eq!(c1.im.to_bits(), c2.im.to_bits());
        }
        prop_assert_eq!(f.len(), back.len());
    }
}

#[test]
fn cancellation_drops_the_slot() {
    let d = gq(2, 5);
    let a = Lps::from_terms("z", vec![(d.clone(), 0, g(1)), (d.clone() + g(1), 0, g(1))], 4, K);
    let b = Lps::monomial("z", d.clone() + g(1), 0, g(-1), 4, K);
    let s = a.add(&b).unwrap();
    assert_eq!(s.len(), 1);
    assert_eq!(s, Lps::monomial("z", d, 0, g(1), 4, K));
    let twice = Lps::monomial("z", gq(1, 2), 0, g(1), 4, K);
    assert_eq!(twice.add(&twice).unwrap().coeff(&gq(1, 2), 0), g(2));
}

#[test]
fn products_of_logs() {
    let zl = Lps::monomial("z", g(1), 1, g(1), 4, K);
    let p = zl.mul(&zl).unwrap();
    assert_eq!(p, Lps::monomial("z", g(2), 2, g(1), 4, K));
    let a = Lps::monomial("z", gq(1, 3), 0, g(1), 4, K);
    let b = Lps::monomial("z", gq(1, 2), 0, g(1), 4, K);
    assert_eq!(a.mul(&b).unwrap().bases(), &[gq(5, 6)]);
}

#[test]
fn truncated_product_sets_the_flag() {
    let a = Lps::power_series("z", &[g(1), g(1), g(1)], 2, K);
    let b = Lps::power_series("z", &[g(1), g(-1)], 2, K);
    let p = a.mul(&b).unwrap();
    assert!(p.truncated());
    assert_eq!(p, Lps::power_series("z", &[g(1)], 2, K));
    let big = Lps::monomial("z", g(0), 5, g(1), 4, K);
    assert!(matches!(big.mul_with(&big, true), Err(Error::LogCapOverflow { .. })));
}

#[test]
fn derivative_stays_on_the_ladder() {
    let d = GaussRational::new(q(3, 7), q(1, 2));
    let s = Lps::monomial("z", d.clone() + g(2), 0, g(1), 6, K);
    let ds = s.derive();
    assert_eq!(ds, Lps::monomial("z", d.clone() + g(1), 0, d.clone() + g(2), 6, K));
    assert!(ds.exponent_set().contains_mod_z(&d));
}

#[test]
fn mismatched_variables_are_rejected() {
    let a = Lps::monomial("x", g(1), 0, g(1), 2, K);
    let b = Lps::monomial("y", g(1), 0, g(1), 2, K);
    assert!(matches!(a.mul(&b), Err(Error::VariableMismatch(..))));
    assert!(matches!(a.add(&b), Err(Error::VariableMismatch(..))));
}

#[test]
fn geometric_series_value() {
    let coeffs: Vec<GaussRational> = (0..=40).map(|m| g(if m % 2 == 0 { 1 } else { -1 })).collect();
    let s = Lps::power_series("z", &coeffs, 40, K);
    let (v, tail) = s.eval(Complex64::new(0.5, 0.0)).unwrap();
    assert!((v.re - 2.0 / 3.0).abs() < 1e-12);
    assert!(v.im.abs() < 1e-15);
    assert!(tail < 1e-11);
}

#[test]
fn evaluation_on_the_cut_fails() {
    let s = Lps::monomial("z", gq(1, 2), 0, g(1), 2, K);
    for z in [Complex64::new(-2.0, 0.0), Complex64::new(0.0, 0.0)] {
        assert!(matches!(s.eval(z), Err(Error::BranchCut(_))));
    }
    let just_above = s.eval(Complex64::new(-4.0, 1e-300)).unwrap().0;
    assert!((just_above - Complex64::new(0.0, 2.0)).norm() < 1e-12);
}

#[test]
fn iota_examples() {
    let s = iota_xy(&g(-1), 3);
    assert_eq!(s.flavor(), Flavor::IotaXY);
    let mut want = MonomialSeries2::zero(Flavor::IotaXY);
    for j in 0..=3 {
        want.push(Monomial2::int(-1 - j, j, 0), g(1));
    }
    assert_eq!(s, want);

    let sq = iota_xy(&g(2), 5);
    let mut poly = MonomialSeries2::zero(Flavor::IotaXY);
    poly.push(Monomial2::int(2, 0, 0), g(1));
    poly.push(Monomial2::int(1, 1, 0), g(-2));
    poly.push(Monomial2::int(0, 2, 0), g(1));
    assert_eq!(sq, poly);

    let h = iota_xy(&gq(1, 2), 1);
    let mut want = MonomialSeries2::zero(Flavor::IotaXY);
    want.push(Monomial2::new(gq(1, 2), g(0), g(0)), g(1));
    want.push(Monomial2::new(gq(-1, 2), g(1), g(0)), gq(-1, 2));
    assert_eq!(h, want);

    let s = iota_y_xmy(&g(-1), 2);
    let mut want = MonomialSeries2::zero(Flavor::IotaYXmY);
    want.push(Monomial2::int(0, -1, 0), g(1));
    want.push(Monomial2::int(0, -2, 1), g(-1));
    want.push(Monomial2::int(0, -3, 2), g(1));
    assert_eq!(s, want);
}

#[test]
fn iota_reconstructs_integer_powers() {
    for n in 0..=12i64 {
        // (x - y)^n expanded by hand
        let mut xmy = MonomialSeries2::zero(Flavor::IotaXY);
        for j in 0..=n as u32 {
            let c = choose(n, j) * if j % 2 == 0 { Q::one() } else { -Q::one() };
            xmy.push(Monomial2::int(n - j as i64, j as i64, 0), GaussRational::real(c));
        }
        assert_eq!(iota_xy(&g(n), n as u32), xmy, "n = {n}");
        let x_n = MonomialSeries2::monomial(Monomial2::int(n, 0, 0), g(1), Flavor::IotaYXmY);
        assert_eq!(iota_y_xmy(&g(n), n as u32).expand_integer_xmy(), x_n, "n = {n}");
    }
}

#[test]
fn iota_expansion_converges_in_its_region() {
    let s = gq(1, 3);
    let (x, y) = (Complex64::new(3.0, 1.0), Complex64::new(0.5, -0.4));
    let exact = (x - y).powc(Complex64::new(1.0 / 3.0, 0.0));
    let v = iota_xy(&s, 60).eval(x, y).unwrap();
    assert!((v - exact).norm() < 1e-12);
    let (x, y) = (Complex64::new(2.1, 0.3), Complex64::new(2.0, 0.0));
    let v = iota_y_xmy(&s, 40).eval(x, y).unwrap();
    assert!((v - x.powc(Complex64::new(1.0 / 3.0, 0.0))).norm() < 1e-12);
}

#[test]
fn log_substitute_examples() {
    let v = log_x_substitute(10_000).eval(Complex64::new(2.0, 0.0), Complex64::new(1.0, 0.0)).unwrap();
    assert!((v.re - 2f64.ln()).abs() < 1e-4);
    let y = Complex64::new(-1.0, 2.0);
    assert!((log_x_substitute(12).eval(y, y).unwrap() - y.ln()).norm() < 1e-14);
    let mut geometric = MonomialSeries2::zero(Flavor::IotaYXmY);
    for j in 0..20i64 {
        geometric.push(Monomial2::int(0, -j - 1, j), g(if j % 2 == 0 { 1 } else { -1 }));
    }
    assert_eq!(log_x_substitute(20).derive_x(), geometric);
}

/// Coefficient maps `(a, b, e) -> c` for comparison with an independent sum.
fn coefficients(s: &MonomialSeries2) -> BTreeMap<(i64, i64, i64), Q> {
    s.terms()
        .iter()
        .map(|(m, c)| {
            assert!(c.im.is_zero());
            let int = |v: &GaussRational| v.integer_offset(&g(0)).expect("integer exponent");
            ((int(&m.a), int(&m.b), int(&m.e)), c.re.clone())
        })
        .collect()
}

#[test]
fn expansion_identity_in_x_and_y() {
    let terms = 10u32;
    for n in -3..=3i64 {
        for l in 0..=8u32 {
            let (lhs, rhs) = binomial_identity_xy(n, l, terms);
            assert_eq!(lhs, rhs, "n = {n}, l = {l}");
            let mut want = BTreeMap::new();
            for i in 0..terms {
                let j = l + i;
                let c = choose(n, j) * choose(j as i64, l);
                if !c.is_zero() {
                    want.insert((n - j as i64, i as i64, 0), c);
                }
            }
            assert_eq!(coefficients(&lhs), want, "n = {n}, l = {l}");
        }
    }
}

#[test]
fn expansion_identity_in_y_and_x_minus_y() {
    for n in -3..=3i64 {
        for l in 0..=8u32 {
            let (lhs, rhs) = binomial_identity_yxmy(n, l);
            assert_eq!(lhs.expand_integer_xmy(), rhs.expand_integer_xmy(), "n = {n}, l = {l}");
            // C(n, l) (-1)^l x^l in the monomial basis
            let mut want = BTreeMap::new();
            let c = choose(n, l) * if l % 2 == 0 { Q::one() } else { -Q::one() };
            if !c.is_zero() {
                want.insert((l as i64, 0, 0), c);
            }
            assert_eq!(coefficients(&rhs.expand_integer_xmy()), want, "n = {n}, l = {l}");
        }
    }
}
