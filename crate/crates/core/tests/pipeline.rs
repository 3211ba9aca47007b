use fusionlab::heisenberg::{basis_correlator, closed_form_4pt, Chain, FourPoint};
use fusionlab::pipeline::{
    assemble_principal_branch, build_gvector, check_associativity, check_pentagon, in_d2, in_d3, sample_points,
    solve_connection, GComponent, GVector, PipelineConfig, Testbed,
};
use fusionlab::rewriter::{exponent_set, fock_modules, ExponentSet, Ladder, Normalization, Quadruple};
use fusionlab::scalar::{q, q_to_f64, qi, Q};
use fusionlab::Error;
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn unit() -> [Q; 3] {
    [qi(1), qi(1), qi(1)]
}

fn cf(x: &Q) -> Complex64 {
    c(q_to_f64(x), 0.0)
}

fn quad(m: &[Q; 3], theta: Vec<u32>, v: Vec<u32>, u: Vec<u32>, w: Vec<u32>) -> Quadruple<Vec<u32>> {
    Quadruple::new(&fock_modules(m, 6), theta, v, u, w)
}

#[test]
fn unit_momenta_at_the_base_point() {
    let r = check_associativity(&unit(), &[(c(7.0, 0.0), c(4.0, 0.0))], &PipelineConfig::default()).unwrap();
    let p = &r.points[0];
    assert!((p.a_bc - 84.0).norm() < 1e-9 * 84.0, "{}", p.a_bc);
    assert!((p.ab_c - 84.0).norm() < 1e-9 * 84.0, "{}", p.ab_c);
    assert!(p.cross_check <= 1e-8);
    assert_eq!(p.max_log_coefficient, 0.0);
    assert!(r.passed);
}

#[test]
fn sample_points_stay_in_the_domain_and_agree() {
    let pts = sample_points(7, 20, (c(7.0, 0.0), c(4.0, 0.0)), 0.5);
    assert_eq!(pts, sample_points(7, 20, (c(7.0, 0.0), c(4.0, 0.0)), 0.5));
    assert!(pts.iter().all(|&(x, y)| in_d2(x, y).is_ok()));
    let r = check_associativity(&[qi(2), qi(1), qi(3)], &pts, &PipelineConfig::default()).unwrap();
    assert!(r.passed, "{} {}", r.max_deviation, r.max_closed_form_deviation);
    assert!(r.max_cross_check <= 1e-8);
}

#[test]
fn vanishing_first_momentum_gives_the_three_point_form() {
    let m = [qi(0), q(1, 3), q(3, 4)];
    let (x, y) = (c(7.0, 0.3), c(4.0, 0.1));
    let r = check_associativity(&m, &[(x, y)], &PipelineConfig::default()).unwrap();
    let want = fusionlab::scalar::cpow(y, cf(&(&m[1] * &m[2])));
    let p = &r.points[0];
    assert!(p.deviation < 1e-12);
    assert!((p.a_bc - want).norm() < 1e-12 * want.norm());
}

#[test]
fn truncation_tails_are_reported_for_generic_momenta() {
    let m = [q(1, 2), qi(1), qi(1)];
    let r = check_associativity(&m, &[(c(7.0, 0.0), c(4.0, 0.0))], &PipelineConfig::default()).unwrap();
    let p = &r.points[0];
    // G_max = 12 at |y/x| = 4/7 leaves a visible tail, and the deviation is of its size
    assert!(p.tail_a > 1e-7 && p.tail_b > 1e-7);
    assert!(p.closed_form_deviation < 1e3 * p.tail_a.max(p.tail_b));
}

#[test]
fn domain_predicates() {
    assert!(in_d2(c(7.0, 0.0), c(4.0, 0.0)).is_ok());
    assert!(matches!(in_d2(c(4.0, 0.0), c(7.0, 0.0)), Err(Error::Region(_))));
    assert!(matches!(in_d2(c(7.0, 0.0), c(3.0, 0.0)), Err(Error::Region(_))));
    assert!(matches!(in_d2(c(-7.0, 0.0), c(-4.0, 0.0)), Err(Error::Region(_))));
    assert!(in_d3(c(7.0, 0.0), c(6.0, 0.0), c(4.0, 0.0)).is_ok());
    assert!(matches!(in_d3(c(7.0, 0.0), c(4.0, 0.0), c(6.0, 0.0)), Err(Error::Region(_))));
    let err = check_associativity(&unit(), &[(c(4.0, 0.0), c(7.0, 0.0))], &PipelineConfig::default());
    assert!(matches!(err, Err(Error::Region(_))));
    assert!(check_associativity(&unit(), &[], &PipelineConfig::default()).is_err());
}

#[test]
fn y_flavor_component_at_seven() {
    let m = [q(1, 2), qi(1), q(2, 3)];
    let four = FourPoint::new(m[0].clone(), m[1].clone(), m[2].clone());
    let hw = quad(&m, vec![], vec![], vec![], vec![]);
    let th = quad(&m, vec![2], vec![], vec![], vec![]);
    let g = build_gvector(&four, &[hw, th], Normalization::Y, c(7.0, 0.0), 20).unwrap();
    let y = c(2.0, 0.5);
    let vals = g.eval(y).unwrap();
    let want0 = closed_form_4pt(&m[0], &m[1], &m[2], c(7.0, 0.0), y).unwrap();
    let want1 = basis_correlator(&m[0], &m[1], &m[2], &[2], c(7.0, 0.0), y).unwrap();
    assert!((vals[0] - want0).norm() < 1e-9 * want0.norm());
    assert!((vals[1] - want1).norm() < 1e-9 * want1.norm());
    let (s, _) = g.component_series(0).unwrap().eval(y).unwrap();
    assert!((s - want0).norm() < 1e-9 * want0.norm());
    assert!(g.eval(c(8.0, 0.0)).is_err());
    assert!(build_gvector(&four, &[], Normalization::Y, c(-7.0, 0.0), 4).is_err());
}

#[test]
fn y_flavor_normalization_power() {
    let m = [q(1, 2), qi(1), q(2, 3)];
    let four = FourPoint::new(m[0].clone(), m[1].clone(), m[2].clone());
    let xi = quad(&m, vec![1], vec![], vec![1], vec![]);
    let g = build_gvector(&four, std::slice::from_ref(&xi), Normalization::Y, c(7.0, 0.0), 16).unwrap();
    let y = c(1.5, 0.0);
    let raw = four.direct_mode_sum(Chain::A, (&xi.theta, &xi.v, &xi.u, &xi.w), c(7.0, 0.0), y, 16).unwrap();
    assert!((g.eval(y).unwrap()[0] - raw.value * y).norm() < 1e-12 * raw.value.norm());
}

#[test]
fn zero_quadruple_gives_a_zero_component() {
    let m = [qi(0), qi(0), qi(0)];
    let four = FourPoint::new(qi(0), qi(0), qi(0));
    let xi = quad(&m, vec![], vec![1], vec![], vec![]);
    let g = build_gvector(&four, &[xi], Normalization::Xmy, c(4.0, 0.0), 8).unwrap();
    assert_eq!(g.eval(c(7.0, 0.0)).unwrap(), vec![c(0.0, 0.0)]);
}

fn small_testbed(m: &[Q; 3], n: u32, order: usize) -> Testbed {
    Testbed::new(m, PipelineConfig { n, order, ..Default::default() }).unwrap()
}

#[test]
fn one_dimensional_connection_recovers_the_closed_form_coefficient() {
    let m = [q(1, 2), qi(1), q(2, 3)];
    let tb = small_testbed(&m, 0, 90);
    let y0 = c(4.0, 0.0);
    let lambda = tb.connection(y0).unwrap();
    assert_eq!(lambda.series.size(), 1);
    // exact closed-form expansion in y/x, deep enough that its tail is negligible
    let cap = &m[1] * &m[2] + qi(80);
    let series = tb.four.basis_series(Chain::A, &[], &cap);
    let g = GVector {
        flavor: Normalization::Xmy,
        basepoint: y0,
        components: vec![GComponent { quadruple: tb.vacuum_quadruple(), gr234: 0, series }],
    };
    let sol = solve_connection(&g, &lambda.series, y0 * 1.75, y0 * 1.6, 90, 1e12).unwrap();
    let lead = sol.solution.leading_matrix()[(0, 0)];
    let norm = sol.coefficients[0] * lead / fusionlab::scalar::cpow(y0, cf(&(&m[0] * &m[2] + &m[1] * &m[2])));
    assert!((norm - 1.0).norm() < 1e-8, "{norm}");
    assert!(sol.cross_check.unwrap().1 < 1e-8);
    assert!(sol.residual < 1e-12);
}

#[test]
fn zero_g_vector_has_zero_coefficients_and_empty_assembly() {
    let tb = small_testbed(&unit(), 2, 12);
    let y0 = c(4.0, 0.0);
    let lambda = tb.connection(y0).unwrap();
    let mut g = tb.gvector(y0).unwrap();
    for comp in &mut g.components {
        comp.series.terms.clear();
    }
    let sol = solve_connection(&g, &lambda.series, y0 * 1.75, y0 * 1.6, 12, 1e12).unwrap();
    assert!(sol.coefficients.iter().all(|z| z.norm() == 0.0));
    let ex = exponent_set(&lambda.constant_term()).unwrap();
    let asm = assemble_principal_branch(&sol, &ex, tb.index(), tb.max_grade_c()).unwrap();
    assert!(asm.is_empty());
}

#[test]
fn matching_point_outside_the_overlap_is_rejected() {
    let tb = small_testbed(&unit(), 0, 8);
    let y0 = c(4.0, 0.0);
    let lambda = tb.connection(y0).unwrap();
    let g = tb.gvector(y0).unwrap();
    let err = solve_connection(&g, &lambda.series, c(9.0, 0.0), c(6.5, 0.0), 8, 1e12);
    assert!(matches!(err, Err(Error::Region(_))));
}

#[test]
fn assembly_reproduces_the_closed_form_around_the_diagonal() {
    for m in [unit(), [qi(2), qi(1), qi(3)]] {
        let tb = small_testbed(&m, 3, 24);
        let y0 = c(4.0, 0.5);
        let lambda = tb.connection(y0).unwrap();
        let ex = exponent_set(&lambda.constant_term()).unwrap();
        let g = tb.gvector(y0).unwrap();
        let sol = solve_connection(&g, &lambda.series, y0 * 1.75, y0 * 1.6, 24, 1e12).unwrap();
        let asm = assemble_principal_branch(&sol, &ex, tb.index(), tb.max_grade_c()).unwrap();
        assert_eq!(asm.max_log_coefficient(), 0.0);
        let ab = &m[0] * &m[1];
        for (i, xi) in tb.index().iter().enumerate() {
            let cap = &ab + qi(20);
            let oracle = tb.four.basis_series(Chain::B, &xi.theta, &cap);
            let scale = asm.components[i].terms.iter().map(|t| t.coefficient.norm()).fold(0.0, f64::max);
            for k in 0..=20 {
                let e = &ab + qi(k);
                let want = oracle.terms.get(&e).map_or(c(0.0, 0.0), |v| {
                    cf(v) * fusionlab::scalar::cpow(y0, cf(&(&oracle.degree - &e)))
                });
                let got = asm.coefficient(i, cf(&e), 0, 1e-9);
                assert!((got - want).norm() <= 1e-9 * scale, "{xi:?} k={k}: {got} vs {want}");
            }
            // branch consistency: the assembly and the chain-A sum agree on the overlap
            let x1 = y0 * 1.7;
            let direct = g.eval(x1).unwrap()[i];
            assert!((asm.eval(i, x1).unwrap() - direct).norm() < 1e-9 * direct.norm().max(1.0));
        }
    }
}

#[test]
fn off_ladder_exponents_are_hard_failures() {
    let tb = small_testbed(&unit(), 0, 8);
    let y0 = c(4.0, 0.0);
    let lambda = tb.connection(y0).unwrap();
    let g = tb.gvector(y0).unwrap();
    let sol = solve_connection(&g, &lambda.series, y0 * 1.75, y0 * 1.6, 8, 1e12).unwrap();
    let wrong = ExponentSet { eigenvalues: vec![c(0.5, 0.0)], ladders: vec![Ladder { base: c(0.5, 0.0), offsets: vec![0] }] };
    let err = assemble_principal_branch(&sol, &wrong, tb.index(), 0);
    assert!(matches!(err, Err(Error::Ladder(_))));
    // a ladder base above the observed exponent is also a violation
    let high = ExponentSet { eigenvalues: vec![c(3.0, 0.0)], ladders: vec![Ladder { base: c(3.0, 0.0), offsets: vec![0] }] };
    assert!(matches!(assemble_principal_branch(&sol, &high, tb.index(), 0), Err(Error::Ladder(_))));
}

#[test]
fn pentagon_at_seven_six_four() {
    let m = [qi(1), qi(1), qi(1), qi(1)];
    let r = check_pentagon(&m, (c(7.0, 0.0), c(6.0, 0.0), c(4.0, 0.0)), 8, 1e-5).unwrap();
    assert_eq!(r.values.len(), 5);
    for v in &r.values {
        assert!((v.value - 1008.0).norm() < 1e-9 * 1008.0, "{}: {}", v.bracketing.name(), v.value);
    }
    assert!((r.oracle - 1008.0).norm() < 1e-9);
    assert!(r.passed);
}

#[test]
fn pentagon_with_trivial_fourth_momentum_is_a_four_point_function() {
    let m = [qi(1), qi(2), qi(1), qi(0)];
    let (x, y, z) = (c(7.0, 0.2), c(6.0, 0.1), c(4.0, 0.0));
    let r = check_pentagon(&m, (x, y, z), 10, 1e-8).unwrap();
    let want = closed_form_4pt(&m[0], &m[1], &m[2], x - z, y - z).unwrap();
    assert!((r.oracle - want).norm() < 1e-12 * want.norm());
    assert!(r.passed, "{:?}", r);
}

#[test]
fn pentagon_region_violation() {
    let m = [qi(1), qi(1), qi(1), qi(1)];
    let err = check_pentagon(&m, (c(7.0, 0.0), c(4.0, 0.0), c(6.0, 0.0)), 4, 1e-5);
    assert!(matches!(err, Err(Error::Region(_))));
}
