//! Worked examples with independently computed reference values.
//!
//! Continuous references were obtained with an independent adaptive
//! integrator (scipy) on `ln|T(jω)|/ω²`, discrete ones from Jensen's formula.

use csbi_core::csbi::{
    csbi_continuous, csbi_discrete, middleton_crosscheck, sung_crosscheck, WARN_CANCELLATION, WARN_SIGN_CONVENTION,
    WARN_UNSTABLE,
};
use csbi_core::quadrature::{csbi_continuous_numeric, csbi_discrete_numeric};
use csbi_core::stability::stability_by_roots;
use csbi_core::transfer_function::DEFAULT_BOUNDARY_TOL;
use csbi_core::{
    parse_tf, CaseTag, CsbiStatus, DivergenceSign, Domain, LoopTf64, Poly64, QuadOptions64, QuadStatus, Refusal,
};

const L1: &str = "-1.164e-4*(s-10)*(s+0.0625)/(s^2*(s+10))";
const L2: &str = "-5.77*(s-10)*(s+1)/(s*(s+10)*(s+1))";
const L3: &str = "-2.0348*(s-1)/(s^2+3*s+2)";
const L4: &str = "2*(z+2)/(z+0.5)";

fn tf(text: &str) -> LoopTf64 {
    parse_tf(text).unwrap()
}

fn opts() -> QuadOptions64 {
    QuadOptions64::default()
}

#[test]
fn l1_multi_integrator() {
    let l = tf(L1);
    assert_eq!(l.integrator_count(), 2);
    assert_eq!(l.relative_degree(), 1);
    let r = csbi_continuous(&l, DEFAULT_BOUNDARY_TOL).unwrap();
    assert_eq!(r.case_tag, Some(CaseTag::ContMultiIntegrator));
    assert!((r.value.unwrap() - 0.1).abs() < 1e-12);
    let cl = l.close_loop().unwrap();
    assert!(stability_by_roots(&cl, 1e-9).stable);
    let n = csbi_continuous_numeric(&cl, &opts()).unwrap();
    // Reference 0.1000000002 from an independent integrator.
    assert!((n.value.unwrap() - 0.1).abs() < 1e-6, "{n:?}");
    assert!((middleton_crosscheck(&cl).unwrap() - 0.1).abs() < 1e-9);
}

#[test]
fn l1_closed_loop_poles() {
    let cl = tf(L1).close_loop().unwrap();
    let mut poles = cl.poles.clone();
    poles.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
    assert!((poles[0].re + 9.99977).abs() < 1e-4);
    assert!((poles[1].re + 5.747e-5).abs() < 1e-7);
    assert!((poles[2].im - 2.69664e-3).abs() < 1e-7);
}

#[test]
fn l2_single_integrator_with_common_factor() {
    let l = tf(L2);
    assert_eq!(l.integrator_count(), 1);
    let r = csbi_continuous(&l, DEFAULT_BOUNDARY_TOL).unwrap();
    assert_eq!(r.case_tag, Some(CaseTag::ContSingleIntegrator));
    assert!((r.value.unwrap() - 77.0 / 5770.0).abs() < 1e-12);
    assert!(r.warnings.iter().any(|w| w.starts_with(WARN_CANCELLATION)));

    let cancelled = l.cancel_common_factors(1e-7).unwrap();
    let rc = csbi_continuous(&cancelled, DEFAULT_BOUNDARY_TOL).unwrap();
    assert!((rc.value.unwrap() - r.value.unwrap()).abs() < 1e-12);

    let cl = l.close_loop().unwrap();
    let n = csbi_continuous_numeric(&cl, &opts()).unwrap();
    assert!((n.value.unwrap() - 0.0133448873).abs() < 1e-6, "{n:?}");
    assert!((middleton_crosscheck(&cl).unwrap() - 77.0 / 5770.0).abs() < 1e-9);
}

#[test]
fn l2_reduced_closed_loop_denominator() {
    let cl = tf(L2).cancel_common_factors(1e-7).unwrap().close_loop().unwrap();
    let expected = [57.7, 4.23, 1.0];
    for (k, e) in expected.iter().enumerate() {
        assert!((cl.den_poly.coeff(k) - e).abs() < 1e-12);
    }
    let v = stability_by_roots(&cl, 1e-9);
    assert!(v.stable && v.method_agreement);
    assert!((v.margin - 2.115).abs() < 1e-12);
}

#[test]
fn l3_diverges_to_minus_infinity() {
    let l = tf(L3);
    let r = csbi_continuous(&l, DEFAULT_BOUNDARY_TOL).unwrap();
    assert_eq!(r.status, CsbiStatus::MinusInfinity);
    assert_eq!(r.case_tag, Some(CaseTag::ContNoIntegratorUnbounded));
    assert!(r.warnings.iter().any(|w| w.starts_with(WARN_SIGN_CONVENTION)));
    let cl = l.close_loop().unwrap();
    assert!((cl.value_at_zero() - 2.0348 / 4.0348).abs() < 1e-15);
    let n = csbi_continuous_numeric(&cl, &opts()).unwrap();
    assert_eq!(n.status, QuadStatus::DivergenceSuspected);
    assert_eq!(n.divergence_sign, Some(DivergenceSign::Minus));
    assert!(n.value.is_none());
    assert!(n.notes.iter().any(|s| s.contains("growth confirmed")), "{:?}", n.notes);
}

#[test]
fn l4_analytic_value_and_unstable_closed_loop() {
    let l = tf(L4);
    assert_eq!(l.relative_degree(), 0);
    let r = csbi_discrete(&l, DEFAULT_BOUNDARY_TOL).unwrap();
    assert_eq!(r.case_tag, Some(CaseTag::DiscBiproper));
    assert!((r.value.unwrap() - (1.0 + (2.0f64 / 3.0).log2())).abs() < 1e-12);
    assert!(r.warnings.iter().any(|w| w.starts_with(WARN_UNSTABLE)));
    let v = r.stability.as_ref().unwrap();
    assert!(!v.stable);
    assert!((v.offenders[0].re + 1.5).abs() < 1e-12);
}

#[test]
fn l4_numeric_value_follows_the_actual_integrand() {
    // T = (2/3)(z + 2)/(z + 1.5): Jensen gives log₂(2/3) + log₂2 − log₂1.5.
    let cl = tf(L4).close_loop().unwrap();
    let n = csbi_discrete_numeric(&cl, &opts()).unwrap();
    let jensen = (2.0f64 / 3.0).log2() + 1.0 - 1.5f64.log2();
    assert!((n.value.unwrap() - jensen).abs() < 1e-6, "{n:?}");
    assert!((n.value.unwrap() - jensen).abs() <= 3.0 * n.abs_error_estimate.max(1e-12));
}

#[test]
fn discrete_strictly_proper_examples() {
    let l = tf("0.5/(z-0.2)");
    let r = csbi_discrete(&l, DEFAULT_BOUNDARY_TOL).unwrap();
    assert_eq!(r.value, Some(-1.0));
    assert_eq!(sung_crosscheck(&l).unwrap(), -1.0);
    let n = csbi_discrete_numeric(&l.close_loop().unwrap(), &opts()).unwrap();
    assert!((n.value.unwrap() + 1.0).abs() < 1e-6);

    let l = tf("(z-3)/z^2");
    let r = csbi_discrete(&l, DEFAULT_BOUNDARY_TOL).unwrap();
    assert!((r.value.unwrap() - 3f64.log2()).abs() < 1e-15);
    assert_eq!(sung_crosscheck(&l).unwrap(), r.value.unwrap());
    assert_eq!(sung_crosscheck(&tf("(z-0.5)/z^2")).unwrap(), 0.0);
}

#[test]
fn spec_polynomial_examples() {
    let p = Poly64::new(vec![2.0, 3.0, 1.0]) + Poly64::new(vec![2.0348, -2.0348]);
    for (c, e) in p.coeffs().iter().zip([4.0348, 0.9652, 1.0]) {
        assert!((c - e).abs() < 1e-12);
    }
    let r = p.roots().unwrap();
    assert!(r.roots.iter().all(|z| (z.re + 0.4826).abs() < 1e-12));
    let r = Poly64::new(vec![57.7, 4.23, 1.0]).roots().unwrap();
    assert!(r.roots.iter().all(|z| (z.re + 2.115).abs() < 1e-12 && (z.im.abs() - 7.29567).abs() < 1e-5));
}

#[test]
fn refusals_and_degenerate_cases() {
    let r = csbi_continuous(&tf("(s^2+4)/(s*(s+1)*(s+2))"), DEFAULT_BOUNDARY_TOL).unwrap();
    assert_eq!(r.refusal, Some(Refusal::BoundaryZero));
    let r = csbi_continuous(&tf("-3/(s+1)"), DEFAULT_BOUNDARY_TOL).unwrap();
    assert_eq!(r.refusal, Some(Refusal::UnstableClosedLoop));
    let r = csbi_discrete(&tf("-(z-0.5)/(z+0.2)"), DEFAULT_BOUNDARY_TOL).unwrap();
    assert_eq!(r.refusal, Some(Refusal::NonCausal));
    let r = csbi_discrete(&tf("(z-1)/z^2"), DEFAULT_BOUNDARY_TOL).unwrap();
    assert_eq!(r.refusal, Some(Refusal::BoundaryZero));
}

#[test]
fn single_pole_loop_matches_oracle() {
    let l = tf("1/s");
    assert_eq!(l.domain(), Domain::Continuous);
    let r = csbi_continuous(&l, DEFAULT_BOUNDARY_TOL).unwrap();
    assert_eq!(r.value, Some(-0.5));
    let cl = l.close_loop().unwrap();
    assert_eq!(middleton_crosscheck(&cl).unwrap(), -0.5);
    let n = csbi_continuous_numeric(&cl, &opts()).unwrap();
    assert!((n.value.unwrap() + 0.5).abs() < 1e-6);
}
