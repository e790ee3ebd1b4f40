use harmonic_index::classifier::IndexVerdict;
use harmonic_index::function::{poles_of, CanonicalForm};
use harmonic_index::zeros::{self, ExceptionalPoint};
use harmonic_index::{parse_function, AnalyticFunction, Complex, HarmonicMapping};
use proptest::prelude::*;
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

fn point(radius: f64) -> impl Strategy<Value = Complex> {
    (0.0..1.0f64, -PI..PI).prop_map(move |(r, t)| Complex::from_polar(radius * r.sqrt(), t))
}

const SAMPLE_FUNCTIONS: [&str; 6] = [
    "z/(z^2-1)",
    "2*z^3+1/(8*z)",
    "exp(z)-1",
    "(z-0.5i)^3/(z^2+z+1)",
    "exp(z^2)*z - 3",
    "1/(z-2)^2 + 0.25*z^4",
];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn derivative_matches_forward_difference(z in point(0.8), k in 0..SAMPLE_FUNCTIONS.len()) {
        let h = parse_function(SAMPLE_FUNCTIONS[k]).unwrap();
        let dh = h.derivative();
        let eps = 1e-6;
        if let (Ok(a), Ok(b), Ok(d)) = (h.eval(z + eps), h.eval(z), dh.eval(z)) {
            let second = h.derivative().derivative().eval(z).unwrap().norm();
            let fd = (a - b) / eps;
            // forward difference error is about eps |h''| / 2
            prop_assert!((fd - d).norm() <= eps * (second + 1.0) + 1e-8 * (1.0 + d.norm()),
                "{}: {} vs {}", SAMPLE_FUNCTIONS[k], fd, d);
        }
    }

    #[test]
    fn poles_of_factored_denominators_are_recovered(
        roots in prop::collection::vec(point(2.0), 1..5),
        num in prop::collection::vec(point(1.0), 1..4),
    ) {
        // keep the roots apart so multiplicity clustering does not merge them
        for (i, a) in roots.iter().enumerate() {
            for b in &roots[..i] {
                prop_assume!((a - b).norm() > 1e-2);
            }
        }
        let den = roots.iter().fold(vec![c(1.0, 0.0)], |acc, r| {
            let mut next = vec![c(0.0, 0.0); acc.len() + 1];
            for (k, a) in acc.iter().enumerate() {
                next[k + 1] += a;
                next[k] -= a * r;
            }
            next
        });
        let numerator = AnalyticFunction::polynomial(&num);
        // skip numerators that (nearly) cancel a root
        for r in &roots {
            prop_assume!(numerator.eval(*r).unwrap().norm() > 1e-3);
        }
        let h = AnalyticFunction::rational(&num, &den).unwrap();
        let poles = poles_of(&h).unwrap();
        prop_assert_eq!(poles.len(), roots.len());
        for r in &roots {
            prop_assert!(poles.iter().any(|p| (p.location - r).norm() < 1e-8 && p.multiplicity == 1),
                "root {} missing from {:?}", r, poles);
        }
    }

    #[test]
    fn printed_text_reparses_to_the_same_function(
        num in prop::collection::vec(point(2.0), 1..5),
        den in prop::collection::vec(point(2.0), 2..4),
        z in point(3.0),
    ) {
        let h = AnalyticFunction::rational(&num, &den).unwrap();
        let again = parse_function(h.text()).unwrap();
        prop_assert_eq!(h.rational_type(), again.rational_type());
        if let (Ok(a), Ok(b)) = (h.eval(z), again.eval(z)) {
            prop_assert!((a - b).norm() <= 1e-12 * (1.0 + a.norm()));
        }
    }
}

#[test]
fn json_round_trip_of_functions_keeps_canonical_form() {
    for text in SAMPLE_FUNCTIONS {
        let h = parse_function(text).unwrap();
        let json = serde_json::to_string(&h).unwrap();
        let back: AnalyticFunction = serde_json::from_str(&json).unwrap();
        assert_eq!(back.text(), h.text());
        match (h.canonical(), back.canonical()) {
            (CanonicalForm::Transcendental, CanonicalForm::Transcendental) => {}
            (a, b) => assert_eq!(a, b, "{text}"),
        }
    }
}

#[test]
fn json_round_trip_of_reports() {
    let f = HarmonicMapping::parse("2*z^3+1/(8*z)").unwrap();
    let report = zeros::find_zeros(&f, &zeros::default_region(&f)).unwrap();
    let json = serde_json::to_string(&report.zeros).unwrap();
    let back: Vec<ExceptionalPoint> = serde_json::from_str(&json).unwrap();
    assert_eq!(back, report.zeros);

    let v = harmonic_index::classifier::index(&f, c(0.0, 0.5)).unwrap();
    let json = serde_json::to_value(v).unwrap();
    assert_eq!(json["value"], 0);
    assert_eq!(json["method"], "GeneralTheorem");
    assert_eq!(json["n"], 2);
    let back: IndexVerdict = serde_json::from_value(json).unwrap();
    assert_eq!(back, v);
}

#[test]
fn polynomial_recentering_reconstructs_values() {
    let h = parse_function("(z-1)^4*(2+i) - 3*z^2 + 0.5").unwrap();
    for center in [c(0.0, 0.0), c(1.5, -0.5), c(-2.0, 3.0)] {
        let s = h.taylor_at(center, 4).unwrap();
        assert!(s.exact_tail);
        for z in [c(0.3, 0.2), c(-1.0, 1.0), c(4.0, 0.0)] {
            let want = h.eval(z).unwrap();
            assert!((s.eval(z) - want).norm() <= 1e-9 * (1.0 + want.norm()));
        }
    }
}
