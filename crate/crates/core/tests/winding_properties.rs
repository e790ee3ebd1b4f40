use harmonic_index::winding::{self, ClosedCurve};
use harmonic_index::zeros;
use harmonic_index::{Complex, HarmonicMapping, Result};
use proptest::prelude::*;
use std::f64::consts::{PI, TAU};

fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

fn point() -> impl Strategy<Value = Complex> {
    (0.0..1.0f64, -PI..PI).prop_map(|(r, t)| Complex::from_polar(2.0 * r.sqrt(), t))
}

#[test]
fn index_on_circle_matches_winding_on_square() {
    for text in ["-z/(z^2-1)", "z/(z^2-1)", "2*z^3+1/(8*z)", "z^3+0.3*z"] {
        let f = HarmonicMapping::parse(text).unwrap();
        let report = zeros::find_zeros(&f, &zeros::default_region(&f)).unwrap();
        let mut others: Vec<Complex> = report.zeros.iter().map(|p| p.location).collect();
        others.extend(f.h().poles().unwrap().iter().map(|p| p.location));
        for z in &report.zeros {
            let r = winding::auto_index_radius(z.location, &others);
            let circle = winding::poincare_index(&f, z.location, Some(r)).unwrap();
            // a square of half width r / 2 stays inside the disk of radius r
            let square = ClosedCurve::square(z.location, 0.5 * r).unwrap();
            let on_square = winding::winding(&f, &square).unwrap().value;
            assert_eq!(circle, on_square, "{text} at {}", z.location);
        }
    }
}

#[test]
fn polygon_and_circle_agree_on_large_curves() {
    let f = HarmonicMapping::parse("2*z^3+1/(8*z)").unwrap();
    let circle = ClosedCurve::circle(c(0.0, 0.0), 3.0).unwrap();
    let hexagon = ClosedCurve::polygon(
        (0..6)
            .map(|k| Complex::from_polar(3.0, TAU * k as f64 / 6.0))
            .collect(),
    )
    .unwrap();
    assert_eq!(winding::winding(&f, &circle).unwrap().value, 3);
    assert_eq!(winding::winding(&f, &hexagon).unwrap().value, 3);
}

fn rotated(curve: &ClosedCurve, shift: f64) -> impl Fn(f64) -> Complex + '_ {
    move |t| curve.point((t + shift).rem_euclid(1.0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn start_point_does_not_matter(shift in 0.0..1.0f64, center in point(), radius in 0.3..2.5f64) {
        let f = HarmonicMapping::parse("z/(z^2-1)").unwrap();
        let curve = ClosedCurve::circle(center, radius).unwrap();
        let eval = |z| f.eval(z);
        let base = winding::winding_along(&eval, &|t| curve.point(t));
        let moved = winding::winding_along(&eval, &rotated(&curve, shift));
        // curves that pass too close to a zero or pole may fail either way
        if let (Ok(a), Ok(b)) = (base, moved) {
            prop_assert_eq!(a.value, b.value);
        }
    }

    #[test]
    fn reversing_twice_is_the_identity(center in point(), radius in 0.3..2.5f64) {
        let f = HarmonicMapping::parse("2*z^3+1/(8*z)").unwrap();
        let curve = ClosedCurve::circle(center, radius).unwrap();
        let eval = |z| f.eval(z);
        let forward = winding::winding_along(&eval, &|t| curve.point(t));
        let backward = winding::winding_along(&eval, &|t| curve.point(1.0 - t));
        let twice = winding::winding_along(&eval, &|t| curve.point(1.0 - (1.0 - t)));
        if let (Ok(a), Ok(b), Ok(c)) = (forward, backward, twice) {
            prop_assert_eq!(a.value, -b.value);
            prop_assert_eq!(a.value, c.value);
        }
    }

    #[test]
    fn accepted_windings_are_integral(center in point(), radius in 0.1..3.0f64) {
        let f = HarmonicMapping::parse("-z/(z^2-1)").unwrap();
        let curve = ClosedCurve::circle(center, radius).unwrap();
        if let Ok(w) = winding::winding(&f, &curve) {
            prop_assert!((w.total_phase / TAU - w.value as f64).abs() < winding::ROUNDING_TOL);
        }
    }
}

/// Symmetric Rouché: when `|f + g| < |f| + |g|` along the curve, `f / g`
/// never touches the positive reals and the windings agree. Samples must
/// satisfy the inequality with a relative margin; otherwise `f / g` could
/// slip past the positive axis between samples near a zero of `f` or `g`.
fn rouche_holds(
    f: &dyn Fn(Complex) -> Result<Complex>,
    g: &dyn Fn(Complex) -> Result<Complex>,
    curve: &ClosedCurve,
) -> bool {
    const SAMPLES: usize = 4096;
    const ROUCHE_MARGIN: f64 = 1e-2;
    (0..SAMPLES).all(|k| {
        let z = curve.point(k as f64 / SAMPLES as f64);
        match (f(z), g(z)) {
            (Ok(a), Ok(b)) => (a + b).norm() < (a.norm() + b.norm()) * (1.0 - ROUCHE_MARGIN),
            _ => false,
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rouche_pairs_have_equal_windings(
        roots in prop::collection::vec(point(), 1..5),
        bumps in prop::collection::vec(point(), 0..4),
        eps in 0.0..1.5f64,
        radius in 0.5..2.5f64,
    ) {
        let curve = ClosedCurve::circle(c(0.1, -0.2), radius).unwrap();
        // f has zeros at `roots`, g = -f + eps * q, plus conj(z) so the
        // pair is genuinely harmonic
        let f = |z: Complex| -> Result<Complex> {
            Ok(roots.iter().map(|r| z - r).product::<Complex>() - 0.2 * z.conj())
        };
        let g = |z: Complex| -> Result<Complex> {
            let q: Complex = bumps.iter().map(|b| z - b).product();
            Ok(-f(z)? + eps * q)
        };
        if rouche_holds(&f, &g, &curve) {
            let wf = winding::winding_of(f, &curve);
            let wg = winding::winding_of(g, &curve);
            if let (Ok(a), Ok(b)) = (wf, wg) {
                prop_assert_eq!(a.value, b.value);
            }
        }
    }
}

#[test]
fn rouche_harness_exercises_its_hypothesis() {
    // -2 (z - 0.5) against z - 0.5 + 0.1 z^2 on the unit circle: |f + g| is
    // small compared to |f| + |g|, so both wind once
    let f = |z: Complex| -> Result<Complex> { Ok(-2.0 * (z - 0.5)) };
    let g = |z: Complex| -> Result<Complex> { Ok(z - 0.5 + 0.1 * z * z) };
    let curve = ClosedCurve::circle(c(0.0, 0.0), 1.0).unwrap();
    assert!(rouche_holds(&f, &g, &curve));
    assert_eq!(winding::winding_of(f, &curve).unwrap().value, 1);
    assert_eq!(winding::winding_of(g, &curve).unwrap().value, 1);
}
