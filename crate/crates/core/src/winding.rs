//! Winding of a function along closed curves by continuous argument
//! tracking, and Poincaré indices from windings on shrinking circles.
//!
//! This is the theorem-free oracle: it only evaluates `f` and never looks
//! at Taylor coefficients.

use crate::error::{Error, Result};
use crate::function::HarmonicMapping;
use crate::Complex;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_3, TAU};

/// Samples placed on a curve before adaptive refinement.
pub const INITIAL_SAMPLES: usize = 256;
/// Largest accepted phase change between neighbouring samples.
pub const MAX_PHASE_STEP: f64 = FRAC_PI_3;
/// Bisection depth per initial parameter interval.
pub const MAX_BISECTIONS: u32 = 24;
/// `|f|` below this times the curve's scale counts as a zero on the curve.
pub const ZERO_ON_CURVE_TOL: f64 = 1e-12;
/// Allowed distance of `total_phase / 2π` from the nearest integer.
pub const ROUNDING_TOL: f64 = 0.25;
/// Default starting radius of the index ladder.
pub const DEFAULT_INDEX_RADIUS: f64 = 0.1;
/// Halvings allowed in the index ladder.
pub const MAX_HALVINGS: usize = 40;
/// `min |f| < NON_ISOLATED_TOL * r` on this many consecutive circles flags a
/// non-isolated zero.
pub const NON_ISOLATED_TOL: f64 = 1e-9;
pub const NON_ISOLATED_STREAK: usize = 5;
/// Bisection cap for the retry when a circle of the index ladder hits
/// [`MAX_BISECTIONS`]: 48 levels resolve the parameter to about `1e-16`.
pub const DEEP_BISECTIONS: u32 = 48;

/// A positively oriented closed curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClosedCurve {
    Circle {
        center: Complex,
        radius: f64,
    },
    /// Implicitly closed; stored counterclockwise.
    Polygon {
        vertices: Vec<Complex>,
    },
}

impl ClosedCurve {
    pub fn circle(center: Complex, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) || !center.is_finite() {
            return Err(Error::InvalidCurve(format!(
                "circle radius {radius} must be positive"
            )));
        }
        Ok(ClosedCurve::Circle { center, radius })
    }

    /// A simple polygon; clockwise input is reversed to positive orientation.
    pub fn polygon(mut vertices: Vec<Complex>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::InvalidCurve(
                "polygon needs at least 3 vertices".into(),
            ));
        }
        if vertices.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidCurve("non-finite polygon vertex".into()));
        }
        if !is_simple(&vertices) {
            return Err(Error::InvalidCurve("polygon is self-intersecting".into()));
        }
        if signed_area(&vertices) < 0.0 {
            vertices.reverse();
        }
        Ok(ClosedCurve::Polygon { vertices })
    }

    /// Axis-aligned square.
    pub fn square(center: Complex, half_width: f64) -> Result<Self> {
        let d = half_width;
        ClosedCurve::polygon(vec![
            center + Complex::new(-d, -d),
            center + Complex::new(d, -d),
            center + Complex::new(d, d),
            center + Complex::new(-d, d),
        ])
    }

    /// Point at parameter `t` in `[0, 1]`; `t = 0` and `t = 1` coincide.
    pub fn point(&self, t: f64) -> Complex {
        match self {
            ClosedCurve::Circle { center, radius } => {
                center + Complex::from_polar(*radius, TAU * t)
            }
            ClosedCurve::Polygon { vertices } => {
                let m = vertices.len();
                let s = (t.rem_euclid(1.0)) * m as f64;
                let k = (s.floor() as usize).min(m - 1);
                let u = s - k as f64;
                vertices[k] + (vertices[(k + 1) % m] - vertices[k]) * u
            }
        }
    }

    /// Distance from `p` to the curve.
    pub fn distance_to(&self, p: Complex) -> f64 {
        match self {
            ClosedCurve::Circle { center, radius } => ((p - center).norm() - radius).abs(),
            ClosedCurve::Polygon { vertices } => {
                let m = vertices.len();
                (0..m)
                    .map(|k| segment_distance(p, vertices[k], vertices[(k + 1) % m]))
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }
}

fn signed_area(v: &[Complex]) -> f64 {
    let m = v.len();
    (0..m)
        .map(|k| {
            let (a, b) = (v[k], v[(k + 1) % m]);
            a.re * b.im - b.re * a.im
        })
        .sum::<f64>()
        / 2.0
}

fn segment_distance(p: Complex, a: Complex, b: Complex) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = (((p - a) * ab.conj()).re / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

fn orient(a: Complex, b: Complex, c: Complex) -> f64 {
    let (u, v) = (b - a, c - a);
    u.re * v.im - u.im * v.re
}

fn segments_intersect(p1: Complex, p2: Complex, q1: Complex, q2: Complex) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    let on = |a: Complex, b: Complex, c: Complex, d: f64| {
        d == 0.0
            && c.re >= a.re.min(b.re)
            && c.re <= a.re.max(b.re)
            && c.im >= a.im.min(b.im)
            && c.im <= a.im.max(b.im)
    };
    on(q1, q2, p1, d1) || on(q1, q2, p2, d2) || on(p1, p2, q1, d3) || on(p1, p2, q2, d4)
}

fn is_simple(v: &[Complex]) -> bool {
    let m = v.len();
    for i in 0..m {
        for j in (i + 1)..m {
            let adjacent = j == i + 1 || (i == 0 && j == m - 1);
            if adjacent {
                continue;
            }
            if segments_intersect(v[i], v[(i + 1) % m], v[j], v[(j + 1) % m]) {
                return false;
            }
        }
    }
    // repeated vertices make adjacent edges overlap
    (0..m).all(|i| v[i] != v[(i + 1) % m])
}

/// Outcome of argument tracking along a closed curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindingResult {
    pub value: i64,
    /// Accumulated continuous argument in radians.
    pub total_phase: f64,
    pub samples_used: usize,
    pub min_modulus_on_curve: f64,
}

struct Tracker<'a, F> {
    f: &'a F,
    path: &'a dyn Fn(f64) -> Complex,
    zero_tol: f64,
    max_depth: u32,
    samples: usize,
    min_modulus: f64,
}

impl<F: Fn(Complex) -> Result<Complex>> Tracker<'_, F> {
    fn sample(&mut self, t: f64) -> Result<Complex> {
        let z = (self.path)(t);
        self.samples += 1;
        let w = match (self.f)(z) {
            Ok(w) if w.is_finite() => w,
            _ => return Err(Error::NonFiniteOnCurve(z)),
        };
        let m = w.norm();
        self.min_modulus = self.min_modulus.min(m);
        if m <= self.zero_tol {
            return Err(Error::ZeroOnCurve(z));
        }
        Ok(w)
    }

    /// Phase change from `t0` to `t1`, bisecting until every step is below
    /// [`MAX_PHASE_STEP`].
    fn phase(&mut self, t0: f64, w0: Complex, t1: f64, w1: Complex, depth: u32) -> Result<f64> {
        let delta = (w1 / w0).arg();
        if delta.abs() < MAX_PHASE_STEP {
            return Ok(delta);
        }
        if depth >= self.max_depth {
            return Err(Error::BisectionCap((self.path)(t0)));
        }
        let tm = 0.5 * (t0 + t1);
        let wm = self.sample(tm)?;
        Ok(self.phase(t0, w0, tm, wm, depth + 1)? + self.phase(tm, wm, t1, w1, depth + 1)?)
    }
}

/// Winding of `f` along a closed parametrized path `path: [0, 1] -> C`
/// with `path(0) == path(1)`.
pub fn winding_along<F>(f: &F, path: &dyn Fn(f64) -> Complex) -> Result<WindingResult>
where
    F: Fn(Complex) -> Result<Complex>,
{
    winding_capped(f, path, MAX_BISECTIONS)
}

fn winding_capped<F>(f: &F, path: &dyn Fn(f64) -> Complex, max_depth: u32) -> Result<WindingResult>
where
    F: Fn(Complex) -> Result<Complex>,
{
    let mut tr = Tracker {
        f,
        path,
        zero_tol: 0.0,
        max_depth,
        samples: 0,
        min_modulus: f64::INFINITY,
    };
    let n = INITIAL_SAMPLES;
    let ts: Vec<f64> = (0..n).map(|k| k as f64 / n as f64).collect();
    let mut ws = Vec::with_capacity(n + 1);
    for &t in &ts {
        ws.push(tr.sample(t)?);
    }
    let scale = ws.iter().map(|w| w.norm()).fold(0.0, f64::max);
    tr.zero_tol = ZERO_ON_CURVE_TOL * scale;
    if let Some(k) = ws.iter().position(|w| w.norm() <= tr.zero_tol) {
        return Err(Error::ZeroOnCurve(path(ts[k])));
    }
    ws.push(ws[0]);

    let mut total = 0.0;
    for k in 0..n {
        let t1 = if k + 1 == n { 1.0 } else { ts[k + 1] };
        total += tr.phase(ts[k], ws[k], t1, ws[k + 1], 0)?;
    }
    let turns = total / TAU;
    let value = turns.round();
    if (turns - value).abs() >= ROUNDING_TOL {
        return Err(Error::BisectionCap(path(0.0)));
    }
    Ok(WindingResult {
        value: value as i64,
        total_phase: total,
        samples_used: tr.samples,
        min_modulus_on_curve: tr.min_modulus,
    })
}

/// Winding of an arbitrary continuous function along `curve`.
pub fn winding_of<F>(f: F, curve: &ClosedCurve) -> Result<WindingResult>
where
    F: Fn(Complex) -> Result<Complex>,
{
    winding_along(&f, &|t| curve.point(t))
}

/// `V(f; curve)` for a harmonic mapping.
pub fn winding(f: &HarmonicMapping, curve: &ClosedCurve) -> Result<WindingResult> {
    winding_of(|z| f.eval(z), curve)
}

/// Poincaré index of a black-box function at `z0` by windings on circles
/// `r, r/2, r/4, ...`, accepted once two consecutive radii agree and at
/// least one of them kept `min |f|` above the non-isolation threshold.
/// Circles that exhaust the bisection cap are retried once with
/// [`DEEP_BISECTIONS`].
pub fn poincare_index_of<F>(f: F, z0: Complex, r_start: Option<f64>) -> Result<i64>
where
    F: Fn(Complex) -> Result<Complex>,
{
    let mut r = r_start.unwrap_or(DEFAULT_INDEX_RADIUS);
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidCurve(format!(
            "index radius {r} must be positive"
        )));
    }
    // (value, clean) of the previous radius; clean means min |f| stayed
    // above the non-isolation threshold
    let mut previous: Option<(i64, bool)> = None;
    let mut small_streak = 0;
    for _ in 0..=MAX_HALVINGS {
        let circle = ClosedCurve::circle(z0, r)?;
        let path = |t: f64| circle.point(t);
        let result = match winding_capped(&f, &path, MAX_BISECTIONS) {
            Err(Error::BisectionCap(_)) => winding_capped(&f, &path, DEEP_BISECTIONS),
            other => other,
        };
        match result {
            Ok(w) => {
                let clean = w.min_modulus_on_curve >= NON_ISOLATED_TOL * r;
                small_streak = if clean { 0 } else { small_streak + 1 };
                if let Some((value, was_clean)) = previous {
                    if value == w.value && (clean || was_clean) {
                        return Ok(w.value);
                    }
                }
                previous = Some((w.value, clean));
            }
            Err(Error::ZeroOnCurve(_)) | Err(Error::BisectionCap(_)) => {
                small_streak += 1;
                previous = None;
            }
            Err(e) => return Err(e),
        }
        if small_streak >= NON_ISOLATED_STREAK {
            return Err(Error::NonIsolatedZero(z0));
        }
        r *= 0.5;
    }
    Err(Error::IndexUnstable(z0))
}

/// `ind(f; z0)` for a harmonic mapping; see [`poincare_index_of`].
pub fn poincare_index(f: &HarmonicMapping, z0: Complex, r_start: Option<f64>) -> Result<i64> {
    poincare_index_of(|z| f.eval(z), z0, r_start)
}

/// Starting radius for the index ladder: half the distance to the nearest
/// other exceptional point, or the default when none is known.
pub fn auto_index_radius(z0: Complex, others: &[Complex]) -> f64 {
    others
        .iter()
        .map(|p| (p - z0).norm())
        .filter(|d| *d > 0.0)
        .fold(None, |acc: Option<f64>, d| {
            Some(acc.map_or(d, |a| a.min(d)))
        })
        .map_or(DEFAULT_INDEX_RADIUS, |d| 0.5 * d)
}

/// Cap on radius doublings when searching for a stable global winding.
pub const MAX_DOUBLINGS: usize = 30;

/// `V(f; |z| = R)` on a circle enclosing every exceptional point.
///
/// With `radius = None`, `R` is chosen by [`auto_large_radius`].
pub fn large_circle_winding(
    f: &HarmonicMapping,
    radius: Option<f64>,
    known: &[Complex],
) -> Result<i64> {
    match radius {
        Some(r) => Ok(winding(f, &ClosedCurve::circle(Complex::new(0.0, 0.0), r)?)?.value),
        None => auto_large_radius(f, known).map(|(_, v)| v),
    }
}

/// Radius of a stable global winding and that winding. `R` starts at
/// `2 (1 + m)` where `m` is the largest modulus among numerator and
/// denominator roots of `h` and the `known` points, and doubles until two
/// consecutive radii give the same winding; the smaller radius is returned.
pub fn auto_large_radius(f: &HarmonicMapping, known: &[Complex]) -> Result<(f64, i64)> {
    let ty = f.h().rational_type().ok_or(Error::NotRational)?;
    if ty.degree() < 2 {
        return Err(Error::DegreeTooSmall(ty.degree()));
    }
    let (num, den) = f.h().num_den().expect("rational");
    let m = num
        .roots()
        .iter()
        .chain(den.roots().iter())
        .map(|r| r.location.norm())
        .chain(known.iter().map(|p| p.norm()))
        .fold(0.0, f64::max);
    let mut r = 2.0 * (1.0 + m);
    let mut previous: Option<(f64, i64)> = None;
    let mut last_err = None;
    for _ in 0..MAX_DOUBLINGS {
        match winding(f, &ClosedCurve::circle(Complex::new(0.0, 0.0), r)?) {
            Ok(w) => {
                if let Some((r0, v0)) = previous {
                    if v0 == w.value {
                        return Ok((r0, v0));
                    }
                }
                previous = Some((r, w.value));
            }
            Err(e) => {
                previous = None;
                last_err = Some(e);
            }
        }
        r *= 2.0;
    }
    Err(last_err.unwrap_or(Error::IndexUnstable(Complex::new(f64::INFINITY, 0.0))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn unit() -> ClosedCurve {
        ClosedCurve::circle(c(0.0, 0.0), 1.0).unwrap()
    }

    #[test]
    fn conj_winds_minus_one() {
        let f = HarmonicMapping::parse("0").unwrap();
        assert_eq!(winding(&f, &unit()).unwrap().value, -1);
    }

    #[test]
    fn powers_wind_by_their_exponent() {
        let z0 = c(0.3, -0.2);
        let circle = ClosedCurve::circle(z0, 0.5).unwrap();
        for n in [-3i32, -2, -1, 1, 2, 3] {
            let w = winding_of(|z: Complex| Ok((z - z0).powi(n)), &circle).unwrap();
            assert_eq!(w.value, n as i64);
            assert!((w.total_phase / TAU - n as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn constant_winds_zero() {
        let sq = ClosedCurve::square(c(1.0, 1.0), 3.0).unwrap();
        assert_eq!(winding_of(|_| Ok(c(2.0, -1.0)), &sq).unwrap().value, 0);
    }

    #[test]
    fn product_with_conj_matches_dense_sampling() {
        // oracle: plain unwrapping on 10^5 equally spaced samples
        let f = |z: Complex| z * z * z.conj();
        let n = 100_000;
        let mut total = 0.0;
        let mut prev = f(c(1.0, 0.0));
        for k in 1..=n {
            let w = f(Complex::from_polar(1.0, TAU * k as f64 / n as f64));
            total += (w / prev).arg();
            prev = w;
        }
        let dense = (total / TAU).round() as i64;
        assert_eq!(dense, 1);
        assert_eq!(winding_of(|z| Ok(f(z)), &unit()).unwrap().value, dense);
    }

    #[test]
    fn zero_on_curve_is_reported() {
        let err = winding_of(|z: Complex| Ok(z - 1.0), &unit()).unwrap_err();
        assert!(matches!(err, Error::ZeroOnCurve(_)));
    }

    #[test]
    fn pole_on_curve_is_reported() {
        let f = HarmonicMapping::parse("1/(z-1)").unwrap();
        assert!(matches!(
            winding(&f, &unit()),
            Err(Error::NonFiniteOnCurve(_))
        ));
    }

    #[test]
    fn rejects_bad_curves() {
        assert!(ClosedCurve::circle(c(0.0, 0.0), 0.0).is_err());
        assert!(ClosedCurve::polygon(vec![c(0.0, 0.0), c(1.0, 0.0)]).is_err());
        let bowtie = vec![c(0.0, 0.0), c(1.0, 1.0), c(1.0, 0.0), c(0.0, 1.0)];
        assert!(ClosedCurve::polygon(bowtie).is_err());
    }

    #[test]
    fn clockwise_polygon_is_reoriented() {
        let cw = vec![c(-1.0, -1.0), c(-1.0, 1.0), c(1.0, 1.0), c(1.0, -1.0)];
        let p = ClosedCurve::polygon(cw).unwrap();
        assert_eq!(winding_of(Ok, &p).unwrap().value, 1);
    }

    #[test]
    fn index_examples() {
        let f = HarmonicMapping::parse("exp(z)-1").unwrap();
        assert_eq!(poincare_index(&f, c(0.0, 0.0), None).unwrap(), 0);
        let f = HarmonicMapping::parse("z/(z^2-1)").unwrap();
        assert_eq!(poincare_index(&f, c(0.0, 0.0), None).unwrap(), -1);
        let f = HarmonicMapping::parse("2*z^3+1/(8*z)").unwrap();
        assert_eq!(poincare_index(&f, c(0.0, 0.0), None).unwrap(), -1);
        let f = HarmonicMapping::parse("-z/(z^2-1)").unwrap();
        assert_eq!(poincare_index(&f, c(0.0, 0.0), None).unwrap(), 1);
    }

    #[test]
    fn zero_line_is_not_isolated() {
        let f = HarmonicMapping::parse("z").unwrap();
        assert_eq!(
            poincare_index(&f, c(0.0, 0.0), None),
            Err(Error::NonIsolatedZero(c(0.0, 0.0)))
        );
    }

    #[test]
    fn large_circle_examples() {
        let f = HarmonicMapping::parse("-z/(z^2-1)").unwrap();
        assert_eq!(large_circle_winding(&f, None, &[]).unwrap(), -1);
        let f = HarmonicMapping::parse("(16*z^4+1)/(8*z)").unwrap();
        assert_eq!(large_circle_winding(&f, None, &[]).unwrap(), 3);
        let f = HarmonicMapping::parse("z^3-2*z+1").unwrap();
        assert_eq!(large_circle_winding(&f, None, &[]).unwrap(), 3);
        let f = HarmonicMapping::parse("exp(z)").unwrap();
        assert_eq!(large_circle_winding(&f, None, &[]), Err(Error::NotRational));
        let f = HarmonicMapping::parse("2*z").unwrap();
        assert_eq!(
            large_circle_winding(&f, None, &[]),
            Err(Error::DegreeTooSmall(1))
        );
    }

    #[test]
    fn auto_radius_is_half_the_nearest_distance() {
        assert_eq!(auto_index_radius(c(0.0, 0.0), &[]), DEFAULT_INDEX_RADIUS);
        assert_eq!(
            auto_index_radius(c(0.0, 0.0), &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 3.0)]),
            0.5
        );
    }
}
