//! Symbolic index computation from Taylor coefficients.
//!
//! Regular zeros are decided by `|h'(z0)|` alone. At a singular zero
//! (`|h'(z0)| = 1`) the index is read off the first two nonvanishing
//! coefficients of the local expansion, except when the relevant quantity
//! vanishes; that case is reported as indeterminate and resolved by the
//! numeric winding oracle.

use crate::error::{Error, Result};
use crate::function::{HarmonicMapping, TruncatedSeries, DEFAULT_ORDER};
use crate::winding;
use crate::Complex;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Half-width of the band `||h'| - 1| <= tol` treated as singular.
pub const SINGULAR_TOL: f64 = 1e-9;
/// `|eta|` at or below this is treated as zero.
pub const ETA_TOL: f64 = 1e-9;
/// Relative cutoff for "this coefficient vanishes".
pub const COEFF_ZERO_TOL: f64 = 1e-10;
/// Tolerance on the normalization `a_0 = 0`, `|a_1| = 1` of a series.
pub const NORMALIZATION_TOL: f64 = 1e-9;
/// `|f(z0)|` at or below this makes `z0` a zero.
pub const ZERO_TOL: f64 = 1e-8;
/// Distance within which `z0` is identified with a pole of `h`.
pub const POLE_MATCH_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    Preserving,
    Reversing,
    Singular,
}

/// Orientation behaviour of `f` at a point, with `|h'(z0)|` as witness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointClass {
    pub sense: Sense,
    pub witness: f64,
}

impl PointClass {
    pub fn from_witness(witness: f64, tol: f64) -> Self {
        let sense = if witness > 1.0 + tol {
            Sense::Preserving
        } else if witness < 1.0 - tol {
            Sense::Reversing
        } else {
            Sense::Singular
        };
        PointClass { sense, witness }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    RegularRule,
    NormalizedTheorem,
    GeneralTheorem,
    BinomialLemma,
    NumericFallback,
}

/// Coefficient data behind a verdict; fields are set when they apply.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct VerdictDetails {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_n: Option<Complex>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pole_order: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexVerdict {
    /// `None` means indeterminate.
    pub value: Option<i64>,
    pub method: Method,
    #[serde(flatten)]
    pub details: VerdictDetails,
    /// The coefficient criterion was silent and the value came from the
    /// numeric oracle or the binomial table.
    #[serde(default)]
    pub theorem_indeterminate: bool,
}

impl IndexVerdict {
    fn determinate(value: i64, method: Method, details: VerdictDetails) -> Self {
        IndexVerdict {
            value: Some(value),
            method,
            details,
            theorem_indeterminate: false,
        }
    }

    pub fn is_indeterminate(&self) -> bool {
        self.value.is_none()
    }
}

/// Classifies `z0` by `|h'(z0)|` against the band `[1 - tol, 1 + tol]`.
pub fn classify_point(f: &HarmonicMapping, z0: Complex, tol: f64) -> Result<PointClass> {
    let witness = f.dh(z0)?.norm();
    Ok(PointClass::from_witness(witness, tol))
}

/// `+1` at sense-preserving and `-1` at sense-reversing points.
pub fn index_regular(class: &PointClass) -> Result<i64> {
    match class.sense {
        Sense::Preserving => Ok(1),
        Sense::Reversing => Ok(-1),
        Sense::Singular => Err(Error::SingularPoint(Complex::new(class.witness, 0.0))),
    }
}

fn coefficient_scale(series: &TruncatedSeries) -> f64 {
    1.0 + series.coeffs.iter().map(|a| a.norm()).fold(0.0, f64::max)
}

/// Smallest `n >= 2` with a non-negligible `a_n`, and the cutoff used.
fn leading_term(series: &TruncatedSeries) -> Result<(usize, Complex, f64)> {
    let cutoff = COEFF_ZERO_TOL * coefficient_scale(series);
    (2..=series.order)
        .map(|k| (k, series.coeff(k)))
        .find(|(_, a)| a.norm() > cutoff)
        .map(|(k, a)| (k, a, cutoff))
        .ok_or(Error::AllCoefficientsVanish(series.order))
}

fn check_zero_center(series: &TruncatedSeries) -> Result<()> {
    if series.coeff(0).norm() > NORMALIZATION_TOL {
        return Err(Error::SeriesPrecondition(format!(
            "a_0 = {} does not vanish",
            series.coeff(0)
        )));
    }
    Ok(())
}

fn parity_rule(n: usize, sign: f64) -> i64 {
    if n.is_multiple_of(2) {
        0
    } else if sign > 0.0 {
        1
    } else {
        -1
    }
}

/// Index at a singular zero whose expansion has `a_0 = 0`, `a_1 = 1`.
pub fn index_singular_normalized(series: &TruncatedSeries) -> Result<IndexVerdict> {
    check_zero_center(series)?;
    let a1 = series.coeff(1);
    if (a1 - 1.0).norm() > NORMALIZATION_TOL {
        return Err(Error::SeriesPrecondition(format!("a_1 = {a1} is not 1")));
    }
    let (n, a_n, cutoff) = leading_term(series)?;
    let details = VerdictDetails {
        n: Some(n),
        a_n: Some(a_n),
        ..Default::default()
    };
    if a_n.re.abs() <= cutoff {
        return Ok(IndexVerdict {
            value: None,
            method: Method::NormalizedTheorem,
            details,
            theorem_indeterminate: true,
        });
    }
    Ok(IndexVerdict::determinate(
        parity_rule(n, a_n.re),
        Method::NormalizedTheorem,
        details,
    ))
}

/// Index at a singular zero with `a_0 = 0` and `|a_1| = 1`, through
/// `eta = cos(phi - (n+1) theta / 2)` where `a_1 = e^{i theta}` and
/// `arg h^(n)(z0) = phi`.
///
/// `theta` is the principal argument. Shifting it by `2 pi` changes the
/// sign of `eta` only for even `n`, where the verdict depends on
/// `eta != 0` alone.
pub fn index_singular_general(series: &TruncatedSeries) -> Result<IndexVerdict> {
    check_zero_center(series)?;
    let a1 = series.coeff(1);
    if (a1.norm() - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::SeriesPrecondition(format!(
            "|a_1| = {} is not 1",
            a1.norm()
        )));
    }
    let (n, a_n, _) = leading_term(series)?;
    // principal branch (-pi, pi]: a_1 = -1 with roundoff below the axis
    // still means theta = pi
    let theta = if a1.re < 0.0 && a1.im.abs() <= f64::EPSILON * a1.norm() {
        PI
    } else {
        a1.arg()
    };
    // h^(n)(z0) = n! a_n has the argument of a_n
    let phi = a_n.arg();
    let eta = (phi - (n as f64 + 1.0) * theta / 2.0).cos();
    let details = VerdictDetails {
        n: Some(n),
        a_n: Some(a_n),
        theta: Some(theta),
        phi: Some(phi),
        eta: Some(eta),
        pole_order: None,
    };
    if eta.abs() <= ETA_TOL {
        return Ok(IndexVerdict {
            value: None,
            method: Method::GeneralTheorem,
            details,
            theorem_indeterminate: true,
        });
    }
    Ok(IndexVerdict::determinate(
        parity_rule(n, eta),
        Method::GeneralTheorem,
        details,
    ))
}

/// Index of `a z^n + z - conj(z)` at the origin, for every nonzero `a`.
/// `Re(a)` counts as zero when `|Re(a)| <= ETA_TOL * |a|`.
pub fn index_binomial(a: Complex, n: usize) -> Result<i64> {
    if a.norm() == 0.0 {
        return Err(Error::ZeroBinomialCoefficient);
    }
    if n < 2 {
        return Err(Error::SeriesPrecondition(format!(
            "binomial exponent {n} is below 2"
        )));
    }
    // Re(a) / |a| is the eta of the general criterion at theta = 0
    let imaginary = a.re.abs() <= ETA_TOL * a.norm();
    Ok(if n.is_multiple_of(2) {
        if imaginary {
            1
        } else {
            0
        }
    } else if imaginary || a.re > 0.0 {
        1
    } else {
        -1
    })
}

/// Tolerances and fallback settings for [`index_with`].
#[derive(Debug, Clone, Copy)]
pub struct IndexOptions {
    pub singular_tol: f64,
    pub zero_tol: f64,
    pub order: usize,
    /// Starting radius for the numeric fallback; `None` uses the default.
    pub fallback_radius: Option<f64>,
}

impl Default for IndexOptions {
    fn default() -> Self {
        IndexOptions {
            singular_tol: SINGULAR_TOL,
            zero_tol: ZERO_TOL,
            order: DEFAULT_ORDER,
            fallback_radius: None,
        }
    }
}

/// Index of `f` at an exceptional point with default options.
pub fn index(f: &HarmonicMapping, z0: Complex) -> Result<IndexVerdict> {
    index_with(f, z0, &IndexOptions::default())
}

/// Dispatches on the kind of exceptional point: poles of rational `h` get
/// minus their order, regular zeros the regular rule, singular zeros the
/// general coefficient criterion. An indeterminate criterion is answered by
/// the binomial table when the local expansion is exactly `z + a z^n`
/// (after rotation) and by the numeric oracle otherwise.
pub fn index_with(f: &HarmonicMapping, z0: Complex, opts: &IndexOptions) -> Result<IndexVerdict> {
    if let Ok(poles) = f.h().poles() {
        if let Some(p) = poles
            .iter()
            .find(|p| (p.location - z0).norm() <= POLE_MATCH_TOL * (1.0 + p.location.norm()))
        {
            let details = VerdictDetails {
                pole_order: Some(p.multiplicity),
                ..Default::default()
            };
            return Ok(IndexVerdict::determinate(
                -(p.multiplicity as i64),
                Method::RegularRule,
                details,
            ));
        }
    }
    let value = match f.eval(z0) {
        Ok(v) => v,
        Err(Error::Pole(_)) if !f.h().is_rational() => {
            // pole of a transcendental h: only the oracle applies
            let v = winding::poincare_index(f, z0, opts.fallback_radius)?;
            return Ok(IndexVerdict::determinate(
                v,
                Method::NumericFallback,
                Default::default(),
            ));
        }
        Err(e) => return Err(e),
    };
    if value.norm() > opts.zero_tol {
        return Err(Error::NotExceptional(z0));
    }
    let class = classify_point(f, z0, opts.singular_tol)?;
    if class.sense != Sense::Singular {
        return Ok(IndexVerdict::determinate(
            index_regular(&class)?,
            Method::RegularRule,
            Default::default(),
        ));
    }

    let series = f.local_series(z0, opts.order)?;
    let verdict = index_singular_general(&series)?;
    if !verdict.is_indeterminate() {
        return Ok(verdict);
    }
    if let Some(v) = binomial_shortcut(&series, &verdict) {
        return Ok(IndexVerdict {
            value: Some(v),
            method: Method::BinomialLemma,
            details: verdict.details,
            theorem_indeterminate: true,
        });
    }
    let v = winding::poincare_index(f, z0, opts.fallback_radius)?;
    Ok(IndexVerdict {
        value: Some(v),
        method: Method::NumericFallback,
        details: verdict.details,
        theorem_indeterminate: true,
    })
}

/// When the whole local expansion is `a_1 w + a_n w^n`, rotating to
/// `a_1 = 1` gives the binomial `z + a z^n - conj(z)` with
/// `a = a_n e^{-i (n+1) theta / 2}`, here purely imaginary.
fn binomial_shortcut(series: &TruncatedSeries, verdict: &IndexVerdict) -> Option<i64> {
    if !series.exact_tail {
        return None;
    }
    let n = verdict.details.n?;
    let cutoff = COEFF_ZERO_TOL * coefficient_scale(series);
    let extra_terms = (2..=series.order)
        .filter(|&k| k != n)
        .any(|k| series.coeff(k).norm() > cutoff);
    if extra_terms {
        return None;
    }
    let theta = verdict.details.theta?;
    let a = verdict.details.a_n? * Complex::from_polar(1.0, -(n as f64 + 1.0) * theta / 2.0);
    index_binomial(Complex::new(0.0, a.im), n).ok()
}
