//! The analytic part `h` of a harmonic mapping `f(z) = h(z) - conj(z)`.
//!
//! An [`AnalyticFunction`] is an expression tree over `z` together with a
//! cached canonical form: a polynomial or a gcd-reduced rational function
//! whenever the tree is built from rational operations only.

mod mapping;
mod parse;
mod series;

pub use mapping::HarmonicMapping;
pub use series::TruncatedSeries;

use crate::error::{Error, Result};
use crate::poly::{Polynomial, Root};
use crate::Complex;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Denominator moduli at or below this are treated as a pole during
/// evaluation.
pub const POLE_TOL: f64 = 1e-14;
/// Numerator/denominator roots closer than this cancel during reduction.
pub const CANCEL_TOL: f64 = 1e-8;
/// Default truncation order for recentered series.
pub const DEFAULT_ORDER: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(Complex),
    Var,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Exp(Box<Expr>),
}

/// Canonical form of `h` when it is rational.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum CanonicalForm {
    Polynomial {
        coeffs: Polynomial,
    },
    /// `num / den` with `den` monic, of positive degree, and sharing no
    /// root with `num`.
    Rational {
        num: Polynomial,
        den: Polynomial,
    },
    /// Involves `exp` of a non-constant argument.
    Transcendental,
}

/// Rational type `(deg num, deg den)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalType {
    pub numerator: usize,
    pub denominator: usize,
}

impl RationalType {
    /// `max(deg num, deg den)`.
    pub fn degree(&self) -> usize {
        self.numerator.max(self.denominator)
    }
}

#[derive(Debug, Clone)]
pub struct AnalyticFunction {
    expr: Expr,
    text: String,
    canonical: CanonicalForm,
}

impl PartialEq for AnalyticFunction {
    fn eq(&self, other: &Self) -> bool {
        self.expr == other.expr
    }
}

/// Parses `text` into an analytic function and derives its canonical form.
pub fn parse_function(text: &str) -> Result<AnalyticFunction> {
    let expr = parse::parse_expr(text)?;
    let mut f = AnalyticFunction::from_expr(expr)?;
    f.text = text.trim().to_string();
    Ok(f)
}

impl AnalyticFunction {
    pub fn from_expr(expr: Expr) -> Result<Self> {
        let canonical = match rational_parts(&expr) {
            Some((num, den)) => {
                if den.is_zero() {
                    return Err(Error::ZeroDenominator);
                }
                reduce(num, den)
            }
            None => CanonicalForm::Transcendental,
        };
        let text = expr.to_string();
        Ok(AnalyticFunction {
            expr,
            text,
            canonical,
        })
    }

    /// A polynomial with the given ascending coefficients.
    pub fn polynomial(coeffs: &[Complex]) -> Self {
        let expr = coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() != 0.0)
            .map(|(k, c)| match k {
                0 => Expr::Const(*c),
                1 => Expr::Mul(Box::new(Expr::Const(*c)), Box::new(Expr::Var)),
                _ => Expr::Mul(
                    Box::new(Expr::Const(*c)),
                    Box::new(Expr::Pow(Box::new(Expr::Var), k as u32)),
                ),
            })
            .reduce(|a, b| Expr::Add(Box::new(a), Box::new(b)))
            .unwrap_or(Expr::Const(Complex::new(0.0, 0.0)));
        AnalyticFunction::from_expr(expr).expect("polynomial has no denominator")
    }

    /// `num / den` built from coefficient lists.
    pub fn rational(num: &[Complex], den: &[Complex]) -> Result<Self> {
        let n = AnalyticFunction::polynomial(num).expr;
        let d = AnalyticFunction::polynomial(den).expr;
        AnalyticFunction::from_expr(Expr::Div(Box::new(n), Box::new(d)))
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    /// The source text, or a printed form of the tree when built in code.
    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn canonical(&self) -> &CanonicalForm {
        &self.canonical
    }

    pub fn is_rational(&self) -> bool {
        !matches!(self.canonical, CanonicalForm::Transcendental)
    }

    pub fn rational_type(&self) -> Option<RationalType> {
        match &self.canonical {
            CanonicalForm::Polynomial { coeffs } => Some(RationalType {
                numerator: coeffs.degree(),
                denominator: 0,
            }),
            CanonicalForm::Rational { num, den } => Some(RationalType {
                numerator: num.degree(),
                denominator: den.degree(),
            }),
            CanonicalForm::Transcendental => None,
        }
    }

    /// Numerator and denominator of the canonical form.
    pub fn num_den(&self) -> Option<(Polynomial, Polynomial)> {
        match &self.canonical {
            CanonicalForm::Polynomial { coeffs } => {
                Some((coeffs.clone(), Polynomial::constant(Complex::new(1.0, 0.0))))
            }
            CanonicalForm::Rational { num, den } => Some((num.clone(), den.clone())),
            CanonicalForm::Transcendental => None,
        }
    }

    pub fn eval(&self, z: Complex) -> Result<Complex> {
        let v = eval_expr(&self.expr, z)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Pole(z))
        }
    }

    pub fn derivative(&self) -> AnalyticFunction {
        AnalyticFunction::from_expr(derive(&self.expr))
            .expect("derivative of a valid function has a nonzero denominator")
    }

    /// Taylor coefficients about `center`.
    pub fn taylor_at(&self, center: Complex, order: usize) -> Result<TruncatedSeries> {
        series::taylor_at(self, center, order)
    }

    /// Poles with their orders, from the reduced denominator.
    pub fn poles(&self) -> Result<Vec<Root>> {
        match &self.canonical {
            CanonicalForm::Polynomial { .. } => Ok(Vec::new()),
            CanonicalForm::Rational { den, .. } => Ok(den.roots()),
            CanonicalForm::Transcendental => Err(Error::NotRational),
        }
    }
}

/// Free-function form of [`AnalyticFunction::poles`].
pub fn poles_of(h: &AnalyticFunction) -> Result<Vec<Root>> {
    h.poles()
}

impl fmt::Display for AnalyticFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// Serialized as the source text plus canonical-form metadata.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FunctionSummary {
    pub text: String,
    pub canonical: CanonicalForm,
    #[serde(rename = "type")]
    pub rational_type: Option<RationalType>,
    pub degree: Option<usize>,
}

impl From<&AnalyticFunction> for FunctionSummary {
    fn from(h: &AnalyticFunction) -> Self {
        let rational_type = h.rational_type();
        FunctionSummary {
            text: h.text.clone(),
            canonical: h.canonical.clone(),
            rational_type,
            degree: rational_type.map(|t| t.degree()),
        }
    }
}

impl Serialize for AnalyticFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FunctionSummary::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for AnalyticFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let summary = FunctionSummary::deserialize(d)?;
        parse_function(&summary.text).map_err(serde::de::Error::custom)
    }
}

fn eval_expr(e: &Expr, z: Complex) -> Result<Complex> {
    Ok(match e {
        Expr::Const(c) => *c,
        Expr::Var => z,
        Expr::Neg(a) => -eval_expr(a, z)?,
        Expr::Add(a, b) => eval_expr(a, z)? + eval_expr(b, z)?,
        Expr::Sub(a, b) => eval_expr(a, z)? - eval_expr(b, z)?,
        Expr::Mul(a, b) => eval_expr(a, z)? * eval_expr(b, z)?,
        Expr::Div(a, b) => {
            let d = eval_expr(b, z)?;
            if d.norm() <= POLE_TOL {
                return Err(Error::Pole(z));
            }
            eval_expr(a, z)? / d
        }
        Expr::Pow(a, n) => eval_expr(a, z)?.powu(*n),
        Expr::Exp(a) => eval_expr(a, z)?.exp(),
    })
}

fn is_const(e: &Expr, v: f64) -> bool {
    matches!(e, Expr::Const(c) if *c == Complex::new(v, 0.0))
}

fn add(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x + y),
        _ if is_const(&a, 0.0) => b,
        _ if is_const(&b, 0.0) => a,
        _ => Expr::Add(Box::new(a), Box::new(b)),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x - y),
        _ if is_const(&b, 0.0) => a,
        _ if is_const(&a, 0.0) => neg(b),
        _ => Expr::Sub(Box::new(a), Box::new(b)),
    }
}

fn neg(a: Expr) -> Expr {
    match a {
        Expr::Const(c) => Expr::Const(-c),
        Expr::Neg(inner) => *inner,
        other => Expr::Neg(Box::new(other)),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x * y),
        _ if is_const(&a, 0.0) || is_const(&b, 0.0) => Expr::Const(Complex::new(0.0, 0.0)),
        _ if is_const(&a, 1.0) => b,
        _ if is_const(&b, 1.0) => a,
        _ => Expr::Mul(Box::new(a), Box::new(b)),
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    if is_const(&a, 0.0) {
        return Expr::Const(Complex::new(0.0, 0.0));
    }
    if is_const(&b, 1.0) {
        return a;
    }
    Expr::Div(Box::new(a), Box::new(b))
}

fn pow(a: Expr, n: u32) -> Expr {
    match n {
        0 => Expr::Const(Complex::new(1.0, 0.0)),
        1 => a,
        _ => Expr::Pow(Box::new(a), n),
    }
}

fn derive(e: &Expr) -> Expr {
    match e {
        Expr::Const(_) => Expr::Const(Complex::new(0.0, 0.0)),
        Expr::Var => Expr::Const(Complex::new(1.0, 0.0)),
        Expr::Neg(a) => neg(derive(a)),
        Expr::Add(a, b) => add(derive(a), derive(b)),
        Expr::Sub(a, b) => sub(derive(a), derive(b)),
        Expr::Mul(a, b) => add(mul(derive(a), (**b).clone()), mul((**a).clone(), derive(b))),
        Expr::Div(a, b) => div(
            sub(mul(derive(a), (**b).clone()), mul((**a).clone(), derive(b))),
            pow((**b).clone(), 2),
        ),
        Expr::Pow(a, n) => match n {
            0 => Expr::Const(Complex::new(0.0, 0.0)),
            _ => mul(
                mul(
                    Expr::Const(Complex::new(*n as f64, 0.0)),
                    pow((**a).clone(), n - 1),
                ),
                derive(a),
            ),
        },
        Expr::Exp(a) => mul(e.clone(), derive(a)),
    }
}

/// Structural `(num, den)` for trees built from rational operations.
fn rational_parts(e: &Expr) -> Option<(Polynomial, Polynomial)> {
    let one = || Polynomial::constant(Complex::new(1.0, 0.0));
    Some(match e {
        Expr::Const(c) => (Polynomial::constant(*c), one()),
        Expr::Var => (Polynomial::identity(), one()),
        Expr::Neg(a) => {
            let (n, d) = rational_parts(a)?;
            (n.scale(Complex::new(-1.0, 0.0)), d)
        }
        Expr::Add(a, b) | Expr::Sub(a, b) => {
            let (n1, d1) = rational_parts(a)?;
            let (n2, d2) = rational_parts(b)?;
            let (l, r) = (n1.mul(&d2), n2.mul(&d1));
            let num = if matches!(e, Expr::Add(..)) {
                l.add(&r)
            } else {
                l.sub(&r)
            };
            (num, d1.mul(&d2))
        }
        Expr::Mul(a, b) => {
            let (n1, d1) = rational_parts(a)?;
            let (n2, d2) = rational_parts(b)?;
            (n1.mul(&n2), d1.mul(&d2))
        }
        Expr::Div(a, b) => {
            let (n1, d1) = rational_parts(a)?;
            let (n2, d2) = rational_parts(b)?;
            (n1.mul(&d2), d1.mul(&n2))
        }
        Expr::Pow(a, k) => {
            let (n, d) = rational_parts(a)?;
            (n.pow(*k), d.pow(*k))
        }
        Expr::Exp(a) => {
            let (n, d) = rational_parts(a)?;
            if n.degree() == 0 && d.degree() == 0 && !d.is_zero() {
                (Polynomial::constant((n.coeff(0) / d.coeff(0)).exp()), one())
            } else {
                return None;
            }
        }
    })
}

/// Cancels common roots, makes the denominator monic and collapses
/// constant denominators into a polynomial.
fn reduce(num: Polynomial, den: Polynomial) -> CanonicalForm {
    let lead = den.leading();
    let (mut num, mut den) = (num.scale(1.0 / lead), den.scale(1.0 / lead));
    if den.degree() > 0 && !num.is_zero() && num.degree() > 0 {
        let mut num_roots = num.roots();
        let mut den_roots = den.roots();
        let mut cancelled = false;
        for d in den_roots.iter_mut() {
            for n in num_roots.iter_mut() {
                if n.multiplicity > 0
                    && d.multiplicity > 0
                    && (n.location - d.location).norm() <= CANCEL_TOL * (1.0 + d.location.norm())
                {
                    let k = n.multiplicity.min(d.multiplicity);
                    n.multiplicity -= k;
                    d.multiplicity -= k;
                    cancelled = true;
                }
            }
        }
        if cancelled {
            let expand = |roots: &[Root]| -> Vec<Complex> {
                roots
                    .iter()
                    .flat_map(|r| std::iter::repeat_n(r.location, r.multiplicity))
                    .collect()
            };
            num = Polynomial::from_roots(num.leading(), &expand(&num_roots));
            den = Polynomial::from_roots(Complex::new(1.0, 0.0), &expand(&den_roots));
        }
    }
    if den.degree() == 0 {
        CanonicalForm::Polynomial {
            coeffs: num.scale(1.0 / den.coeff(0)),
        }
    } else {
        CanonicalForm::Rational { num, den }
    }
}

fn fmt_const(c: Complex, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    // `{:?}` keeps an exponent for tiny magnitudes, which the lexer accepts.
    let (re, im) = (c.re, c.im);
    match (re == 0.0, im == 0.0) {
        (_, true) if re >= 0.0 => write!(f, "{re:?}"),
        (_, true) => write!(f, "({re:?})"),
        (true, false) if im >= 0.0 => write!(f, "{im:?}i"),
        (true, false) => write!(f, "({im:?}i)"),
        (false, false) if im >= 0.0 => write!(f, "({re:?}+{im:?}i)"),
        (false, false) => write!(f, "({re:?}-{:?}i)", -im),
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => fmt_const(*c, f),
            Expr::Var => f.write_str("z"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Add(a, b) => write!(f, "({a}+{b})"),
            Expr::Sub(a, b) => write!(f, "({a}-{b})"),
            Expr::Mul(a, b) => write!(f, "({a}*{b})"),
            Expr::Div(a, b) => write!(f, "({a}/{b})"),
            Expr::Pow(a, n) => match **a {
                Expr::Var => write!(f, "z^{n}"),
                _ => write!(f, "({a})^{n}"),
            },
            Expr::Exp(a) => write!(f, "exp({a})"),
        }
    }
}
