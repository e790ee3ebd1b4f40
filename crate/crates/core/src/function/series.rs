//! Truncated Taylor series arithmetic (Taylor-mode evaluation of the
//! expression tree about a center).

use super::{AnalyticFunction, CanonicalForm, Expr, POLE_TOL};
use crate::error::{Error, Result};
use crate::Complex;
use serde::{Deserialize, Serialize};

/// `sum_k coeffs[k] (z - center)^k` for `k = 0..=order`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncatedSeries {
    pub center: Complex,
    pub coeffs: Vec<Complex>,
    pub order: usize,
    /// Set when the series is the whole function, i.e. `h` is a polynomial
    /// of degree at most `order`.
    pub exact_tail: bool,
}

impl TruncatedSeries {
    /// Builds a series from coefficients, padding or truncating to `order`.
    pub fn new(center: Complex, mut coeffs: Vec<Complex>, order: usize) -> Self {
        coeffs.resize(order + 1, Complex::new(0.0, 0.0));
        TruncatedSeries {
            center,
            coeffs,
            order,
            exact_tail: false,
        }
    }

    pub fn constant(center: Complex, c: Complex, order: usize) -> Self {
        TruncatedSeries::new(center, vec![c], order)
    }

    /// The series of the identity `z` about `center`.
    pub fn variable(center: Complex, order: usize) -> Self {
        TruncatedSeries::new(center, vec![center, Complex::new(1.0, 0.0)], order)
    }

    pub fn coeff(&self, k: usize) -> Complex {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    /// Evaluates the truncated sum at `z`.
    pub fn eval(&self, z: Complex) -> Complex {
        let w = z - self.center;
        self.coeffs
            .iter()
            .rev()
            .fold(Complex::new(0.0, 0.0), |acc, c| acc * w + c)
    }

    fn check(&self, other: &Self) {
        assert_eq!(self.order, other.order, "series orders differ");
        assert_eq!(self.center, other.center, "series centers differ");
    }

    fn with_coeffs(&self, coeffs: Vec<Complex>) -> Self {
        TruncatedSeries {
            center: self.center,
            coeffs,
            order: self.order,
            exact_tail: false,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check(other);
        self.with_coeffs(
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check(other);
        self.with_coeffs(
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    pub fn neg(&self) -> Self {
        self.with_coeffs(self.coeffs.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, s: Complex) -> Self {
        self.with_coeffs(self.coeffs.iter().map(|a| a * s).collect())
    }

    /// Cauchy product truncated to the common order.
    pub fn mul(&self, other: &Self) -> Self {
        self.check(other);
        let n = self.order;
        let coeffs = (0..=n)
            .map(|k| (0..=k).map(|j| self.coeffs[j] * other.coeffs[k - j]).sum())
            .collect();
        self.with_coeffs(coeffs)
    }

    /// Series quotient; the denominator's constant term must not vanish.
    pub fn div(&self, other: &Self) -> Result<Self> {
        self.check(other);
        let d0 = other.coeffs[0];
        if d0.norm() <= POLE_TOL {
            return Err(Error::SeriesPole(self.center));
        }
        let n = self.order;
        let mut q = vec![Complex::new(0.0, 0.0); n + 1];
        for k in 0..=n {
            let acc: Complex = (1..=k).map(|j| other.coeffs[j] * q[k - j]).sum();
            q[k] = (self.coeffs[k] - acc) / d0;
        }
        Ok(self.with_coeffs(q))
    }

    pub fn powu(&self, exponent: u32) -> Self {
        let mut acc = TruncatedSeries::constant(self.center, Complex::new(1.0, 0.0), self.order);
        for _ in 0..exponent {
            acc = acc.mul(self);
        }
        acc
    }

    /// `exp` of the series via `b_k = (1/k) sum_{j=1..k} j a_j b_{k-j}`.
    pub fn exp(&self) -> Self {
        let n = self.order;
        let mut b = vec![Complex::new(0.0, 0.0); n + 1];
        b[0] = self.coeffs[0].exp();
        for k in 1..=n {
            let acc: Complex = (1..=k).map(|j| self.coeffs[j] * b[k - j] * j as f64).sum();
            b[k] = acc / k as f64;
        }
        self.with_coeffs(b)
    }
}

fn expand(e: &Expr, center: Complex, order: usize) -> Result<TruncatedSeries> {
    Ok(match e {
        Expr::Const(c) => TruncatedSeries::constant(center, *c, order),
        Expr::Var => TruncatedSeries::variable(center, order),
        Expr::Neg(a) => expand(a, center, order)?.neg(),
        Expr::Add(a, b) => expand(a, center, order)?.add(&expand(b, center, order)?),
        Expr::Sub(a, b) => expand(a, center, order)?.sub(&expand(b, center, order)?),
        Expr::Mul(a, b) => expand(a, center, order)?.mul(&expand(b, center, order)?),
        Expr::Div(a, b) => expand(a, center, order)?.div(&expand(b, center, order)?)?,
        Expr::Pow(a, k) => expand(a, center, order)?.powu(*k),
        Expr::Exp(a) => expand(a, center, order)?.exp(),
    })
}

pub(super) fn taylor_at(
    h: &AnalyticFunction,
    center: Complex,
    order: usize,
) -> Result<TruncatedSeries> {
    if h.eval(center).is_err() {
        return Err(Error::Pole(center));
    }
    let mut s = expand(h.expr(), center, order).map_err(|e| match e {
        Error::SeriesPole(_) => Error::Pole(center),
        other => other,
    })?;
    if let CanonicalForm::Polynomial { coeffs } = h.canonical() {
        s.exact_tail = coeffs.degree() <= order;
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::parse_function;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn close(a: Complex, b: Complex, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn geometric_example_about_origin() {
        let h = parse_function("z/(1-z^2)").unwrap();
        let s = h.taylor_at(c(0.0, 0.0), 5).unwrap();
        let expected = [0.0, 1.0, 0.0, 1.0, 0.0, 1.0];
        assert_eq!(s.coeffs.len(), 6);
        for (a, e) in s.coeffs.iter().zip(expected) {
            assert!(close(*a, c(e, 0.0), 1e-14));
        }
        assert!(!s.exact_tail);
    }

    #[test]
    fn recentred_rational_example() {
        let h = parse_function("2*z^3 + 1/(8*z)").unwrap();
        let s = h.taylor_at(c(0.0, 0.5), 4).unwrap();
        assert!(close(s.coeff(0), c(0.0, -0.5), 1e-13));
        assert!(close(s.coeff(1), c(-1.0, 0.0), 1e-13));
        assert!(close(s.coeff(2), c(0.0, 4.0), 1e-13));
        assert!(close(s.coeff(3), c(0.0, 0.0), 1e-13));
    }

    #[test]
    fn exp_example() {
        let h = parse_function("exp(z)-1").unwrap();
        let s = h.taylor_at(c(0.0, 0.0), 3).unwrap();
        for (a, e) in s.coeffs.iter().zip([0.0, 1.0, 0.5, 1.0 / 6.0]) {
            assert!(close(*a, c(e, 0.0), 1e-15));
        }
    }

    #[test]
    fn polynomial_series_is_exact() {
        let h = parse_function("z^3 - 2*z + 1").unwrap();
        assert!(h.taylor_at(c(1.0, 1.0), 3).unwrap().exact_tail);
        assert!(!h.taylor_at(c(1.0, 1.0), 2).unwrap().exact_tail);
    }

    #[test]
    fn pole_center_is_rejected() {
        let h = parse_function("1/(z-1)").unwrap();
        assert_eq!(h.taylor_at(c(1.0, 0.0), 4), Err(Error::Pole(c(1.0, 0.0))));
        let s = TruncatedSeries::variable(c(0.0, 0.0), 3);
        assert_eq!(
            s.div(&TruncatedSeries::variable(c(0.0, 0.0), 3)),
            Err(Error::SeriesPole(c(0.0, 0.0)))
        );
    }

    #[test]
    fn exp_series_matches_builtin_exp_in_unit_disk() {
        let h = parse_function("exp(z)").unwrap();
        let s = h.taylor_at(c(0.0, 0.0), 30).unwrap();
        for k in 0..24 {
            let z = Complex::from_polar(0.999, k as f64 * 0.27);
            assert!(close(s.eval(z), z.exp(), 1e-9));
        }
        // composition with a nontrivial inner series, recentred off the origin
        let h = parse_function("exp(z^2/(2-z))").unwrap();
        let center = c(0.2, -0.3);
        let s = h.taylor_at(center, 40).unwrap();
        for k in 0..12 {
            let z = center + Complex::from_polar(0.4, k as f64 * 0.5);
            assert!(close(s.eval(z), h.eval(z).unwrap(), 1e-9));
        }
    }

    fn arb_complex() -> impl Strategy<Value = Complex> {
        (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b)| c(a, b))
    }

    fn arb_series(center: Complex, order: usize) -> impl Strategy<Value = TruncatedSeries> {
        prop::collection::vec(arb_complex(), order + 1)
            .prop_map(move |v| TruncatedSeries::new(center, v, order))
    }

    proptest! {
        #[test]
        fn distributive_law(
            (a, b, cc) in (arb_series(c(0.3, 0.1), 8), arb_series(c(0.3, 0.1), 8), arb_series(c(0.3, 0.1), 8))
        ) {
            let lhs = a.add(&b).mul(&cc);
            let rhs = a.mul(&cc).add(&b.mul(&cc));
            prop_assert_eq!(lhs.order, 8);
            prop_assert_eq!(lhs.center, c(0.3, 0.1));
            for (x, y) in lhs.coeffs.iter().zip(&rhs.coeffs) {
                prop_assert!(close(*x, *y, 1e-12));
            }
        }

        #[test]
        fn recentring_a_polynomial_reconstructs_it(
            coeffs in prop::collection::vec(arb_complex(), 1..7),
            center in arb_complex(),
            point in arb_complex(),
        ) {
            let h = AnalyticFunction::polynomial(&coeffs);
            let degree = coeffs.len() - 1;
            let s = h.taylor_at(center, degree).unwrap();
            let exact = h.eval(point).unwrap();
            prop_assert!((s.eval(point) - exact).norm() <= 1e-9 * (1.0 + exact.norm()));
        }

        #[test]
        fn quotient_times_divisor_recovers_dividend(
            (a, b) in (arb_series(c(0.0, 0.0), 6), arb_series(c(0.0, 0.0), 6)),
        ) {
            prop_assume!(b.coeffs[0].norm() > 0.5);
            let q = a.div(&b).unwrap();
            let back = q.mul(&b);
            for (x, y) in back.coeffs.iter().zip(&a.coeffs) {
                prop_assert!(close(*x, *y, 1e-9));
            }
        }
    }
}
