use super::{AnalyticFunction, TruncatedSeries};
use crate::error::Result;
use crate::Complex;

/// `f(z) = h(z) - conj(z)`.
#[derive(Debug, Clone)]
pub struct HarmonicMapping {
    h: AnalyticFunction,
    dh: AnalyticFunction,
    d2h: AnalyticFunction,
}

impl HarmonicMapping {
    pub fn new(h: AnalyticFunction) -> Self {
        let dh = h.derivative();
        let d2h = dh.derivative();
        HarmonicMapping { h, dh, d2h }
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(HarmonicMapping::new(super::parse_function(text)?))
    }

    pub fn h(&self) -> &AnalyticFunction {
        &self.h
    }

    pub fn h_prime(&self) -> &AnalyticFunction {
        &self.dh
    }

    pub fn eval(&self, z: Complex) -> Result<Complex> {
        Ok(self.h.eval(z)? - z.conj())
    }

    /// `h'(z)`, the coefficient of `dz` in `df`; the `d conj(z)` coefficient
    /// is always `-1`.
    pub fn dh(&self, z: Complex) -> Result<Complex> {
        self.dh.eval(z)
    }

    pub fn d2h(&self, z: Complex) -> Result<Complex> {
        self.d2h.eval(z)
    }

    /// Jacobian determinant `|h'(z)|^2 - 1` of `f` seen as a map of the plane.
    pub fn jacobian(&self, z: Complex) -> Result<f64> {
        Ok(self.dh(z)?.norm_sqr() - 1.0)
    }

    /// Local expansion `f(z) = sum_k a_k (z - z0)^k - conj(z - z0)`: the
    /// Taylor series of `h` with `conj(z0)` folded into `a_0`.
    pub fn local_series(&self, z0: Complex, order: usize) -> Result<TruncatedSeries> {
        let mut s = self.h.taylor_at(z0, order)?;
        s.coeffs[0] -= z0.conj();
        Ok(s)
    }
}
