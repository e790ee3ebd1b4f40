//! Dense univariate polynomials with complex coefficients and a
//! Durand–Kerner (Weierstrass) root solver.

use crate::Complex;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Durand–Kerner stops once the largest correction falls below this.
pub const ROOT_STEP_TOL: f64 = 1e-12;
/// Iteration cap for Durand–Kerner.
pub const ROOT_MAX_ITER: usize = 500;
/// Roots closer than this (relative to `1 + |root|`) are merged into one
/// root of higher multiplicity.
pub const ROOT_CLUSTER_TOL: f64 = 1e-7;

/// Coefficients in ascending order, `coeffs[k]` multiplies `z^k`.
///
/// The leading coefficient is nonzero unless this is the zero polynomial,
/// which is stored as an empty vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    coeffs: Vec<Complex>,
}

/// A root together with how many times it was found.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub location: Complex,
    pub multiplicity: usize,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Complex>) -> Self {
        while coeffs.last().is_some_and(|c| *c == Complex::new(0.0, 0.0)) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: Complex) -> Self {
        Polynomial::new(vec![c])
    }

    /// The identity polynomial `z`.
    pub fn identity() -> Self {
        Polynomial::new(vec![Complex::new(0.0, 0.0), Complex::new(1.0, 0.0)])
    }

    /// Monic polynomial with the given roots, scaled by `lead`.
    pub fn from_roots(lead: Complex, roots: &[Complex]) -> Self {
        let mut p = Polynomial::constant(lead);
        for r in roots {
            p = p.mul(&Polynomial::new(vec![-r, Complex::new(1.0, 0.0)]));
        }
        p
    }

    pub fn coeffs(&self) -> &[Complex] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> Complex {
        self.coeffs.last().copied().unwrap_or_default()
    }

    pub fn coeff(&self, k: usize) -> Complex {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn eval(&self, z: Complex) -> Complex {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    pub fn derivative(&self) -> Polynomial {
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * k as f64)
                .collect(),
        )
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }

    pub fn scale(&self, s: Complex) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![Complex::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }

    pub fn pow(&self, exponent: u32) -> Polynomial {
        let mut acc = Polynomial::constant(Complex::new(1.0, 0.0));
        for _ in 0..exponent {
            acc = acc.mul(self);
        }
        acc
    }

    /// Polynomial with every coefficient conjugated.
    pub fn conj_coeffs(&self) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| c.conj()).collect())
    }

    /// Drops leading coefficients that are negligible relative to the
    /// largest coefficient.
    pub fn trimmed(&self, rel_tol: f64) -> Polynomial {
        let scale = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let mut coeffs = self.coeffs.clone();
        while coeffs.last().is_some_and(|c| c.norm() <= rel_tol * scale) {
            coeffs.pop();
        }
        Polynomial::new(coeffs)
    }

    /// All roots counted with multiplicity, as returned by Durand–Kerner.
    pub fn raw_roots(&self) -> Vec<Complex> {
        durand_kerner(&self.coeffs)
    }

    /// Distinct roots with multiplicities.
    pub fn roots(&self) -> Vec<Root> {
        cluster_roots(&self.raw_roots(), ROOT_CLUSTER_TOL)
    }
}

/// Weierstrass iteration on all roots simultaneously. Leading zeros in
/// `coeffs` must already be stripped; exact roots at the origin are split
/// off before iterating.
fn durand_kerner(coeffs: &[Complex]) -> Vec<Complex> {
    if coeffs.len() < 2 {
        return Vec::new();
    }
    let zero_roots = coeffs.iter().take_while(|c| c.norm() == 0.0).count();
    let coeffs = &coeffs[zero_roots..];
    let mut roots = vec![Complex::new(0.0, 0.0); zero_roots];
    let degree = coeffs.len() - 1;
    if degree == 0 {
        return roots;
    }
    let lead = coeffs[degree];
    let monic: Vec<Complex> = coeffs.iter().map(|c| c / lead).collect();
    if degree == 1 {
        roots.push(-monic[0]);
        return roots;
    }

    let radius = 1.0 + monic[..degree].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex> = (0..degree)
        .map(|k| Complex::from_polar(radius, TAU * k as f64 / degree as f64 + 0.4))
        .collect();

    let eval = |x: Complex| {
        monic
            .iter()
            .rev()
            .fold(Complex::new(0.0, 0.0), |acc, c| acc * x + c)
    };
    for _ in 0..ROOT_MAX_ITER {
        let mut max_step: f64 = 0.0;
        for i in 0..degree {
            let mut denom = Complex::new(1.0, 0.0);
            for j in 0..degree {
                if i != j {
                    let d = z[i] - z[j];
                    denom *= if d.norm() == 0.0 {
                        Complex::new(1e-300, 0.0)
                    } else {
                        d
                    };
                }
            }
            let step = eval(z[i]) / denom;
            if step.is_finite() {
                z[i] -= step;
                max_step = max_step.max(step.norm());
            } else {
                // nudge coincident estimates apart
                z[i] += Complex::new(1e-8, 1e-8);
                max_step = f64::INFINITY;
            }
        }
        if max_step < ROOT_STEP_TOL {
            break;
        }
    }
    roots.extend(z);
    roots
}

/// Groups roots lying within `tol * (1 + |r|)` of a cluster's first member;
/// each cluster is reported at its mean location.
pub fn cluster_roots(raw: &[Complex], tol: f64) -> Vec<Root> {
    let mut clusters: Vec<(Complex, Vec<Complex>)> = Vec::new();
    for &r in raw {
        match clusters
            .iter_mut()
            .find(|(seed, _)| (seed - r).norm() <= tol * (1.0 + r.norm()))
        {
            Some((_, members)) => members.push(r),
            None => clusters.push((r, vec![r])),
        }
    }
    clusters
        .into_iter()
        .map(|(_, members)| {
            let sum: Complex = members.iter().sum();
            Root {
                location: sum / members.len() as f64,
                multiplicity: members.len(),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn strips_leading_zeros() {
        let p = Polynomial::new(vec![c(1.0, 0.0), c(2.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(p.degree(), 1);
        assert!(Polynomial::new(vec![c(0.0, 0.0)]).is_zero());
    }

    #[test]
    fn roots_of_z_squared_minus_one() {
        let p = Polynomial::new(vec![c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let mut roots = p.roots();
        roots.sort_by(|a, b| a.location.re.partial_cmp(&b.location.re).unwrap());
        assert_eq!(roots.len(), 2);
        assert!((roots[0].location - c(-1.0, 0.0)).norm() < 1e-12);
        assert!((roots[1].location - c(1.0, 0.0)).norm() < 1e-12);
        assert!(roots.iter().all(|r| r.multiplicity == 1));
    }

    #[test]
    fn double_root_is_clustered() {
        let p = Polynomial::from_roots(c(2.0, 0.0), &[c(0.5, 0.5), c(0.5, 0.5), c(-1.0, 0.0)]);
        let roots = p.roots();
        assert_eq!(roots.len(), 2);
        let double = roots.iter().find(|r| r.multiplicity == 2).unwrap();
        assert!((double.location - c(0.5, 0.5)).norm() < 1e-7);
    }

    #[test]
    fn zero_roots_split_exactly() {
        let p = Polynomial::new(vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(
            p.roots(),
            vec![Root {
                location: c(0.0, 0.0),
                multiplicity: 2
            }]
        );
    }

    #[test]
    fn degree_five_with_complex_coefficients() {
        let roots = [
            c(1.0, 2.0),
            c(-0.3, 0.1),
            c(2.5, -1.0),
            c(-1.5, -1.5),
            c(0.0, 0.7),
        ];
        let p = Polynomial::from_roots(c(0.3, -0.4), &roots);
        let found = p.roots();
        assert_eq!(found.len(), 5);
        for r in roots {
            assert!(
                found.iter().any(|f| (f.location - r).norm() < 1e-9),
                "missing {r}"
            );
        }
    }
}
