//! Locating the zeros of `f = h - conj(z)`.
//!
//! Seeds are local minima of `|f|` on a grid, plus (for rational `h`) the
//! roots of the analytic polynomial whose zero set contains every zero of
//! `f`. Each seed is refined by damped Newton iteration on the real 2x2
//! system; near-singular Jacobians switch to damped Levenberg–Marquardt
//! descent on `|f|^2`. Zeros at which `|h'|` is close to 1 are then
//! polished on the augmented system `f = 0, |h'|^2 = 1`.

use crate::classifier::{self, IndexOptions, IndexVerdict, PointClass};
use crate::error::{Error, Result};
use crate::function::{AnalyticFunction, HarmonicMapping};
use crate::poly::Polynomial;
use crate::winding;
use crate::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const DEFAULT_GRID: usize = 64;
/// Half-width used when `h` is not rational and no region is given.
pub const DEFAULT_TRANSCENDENTAL_HALF_WIDTH: f64 = 3.0;
/// Newton stops once `|f| <= CONVERGENCE_TOL * (1 + |h'|)`.
pub const CONVERGENCE_TOL: f64 = 1e-11;
/// Zeros must have `|f|` at most this.
pub const RESIDUAL_TOL: f64 = 1e-9;
/// `||h'|^2 - 1|` below this switches Newton to descent.
pub const SINGULAR_JACOBIAN_TOL: f64 = 1e-8;
/// Zeros closer than this are merged.
pub const DEDUPE_TOL: f64 = 1e-7;
pub const MAX_HALVINGS: usize = 20;
pub const MAX_NEWTON_ITER: usize = 200;
/// `||h'| - 1|` below this triggers the singular polish.
pub const SINGULAR_POLISH_BAND: f64 = 1e-5;
/// Refuse to report more zeros than this.
pub const MAX_ZEROS: usize = 2000;

/// Square search window `center ± half_width` with `grid` nodes per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchRegion {
    pub center: Complex,
    pub half_width: f64,
    pub grid: usize,
}

impl SearchRegion {
    pub fn new(center: Complex, half_width: f64, grid: usize) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidRegion(format!(
                "half width {half_width} must be positive"
            )));
        }
        if grid < 8 {
            return Err(Error::InvalidRegion(format!("grid {grid} is below 8")));
        }
        if !center.is_finite() {
            return Err(Error::InvalidRegion("center is not finite".into()));
        }
        Ok(SearchRegion {
            center,
            half_width,
            grid,
        })
    }

    pub fn contains(&self, z: Complex) -> bool {
        let d = z - self.center;
        let slack = 1e-9 * (1.0 + self.half_width);
        d.re.abs() <= self.half_width + slack && d.im.abs() <= self.half_width + slack
    }

    fn node(&self, i: usize, j: usize) -> Complex {
        let step = 2.0 * self.half_width / (self.grid - 1) as f64;
        self.center
            + Complex::new(
                -self.half_width + i as f64 * step,
                -self.half_width + j as f64 * step,
            )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PointKind {
    Zero { class: PointClass },
    Pole { order: usize },
}

/// A located zero of `f` or pole of `h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExceptionalPoint {
    pub location: Complex,
    pub kind: PointKind,
    /// `None` for non-isolated zeros.
    pub verdict: Option<IndexVerdict>,
    /// Index from the winding oracle, when it could be computed.
    pub numeric_index: Option<i64>,
    /// `|f|` at the location; zero for poles.
    pub residual: f64,
    pub isolated: bool,
}

impl ExceptionalPoint {
    pub fn is_zero(&self) -> bool {
        matches!(self.kind, PointKind::Zero { .. })
    }

    /// Index used for bookkeeping: the verdict value.
    pub fn index(&self) -> Option<i64> {
        self.verdict.and_then(|v| v.value)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroReport {
    pub region: SearchRegion,
    pub zeros: Vec<ExceptionalPoint>,
    /// The zero budget ran out; the list is partial.
    pub budget_exceeded: bool,
    pub notes: Vec<String>,
}

/// Upper bound `5(n - 1)` on the number of zeros for rational `h` of
/// degree `n >= 2`.
pub fn max_zero_bound(h: &AnalyticFunction) -> Result<usize> {
    let degree = h.rational_type().ok_or(Error::NotRational)?.degree();
    if degree < 2 {
        return Err(Error::DegreeTooSmall(degree));
    }
    Ok(5 * (degree - 1))
}

/// Winding of `f` on a circle enclosing all exceptional points, predicted
/// from the rational type of `h`: `-1` for type `(j, k)` with `j <= k`,
/// `j - k` when `j >= k + 2` (polynomials included).
pub fn expected_global_winding(h: &AnalyticFunction) -> Result<i64> {
    let ty = h.rational_type().ok_or(Error::NotRational)?;
    if ty.degree() < 2 {
        return Err(Error::DegreeTooSmall(ty.degree()));
    }
    let (j, k) = (ty.numerator, ty.denominator);
    if j <= k {
        Ok(-1)
    } else if j >= k + 2 {
        Ok((j - k) as i64)
    } else {
        Err(Error::UncoveredType {
            numerator: j,
            denominator: k,
        })
    }
}

/// Polynomial whose roots include every zero of `h(z) - conj(z)` for
/// rational `h = p/q`: from `conj(z) = p/q` follows
/// `z = pbar(p/q) / qbar(p/q)`, cleared of denominators.
pub fn algebraic_zero_polynomial(h: &AnalyticFunction) -> Option<Polynomial> {
    let (p, q) = h.num_den()?;
    let n = p.degree().max(q.degree());
    let (pc, qc) = (p.conj_coeffs(), q.conj_coeffs());
    let mut ptilde = Polynomial::zero();
    let mut qtilde = Polynomial::zero();
    for k in 0..=n {
        let term = p.pow(k as u32).mul(&q.pow((n - k) as u32));
        ptilde = ptilde.add(&term.scale(pc.coeff(k)));
        qtilde = qtilde.add(&term.scale(qc.coeff(k)));
    }
    let g = Polynomial::identity().mul(&qtilde).sub(&ptilde);
    let scale = g.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
    let g = g.trimmed(1e-13);
    (scale > 0.0 && g.degree() > 0).then_some(g)
}

/// Region used when none is given: for rational `h`, centered at the origin
/// with half width `2 (1 + m)`, `m` the largest root modulus of numerator
/// and denominator, widened to cover every verified algebraic zero.
pub fn default_region(f: &HarmonicMapping) -> SearchRegion {
    let Some((num, den)) = f.h().num_den() else {
        return SearchRegion {
            center: Complex::new(0.0, 0.0),
            half_width: DEFAULT_TRANSCENDENTAL_HALF_WIDTH,
            grid: DEFAULT_GRID,
        };
    };
    let m = num
        .roots()
        .iter()
        .chain(den.roots().iter())
        .map(|r| r.location.norm())
        .fold(0.0, f64::max);
    let mut half_width = 2.0 * (1.0 + m);
    for z in verified_algebraic_zeros(f) {
        half_width = half_width.max(1.25 * z.norm().max(z.re.abs().max(z.im.abs())) + 0.5);
    }
    SearchRegion {
        center: Complex::new(0.0, 0.0),
        half_width,
        grid: DEFAULT_GRID,
    }
}

fn verified_algebraic_zeros(f: &HarmonicMapping) -> Vec<Complex> {
    let Some(g) = algebraic_zero_polynomial(f.h()) else {
        return Vec::new();
    };
    g.raw_roots()
        .into_iter()
        .filter(|r| r.is_finite())
        .filter_map(|r| refine(f, r))
        .filter(|(_, res)| *res <= RESIDUAL_TOL)
        .map(|(z, _)| z)
        .collect()
}

fn grid_seeds(f: &HarmonicMapping, region: &SearchRegion) -> Vec<Complex> {
    let g = region.grid;
    let values: Vec<Option<f64>> = (0..g * g)
        .into_par_iter()
        .map(|idx| {
            let z = region.node(idx % g, idx / g);
            f.eval(z).ok().map(|w| w.norm())
        })
        .collect();
    let at = |i: usize, j: usize| values[j * g + i];
    let mut seeds = Vec::new();
    for j in 0..g {
        for i in 0..g {
            let Some(v) = at(i, j) else { continue };
            let mut minimal = true;
            for dj in -1i64..=1 {
                for di in -1i64..=1 {
                    if di == 0 && dj == 0 {
                        continue;
                    }
                    let (ni, nj) = (i as i64 + di, j as i64 + dj);
                    if ni < 0 || nj < 0 || ni >= g as i64 || nj >= g as i64 {
                        continue;
                    }
                    if let Some(w) = at(ni as usize, nj as usize) {
                        if w < v {
                            minimal = false;
                        }
                    }
                }
            }
            if minimal {
                seeds.push(region.node(i, j));
            }
        }
    }
    seeds
}

/// Solves `J delta = -F` for the real system of `f` at a point with
/// residual `fz` and `a = h'(z)`.
fn newton_step(fz: Complex, a: Complex) -> Complex {
    -(fz * a.conj() + fz.conj()) / (a.norm_sqr() - 1.0)
}

/// Levenberg–Marquardt step on `|f|^2` for a near-singular Jacobian.
fn descent_step(fz: Complex, a: Complex) -> Complex {
    let (p, q) = (a.re, a.im);
    // J = [[p - 1, -q], [q, p + 1]]
    let j = [[p - 1.0, -q], [q, p + 1.0]];
    let r = [fz.re, fz.im];
    let g = [
        j[0][0] * r[0] + j[1][0] * r[1],
        j[0][1] * r[0] + j[1][1] * r[1],
    ];
    let mut h = [
        [
            j[0][0] * j[0][0] + j[1][0] * j[1][0],
            j[0][0] * j[0][1] + j[1][0] * j[1][1],
        ],
        [0.0, j[0][1] * j[0][1] + j[1][1] * j[1][1]],
    ];
    h[1][0] = h[0][1];
    let mu = 1e-10 * (h[0][0] + h[1][1]) + 1e-300;
    h[0][0] += mu;
    h[1][1] += mu;
    let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
    Complex::new(
        -(h[1][1] * g[0] - h[0][1] * g[1]) / det,
        -(-h[1][0] * g[0] + h[0][0] * g[1]) / det,
    )
}

/// Damped Newton from `seed`; returns the final point and `|f|` there when
/// the iteration converged.
fn refine(f: &HarmonicMapping, seed: Complex) -> Option<(Complex, f64)> {
    let mut z = seed;
    let mut fz = f.eval(z).ok()?;
    let mut converged = false;
    let mut polish_left = 4;
    for _ in 0..MAX_NEWTON_ITER {
        let a = f.dh(z).ok()?;
        let res = fz.norm();
        if res == 0.0 {
            converged = true;
            break;
        }
        if res <= CONVERGENCE_TOL * (1.0 + a.norm()) {
            converged = true;
            if polish_left == 0 {
                break;
            }
            polish_left -= 1;
        }
        let det = a.norm_sqr() - 1.0;
        let step = if det.abs() >= SINGULAR_JACOBIAN_TOL {
            newton_step(fz, a)
        } else {
            descent_step(fz, a)
        };
        if !step.is_finite() {
            break;
        }
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let trial = z + step * lambda;
            if let Ok(ft) = f.eval(trial) {
                if ft.norm() < res {
                    accepted = Some((trial, ft));
                    break;
                }
            }
            lambda *= 0.5;
        }
        match accepted {
            Some((zn, fnew)) => {
                z = zn;
                fz = fnew;
            }
            None => break,
        }
    }
    let res = fz.norm();
    (converged || res <= RESIDUAL_TOL).then_some((z, res))
}

/// Gauss–Newton on `(Re f, Im f, |h'|^2 - 1) = 0`. Converges quadratically
/// to a singular zero where plain Newton only converges linearly.
fn polish_singular(f: &HarmonicMapping, z0: Complex) -> Option<Complex> {
    let mut z = z0;
    for _ in 0..50 {
        let fz = f.eval(z).ok()?;
        let a = f.dh(z).ok()?;
        let b = f.d2h(z).ok()?;
        let g = a.norm_sqr() - 1.0;
        let s = a.conj() * b;
        let (p, q) = (a.re, a.im);
        let rows = [[p - 1.0, -q], [q, p + 1.0], [2.0 * s.re, -2.0 * s.im]];
        let r = [fz.re, fz.im, g];
        let mut ata = [[0.0; 2]; 2];
        let mut atr = [0.0; 2];
        for (row, ri) in rows.iter().zip(r) {
            for i in 0..2 {
                atr[i] += row[i] * ri;
                for j in 0..2 {
                    ata[i][j] += row[i] * row[j];
                }
            }
        }
        let det = ata[0][0] * ata[1][1] - ata[0][1] * ata[1][0];
        if det.abs() < 1e-300 {
            return None;
        }
        let dx = -(ata[1][1] * atr[0] - ata[0][1] * atr[1]) / det;
        let dy = -(-ata[1][0] * atr[0] + ata[0][0] * atr[1]) / det;
        let step = Complex::new(dx, dy);
        z += step;
        if step.norm() <= 1e-15 * (1.0 + z.norm()) {
            break;
        }
    }
    (polished(f, z) && (z - z0).norm() <= 1e-4).then_some(z)
}

fn polished(f: &HarmonicMapping, z: Complex) -> bool {
    let (Ok(fz), Ok(a)) = (f.eval(z), f.dh(z)) else {
        return false;
    };
    fz.norm() <= CONVERGENCE_TOL * 1e-1 && (a.norm_sqr() - 1.0).abs() <= 1e-11
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    z: Complex,
    res: f64,
    /// Lower wins when merging.
    prio: u8,
    /// Merge radius around this candidate.
    tol: f64,
}

/// Radius of the region around a root of multiplicity `m` where `f` is
/// numerically indistinguishable from zero.
fn flat_radius(z: Complex, m: usize) -> f64 {
    (4.0 * f64::EPSILON.powf(1.0 / m as f64) * (1.0 + z.norm())).max(DEDUPE_TOL)
}

/// Merges candidates within each other's merge radius, keeping the one with
/// the lowest seed priority and then the lowest residual.
fn dedupe(mut points: Vec<Candidate>) -> Vec<Candidate> {
    points.sort_by(|a, b| {
        (a.prio, a.res)
            .partial_cmp(&(b.prio, b.res))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut out: Vec<Candidate> = Vec::new();
    for c in points {
        if !out.iter().any(|w| (w.z - c.z).norm() <= w.tol.max(c.tol)) {
            out.push(c);
        }
    }
    out
}

/// Poles of rational `h` as exceptional points with index `-order`.
pub fn pole_points(f: &HarmonicMapping) -> Result<Vec<ExceptionalPoint>> {
    let poles = f.h().poles()?;
    Ok(poles
        .into_iter()
        .map(|p| {
            let verdict = classifier::index(f, p.location).ok();
            ExceptionalPoint {
                location: p.location,
                kind: PointKind::Pole {
                    order: p.multiplicity,
                },
                verdict,
                numeric_index: None,
                residual: 0.0,
                isolated: true,
            }
        })
        .collect())
}

/// Finds, classifies and indexes the zeros of `f` in `region`.
pub fn find_zeros(f: &HarmonicMapping, region: &SearchRegion) -> Result<ZeroReport> {
    find_zeros_with(f, region, &IndexOptions::default())
}

/// [`find_zeros`] with explicit classification tolerances.
pub fn find_zeros_with(
    f: &HarmonicMapping,
    region: &SearchRegion,
    opts: &IndexOptions,
) -> Result<ZeroReport> {
    // (seed, priority): cluster means of multiple algebraic roots locate
    // degenerate zeros far better than any point Newton settles on, since
    // `f` is flat to high order there.
    let mut seeds: Vec<(Complex, u8, f64)> = grid_seeds(f, region)
        .into_iter()
        .map(|z| (z, 2, DEDUPE_TOL))
        .collect();
    if let Some(g) = algebraic_zero_polynomial(f.h()) {
        seeds.extend(
            g.raw_roots()
                .into_iter()
                .filter(|r| r.is_finite() && region.contains(*r))
                .map(|z| (z, 1, DEDUPE_TOL)),
        );
        seeds.extend(
            g.roots()
                .into_iter()
                .filter(|r| r.multiplicity > 1 && region.contains(r.location))
                .map(|r| (r.location, 0, flat_radius(r.location, r.multiplicity))),
        );
    }
    let refined: Vec<Candidate> = seeds
        .par_iter()
        .filter_map(|&(s, prio, tol)| refine(f, s).map(|(z, res)| Candidate { z, res, prio, tol }))
        .filter(|c| c.res <= RESIDUAL_TOL && region.contains(c.z))
        .collect();
    let mut found = dedupe(refined);

    // sharpen near-singular zeros before the singular band is applied
    found = found
        .into_par_iter()
        .map(|c| {
            let Candidate { z, res, .. } = c;
            let near_singular = f
                .dh(z)
                .map(|a| (a.norm() - 1.0).abs() < SINGULAR_POLISH_BAND)
                .unwrap_or(false);
            if !near_singular || polished(f, z) {
                return c;
            }
            match polish_singular(f, z) {
                Some(p) => Candidate {
                    z: p,
                    res: f.eval(p).map(|w| w.norm()).unwrap_or(res),
                    ..c
                },
                None => c,
            }
        })
        .collect();
    let mut found: Vec<(Complex, f64)> = dedupe(found).into_iter().map(|c| (c.z, c.res)).collect();
    found.sort_by(|a, b| {
        (a.0.re, a.0.im)
            .partial_cmp(&(b.0.re, b.0.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });

    let mut notes = Vec::new();
    let budget_exceeded = found.len() > MAX_ZEROS;
    if budget_exceeded {
        notes.push(format!("more than {MAX_ZEROS} zeros found; list truncated"));
        found.truncate(MAX_ZEROS);
    }

    let poles: Vec<Complex> = f
        .h()
        .poles()
        .map(|ps| ps.into_iter().map(|p| p.location).collect())
        .unwrap_or_default();
    let all: Vec<Complex> = found
        .iter()
        .map(|(z, _)| *z)
        .chain(poles.iter().copied())
        .collect();

    let zeros: Vec<(ExceptionalPoint, Option<String>)> = found
        .par_iter()
        .map(|&(z, residual)| index_zero(f, z, residual, &all, opts))
        .collect::<Result<_>>()?;
    let mut points = Vec::with_capacity(zeros.len());
    for (p, note) in zeros {
        notes.extend(note);
        points.push(p);
    }
    Ok(ZeroReport {
        region: *region,
        zeros: points,
        budget_exceeded,
        notes,
    })
}

fn index_zero(
    f: &HarmonicMapping,
    z: Complex,
    residual: f64,
    all: &[Complex],
    opts: &IndexOptions,
) -> Result<(ExceptionalPoint, Option<String>)> {
    let class = classifier::classify_point(f, z, opts.singular_tol)?;
    let radius = winding::auto_index_radius(z, all);
    let mut point = ExceptionalPoint {
        location: z,
        kind: PointKind::Zero { class },
        verdict: None,
        numeric_index: None,
        residual,
        isolated: true,
    };
    let mut note = None;
    match winding::poincare_index(f, z, Some(radius)) {
        Ok(v) => point.numeric_index = Some(v),
        Err(Error::NonIsolatedZero(_)) => {
            point.isolated = false;
            return Ok((point, Some(format!("zero at {z} is not isolated"))));
        }
        Err(e) => note = Some(format!("numeric index at {z} failed: {e}")),
    }
    let opts = IndexOptions {
        fallback_radius: Some(radius),
        ..*opts
    };
    match classifier::index_with(f, z, &opts) {
        Ok(v) => point.verdict = Some(v),
        Err(e) => note = Some(format!("index at {z} failed: {e}")),
    }
    Ok((point, note))
}
