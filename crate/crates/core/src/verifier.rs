//! Argument-principle audits: the winding of `f` along a curve must equal
//! the sum of the indices of the exceptional points it encloses.

use crate::classifier::{IndexOptions, Method, Sense};
use crate::error::{Error, Result};
use crate::function::HarmonicMapping;
use crate::winding::{self, ClosedCurve};
use crate::zeros::{self, ExceptionalPoint, PointKind};
use crate::Complex;
use serde::{Deserialize, Serialize};

/// Exceptional points closer than this to the curve invalidate the audit.
pub const ON_CURVE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub curve_winding: i64,
    pub index_sum: i64,
    /// Prediction from the rational type of `h`, for global audits.
    pub expected_winding: Option<i64>,
    /// Every point handed to the audit, interior or not.
    pub points: Vec<ExceptionalPoint>,
    pub interior: Vec<bool>,
    pub consistent: bool,
    pub notes: Vec<String>,
}

/// One row of the JSON report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSummary {
    pub z: Complex,
    pub kind: String,
    pub class: Option<Sense>,
    pub index: Option<i64>,
    pub method: Option<Method>,
    pub numeric_index: Option<i64>,
    pub interior: bool,
}

/// Compact report: `{winding, index_sum, consistent, points: [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditSummary {
    pub winding: i64,
    pub index_sum: i64,
    pub consistent: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_winding: Option<i64>,
    pub points: Vec<PointSummary>,
    pub notes: Vec<String>,
}

impl AuditReport {
    pub fn summary(&self) -> AuditSummary {
        AuditSummary {
            winding: self.curve_winding,
            index_sum: self.index_sum,
            consistent: self.consistent,
            expected_winding: self.expected_winding,
            points: self
                .points
                .iter()
                .zip(&self.interior)
                .map(|(p, &interior)| summarize(p, interior))
                .collect(),
            notes: self.notes.clone(),
        }
    }
}

pub fn summarize(p: &ExceptionalPoint, interior: bool) -> PointSummary {
    let (kind, class) = match p.kind {
        PointKind::Zero { class } => ("zero", Some(class.sense)),
        PointKind::Pole { .. } => ("pole", None),
    };
    PointSummary {
        z: p.location,
        kind: if p.isolated {
            kind.to_string()
        } else {
            "non_isolated_zero".to_string()
        },
        class,
        index: p.index(),
        method: p.verdict.map(|v| v.method),
        numeric_index: p.numeric_index,
        interior,
    }
}

/// `true` when `p` lies inside `curve`, by the winding of `z - p`.
pub fn is_interior(curve: &ClosedCurve, p: Complex) -> Result<bool> {
    Ok(winding::winding_of(|z| Ok(z - p), curve)?.value != 0)
}

/// Compares `V(f; curve)` with the sum of indices of the enclosed points.
pub fn audit_curve(
    f: &HarmonicMapping,
    curve: &ClosedCurve,
    points: &[ExceptionalPoint],
) -> Result<AuditReport> {
    let mut interior = Vec::with_capacity(points.len());
    let mut index_sum = 0;
    let mut notes = Vec::new();
    for p in points {
        if curve.distance_to(p.location) <= ON_CURVE_TOL {
            return Err(Error::PointOnCurve(p.location));
        }
        let inside = is_interior(curve, p.location)?;
        interior.push(inside);
        if !inside {
            continue;
        }
        let value = p.index().or(p.numeric_index);
        match value {
            Some(v) => index_sum += v,
            None => return Err(Error::UnresolvedIndeterminate(p.location)),
        }
        if let (Some(v), Some(n)) = (p.index(), p.numeric_index) {
            if v != n {
                notes.push(format!(
                    "index at {} is {v} but the winding oracle gives {n}",
                    p.location
                ));
            }
        }
    }
    let curve_winding = winding::winding(f, curve)?.value;
    let consistent = curve_winding == index_sum;
    if !consistent {
        notes.push(format!(
            "curve winding {curve_winding} differs from index sum {index_sum}"
        ));
    }
    Ok(AuditReport {
        curve_winding,
        index_sum,
        expected_winding: None,
        points: points.to_vec(),
        interior,
        consistent,
        notes,
    })
}

/// Finds every zero and pole of `f` for rational `h` of a covered type,
/// audits them on a large circle and checks the winding against the
/// prediction from the type of `h`.
pub fn audit_global(f: &HarmonicMapping) -> Result<AuditReport> {
    audit_global_in(f, &zeros::default_region(f))
}

/// [`audit_global`] with an explicit zero search region.
pub fn audit_global_in(f: &HarmonicMapping, region: &zeros::SearchRegion) -> Result<AuditReport> {
    audit_global_with(f, region, &IndexOptions::default())
}

/// [`audit_global_in`] with explicit classification tolerances.
pub fn audit_global_with(
    f: &HarmonicMapping,
    region: &zeros::SearchRegion,
    opts: &IndexOptions,
) -> Result<AuditReport> {
    let expected = zeros::expected_global_winding(f.h())?;
    let bound = zeros::max_zero_bound(f.h())?;
    let zero_report = zeros::find_zeros_with(f, region, opts)?;
    let mut points = zero_report.zeros;
    points.extend(zeros::pole_points(f)?);
    let mut notes = zero_report.notes;
    if zero_report.budget_exceeded {
        notes.push("zero search exceeded its budget".into());
    }

    let zero_count = points.iter().filter(|p| p.is_zero()).count();
    if zero_count > bound {
        notes.push(format!("{zero_count} zeros exceed the bound {bound}"));
    }
    let known: Vec<Complex> = points.iter().map(|p| p.location).collect();
    let (radius, _) = winding::auto_large_radius(f, &known)?;
    let curve = ClosedCurve::circle(Complex::new(0.0, 0.0), radius)?;
    let mut report = audit_curve(f, &curve, &points)?;
    report.expected_winding = Some(expected);
    report.notes.splice(0..0, notes);
    if report.curve_winding != expected {
        report.consistent = false;
        report.notes.push(format!(
            "large-circle winding {} differs from the predicted {expected}",
            report.curve_winding
        ));
    }
    if zero_count > bound || !report.points.iter().all(|p| p.isolated) {
        report.consistent = false;
    }
    Ok(report)
}
