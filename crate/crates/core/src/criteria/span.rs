use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::chart::Point;
use crate::error::{CriteriaError, DomainError};
use crate::multivector::VectorField;

/// Coefficients of a pointwise least-squares fit and the Euclidean norm of what is left.
#[derive(Debug, Clone, PartialEq)]
pub struct SpanPoint {
    pub coefficients: Vec<f64>,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpanDecomposition {
    /// One entry per input point; `None` where the basis was degenerate or undefined.
    pub entries: Vec<Option<SpanPoint>>,
    pub skipped: usize,
    pub notes: Vec<String>,
}

impl SpanDecomposition {
    pub fn max_residual(&self) -> f64 {
        self.entries
            .iter()
            .flatten()
            .map(|e| e.residual)
            .fold(0.0, f64::max)
    }
}

/// Smallest singular value of the columns, or 0 when there are more columns than rows.
pub(crate) fn smallest_singular_value(columns: &[Vec<f64>], rows: usize) -> f64 {
    if columns.is_empty() {
        return f64::INFINITY;
    }
    if columns.len() > rows {
        return 0.0;
    }
    let m = DMatrix::from_fn(rows, columns.len(), |i, j| columns[j][i]);
    m.singular_values()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Least-squares fit of `target` against `columns`; `None` if the columns are dependent.
pub(crate) fn fit(target: &[f64], columns: &[Vec<f64>], independence: f64) -> Option<SpanPoint> {
    let rows = target.len();
    if columns.is_empty() {
        return Some(SpanPoint {
            coefficients: Vec::new(),
            residual: norm(target),
        });
    }
    if smallest_singular_value(columns, rows) <= independence {
        return None;
    }
    let m = DMatrix::from_fn(rows, columns.len(), |i, j| columns[j][i]);
    let b = DVector::from_column_slice(target);
    let svd = m.svd(true, true);
    let x = svd.solve(&b, 0.0).ok()?;
    let coefficients: Vec<f64> = x.iter().copied().collect();
    let mut rest = target.to_vec();
    for (c, col) in coefficients.iter().zip(columns) {
        for (r, v) in rest.iter_mut().zip(col) {
            *r -= c * v;
        }
    }
    Some(SpanPoint {
        coefficients,
        residual: norm(&rest),
    })
}

fn norm(v: &[f64]) -> f64 {
    libm::sqrt(v.iter().map(|x| x * x).sum())
}

pub(crate) fn basis_values(basis: &[VectorField], p: &Point) -> Result<Vec<Vec<f64>>, DomainError> {
    basis.iter().map(|b| b.values_at(p)).collect()
}

/// Fit of `v` against `basis` at one point; `Ok(None)` where the basis is dependent.
pub(crate) fn fit_at(
    v: &VectorField,
    basis: &[VectorField],
    p: &Point,
    independence: f64,
) -> Result<Option<SpanPoint>, DomainError> {
    Ok(fit(
        &v.values_at(p)?,
        &basis_values(basis, p)?,
        independence,
    ))
}

/// Span residual at one point, NaN (skipped by reports) where the basis is dependent.
pub(crate) fn residual_at(
    v: &VectorField,
    basis: &[VectorField],
    p: &Point,
    independence: f64,
) -> Result<f64, DomainError> {
    Ok(fit_at(v, basis, p, independence)?.map_or(f64::NAN, |e| e.residual))
}

/// Independence mask of `basis` at each point.
pub(crate) fn independent_at(
    basis: &[VectorField],
    points: &[Point],
    independence: f64,
) -> Vec<bool> {
    points
        .iter()
        .map(|p| match basis_values(basis, p) {
            Ok(cols) => smallest_singular_value(&cols, p.values().len()) > independence,
            Err(_) => false,
        })
        .collect()
}

/// Pointwise least-squares expansion of `v` in `basis`.
pub fn span_expand(
    v: &VectorField,
    basis: &[VectorField],
    points: &[Point],
    independence: f64,
) -> Result<SpanDecomposition, CriteriaError> {
    for b in basis {
        v.check_same_chart(b)?;
    }
    let mut entries = Vec::with_capacity(points.len());
    let mut degenerate = 0;
    let mut undefined = 0;
    for p in points {
        let entry = match (v.values_at(p), basis_values(basis, p)) {
            (Ok(target), Ok(cols)) => {
                let e = fit(&target, &cols, independence);
                if e.is_none() {
                    degenerate += 1;
                }
                e
            }
            _ => {
                undefined += 1;
                None
            }
        };
        entries.push(entry);
    }
    let mut notes = Vec::new();
    if degenerate > 0 {
        notes.push(format!(
            "degenerate basis at {degenerate} of {} points",
            points.len()
        ));
    }
    if undefined > 0 {
        notes.push(format!(
            "domain error at {undefined} of {} points",
            points.len()
        ));
    }
    let skipped = degenerate + undefined;
    if skipped == points.len() {
        return Err(CriteriaError::AllPointsSkipped {
            context: "span expansion".into(),
        });
    }
    Ok(SpanDecomposition {
        entries,
        skipped,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::CoordinateChart;
    use crate::expr::{parse_expression, ScalarExpr};

    fn chart() -> CoordinateChart {
        CoordinateChart::new(["x", "y", "z"]).unwrap()
    }

    fn field(c: &CoordinateChart, comps: [&str; 3]) -> VectorField {
        VectorField::new(
            c,
            comps
                .iter()
                .map(|s| parse_expression(s, c).unwrap())
                .collect(),
        )
        .unwrap()
    }

    fn grid(c: &CoordinateChart) -> Vec<Point> {
        let mut v = Vec::new();
        for i in 0..4 {
            for j in 0..3 {
                let t = i as f64 * 0.3 - 0.5;
                let s = j as f64 * 0.4 - 0.2;
                v.push(c.point(&[t, s, t * s + 0.1]).unwrap());
            }
        }
        v
    }

    #[test]
    fn member_of_basis() {
        let c = chart();
        let x1 = field(&c, ["exp(z)", "1", "0"]);
        let x2 = field(&c, ["0", "1", "0"]);
        let d = span_expand(&x1, &[x1.clone(), x2.clone()], &grid(&c), 1e-10).unwrap();
        for e in d.entries.iter().flatten() {
            assert!((e.coefficients[0] - 1.0).abs() < 1e-12);
            assert!(e.coefficients[1].abs() < 1e-12);
            assert!(e.residual < 1e-12);
        }
        let x3 = VectorField::coordinate(&c, 2);
        let d = span_expand(&x3.lie_bracket(&x1), &[x1, x2], &grid(&c), 1e-10).unwrap();
        assert_eq!(d.skipped, 0);
        for e in d.entries.iter().flatten() {
            assert!((e.coefficients[0] - 1.0).abs() < 1e-12);
            assert!((e.coefficients[1] + 1.0).abs() < 1e-12);
            assert!(e.residual <= 1e-12);
        }
    }

    #[test]
    fn orthogonal_direction_has_unit_residual() {
        let c = chart();
        let dz = VectorField::coordinate(&c, 2);
        let basis = [
            VectorField::coordinate(&c, 0),
            VectorField::coordinate(&c, 1),
        ];
        let d = span_expand(&dz, &basis, &grid(&c), 1e-10).unwrap();
        for e in d.entries.iter().flatten() {
            assert!((e.residual - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn degenerate_basis_is_skipped() {
        let c = chart();
        let dx = VectorField::coordinate(&c, 0);
        let zero = VectorField::zero(&c);
        let err = span_expand(&dx, &[dx.clone(), zero], &grid(&c), 1e-10).unwrap_err();
        assert!(matches!(err, CriteriaError::AllPointsSkipped { .. }));
        // x∂x is degenerate only where x = 0
        let xdx = dx.scale(&ScalarExpr::coord(0));
        let pts = [
            c.point(&[0.0, 1.0, 1.0]).unwrap(),
            c.point(&[1.0, 1.0, 1.0]).unwrap(),
        ];
        let d = span_expand(&dx, &[xdx], &pts, 1e-10).unwrap();
        assert_eq!(d.skipped, 1);
        assert!(d.entries[0].is_none());
        assert_eq!(d.notes.len(), 1);
    }

    #[test]
    fn reconstruction_matches_reported_residual() {
        let c = chart();
        let v = field(&c, ["x*y", "sin(z)", "1 + x"]);
        let basis = [field(&c, ["1", "y", "0"]), field(&c, ["0", "1", "x"])];
        let pts = grid(&c);
        let d = span_expand(&v, &basis, &pts, 1e-10).unwrap();
        for (p, e) in pts.iter().zip(&d.entries) {
            let e = e.as_ref().unwrap();
            let target = v.values_at(p).unwrap();
            let cols = basis_values(&basis, p).unwrap();
            let mut r2 = 0.0;
            for i in 0..3 {
                let fit = e.coefficients[0] * cols[0][i] + e.coefficients[1] * cols[1][i];
                r2 += (target[i] - fit) * (target[i] - fit);
            }
            assert!((libm::sqrt(r2) - e.residual).abs() < 1e-12);
        }
    }
}
