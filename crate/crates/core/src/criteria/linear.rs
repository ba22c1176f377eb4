use alloc::format;
use alloc::vec::Vec;

use crate::chart::CoordinateChart;
use crate::error::CriteriaError;
use crate::expr::ScalarExpr;
use crate::multivector::VectorField;

use super::report::{CriterionReport, ReportBuilder};
use super::VerifyConfig;

/// `X_A = Σ Aᵢⱼ xⱼ ∂/∂xᵢ` and `X_a = ∂/∂xₙ` on the chart `x1 … xn`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearRealization {
    pub chart: CoordinateChart,
    pub matrix: Vec<Vec<f64>>,
    pub x_a_matrix: VectorField,
    pub x_a: VectorField,
}

/// Builds the realization for an `(n−1)×(n−1)` matrix.
pub fn linear_realization(a: &[Vec<f64>]) -> Result<LinearRealization, CriteriaError> {
    let m = a.len();
    if m == 0 {
        return Err(CriteriaError::DimensionMismatch(
            "matrix must be at least 1x1".into(),
        ));
    }
    if let Some(row) = a.iter().find(|r| r.len() != m) {
        return Err(CriteriaError::DimensionMismatch(format!(
            "row of length {} in a {m}x{m} matrix",
            row.len()
        )));
    }
    let n = m + 1;
    let chart = CoordinateChart::numbered("x", n).expect("numbered names are valid");
    let mut components: Vec<ScalarExpr> = a
        .iter()
        .map(|row| {
            let terms = row
                .iter()
                .enumerate()
                .map(|(j, c)| ScalarExpr::constant(*c).mul(&ScalarExpr::coord(j)))
                .collect();
            ScalarExpr::sum(terms).simplify()
        })
        .collect();
    components.push(ScalarExpr::zero());
    Ok(LinearRealization {
        x_a_matrix: VectorField::new(&chart, components)?,
        x_a: VectorField::coordinate(&chart, m),
        matrix: a.to_vec(),
        chart,
    })
}

impl LinearRealization {
    pub fn dimension(&self) -> usize {
        self.chart.dimension()
    }

    fn check_len(&self, p: &[ScalarExpr]) -> Result<(), CriteriaError> {
        if p.len() != self.dimension() {
            return Err(CriteriaError::DimensionMismatch(format!(
                "{} candidate components for dimension {}",
                p.len(),
                self.dimension()
            )));
        }
        Ok(())
    }

    /// `X3 = Σ Pⱼ ∂/∂xⱼ`
    pub fn third_field(&self, p: &[ScalarExpr]) -> Result<VectorField, CriteriaError> {
        self.check_len(p)?;
        Ok(VectorField::new(&self.chart, p.to_vec())?)
    }

    /// `X_A(Pᵢ) − Σⱼ Aᵢⱼ(Pⱼ − xⱼ)` for `i < n` and `X_A(Pₙ) − 1`.
    pub fn residuals(&self, p: &[ScalarExpr]) -> Result<Vec<ScalarExpr>, CriteriaError> {
        self.check_len(p)?;
        let m = self.matrix.len();
        let mut out = Vec::with_capacity(m + 1);
        for (i, row) in self.matrix.iter().enumerate() {
            let forcing = row
                .iter()
                .enumerate()
                .map(|(j, c)| ScalarExpr::constant(*c).mul(&p[j].sub(&ScalarExpr::coord(j))))
                .collect();
            out.push(
                self.x_a_matrix
                    .apply(&p[i])
                    .sub(&ScalarExpr::sum(forcing))
                    .simplify(),
            );
        }
        out.push(
            self.x_a_matrix
                .apply(&p[m])
                .sub(&ScalarExpr::one())
                .simplify(),
        );
        Ok(out)
    }
}

/// Samples the residuals of a candidate third field.
pub fn check_linear_candidate(
    realization: &LinearRealization,
    p: &[ScalarExpr],
    cfg: &VerifyConfig,
) -> Result<CriterionReport, CriteriaError> {
    let residuals = realization.residuals(p)?;
    let mut report = ReportBuilder::new("linear realization", cfg);
    for (i, r) in residuals.iter().enumerate() {
        let name = format!("equation {}", i + 1);
        report.condition(&name, true, |pt| Ok(r.evaluate(pt)?.abs()));
    }
    let last = realization.dimension() - 1;
    if p.iter().any(|c| c.depends_on(last)) {
        report.note(format!(
            "candidate depends on {}; the residuals are only equivalent to the algebra for candidates free of it",
            realization.chart.name(last)
        ));
    }
    Ok(report.finish())
}

#[cfg(test)]
mod tests {
    use alloc::vec;

    use super::*;
    use crate::chart::Point;
    use crate::criteria::check_delta;
    use crate::expr::parse_expression;
    use crate::numeric::ToleranceConfig;

    fn cfg(c: &CoordinateChart) -> VerifyConfig {
        let points: Vec<Point> = [[0.5, 0.0], [0.8, 1.5], [1.3, -2.0], [2.0, 0.3]]
            .iter()
            .map(|v| c.point(v).unwrap())
            .collect();
        VerifyConfig::new(points, ToleranceConfig::default())
    }

    #[test]
    fn log_candidate_for_identity_matrix() {
        let real = linear_realization(&[vec![1.0]]).unwrap();
        let c = &real.chart;
        let p = [
            parse_expression("-x1*ln(x1)", c).unwrap(),
            parse_expression("ln(x1)", c).unwrap(),
        ];
        let v = cfg(c);
        let r = check_linear_candidate(&real, &p, &v).unwrap();
        assert!(r.pass && r.max_residual() <= 1e-12, "{r:?}");
        let x3 = real.third_field(&p).unwrap();
        let d = check_delta(&real.x_a_matrix, &real.x_a, &x3, &v).unwrap();
        assert!(d.pass && d.max_residual() <= 1e-12, "{d:?}");
    }

    #[test]
    fn zero_candidate() {
        let real = linear_realization(&[vec![1.0]]).unwrap();
        let r = real
            .residuals(&[ScalarExpr::zero(), ScalarExpr::zero()])
            .unwrap();
        assert_eq!(r[0], ScalarExpr::coord(0));
        assert_eq!(r[1], ScalarExpr::constant(-1.0));
    }

    #[test]
    fn zero_matrix_has_no_realization() {
        let real = linear_realization(&[vec![0.0, 0.0], vec![0.0, 0.0]]).unwrap();
        assert!(real.x_a_matrix.is_syntactically_zero());
        let c = &real.chart;
        let p = [
            parse_expression("x1*x2", c).unwrap(),
            parse_expression("sin(x1)", c).unwrap(),
            parse_expression("x2^2", c).unwrap(),
        ];
        assert_eq!(real.residuals(&p).unwrap()[2], ScalarExpr::constant(-1.0));
    }

    #[test]
    fn shape_errors() {
        assert!(linear_realization(&[]).is_err());
        assert!(linear_realization(&[vec![1.0, 2.0]]).is_err());
        let real = linear_realization(&[vec![1.0]]).unwrap();
        assert!(real.residuals(&[ScalarExpr::zero()]).is_err());
    }
}
