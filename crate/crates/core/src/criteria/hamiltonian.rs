use alloc::string::ToString;

use crate::chart::Point;
use crate::error::{CriteriaError, DomainError};
use crate::expr::ScalarExpr;
use crate::multivector::{DecomposableBivector, VectorField};

use super::report::{field_max_abs, CriterionReport, ReportBuilder, Tracker};
use super::VerifyConfig;

fn scalar_abs(e: &ScalarExpr) -> impl Fn(&Point) -> Result<f64, DomainError> + '_ {
    move |p| Ok(e.evaluate(p)?.abs())
}

fn worst(cfg: &VerifyConfig, f: impl Fn(&Point) -> Result<f64, DomainError>) -> f64 {
    let mut t = Tracker::default();
    for (i, p) in cfg.points.iter().enumerate() {
        t.record_result(i, f(p));
    }
    t.max().unwrap_or(0.0)
}

fn precondition(
    which: &str,
    cfg: &VerifyConfig,
    f: impl Fn(&Point) -> Result<f64, DomainError>,
) -> Result<(), CriteriaError> {
    let residual = worst(cfg, f);
    if residual > cfg.tol.residual {
        return Err(CriteriaError::PreconditionResidual {
            which: which.to_string(),
            residual,
            tolerance: cfg.tol.residual,
        });
    }
    Ok(())
}

/// `X1(X2(H))`, which must vanish for `H` to generate the reduced dynamics.
pub fn hamiltonian_condition(
    x1: &VectorField,
    x2: &VectorField,
    h: &ScalarExpr,
    cfg: &VerifyConfig,
) -> Result<(ScalarExpr, CriterionReport), CriteriaError> {
    x1.check_same_chart(x2)?;
    let expr = x1.apply(&x2.apply(h));
    let mut report = ReportBuilder::new("hamiltonian condition", cfg);
    report.condition("X1(X2(H))", true, scalar_abs(&expr));
    Ok((expr, report.finish()))
}

/// `H = I1 + I2` from an `X1`-invariant `I1` and an `X2`-invariant `I2` of commuting fields.
pub fn separable_hamiltonian(
    i1: &ScalarExpr,
    i2: &ScalarExpr,
    x1: &VectorField,
    x2: &VectorField,
    cfg: &VerifyConfig,
) -> Result<(ScalarExpr, CriterionReport), CriteriaError> {
    x1.check_same_chart(x2)?;
    let bracket = x1.lie_bracket(x2);
    let inv1 = x1.apply(i1);
    let inv2 = x2.apply(i2);
    precondition("[X1,X2]", cfg, |p| field_max_abs(&bracket, p))?;
    precondition("X1(I1)", cfg, scalar_abs(&inv1))?;
    precondition("X2(I2)", cfg, scalar_abs(&inv2))?;

    let h = i1.add(i2).simplify();
    let expr = x1.apply(&x2.apply(&h));
    let mut report = ReportBuilder::new("separable hamiltonian", cfg);
    report.condition("[X1,X2]", true, |p| field_max_abs(&bracket, p));
    report.condition("X1(I1)", true, scalar_abs(&inv1));
    report.condition("X2(I2)", true, scalar_abs(&inv2));
    report.condition("X1(X2(H))", true, scalar_abs(&expr));
    Ok((h, report.finish()))
}

/// Output of [`hojman_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct HojmanReduction {
    /// `ρ = X3(H)`
    pub rho: ScalarExpr,
    /// `ρ·X1`
    pub scaled: VectorField,
    /// `X1∧X3`
    pub poisson: DecomposableBivector,
    pub report: CriterionReport,
}

/// Given `[X3,X1] = X1` and `X1(H) = 0`, `ρ = X3(H)` is an `X1`-invariant.
pub fn hojman_check(
    x1: &VectorField,
    x3: &VectorField,
    h: &ScalarExpr,
    cfg: &VerifyConfig,
) -> Result<HojmanReduction, CriteriaError> {
    x1.check_same_chart(x3)?;
    let algebra = x3.lie_bracket(x1).sub(x1);
    let invariance = x1.apply(h);
    precondition("[X3,X1] - X1", cfg, |p| field_max_abs(&algebra, p))?;
    precondition("X1(H)", cfg, scalar_abs(&invariance))?;

    let rho = x3.apply(h);
    let x1_rho = x1.apply(&rho);
    let mut report = ReportBuilder::new("hojman reduction", cfg);
    report.condition("[X3,X1] - X1", true, |p| field_max_abs(&algebra, p));
    report.condition("X1(H)", true, scalar_abs(&invariance));
    report.condition("X1(rho)", true, scalar_abs(&x1_rho));
    Ok(HojmanReduction {
        scaled: x1.scale(&rho),
        poisson: DecomposableBivector::new(x1.clone(), x3.clone()),
        rho,
        report: report.finish(),
    })
}

#[cfg(test)]
mod tests {
    use alloc::vec::Vec;

    use super::*;
    use crate::chart::CoordinateChart;
    use crate::expr::parse_expression;
    use crate::numeric::ToleranceConfig;

    fn field(c: &CoordinateChart, comps: &[&str]) -> VectorField {
        VectorField::new(
            c,
            comps
                .iter()
                .map(|s| parse_expression(s, c).unwrap())
                .collect(),
        )
        .unwrap()
    }

    fn cfg(c: &CoordinateChart, pts: &[&[f64]]) -> VerifyConfig {
        let points: Vec<Point> = pts.iter().map(|v| c.point(v).unwrap()).collect();
        VerifyConfig::new(points, ToleranceConfig::default())
    }

    fn rotation() -> (CoordinateChart, VectorField, VectorField, VerifyConfig) {
        let c = CoordinateChart::new(["x1", "x2", "x3"]).unwrap();
        let x1 = field(&c, &["-x2", "x1", "0"]);
        let x2 = field(&c, &["0", "0", "1"]);
        let v = cfg(
            &c,
            &[&[0.5, 0.3, 0.1], &[1.2, -0.8, 0.7], &[0.2, 1.5, -0.4]],
        );
        (c, x1, x2, v)
    }

    #[test]
    fn condition_matches_mixed_partials() {
        let (c, x1, x2, v) = rotation();
        let h = parse_expression("x3^2*x1*x2 + sin(x3)*x1", &c).unwrap();
        let (expr, _) = hamiltonian_condition(&x1, &x2, &h, &v).unwrap();
        let oracle = ScalarExpr::coord(0)
            .mul(&h.partial(1).partial(2))
            .sub(&ScalarExpr::coord(1).mul(&h.partial(0).partial(2)));
        for p in &v.points {
            let a = expr.evaluate(p).unwrap();
            let b = oracle.evaluate(p).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
        let (_, r) = hamiltonian_condition(&x1, &x2, &ScalarExpr::coord(2), &v).unwrap();
        assert!(r.pass);
        let h = parse_expression("x3*x1", &c).unwrap();
        let (expr, r) = hamiltonian_condition(&x1, &x2, &h, &v).unwrap();
        assert!(!r.pass);
        for p in &v.points {
            let x = p.values()[1];
            // X1(x1) = -x2 here, since X1 = -x2∂1 + x1∂2
            assert!((expr.evaluate(p).unwrap() + x).abs() < 1e-12);
        }
    }

    #[test]
    fn separable_examples() {
        let (c, x1, x2, v) = rotation();
        let r2 = parse_expression("x1^2 + x2^2", &c).unwrap();
        let (h, r) = separable_hamiltonian(&r2, &ScalarExpr::zero(), &x1, &x2, &v).unwrap();
        assert!(r.pass);
        assert_eq!(h, r2.simplify());

        let e = CoordinateChart::new(["x", "y", "z"]).unwrap();
        let x1 = field(&e, &["exp(z)", "1", "0"]);
        let x2 = field(&e, &["0", "1", "0"]);
        let ve = cfg(&e, &[&[0.1, 0.2, 0.3], &[-0.5, 0.5, 0.9]]);
        let i1 = parse_expression("x - y*exp(z)", &e).unwrap();
        let (_, r) = separable_hamiltonian(&i1, &ScalarExpr::zero(), &x1, &x2, &ve).unwrap();
        assert!(r.pass, "{r:?}");
        let err = separable_hamiltonian(&ScalarExpr::coord(0), &ScalarExpr::zero(), &x1, &x2, &ve)
            .unwrap_err();
        assert!(
            matches!(err, CriteriaError::PreconditionResidual { ref which, .. } if which == "X1(I1)")
        );
    }

    #[test]
    fn hojman_examples() {
        let c = CoordinateChart::new(["x", "y"]).unwrap();
        let x1 = field(&c, &["1", "0"]);
        let x3 = field(&c, &["-x", "1"]);
        let v = cfg(&c, &[&[0.3, -0.4], &[1.1, 0.9], &[-2.0, 0.5]]);
        let out = hojman_check(&x1, &x3, &ScalarExpr::coord(1), &v).unwrap();
        assert!(out.report.pass);
        assert_eq!(out.rho, ScalarExpr::one());
        let out = hojman_check(&x1, &x3, &parse_expression("y^2", &c).unwrap(), &v).unwrap();
        assert!(out.report.pass);
        for p in &v.points {
            assert!((out.rho.evaluate(p).unwrap() - 2.0 * p.values()[1]).abs() < 1e-15);
        }
        let err = hojman_check(&x1, &x3, &ScalarExpr::coord(0), &v).unwrap_err();
        assert!(
            matches!(err, CriteriaError::PreconditionResidual { ref which, .. } if which == "X1(H)")
        );
    }
}
