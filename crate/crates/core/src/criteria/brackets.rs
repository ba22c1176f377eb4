use alloc::format;
use alloc::vec::Vec;

use crate::error::CriteriaError;
use crate::multivector::{schouten_bracket, DecomposableBivector, VectorField};

use super::report::{field_max_abs, CriterionReport, ReportBuilder};
use super::span::{fit_at, independent_at, residual_at};
use super::{require_independence, VerifyConfig};

fn same_chart(fields: &[&VectorField]) -> Result<(), CriteriaError> {
    for f in &fields[1..] {
        fields[0].check_same_chart(f)?;
    }
    Ok(())
}

/// `X∧Y` is Poisson: `[X,Y] ∈ span{X,Y}` and `⌈X∧Y, X∧Y⌉ = 0`.
pub fn check_poisson_pair(
    x: &VectorField,
    y: &VectorField,
    cfg: &VerifyConfig,
) -> Result<CriterionReport, CriteriaError> {
    same_chart(&[x, y])?;
    let basis = [x.clone(), y.clone()];
    let mask = independent_at(&basis, &cfg.points, cfg.tol.independence);
    require_independence(&mask, "X, Y", cfg)?;
    let indep = cfg.tol.independence;

    let mut report = ReportBuilder::new("poisson pair", cfg);
    let bracket = x.lie_bracket(y);
    report.condition_on("[X,Y] in span(X,Y)", true, &mask, |p| {
        residual_at(&bracket, &basis, p, indep)
    });
    let wedge = DecomposableBivector::new(x.clone(), y.clone());
    let schouten = schouten_bracket(&wedge, &wedge);
    report.condition("[X^Y, X^Y]", true, |p| {
        Ok(schouten.components_at(p)?.max_abs())
    });
    Ok(report.finish())
}

/// `XH` preserves `X∧Y`. Gated on the Lie derivative; the span form is informative.
pub fn check_automorphism(
    xh: &VectorField,
    x: &VectorField,
    y: &VectorField,
    cfg: &VerifyConfig,
) -> Result<CriterionReport, CriteriaError> {
    same_chart(&[xh, x, y])?;
    let mut report = ReportBuilder::new("automorphism", cfg);
    let wedge = DecomposableBivector::new(x.clone(), y.clone());
    let lie = xh.lie_derivative(&wedge);
    report.condition("L_XH(X^Y)", true, |p| {
        Ok(super::report::slice_max_abs(&lie.components_at(p)?))
    });

    let basis = [x.clone(), y.clone()];
    let indep = cfg.tol.independence;
    let mask = independent_at(&basis, &cfg.points, indep);
    let bx = xh.lie_bracket(x);
    let by = xh.lie_bracket(y);
    report.condition_on("[XH,X] in span(X,Y)", false, &mask, |p| {
        residual_at(&bx, &basis, p, indep)
    });
    report.condition_on("[XH,Y] in span(X,Y)", false, &mask, |p| {
        residual_at(&by, &basis, p, indep)
    });
    // the Lie derivative is (a + d) X∧Y when [XH,X] = aX + bY and [XH,Y] = cX + dY
    report.condition_on("trace of XH on span(X,Y)", false, &mask, |p| {
        let a = fit_at(&bx, &basis, p, indep)?;
        let d = fit_at(&by, &basis, p, indep)?;
        Ok(match (a, d) {
            (Some(a), Some(d)) => (a.coefficients[0] + d.coefficients[1]).abs(),
            _ => f64::NAN,
        })
    });
    Ok(report.finish())
}

/// `X1∧X2` and `XH∧X3` are compatible. Gated on the direct Schouten bracket;
/// the six bracket relations between the four fields are informative.
pub fn check_compatibility(
    x1: &VectorField,
    x2: &VectorField,
    xh: &VectorField,
    x3: &VectorField,
    cfg: &VerifyConfig,
) -> Result<CriterionReport, CriteriaError> {
    same_chart(&[x1, x2, xh, x3])?;
    let indep = cfg.tol.independence;
    let first_ok = independent_at(&[x1.clone(), x2.clone()], &cfg.points, indep);
    let second_ok = independent_at(&[xh.clone(), x3.clone()], &cfg.points, indep);
    let mask: Vec<bool> = first_ok
        .iter()
        .zip(&second_ok)
        .map(|(a, b)| *a && *b)
        .collect();
    require_independence(&mask, "X1^X2 and XH^X3", cfg)?;

    let mut report = ReportBuilder::new("compatibility", cfg);
    let triple = independent_at(&[x1.clone(), x2.clone(), x3.clone()], &cfg.points, indep);
    let dependent = triple.iter().filter(|ok| !**ok).count();
    if dependent > 0 {
        report.note(format!(
            "X1, X2, X3 dependent at {dependent} of {} points",
            triple.len()
        ));
    }
    let first = DecomposableBivector::new(x1.clone(), x2.clone());
    let second = DecomposableBivector::new(xh.clone(), x3.clone());
    let schouten = schouten_bracket(&first, &second);
    report.condition_on("[X1^X2, XH^X3]", true, &mask, |p| {
        Ok(schouten.components_at(p)?.max_abs())
    });

    let relations: [(&str, VectorField, [&VectorField; 2]); 6] = [
        ("[X1,X2] in span(X1,X2)", x1.lie_bracket(x2), [x1, x2]),
        ("[XH,X3] in span(XH,X3)", xh.lie_bracket(x3), [xh, x3]),
        ("[XH,X1] in span(X1,X2)", xh.lie_bracket(x1), [x1, x2]),
        ("[XH,X2] in span(X1,X2)", xh.lie_bracket(x2), [x1, x2]),
        ("[X3,X1] in span(XH,X2)", x3.lie_bracket(x1), [xh, x2]),
        ("[X3,X2] in span(XH,X1)", x3.lie_bracket(x2), [xh, x1]),
    ];
    for (name, v, [a, b]) in relations {
        let basis = [a.clone(), b.clone()];
        report.condition(name, false, |p| residual_at(&v, &basis, p, indep));
    }
    Ok(report.finish())
}

/// The three-field algebra `[X1,X2] = 0`, `[X3,X1] = X1 − X2`, `[X3,X2] = 0`.
pub fn check_delta(
    x1: &VectorField,
    x2: &VectorField,
    x3: &VectorField,
    cfg: &VerifyConfig,
) -> Result<CriterionReport, CriteriaError> {
    same_chart(&[x1, x2, x3])?;
    let mut report = ReportBuilder::new("delta algebra", cfg);
    let mask = independent_at(
        &[x1.clone(), x2.clone(), x3.clone()],
        &cfg.points,
        cfg.tol.independence,
    );
    let dependent = mask.iter().filter(|ok| !**ok).count();
    if dependent > 0 {
        // the brackets are tested regardless; X3 may lie in span(X1,X2)
        report.note(format!(
            "X1, X2, X3 dependent at {dependent} of {} points",
            mask.len()
        ));
    }
    let residuals: Vec<(&str, VectorField)> = Vec::from([
        ("[X1,X2]", x1.lie_bracket(x2)),
        ("[X3,X1] - (X1 - X2)", x3.lie_bracket(x1).sub(&x1.sub(x2))),
        ("[X3,X2]", x3.lie_bracket(x2)),
    ]);
    for (name, v) in &residuals {
        report.condition(name, true, |p| field_max_abs(v, p));
    }
    Ok(report.finish())
}
