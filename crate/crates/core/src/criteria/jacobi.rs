use alloc::vec;

use crate::error::CriteriaError;
use crate::expr::ScalarExpr;
use crate::multivector::{schouten_bracket, DecomposableBivector, TrivectorSum, VectorField};

use super::report::{field_max_abs, slice_max_abs, CriterionReport, ReportBuilder};
use super::span::{fit_at, independent_at, residual_at};
use super::{require_independence, VerifyConfig};

/// Sign `σ` in `⌈Λ,Λ⌉ = 2σ X∧Λ` that matches the Schouten convention of
/// [`schouten_bracket`], under which `⌈X∧Y, X∧Y⌉ = 2[X,Y]∧X∧Y`.
pub const JACOBI_SIGN: f64 = -1.0;

/// `(X1∧X2, XH)` as a Jacobi pair, tested two ways.
///
/// Conditions prefixed `algebra:` test `[X1,X2] = −XH`, `[XH,X1] = −A X1 + B X2`
/// and `[XH,X2] = C X1 + A X2`; those prefixed `tensor:` test
/// `⌈Λ,Λ⌉ − 2σ XH∧Λ = 0` and `⌈XH,Λ⌉ = 0` directly.
pub fn check_jacobi(
    x1: &VectorField,
    x2: &VectorField,
    xh: &VectorField,
    cfg: &VerifyConfig,
) -> Result<CriterionReport, CriteriaError> {
    x1.check_same_chart(x2)?;
    x1.check_same_chart(xh)?;
    let basis = [x1.clone(), x2.clone()];
    let indep = cfg.tol.independence;
    let mask = independent_at(&basis, &cfg.points, indep);
    require_independence(&mask, "X1, X2", cfg)?;

    let mut report = ReportBuilder::new("jacobi structure", cfg);
    report.note("sign convention: [L,L] = 2 s XH^L with s = -1");

    let algebra = x1.lie_bracket(x2).add(xh);
    report.condition("algebra: [X1,X2] + XH", true, |p| {
        field_max_abs(&algebra, p)
    });
    let b1 = xh.lie_bracket(x1);
    let b2 = xh.lie_bracket(x2);
    report.condition_on("algebra: [XH,X1] in span(X1,X2)", true, &mask, |p| {
        residual_at(&b1, &basis, p, indep)
    });
    report.condition_on("algebra: [XH,X2] in span(X1,X2)", true, &mask, |p| {
        residual_at(&b2, &basis, p, indep)
    });
    report.condition_on("algebra: shared diagonal coefficient", true, &mask, |p| {
        let f1 = fit_at(&b1, &basis, p, indep)?;
        let f2 = fit_at(&b2, &basis, p, indep)?;
        Ok(match (f1, f2) {
            (Some(f1), Some(f2)) => (f1.coefficients[0] + f2.coefficients[1]).abs(),
            _ => f64::NAN,
        })
    });

    let lambda = DecomposableBivector::new(x1.clone(), x2.clone());
    let twice = TrivectorSum::from_terms(
        x1.chart(),
        vec![(
            ScalarExpr::constant(2.0 * JACOBI_SIGN),
            [xh.clone(), x1.clone(), x2.clone()],
        )],
    );
    let first = schouten_bracket(&lambda, &lambda).difference(&twice);
    report.condition("tensor: [L,L] - 2s XH^L", true, |p| {
        Ok(first.components_at(p)?.max_abs())
    });
    let second = xh.lie_derivative(&lambda);
    report.condition("tensor: [XH,L]", true, |p| {
        Ok(slice_max_abs(&second.components_at(p)?))
    });
    Ok(report.finish())
}
