use alloc::format;

use crate::expr::ScalarExpr;
use crate::multivector::VectorField;
use crate::numeric::{fd_apply_field, fd_lie_bracket, FD_STEP};

use super::report::{CriterionReport, ReportBuilder};
use super::VerifyConfig;

/// Symbolic brackets of every pair of `fields` and every `X(f)` against
/// central differences, at the finite-difference tolerance.
pub fn oracle_agreement(
    fields: &[(&str, &VectorField)],
    functions: &[(&str, &ScalarExpr)],
    cfg: &VerifyConfig,
) -> CriterionReport {
    let mut report = ReportBuilder::with_tolerance("finite-difference oracle", cfg, cfg.tol.fd);
    for (i, (xn, x)) in fields.iter().enumerate() {
        for (yn, y) in &fields[i + 1..] {
            let symbolic = x.lie_bracket(y);
            report.condition(&format!("[{xn},{yn}]"), true, |p| {
                let fd = fd_lie_bracket(x, y, p, FD_STEP)?;
                let sym = symbolic.values_at(p)?;
                Ok(fd
                    .iter()
                    .zip(&sym)
                    .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
            });
        }
    }
    for (xn, x) in fields {
        for (fname, f) in functions {
            let symbolic = x.apply(f);
            report.condition(&format!("{xn}({fname})"), true, |p| {
                Ok((fd_apply_field(x, f, p, FD_STEP)? - symbolic.evaluate(p)?).abs())
            });
        }
    }
    report.finish()
}
