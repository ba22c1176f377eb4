//! Pointwise tests of the bracket relations behind decomposable Poisson pairs.
//!
//! Every check evaluates residual expressions at sampled points and reports
//! the worst value per condition. Span membership is decided by pointwise
//! least squares; the symbolic side never decides equality to zero.

use alloc::vec::Vec;

use crate::chart::Point;
use crate::error::{CriteriaError, DomainSetupError};
use crate::numeric::{sample_points, SampleDomain, ToleranceConfig};

mod brackets;
mod hamiltonian;
mod jacobi;
mod linear;
mod oracle;
mod report;
mod span;
mod structure;

pub use brackets::{check_automorphism, check_compatibility, check_delta, check_poisson_pair};
pub use hamiltonian::{
    hamiltonian_condition, hojman_check, separable_hamiltonian, HojmanReduction,
};
pub use jacobi::{check_jacobi, JACOBI_SIGN};
pub use linear::{check_linear_candidate, linear_realization, LinearRealization};
pub use oracle::oracle_agreement;
pub(crate) use report::{field_max_abs, ReportBuilder};
pub use report::{ConditionReport, CriterionReport};
pub use span::{span_expand, SpanDecomposition, SpanPoint};
pub use structure::{
    structure_coefficients, structure_residuals, FreeCoefficients, StructureCoefficients,
    StructureComparison,
};

/// Sampled points plus tolerances: everything a check needs besides its operands.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub points: Vec<Point>,
    pub tol: ToleranceConfig,
}

impl VerifyConfig {
    pub fn new(points: Vec<Point>, tol: ToleranceConfig) -> Self {
        Self { points, tol }
    }

    pub fn sample(domain: &SampleDomain, tol: ToleranceConfig) -> Result<Self, DomainSetupError> {
        tol.validate()?;
        Ok(Self::new(sample_points(domain)?, tol))
    }
}

/// Fails when dependent points exceed the allowed fraction.
pub(crate) fn require_independence(
    mask: &[bool],
    context: &str,
    cfg: &VerifyConfig,
) -> Result<usize, CriteriaError> {
    let skipped = mask.iter().filter(|ok| !**ok).count();
    let total = mask.len();
    if total == 0 || skipped as f64 > cfg.tol.max_skip_fraction * total as f64 {
        return Err(CriteriaError::DegenerateBasis {
            context: context.into(),
            skipped,
            total,
        });
    }
    Ok(skipped)
}
