//! Hamiltonian systems on decomposable tensors and the quasi-bi-Hamiltonian
//! system `⟨X1∧X2, H, XH∧X3, F⟩` built from a three-field realization.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec::Vec;

use crate::chart::{CoordinateChart, Point};
use crate::criteria::{
    check_delta, check_poisson_pair, field_max_abs, hamiltonian_condition, CriterionReport,
    ReportBuilder, VerifyConfig,
};
use crate::error::QbhError;
use crate::expr::ScalarExpr;
use crate::multivector::{BivectorSum, DecomposableBivector, VectorField};

/// `⟨J, H⟩` with every term of `J` checked to be Poisson at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSystem {
    bivector: BivectorSum,
    hamiltonian: ScalarExpr,
}

impl HamiltonianSystem {
    pub fn new(
        bivector: BivectorSum,
        hamiltonian: ScalarExpr,
        cfg: &VerifyConfig,
    ) -> Result<Self, QbhError> {
        for (c, term) in bivector.terms() {
            let report = check_poisson_pair(&term.left.scale(c), &term.right, cfg)?;
            if !report.pass {
                return Err(QbhError::NotPoisson(Box::new(report)));
            }
        }
        Ok(Self {
            bivector,
            hamiltonian,
        })
    }

    pub fn chart(&self) -> &CoordinateChart {
        self.bivector.chart()
    }

    pub fn bivector(&self) -> &BivectorSum {
        &self.bivector
    }

    pub fn hamiltonian(&self) -> &ScalarExpr {
        &self.hamiltonian
    }
}

/// `dH⌋J`
pub fn hamiltonian_vector_field(system: &HamiltonianSystem) -> VectorField {
    system.bivector.hamiltonian_field(&system.hamiltonian)
}

/// `{{F,G},K} + {{G,K},F} + {{K,F},G}` over every triple; one condition per triple.
pub fn jacobi_identity_check(
    bivector: &BivectorSum,
    triples: &[[ScalarExpr; 3]],
    cfg: &VerifyConfig,
) -> Result<CriterionReport, QbhError> {
    if triples.is_empty() {
        return Err(QbhError::NoTestFunctions);
    }
    let mut report = ReportBuilder::new("jacobi identity", cfg);
    for (k, [f, g, h]) in triples.iter().enumerate() {
        let pb = |a: &ScalarExpr, b: &ScalarExpr| bivector.poisson_bracket(a, b);
        let cyclic = ScalarExpr::sum(Vec::from([
            pb(&pb(f, g), h),
            pb(&pb(g, h), f),
            pb(&pb(h, f), g),
        ]));
        report.condition(&format!("cyclic sum, triple {}", k + 1), true, |p| {
            Ok(cyclic.evaluate(p)?.abs())
        });
    }
    Ok(report.finish())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QbhOptions {
    /// Fail with `NotAnIntegral` / `NonVanishingRho` instead of returning an inexact system.
    pub require_exact: bool,
}

impl Default for QbhOptions {
    fn default() -> Self {
        Self {
            require_exact: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuasiBiHamiltonianSystem {
    pub chart: CoordinateChart,
    pub x1: VectorField,
    pub x2: VectorField,
    pub x3: VectorField,
    /// `X1(H) X2 − X2(H) X1`
    pub xh: VectorField,
    /// `XH(F) X3 − X3(F) XH`
    pub xf: VectorField,
    pub h: ScalarExpr,
    pub f: ScalarExpr,
    /// `−X3(F)`
    pub rho: ScalarExpr,
    /// `{H,F}` for `X1∧X2`
    pub bracket_hf: ScalarExpr,
    /// `X1∧X2 + XH∧X3`
    pub composite: BivectorSum,
    pub exact: bool,
    pub bi_hamiltonian: bool,
    pub report: CriterionReport,
}

/// Assembles the system from a realization of the three-field algebra, a
/// Hamiltonian `H` with `X1(X2(H)) = 0` and a candidate integral `F`.
pub fn build_qbh(
    x1: &VectorField,
    x2: &VectorField,
    x3: &VectorField,
    h: &ScalarExpr,
    f: &ScalarExpr,
    cfg: &VerifyConfig,
    options: QbhOptions,
) -> Result<QuasiBiHamiltonianSystem, QbhError> {
    let delta = check_delta(x1, x2, x3, cfg)?;
    if !delta.pass {
        return Err(QbhError::DeltaViolated(Box::new(delta)));
    }
    let (_, condition) = hamiltonian_condition(x1, x2, h, cfg)?;
    if !condition.pass {
        return Err(QbhError::HamiltonianConditionViolated(Box::new(condition)));
    }

    let lambda = DecomposableBivector::new(x1.clone(), x2.clone());
    let xh = lambda.hamiltonian_field(h);
    let second = DecomposableBivector::new(xh.clone(), x3.clone());
    let xf = second.hamiltonian_field(f);
    let rho = x3.apply(f).neg().simplify();
    let bracket_hf = lambda.poisson_bracket(h, f);
    let tol = cfg.tol.residual;

    let mut report = ReportBuilder::new("quasi-bi-hamiltonian", cfg);
    let identity = xf.sub(&x3.scale(&bracket_hf).add(&xh.scale(&rho)));
    report.condition("XF - ({H,F} X3 + rho XH)", true, |p| {
        field_max_abs(&identity, p)
    });

    // exactness: F must be an integral of XH
    let mut worst_bracket: Option<(f64, &Point)> = None;
    for p in &cfg.points {
        if let Ok(v) = bracket_hf.evaluate(p) {
            if worst_bracket.is_none_or(|(m, _)| v.abs() > m) {
                worst_bracket = Some((v.abs(), p));
            }
        }
    }
    let worst_bracket = worst_bracket.map_or((0.0, Vec::new()), |(m, p)| (m, p.values().to_vec()));
    let exact = worst_bracket.0 <= tol;
    if options.require_exact && !exact {
        return Err(QbhError::NotAnIntegral {
            residual: worst_bracket.0,
            point: worst_bracket.1,
        });
    }
    report.condition("{H,F}", options.require_exact, |p| {
        Ok(bracket_hf.evaluate(p)?.abs())
    });

    // ρ must keep one sign and stay away from zero
    let mut min_abs: Option<(f64, Vec<f64>)> = None;
    let mut signs = (false, false);
    for p in &cfg.points {
        if let Ok(v) = rho.evaluate(p) {
            signs.0 |= v > 0.0;
            signs.1 |= v < 0.0;
            if min_abs.as_ref().is_none_or(|(m, _)| v.abs() < *m) {
                min_abs = Some((v.abs(), p.values().to_vec()));
            }
        }
    }
    let (rho_min, rho_point) = min_abs.unwrap_or((0.0, Vec::new()));
    let sign_change = signs.0 && signs.1;
    if options.require_exact && (rho_min < cfg.tol.guard_eps || sign_change) {
        return Err(QbhError::NonVanishingRho {
            min_abs: rho_min,
            point: rho_point,
            sign_change,
        });
    }
    report.note(format!("min |rho| = {rho_min:e}"));

    let scaled = xf.sub(&xh.scale(&rho));
    report.condition("XF - rho XH", exact, |p| field_max_abs(&scaled, p));
    let xf_f = xf.apply(f);
    report.condition("XF(F)", true, |p| Ok(xf_f.evaluate(p)?.abs()));
    let singular = x3.apply(f).add(&ScalarExpr::one()).simplify();
    report.condition("X3(F) + 1", false, |p| Ok(singular.evaluate(p)?.abs()));
    let bi_max = cfg
        .points
        .iter()
        .filter_map(|p| singular.evaluate(p).ok())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let bi_hamiltonian = exact && bi_max <= tol;
    let difference = xf.sub(&xh);
    report.condition("XF - XH", bi_hamiltonian, |p| field_max_abs(&difference, p));
    if !exact {
        report.note("{H,F} does not vanish: the rescaled field is not XF");
    }

    let composite = BivectorSum::from_terms(
        x1.chart(),
        Vec::from([(ScalarExpr::one(), lambda), (ScalarExpr::one(), second)]),
    );
    Ok(QuasiBiHamiltonianSystem {
        chart: x1.chart().clone(),
        x1: x1.clone(),
        x2: x2.clone(),
        x3: x3.clone(),
        xh,
        xf,
        h: h.clone(),
        f: f.clone(),
        rho,
        bracket_hf,
        composite,
        exact,
        bi_hamiltonian,
        report: report.finish(),
    })
}
