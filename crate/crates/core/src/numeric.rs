//! Sampling, tolerances and the finite-difference oracle.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chart::{CoordinateChart, Point};
use crate::error::{DomainError, DomainSetupError};
use crate::expr::ScalarExpr;
use crate::multivector::VectorField;

/// Identity of the point generator, recorded in reports.
pub const GENERATOR: &str = "rand_chacha::ChaCha8Rng::seed_from_u64 (rand 0.8 uniform f64)";

/// Relative step used by the oracle: `h_c = FD_STEP * max(1, |p_c|)`.
pub const FD_STEP: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceConfig {
    pub residual: f64,
    pub fd: f64,
    pub independence: f64,
    pub guard_eps: f64,
    pub max_skip_fraction: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            residual: 1e-9,
            fd: 1e-5,
            independence: 1e-10,
            guard_eps: 1e-6,
            max_skip_fraction: 0.1,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<(), DomainSetupError> {
        let positive = [
            (self.residual, "residual"),
            (self.fd, "fd"),
            (self.independence, "independence"),
            (self.guard_eps, "guard_eps"),
        ];
        for (value, name) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(DomainSetupError::InvalidTolerance(name));
            }
        }
        if !(0.0..=1.0).contains(&self.max_skip_fraction) {
            return Err(DomainSetupError::InvalidTolerance("max_skip_fraction"));
        }
        Ok(())
    }
}

/// A sampled point is kept only if `|expr(p)| >= min_abs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Guard {
    pub expr: ScalarExpr,
    pub min_abs: f64,
}

impl Guard {
    pub fn admits(&self, point: &Point) -> bool {
        matches!(self.expr.evaluate(point), Ok(v) if v.abs() >= self.min_abs)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleDomain {
    chart: CoordinateChart,
    intervals: Vec<(f64, f64)>,
    guards: Vec<Guard>,
    samples: usize,
    seed: u64,
}

impl SampleDomain {
    pub fn new(
        chart: &CoordinateChart,
        intervals: Vec<(f64, f64)>,
        samples: usize,
        seed: u64,
    ) -> Result<Self, DomainSetupError> {
        if intervals.len() != chart.dimension() {
            return Err(DomainSetupError::BoxDimension {
                expected: chart.dimension(),
                found: intervals.len(),
            });
        }
        for (i, (lo, hi)) in intervals.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(DomainSetupError::EmptyInterval(chart.name(i).into()));
            }
        }
        if samples == 0 {
            return Err(DomainSetupError::NoSamples);
        }
        Ok(Self {
            chart: chart.clone(),
            intervals,
            guards: Vec::new(),
            samples,
            seed,
        })
    }

    pub fn with_guard(mut self, expr: ScalarExpr, min_abs: f64) -> Self {
        self.guards.push(Guard { expr, min_abs });
        self
    }

    pub fn with_samples(mut self, samples: usize) -> Result<Self, DomainSetupError> {
        if samples == 0 {
            return Err(DomainSetupError::NoSamples);
        }
        self.samples = samples;
        Ok(self)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn chart(&self) -> &CoordinateChart {
        &self.chart
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn guards(&self) -> &[Guard] {
        &self.guards
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn admits(&self, point: &Point) -> bool {
        self.guards.iter().all(|g| g.admits(point))
    }
}

/// Uniform rejection sampling over the box; at most `100 × samples` draws.
pub fn sample_points(domain: &SampleDomain) -> Result<Vec<Point>, DomainSetupError> {
    let mut rng = ChaCha8Rng::seed_from_u64(domain.seed);
    let budget = domain.samples.saturating_mul(100);
    let mut points = Vec::with_capacity(domain.samples);
    let mut attempts = 0;
    while points.len() < domain.samples {
        if attempts == budget {
            return Err(DomainSetupError::GuardTooRestrictive {
                requested: domain.samples,
                accepted: points.len(),
                attempts,
            });
        }
        attempts += 1;
        let values: Vec<f64> = domain
            .intervals
            .iter()
            .map(|&(lo, hi)| rng.gen_range(lo..=hi))
            .collect();
        let point = Point::new(domain.chart.clone(), values).expect("sampled values are finite");
        if domain.admits(&point) {
            points.push(point);
        }
    }
    Ok(points)
}

fn step(point: &Point, index: usize, h: f64) -> f64 {
    h * point.values()[index].abs().max(1.0)
}

/// Central difference `∂f/∂x_index` with step `h·max(1, |p_index|)`.
pub fn fd_partial(f: &ScalarExpr, point: &Point, index: usize, h: f64) -> Result<f64, DomainError> {
    let h = step(point, index, h);
    let plus = f.evaluate(&point.shifted(index, h))?;
    let minus = f.evaluate(&point.shifted(index, -h))?;
    Ok((plus - minus) / (2.0 * h))
}

/// Oracle for [`VectorField::apply`]: `Σ Xⁱ(p)·(f(p+hᵢeᵢ) − f(p−hᵢeᵢ))/(2hᵢ)`.
pub fn fd_apply_field(
    x: &VectorField,
    f: &ScalarExpr,
    point: &Point,
    h: f64,
) -> Result<f64, DomainError> {
    let mut acc = 0.0;
    for (i, c) in x.components().iter().enumerate() {
        let xi = c.evaluate(point)?;
        if xi != 0.0 {
            acc += xi * fd_partial(f, point, i, h)?;
        }
    }
    Ok(acc)
}

/// Oracle for [`VectorField::lie_bracket`]: componentwise `X(Yⁱ) − Y(Xⁱ)` by central differences.
pub fn fd_lie_bracket(
    x: &VectorField,
    y: &VectorField,
    point: &Point,
    h: f64,
) -> Result<Vec<f64>, DomainError> {
    x.components()
        .iter()
        .zip(y.components())
        .map(|(xi, yi)| Ok(fd_apply_field(x, yi, point, h)? - fd_apply_field(y, xi, point, h)?))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::DomainSetupError;
    use crate::expr::parse_expression;

    fn chart3() -> CoordinateChart {
        CoordinateChart::new(["x", "y", "z"]).unwrap()
    }

    #[test]
    fn sampling_is_deterministic() {
        let c = chart3();
        let d = SampleDomain::new(&c, alloc::vec![(0.0, 1.0); 3], 10, 42).unwrap();
        let a = sample_points(&d).unwrap();
        let b = sample_points(&d).unwrap();
        assert_eq!(a.len(), 10);
        assert_eq!(a, b);
        for p in &a {
            assert!(p.values().iter().all(|v| (0.0..=1.0).contains(v)));
        }
        let other = sample_points(&d.clone().with_seed(43)).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn guards_are_respected() {
        let c = CoordinateChart::new(["x1"]).unwrap();
        let d = SampleDomain::new(&c, alloc::vec![(-1.0, 1.0)], 50, 7)
            .unwrap()
            .with_guard(ScalarExpr::coord(0), 0.5);
        for p in sample_points(&d).unwrap() {
            assert!(p.values()[0].abs() >= 0.5);
        }
    }

    #[test]
    fn infeasible_guard_is_reported() {
        let c = CoordinateChart::new(["x1"]).unwrap();
        let d = SampleDomain::new(&c, alloc::vec![(0.0, 1.0)], 5, 1)
            .unwrap()
            .with_guard(ScalarExpr::coord(0), 2.0);
        assert_eq!(
            sample_points(&d),
            Err(DomainSetupError::GuardTooRestrictive {
                requested: 5,
                accepted: 0,
                attempts: 500
            })
        );
    }

    #[test]
    fn domain_validation() {
        let c = chart3();
        assert!(matches!(
            SampleDomain::new(&c, alloc::vec![(0.0, 1.0); 2], 1, 0),
            Err(DomainSetupError::BoxDimension { .. })
        ));
        assert!(matches!(
            SampleDomain::new(&c, alloc::vec![(1.0, 1.0); 3], 1, 0),
            Err(DomainSetupError::EmptyInterval(_))
        ));
        assert_eq!(
            SampleDomain::new(&c, alloc::vec![(0.0, 1.0); 3], 0, 0),
            Err(DomainSetupError::NoSamples)
        );
        let bad = ToleranceConfig {
            max_skip_fraction: 1.5,
            ..ToleranceConfig::default()
        };
        assert!(bad.validate().is_err());
        assert!(ToleranceConfig::default().validate().is_ok());
    }

    #[test]
    fn fd_apply_field_examples() {
        let c = chart3();
        let p = c.point(&[0.3, -0.2, 0.0]).unwrap();
        let dz = VectorField::coordinate(&c, 2);
        let constant = ScalarExpr::constant(4.0);
        assert_eq!(fd_apply_field(&dz, &constant, &p, FD_STEP).unwrap(), 0.0);
        let expz = parse_expression("exp(z)", &c).unwrap();
        let v = fd_apply_field(&dz, &expz, &p, FD_STEP).unwrap();
        assert!((v - 1.0).abs() < 1e-9);
    }

    #[test]
    fn fd_bracket_of_exp_fixture() {
        let c = chart3();
        let x1 = VectorField::new(
            &c,
            alloc::vec![
                parse_expression("exp(z)", &c).unwrap(),
                ScalarExpr::one(),
                ScalarExpr::zero()
            ],
        )
        .unwrap();
        let x3 = VectorField::coordinate(&c, 2);
        let p = c.point(&[0.0, 0.0, 0.0]).unwrap();
        let b = fd_lie_bracket(&x3, &x1, &p, FD_STEP).unwrap();
        assert!((b[0] - 1.0).abs() < 1e-9);
        assert!(b[1].abs() < 1e-9 && b[2].abs() < 1e-9);
        let xx = fd_lie_bracket(&x1, &x1, &p, FD_STEP).unwrap();
        assert!(xx.iter().all(|v| v.abs() < 1e-9));
    }
}
