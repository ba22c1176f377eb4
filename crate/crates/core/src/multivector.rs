//! Vector fields and wedge-monomial multivectors.
//!
//! Bivectors and trivectors are kept as sums of wedge products of vector
//! fields; dense component arrays only exist at evaluation points.

use alloc::vec;
use alloc::vec::Vec;

use crate::chart::{CoordinateChart, Point};
use crate::error::{DomainError, FieldError};
use crate::expr::ScalarExpr;

/// `Σ Xⁱ ∂/∂xⁱ` with one component per chart coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    chart: CoordinateChart,
    components: Vec<ScalarExpr>,
}

impl VectorField {
    pub fn new(chart: &CoordinateChart, components: Vec<ScalarExpr>) -> Result<Self, FieldError> {
        let n = chart.dimension();
        if components.len() != n {
            return Err(FieldError::ComponentCount {
                expected: n,
                found: components.len(),
            });
        }
        if let Some(index) = components.iter().filter_map(ScalarExpr::max_coord).max() {
            if index >= n {
                return Err(FieldError::CoordinateOutOfRange {
                    index,
                    dimension: n,
                });
            }
        }
        Ok(Self {
            chart: chart.clone(),
            components,
        })
    }

    pub fn zero(chart: &CoordinateChart) -> Self {
        Self {
            chart: chart.clone(),
            components: vec![ScalarExpr::zero(); chart.dimension()],
        }
    }

    /// The coordinate field `∂/∂x_index`.
    pub fn coordinate(chart: &CoordinateChart, index: usize) -> Self {
        let mut field = Self::zero(chart);
        field.components[index] = ScalarExpr::one();
        field
    }

    pub fn chart(&self) -> &CoordinateChart {
        &self.chart
    }

    pub fn components(&self) -> &[ScalarExpr] {
        &self.components
    }

    pub fn component(&self, index: usize) -> &ScalarExpr {
        &self.components[index]
    }

    pub fn is_syntactically_zero(&self) -> bool {
        self.components.iter().all(ScalarExpr::is_zero)
    }

    fn map(&self, f: impl Fn(&ScalarExpr) -> ScalarExpr) -> Self {
        Self {
            chart: self.chart.clone(),
            components: self.components.iter().map(f).collect(),
        }
    }

    fn zip(&self, other: &Self, f: impl Fn(&ScalarExpr, &ScalarExpr) -> ScalarExpr) -> Self {
        debug_assert!(self.chart == other.chart, "fields on different charts");
        Self {
            chart: self.chart.clone(),
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    pub fn scale(&self, factor: &ScalarExpr) -> Self {
        self.map(|c| (factor * c).simplify())
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| (a + b).simplify())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| (a - b).simplify())
    }

    pub fn neg(&self) -> Self {
        self.map(|c| c.neg())
    }

    /// Directional derivative `X(f) = Σ Xⁱ ∂f/∂xⁱ`.
    pub fn apply(&self, f: &ScalarExpr) -> ScalarExpr {
        let terms = self
            .components
            .iter()
            .enumerate()
            .filter(|(i, c)| !c.is_zero() && f.depends_on(*i))
            .map(|(i, c)| c * f.partial(i))
            .collect();
        ScalarExpr::sum(terms).simplify()
    }

    /// `[X, Y]ⁱ = X(Yⁱ) − Y(Xⁱ)`
    pub fn lie_bracket(&self, other: &Self) -> Self {
        self.zip(other, |x, y| (self.apply(y) - other.apply(x)).simplify())
    }

    /// Lie derivative of `left ∧ right` along `self`: `[X,Y]∧Z + Y∧[X,Z]`.
    pub fn lie_derivative(&self, bivector: &DecomposableBivector) -> BivectorSum {
        BivectorSum::from_terms(
            &self.chart,
            vec![
                (
                    ScalarExpr::one(),
                    DecomposableBivector::new(
                        self.lie_bracket(&bivector.left),
                        bivector.right.clone(),
                    ),
                ),
                (
                    ScalarExpr::one(),
                    DecomposableBivector::new(
                        bivector.left.clone(),
                        self.lie_bracket(&bivector.right),
                    ),
                ),
            ],
        )
    }

    pub fn values_at(&self, point: &Point) -> Result<Vec<f64>, DomainError> {
        self.components.iter().map(|c| c.evaluate(point)).collect()
    }

    pub fn check_same_chart(&self, other: &Self) -> Result<(), FieldError> {
        if self.chart == other.chart {
            Ok(())
        } else {
            Err(FieldError::ChartMismatch)
        }
    }
}

/// `left ∧ right`
#[derive(Debug, Clone, PartialEq)]
pub struct DecomposableBivector {
    pub left: VectorField,
    pub right: VectorField,
}

impl DecomposableBivector {
    pub fn new(left: VectorField, right: VectorField) -> Self {
        debug_assert!(
            left.chart == right.chart,
            "wedge of fields on different charts"
        );
        Self { left, right }
    }

    pub fn chart(&self) -> &CoordinateChart {
        self.left.chart()
    }

    /// `dH⌋(X∧Y) = X(H)·Y − Y(H)·X`
    pub fn hamiltonian_field(&self, h: &ScalarExpr) -> VectorField {
        let xh = self.left.apply(h);
        let yh = self.right.apply(h);
        self.right.scale(&xh).sub(&self.left.scale(&yh))
    }

    /// `{F, G} = X(F)Y(G) − Y(F)X(G)`
    pub fn poisson_bracket(&self, f: &ScalarExpr, g: &ScalarExpr) -> ScalarExpr {
        let (x, y) = (&self.left, &self.right);
        (x.apply(f) * y.apply(g) - y.apply(f) * x.apply(g)).simplify()
    }

    /// `Bⁱʲ = XⁱYʲ − XʲYⁱ`, row-major `n×n`.
    pub fn components_at(&self, point: &Point) -> Result<Vec<f64>, DomainError> {
        let x = self.left.values_at(point)?;
        let y = self.right.values_at(point)?;
        let n = x.len();
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = x[i] * y[j] - x[j] * y[i];
            }
        }
        Ok(out)
    }

    pub fn into_sum(self) -> BivectorSum {
        let chart = self.chart().clone();
        BivectorSum::from_terms(&chart, vec![(ScalarExpr::one(), self)])
    }
}

/// `Σ cₖ Xₖ∧Yₖ`; the empty sum is the zero bivector.
#[derive(Debug, Clone, PartialEq)]
pub struct BivectorSum {
    chart: CoordinateChart,
    terms: Vec<(ScalarExpr, DecomposableBivector)>,
}

impl BivectorSum {
    pub fn zero(chart: &CoordinateChart) -> Self {
        Self {
            chart: chart.clone(),
            terms: Vec::new(),
        }
    }

    /// Terms with a syntactically zero coefficient are dropped.
    pub fn from_terms(
        chart: &CoordinateChart,
        terms: Vec<(ScalarExpr, DecomposableBivector)>,
    ) -> Self {
        Self {
            chart: chart.clone(),
            terms: terms.into_iter().filter(|(c, _)| !c.is_zero()).collect(),
        }
    }

    pub fn chart(&self) -> &CoordinateChart {
        &self.chart
    }

    pub fn terms(&self) -> &[(ScalarExpr, DecomposableBivector)] {
        &self.terms
    }

    pub fn push(&mut self, coefficient: ScalarExpr, term: DecomposableBivector) {
        if !coefficient.is_zero() {
            self.terms.push((coefficient, term));
        }
    }

    pub fn poisson_bracket(&self, f: &ScalarExpr, g: &ScalarExpr) -> ScalarExpr {
        let terms = self
            .terms
            .iter()
            .map(|(c, b)| c * b.poisson_bracket(f, g))
            .collect();
        ScalarExpr::sum(terms).simplify()
    }

    /// `dH⌋B`, summed over terms.
    pub fn hamiltonian_field(&self, h: &ScalarExpr) -> VectorField {
        self.terms
            .iter()
            .fold(VectorField::zero(&self.chart), |acc, (c, b)| {
                acc.add(&b.hamiltonian_field(h).scale(c))
            })
    }

    pub fn components_at(&self, point: &Point) -> Result<Vec<f64>, DomainError> {
        let n = self.chart.dimension();
        let mut out = vec![0.0; n * n];
        for (c, b) in &self.terms {
            let c = c.evaluate(point)?;
            for (o, v) in out.iter_mut().zip(b.components_at(point)?) {
                *o += c * v;
            }
        }
        Ok(out)
    }
}

/// `Σ cₖ Uₖ∧Vₖ∧Wₖ`
#[derive(Debug, Clone, PartialEq)]
pub struct TrivectorSum {
    chart: CoordinateChart,
    terms: Vec<(ScalarExpr, [VectorField; 3])>,
}

impl TrivectorSum {
    pub fn zero(chart: &CoordinateChart) -> Self {
        Self {
            chart: chart.clone(),
            terms: Vec::new(),
        }
    }

    pub fn from_terms(chart: &CoordinateChart, terms: Vec<(ScalarExpr, [VectorField; 3])>) -> Self {
        Self {
            chart: chart.clone(),
            terms: terms.into_iter().filter(|(c, _)| !c.is_zero()).collect(),
        }
    }

    pub fn chart(&self) -> &CoordinateChart {
        &self.chart
    }

    pub fn terms(&self) -> &[(ScalarExpr, [VectorField; 3])] {
        &self.terms
    }

    pub fn push(&mut self, coefficient: ScalarExpr, fields: [VectorField; 3]) {
        if !coefficient.is_zero() {
            self.terms.push((coefficient, fields));
        }
    }

    /// `self − other`
    pub fn difference(&self, other: &TrivectorSum) -> TrivectorSum {
        let mut out = self.clone();
        for (c, f) in &other.terms {
            out.push(c.neg(), f.clone());
        }
        out
    }

    /// Antisymmetric components `Tⁱʲᵏ = Σ c·det[U V W]` restricted to rows i, j, k.
    pub fn components_at(&self, point: &Point) -> Result<TrivectorComponents, DomainError> {
        let n = self.chart.dimension();
        let mut out = TrivectorComponents::zero(n);
        for (c, [u, v, w]) in &self.terms {
            let c = c.evaluate(point)?;
            let (u, v, w) = (
                u.values_at(point)?,
                v.values_at(point)?,
                w.values_at(point)?,
            );
            for i in 0..n {
                for j in i + 1..n {
                    for k in j + 1..n {
                        let det = u[i] * (v[j] * w[k] - v[k] * w[j])
                            - u[j] * (v[i] * w[k] - v[k] * w[i])
                            + u[k] * (v[i] * w[j] - v[j] * w[i]);
                        out.add_ordered(i, j, k, c * det);
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Dense antisymmetric 3-index array.
#[derive(Debug, Clone, PartialEq)]
pub struct TrivectorComponents {
    dimension: usize,
    data: Vec<f64>,
}

impl TrivectorComponents {
    pub fn zero(dimension: usize) -> Self {
        Self {
            dimension,
            data: vec![0.0; dimension * dimension * dimension],
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    fn slot(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dimension + j) * self.dimension + k
    }

    /// Adds `value` at `(i, j, k)` with `i < j < k` and at every permutation with its sign.
    fn add_ordered(&mut self, i: usize, j: usize, k: usize, value: f64) {
        for (a, b, c, sign) in [
            (i, j, k, 1.0),
            (j, k, i, 1.0),
            (k, i, j, 1.0),
            (j, i, k, -1.0),
            (i, k, j, -1.0),
            (k, j, i, -1.0),
        ] {
            let s = self.slot(a, b, c);
            self.data[s] += sign * value;
        }
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[self.slot(i, j, k)]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Schouten bracket of two decomposable bivectors:
/// `⌈X∧Y, Z∧W⌉ = [X,Z]∧Y∧W − [X,W]∧Y∧Z − [Y,Z]∧X∧W + [Y,W]∧X∧Z`.
pub fn schouten_bracket(a: &DecomposableBivector, b: &DecomposableBivector) -> TrivectorSum {
    let (x, y) = (&a.left, &a.right);
    let (z, w) = (&b.left, &b.right);
    let one = ScalarExpr::one();
    let minus = ScalarExpr::constant(-1.0);
    let mut out = TrivectorSum::zero(a.chart());
    let mut push = |c: &ScalarExpr, bracket: VectorField, p: &VectorField, q: &VectorField| {
        if !bracket.is_syntactically_zero() {
            out.push(c.clone(), [bracket, p.clone(), q.clone()]);
        }
    };
    push(&one, x.lie_bracket(z), y, w);
    push(&minus, x.lie_bracket(w), y, z);
    push(&minus, y.lie_bracket(z), x, w);
    push(&one, y.lie_bracket(w), x, z);
    out
}

/// `X∧B` for a decomposable bivector `B`.
pub fn wedge_field_bivector(x: &VectorField, b: &DecomposableBivector) -> TrivectorSum {
    TrivectorSum::from_terms(
        x.chart(),
        vec![(
            ScalarExpr::one(),
            [x.clone(), b.left.clone(), b.right.clone()],
        )],
    )
}
