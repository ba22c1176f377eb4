use alloc::vec::Vec;

use super::{Func, Node, ScalarExpr};
use crate::chart::CoordinateChart;
use crate::error::ChartError;

impl ScalarExpr {
    /// Partial derivative with respect to the coordinate named `name`.
    pub fn differentiate(
        &self,
        chart: &CoordinateChart,
        name: &str,
    ) -> Result<ScalarExpr, ChartError> {
        let index = chart
            .index_of(name)
            .ok_or_else(|| ChartError::UnknownCoordinate(name.into()))?;
        Ok(self.partial(index))
    }

    /// Simplified partial derivative with respect to coordinate `index`.
    pub fn partial(&self, index: usize) -> ScalarExpr {
        self.partial_raw(index).simplify()
    }

    fn partial_raw(&self, index: usize) -> ScalarExpr {
        if !self.depends_on(index) {
            return ScalarExpr::zero();
        }
        match self.node() {
            Node::Const(_) => ScalarExpr::zero(),
            Node::Coord(i) => ScalarExpr::constant(if *i == index { 1.0 } else { 0.0 }),
            Node::Neg(a) => a.partial_raw(index).neg(),
            Node::Sum(terms) => {
                ScalarExpr::sum(terms.iter().map(|t| t.partial_raw(index)).collect())
            }
            Node::Product(factors) => {
                let mut terms = Vec::with_capacity(factors.len());
                for (k, f) in factors.iter().enumerate() {
                    let df = f.partial_raw(index);
                    if df.is_zero() {
                        continue;
                    }
                    let mut parts: Vec<ScalarExpr> = Vec::with_capacity(factors.len());
                    parts.extend(factors[..k].iter().cloned());
                    parts.push(df);
                    parts.extend(factors[k + 1..].iter().cloned());
                    terms.push(ScalarExpr::product(parts));
                }
                ScalarExpr::sum(terms)
            }
            Node::Quotient(a, b) => {
                let da = a.partial_raw(index);
                let db = b.partial_raw(index);
                if db.is_zero() {
                    return da.div(b);
                }
                (da * b - a * db).div(&b.powi(2))
            }
            Node::Power(base, exponent) => {
                let db = base.partial_raw(index);
                let de = exponent.partial_raw(index);
                if de.is_zero() {
                    // d(b^c) = c b^(c-1) db
                    let reduced = exponent - ScalarExpr::one();
                    return ScalarExpr::product(alloc::vec![
                        exponent.clone(),
                        base.pow(&reduced),
                        db
                    ]);
                }
                // d(b^e) = b^e (de ln b + e db / b)
                let log_term = de * base.ln();
                let base_term = if db.is_zero() {
                    ScalarExpr::zero()
                } else {
                    (exponent * db).div(base)
                };
                self * (log_term + base_term)
            }
            Node::Func(func, a) => {
                let da = a.partial_raw(index);
                let outer = match func {
                    Func::Sin => a.cos(),
                    Func::Cos => a.sin().neg(),
                    Func::Tan => ScalarExpr::one() + self.powi(2),
                    Func::Exp => self.clone(),
                    Func::Ln => return da.div(a),
                    Func::Sqrt => return da.div(&(ScalarExpr::constant(2.0) * self)),
                    Func::Atan => return da.div(&(ScalarExpr::one() + a.powi(2))),
                };
                outer * da
            }
            Node::Atan2(y, x) => {
                // d atan2(y, x) = (x dy - y dx) / (x^2 + y^2)
                let dy = y.partial_raw(index);
                let dx = x.partial_raw(index);
                (x * dy - y * dx).div(&(x.powi(2) + y.powi(2)))
            }
        }
    }

    pub fn depends_on(&self, index: usize) -> bool {
        match self.node() {
            Node::Const(_) => false,
            Node::Coord(i) => *i == index,
            Node::Neg(a) | Node::Func(_, a) => a.depends_on(index),
            Node::Sum(terms) | Node::Product(terms) => terms.iter().any(|t| t.depends_on(index)),
            Node::Quotient(a, b) | Node::Power(a, b) | Node::Atan2(a, b) => {
                a.depends_on(index) || b.depends_on(index)
            }
        }
    }
}
