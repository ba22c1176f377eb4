use super::{Func, Node, ScalarExpr};
use crate::chart::Point;
use crate::error::{DomainError, DomainErrorKind};

impl ScalarExpr {
    /// Value at `point`. Point and expression must share a chart; indices
    /// outside the point are a programming error and panic.
    pub fn evaluate(&self, point: &Point) -> Result<f64, DomainError> {
        self.evaluate_values(point.values())
    }

    /// Value at raw coordinate values.
    pub fn evaluate_values(&self, values: &[f64]) -> Result<f64, DomainError> {
        let fail = |kind| DomainError {
            kind,
            node: self.clone(),
        };
        let value = match self.node() {
            Node::Const(c) => *c,
            Node::Coord(i) => values[*i],
            Node::Neg(a) => -a.evaluate_values(values)?,
            Node::Sum(terms) => {
                let mut acc = 0.0;
                for t in terms {
                    acc += t.evaluate_values(values)?;
                }
                acc
            }
            Node::Product(factors) => {
                let mut acc = 1.0;
                for f in factors {
                    acc *= f.evaluate_values(values)?;
                }
                acc
            }
            Node::Quotient(a, b) => {
                let num = a.evaluate_values(values)?;
                let den = b.evaluate_values(values)?;
                if den == 0.0 {
                    return Err(fail(DomainErrorKind::DivisionByZero));
                }
                num / den
            }
            Node::Power(a, b) => {
                let base = a.evaluate_values(values)?;
                let exponent = b.evaluate_values(values)?;
                if base == 0.0 && exponent < 0.0 {
                    return Err(fail(DomainErrorKind::DivisionByZero));
                }
                if base < 0.0 && libm::trunc(exponent) != exponent {
                    return Err(fail(DomainErrorKind::NegativeBaseFractionalPower));
                }
                libm::pow(base, exponent)
            }
            Node::Func(func, a) => {
                let x = a.evaluate_values(values)?;
                match func {
                    Func::Sin => libm::sin(x),
                    Func::Cos => libm::cos(x),
                    Func::Tan => libm::tan(x),
                    Func::Exp => libm::exp(x),
                    Func::Ln => {
                        if x <= 0.0 {
                            return Err(fail(DomainErrorKind::LogOfNonPositive));
                        }
                        libm::log(x)
                    }
                    Func::Sqrt => {
                        if x < 0.0 {
                            return Err(fail(DomainErrorKind::SqrtOfNegative));
                        }
                        libm::sqrt(x)
                    }
                    Func::Atan => libm::atan(x),
                }
            }
            Node::Atan2(y, x) => {
                let yv = y.evaluate_values(values)?;
                let xv = x.evaluate_values(values)?;
                if yv == 0.0 && xv == 0.0 {
                    return Err(fail(DomainErrorKind::Atan2Origin));
                }
                libm::atan2(yv, xv)
            }
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(fail(DomainErrorKind::NonFinite))
        }
    }
}
