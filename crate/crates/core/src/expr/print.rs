use core::fmt;

use super::{Node, ScalarExpr};
use crate::chart::CoordinateChart;

/// Formats an expression in the input grammar; the output parses back to an
/// equal value.
pub struct Display<'a> {
    expr: &'a ScalarExpr,
    chart: &'a CoordinateChart,
}

impl<'a> Display<'a> {
    pub(super) fn new(expr: &'a ScalarExpr, chart: &'a CoordinateChart) -> Self {
        Self { expr, chart }
    }
}

// Binding strength; a child is parenthesized when weaker than required.
const SUM: u8 = 1;
const PRODUCT: u8 = 2;
const UNARY: u8 = 3;
const POWER: u8 = 4;
const ATOM: u8 = 5;

fn precedence(e: &ScalarExpr) -> u8 {
    match e.node() {
        Node::Const(c) if *c < 0.0 => UNARY,
        Node::Const(_) | Node::Coord(_) | Node::Func(_, _) | Node::Atan2(_, _) => ATOM,
        Node::Neg(_) => UNARY,
        Node::Sum(_) => SUM,
        Node::Product(_) | Node::Quotient(_, _) => PRODUCT,
        Node::Power(_, _) => POWER,
    }
}

impl Display<'_> {
    fn child(&self, e: &ScalarExpr, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if precedence(e) < min {
            f.write_str("(")?;
            self.write(e, f)?;
            f.write_str(")")
        } else {
            self.write(e, f)
        }
    }

    fn write(&self, e: &ScalarExpr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match e.node() {
            Node::Const(c) => write!(f, "{c}"),
            Node::Coord(i) => f.write_str(self.chart.name(*i)),
            Node::Neg(a) => {
                f.write_str("-")?;
                self.child(a, POWER, f)
            }
            Node::Sum(terms) => {
                for (k, t) in terms.iter().enumerate() {
                    match t.node() {
                        Node::Neg(a) if k > 0 => {
                            f.write_str(" - ")?;
                            self.child(a, PRODUCT, f)?;
                        }
                        _ => {
                            if k > 0 {
                                f.write_str(" + ")?;
                            }
                            self.child(t, SUM + 1, f)?;
                        }
                    }
                }
                Ok(())
            }
            Node::Product(factors) => {
                for (k, t) in factors.iter().enumerate() {
                    if k > 0 {
                        f.write_str("*")?;
                    }
                    // later factors must not start with a sign
                    self.child(t, if k == 0 { PRODUCT } else { POWER }, f)?;
                }
                Ok(())
            }
            Node::Quotient(a, b) => {
                self.child(a, PRODUCT, f)?;
                f.write_str("/")?;
                self.child(b, POWER, f)
            }
            Node::Power(a, b) => {
                self.child(a, ATOM, f)?;
                f.write_str("^")?;
                self.child(b, UNARY, f)
            }
            Node::Func(func, a) => {
                write!(f, "{}(", func.name())?;
                self.write(a, f)?;
                f.write_str(")")
            }
            Node::Atan2(y, x) => {
                f.write_str("atan2(")?;
                self.write(y, f)?;
                f.write_str(", ")?;
                self.write(x, f)?;
                f.write_str(")")
            }
        }
    }
}

impl fmt::Display for Display<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(self.expr, f)
    }
}
