//! Scalar expressions over the coordinates of a chart.
//!
//! Expressions refer to coordinates by index; a [`CoordinateChart`] supplies
//! the names for parsing and printing. Nodes are reference counted and never
//! mutated, so expressions are cheap to clone and safe to share.

mod diff;
mod eval;
mod parse;
mod print;
mod simplify;

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops;

pub use parse::parse_expression;
pub use print::Display;

use crate::chart::CoordinateChart;

/// Unary functions of the expression grammar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Ln,
    Sqrt,
    Atan,
}

impl Func {
    pub const ALL: [Func; 7] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Exp,
        Func::Ln,
        Func::Sqrt,
        Func::Atan,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Atan => "atan",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(f64),
    Coord(usize),
    Neg(ScalarExpr),
    Sum(Vec<ScalarExpr>),
    Product(Vec<ScalarExpr>),
    Quotient(ScalarExpr, ScalarExpr),
    Power(ScalarExpr, ScalarExpr),
    Func(Func, ScalarExpr),
    /// `atan2(y, x)`
    Atan2(ScalarExpr, ScalarExpr),
}

/// Immutable expression tree.
#[derive(Clone)]
pub struct ScalarExpr(Arc<Node>);

impl PartialEq for ScalarExpr {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}

impl fmt::Debug for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(&*self.0, f)
    }
}

impl ScalarExpr {
    pub fn from_node(node: Node) -> Self {
        ScalarExpr(Arc::new(node))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn constant(value: f64) -> Self {
        Self::from_node(Node::Const(value))
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    pub fn coord(index: usize) -> Self {
        Self::from_node(Node::Coord(index))
    }

    /// Coordinate by name; `None` if the chart has no such coordinate.
    pub fn coord_named(chart: &CoordinateChart, name: &str) -> Option<Self> {
        chart.index_of(name).map(Self::coord)
    }

    pub fn as_constant(&self) -> Option<f64> {
        match *self.0 {
            Node::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_constant() == Some(0.0)
    }

    pub fn is_one(&self) -> bool {
        self.as_constant() == Some(1.0)
    }

    /// Largest coordinate index referenced, if any.
    pub fn max_coord(&self) -> Option<usize> {
        match self.node() {
            Node::Const(_) => None,
            Node::Coord(i) => Some(*i),
            Node::Neg(a) | Node::Func(_, a) => a.max_coord(),
            Node::Sum(terms) | Node::Product(terms) => {
                terms.iter().filter_map(ScalarExpr::max_coord).max()
            }
            Node::Quotient(a, b) | Node::Power(a, b) | Node::Atan2(a, b) => {
                a.max_coord().max(b.max_coord())
            }
        }
    }

    /// Number of nodes, counting shared subtrees once per occurrence.
    pub fn size(&self) -> usize {
        1 + match self.node() {
            Node::Const(_) | Node::Coord(_) => 0,
            Node::Neg(a) | Node::Func(_, a) => a.size(),
            Node::Sum(terms) | Node::Product(terms) => terms.iter().map(ScalarExpr::size).sum(),
            Node::Quotient(a, b) | Node::Power(a, b) | Node::Atan2(a, b) => a.size() + b.size(),
        }
    }

    pub fn display<'a>(&'a self, chart: &'a CoordinateChart) -> Display<'a> {
        Display::new(self, chart)
    }

    // Constructors below fold constants and apply 0/1 identities locally.
    // Deeper rewriting lives in `simplify`.

    pub fn neg(&self) -> Self {
        match self.node() {
            Node::Const(c) => Self::constant(-c),
            Node::Neg(a) => a.clone(),
            _ => Self::from_node(Node::Neg(self.clone())),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        match (self.as_constant(), other.as_constant()) {
            (Some(a), Some(b)) => Self::constant(a + b),
            (Some(0.0), _) => other.clone(),
            (_, Some(0.0)) => self.clone(),
            _ => Self::sum(vec![self.clone(), other.clone()]),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        match (self.as_constant(), other.as_constant()) {
            (Some(a), Some(b)) => Self::constant(a * b),
            (Some(0.0), _) | (_, Some(0.0)) => Self::zero(),
            (Some(1.0), _) => other.clone(),
            (_, Some(1.0)) => self.clone(),
            (Some(-1.0), _) => other.neg(),
            (_, Some(-1.0)) => self.neg(),
            _ => Self::product(vec![self.clone(), other.clone()]),
        }
    }

    pub fn div(&self, other: &Self) -> Self {
        match (self.as_constant(), other.as_constant()) {
            (Some(a), Some(b)) if b != 0.0 => Self::constant(a / b),
            (Some(0.0), _) => Self::zero(),
            (_, Some(1.0)) => self.clone(),
            _ => Self::from_node(Node::Quotient(self.clone(), other.clone())),
        }
    }

    pub fn pow(&self, exponent: &Self) -> Self {
        match (self.as_constant(), exponent.as_constant()) {
            (_, Some(0.0)) => Self::one(),
            (_, Some(1.0)) => self.clone(),
            (Some(b), Some(e)) => {
                let v = libm::pow(b, e);
                if v.is_finite() {
                    Self::constant(v)
                } else {
                    Self::from_node(Node::Power(self.clone(), exponent.clone()))
                }
            }
            _ => Self::from_node(Node::Power(self.clone(), exponent.clone())),
        }
    }

    pub fn powi(&self, exponent: i32) -> Self {
        self.pow(&Self::constant(f64::from(exponent)))
    }

    pub fn apply(&self, func: Func) -> Self {
        Self::from_node(Node::Func(func, self.clone()))
    }

    pub fn sin(&self) -> Self {
        self.apply(Func::Sin)
    }

    pub fn cos(&self) -> Self {
        self.apply(Func::Cos)
    }

    pub fn exp(&self) -> Self {
        self.apply(Func::Exp)
    }

    pub fn ln(&self) -> Self {
        self.apply(Func::Ln)
    }

    pub fn sqrt(&self) -> Self {
        self.apply(Func::Sqrt)
    }

    pub fn atan2(y: &Self, x: &Self) -> Self {
        Self::from_node(Node::Atan2(y.clone(), x.clone()))
    }

    /// Sum of `terms`, dropping zeros.
    pub fn sum(terms: Vec<Self>) -> Self {
        let mut terms: Vec<Self> = terms.into_iter().filter(|t| !t.is_zero()).collect();
        match terms.len() {
            0 => Self::zero(),
            1 => terms.pop().unwrap(),
            _ => Self::from_node(Node::Sum(terms)),
        }
    }

    /// Product of `factors`; a zero factor collapses the product.
    pub fn product(factors: Vec<Self>) -> Self {
        if factors.iter().any(Self::is_zero) {
            return Self::zero();
        }
        let mut factors: Vec<Self> = factors.into_iter().filter(|t| !t.is_one()).collect();
        match factors.len() {
            0 => Self::one(),
            1 => factors.pop().unwrap(),
            _ => Self::from_node(Node::Product(factors)),
        }
    }
}

impl From<f64> for ScalarExpr {
    fn from(value: f64) -> Self {
        ScalarExpr::constant(value)
    }
}

macro_rules! binary_op {
    ($trait:ident, $method:ident, $impl:ident) => {
        impl ops::$trait<&ScalarExpr> for &ScalarExpr {
            type Output = ScalarExpr;
            fn $method(self, rhs: &ScalarExpr) -> ScalarExpr {
                ScalarExpr::$impl(self, rhs)
            }
        }
        impl ops::$trait<ScalarExpr> for ScalarExpr {
            type Output = ScalarExpr;
            fn $method(self, rhs: ScalarExpr) -> ScalarExpr {
                ScalarExpr::$impl(&self, &rhs)
            }
        }
        impl ops::$trait<&ScalarExpr> for ScalarExpr {
            type Output = ScalarExpr;
            fn $method(self, rhs: &ScalarExpr) -> ScalarExpr {
                ScalarExpr::$impl(&self, rhs)
            }
        }
        impl ops::$trait<ScalarExpr> for &ScalarExpr {
            type Output = ScalarExpr;
            fn $method(self, rhs: ScalarExpr) -> ScalarExpr {
                ScalarExpr::$impl(self, &rhs)
            }
        }
    };
}

binary_op!(Add, add, add);
binary_op!(Sub, sub, sub);
binary_op!(Mul, mul, mul);
binary_op!(Div, div, div);

impl ops::Neg for ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        ScalarExpr::neg(&self)
    }
}

impl ops::Neg for &ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        ScalarExpr::neg(self)
    }
}
