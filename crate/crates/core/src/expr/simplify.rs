//! Best-effort algebraic cleanup.
//!
//! Folds constants, applies 0/1 identities, flattens nested sums and
//! products, merges like terms (`c1*t + c2*t`) and repeated factors
//! (`t^a * t^b`). The result agrees with the input wherever both are defined;
//! it is not a canonical form.

use alloc::vec::Vec;
use core::cmp::Ordering;

use super::{Node, ScalarExpr};

impl ScalarExpr {
    pub fn simplify(&self) -> ScalarExpr {
        match self.node() {
            Node::Const(_) | Node::Coord(_) => self.clone(),
            Node::Neg(a) => {
                let a = a.simplify();
                match a.node() {
                    Node::Sum(_) | Node::Product(_) => simplify_sum(&[(-1.0, a)]),
                    _ => a.neg(),
                }
            }
            Node::Sum(terms) => {
                let simplified: Vec<(f64, ScalarExpr)> =
                    terms.iter().map(|t| (1.0, t.simplify())).collect();
                simplify_sum(&simplified)
            }
            Node::Product(factors) => {
                let simplified: Vec<ScalarExpr> =
                    factors.iter().map(ScalarExpr::simplify).collect();
                simplify_product(&simplified)
            }
            Node::Quotient(a, b) => {
                let a = a.simplify();
                let b = b.simplify();
                if a == b && !a.is_zero() {
                    return ScalarExpr::one();
                }
                match b.as_constant() {
                    Some(c) if c != 0.0 => simplify_product(&[ScalarExpr::constant(1.0 / c), a]),
                    _ => a.div(&b),
                }
            }
            Node::Power(a, b) => {
                let a = a.simplify();
                let b = b.simplify();
                if let (Node::Power(inner, e1), Some(e2)) = (a.node(), b.as_constant()) {
                    // (t^e1)^e2 = t^(e1 e2) for integer e1, e2
                    if let Some(e1) = e1.as_constant() {
                        if is_integer(e1) && is_integer(e2) {
                            return inner.pow(&ScalarExpr::constant(e1 * e2));
                        }
                    }
                }
                a.pow(&b)
            }
            Node::Func(func, a) => {
                let a = a.simplify();
                let rebuilt = a.apply(*func);
                fold_if_constant(rebuilt, a.as_constant().is_some())
            }
            Node::Atan2(y, x) => {
                let y = y.simplify();
                let x = x.simplify();
                let constant = y.as_constant().is_some() && x.as_constant().is_some();
                fold_if_constant(ScalarExpr::atan2(&y, &x), constant)
            }
        }
    }
}

/// Total order on trees, used to put commuting factors in a fixed order.
pub(crate) fn structural_order(a: &ScalarExpr, b: &ScalarExpr) -> Ordering {
    fn rank(n: &Node) -> u8 {
        match n {
            Node::Const(_) => 0,
            Node::Coord(_) => 1,
            Node::Neg(_) => 2,
            Node::Sum(_) => 3,
            Node::Product(_) => 4,
            Node::Quotient(_, _) => 5,
            Node::Power(_, _) => 6,
            Node::Func(_, _) => 7,
            Node::Atan2(_, _) => 8,
        }
    }
    fn lists(a: &[ScalarExpr], b: &[ScalarExpr]) -> Ordering {
        a.len().cmp(&b.len()).then_with(|| {
            a.iter()
                .zip(b)
                .map(|(x, y)| structural_order(x, y))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        })
    }
    match (a.node(), b.node()) {
        (Node::Const(x), Node::Const(y)) => x.total_cmp(y),
        (Node::Coord(x), Node::Coord(y)) => x.cmp(y),
        (Node::Neg(x), Node::Neg(y)) => structural_order(x, y),
        (Node::Sum(x), Node::Sum(y)) | (Node::Product(x), Node::Product(y)) => lists(x, y),
        (Node::Quotient(a1, b1), Node::Quotient(a2, b2))
        | (Node::Power(a1, b1), Node::Power(a2, b2))
        | (Node::Atan2(a1, b1), Node::Atan2(a2, b2)) => {
            structural_order(a1, a2).then_with(|| structural_order(b1, b2))
        }
        (Node::Func(f1, x), Node::Func(f2, y)) => f1.cmp(f2).then_with(|| structural_order(x, y)),
        (x, y) => rank(x).cmp(&rank(y)),
    }
}

fn is_integer(v: f64) -> bool {
    libm::trunc(v) == v
}

fn fold_if_constant(e: ScalarExpr, constant_args: bool) -> ScalarExpr {
    if constant_args {
        if let Ok(v) = e.evaluate_values(&[]) {
            return ScalarExpr::constant(v);
        }
    }
    e
}

/// Splits `term` into a numeric coefficient and a non-constant remainder.
fn split_coefficient(term: &ScalarExpr) -> (f64, Option<ScalarExpr>) {
    match term.node() {
        Node::Const(c) => (*c, None),
        Node::Neg(a) => {
            let (c, rest) = split_coefficient(a);
            (-c, rest)
        }
        Node::Product(factors) => {
            let mut coef = 1.0;
            let mut rest = Vec::with_capacity(factors.len());
            for f in factors {
                match f.as_constant() {
                    Some(c) => coef *= c,
                    None => rest.push(f.clone()),
                }
            }
            let base = match rest.len() {
                0 => None,
                1 => rest.pop(),
                _ => Some(ScalarExpr::from_node(Node::Product(rest))),
            };
            (coef, base)
        }
        _ => (1.0, Some(term.clone())),
    }
}

fn flatten_sum(sign: f64, term: &ScalarExpr, out: &mut Vec<(f64, ScalarExpr)>) {
    match term.node() {
        Node::Sum(terms) => {
            for t in terms {
                flatten_sum(sign, t, out);
            }
        }
        Node::Neg(a) => flatten_sum(-sign, a, out),
        _ => out.push((sign, term.clone())),
    }
}

/// Rebuilds `Σ sign_i * term_i` with like terms merged. Terms must already be simplified.
fn simplify_sum(terms: &[(f64, ScalarExpr)]) -> ScalarExpr {
    let mut flat = Vec::new();
    for (sign, t) in terms {
        flatten_sum(*sign, t, &mut flat);
    }
    let mut constant = 0.0;
    let mut collected: Vec<(f64, ScalarExpr)> = Vec::new();
    for (sign, t) in flat {
        let (c, base) = split_coefficient(&t);
        let c = sign * c;
        match base {
            None => constant += c,
            Some(base) => match collected.iter_mut().find(|(_, b)| *b == base) {
                Some((existing, _)) => *existing += c,
                None => collected.push((c, base)),
            },
        }
    }
    let mut out = Vec::with_capacity(collected.len() + 1);
    for (c, base) in collected {
        if c == 0.0 {
            continue;
        }
        out.push(scaled(c, base));
    }
    if constant != 0.0 {
        out.push(ScalarExpr::constant(constant));
    }
    ScalarExpr::sum(out)
}

fn scaled(c: f64, base: ScalarExpr) -> ScalarExpr {
    if c == 1.0 {
        base
    } else if c == -1.0 {
        base.neg()
    } else {
        let mut factors = Vec::new();
        factors.push(ScalarExpr::constant(c));
        match base.node() {
            Node::Product(inner) => factors.extend(inner.iter().cloned()),
            _ => factors.push(base),
        }
        ScalarExpr::from_node(Node::Product(factors))
    }
}

fn flatten_product(term: &ScalarExpr, coef: &mut f64, out: &mut Vec<ScalarExpr>) {
    match term.node() {
        Node::Product(factors) => {
            for f in factors {
                flatten_product(f, coef, out);
            }
        }
        Node::Neg(a) => {
            *coef = -*coef;
            flatten_product(a, coef, out);
        }
        Node::Const(c) => *coef *= c,
        _ => out.push(term.clone()),
    }
}

/// Rebuilds a product with constants folded and repeated bases merged.
fn simplify_product(factors: &[ScalarExpr]) -> ScalarExpr {
    let mut coef = 1.0;
    let mut flat = Vec::new();
    for f in factors {
        flatten_product(f, &mut coef, &mut flat);
    }
    if coef == 0.0 {
        return ScalarExpr::zero();
    }
    let mut powers: Vec<(ScalarExpr, f64)> = Vec::new();
    let mut others: Vec<ScalarExpr> = Vec::new();
    for f in flat {
        let (base, exponent) = match f.node() {
            Node::Power(b, e) => match e.as_constant() {
                Some(e) => (b.clone(), e),
                None => {
                    others.push(f);
                    continue;
                }
            },
            _ => (f, 1.0),
        };
        match powers.iter_mut().find(|(b, _)| *b == base) {
            Some((_, existing)) => *existing += exponent,
            None => powers.push((base, exponent)),
        }
    }
    let mut rebuilt: Vec<ScalarExpr> = Vec::new();
    for (base, exponent) in powers {
        if exponent == 0.0 {
            continue;
        }
        rebuilt.push(base.pow(&ScalarExpr::constant(exponent)));
    }
    rebuilt.extend(others);
    rebuilt.sort_by(structural_order);
    match rebuilt.len() {
        0 => ScalarExpr::constant(coef),
        _ => {
            let body = ScalarExpr::product(rebuilt);
            scaled(coef, body)
        }
    }
}
