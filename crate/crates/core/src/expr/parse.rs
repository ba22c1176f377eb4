//! Recursive descent parser for the expression grammar.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' unary)?
//! atom    := number | ident | ident '(' expr (',' expr)? ')' | '(' expr ')'
//! ```
//!
//! `^` binds tighter than unary minus and is right associative, so `-x^2` is
//! `-(x^2)` and `a^b^c` is `a^(b^c)`. U+2212 MINUS SIGN is accepted for `-`.

use alloc::format;
use alloc::string::{String, ToString};

use super::{Func, ScalarExpr};
use crate::chart::CoordinateChart;
use crate::error::ParseError;

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    End,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Self { src, pos: 0 }
    }

    fn syntax(offset: usize, message: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            offset,
            message: message.into(),
        }
    }

    /// Next token and its starting byte offset.
    fn next_token(&mut self) -> Result<(Token, usize), ParseError> {
        let rest = &self.src[self.pos..];
        let trimmed = rest.trim_start();
        self.pos += rest.len() - trimmed.len();
        let start = self.pos;
        let Some(c) = trimmed.chars().next() else {
            return Ok((Token::End, start));
        };
        let single = |tok: Token, lexer: &mut Self| {
            lexer.pos += c.len_utf8();
            Ok((tok, start))
        };
        match c {
            '+' => single(Token::Plus, self),
            '-' | '\u{2212}' => single(Token::Minus, self),
            '*' => single(Token::Star, self),
            '/' => single(Token::Slash, self),
            '^' => single(Token::Caret, self),
            '(' => single(Token::LParen, self),
            ')' => single(Token::RParen, self),
            ',' => single(Token::Comma, self),
            c if c.is_ascii_digit() || c == '.' => self.number(start),
            c if c.is_ascii_alphabetic() || c == '_' => {
                let len = trimmed
                    .bytes()
                    .take_while(|b| b.is_ascii_alphanumeric() || *b == b'_')
                    .count();
                self.pos += len;
                Ok((Token::Ident(trimmed[..len].to_string()), start))
            }
            other => Err(Self::syntax(
                start,
                format!("unexpected character `{other}`"),
            )),
        }
    }

    fn number(&mut self, start: usize) -> Result<(Token, usize), ParseError> {
        let bytes = self.src.as_bytes();
        let mut i = start;
        let digits = |i: &mut usize| {
            let from = *i;
            while *i < bytes.len() && bytes[*i].is_ascii_digit() {
                *i += 1;
            }
            *i - from
        };
        let mut mantissa = digits(&mut i);
        if i < bytes.len() && bytes[i] == b'.' {
            i += 1;
            mantissa += digits(&mut i);
        }
        if mantissa == 0 {
            return Err(Self::syntax(start, "malformed number"));
        }
        if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
            let mut j = i + 1;
            if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                j += 1;
            }
            if digits(&mut j) == 0 {
                return Err(Self::syntax(i, "malformed exponent"));
            }
            i = j;
        }
        let text = &self.src[start..i];
        let value: f64 = text
            .parse()
            .map_err(|_| Self::syntax(start, format!("malformed number `{text}`")))?;
        if !value.is_finite() {
            return Err(Self::syntax(start, format!("number `{text}` out of range")));
        }
        self.pos = i;
        Ok((Token::Number(value), start))
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    chart: &'a CoordinateChart,
    current: Token,
    offset: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, chart: &'a CoordinateChart) -> Result<Self, ParseError> {
        let mut lexer = Lexer::new(src);
        let (current, offset) = lexer.next_token()?;
        Ok(Self {
            lexer,
            chart,
            current,
            offset,
        })
    }

    fn bump(&mut self) -> Result<Token, ParseError> {
        let (next, offset) = self.lexer.next_token()?;
        self.offset = offset;
        Ok(core::mem::replace(&mut self.current, next))
    }

    fn expect(&mut self, token: Token, what: &str) -> Result<(), ParseError> {
        if self.current == token {
            self.bump()?;
            Ok(())
        } else {
            Err(self.unexpected(what))
        }
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        let found = match &self.current {
            Token::End => "end of input".to_string(),
            Token::Number(n) => format!("number {n}"),
            Token::Ident(name) => format!("`{name}`"),
            other => format!("{other:?}"),
        };
        Lexer::syntax(self.offset, format!("expected {expected}, found {found}"))
    }

    fn expr(&mut self) -> Result<ScalarExpr, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.current {
                Token::Plus => {
                    self.bump()?;
                    let rhs = self.term()?;
                    acc = ScalarExpr::from_node(super::Node::Sum(alloc::vec![acc, rhs]));
                }
                Token::Minus => {
                    self.bump()?;
                    let rhs = ScalarExpr::from_node(super::Node::Neg(self.term()?));
                    acc = ScalarExpr::from_node(super::Node::Sum(alloc::vec![acc, rhs]));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<ScalarExpr, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.current {
                Token::Star => {
                    self.bump()?;
                    acc = ScalarExpr::from_node(super::Node::Product(alloc::vec![
                        acc,
                        self.unary()?
                    ]));
                }
                Token::Slash => {
                    self.bump()?;
                    acc = ScalarExpr::from_node(super::Node::Quotient(acc, self.unary()?));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<ScalarExpr, ParseError> {
        if self.current == Token::Minus {
            self.bump()?;
            let inner = self.unary()?;
            return Ok(ScalarExpr::from_node(super::Node::Neg(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<ScalarExpr, ParseError> {
        let base = self.atom()?;
        if self.current == Token::Caret {
            self.bump()?;
            let exponent = self.unary()?;
            return Ok(ScalarExpr::from_node(super::Node::Power(base, exponent)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<ScalarExpr, ParseError> {
        let offset = self.offset;
        match self.current.clone() {
            Token::Number(value) => {
                self.bump()?;
                Ok(ScalarExpr::constant(value))
            }
            Token::LParen => {
                self.bump()?;
                let inner = self.expr()?;
                self.expect(Token::RParen, "`)`")?;
                Ok(inner)
            }
            Token::Ident(name) => {
                self.bump()?;
                if self.current == Token::LParen {
                    return self.call(&name, offset);
                }
                self.chart
                    .index_of(&name)
                    .map(ScalarExpr::coord)
                    .ok_or(ParseError::UnknownIdentifier { name, offset })
            }
            _ => Err(self.unexpected("an expression")),
        }
    }

    fn call(&mut self, name: &str, offset: usize) -> Result<ScalarExpr, ParseError> {
        self.expect(Token::LParen, "`(`")?;
        if name == "atan2" {
            let y = self.expr()?;
            self.expect(Token::Comma, "`,` between the two arguments of atan2")?;
            let x = self.expr()?;
            self.expect(Token::RParen, "`)`")?;
            return Ok(ScalarExpr::atan2(&y, &x));
        }
        let Some(func) = Func::from_name(name) else {
            return Err(ParseError::UnknownIdentifier {
                name: name.to_string(),
                offset,
            });
        };
        let arg = self.expr()?;
        self.expect(Token::RParen, "`)`")?;
        Ok(arg.apply(func))
    }
}

/// Parses `text` over `chart`. The tree mirrors the source; no folding is done.
pub fn parse_expression(text: &str, chart: &CoordinateChart) -> Result<ScalarExpr, ParseError> {
    let mut parser = Parser::new(text, chart)?;
    let expr = parser.expr()?;
    if parser.current != Token::End {
        return Err(parser.unexpected("an operator or end of input"));
    }
    Ok(expr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Node;

    fn chart() -> CoordinateChart {
        CoordinateChart::new(["x1", "x2", "x3"]).unwrap()
    }

    #[test]
    fn zero_is_a_constant() {
        let c = CoordinateChart::new(["x"]).unwrap();
        assert_eq!(parse_expression("0", &c).unwrap(), ScalarExpr::zero());
    }

    #[test]
    fn exp_of_z_is_single_call() {
        let c = CoordinateChart::new(["x", "y", "z"]).unwrap();
        let e = parse_expression("exp(z)", &c).unwrap();
        assert_eq!(*e.node(), Node::Func(Func::Exp, ScalarExpr::coord(2)));
    }

    #[test]
    fn undeclared_arbitrary_function_is_unknown() {
        let err = parse_expression("atan(x2/x1)+C", &chart()).unwrap_err();
        assert_eq!(
            err,
            ParseError::UnknownIdentifier {
                name: "C".into(),
                offset: 12
            }
        );
    }

    #[test]
    fn unary_minus_binds_below_power() {
        let e = parse_expression("-x1^2", &chart()).unwrap();
        let expected = ScalarExpr::from_node(Node::Neg(ScalarExpr::from_node(Node::Power(
            ScalarExpr::coord(0),
            ScalarExpr::constant(2.0),
        ))));
        assert_eq!(e, expected);
    }

    #[test]
    fn power_is_right_associative() {
        let e = parse_expression("x1^x2^x3", &chart()).unwrap();
        let Node::Power(base, exp) = e.node() else {
            panic!("expected power, got {e:?}");
        };
        assert_eq!(*base, ScalarExpr::coord(0));
        assert!(matches!(exp.node(), Node::Power(_, _)));
    }

    #[test]
    fn numbers_with_exponents() {
        let c = chart();
        assert_eq!(parse_expression("1.5e-3", &c).unwrap(), 1.5e-3.into());
        assert_eq!(parse_expression(".5", &c).unwrap(), 0.5.into());
        assert!(matches!(
            parse_expression("1e+", &c),
            Err(ParseError::Syntax { offset: 1, .. })
        ));
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        let c = chart();
        assert!(matches!(
            parse_expression("x1 + * x2", &c),
            Err(ParseError::Syntax { offset: 5, .. })
        ));
        assert!(matches!(
            parse_expression("(x1", &c),
            Err(ParseError::Syntax { offset: 3, .. })
        ));
        assert!(matches!(
            parse_expression("atan2(x1)", &c),
            Err(ParseError::Syntax { offset: 8, .. })
        ));
        assert!(matches!(
            parse_expression("x1 $", &c),
            Err(ParseError::Syntax { offset: 3, .. })
        ));
        assert!(matches!(
            parse_expression("foo(x1)", &c),
            Err(ParseError::UnknownIdentifier { offset: 0, .. })
        ));
    }

    #[test]
    fn unicode_minus_and_whitespace() {
        let c = chart();
        let a = parse_expression("x1 \u{2212} x2", &c).unwrap();
        let b = parse_expression("x1-x2", &c).unwrap();
        assert_eq!(a, b);
    }
}
