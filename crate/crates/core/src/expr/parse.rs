//! Recursive-descent parser.
//!
//! ```text
//! expr     := term (("+"|"-") term)*
//! term     := factor (("*"|"/") factor)*
//! factor   := ("-")* atom ("^" integer)?
//! atom     := number | variable | "(" expr ")"
//! variable := "x" positive-integer
//! ```
//!
//! A unary minus written directly in front of a bare number literal (with no
//! `^` after it) is folded into a negative constant, so `-3` is `Const(-3)`
//! while `-(3)` and `-3^2` keep an explicit negation node.

use std::fmt;

use thiserror::Error;

use super::Expr;
use crate::scalar::Scalar;

/// Largest accepted integer exponent.
pub const MAX_EXPONENT: u32 = 1000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Empty,
    UnexpectedEnd,
    UnexpectedChar(char),
    UnclosedParen,
    TrailingInput(char),
    BadVariable,
    VariableIndexZero,
    InvalidNumber,
    MissingExponent,
    NegativeExponent,
    NonIntegerExponent,
    ExponentTooLarge,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Empty => write!(f, "empty expression"),
            ParseErrorKind::UnexpectedEnd => write!(f, "unexpected end of input"),
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character '{c}'"),
            ParseErrorKind::UnclosedParen => write!(f, "missing closing parenthesis"),
            ParseErrorKind::TrailingInput(c) => write!(f, "unexpected trailing input '{c}'"),
            ParseErrorKind::BadVariable => write!(f, "variables are written x1, x2, ..."),
            ParseErrorKind::VariableIndexZero => write!(f, "variable index must be at least 1"),
            ParseErrorKind::InvalidNumber => write!(f, "invalid or non-finite number"),
            ParseErrorKind::MissingExponent => write!(f, "expected an integer exponent after '^'"),
            ParseErrorKind::NegativeExponent => write!(f, "exponent must be nonnegative"),
            ParseErrorKind::NonIntegerExponent => write!(f, "exponent must be an integer"),
            ParseErrorKind::ExponentTooLarge => write!(f, "exponent is too large"),
        }
    }
}

/// Syntax error at a byte offset into the input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at byte {offset}: {kind}")]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

type PResult<T> = Result<T, ParseError>;

pub fn parse<T: Scalar>(text: &str) -> PResult<Expr<T>> {
    let mut p = Parser { src: text.as_bytes(), text, pos: 0 };
    p.skip_ws();
    if p.at_end() {
        return Err(p.error(ParseErrorKind::Empty));
    }
    let e = p.expr()?;
    p.skip_ws();
    match p.peek() {
        None => Ok(e),
        Some(_) => Err(p.error(ParseErrorKind::TrailingInput(p.peek_char()))),
    }
}

/// Parses and reports the dimension: the largest index used, or `n_hint`
/// if that is larger.
pub fn parse_with_hint<T: Scalar>(text: &str, n_hint: Option<usize>) -> PResult<(Expr<T>, usize)> {
    let e = parse::<T>(text)?;
    let dim = e.dim().max(n_hint.unwrap_or(0));
    Ok((e, dim))
}

struct Parser<'a> {
    src: &'a [u8],
    text: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, kind: ParseErrorKind) -> ParseError {
        ParseError { offset: self.pos, kind }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn peek_char(&self) -> char {
        self.text[self.pos..].chars().next().unwrap_or('\0')
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|b| b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn unexpected(&self) -> ParseError {
        match self.peek() {
            None => self.error(ParseErrorKind::UnexpectedEnd),
            Some(_) => self.error(ParseErrorKind::UnexpectedChar(self.peek_char())),
        }
    }

    fn expr<T: Scalar>(&mut self) -> PResult<Expr<T>> {
        let mut lhs = self.term()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    lhs = Expr::Add(Box::new(lhs), Box::new(rhs));
                }
                Some(b'-') => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term<T: Scalar>(&mut self) -> PResult<Expr<T>> {
        let mut lhs = self.factor()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let rhs = self.factor()?;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(rhs));
                }
                Some(b'/') => {
                    self.pos += 1;
                    let rhs = self.factor()?;
                    lhs = Expr::Div(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor<T: Scalar>(&mut self) -> PResult<Expr<T>> {
        let mut minus = 0usize;
        loop {
            self.skip_ws();
            if self.peek() == Some(b'-') {
                self.pos += 1;
                minus += 1;
            } else {
                break;
            }
        }
        self.skip_ws();
        let is_literal = self.peek().is_some_and(|b| b.is_ascii_digit());
        let atom: Expr<T> = self.atom()?;
        let exponent = self.exponent()?;
        let mut node = match (exponent, atom) {
            (None, Expr::Const(c)) if is_literal && minus > 0 => {
                minus -= 1;
                Expr::Const(-c)
            }
            (None, atom) => atom,
            (Some(e), atom) => Expr::Pow(Box::new(atom), e),
        };
        for _ in 0..minus {
            node = Expr::Neg(Box::new(node));
        }
        Ok(node)
    }

    fn exponent(&mut self) -> PResult<Option<u32>> {
        self.skip_ws();
        if self.peek() != Some(b'^') {
            return Ok(None);
        }
        self.pos += 1;
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            Some(b'-') => return Err(self.error(ParseErrorKind::NegativeExponent)),
            Some(b) if b.is_ascii_digit() => {}
            _ => return Err(self.error(ParseErrorKind::MissingExponent)),
        }
        while self.peek().is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if matches!(self.peek(), Some(b'.' | b'e' | b'E')) {
            return Err(ParseError { offset: start, kind: ParseErrorKind::NonIntegerExponent });
        }
        self.text[start..self.pos]
            .parse::<u32>()
            .ok()
            .filter(|&e| e <= MAX_EXPONENT)
            .map(Some)
            .ok_or(ParseError { offset: start, kind: ParseErrorKind::ExponentTooLarge })
    }

    fn atom<T: Scalar>(&mut self) -> PResult<Expr<T>> {
        self.skip_ws();
        match self.peek() {
            Some(b'(') => {
                let open = self.pos;
                self.pos += 1;
                let inner = self.expr()?;
                self.skip_ws();
                if self.peek() == Some(b')') {
                    self.pos += 1;
                    Ok(inner)
                } else if self.at_end() {
                    Err(ParseError { offset: open, kind: ParseErrorKind::UnclosedParen })
                } else {
                    Err(self.unexpected())
                }
            }
            Some(b'x') => {
                let start = self.pos;
                self.pos += 1;
                let digits = self.pos;
                while self.peek().is_some_and(|b| b.is_ascii_digit()) {
                    self.pos += 1;
                }
                if digits == self.pos {
                    return Err(ParseError { offset: start, kind: ParseErrorKind::BadVariable });
                }
                let index: usize = self.text[digits..self.pos]
                    .parse()
                    .map_err(|_| ParseError { offset: start, kind: ParseErrorKind::BadVariable })?;
                if index == 0 {
                    return Err(ParseError { offset: start, kind: ParseErrorKind::VariableIndexZero });
                }
                Ok(Expr::Var(index))
            }
            Some(b) if b.is_ascii_digit() => self.number(),
            _ => Err(self.unexpected()),
        }
    }

    fn number<T: Scalar>(&mut self) -> PResult<Expr<T>> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            while p.peek().is_some_and(|b| b.is_ascii_digit()) {
                p.pos += 1;
            }
        };
        digits(self);
        if self.peek() == Some(b'.') {
            self.pos += 1;
            digits(self);
        }
        if matches!(self.peek(), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if self.peek().is_some_and(|b| b.is_ascii_digit()) {
                digits(self);
            } else {
                self.pos = save;
                return Err(ParseError { offset: save, kind: ParseErrorKind::InvalidNumber });
            }
        }
        T::parse_literal(&self.text[start..self.pos])
            .map(Expr::Const)
            .ok_or(ParseError { offset: start, kind: ParseErrorKind::InvalidNumber })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type E = Expr<f64>;

    fn c(v: f64) -> E {
        Expr::Const(v)
    }
    fn x(k: usize) -> E {
        Expr::Var(k)
    }
    fn b(e: E) -> Box<E> {
        Box::new(e)
    }

    #[test]
    fn linear_form() {
        let e: E = parse("0.25*x1 + 0.75*x2").unwrap();
        assert_eq!(e, Expr::Add(b(Expr::Mul(b(c(0.25)), b(x(1)))), b(Expr::Mul(b(c(0.75)), b(x(2))))));
        assert_eq!(e.dim(), 2);
    }

    #[test]
    fn single_variable() {
        assert_eq!(parse::<f64>("x1").unwrap(), x(1));
        assert_eq!(parse_with_hint::<f64>("x1", Some(4)).unwrap().1, 4);
        assert_eq!(parse_with_hint::<f64>("x5", Some(4)).unwrap().1, 5);
    }

    #[test]
    fn mixed_tree() {
        let e: E = parse("x1*x2^2 - 3").unwrap();
        let expected = Expr::Sub(b(Expr::Mul(b(x(1)), b(Expr::Pow(b(x(2)), 2)))), b(c(3.0)));
        assert_eq!(e, expected);
    }

    #[test]
    fn unary_minus_rules() {
        assert_eq!(parse::<f64>("-3").unwrap(), c(-3.0));
        assert_eq!(parse::<f64>("-(3)").unwrap(), Expr::Neg(b(c(3.0))));
        assert_eq!(parse::<f64>("-3^2").unwrap(), Expr::Neg(b(Expr::Pow(b(c(3.0)), 2))));
        assert_eq!(parse::<f64>("--3").unwrap(), Expr::Neg(b(c(-3.0))));
        assert_eq!(parse::<f64>("-x1*x2").unwrap(), Expr::Mul(b(Expr::Neg(b(x(1)))), b(x(2))));
        assert_eq!(parse::<f64>("x1*-x2").unwrap(), Expr::Mul(b(x(1)), b(Expr::Neg(b(x(2))))));
        assert_eq!(parse::<f64>("x1 - -2").unwrap(), Expr::Sub(b(x(1)), b(c(-2.0))));
    }

    #[test]
    fn left_associative() {
        assert_eq!(
            parse::<f64>("x1 - x2 - x3").unwrap(),
            Expr::Sub(b(Expr::Sub(b(x(1)), b(x(2)))), b(x(3)))
        );
        assert_eq!(
            parse::<f64>("x1 / x2 * x3").unwrap(),
            Expr::Mul(b(Expr::Div(b(x(1)), b(x(2)))), b(x(3)))
        );
    }

    #[test]
    fn whitespace_insensitive() {
        assert_eq!(parse::<f64>(" x1 ^ 2 *\t( x2+1 ) ").unwrap(), parse("x1^2*(x2+1)").unwrap());
    }

    #[test]
    fn numbers() {
        assert_eq!(parse::<f64>("1.5e-3").unwrap(), c(1.5e-3));
        assert_eq!(parse::<f64>("2.").unwrap(), c(2.0));
        assert_eq!(parse::<f64>("7E2").unwrap(), c(700.0));
    }

    fn err(s: &str) -> ParseError {
        parse::<f64>(s).unwrap_err()
    }

    #[test]
    fn errors_carry_offsets() {
        assert_eq!(err(""), ParseError { offset: 0, kind: ParseErrorKind::Empty });
        assert_eq!(err("x0"), ParseError { offset: 0, kind: ParseErrorKind::VariableIndexZero });
        assert_eq!(err("x1 + x0").offset, 5);
        assert_eq!(err("x1^1.5"), ParseError { offset: 3, kind: ParseErrorKind::NonIntegerExponent });
        assert_eq!(err("x1^-2"), ParseError { offset: 3, kind: ParseErrorKind::NegativeExponent });
        assert_eq!(err("x1^"), ParseError { offset: 3, kind: ParseErrorKind::MissingExponent });
        assert_eq!(err("x1^1001"), ParseError { offset: 3, kind: ParseErrorKind::ExponentTooLarge });
        assert!(parse::<f64>("x1^1000").is_ok());
        assert_eq!(err("(x1 + x2"), ParseError { offset: 0, kind: ParseErrorKind::UnclosedParen });
        assert_eq!(err("x1 +"), ParseError { offset: 4, kind: ParseErrorKind::UnexpectedEnd });
        assert_eq!(err("x1 $ x2"), ParseError { offset: 3, kind: ParseErrorKind::TrailingInput('$') });
        assert_eq!(err("y1"), ParseError { offset: 0, kind: ParseErrorKind::UnexpectedChar('y') });
        assert_eq!(err("1e999").kind, ParseErrorKind::InvalidNumber);
        assert_eq!(err("x1^2^3").kind, ParseErrorKind::TrailingInput('^'));
        assert_eq!(err("x").kind, ParseErrorKind::BadVariable);
    }

    #[test]
    fn non_ascii_input_does_not_panic() {
        assert_eq!(err("x1 + é").kind, ParseErrorKind::UnexpectedChar('é'));
        assert_eq!(err("x1 ×").kind, ParseErrorKind::TrailingInput('×'));
    }
}
