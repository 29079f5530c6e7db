use std::fmt;

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};

/// A `(1,+,·)` expression.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expression {
    One,
    Add(Box<Expression>, Box<Expression>),
    Mul(Box<Expression>, Box<Expression>),
}

impl Expression {
    pub fn sum(a: Expression, b: Expression) -> Self {
        Expression::Add(Box::new(a), Box::new(b))
    }

    pub fn product(a: Expression, b: Expression) -> Self {
        Expression::Mul(Box::new(a), Box::new(b))
    }

    /// Number of `1` leaves, i.e. `‖E‖`.
    pub fn ones_count(&self) -> u64 {
        match self {
            Expression::One => 1,
            Expression::Add(a, b) | Expression::Mul(a, b) => a.ones_count() + b.ones_count(),
        }
    }

    /// The value the expression evaluates to.
    pub fn value(&self) -> BigUint {
        match self {
            Expression::One => BigUint::one(),
            Expression::Add(a, b) => a.value() + b.value(),
            Expression::Mul(a, b) => a.value() * b.value(),
        }
    }

    /// Parses `1`, `+`, `*`, parentheses; a parenthesized factor may follow
    /// another factor without `*`, as in `(1+1+1)(1+1+1)+1+1`.
    pub fn parse(src: &str) -> Result<Self> {
        let mut p = Parser {
            bytes: src.as_bytes(),
            pos: 0,
        };
        let e = p.sum()?;
        p.skip_ws();
        if p.pos != p.bytes.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(e)
    }
}

/// `‖E‖`: the number of ones the expression uses.
pub fn expression_complexity(e: &Expression) -> u64 {
    e.ones_count()
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expression::One => f.write_str("1"),
            Expression::Add(a, b) => write!(f, "{a}+{b}"),
            Expression::Mul(a, b) => {
                let wrap = |e: &Expression| match e {
                    Expression::Add(..) => format!("({e})"),
                    _ => e.to_string(),
                };
                let (l, r) = (wrap(a), wrap(b));
                if r.starts_with('(') {
                    write!(f, "{l}{r}")
                } else {
                    write!(f, "{l}*{r}")
                }
            }
        }
    }
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn sum(&mut self) -> Result<Expression> {
        let mut acc = self.product()?;
        while self.peek() == Some(b'+') {
            self.pos += 1;
            let rhs = self.product()?;
            acc = Expression::sum(acc, rhs);
        }
        Ok(acc)
    }

    fn product(&mut self) -> Result<Expression> {
        let mut acc = self.atom()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let rhs = self.atom()?;
                    acc = Expression::product(acc, rhs);
                }
                Some(b'(') => {
                    let rhs = self.atom()?;
                    acc = Expression::product(acc, rhs);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn atom(&mut self) -> Result<Expression> {
        match self.peek() {
            Some(b'1') => {
                self.pos += 1;
                if let Some(c) = self.bytes.get(self.pos) {
                    if c.is_ascii_digit() {
                        return Err(self.err("only the constant 1 is allowed"));
                    }
                }
                Ok(Expression::One)
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.sum()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(_) => Err(self.err("expected '1' or '('")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}
