//! Univariate arithmetic expressions in `x`.
//!
//! Grammar (whitespace is insignificant):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := base ('^' factor)?
//! base   := number | 'x' | func '(' expr ')' | '(' expr ')' | '-' base
//! func   := exp | sin | cos | log | sqrt | abs
//! ```
//!
//! `^` is right-associative. Evaluation never returns a non-finite value:
//! domain violations and overflow are reported as [`EvalError`].

use std::fmt;

use thiserror::Error;

/// Upper bound on source length in bytes.
pub const MAX_SOURCE_LEN: usize = 64 * 1024;

const MAX_DEPTH: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Sin,
    Cos,
    Log,
    Sqrt,
    Abs,
}

impl Func {
    pub const NAMES: [&'static str; 6] = ["exp", "sin", "cos", "log", "sqrt", "abs"];

    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "exp" => Func::Exp,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expression {
    Num(f64),
    X,
    Neg(Box<Expression>),
    Binary(BinOp, Box<Expression>, Box<Expression>),
    Call(Func, Box<Expression>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("empty expression")]
    Empty,
    #[error("expression is {len} bytes, limit is {MAX_SOURCE_LEN}")]
    TooLong { len: usize },
    #[error("syntax error at byte {offset}: expected {}, found {found}", expected.join(" or "))]
    Syntax {
        offset: usize,
        expected: Vec<&'static str>,
        found: String,
    },
    #[error("unknown identifier `{name}` at byte {offset}; valid names are x, {}", Func::NAMES.join(", "))]
    UnknownIdentifier { offset: usize, name: String },
    #[error("invalid number `{text}` at byte {offset}")]
    InvalidNumber { offset: usize, text: String },
    #[error("nesting deeper than {MAX_DEPTH} at byte {offset}")]
    TooDeep { offset: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("division by zero at x = {x}")]
    DivisionByZero { x: f64 },
    #[error("log of non-positive value {arg} at x = {x}")]
    LogDomain { x: f64, arg: f64 },
    #[error("sqrt of negative value {arg} at x = {x}")]
    SqrtDomain { x: f64, arg: f64 },
    #[error("{base}^{exponent} is undefined (x = {x})")]
    PowDomain { x: f64, base: f64, exponent: f64 },
    #[error("non-finite result at x = {x}")]
    NonFinite { x: f64 },
}

pub fn parse_expression(text: &str) -> Result<Expression, ParseError> {
    if text.len() > MAX_SOURCE_LEN {
        return Err(ParseError::TooLong { len: text.len() });
    }
    if text.trim().is_empty() {
        return Err(ParseError::Empty);
    }
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        depth: 0,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.unexpected(vec!["operator", "end of input"]));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    depth: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn unexpected(&self, expected: Vec<&'static str>) -> ParseError {
        let found = match self.src.get(self.pos) {
            None => "end of input".to_string(),
            Some(_) => {
                let rest = String::from_utf8_lossy(&self.src[self.pos..]);
                format!("`{}`", rest.chars().next().unwrap_or('?'))
            }
        };
        ParseError::Syntax {
            offset: self.pos,
            expected,
            found,
        }
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(ParseError::TooDeep { offset: self.pos });
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Expression, ParseError> {
        self.enter()?;
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(b'+') => BinOp::Add,
                Some(b'-') => BinOp::Sub,
                _ => break,
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expression::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        self.depth -= 1;
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expression, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Some(b'*') => BinOp::Mul,
                Some(b'/') => BinOp::Div,
                _ => break,
            };
            self.pos += 1;
            let rhs = self.factor()?;
            lhs = Expression::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expression, ParseError> {
        self.enter()?;
        let base = self.base()?;
        let out = if self.peek() == Some(b'^') {
            self.pos += 1;
            let exponent = self.factor()?;
            Expression::Binary(BinOp::Pow, Box::new(base), Box::new(exponent))
        } else {
            base
        };
        self.depth -= 1;
        Ok(out)
    }

    fn base(&mut self) -> Result<Expression, ParseError> {
        self.enter()?;
        let out = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Expression::Neg(Box::new(self.base()?))
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(b')', ")")?;
                inner
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number()?,
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.identifier()?,
            _ => return Err(self.unexpected(vec!["number", "x", "function", "(", "-"])),
        };
        self.depth -= 1;
        Ok(out)
    }

    fn expect(&mut self, byte: u8, label: &'static str) -> Result<(), ParseError> {
        if self.peek() == Some(byte) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected(vec![label]))
        }
    }

    fn number(&mut self) -> Result<Expression, ParseError> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            let s = p.pos;
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
            p.pos - s
        };
        let mut count = digits(self);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            count += digits(self);
        }
        if count == 0 {
            return Err(ParseError::InvalidNumber {
                offset: start,
                text: ".".into(),
            });
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                // no exponent digits: the `e` belongs to whatever follows
                self.pos = mark;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii slice");
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(Expression::Num(v)),
            _ => Err(ParseError::InvalidNumber {
                offset: start,
                text: text.to_string(),
            }),
        }
    }

    fn identifier(&mut self) -> Result<Expression, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii slice");
        if name == "x" {
            return Ok(Expression::X);
        }
        let Some(func) = Func::from_name(name) else {
            return Err(ParseError::UnknownIdentifier {
                offset: start,
                name: name.to_string(),
            });
        };
        self.expect(b'(', "(")?;
        let arg = self.expr()?;
        self.expect(b')', ")")?;
        Ok(Expression::Call(func, Box::new(arg)))
    }
}

fn checked(v: f64, x: f64) -> Result<f64, EvalError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(EvalError::NonFinite { x })
    }
}

/// `base^n` by repeated squaring for integer exponents.
fn int_pow(base: f64, n: i64) -> f64 {
    let mut result = 1.0;
    let mut b = base;
    let mut e = n.unsigned_abs();
    while e > 0 {
        if e & 1 == 1 {
            result *= b;
        }
        b *= b;
        e >>= 1;
    }
    if n < 0 {
        1.0 / result
    } else {
        result
    }
}

fn power(base: f64, exponent: f64, x: f64) -> Result<f64, EvalError> {
    if exponent.fract() == 0.0 && exponent.abs() <= i32::MAX as f64 {
        let n = exponent as i64;
        if n < 0 && base == 0.0 {
            return Err(EvalError::DivisionByZero { x });
        }
        return checked(int_pow(base, n), x);
    }
    if base > 0.0 {
        checked((exponent * base.ln()).exp(), x)
    } else if base == 0.0 && exponent > 0.0 {
        Ok(0.0)
    } else {
        Err(EvalError::PowDomain { x, base, exponent })
    }
}

impl Expression {
    /// A constant node; `None` for non-finite values.
    pub fn constant(v: f64) -> Option<Self> {
        v.is_finite().then_some(Expression::Num(v))
    }

    pub fn eval(&self, x: f64) -> Result<f64, EvalError> {
        match self {
            Expression::Num(v) => Ok(*v),
            Expression::X => checked(x, x),
            Expression::Neg(e) => Ok(-e.eval(x)?),
            Expression::Binary(op, l, r) => {
                let l = l.eval(x)?;
                let r = r.eval(x)?;
                match op {
                    BinOp::Add => checked(l + r, x),
                    BinOp::Sub => checked(l - r, x),
                    BinOp::Mul => checked(l * r, x),
                    BinOp::Div => {
                        if r == 0.0 {
                            Err(EvalError::DivisionByZero { x })
                        } else {
                            checked(l / r, x)
                        }
                    }
                    BinOp::Pow => power(l, r, x),
                }
            }
            Expression::Call(f, arg) => {
                let v = arg.eval(x)?;
                match f {
                    Func::Exp => checked(v.exp(), x),
                    Func::Sin => checked(v.sin(), x),
                    Func::Cos => checked(v.cos(), x),
                    Func::Log if v <= 0.0 => Err(EvalError::LogDomain { x, arg: v }),
                    Func::Log => checked(v.ln(), x),
                    Func::Sqrt if v < 0.0 => Err(EvalError::SqrtDomain { x, arg: v }),
                    Func::Sqrt => checked(v.sqrt(), x),
                    Func::Abs => Ok(v.abs()),
                }
            }
        }
    }
}

/// Fully parenthesised form that parses back to an equivalent tree.
impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expression::Num(v) if *v < 0.0 || (*v == 0.0 && v.is_sign_negative()) => {
                write!(f, "(-{:?})", -v)
            }
            Expression::Num(v) => write!(f, "{v:?}"),
            Expression::X => f.write_str("x"),
            Expression::Neg(e) => write!(f, "(-{e})"),
            Expression::Binary(op, l, r) => write!(f, "({l} {} {r})", op.symbol()),
            Expression::Call(func, arg) => write!(f, "{}({arg})", func.name()),
        }
    }
}
