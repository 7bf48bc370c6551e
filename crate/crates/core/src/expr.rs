//! A small expression language for weight functions.
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := factor (("*" | "/") factor)*
//! factor := base ("^" number)?
//! base   := number | "r" | "x" index | func "(" expr ("," expr)? ")"
//!         | "(" expr ")" | "-" base
//! ```
//!
//! `r` is the Euclidean norm of the evaluation point and `x1..xm` its
//! coordinates. Functions: `abs sqrt exp log` (one argument) and `min max`
//! (two arguments). The exponent of `^` must be a literal, optionally signed.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Abs,
    Sqrt,
    Exp,
    Log,
    Min,
    Max,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "abs" => Func::Abs,
            "sqrt" => Func::Sqrt,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "min" => Func::Min,
            "max" => Func::Max,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Func::Abs => "abs",
            Func::Sqrt => "sqrt",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Min => "min",
            Func::Max => "max",
        }
    }

    fn arity(self) -> usize {
        match self {
            Func::Min | Func::Max => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    /// Euclidean norm of the point.
    Radius,
    /// Zero-based coordinate index (`x1` is `Coord(0)`).
    Coord(usize),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, f64),
    Call(Func, Vec<Expr>),
}

/// A parsed weight expression bound to a dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightExpr {
    root: Expr,
    dimension: usize,
}

impl WeightExpr {
    pub fn new(root: Expr, dimension: usize) -> Result<Self> {
        check_tree(&root, dimension)?;
        Ok(WeightExpr { root, dimension })
    }

    pub fn root(&self) -> &Expr {
        &self.root
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Evaluates at the point with coordinates `x`.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        let r = crate::geometry::norm(x);
        eval(&self.root, x, r)
    }
}

impl fmt::Display for WeightExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.fmt(f)
    }
}

fn check_tree(e: &Expr, dim: usize) -> Result<()> {
    match e {
        Expr::Num(v) if !v.is_finite() => Err(Error::InvalidParameter("non-finite literal".into())),
        Expr::Num(_) | Expr::Radius => Ok(()),
        Expr::Coord(i) if *i >= dim => Err(Error::CoordinateIndex {
            index: i + 1,
            dimension: dim,
            offset: 0,
        }),
        Expr::Coord(_) => Ok(()),
        Expr::Neg(a) => check_tree(a, dim),
        Expr::Binary(_, a, b) => {
            check_tree(a, dim)?;
            check_tree(b, dim)
        }
        Expr::Pow(a, p) => {
            if !p.is_finite() {
                return Err(Error::InvalidParameter("non-finite exponent".into()));
            }
            check_tree(a, dim)
        }
        Expr::Call(func, args) => {
            if args.len() != func.arity() {
                return Err(Error::InvalidParameter(format!(
                    "{} expects {} argument(s)",
                    func.name(),
                    func.arity()
                )));
            }
            args.iter().try_for_each(|a| check_tree(a, dim))
        }
    }
}

fn eval(e: &Expr, x: &[f64], r: f64) -> Result<f64> {
    let v = match e {
        Expr::Num(v) => *v,
        Expr::Radius => r,
        Expr::Coord(i) => x[*i],
        Expr::Neg(a) => -eval(a, x, r)?,
        Expr::Binary(op, a, b) => {
            let a = eval(a, x, r)?;
            let b = eval(b, x, r)?;
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => {
                    if b == 0.0 {
                        return Err(Error::Arithmetic("division by zero".into()));
                    }
                    a / b
                }
            }
        }
        Expr::Pow(a, p) => {
            let a = eval(a, x, r)?;
            if p.fract() == 0.0 && p.abs() <= 64.0 {
                if a == 0.0 && *p < 0.0 {
                    return Err(Error::Arithmetic("zero raised to a negative power".into()));
                }
                a.powi(*p as i32)
            } else {
                if a < 0.0 {
                    return Err(Error::Arithmetic(format!(
                        "negative base {a} raised to non-integer power {p}"
                    )));
                }
                a.powf(*p)
            }
        }
        Expr::Call(func, args) => {
            let a = eval(&args[0], x, r)?;
            match func {
                Func::Abs => a.abs(),
                Func::Sqrt => {
                    if a < 0.0 {
                        return Err(Error::Arithmetic(format!("sqrt of negative value {a}")));
                    }
                    a.sqrt()
                }
                Func::Exp => a.exp(),
                Func::Log => {
                    if a <= 0.0 {
                        return Err(Error::Arithmetic(format!("log of nonpositive value {a}")));
                    }
                    a.ln()
                }
                Func::Min => a.min(eval(&args[1], x, r)?),
                Func::Max => a.max(eval(&args[1], x, r)?),
            }
        }
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Arithmetic("non-finite intermediate value".into()))
    }
}

impl fmt::Display for Expr {
    /// Fully parenthesised; parsing the output yields the same tree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::Radius => f.write_str("r"),
            Expr::Coord(i) => write!(f, "x{}", i + 1),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Binary(op, a, b) => write!(f, "({a}{}{b})", op.symbol()),
            Expr::Pow(a, p) => write!(f, "({a}^{p:?})"),
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Parses `text` as a weight expression over `dimension` coordinates.
pub fn parse_weight(text: &str, dimension: usize) -> Result<WeightExpr> {
    if dimension == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        dimension,
    };
    p.skip_ws();
    if p.at_end() {
        return Err(Error::Syntax {
            offset: 0,
            message: "empty expression".into(),
        });
    }
    let root = p.expr()?;
    p.skip_ws();
    if !p.at_end() {
        return Err(p.error(format!("unexpected character {:?}", p.peek_char())));
    }
    Ok(WeightExpr { root, dimension })
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    dimension: usize,
}

impl Parser<'_> {
    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn peek_char(&self) -> char {
        std::str::from_utf8(&self.src[self.pos..])
            .ok()
            .and_then(|s| s.chars().next())
            .unwrap_or('?')
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b) if b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn error(&self, message: impl Into<String>) -> Error {
        Error::Syntax {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else if self.at_end() {
            Err(self.error(format!("expected '{}' but the input ended", c as char)))
        } else {
            Err(self.error(format!("expected '{}'", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat(b'+') {
                BinOp::Add
            } else if self.eat(b'-') {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            let rhs = self.term()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            let op = if self.eat(b'*') {
                BinOp::Mul
            } else if self.eat(b'/') {
                BinOp::Div
            } else {
                return Ok(lhs);
            };
            let rhs = self.factor()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        let base = self.base()?;
        if self.eat(b'^') {
            self.skip_ws();
            let negative = self.eat(b'-');
            self.skip_ws();
            if !matches!(self.peek(), Some(b'0'..=b'9' | b'.')) {
                return Err(self.error("exponent must be a numeric literal"));
            }
            let v = self.number()?;
            Ok(Expr::Pow(Box::new(base), if negative { -v } else { v }))
        } else {
            Ok(base)
        }
    }

    fn base(&mut self) -> Result<Expr> {
        self.skip_ws();
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(b'-') => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.base()?)))
            }
            Some(b'0'..=b'9' | b'.') => Ok(Expr::Num(self.number()?)),
            Some(c) if c.is_ascii_alphabetic() => self.identifier(),
            Some(_) => Err(self.error(format!("unexpected character {:?}", self.peek_char()))),
        }
    }

    fn number(&mut self) -> Result<f64> {
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9' | b'.')) {
            self.pos += 1;
        }
        // optional exponent such as 1e-12
        if matches!(self.peek(), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if matches!(self.peek(), Some(b'0'..=b'9')) {
                while matches!(self.peek(), Some(b'0'..=b'9')) {
                    self.pos += 1;
                }
            } else {
                self.pos = save;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        text.parse::<f64>().map_err(|_| Error::Syntax {
            offset: start,
            message: format!("malformed number {text:?}"),
        })
    }

    fn identifier(&mut self) -> Result<Expr> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'_') {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii identifier");
        if name == "r" {
            return Ok(Expr::Radius);
        }
        if let Some(digits) = name.strip_prefix('x') {
            if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) {
                let index: usize = digits.parse().map_err(|_| Error::Syntax {
                    offset: start,
                    message: format!("coordinate index too large in {name:?}"),
                })?;
                if index == 0 || index > self.dimension {
                    return Err(Error::CoordinateIndex {
                        index,
                        dimension: self.dimension,
                        offset: start,
                    });
                }
                return Ok(Expr::Coord(index - 1));
            }
        }
        let Some(func) = Func::from_name(name) else {
            return Err(Error::UnknownIdentifier {
                name: name.to_string(),
                offset: start,
            });
        };
        self.expect(b'(')?;
        let mut args = vec![self.expr()?];
        while self.eat(b',') {
            args.push(self.expr()?);
        }
        self.expect(b')')?;
        if args.len() != func.arity() {
            return Err(Error::Syntax {
                offset: start,
                message: format!(
                    "{} expects {} argument(s), got {}",
                    func.name(),
                    func.arity(),
                    args.len()
                ),
            });
        }
        Ok(Expr::Call(func, args))
    }
}
