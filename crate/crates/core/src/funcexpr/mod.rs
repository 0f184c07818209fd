//! A small expression language in one variable `t`, so functions can be
//! given as strings.

mod parser;

pub use parser::{parse, SyntaxError};

use std::fmt;
use std::sync::Arc;

use crate::error::EvalError;
use crate::realfn::RealFn;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Ln,
    Sin,
    Cos,
    Sqrt,
    Abs,
}

impl Func {
    pub const ALL: [Func; 6] = [
        Func::Exp,
        Func::Ln,
        Func::Sin,
        Func::Cos,
        Func::Sqrt,
        Func::Abs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    fn apply(self, x: f64, at: f64) -> Result<f64, EvalError> {
        Ok(match self {
            Func::Exp => x.exp(),
            Func::Ln if x <= 0.0 => {
                return Err(EvalError::new(
                    at,
                    format!("ln of non-positive argument {x}"),
                ))
            }
            Func::Ln => x.ln(),
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Sqrt if x < 0.0 => {
                return Err(EvalError::new(at, format!("sqrt of negative argument {x}")))
            }
            Func::Sqrt => x.sqrt(),
            Func::Abs => x.abs(),
        })
    }
}

/// Syntax tree of an expression in `t`.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var,
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    /// Evaluates with `t` bound to `x`. Every intermediate value must be
    /// finite.
    pub fn eval(&self, x: f64) -> Result<f64, EvalError> {
        let v = match self {
            Expr::Num(v) => *v,
            Expr::Var => x,
            Expr::Neg(e) => -e.eval(x)?,
            Expr::Call(func, arg) => func.apply(arg.eval(x)?, x)?,
            Expr::Binary(op, lhs, rhs) => {
                let (l, r) = (lhs.eval(x)?, rhs.eval(x)?);
                match op {
                    BinOp::Add => l + r,
                    BinOp::Sub => l - r,
                    BinOp::Mul => l * r,
                    BinOp::Div if r == 0.0 => {
                        return Err(EvalError::new(x, "division by zero"));
                    }
                    BinOp::Div => l / r,
                    BinOp::Pow => pow(l, r, x)?,
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::new(
                x,
                format!("non-finite intermediate value {v}"),
            ))
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Binary(BinOp::Mul | BinOp::Div, ..) => 2,
            Expr::Neg(_) => 3,
            Expr::Binary(BinOp::Pow, ..) => 4,
            Expr::Num(_) | Expr::Var | Expr::Call(..) => 5,
        }
    }

    fn fmt_at(&self, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.precedence() < min {
            f.write_str("(")?;
            self.fmt_at(0, f)?;
            return f.write_str(")");
        }
        match self {
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::Var => f.write_str("t"),
            Expr::Neg(e) => {
                f.write_str("-")?;
                e.fmt_at(3, f)
            }
            Expr::Call(func, arg) => {
                write!(f, "{}(", func.name())?;
                arg.fmt_at(0, f)?;
                f.write_str(")")
            }
            Expr::Binary(op, lhs, rhs) => {
                let (sym, left, right) = match op {
                    BinOp::Add => (" + ", 1, 2),
                    BinOp::Sub => (" - ", 1, 2),
                    BinOp::Mul => (" * ", 2, 3),
                    BinOp::Div => (" / ", 2, 3),
                    BinOp::Pow => ("^", 5, 3),
                };
                lhs.fmt_at(left, f)?;
                f.write_str(sym)?;
                rhs.fmt_at(right, f)
            }
        }
    }
}

/// Prints with the minimal parentheses needed to reparse to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(0, f)
    }
}

fn pow(base: f64, exp: f64, at: f64) -> Result<f64, EvalError> {
    if exp.fract() == 0.0 && exp.abs() <= 64.0 {
        return Ok(base.powi(exp as i32));
    }
    if base < 0.0 {
        return Err(EvalError::new(
            at,
            format!("negative base {base} with non-integer exponent {exp}"),
        ));
    }
    Ok(base.powf(exp))
}

/// Wraps a parsed expression as a [`RealFn`].
pub fn as_realfn(e: Expr, label: impl Into<String>) -> RealFn {
    let e = Arc::new(e);
    RealFn::fallible(label, move |x| e.eval(x))
}
