//! Complex-valued expressions used for coefficients and parameters.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use super::Position;

pub type Env = BTreeMap<String, Complex64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Exp,
    Cos,
    Sin,
    Tan,
    Sqrt,
    Conj,
}

impl Func {
    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "cos" => Func::Cos,
            "sin" => Func::Sin,
            "tan" => Func::Tan,
            "sqrt" => Func::Sqrt,
            "conj" => Func::Conj,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Cos => "cos",
            Func::Sin => "sin",
            Func::Tan => "tan",
            Func::Sqrt => "sqrt",
            Func::Conj => "conj",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExprKind {
    Number(f64),
    ImaginaryUnit,
    Pi,
    Param(String),
    Neg(Box<ExprAst>),
    Binary(BinOp, Box<ExprAst>, Box<ExprAst>),
    Call(Func, Box<ExprAst>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExprAst {
    pub kind: ExprKind,
    pub pos: Position,
}

impl fmt::Display for ExprAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ExprKind::Number(x) => write!(f, "{x:?}"),
            ExprKind::ImaginaryUnit => f.write_str("i"),
            ExprKind::Pi => f.write_str("pi"),
            ExprKind::Param(name) => f.write_str(name),
            ExprKind::Neg(inner) => write!(f, "-({inner})"),
            ExprKind::Binary(op, l, r) => {
                let sym = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                    BinOp::Pow => "^",
                };
                write!(f, "({l} {sym} {r})")
            }
            ExprKind::Call(func, arg) => write!(f, "{}({arg})", func.name()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum EvalErrorKind {
    #[error("unbound parameter `{0}`")]
    Unbound(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("`{0}` is not finite here")]
    NonFinite(String),
}

#[derive(Clone, Debug, PartialEq, Error)]
#[error("{pos}: {kind}")]
pub struct EvalError {
    pub pos: Position,
    pub kind: EvalErrorKind,
}

/// `|cos z|` below this makes `tan z` a pole.
const TAN_POLE: f64 = 1e-12;

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn is_real(z: Complex64) -> bool {
    z.im == 0.0
}

/// Evaluate `ast` against parameter bindings, in double precision.
pub fn eval_expr(ast: &ExprAst, env: &Env) -> Result<Complex64, EvalError> {
    let err = |kind| EvalError { pos: ast.pos, kind };
    let value = match &ast.kind {
        ExprKind::Number(x) => real(*x),
        ExprKind::ImaginaryUnit => Complex64::new(0.0, 1.0),
        ExprKind::Pi => real(PI),
        ExprKind::Param(name) => *env
            .get(name)
            .ok_or_else(|| err(EvalErrorKind::Unbound(name.clone())))?,
        ExprKind::Neg(inner) => -eval_expr(inner, env)?,
        ExprKind::Binary(op, l, r) => {
            let (x, y) = (eval_expr(l, env)?, eval_expr(r, env)?);
            match op {
                BinOp::Add => x + y,
                BinOp::Sub => x - y,
                BinOp::Mul if is_real(x) && is_real(y) => real(x.re * y.re),
                BinOp::Mul => x * y,
                BinOp::Div => {
                    if y.re == 0.0 && y.im == 0.0 {
                        return Err(err(EvalErrorKind::DivisionByZero));
                    }
                    if is_real(y) {
                        Complex64::new(x.re / y.re, x.im / y.re)
                    } else {
                        x / y
                    }
                }
                BinOp::Pow => power(x, y),
            }
        }
        ExprKind::Call(func, arg) => {
            let z = eval_expr(arg, env)?;
            apply(*func, z).ok_or_else(|| err(EvalErrorKind::NonFinite(format!("{}({})", func.name(), arg))))?
        }
    };
    if value.re.is_finite() && value.im.is_finite() {
        Ok(value)
    } else {
        Err(err(EvalErrorKind::NonFinite(ast.to_string())))
    }
}

fn power(base: Complex64, exp: Complex64) -> Complex64 {
    if is_real(exp) && exp.re.fract() == 0.0 && exp.re.abs() <= i32::MAX as f64 {
        let n = exp.re as i32;
        if is_real(base) {
            real(base.re.powi(n))
        } else {
            base.powi(n)
        }
    } else if is_real(exp) && is_real(base) && base.re >= 0.0 {
        real(base.re.powf(exp.re))
    } else {
        base.powc(exp)
    }
}

fn apply(func: Func, z: Complex64) -> Option<Complex64> {
    let value = if is_real(z) {
        let x = z.re;
        match func {
            Func::Exp => real(x.exp()),
            Func::Cos => real(x.cos()),
            Func::Sin => real(x.sin()),
            Func::Tan => {
                if x.cos().abs() < TAN_POLE {
                    return None;
                }
                real(x.tan())
            }
            Func::Sqrt if x >= 0.0 => real(x.sqrt()),
            Func::Sqrt => Complex64::new(0.0, (-x).sqrt()),
            Func::Conj => z,
        }
    } else {
        match func {
            Func::Exp => z.exp(),
            Func::Cos => z.cos(),
            Func::Sin => z.sin(),
            Func::Tan => {
                if z.cos().norm() < TAN_POLE {
                    return None;
                }
                z.tan()
            }
            Func::Sqrt => z.sqrt(),
            Func::Conj => z.conj(),
        }
    };
    Some(value)
}
