use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::base::{BaseKind, Coord};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Sqrt,
    Abs,
}

impl Func {
    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CmpOp {
    Le,
    Ge,
}

pub const VARIABLES: &[&str] = &["x", "theta", "theta1", "theta2", "s", "edge"];

/// Expression tree. Literals are non-negative; negation is explicit.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Real(f64),
    /// Imaginary literal `b i`.
    Imag(f64),
    Pi,
    Var(String),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Call(Func, Box<Expr>),
    /// `piecewise(var <= bound, then, otherwise)`; `bound` has no variables.
    Piecewise {
        var: String,
        op: CmpOp,
        bound: Box<Expr>,
        then: Box<Expr>,
        otherwise: Box<Expr>,
    },
}

fn positive_zero(z: Complex64) -> Complex64 {
    // Normalizes -0.0 so the principal square root does not flip sign.
    Complex64::new(z.re + 0.0, z.im + 0.0)
}

impl Expr {
    pub fn variables(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_variables(&mut out);
        out.sort_unstable();
        out.dedup();
        out
    }

    fn collect_variables<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Expr::Real(_) | Expr::Imag(_) | Expr::Pi => {}
            Expr::Var(v) => out.push(v),
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.collect_variables(out),
            Expr::Bin(_, a, b) => {
                a.collect_variables(out);
                b.collect_variables(out);
            }
            Expr::Piecewise { var, bound, then, otherwise, .. } => {
                out.push(var);
                bound.collect_variables(out);
                then.collect_variables(out);
                otherwise.collect_variables(out);
            }
        }
    }

    pub fn check_variables(&self, kind: BaseKind) -> Result<()> {
        for v in self.variables() {
            if !kind.variables().contains(&v) {
                return Err(Error::VariableMismatch { var: v.to_string(), base: kind.to_string() });
            }
        }
        Ok(())
    }

    /// Evaluates with variables looked up by `lookup`.
    pub fn eval_with(&self, lookup: &dyn Fn(&str) -> Option<f64>) -> Result<Complex64> {
        let var = |name: &str| {
            lookup(name).ok_or_else(|| Error::VariableMismatch {
                var: name.to_string(),
                base: "this".to_string(),
            })
        };
        Ok(match self {
            Expr::Real(x) => Complex64::new(*x, 0.0),
            Expr::Imag(y) => Complex64::new(0.0, *y),
            Expr::Pi => Complex64::new(PI, 0.0),
            Expr::Var(v) => Complex64::new(var(v)?, 0.0),
            Expr::Neg(a) => -a.eval_with(lookup)?,
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval_with(lookup)?, b.eval_with(lookup)?);
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                }
            }
            Expr::Pow(a, k) => a.eval_with(lookup)?.powu(*k),
            Expr::Call(f, a) => {
                let z = a.eval_with(lookup)?;
                match f {
                    Func::Sin => z.sin(),
                    Func::Cos => z.cos(),
                    Func::Exp => z.exp(),
                    Func::Sqrt => positive_zero(z).sqrt(),
                    Func::Abs => Complex64::new(z.norm(), 0.0),
                }
            }
            Expr::Piecewise { var: v, op, bound, then, otherwise } => {
                let value = var(v)?;
                let c = bound.eval_with(lookup)?.re;
                let holds = match op {
                    CmpOp::Le => value <= c,
                    CmpOp::Ge => value >= c,
                };
                if holds {
                    then.eval_with(lookup)?
                } else {
                    otherwise.eval_with(lookup)?
                }
            }
        })
    }

    /// Evaluates at a base coordinate.
    pub fn eval_coord(&self, coord: &Coord) -> Result<Complex64> {
        self.eval_with(&|name| coord.variable(name)).map_err(|e| match e {
            Error::VariableMismatch { var, .. } => {
                let base = match coord {
                    Coord::Interval(_) => BaseKind::Interval,
                    Coord::Circle(_) => BaseKind::Circle,
                    Coord::Graph { .. } => BaseKind::Graph,
                    Coord::Torus(..) => BaseKind::Torus2,
                };
                Error::VariableMismatch { var, base: base.to_string() }
            }
            other => other,
        })
    }

    /// Evaluates an expression without variables.
    pub fn eval_const(&self) -> Result<Complex64> {
        self.eval_with(&|_| None)
    }
}

/// Canonical fully parenthesized form; parsing it yields the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Real(x) => write!(f, "{x}"),
            Expr::Imag(y) => write!(f, "{y}i"),
            Expr::Pi => f.write_str("pi"),
            Expr::Var(v) => f.write_str(v),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Bin(op, a, b) => {
                let sym = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                };
                write!(f, "({a} {sym} {b})")
            }
            Expr::Pow(a, k) => write!(f, "({a}^{k})"),
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
            Expr::Piecewise { var, op, bound, then, otherwise } => {
                let sym = match op {
                    CmpOp::Le => "<=",
                    CmpOp::Ge => ">=",
                };
                write!(f, "piecewise({var} {sym} {bound}, {then}, {otherwise})")
            }
        }
    }
}
