// SPDX-License-Identifier: Apache-2.0

//! Scalar profile expressions and their JSON form.
//!
//! ```json
//! {"op": "mul", "args": [{"const": [1.0, -1.0]}, {"op": "square", "args": [{"op": "sin", "args": [{"t": null}]}]}]}
//! ```

use num_complex::Complex64;
use serde_json::{json, Map, Value};

use super::series::Series;
use crate::error::{Error, Result};
use crate::linalg::{dense_expm, DenseMatrix};

/// Nesting depth accepted by the parser.
pub const MAX_DEPTH: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(Complex64),
    T,
    Add(Vec<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Mul(Vec<Expr>),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Exp(Box<Expr>),
    Square(Box<Expr>),
}

impl Expr {
    pub fn constant(re: f64, im: f64) -> Self {
        Expr::Const(Complex64::new(re, im))
    }

    pub fn mul(args: Vec<Expr>) -> Self {
        Expr::Mul(args)
    }

    pub fn sin(arg: Expr) -> Self {
        Expr::Sin(Box::new(arg))
    }

    pub fn cos(arg: Expr) -> Self {
        Expr::Cos(Box::new(arg))
    }

    pub fn exp(arg: Expr) -> Self {
        Expr::Exp(Box::new(arg))
    }

    pub fn square(arg: Expr) -> Self {
        Expr::Square(Box::new(arg))
    }

    /// True when the expression is the literal constant zero.
    pub fn is_zero_literal(&self) -> bool {
        matches!(self, Expr::Const(c) if *c == Complex64::new(0.0, 0.0))
    }

    pub fn eval(&self, t: Complex64) -> Complex64 {
        match self {
            Expr::Const(c) => *c,
            Expr::T => t,
            Expr::Add(xs) => xs.iter().map(|x| x.eval(t)).sum(),
            Expr::Sub(a, b) => a.eval(t) - b.eval(t),
            Expr::Neg(a) => -a.eval(t),
            Expr::Mul(xs) => xs.iter().map(|x| x.eval(t)).product(),
            Expr::Sin(a) => a.eval(t).sin(),
            Expr::Cos(a) => a.eval(t).cos(),
            Expr::Exp(a) => a.eval(t).exp(),
            Expr::Square(a) => {
                let v = a.eval(t);
                v * v
            }
        }
    }

    /// Taylor coefficients about `t0` up to (not including) `s^order`.
    pub fn taylor(&self, t0: f64, order: usize) -> Series {
        match self {
            Expr::Const(c) => Series::constant(*c, order),
            Expr::T => Series::variable(t0, order),
            Expr::Add(xs) => xs
                .iter()
                .fold(Series::constant(Complex64::new(0.0, 0.0), order), |acc, x| {
                    acc.add(&x.taylor(t0, order))
                }),
            Expr::Sub(a, b) => a.taylor(t0, order).sub(&b.taylor(t0, order)),
            Expr::Neg(a) => a.taylor(t0, order).neg(),
            Expr::Mul(xs) => xs
                .iter()
                .fold(Series::constant(Complex64::new(1.0, 0.0), order), |acc, x| {
                    acc.mul(&x.taylor(t0, order))
                }),
            Expr::Sin(a) => a.taylor(t0, order).sin_cos().0,
            Expr::Cos(a) => a.taylor(t0, order).sin_cos().1,
            Expr::Exp(a) => a.taylor(t0, order).exp(),
            Expr::Square(a) => {
                let s = a.taylor(t0, order);
                s.mul(&s)
            }
        }
    }

    /// Evaluates the expression with `t` replaced by the square matrix `m`.
    pub fn eval_matrix(&self, m: &DenseMatrix) -> Result<DenseMatrix> {
        let n = m.nrows();
        let id = DenseMatrix::identity(n, n);
        let i = Complex64::new(0.0, 1.0);
        Ok(match self {
            Expr::Const(c) => id * *c,
            Expr::T => m.clone(),
            Expr::Add(xs) => {
                let mut acc = DenseMatrix::zeros(n, n);
                for x in xs {
                    acc += x.eval_matrix(m)?;
                }
                acc
            }
            Expr::Sub(a, b) => a.eval_matrix(m)? - b.eval_matrix(m)?,
            Expr::Neg(a) => -a.eval_matrix(m)?,
            Expr::Mul(xs) => {
                let mut acc = id;
                for x in xs {
                    acc *= x.eval_matrix(m)?;
                }
                acc
            }
            Expr::Sin(a) => {
                let x = a.eval_matrix(m)?;
                (matrix_exp(&(&x * i))? - matrix_exp(&(&x * -i))?) / (i * 2.0)
            }
            Expr::Cos(a) => {
                let x = a.eval_matrix(m)?;
                (matrix_exp(&(&x * i))? + matrix_exp(&(&x * -i))?) / Complex64::new(2.0, 0.0)
            }
            Expr::Exp(a) => matrix_exp(&a.eval_matrix(m)?)?,
            Expr::Square(a) => {
                let x = a.eval_matrix(m)?;
                &x * &x
            }
        })
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text)?;
        Self::from_json(&v)
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        parse(v, 0)
    }

    pub fn to_json(&self) -> Value {
        let node = |op: &str, args: Vec<Value>| json!({ "op": op, "args": args });
        let one = |op: &str, a: &Expr| node(op, vec![a.to_json()]);
        match self {
            Expr::Const(c) => json!({ "const": [c.re, c.im] }),
            Expr::T => json!({ "t": null }),
            Expr::Add(xs) => node("add", xs.iter().map(Expr::to_json).collect()),
            Expr::Sub(a, b) => node("sub", vec![a.to_json(), b.to_json()]),
            Expr::Neg(a) => one("sub", a),
            Expr::Mul(xs) => node("mul", xs.iter().map(Expr::to_json).collect()),
            Expr::Sin(a) => one("sin", a),
            Expr::Cos(a) => one("cos", a),
            Expr::Exp(a) => one("exp", a),
            Expr::Square(a) => one("square", a),
        }
    }
}

/// `exp(x)`; for lower triangular `x` with constant diagonal `d` this is
/// `e^d` times the terminating series of the nilpotent remainder.
fn matrix_exp(x: &DenseMatrix) -> Result<DenseMatrix> {
    let n = x.nrows();
    if n == 0 {
        return Ok(x.clone());
    }
    let d = x[(0, 0)];
    let shifted_nilpotent = (0..n).all(|j| {
        x[(j, j)] == d && (0..j).all(|i| x[(i, j)] == Complex64::new(0.0, 0.0))
    });
    if !shifted_nilpotent {
        return dense_expm(x);
    }
    let mut nil = x.clone();
    nil.fill_diagonal(Complex64::new(0.0, 0.0));
    let mut term = DenseMatrix::identity(n, n);
    let mut sum = term.clone();
    for k in 1..n {
        term = (&term * &nil) / Complex64::new(k as f64, 0.0);
        sum += &term;
    }
    Ok(sum * d.exp())
}

fn err(msg: impl Into<String>) -> Error {
    Error::Expression(msg.into())
}

fn parse(v: &Value, depth: usize) -> Result<Expr> {
    if depth > MAX_DEPTH {
        return Err(err(format!("nesting deeper than {MAX_DEPTH}")));
    }
    let obj: &Map<String, Value> = v.as_object().ok_or_else(|| err(format!("expected an object, got {v}")))?;
    if obj.len() == 1 {
        if let Some(t) = obj.get("t") {
            if !t.is_null() {
                return Err(err("leaf 't' takes null"));
            }
            return Ok(Expr::T);
        }
        if let Some(c) = obj.get("const") {
            return parse_const(c);
        }
    }
    let op = obj
        .get("op")
        .and_then(Value::as_str)
        .ok_or_else(|| err("node needs a string 'op' or must be a 't'/'const' leaf"))?;
    if let Some(extra) = obj.keys().find(|k| *k != "op" && *k != "args") {
        return Err(err(format!("unexpected key '{extra}'")));
    }
    let args = obj
        .get("args")
        .and_then(Value::as_array)
        .ok_or_else(|| err(format!("'{op}' needs an 'args' array")))?
        .iter()
        .map(|a| parse(a, depth + 1))
        .collect::<Result<Vec<_>>>()?;
    let arity = |want: usize| {
        if args.len() == want {
            Ok(())
        } else {
            Err(err(format!("'{op}' takes {want} argument(s), got {}", args.len())))
        }
    };
    let mut it = args.clone().into_iter();
    let mut take = || Box::new(it.next().expect("arity checked"));
    Ok(match op {
        "add" | "mul" => {
            if args.is_empty() {
                return Err(err(format!("'{op}' needs at least one argument")));
            }
            if op == "add" {
                Expr::Add(args)
            } else {
                Expr::Mul(args)
            }
        }
        "sub" => match args.len() {
            1 => Expr::Neg(take()),
            2 => Expr::Sub(take(), take()),
            n => return Err(err(format!("'sub' takes 1 or 2 arguments, got {n}"))),
        },
        "sin" => {
            arity(1)?;
            Expr::Sin(take())
        }
        "cos" => {
            arity(1)?;
            Expr::Cos(take())
        }
        "exp" => {
            arity(1)?;
            Expr::Exp(take())
        }
        "square" => {
            arity(1)?;
            Expr::Square(take())
        }
        other => return Err(err(format!("unknown op '{other}'"))),
    })
}

fn parse_const(c: &Value) -> Result<Expr> {
    let part = |v: &Value| v.as_f64().filter(|x| x.is_finite());
    match c {
        Value::Array(parts) if parts.len() == 2 => match (part(&parts[0]), part(&parts[1])) {
            (Some(re), Some(im)) => Ok(Expr::constant(re, im)),
            _ => Err(err("const parts must be finite numbers")),
        },
        Value::Number(_) => part(c)
            .map(|re| Expr::constant(re, 0.0))
            .ok_or_else(|| err("const must be finite")),
        _ => Err(err("const must be [re, im] or a number")),
    }
}
