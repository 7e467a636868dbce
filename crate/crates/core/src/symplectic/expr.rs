//! Scalar fields on `T*R^n`: expression trees over `x1..xn, xi1..xin`
//! with exact rational evaluation and symbolic differentiation.
//!
//! Input syntax (two equivalent forms, used by the CLI and fixtures):
//!
//! * prefix s-expressions: `(+ x1 (* 2 xi2))`, `(pow x1 2)`, `(min x1 x2)`;
//!   `+` and `*` are n-ary, `-` is unary or binary, `/` binary.
//! * JSON arrays: `["+", "x1", ["*", "2", "xi2"]]`; leaves are strings
//!   (`"x1"`, `"xi3"`, `"3/4"`, `"-2"`).
//!
//! `min`/`max` are piecewise and flagged non-C¹: differentiating them
//! produces a branch node that errors when evaluated on the kink.

use crate::error::{Error, Result};
use crate::rat::{self, QVec, Rat};
use num::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Sym {
    /// `x_{i+1}`
    Base(usize),
    /// `ξ_{i+1}`
    Fiber(usize),
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sym::Base(i) => write!(f, "x{}", i + 1),
            Sym::Fiber(i) => write!(f, "xi{}", i + 1),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(Rat),
    Var(Sym),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Min(Box<Expr>, Box<Expr>),
    Max(Box<Expr>, Box<Expr>),
    /// Piecewise selector produced by differentiating `min`/`max`:
    /// `below` where pivot < 0, `above` where pivot > 0, error at 0.
    Select { pivot: Box<Expr>, below: Box<Expr>, above: Box<Expr> },
}

/// An expression tree together with the ambient base dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    pub dim: usize,
    pub expr: Expr,
}

impl ScalarField {
    pub fn new(dim: usize, expr: Expr) -> Self {
        ScalarField { dim, expr: simplify(expr) }
    }

    pub fn constant(dim: usize, c: Rat) -> Self {
        ScalarField { dim, expr: Expr::Const(c) }
    }

    pub fn var(dim: usize, s: Sym) -> Self {
        ScalarField { dim, expr: Expr::Var(s) }
    }

    /// Affine field `⟨w, x⟩ + ⟨u, ξ⟩ + c`.
    pub fn affine(dim: usize, w: &[Rat], u: &[Rat], c: Rat) -> Self {
        let mut e = Expr::Const(c);
        for (i, wi) in w.iter().enumerate() {
            e = Expr::Add(
                Box::new(e),
                Box::new(Expr::Mul(Box::new(Expr::Const(wi.clone())), Box::new(Expr::Var(Sym::Base(i))))),
            );
        }
        for (i, ui) in u.iter().enumerate() {
            e = Expr::Add(
                Box::new(e),
                Box::new(Expr::Mul(Box::new(Expr::Const(ui.clone())), Box::new(Expr::Var(Sym::Fiber(i))))),
            );
        }
        ScalarField::new(dim, e)
    }

    /// Affine function of the base only: `⟨w, x − x₀⟩`.
    pub fn affine_through(dim: usize, w: &[Rat], x0: &[Rat]) -> Self {
        ScalarField::affine(dim, w, &rat::zeros(dim), -rat::dot(w, x0))
    }

    pub fn parse(dim: usize, input: &str) -> Result<Self> {
        let input = input.trim();
        let expr = if input.starts_with('[') || input.starts_with('{') {
            let v: serde_json::Value =
                serde_json::from_str(input).map_err(|e| Error::Parse(e.to_string()))?;
            expr_from_json(&v)?
        } else {
            parse_sexpr(input)?
        };
        Ok(ScalarField::new(dim, expr))
    }

    pub fn eval(&self, base: &[Rat], fiber: &[Rat]) -> Result<Rat> {
        eval_rat(&self.expr, base, fiber)
    }

    pub fn eval_f64(&self, base: &[f64], fiber: &[f64]) -> Result<f64> {
        eval_f64(&self.expr, base, fiber)
    }

    pub fn partial(&self, s: Sym) -> ScalarField {
        ScalarField { dim: self.dim, expr: simplify(partial(&self.expr, s)) }
    }

    /// Exact gradient `(∂/∂x, ∂/∂ξ)` at a rational point.
    pub fn gradient(&self, base: &[Rat], fiber: &[Rat]) -> Result<(QVec, QVec)> {
        let mut gx = Vec::with_capacity(self.dim);
        let mut gxi = Vec::with_capacity(self.dim);
        for i in 0..self.dim {
            gx.push(eval_rat(&partial(&self.expr, Sym::Base(i)), base, fiber)?);
        }
        for i in 0..self.dim {
            gxi.push(eval_rat(&partial(&self.expr, Sym::Fiber(i)), base, fiber)?);
        }
        Ok((gx, gxi))
    }

    pub fn is_division_free(&self) -> bool {
        division_free(&self.expr)
    }

    /// Constant value when the tree folds to one.
    pub fn constant_value(&self) -> Option<Rat> {
        match &self.expr {
            Expr::Const(c) => Some(c.clone()),
            _ => None,
        }
    }

    /// Multivariate polynomial form (exponents over x then ξ slots), when
    /// the tree is polynomial. Used to recognize affine and quadratic
    /// objectives for exact minimization.
    pub fn as_polynomial(&self) -> Option<Poly> {
        as_poly(&self.expr, self.dim)
    }

    pub fn uses_fiber(&self) -> bool {
        uses_fiber(&self.expr)
    }
}

fn uses_fiber(e: &Expr) -> bool {
    match e {
        Expr::Const(_) => false,
        Expr::Var(Sym::Fiber(_)) => true,
        Expr::Var(Sym::Base(_)) => false,
        Expr::Neg(a) | Expr::Pow(a, _) => uses_fiber(a),
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Min(a, b) | Expr::Max(a, b) => {
            uses_fiber(a) || uses_fiber(b)
        }
        Expr::Select { pivot, below, above } => {
            uses_fiber(pivot) || uses_fiber(below) || uses_fiber(above)
        }
    }
}

fn division_free(e: &Expr) -> bool {
    match e {
        Expr::Const(_) | Expr::Var(_) => true,
        Expr::Div(_, _) => false,
        Expr::Neg(a) => division_free(a),
        Expr::Pow(a, k) => *k >= 0 && division_free(a),
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Min(a, b) | Expr::Max(a, b) => {
            division_free(a) && division_free(b)
        }
        Expr::Select { pivot, below, above } => {
            division_free(pivot) && division_free(below) && division_free(above)
        }
    }
}

fn eval_rat(e: &Expr, base: &[Rat], fiber: &[Rat]) -> Result<Rat> {
    Ok(match e {
        Expr::Const(c) => c.clone(),
        Expr::Var(Sym::Base(i)) => base
            .get(*i)
            .ok_or(Error::DimensionMismatch { expected: i + 1, got: base.len() })?
            .clone(),
        Expr::Var(Sym::Fiber(i)) => fiber
            .get(*i)
            .ok_or(Error::DimensionMismatch { expected: i + 1, got: fiber.len() })?
            .clone(),
        Expr::Neg(a) => -eval_rat(a, base, fiber)?,
        Expr::Add(a, b) => eval_rat(a, base, fiber)? + eval_rat(b, base, fiber)?,
        Expr::Sub(a, b) => eval_rat(a, base, fiber)? - eval_rat(b, base, fiber)?,
        Expr::Mul(a, b) => eval_rat(a, base, fiber)? * eval_rat(b, base, fiber)?,
        Expr::Div(a, b) => {
            let d = eval_rat(b, base, fiber)?;
            if d.is_zero() {
                return Err(Error::DivisionByZero);
            }
            eval_rat(a, base, fiber)? / d
        }
        Expr::Pow(a, k) => {
            let v = eval_rat(a, base, fiber)?;
            if *k < 0 && v.is_zero() {
                return Err(Error::DivisionByZero);
            }
            pow_rat(&v, *k)
        }
        Expr::Min(a, b) => {
            let (va, vb) = (eval_rat(a, base, fiber)?, eval_rat(b, base, fiber)?);
            va.min(vb)
        }
        Expr::Max(a, b) => {
            let (va, vb) = (eval_rat(a, base, fiber)?, eval_rat(b, base, fiber)?);
            va.max(vb)
        }
        Expr::Select { pivot, below, above } => {
            let p = eval_rat(pivot, base, fiber)?;
            if p.is_zero() {
                return Err(Error::NonDifferentiable);
            }
            if p.is_negative() {
                eval_rat(below, base, fiber)?
            } else {
                eval_rat(above, base, fiber)?
            }
        }
    })
}

fn eval_f64(e: &Expr, base: &[f64], fiber: &[f64]) -> Result<f64> {
    Ok(match e {
        Expr::Const(c) => rat::rat_to_f64(c),
        Expr::Var(Sym::Base(i)) => base[*i],
        Expr::Var(Sym::Fiber(i)) => fiber[*i],
        Expr::Neg(a) => -eval_f64(a, base, fiber)?,
        Expr::Add(a, b) => eval_f64(a, base, fiber)? + eval_f64(b, base, fiber)?,
        Expr::Sub(a, b) => eval_f64(a, base, fiber)? - eval_f64(b, base, fiber)?,
        Expr::Mul(a, b) => eval_f64(a, base, fiber)? * eval_f64(b, base, fiber)?,
        Expr::Div(a, b) => eval_f64(a, base, fiber)? / eval_f64(b, base, fiber)?,
        Expr::Pow(a, k) => eval_f64(a, base, fiber)?.powi(*k),
        Expr::Min(a, b) => eval_f64(a, base, fiber)?.min(eval_f64(b, base, fiber)?),
        Expr::Max(a, b) => eval_f64(a, base, fiber)?.max(eval_f64(b, base, fiber)?),
        Expr::Select { pivot, below, above } => {
            let p = eval_f64(pivot, base, fiber)?;
            if p == 0.0 {
                return Err(Error::NonDifferentiable);
            }
            if p < 0.0 {
                eval_f64(below, base, fiber)?
            } else {
                eval_f64(above, base, fiber)?
            }
        }
    })
}

fn pow_rat(v: &Rat, k: i32) -> Rat {
    if k == 0 {
        return Rat::one();
    }
    let mut acc = Rat::one();
    for _ in 0..k.unsigned_abs() {
        acc *= v;
    }
    if k < 0 {
        Rat::one() / acc
    } else {
        acc
    }
}

fn partial(e: &Expr, s: Sym) -> Expr {
    match e {
        Expr::Const(_) => Expr::Const(Rat::zero()),
        Expr::Var(v) => Expr::Const(if *v == s { Rat::one() } else { Rat::zero() }),
        Expr::Neg(a) => Expr::Neg(Box::new(partial(a, s))),
        Expr::Add(a, b) => Expr::Add(Box::new(partial(a, s)), Box::new(partial(b, s))),
        Expr::Sub(a, b) => Expr::Sub(Box::new(partial(a, s)), Box::new(partial(b, s))),
        Expr::Mul(a, b) => Expr::Add(
            Box::new(Expr::Mul(Box::new(partial(a, s)), b.clone())),
            Box::new(Expr::Mul(a.clone(), Box::new(partial(b, s)))),
        ),
        Expr::Div(a, b) => Expr::Div(
            Box::new(Expr::Sub(
                Box::new(Expr::Mul(Box::new(partial(a, s)), b.clone())),
                Box::new(Expr::Mul(a.clone(), Box::new(partial(b, s)))),
            )),
            Box::new(Expr::Pow(b.clone(), 2)),
        ),
        Expr::Pow(a, k) => {
            if *k == 0 {
                Expr::Const(Rat::zero())
            } else {
                Expr::Mul(
                    Box::new(Expr::Mul(
                        Box::new(Expr::Const(rat::rat_i(*k as i64))),
                        Box::new(Expr::Pow(a.clone(), k - 1)),
                    )),
                    Box::new(partial(a, s)),
                )
            }
        }
        // Away from the kink, min/max follow the active branch; on the
        // kink the Select node raises NonDifferentiable at evaluation.
        Expr::Min(a, b) => Expr::Select {
            pivot: Box::new(Expr::Sub(a.clone(), b.clone())),
            below: Box::new(partial(a, s)),
            above: Box::new(partial(b, s)),
        },
        Expr::Max(a, b) => Expr::Select {
            pivot: Box::new(Expr::Sub(a.clone(), b.clone())),
            below: Box::new(partial(b, s)),
            above: Box::new(partial(a, s)),
        },
        Expr::Select { pivot, below, above } => Expr::Select {
            pivot: pivot.clone(),
            below: Box::new(partial(below, s)),
            above: Box::new(partial(above, s)),
        },
    }
}

/// Constant folding. Note `0 · e → 0` folds away the other operand, as
/// usual for symbolic trees.
pub fn simplify(e: Expr) -> Expr {
    match e {
        Expr::Neg(a) => {
            let a = simplify(*a);
            match a {
                Expr::Const(c) => Expr::Const(-c),
                Expr::Neg(inner) => *inner,
                other => Expr::Neg(Box::new(other)),
            }
        }
        Expr::Add(a, b) => {
            let (a, b) = (simplify(*a), simplify(*b));
            match (a, b) {
                (Expr::Const(x), Expr::Const(y)) => Expr::Const(x + y),
                (Expr::Const(z), other) | (other, Expr::Const(z)) if z.is_zero() => other,
                (a, b) => Expr::Add(Box::new(a), Box::new(b)),
            }
        }
        Expr::Sub(a, b) => {
            let (a, b) = (simplify(*a), simplify(*b));
            match (a, b) {
                (Expr::Const(x), Expr::Const(y)) => Expr::Const(x - y),
                (a, Expr::Const(z)) if z.is_zero() => a,
                (Expr::Const(z), b) if z.is_zero() => simplify(Expr::Neg(Box::new(b))),
                (a, b) => Expr::Sub(Box::new(a), Box::new(b)),
            }
        }
        Expr::Mul(a, b) => {
            let (a, b) = (simplify(*a), simplify(*b));
            match (a, b) {
                (Expr::Const(x), Expr::Const(y)) => Expr::Const(x * y),
                (Expr::Const(z), _) | (_, Expr::Const(z)) if z.is_zero() => Expr::Const(Rat::zero()),
                (Expr::Const(o), other) | (other, Expr::Const(o)) if o.is_one() => other,
                (a, b) => Expr::Mul(Box::new(a), Box::new(b)),
            }
        }
        Expr::Div(a, b) => {
            let (a, b) = (simplify(*a), simplify(*b));
            match (a, b) {
                (Expr::Const(x), Expr::Const(y)) if !y.is_zero() => Expr::Const(x / y),
                (a, Expr::Const(o)) if o.is_one() => a,
                (a, b) => Expr::Div(Box::new(a), Box::new(b)),
            }
        }
        Expr::Pow(a, k) => {
            let a = simplify(*a);
            match (a, k) {
                (_, 0) => Expr::Const(Rat::one()),
                (a, 1) => a,
                (Expr::Const(c), k) if k > 0 || !c.is_zero() => Expr::Const(pow_rat(&c, k)),
                (a, k) => Expr::Pow(Box::new(a), k),
            }
        }
        Expr::Min(a, b) => Expr::Min(Box::new(simplify(*a)), Box::new(simplify(*b))),
        Expr::Max(a, b) => Expr::Max(Box::new(simplify(*a)), Box::new(simplify(*b))),
        Expr::Select { pivot, below, above } => {
            let (pivot, below, above) = (simplify(*pivot), simplify(*below), simplify(*above));
            if below == above {
                return below;
            }
            Expr::Select { pivot: Box::new(pivot), below: Box::new(below), above: Box::new(above) }
        }
        leaf => leaf,
    }
}

// ---------------------------------------------------------------------------
// polynomial form

/// Multivariate polynomial: exponent vector (over `x1..xn, xi1..xin`) to
/// coefficient.
pub type Poly = BTreeMap<Vec<u32>, Rat>;

fn poly_add(a: &Poly, b: &Poly) -> Poly {
    let mut out = a.clone();
    for (m, c) in b {
        let e = out.entry(m.clone()).or_insert_with(Rat::zero);
        *e += c;
        if e.is_zero() {
            out.remove(m);
        }
    }
    out
}

fn poly_scale(a: &Poly, c: &Rat) -> Poly {
    if c.is_zero() {
        return Poly::new();
    }
    a.iter().map(|(m, v)| (m.clone(), v * c)).collect()
}

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            let m: Vec<u32> = ma.iter().zip(mb.iter()).map(|(x, y)| x + y).collect();
            let e = out.entry(m.clone()).or_insert_with(Rat::zero);
            *e += ca * cb;
            if e.is_zero() {
                out.remove(&m);
            }
        }
    }
    out
}

fn as_poly(e: &Expr, dim: usize) -> Option<Poly> {
    let width = 2 * dim;
    Some(match e {
        Expr::Const(c) => {
            if c.is_zero() {
                Poly::new()
            } else {
                [(vec![0u32; width], c.clone())].into_iter().collect()
            }
        }
        Expr::Var(s) => {
            let idx = match s {
                Sym::Base(i) => *i,
                Sym::Fiber(i) => dim + i,
            };
            if idx >= width {
                return None;
            }
            let mut m = vec![0u32; width];
            m[idx] = 1;
            [(m, Rat::one())].into_iter().collect()
        }
        Expr::Neg(a) => poly_scale(&as_poly(a, dim)?, &rat::rat_i(-1)),
        Expr::Add(a, b) => poly_add(&as_poly(a, dim)?, &as_poly(b, dim)?),
        Expr::Sub(a, b) => poly_add(&as_poly(a, dim)?, &poly_scale(&as_poly(b, dim)?, &rat::rat_i(-1))),
        Expr::Mul(a, b) => poly_mul(&as_poly(a, dim)?, &as_poly(b, dim)?),
        Expr::Div(a, b) => {
            let d = as_poly(b, dim)?;
            if d.len() == 1 {
                if let Some(c) = d.get(&vec![0u32; width]) {
                    return Some(poly_scale(&as_poly(a, dim)?, &(Rat::one() / c)));
                }
            }
            return None;
        }
        Expr::Pow(a, k) => {
            if *k < 0 {
                return None;
            }
            let base = as_poly(a, dim)?;
            let mut acc: Poly = [(vec![0u32; width], Rat::one())].into_iter().collect();
            for _ in 0..*k {
                acc = poly_mul(&acc, &base);
            }
            acc
        }
        Expr::Min(_, _) | Expr::Max(_, _) | Expr::Select { .. } => return None,
    })
}

// ---------------------------------------------------------------------------
// parsing and printing

fn parse_symbol(tok: &str) -> Result<Expr> {
    if let Some(rest) = tok.strip_prefix("xi") {
        let k: usize = rest.parse().map_err(|_| Error::Parse(format!("bad symbol {tok:?}")))?;
        if k == 0 {
            return Err(Error::Parse("symbols are 1-indexed".into()));
        }
        return Ok(Expr::Var(Sym::Fiber(k - 1)));
    }
    if let Some(rest) = tok.strip_prefix('x') {
        if let Ok(k) = rest.parse::<usize>() {
            if k == 0 {
                return Err(Error::Parse("symbols are 1-indexed".into()));
            }
            return Ok(Expr::Var(Sym::Base(k - 1)));
        }
    }
    match rat::parse_rat(tok) {
        Ok(c) => Ok(Expr::Const(c)),
        Err(e) => Err(Error::Parse(e)),
    }
}

fn tokenize(input: &str) -> Vec<String> {
    input
        .replace('(', " ( ")
        .replace(')', " ) ")
        .split_whitespace()
        .map(|s| s.to_string())
        .collect()
}

fn parse_sexpr(input: &str) -> Result<Expr> {
    let toks = tokenize(input);
    let (e, used) = parse_tokens(&toks, 0)?;
    if used != toks.len() {
        return Err(Error::Parse("trailing tokens".into()));
    }
    Ok(e)
}

fn parse_tokens(toks: &[String], pos: usize) -> Result<(Expr, usize)> {
    let Some(tok) = toks.get(pos) else {
        return Err(Error::Parse("unexpected end of input".into()));
    };
    if tok != "(" {
        return Ok((parse_symbol(tok)?, pos + 1));
    }
    let op = toks.get(pos + 1).ok_or_else(|| Error::Parse("missing operator".into()))?.clone();
    let mut args = Vec::new();
    let mut p = pos + 2;
    loop {
        match toks.get(p) {
            Some(t) if t == ")" => {
                p += 1;
                break;
            }
            Some(_) => {
                let (e, np) = parse_tokens(toks, p)?;
                args.push(e);
                p = np;
            }
            None => return Err(Error::Parse("unbalanced parentheses".into())),
        }
    }
    let expr = build_op(&op, args)?;
    Ok((expr, p))
}

fn build_op(op: &str, mut args: Vec<Expr>) -> Result<Expr> {
    let need = |n: usize, args: &Vec<Expr>| -> Result<()> {
        if args.len() != n {
            Err(Error::Parse(format!("operator {op:?} expects {n} arguments, got {}", args.len())))
        } else {
            Ok(())
        }
    };
    Ok(match op {
        "+" => {
            if args.is_empty() {
                return Err(Error::Parse("empty sum".into()));
            }
            let mut it = args.into_iter();
            let first = it.next().unwrap();
            it.fold(first, |acc, e| Expr::Add(Box::new(acc), Box::new(e)))
        }
        "*" => {
            if args.is_empty() {
                return Err(Error::Parse("empty product".into()));
            }
            let mut it = args.into_iter();
            let first = it.next().unwrap();
            it.fold(first, |acc, e| Expr::Mul(Box::new(acc), Box::new(e)))
        }
        "-" => match args.len() {
            1 => Expr::Neg(Box::new(args.pop().unwrap())),
            2 => {
                let b = args.pop().unwrap();
                let a = args.pop().unwrap();
                Expr::Sub(Box::new(a), Box::new(b))
            }
            n => return Err(Error::Parse(format!("operator \"-\" expects 1 or 2 arguments, got {n}"))),
        },
        "/" => {
            need(2, &args)?;
            let b = args.pop().unwrap();
            let a = args.pop().unwrap();
            Expr::Div(Box::new(a), Box::new(b))
        }
        "pow" => {
            need(2, &args)?;
            let k = match args.pop().unwrap() {
                Expr::Const(c) if c.denom().is_one() => {
                    let n = c.numer().clone();
                    i32::try_from(n).map_err(|_| Error::Parse("pow exponent out of range".into()))?
                }
                _ => return Err(Error::Parse("pow exponent must be an integer literal".into())),
            };
            Expr::Pow(Box::new(args.pop().unwrap()), k)
        }
        "min" => {
            need(2, &args)?;
            let b = args.pop().unwrap();
            let a = args.pop().unwrap();
            Expr::Min(Box::new(a), Box::new(b))
        }
        "max" => {
            need(2, &args)?;
            let b = args.pop().unwrap();
            let a = args.pop().unwrap();
            Expr::Max(Box::new(a), Box::new(b))
        }
        "neg" => {
            need(1, &args)?;
            Expr::Neg(Box::new(args.pop().unwrap()))
        }
        other => return Err(Error::Parse(format!("unknown operator {other:?}"))),
    })
}

fn expr_from_json(v: &serde_json::Value) -> Result<Expr> {
    match v {
        serde_json::Value::String(s) => parse_symbol(s),
        serde_json::Value::Number(n) => {
            parse_symbol(&n.to_string())
        }
        serde_json::Value::Array(items) => {
            let Some(serde_json::Value::String(op)) = items.first() else {
                return Err(Error::Parse("expression array must start with an operator string".into()));
            };
            let args = items[1..]
                .iter()
                .map(expr_from_json)
                .collect::<Result<Vec<_>>>()?;
            build_op(op, args)
        }
        other => Err(Error::Parse(format!("unsupported expression JSON: {other}"))),
    }
}

fn expr_to_json(e: &Expr) -> serde_json::Value {
    use serde_json::{json, Value};
    match e {
        Expr::Const(c) => Value::String(rat::fmt_rat(c)),
        Expr::Var(s) => Value::String(s.to_string()),
        Expr::Neg(a) => json!(["neg", expr_to_json(a)]),
        Expr::Add(a, b) => json!(["+", expr_to_json(a), expr_to_json(b)]),
        Expr::Sub(a, b) => json!(["-", expr_to_json(a), expr_to_json(b)]),
        Expr::Mul(a, b) => json!(["*", expr_to_json(a), expr_to_json(b)]),
        Expr::Div(a, b) => json!(["/", expr_to_json(a), expr_to_json(b)]),
        Expr::Pow(a, k) => json!(["pow", expr_to_json(a), k.to_string()]),
        Expr::Min(a, b) => json!(["min", expr_to_json(a), expr_to_json(b)]),
        Expr::Max(a, b) => json!(["max", expr_to_json(a), expr_to_json(b)]),
        Expr::Select { pivot, below, above } => {
            json!(["select", expr_to_json(pivot), expr_to_json(below), expr_to_json(above)])
        }
    }
}

impl Serialize for Expr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        expr_to_json(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Expr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        if let serde_json::Value::Array(items) = &v {
            if let Some(serde_json::Value::String(op)) = items.first() {
                if op == "select" && items.len() == 4 {
                    let pivot = expr_from_json(&items[1]).map_err(D::Error::custom)?;
                    let below = expr_from_json(&items[2]).map_err(D::Error::custom)?;
                    let above = expr_from_json(&items[3]).map_err(D::Error::custom)?;
                    return Ok(Expr::Select {
                        pivot: Box::new(pivot),
                        below: Box::new(below),
                        above: Box::new(above),
                    });
                }
            }
        }
        expr_from_json(&v).map_err(D::Error::custom)
    }
}

impl Serialize for ScalarField {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("ScalarField", 2)?;
        st.serialize_field("dim", &self.dim)?;
        st.serialize_field("expr", &self.expr)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for ScalarField {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            dim: usize,
            expr: Expr,
        }
        let raw = Raw::deserialize(d)?;
        Ok(ScalarField::new(raw.dim, raw.expr))
    }
}
