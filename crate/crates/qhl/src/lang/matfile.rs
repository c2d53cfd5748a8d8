//! The matrix-definition file format.
//!
//! A file is a sequence of definitions `NAME = [[e, …], [...]]` in any
//! order, UTF-8, `#` line comments. Entries are expressions over
//! integers, rationals `p/q`, `i`, `sqrt2`, `omega` (= e^{iπ/4}),
//! `+ − * /` and parentheses, evaluated exactly in Q(ζ₈). A float
//! literal anywhere in a matrix switches that whole matrix to the
//! float backend.

use super::ast::Span;
use super::lexer::{lex, Tok, Token};
use super::parser::ParseError;
use crate::matrix::Matrix;
use crate::scalar::{Cyclotomic, Scalar};
use num::complex::Complex64;
use num::traits::Zero;
use num::{BigInt, BigRational};
use std::collections::BTreeMap;

/// A parsed matrix, tagged by backend.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyMatrix {
    Exact(Matrix<Cyclotomic>),
    Float(Matrix<Complex64>),
}

impl AnyMatrix {
    pub fn dim(&self) -> usize {
        match self {
            AnyMatrix::Exact(m) => m.dim(),
            AnyMatrix::Float(m) => m.dim(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, AnyMatrix::Exact(_))
    }

    pub fn to_float(&self) -> Matrix<Complex64> {
        match self {
            AnyMatrix::Exact(m) => m.to_float(),
            AnyMatrix::Float(m) => m.clone(),
        }
    }
}

/// Named matrices; iteration order is name order, so reports are
/// deterministic.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SymbolTable {
    map: BTreeMap<String, AnyMatrix>,
}

impl SymbolTable {
    pub fn get(&self, name: &str) -> Option<&AnyMatrix> {
        self.map.get(name)
    }

    pub fn insert(&mut self, name: String, m: AnyMatrix) -> Option<AnyMatrix> {
        self.map.insert(name, m)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &AnyMatrix)> {
        self.map.iter()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn all_exact(&self) -> bool {
        self.map.values().all(AnyMatrix::is_exact)
    }
}

/// Entry expression tree; kept small because evaluation happens per
/// backend after the float scan.
#[derive(Debug, Clone)]
enum Expr {
    Int(BigInt),
    Float(f64),
    I,
    Sqrt2,
    Omega,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>, Span),
}

impl Expr {
    fn has_float(&self) -> bool {
        match self {
            Expr::Float(_) => true,
            Expr::Int(_) | Expr::I | Expr::Sqrt2 | Expr::Omega => false,
            Expr::Neg(a) => a.has_float(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b, _) => {
                a.has_float() || b.has_float()
            }
        }
    }

    fn eval_exact(&self) -> Result<Cyclotomic, ParseError> {
        Ok(match self {
            Expr::Int(n) => Cyclotomic::from_rational(BigRational::from_integer(n.clone())),
            Expr::Float(_) => unreachable!("float scanned before exact evaluation"),
            Expr::I => Cyclotomic::i(),
            Expr::Sqrt2 => Cyclotomic::sqrt2(),
            Expr::Omega => Cyclotomic::omega(),
            Expr::Neg(a) => -a.eval_exact()?,
            Expr::Add(a, b) => a.eval_exact()? + b.eval_exact()?,
            Expr::Sub(a, b) => a.eval_exact()? - b.eval_exact()?,
            Expr::Mul(a, b) => a.eval_exact()? * b.eval_exact()?,
            Expr::Div(a, b, span) => {
                let d = b.eval_exact()?;
                let inv = d.inv().map_err(|_| ParseError {
                    span: *span,
                    msg: "division by zero".into(),
                })?;
                a.eval_exact()? * inv
            }
        })
    }

    fn eval_float(&self) -> Result<Complex64, ParseError> {
        Ok(match self {
            Expr::Int(n) => Cyclotomic::from_rational(BigRational::from_integer(n.clone())).to_c64(),
            Expr::Float(x) => Complex64::new(*x, 0.0),
            Expr::I => Complex64::new(0.0, 1.0),
            Expr::Sqrt2 => Complex64::new(std::f64::consts::SQRT_2, 0.0),
            Expr::Omega => Cyclotomic::omega().to_c64(),
            Expr::Neg(a) => -a.eval_float()?,
            Expr::Add(a, b) => a.eval_float()? + b.eval_float()?,
            Expr::Sub(a, b) => a.eval_float()? - b.eval_float()?,
            Expr::Mul(a, b) => a.eval_float()? * b.eval_float()?,
            Expr::Div(a, b, span) => {
                let d = b.eval_float()?;
                if d.is_zero() {
                    return Err(ParseError {
                        span: *span,
                        msg: "division by zero".into(),
                    });
                }
                a.eval_float()? / d
            }
        })
    }
}

struct MatParser {
    toks: Vec<Token>,
    pos: usize,
}

impl MatParser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn span(&self) -> Span {
        self.toks
            .get(self.pos)
            .or_else(|| self.toks.last())
            .map(|t| t.span)
            .unwrap_or_default()
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            span: self.span(),
            msg: msg.into(),
        })
    }

    fn eat(&mut self, tok: Tok) -> Result<Span, ParseError> {
        match self.toks.get(self.pos) {
            Some(t) if t.tok == tok => {
                self.pos += 1;
                Ok(t.span)
            }
            Some(t) => Err(ParseError {
                span: t.span,
                msg: format!("expected {tok}, found {}", t.tok),
            }),
            None => self.err(format!("unexpected end of file, expected {tok}")),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = Expr::Add(Box::new(acc), Box::new(self.term()?));
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = Expr::Sub(Box::new(acc), Box::new(self.term()?));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    acc = Expr::Mul(Box::new(acc), Box::new(self.factor()?));
                }
                Some(Tok::Slash) => {
                    let span = self.span();
                    self.pos += 1;
                    acc = Expr::Div(Box::new(acc), Box::new(self.factor()?), span);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Minus) => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.factor()?)))
            }
            Some(Tok::Nat(d)) => {
                self.pos += 1;
                Ok(Expr::Int(d.parse::<BigInt>().expect("digits")))
            }
            Some(Tok::Float(x)) => {
                self.pos += 1;
                Ok(Expr::Float(x))
            }
            Some(Tok::Ident(id)) => {
                self.pos += 1;
                match id.as_str() {
                    "i" => Ok(Expr::I),
                    "sqrt2" => Ok(Expr::Sqrt2),
                    "omega" => Ok(Expr::Omega),
                    other => Err(ParseError {
                        span: self.toks[self.pos - 1].span,
                        msg: format!(
                            "unknown constant `{other}` (expected i, sqrt2 or omega)"
                        ),
                    }),
                }
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                self.eat(Tok::RParen)?;
                Ok(e)
            }
            _ => self.err("expected a matrix entry expression"),
        }
    }

    fn row(&mut self) -> Result<Vec<Expr>, ParseError> {
        self.eat(Tok::LBracket)?;
        let mut row = vec![self.expr()?];
        while self.peek() == Some(&Tok::Comma) {
            self.pos += 1;
            row.push(self.expr()?);
        }
        self.eat(Tok::RBracket)?;
        Ok(row)
    }

    fn matrix(&mut self) -> Result<(Vec<Vec<Expr>>, Span), ParseError> {
        let open = self.eat(Tok::LBracket)?;
        let mut rows = vec![self.row()?];
        while self.peek() == Some(&Tok::Comma) {
            self.pos += 1;
            rows.push(self.row()?);
        }
        self.eat(Tok::RBracket)?;
        Ok((rows, open))
    }
}

/// Parses a matrix file into a symbol table.
pub fn parse_matrix_file(text: &str) -> Result<SymbolTable, ParseError> {
    let toks = lex(text).map_err(|e| ParseError {
        span: e.span,
        msg: e.msg,
    })?;
    let mut p = MatParser { toks, pos: 0 };
    let mut table = SymbolTable::default();

    while p.pos < p.toks.len() {
        let (name, nspan) = match p.toks[p.pos].tok.clone() {
            Tok::Ident(s) => {
                let span = p.toks[p.pos].span;
                p.pos += 1;
                (s, span)
            }
            other => {
                return Err(ParseError {
                    span: p.toks[p.pos].span,
                    msg: format!("expected a matrix name, found {other}"),
                })
            }
        };
        p.eat(Tok::Eq)?;
        let (rows, open) = p.matrix()?;

        let dim = rows.len();
        for (i, r) in rows.iter().enumerate() {
            if r.len() != dim {
                return Err(ParseError {
                    span: open,
                    msg: format!(
                        "matrix `{name}` is not square: {dim} rows but row {i} has {} entries",
                        r.len()
                    ),
                });
            }
        }

        let any_float = rows.iter().flatten().any(Expr::has_float);
        let m = if any_float {
            let mut out = Matrix::<Complex64>::zeros(dim);
            for (i, r) in rows.iter().enumerate() {
                for (j, e) in r.iter().enumerate() {
                    let v = e.eval_float()?;
                    if !v.is_finite_value() {
                        return Err(ParseError {
                            span: open,
                            msg: format!("non-finite entry at ({i}, {j}) in `{name}`"),
                        });
                    }
                    out[(i, j)] = v;
                }
            }
            AnyMatrix::Float(out)
        } else {
            let mut out = Matrix::<Cyclotomic>::zeros(dim);
            for (i, r) in rows.iter().enumerate() {
                for (j, e) in r.iter().enumerate() {
                    out[(i, j)] = e.eval_exact()?;
                }
            }
            AnyMatrix::Exact(out)
        };

        if table.insert(name.clone(), m).is_some() {
            return Err(ParseError {
                span: nspan,
                msg: format!("symbol `{name}` defined twice"),
            });
        }
    }
    Ok(table)
}
