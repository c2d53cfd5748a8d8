//! Recursive-descent parser for the quantum while-language.
//!
//! ```text
//! program   := "program" IDENT "vars" decl+ "pre" IDENT ";" "post" IDENT ";" "body" stmt
//! decl      := IDENT ":" ("qubit" | "int" "[" NAT "]") ";"
//! stmt      := base (";" base)* [";"]
//! base      := "skip"
//!            | IDENT ":=" "|0>"
//!            | IDENT-list ":=" IDENT "[" IDENT-list "]"
//!            | "measure" IDENT "[" IDENT-list "]" "{" (NAT "->" "{" stmt "}")+ "}"
//!            | "while" IDENT "," IDENT "[" IDENT-list "]" "invariant" IDENT "{" stmt "}"
//!            | "while_n" NAT IDENT "," IDENT "[" IDENT-list "]" "{" stmt "}"
//! ```
//!
//! In a unitary application the assigned list must equal the bracket
//! list. Measurement branches must be numbered 0..k−1 in order;
//! branch m resolves the matrix symbol `FAMILY_m`.

use super::ast::{Program, Span, Stmt, VarDecl, VarKind};
use super::lexer::{lex, Tok, Token};
use std::collections::HashSet;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{span}: {msg}")]
pub struct ParseError {
    pub span: Span,
    pub msg: String,
}

const RESERVED: &[&str] = &[
    "program", "vars", "pre", "post", "body", "skip", "measure", "while", "while_n", "invariant",
    "qubit", "int",
];

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    declared: HashSet<String>,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn span(&self) -> Span {
        self.peek()
            .map(|t| t.span)
            .or_else(|| self.toks.last().map(|t| t.span))
            .unwrap_or_default()
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            span: self.span(),
            msg: msg.into(),
        })
    }

    fn next(&mut self, what: &str) -> Result<Token, ParseError> {
        match self.toks.get(self.pos) {
            Some(t) => {
                self.pos += 1;
                Ok(t.clone())
            }
            None => self.err(format!("unexpected end of input, expected {what}")),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<Span, ParseError> {
        let t = self.next(&tok.to_string())?;
        if t.tok == tok {
            Ok(t.span)
        } else {
            Err(ParseError {
                span: t.span,
                msg: format!("expected {tok}, found {}", t.tok),
            })
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, Span), ParseError> {
        let t = self.next(what)?;
        match t.tok {
            Tok::Ident(s) => Ok((s, t.span)),
            other => Err(ParseError {
                span: t.span,
                msg: format!("expected {what}, found {other}"),
            }),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<Span, ParseError> {
        let (s, span) = self.ident(&format!("keyword `{kw}`"))?;
        if s == kw {
            Ok(span)
        } else {
            Err(ParseError {
                span,
                msg: format!("expected keyword `{kw}`, found `{s}`"),
            })
        }
    }

    fn nat(&mut self, what: &str) -> Result<(u64, Span), ParseError> {
        let t = self.next(what)?;
        match t.tok {
            Tok::Nat(d) => d
                .parse::<u64>()
                .map(|n| (n, t.span))
                .map_err(|_| ParseError {
                    span: t.span,
                    msg: format!("number `{d}` is too large"),
                }),
            other => Err(ParseError {
                span: t.span,
                msg: format!("expected {what}, found {other}"),
            }),
        }
    }

    fn peek_is(&self, tok: &Tok) -> bool {
        self.peek().map(|t| &t.tok == tok).unwrap_or(false)
    }

    fn peek_ident(&self) -> Option<&str> {
        match self.peek() {
            Some(Token {
                tok: Tok::Ident(s), ..
            }) => Some(s),
            _ => None,
        }
    }

    fn check_var(&self, name: &str, span: Span) -> Result<(), ParseError> {
        if self.declared.contains(name) {
            Ok(())
        } else {
            Err(ParseError {
                span,
                msg: format!("unknown variable `{name}`"),
            })
        }
    }

    fn var_list(&mut self) -> Result<Vec<String>, ParseError> {
        let mut vars = Vec::new();
        loop {
            let (v, span) = self.ident("variable name")?;
            self.check_var(&v, span)?;
            if vars.contains(&v) {
                return Err(ParseError {
                    span,
                    msg: format!("variable `{v}` repeated in register list"),
                });
            }
            vars.push(v);
            if self.peek_is(&Tok::Comma) {
                self.pos += 1;
            } else {
                return Ok(vars);
            }
        }
    }

    fn program(&mut self) -> Result<Program, ParseError> {
        self.keyword("program")?;
        let (name, _) = self.ident("program name")?;
        self.keyword("vars")?;

        let mut vars = Vec::new();
        while self.peek_ident() != Some("pre") {
            let (vname, vspan) = self.ident("variable name")?;
            if RESERVED.contains(&vname.as_str()) {
                return Err(ParseError {
                    span: vspan,
                    msg: format!("`{vname}` is a reserved word"),
                });
            }
            self.expect(Tok::Colon)?;
            let kind = match self.ident("`qubit` or `int`")? {
                (k, _) if k == "qubit" => VarKind::Qubit,
                (k, kspan) if k == "int" => {
                    self.expect(Tok::LBracket)?;
                    let (d, dspan) = self.nat("dimension")?;
                    self.expect(Tok::RBracket)?;
                    if d < 2 {
                        return Err(ParseError {
                            span: dspan,
                            msg: "int dimension must be at least 2".into(),
                        });
                    }
                    let _ = kspan;
                    VarKind::Int { dim: d as usize }
                }
                (other, ospan) => {
                    return Err(ParseError {
                        span: ospan,
                        msg: format!("expected `qubit` or `int`, found `{other}`"),
                    })
                }
            };
            self.expect(Tok::Semi)?;
            if self.declared.contains(&vname) {
                return Err(ParseError {
                    span: vspan,
                    msg: format!("duplicate variable `{vname}`"),
                });
            }
            self.declared.insert(vname.clone());
            vars.push(VarDecl {
                name: vname,
                kind,
                span: vspan,
            });
        }
        if vars.is_empty() {
            return self.err("a program needs at least one variable");
        }

        self.keyword("pre")?;
        let (pre, _) = self.ident("precondition symbol")?;
        self.expect(Tok::Semi)?;
        self.keyword("post")?;
        let (post, _) = self.ident("postcondition symbol")?;
        self.expect(Tok::Semi)?;
        self.keyword("body")?;
        let body = self.stmt()?;

        if let Some(t) = self.peek() {
            return Err(ParseError {
                span: t.span,
                msg: format!("trailing input after program body: {}", t.tok),
            });
        }
        Ok(Program {
            name,
            vars,
            pre,
            post,
            body,
        })
    }

    /// Statement sequence; trailing semicolons are tolerated.
    fn stmt(&mut self) -> Result<Stmt, ParseError> {
        let mut stmts = vec![self.base()?];
        while self.peek_is(&Tok::Semi) {
            self.pos += 1;
            if self.starts_base() {
                stmts.push(self.base()?);
            } else {
                break;
            }
        }
        Ok(if stmts.len() == 1 {
            stmts.pop().unwrap()
        } else {
            Stmt::Seq(stmts)
        })
    }

    fn starts_base(&self) -> bool {
        self.peek_ident().is_some()
    }

    fn base(&mut self) -> Result<Stmt, ParseError> {
        let Some(head) = self.peek_ident().map(str::to_owned) else {
            return self.err("expected a statement");
        };
        match head.as_str() {
            "skip" => {
                let span = self.span();
                self.pos += 1;
                Ok(Stmt::Skip { span })
            }
            "measure" => self.measure(),
            "while" => self.while_loop(),
            "while_n" => self.while_n(),
            _ => self.assignment(),
        }
    }

    /// `q := |0>` or `q1,…,qk := U[q1,…,qk]`.
    fn assignment(&mut self) -> Result<Stmt, ParseError> {
        let span = self.span();
        let lhs = self.var_list()?;
        self.expect(Tok::Assign)?;
        if self.peek_is(&Tok::KetZero) {
            self.pos += 1;
            if lhs.len() != 1 {
                return Err(ParseError {
                    span,
                    msg: "initialization assigns exactly one variable".into(),
                });
            }
            return Ok(Stmt::Init {
                var: lhs.into_iter().next().unwrap(),
                span,
            });
        }
        let (symbol, _) = self.ident("unitary symbol")?;
        self.expect(Tok::LBracket)?;
        let rhs = self.var_list()?;
        self.expect(Tok::RBracket)?;
        if lhs != rhs {
            return Err(ParseError {
                span,
                msg: format!(
                    "assigned register ({}) must equal the applied register ({})",
                    lhs.join(","),
                    rhs.join(",")
                ),
            });
        }
        Ok(Stmt::Unitary {
            symbol,
            vars: rhs,
            span,
        })
    }

    fn measure(&mut self) -> Result<Stmt, ParseError> {
        let span = self.keyword("measure")?;
        let (family, _) = self.ident("measurement family symbol")?;
        self.expect(Tok::LBracket)?;
        let vars = self.var_list()?;
        self.expect(Tok::RBracket)?;
        self.expect(Tok::LBrace)?;
        let mut branches = Vec::new();
        loop {
            let (m, mspan) = self.nat("branch outcome")?;
            if m != branches.len() as u64 {
                return Err(ParseError {
                    span: mspan,
                    msg: format!(
                        "measurement branches must be numbered consecutively from 0; expected {}, found {m}",
                        branches.len()
                    ),
                });
            }
            self.expect(Tok::Arrow)?;
            self.expect(Tok::LBrace)?;
            branches.push(self.stmt()?);
            self.expect(Tok::RBrace)?;
            if self.peek_is(&Tok::RBrace) {
                self.pos += 1;
                break;
            }
        }
        Ok(Stmt::Measure {
            family,
            vars,
            branches,
            span,
        })
    }

    fn while_loop(&mut self) -> Result<Stmt, ParseError> {
        let span = self.keyword("while")?;
        let (m0, _) = self.ident("exit-measurement symbol")?;
        self.expect(Tok::Comma)?;
        let (m1, _) = self.ident("continue-measurement symbol")?;
        self.expect(Tok::LBracket)?;
        let vars = self.var_list()?;
        self.expect(Tok::RBracket)?;
        self.keyword("invariant")?;
        let (invariant, _) = self.ident("invariant symbol")?;
        self.expect(Tok::LBrace)?;
        let body = self.stmt()?;
        self.expect(Tok::RBrace)?;
        Ok(Stmt::While {
            m0,
            m1,
            vars,
            invariant,
            body: Box::new(body),
            span,
        })
    }

    fn while_n(&mut self) -> Result<Stmt, ParseError> {
        let span = self.keyword("while_n")?;
        let (n, nspan) = self.nat("unrolling bound")?;
        let n = u32::try_from(n).map_err(|_| ParseError {
            span: nspan,
            msg: "unrolling bound is too large".into(),
        })?;
        let (m0, _) = self.ident("exit-measurement symbol")?;
        self.expect(Tok::Comma)?;
        let (m1, _) = self.ident("continue-measurement symbol")?;
        self.expect(Tok::LBracket)?;
        let vars = self.var_list()?;
        self.expect(Tok::RBracket)?;
        self.expect(Tok::LBrace)?;
        let body = self.stmt()?;
        self.expect(Tok::RBrace)?;
        Ok(Stmt::WhileN {
            n,
            m0,
            m1,
            vars,
            body: Box::new(body),
            span,
        })
    }
}

/// Parses a complete program source.
pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let toks = lex(text).map_err(|e| ParseError {
        span: e.span,
        msg: e.msg,
    })?;
    let mut p = Parser {
        toks,
        pos: 0,
        declared: HashSet::new(),
    };
    p.program()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_skip_program() {
        let p = parse_program("program t vars q:qubit; pre P; post P; body skip;").unwrap();
        assert_eq!(p.name, "t");
        assert_eq!(p.vars.len(), 1);
        assert!(matches!(p.body, Stmt::Skip { .. }));
    }

    #[test]
    fn parses_int_declaration_and_sequence() {
        let src = "program t vars q:qubit; r:int[3]; pre P; post Q; body q := |0>; r := |0>";
        let p = parse_program(src).unwrap();
        assert_eq!(p.vars[1].kind, VarKind::Int { dim: 3 });
        match &p.body {
            Stmt::Seq(ss) => assert_eq!(ss.len(), 2),
            other => panic!("expected sequence, got {other:?}"),
        }
    }

    #[test]
    fn rejects_unclosed_bracket() {
        let src = "program t vars q:qubit; pre P; post P; body q := U[q";
        let err = parse_program(src).unwrap_err();
        assert!(err.msg.contains("expected"), "{err}");
    }

    #[test]
    fn rejects_duplicate_variable() {
        let src = "program t vars q:qubit; q:qubit; pre P; post P; body skip";
        let err = parse_program(src).unwrap_err();
        assert!(err.msg.contains("duplicate variable"), "{err}");
    }

    #[test]
    fn rejects_unknown_variable() {
        let src = "program t vars q:qubit; pre P; post P; body p := |0>";
        let err = parse_program(src).unwrap_err();
        assert!(err.msg.contains("unknown variable"), "{err}");
    }

    #[test]
    fn rejects_mismatched_register_lists() {
        let src = "program t vars a:qubit; b:qubit; pre P; post P; body a,b := U[b,a]";
        let err = parse_program(src).unwrap_err();
        assert!(err.msg.contains("must equal"), "{err}");
    }

    #[test]
    fn rejects_out_of_order_branches() {
        let src = "program t vars q:qubit; pre P; post P; body \
                   measure M[q] { 1 -> { skip } 0 -> { skip } }";
        let err = parse_program(src).unwrap_err();
        assert!(err.msg.contains("numbered consecutively"), "{err}");
    }

    #[test]
    fn error_positions_point_at_the_problem() {
        let err = parse_program("program t vars q:qubit;\npre P; post P;\nbody q := U[q").unwrap_err();
        assert_eq!(err.span.line, 3);
    }

    #[test]
    fn while_requires_invariant() {
        let src = "program t vars q:qubit; pre P; post P; \
                   body while M0, M1 [q] { skip }";
        assert!(parse_program(src).is_err());
    }

    #[test]
    fn round_trips_through_pretty_printer() {
        let src = "program t vars a:qubit; b:qubit; r:int[2]; pre P; post Q; body \
                   a := |0>; a,b := U[a,b]; \
                   while M0, M1 [r] invariant Inv { b := H[b]; r := Up[r] }; \
                   measure N[a,b] { 0 -> { skip } 1 -> { skip; b := |0> } 2 -> { skip } 3 -> { skip } }";
        let mut p1 = parse_program(src).unwrap();
        let printed = p1.to_string();
        let mut p2 = parse_program(&printed).unwrap_or_else(|e| panic!("{e}\n{printed}"));
        p1.strip_spans();
        p2.strip_spans();
        assert_eq!(p1, p2);
    }
}
