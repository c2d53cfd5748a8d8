//! Abstract syntax of the quantum while-language.

use std::fmt;

/// Source position, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VarKind {
    /// Dimension-2 quantum bit.
    Qubit,
    /// Finite truncation of an integer-typed variable: basis
    /// states |0⟩ … |d−1⟩.
    Int { dim: usize },
}

impl VarKind {
    pub fn dim(&self) -> usize {
        match self {
            VarKind::Qubit => 2,
            VarKind::Int { dim } => *dim,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarDecl {
    pub name: String,
    pub kind: VarKind,
    pub span: Span,
}

/// Statements. `Seq` is n-ary; an empty body never parses.
#[derive(Debug, Clone, PartialEq)]
pub enum Stmt {
    Skip {
        span: Span,
    },
    /// `q := |0>`.
    Init {
        var: String,
        span: Span,
    },
    /// `q1,…,qk := U[q1,…,qk]`.
    Unitary {
        symbol: String,
        vars: Vec<String>,
        span: Span,
    },
    Seq(Vec<Stmt>),
    /// `measure F[vars] { 0 -> {…} … k−1 -> {…} }`; branch m uses
    /// the matrix named `F_m`.
    Measure {
        family: String,
        vars: Vec<String>,
        branches: Vec<Stmt>,
        span: Span,
    },
    /// `while M0, M1 [vars] invariant Q { body }` — outcome 0 exits,
    /// outcome 1 runs the body. The invariant is mandatory.
    While {
        m0: String,
        m1: String,
        vars: Vec<String>,
        invariant: String,
        body: Box<Stmt>,
        span: Span,
    },
    /// `while_n N M0, M1 [vars] { body }` — bounded analysis without
    /// an invariant.
    WhileN {
        n: u32,
        m0: String,
        m1: String,
        vars: Vec<String>,
        body: Box<Stmt>,
        span: Span,
    },
}

impl Stmt {
    pub fn span(&self) -> Span {
        match self {
            Stmt::Skip { span }
            | Stmt::Init { span, .. }
            | Stmt::Unitary { span, .. }
            | Stmt::Measure { span, .. }
            | Stmt::While { span, .. }
            | Stmt::WhileN { span, .. } => *span,
            Stmt::Seq(ss) => ss.first().map(Stmt::span).unwrap_or_default(),
        }
    }

    /// Erases source positions; used when comparing round-tripped
    /// trees.
    pub fn strip_spans(&mut self) {
        match self {
            Stmt::Skip { span }
            | Stmt::Init { span, .. }
            | Stmt::Unitary { span, .. } => *span = Span::default(),
            Stmt::Seq(ss) => ss.iter_mut().for_each(Stmt::strip_spans),
            Stmt::Measure { branches, span, .. } => {
                *span = Span::default();
                branches.iter_mut().for_each(Stmt::strip_spans);
            }
            Stmt::While { body, span, .. } | Stmt::WhileN { body, span, .. } => {
                *span = Span::default();
                body.strip_spans();
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    pub name: String,
    pub vars: Vec<VarDecl>,
    /// Symbol naming the precondition matrix.
    pub pre: String,
    /// Symbol naming the postcondition matrix.
    pub post: String,
    pub body: Stmt,
}

impl Program {
    pub fn strip_spans(&mut self) {
        for v in &mut self.vars {
            v.span = Span::default();
        }
        self.body.strip_spans();
    }
}

fn write_indent(f: &mut fmt::Formatter<'_>, depth: usize) -> fmt::Result {
    write!(f, "{}", "  ".repeat(depth))
}

fn write_stmt(f: &mut fmt::Formatter<'_>, s: &Stmt, depth: usize) -> fmt::Result {
    match s {
        Stmt::Skip { .. } => {
            write_indent(f, depth)?;
            write!(f, "skip")
        }
        Stmt::Init { var, .. } => {
            write_indent(f, depth)?;
            write!(f, "{var} := |0>")
        }
        Stmt::Unitary { symbol, vars, .. } => {
            write_indent(f, depth)?;
            write!(f, "{} := {symbol}[{}]", vars.join(","), vars.join(","))
        }
        Stmt::Seq(ss) => {
            for (i, s) in ss.iter().enumerate() {
                if i > 0 {
                    writeln!(f, ";")?;
                }
                write_stmt(f, s, depth)?;
            }
            Ok(())
        }
        Stmt::Measure {
            family,
            vars,
            branches,
            ..
        } => {
            write_indent(f, depth)?;
            writeln!(f, "measure {family}[{}] {{", vars.join(","))?;
            for (m, b) in branches.iter().enumerate() {
                write_indent(f, depth + 1)?;
                writeln!(f, "{m} -> {{")?;
                write_stmt(f, b, depth + 2)?;
                writeln!(f)?;
                write_indent(f, depth + 1)?;
                writeln!(f, "}}")?;
            }
            write_indent(f, depth)?;
            write!(f, "}}")
        }
        Stmt::While {
            m0,
            m1,
            vars,
            invariant,
            body,
            ..
        } => {
            write_indent(f, depth)?;
            writeln!(f, "while {m0}, {m1} [{}] invariant {invariant} {{", vars.join(","))?;
            write_stmt(f, body, depth + 1)?;
            writeln!(f)?;
            write_indent(f, depth)?;
            write!(f, "}}")
        }
        Stmt::WhileN {
            n,
            m0,
            m1,
            vars,
            body,
            ..
        } => {
            write_indent(f, depth)?;
            writeln!(f, "while_n {n} {m0}, {m1} [{}] {{", vars.join(","))?;
            write_stmt(f, body, depth + 1)?;
            writeln!(f)?;
            write_indent(f, depth)?;
            write!(f, "}}")
        }
    }
}

impl fmt::Display for Stmt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_stmt(f, self, 0)
    }
}

impl fmt::Display for Program {
    /// Pretty-prints back into the surface syntax; `parse ∘ print`
    /// is the identity on span-stripped trees.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "program {}", self.name)?;
        writeln!(f, "vars")?;
        for v in &self.vars {
            match &v.kind {
                VarKind::Qubit => writeln!(f, "  {}: qubit;", v.name)?,
                VarKind::Int { dim } => writeln!(f, "  {}: int[{dim}];", v.name)?,
            }
        }
        writeln!(f, "pre {};", self.pre)?;
        writeln!(f, "post {};", self.post)?;
        writeln!(f, "body")?;
        write_stmt(f, &self.body, 0)?;
        writeln!(f)
    }
}
