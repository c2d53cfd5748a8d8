//! Shared lexer for the program and matrix-file grammars.
//!
//! Whitespace-insensitive; `#` starts a line comment. Number tokens
//! keep their digit strings so the matrix-file parser can build
//! arbitrary-precision values.

use super::ast::Span;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    /// Unsigned decimal integer, raw digits.
    Nat(String),
    /// Decimal float literal (contains '.' or an exponent).
    Float(f64),
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Semi,
    Colon,
    /// `:=`
    Assign,
    /// `->`
    Arrow,
    /// `|0>`
    KetZero,
    Eq,
    Plus,
    Minus,
    Star,
    Slash,
}

impl std::fmt::Display for Tok {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Nat(s) => write!(f, "number `{s}`"),
            Tok::Float(x) => write!(f, "float `{x}`"),
            Tok::LBracket => write!(f, "`[`"),
            Tok::RBracket => write!(f, "`]`"),
            Tok::LBrace => write!(f, "`{{`"),
            Tok::RBrace => write!(f, "`}}`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::Comma => write!(f, "`,`"),
            Tok::Semi => write!(f, "`;`"),
            Tok::Colon => write!(f, "`:`"),
            Tok::Assign => write!(f, "`:=`"),
            Tok::Arrow => write!(f, "`->`"),
            Tok::KetZero => write!(f, "`|0>`"),
            Tok::Eq => write!(f, "`=`"),
            Tok::Plus => write!(f, "`+`"),
            Tok::Minus => write!(f, "`-`"),
            Tok::Star => write!(f, "`*`"),
            Tok::Slash => write!(f, "`/`"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{span}: {msg}")]
pub struct LexError {
    pub span: Span,
    pub msg: String,
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

pub fn lex(text: &str) -> Result<Vec<Token>, LexError> {
    let mut out = Vec::new();
    let mut line: u32 = 1;
    let mut col: u32 = 1;
    let mut it = text.chars().peekable();

    macro_rules! bump {
        () => {{
            let c = it.next();
            if c == Some('\n') {
                line += 1;
                col = 1;
            } else if c.is_some() {
                col += 1;
            }
            c
        }};
    }

    while let Some(&c) = it.peek() {
        let span = Span { line, col };
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                bump!();
            }
            '#' => {
                while let Some(&c) = it.peek() {
                    if c == '\n' {
                        break;
                    }
                    bump!();
                }
            }
            '[' => {
                bump!();
                out.push(Token { tok: Tok::LBracket, span });
            }
            ']' => {
                bump!();
                out.push(Token { tok: Tok::RBracket, span });
            }
            '{' => {
                bump!();
                out.push(Token { tok: Tok::LBrace, span });
            }
            '}' => {
                bump!();
                out.push(Token { tok: Tok::RBrace, span });
            }
            '(' => {
                bump!();
                out.push(Token { tok: Tok::LParen, span });
            }
            ')' => {
                bump!();
                out.push(Token { tok: Tok::RParen, span });
            }
            ',' => {
                bump!();
                out.push(Token { tok: Tok::Comma, span });
            }
            ';' => {
                bump!();
                out.push(Token { tok: Tok::Semi, span });
            }
            '=' => {
                bump!();
                out.push(Token { tok: Tok::Eq, span });
            }
            '+' => {
                bump!();
                out.push(Token { tok: Tok::Plus, span });
            }
            '*' => {
                bump!();
                out.push(Token { tok: Tok::Star, span });
            }
            '/' => {
                bump!();
                out.push(Token { tok: Tok::Slash, span });
            }
            ':' => {
                bump!();
                if it.peek() == Some(&'=') {
                    bump!();
                    out.push(Token { tok: Tok::Assign, span });
                } else {
                    out.push(Token { tok: Tok::Colon, span });
                }
            }
            '-' => {
                bump!();
                if it.peek() == Some(&'>') {
                    bump!();
                    out.push(Token { tok: Tok::Arrow, span });
                } else {
                    out.push(Token { tok: Tok::Minus, span });
                }
            }
            '|' => {
                bump!();
                if it.peek() == Some(&'0') {
                    bump!();
                    if it.peek() == Some(&'>') {
                        bump!();
                        out.push(Token { tok: Tok::KetZero, span });
                        continue;
                    }
                }
                return Err(LexError {
                    span,
                    msg: "expected `|0>`".into(),
                });
            }
            c if c.is_ascii_digit() => {
                let mut digits = String::new();
                let mut is_float = false;
                while let Some(&c) = it.peek() {
                    if c.is_ascii_digit() {
                        digits.push(c);
                        bump!();
                    } else if c == '.' {
                        is_float = true;
                        digits.push(c);
                        bump!();
                    } else if (c == 'e' || c == 'E') && !digits.is_empty() {
                        // Exponent only when followed by digits or
                        // a sign: `1e-3`.
                        let mut la = it.clone();
                        la.next();
                        match la.peek() {
                            Some(&d) if d.is_ascii_digit() || d == '+' || d == '-' => {
                                is_float = true;
                                digits.push(c);
                                bump!();
                                if let Some(&sgn) = it.peek() {
                                    if sgn == '+' || sgn == '-' {
                                        digits.push(sgn);
                                        bump!();
                                    }
                                }
                            }
                            _ => break,
                        }
                    } else {
                        break;
                    }
                }
                if is_float {
                    let v: f64 = digits.parse().map_err(|_| LexError {
                        span,
                        msg: format!("malformed float literal `{digits}`"),
                    })?;
                    out.push(Token { tok: Tok::Float(v), span });
                } else {
                    out.push(Token { tok: Tok::Nat(digits), span });
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut id = String::new();
                while let Some(&c) = it.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        id.push(c);
                        bump!();
                    } else {
                        break;
                    }
                }
                out.push(Token { tok: Tok::Ident(id), span });
            }
            other => {
                return Err(LexError {
                    span,
                    msg: format!("unexpected character `{other}`"),
                });
            }
        }
    }
    Ok(out)
}
