//! Surface syntax: the quantum while-language, the matrix-definition
//! file format, and well-formedness validation.

pub mod ast;
mod lexer;
mod matfile;
mod parser;
mod validate;

pub use ast::{Program, Span, Stmt, VarDecl, VarKind};
pub use matfile::{parse_matrix_file, AnyMatrix, SymbolTable};
pub use parser::{parse_program, ParseError};
pub use validate::{validate, BackendChoice, Model, ValidateError, ValidatedModel};
