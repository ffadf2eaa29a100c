//! Reference semantics for a SQL query subset: parsing, printing, values,
//! bag tables, expression evaluation, relational operators, execution and
//! semantic coverage accounting.

pub mod ast;
pub mod coverage;
pub mod error;
pub mod eval;
pub mod exec;
pub mod fixture;
pub mod keyword;
pub mod lexer;
pub mod options;
pub mod parser;
pub mod printer;
pub mod relops;
pub mod table;
pub mod validate;
pub mod value;

pub use ast::Query;
pub use error::{FixtureError, QueryError, SyntaxError};
pub use exec::{execute, execute_with};
pub use options::{ExecOptions, Fault, JoinMode};
pub use parser::parse;
pub use printer::print;
pub use table::{BagTable, Catalog};
pub use validate::validate;
pub use value::Value;
