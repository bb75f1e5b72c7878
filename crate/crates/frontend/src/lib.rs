//! Model language, built-in models, pipeline and reports.

pub mod ast;
pub mod builtin;
pub mod error;
pub mod lexer;
pub mod model;
pub mod parser;
pub mod pipeline;
pub mod printer;
pub mod report;

pub use error::{ModelError, StageError};
pub use model::{parse_model, Model};
pub use parser::{parse_expr, parse_model_ast};
pub use printer::{print_expr, print_model};
