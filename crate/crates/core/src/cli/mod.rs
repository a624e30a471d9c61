//! Command-line surface: expression language, session files, renderers and
//! the `gj` command dispatcher.
//!
//! Exit codes: 0 on success, 1 when a check or validation fails, 2 on usage
//! errors (syntax, resolution, degree mismatches, bad session files).

mod commands;
mod elaborate;
mod parse;
mod render;
mod session;

use thiserror::Error;

use crate::structures::StructureError;

pub use commands::{main_with_args, run, Cli, Outcome};
pub use elaborate::{Env, Value};
pub use parse::{parse, BinaryOp, Call, Expr, ExprKind, Pos};
pub use render::{render, Format, Item, Report};
pub use session::{Session, SCHEMA};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("syntax error at {pos}: {message}")]
    Syntax { pos: Pos, message: String },
    #[error("unresolved name `{name}` at {pos}")]
    Resolution { name: String, pos: Pos },
    #[error("degree mismatch at {pos}: cannot {op} {left} and {right}")]
    Degree { pos: Pos, op: &'static str, left: String, right: String },
    #[error("type error at {pos}: {message}")]
    Type { pos: Pos, message: String },
    #[error("{0}")]
    Usage(String),
    #[error("session file: {0}")]
    Session(String),
    #[error(transparent)]
    Library(#[from] StructureError),
}

impl From<crate::exterior::ExteriorError> for CliError {
    fn from(e: crate::exterior::ExteriorError) -> Self {
        CliError::Library(e.into())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Library(
                StructureError::Validation { .. }
                | StructureError::Domain(_)
                | StructureError::GenericRankOnly(_)
                | StructureError::StructureMismatch,
            ) => 1,
            _ => 2,
        }
    }
}

#[cfg(test)]
mod tests;
