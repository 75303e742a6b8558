//! Library surface of the workbench command-line tool: the document
//! format, the expression grammar, the verb implementations and the
//! report envelope.  The `workbench` binary is a thin wrapper over
//! [`commands::run`].

pub mod commands;
pub mod doc;
pub mod expr;
pub mod report;
