//! Abstract syntax, parsing, and unification for the analyzed language.

pub mod builtins;
pub mod parser;
pub mod term;
pub mod unify;

pub use builtins::{builtin_kind, is_builtin, BuiltinKind};
pub use parser::{parse_program, parse_term};
pub use term::{Clause, EntryDecl, PredKey, Program, Term};
pub use unify::{solve, EquationSet};
