//! The builtin predicate table.

use crate::syntax::term::PredKey;

/// How a builtin affects bindings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinKind {
    /// `=/2`: syntactic unification of the two arguments.
    Unify,
    /// Success implies every argument variable is ground (`is/2`,
    /// arithmetic comparisons, `ground/1`).
    Grounding,
    /// No bindings on success (`true`, `!`, type tests, `==`).
    Identity,
    /// Always fails.
    Fail,
}

pub fn builtin_kind(key: &PredKey) -> Option<BuiltinKind> {
    use BuiltinKind::*;
    Some(match (&*key.name, key.arity) {
        ("=", 2) => Unify,
        ("is", 2) | ("<", 2) | (">", 2) | ("=<", 2) | (">=", 2) | ("=:=", 2) | ("=\\=", 2)
        | ("ground", 1) => Grounding,
        ("true", 0) | ("!", 0) | ("nl", 0) | ("==", 2) | ("\\==", 2) | ("\\=", 2) | ("var", 1)
        | ("nonvar", 1) | ("atom", 1) | ("atomic", 1) | ("number", 1) | ("integer", 1)
        | ("write", 1) => Identity,
        ("fail", 0) | ("false", 0) => Fail,
        _ => return None,
    })
}

pub fn is_builtin(key: &PredKey) -> bool {
    builtin_kind(key).is_some()
}
