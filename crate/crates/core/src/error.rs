use thiserror::Error;

use crate::varset::VarSet;

/// Contract violations in domain operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DomainError {
    #[error("augment: variables {0:?} are already in the domain")]
    NotFresh(VarSet),
    #[error("operands range over different domains ({left:?} vs {right:?})")]
    DomainMismatch { left: VarSet, right: VarSet },
    #[error("operands belong to different abstract domains")]
    KindMismatch,
    #[error("expansion of a clique with {0} variables exceeds the enumeration limit")]
    ExpansionTooLarge(usize),
    #[error("clique detection requires a minimal pair")]
    NotMinimal,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProgramError {
    #[error(transparent)]
    Syntax(#[from] ParseError),
    #[error("duplicate entry declaration for {0}")]
    DuplicateEntry(String),
    #[error("entry declaration references undefined predicate {0}")]
    UndefinedEntry(String),
    #[error("clause for {0} uses more than {1} variables")]
    TooManyVariables(String, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("unknown predicate {0}")]
    UnknownPredicate(String),
    #[error("call to {0} needs more than {1} variables in one substitution")]
    TooManyVariables(String, usize),
    #[error("representation exceeded {0} groups")]
    ResourceLimit(usize),
    #[error("fixpoint did not stabilise after {0} passes")]
    NoConvergence(usize),
}
