//! Set-sharing analysis for a Prolog subset over four abstract domains:
//! plain sharing, sharing with freeness, and their clique-based
//! counterparts, driven by a top-down multivariant fixpoint.

pub mod bench;
pub mod clique;
pub mod engine;
pub mod error;
pub mod freeness;
pub mod groups;
pub mod metrics;
pub mod normalize;
pub mod notation;
pub mod oracle;
pub mod report;
pub mod sharing;
pub mod syntax;
pub mod varset;

pub use clique::CliquePair;
pub use error::{AnalysisError, DomainError, ParseError, ProgramError};
pub use freeness::{CliqueSharingFreeness, SharingFreeness};
pub use groups::GroupSet;
pub use normalize::{NormalizePolicy, Site};
pub use sharing::SharingSet;
pub use varset::{Var, VarSet};
