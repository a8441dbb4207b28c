//! STRIPS-subset PDDL reader with the resource and XOR-constraint extensions.
//!
//! Identifiers are case-insensitive and normalised to lower case. The
//! accepted language is plain STRIPS (`:requirements :strips`) plus:
//!
//! * `(:resources r1 ... rn)` in the domain or the problem,
//! * `(amount r v)` atoms in `:init`,
//! * a `:resources (amount ?r k)` slot in actions,
//! * a `(:xor-constraints ((xor ALT ...) COND ...) ...)` block in the domain.

mod model;
mod parser;
mod sexpr;

pub use model::{
    ActionSchema, Atom, DomainDef, GroundAtom, PredicateDecl, ProblemDef, ResourceUse, Term,
    XorSchema,
};
pub use parser::{parse_domain, parse_problem, parse_problem_in, parse_xor_schemas, parse_xor_schemas_in};
pub use sexpr::Pos;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{pos}: syntax error: {msg}")]
    Syntax { pos: Pos, msg: String },
    #[error("{pos}: unsupported feature: {feature}")]
    UnsupportedFeature { pos: Pos, feature: String },
    #[error("{pos}: undeclared predicate `{name}`")]
    UndeclaredPredicate { pos: Pos, name: String },
    #[error("{pos}: predicate `{name}` takes {expected} arguments, got {found}")]
    ArityMismatch {
        pos: Pos,
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("{pos}: undeclared object `{name}`")]
    UndeclaredObject { pos: Pos, name: String },
    #[error("{pos}: unbound variable `?{name}`")]
    UnboundVariable { pos: Pos, name: String },
    #[error("{pos}: {msg}")]
    Invalid { pos: Pos, msg: String },
}

impl ParseError {
    pub fn pos(&self) -> Pos {
        match self {
            ParseError::Syntax { pos, .. }
            | ParseError::UnsupportedFeature { pos, .. }
            | ParseError::UndeclaredPredicate { pos, .. }
            | ParseError::ArityMismatch { pos, .. }
            | ParseError::UndeclaredObject { pos, .. }
            | ParseError::UnboundVariable { pos, .. }
            | ParseError::Invalid { pos, .. } => *pos,
        }
    }
}
