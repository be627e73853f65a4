use std::fmt;

use thiserror::Error;

/// The law or structural requirement that a validation step found broken.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axiom {
    /// Malformed tables: unknown or duplicate ids, missing or surplus entries.
    Table,
    /// A composite that must equal an identity arrow (or its operand) does not.
    UnitLaw,
    /// Inverse map with wrong endpoints, or no inverse exists.
    Inverse,
    /// A composite has the wrong source or range.
    Endpoints,
    Associativity,
    /// Action of an identity or of a product is wrong.
    ActionLaw,
    /// An acted-upon point has the wrong anchor.
    Anchor,
    /// Left and right actions do not commute.
    Commuting,
    /// The right action fixes a point with a non-identity arrow.
    NotFree,
    NotInjective,
    Equivariance,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Axiom::Table => "table",
            Axiom::UnitLaw => "unit-law",
            Axiom::Inverse => "inverse",
            Axiom::Endpoints => "endpoints",
            Axiom::Associativity => "associativity",
            Axiom::ActionLaw => "action-law",
            Axiom::Anchor => "anchor",
            Axiom::Commuting => "commuting",
            Axiom::NotFree => "not-free",
            Axiom::NotInjective => "not-injective",
            Axiom::Equivariance => "equivariance",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("axiom violation ({kind}): witness ({})", .witness.join(", "))]
    AxiomViolation { kind: Axiom, witness: Vec<String> },

    #[error("not a group action: witness ({})", .witness.join(", "))]
    NotAnAction { witness: Vec<String> },

    #[error("points {0} and {1} lie in different orbits")]
    NotSameOrbit(String, String),

    #[error("cocycle identity fails for h1 = {h1}, h2 = {h2}, x = {x}")]
    CocycleViolation { h1: String, h2: String, x: String },

    #[error("compatibility violation ({which}): witness ({})", .witness.join(", "))]
    CompatibilityViolation { which: String, witness: Vec<String> },

    #[error("endpoint mismatch: {0}")]
    EndpointMismatch(String),

    #[error("elements live over different groupoids or correspondences")]
    GroupoidMismatch,

    #[error("unknown id `{0}`")]
    UnknownId(String),

    #[error("not a functor: {0}")]
    NotAFunctor(String),

    #[error("not a discrete Conduché fibration: {0}")]
    NotConduche(String),

    #[error("node groupoid `{0}` has non-identity arrows")]
    NodeNotDiscrete(String),

    #[error("coherence violation for ({}): {witness}", .arrows.join(", "))]
    CoherenceViolation {
        arrows: Vec<String>,
        witness: String,
    },

    #[error("factorization rules are not a bijection: {0}")]
    FactorizationNotBijective(String),

    #[error("factorization rules fail the associativity (hexagon) condition on ({})", .0.join(", "))]
    HexagonViolation(Vec<String>),

    #[error("unknown letter `{0}`")]
    UnknownLetter(String),

    #[error("unknown word `{0}`")]
    UnknownWord(String),

    #[error("operation needs a finite group, got an automaton presentation")]
    InfiniteGroup,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn axiom<I, S>(kind: Axiom, witness: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Error::AxiomViolation {
            kind,
            witness: witness.into_iter().map(Into::into).collect(),
        }
    }

    /// Errors caused by malformed or mismatched input rather than by a failed law.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::EndpointMismatch(_)
                | Error::GroupoidMismatch
                | Error::UnknownId(_)
                | Error::UnknownLetter(_)
                | Error::UnknownWord(_)
                | Error::InfiniteGroup
                | Error::InvalidInput(_)
                | Error::Parse(_)
                | Error::Io(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
