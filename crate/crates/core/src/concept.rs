use std::borrow::Borrow;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConceptError {
    #[error("concept token is empty")]
    Empty,
    #[error("concept token {0:?} contains a tab or newline")]
    ForbiddenChar(String),
    #[error("self-loop")]
    SelfLoop,
}

/// Opaque, unique name of a concept, e.g. `jon_reading:Book`.
///
/// Tokens compare by exact bytes. They are never normalised, so `Book` and
/// `book` are distinct concepts.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ConceptId(String);

impl ConceptId {
    pub fn new(token: impl Into<String>) -> Result<Self, ConceptError> {
        let token = token.into();
        if token.is_empty() {
            return Err(ConceptError::Empty);
        }
        if token.contains(['\t', '\n', '\r']) {
            return Err(ConceptError::ForbiddenChar(token));
        }
        Ok(ConceptId(token))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for ConceptId {
    type Error = ConceptError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        ConceptId::new(value)
    }
}

impl TryFrom<&str> for ConceptId {
    type Error = ConceptError;

    fn try_from(value: &str) -> Result<Self, Self::Error> {
        ConceptId::new(value)
    }
}

impl From<ConceptId> for String {
    fn from(value: ConceptId) -> Self {
        value.0
    }
}

impl Borrow<str> for ConceptId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl AsRef<str> for ConceptId {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ConceptId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for ConceptId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// One chain part: `member` presented as a sub-concept of `key`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ObservationPair {
    key: ConceptId,
    member: ConceptId,
}

impl ObservationPair {
    pub fn new(key: ConceptId, member: ConceptId) -> Result<Self, ConceptError> {
        if key == member {
            return Err(ConceptError::SelfLoop);
        }
        Ok(ObservationPair { key, member })
    }

    /// Convenience constructor from raw tokens.
    pub fn parse(key: &str, member: &str) -> Result<Self, ConceptError> {
        ObservationPair::new(ConceptId::new(key)?, ConceptId::new(member)?)
    }

    pub fn key(&self) -> &ConceptId {
        &self.key
    }

    pub fn member(&self) -> &ConceptId {
        &self.member
    }

    pub fn into_parts(self) -> (ConceptId, ConceptId) {
        (self.key, self.member)
    }
}
