use thiserror::Error;

use crate::model::{ChannelId, ComponentId, KeyId, SecretId};

/// Errors raised when an architecture is built or queried with ids it does
/// not declare.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown component `{0}`")]
    UnknownComponent(ComponentId),
    #[error("unknown channel `{0}`")]
    UnknownChannel(ChannelId),
    #[error("unknown key `{0}`")]
    UnknownKey(KeyId),
    #[error("unknown secret `{0}`")]
    UnknownSecret(SecretId),
    #[error("cyclic subcomponent hierarchy: {}", display_cycle(.0))]
    CyclicHierarchy(Vec<ComponentId>),
    #[error("duplicate {kind} declaration `{name}`")]
    Duplicate { kind: &'static str, name: String },
    #[error("invalid identifier `{0}`")]
    InvalidIdentifier(String),
}

fn display_cycle(path: &[ComponentId]) -> String {
    path.iter()
        .map(ComponentId::as_str)
        .collect::<Vec<_>>()
        .join(" -> ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
