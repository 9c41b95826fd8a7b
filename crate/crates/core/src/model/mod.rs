//! Term algebra and architecture data model.

mod arch;
pub mod fixtures;
mod ids;
mod term;

pub use arch::{Architecture, ArchitectureBuilder, ComponentSpec};
pub use ids::{is_identifier, ChannelId, ComponentId, KeyId, SecretId};
pub use term::{
    decr, enc, expression_to_ks_list, ext, ks_to_expression, sign, ExprItem, ExprSeq, KeyPairing,
    KsAtom,
};
