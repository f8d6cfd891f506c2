use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("duplicate layer id `{0}`")]
    DuplicateLayer(String),
    #[error("unknown layer `{0}`")]
    UnknownLayer(String),
    #[error("unknown entity `{0}`")]
    UnknownEntity(String),
    #[error("self-loop on `{entity}` in layer `{layer}`")]
    SelfLoop { layer: String, entity: String },
    #[error("layer ordering is not a permutation of the declared layers: {0}")]
    InvalidOrdering(String),
    #[error("entity `{entity}` is not present in layer `{layer}`")]
    NotPresent { entity: String, layer: String },
    #[error("degenerate normalization: total degree is zero")]
    DegenerateNormalization,
    #[error("layer `{0}` has no edges")]
    EdgelessLayer(String),
    #[error("network has no edges")]
    EdgelessNetwork,
    #[error("layer `{0}` has no nodes")]
    EmptyLayer(String),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("policy conflict: {0}")]
    PolicyConflict(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("size guard exceeded: {0}")]
    SizeGuard(String),
}
