use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("schema mismatch: {0}")]
    Schema(String),
    #[error("value out of domain: {0}")]
    Domain(String),
    #[error("proving failed: {0}")]
    Proving(String),
    #[error("invalid privacy budget: {0}")]
    Budget(String),
    #[error("malformed encoding: {0}")]
    Encoding(String),
    #[error("synthesis: {0}")]
    Synthesis(#[from] ark_relations::r1cs::SynthesisError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
