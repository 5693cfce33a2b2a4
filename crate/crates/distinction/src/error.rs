use thiserror::Error;

/// Every failure mode of the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("root of order {den} does not embed in F_{ell}^{d}")]
    OrderNotEmbeddable { den: u64, ell: u64, d: u32 },
    #[error("discrete log of zero")]
    ZeroElement,
    #[error("ell = {ell} divides q = {q}")]
    EllDividesQ { ell: u64, q: u64 },
    #[error("table too large: {0}")]
    TooLarge(String),
    #[error("element belongs to a different field")]
    WrongField,
    #[error("not a principal unit")]
    NotPrincipalUnit,
    #[error("discrete log failed: {0}")]
    DlogFailure(String),
    #[error("enumeration bound too large: {0}")]
    BoundTooLarge(String),
    #[error("no extension of the character found at this depth")]
    ExtensionNotFound,
    #[error("element outside the representation's domain")]
    WrongDomain,
    #[error("induced representation is reducible")]
    ReducibleInput,
    #[error("unsupported tower: {0}")]
    UnsupportedTower(String),
    #[error("matrix is not nilpotent")]
    NotNilpotent,
    #[error("parameter is not of SL2 type")]
    NotSl2,
    #[error("representation is not generic")]
    NotGeneric,
    #[error("central character is nontrivial")]
    NontrivialCentralCharacter,
    #[error("class outside the lifting case table")]
    OutOfCaseTable,
    #[error("representation is not distinguished")]
    NotDistinguished,
    #[error("wrong congruence regime: {0}")]
    WrongRegime(String),
    #[error("invalid field specification: {0}")]
    InvalidSpec(String),
    #[error("invalid representation: {0}")]
    InvalidRep(String),
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
