use thiserror::Error;

use crate::words::Word;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("alphabet degree must be at least 2 (and at most 255), got {0}")]
    BadDegree(usize),
    #[error("malformed word `{0}`")]
    MalformedWord(String),
    #[error("letter {letter} out of range for alphabet of degree {degree}")]
    LetterOutOfRange { letter: usize, degree: u8 },
    #[error("words do not form a complete prefix-free antichain")]
    NotAPartition,
    #[error("level {level} is smaller than the longest word ({longest})")]
    LevelTooSmall { level: usize, longest: usize },
    #[error("rational point needs a nonempty period")]
    EmptyPeriod,
    #[error("image words do not form a complete prefix-free antichain")]
    NotABijection,
    #[error("domain has {domain} words but {images} images were given")]
    Arity { domain: usize, images: usize },
    #[error("alphabet mismatch: degree {left} vs degree {right}")]
    AlphabetMismatch { left: u8, right: u8 },
    #[error("word {0} is too short: extend it past the domain cones")]
    NeedsLongerWord(Word),
    #[error("sign undefined for even n (n = {0})")]
    SignUndefined(u8),
    #[error("element is not an involution: {0}")]
    NotInvolution(String),
    #[error("no conjugator makes the base involution fail to commute with its conjugate")]
    ConstructionFailed,
    #[error("invalid alpha plan: {0}")]
    InvalidPlan(String),
    #[error("invalid permutation: {0}")]
    BadPermutation(String),
    #[error("generator `{0}` is not volume-preserving")]
    NotVolumePreserving(String),
    #[error("invalid generator set: {0}")]
    BadGenerators(String),
    #[error("closure exceeded {0} elements")]
    TooLarge(usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
