use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unknown letter `{0}`")]
    UnknownLetter(String),
    #[error("malformed token `{0}`")]
    MalformedToken(String),
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    #[error("map is not surjective; folded image graph is not the full rose")]
    NotSurjective,
    #[error("invalid marking: {0}")]
    InvalidMarking(String),
    #[error("trivial subgroup has no conjugacy key")]
    TrivialSubgroup,
    #[error("not a free factor: {0}")]
    NotFreeFactor(String),
    #[error("ambient rank {rank} exceeds the Whitehead search bound {bound}")]
    AmbientTooLarge { rank: usize, bound: usize },
    #[error("unknown RAAG generator `{0}`")]
    UnknownGenerator(String),
    #[error("word has {len} syllables; limit is {limit}")]
    TooLong { len: usize, limit: usize },
    #[error("graph has {len} vertices; limit is {limit}")]
    TooLarge { len: usize, limit: usize },
    #[error("move orbit exceeded budget of {0} words")]
    OrbitBudget(usize),
    #[error("generator is not primitive in the factor: abelianization ({0}, {1})")]
    NonPrimitiveImage(i64, i64),
    #[error("matrix determinant {0} is not +-1")]
    BadDeterminant(i64),
    #[error("matrix is not hyperbolic (trace {0})")]
    NotHyperbolic(i64),
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("projection is undefined: {0}")]
    UndefinedProjection(String),
    #[error("empty projection")]
    EmptyProjection,
    #[error("projection diameter {0} exceeds 4")]
    ProjectionDiameter(u32),
    #[error("factor is not in Omega: {0}")]
    NotInOmega(String),
    #[error("factors do not overlap")]
    NotOverlapping,
    #[error("threshold violated: {0}")]
    ThresholdViolated(String),
    #[error("collection is not admissible: pair ({i}, {j}): {detail}")]
    NotAdmissible { i: usize, j: usize, detail: String },
    #[error("support violation: {0}")]
    SupportViolation(String),
    #[error("commutation violation: {0}")]
    CommutationViolation(String),
    #[error("seed is not hyperbolic: {0}")]
    NotHyperbolicSeed(String),
    #[error("resource budget exceeded: {0}")]
    ResourceLimit(String),
    #[error("schema error at {path}: {msg}")]
    Schema { path: String, msg: String },
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn schema(path: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Schema {
            path: path.into(),
            msg: msg.into(),
        }
    }
}
