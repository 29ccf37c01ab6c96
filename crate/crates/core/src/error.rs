use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("root index must be at least 1")]
    ZeroExponent,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("elements belong to different fields ({0} vs {1})")]
    MixedFields(String, String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("expected {expected} coordinates, got {got}")]
    WrongDegree { expected: usize, got: usize },
    #[error("unknown field `{0}`")]
    UnknownField(String),
    #[error("malformed rational `{0}`")]
    BadRational(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("variable lists differ: {0:?} vs {1:?}")]
    VariableMismatch(Vec<String>, Vec<String>),
    #[error("coefficient rings differ")]
    IncompatibleRing,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IdentityError {
    #[error("identity `{id}` fails: {counterexample}")]
    Mismatch { id: String, counterexample: String },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("positions must satisfy 1 <= i < j < k <= {len}, got ({i}, {j}, {k})")]
    BadPositions { i: usize, j: usize, k: usize, len: usize },
    #[error("pattern length {0} outside 1..=12")]
    LengthOutOfRange(usize),
    #[error("symbol {0} is not in alphabet {1}")]
    ForeignSymbol(String, String),
    #[error("unknown alphabet `{0}`")]
    UnknownAlphabet(String),
    #[error("unknown rule `{0}`")]
    UnknownRule(String),
    #[error("cannot parse pattern `{0}`")]
    BadPattern(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),
    #[error("bound {0} exceeds 10^8")]
    BoundTooLarge(i128),
    #[error("minimum length must be at least 3")]
    MinLenTooSmall,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CurveError {
    #[error("squareness of {0} could not be decided")]
    Undetermined(String),
    #[error("singular cubic model (discriminant 0)")]
    Singular,
    #[error("unsupported curve family {0:?}")]
    UnsupportedFamily(Vec<usize>),
    #[error("height {0} exceeds 10^4")]
    HeightTooLarge(i64),
    #[error("point is not on the curve")]
    NotOnCurve,
    #[error(transparent)]
    Field(#[from] FieldError),
}
