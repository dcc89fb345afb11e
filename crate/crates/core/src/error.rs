use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecError {
    #[error("invalid distribution parameters: {0}")]
    InvalidParams(String),
    #[error("unknown mixture `{0}`")]
    UnknownMixture(String),
    #[error("invalid mixture: {0}")]
    InvalidMixture(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InstanceError {
    #[error("instance needs at least one agent and one item (got n={n}, m={m})")]
    EmptyDimension { n: usize, m: usize },
    #[error("agent index {agent} out of range for {n} agents")]
    AgentOutOfRange { agent: usize, n: usize },
    #[error("item index {item} out of range for {m} items")]
    ItemOutOfRange { item: usize, m: usize },
    #[error("value at ({agent}, {item}) is {value}, outside [0, 1]")]
    ValueOutOfRange {
        agent: usize,
        item: usize,
        value: f64,
    },
    #[error("expected {expected} entries, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("allocation has {got} bundles for {n} agents")]
    BundleCount { n: usize, got: usize },
    #[error("item {0} is assigned more than once")]
    Overlap(usize),
    #[error("item {0} is not assigned")]
    Omitted(usize),
    #[error(transparent)]
    Spec(#[from] SpecError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatchingError {
    #[error("edge ({left}, {right}) out of range for a {n_left}x{n_right} graph")]
    EdgeOutOfRange {
        left: usize,
        right: usize,
        n_left: usize,
        n_right: usize,
    },
    #[error("r must be positive")]
    ZeroDegree,
    #[error("size precondition violated: {0}")]
    Shape(String),
    #[error("subset cap {cap} exceeds the exhaustive-search limit of {limit}")]
    CapTooLarge { cap: usize, limit: usize },
    #[error("edge probability {0} outside [0, 1]")]
    BadProbability(f64),
    #[error("no matching of the required size: found {found}, need {required}")]
    Infeasible { found: usize, required: usize },
}

impl MatchingError {
    pub fn is_infeasible(&self) -> bool {
        matches!(self, MatchingError::Infeasible { .. })
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AllocError {
    #[error("allocator requires {expected} mode")]
    WrongMode { expected: &'static str },
    #[error("item {item} has pdf lower bound 0; threshold formula undefined")]
    ZeroAlpha { item: usize },
    #[error("alpha_min must be positive (got {0})")]
    NonPositiveAlpha(f64),
    #[error("sample size formula needs m >= 2 (got {0})")]
    TooFewItems(usize),
    #[error("sample size s={s} outside 1..={n}")]
    SampleSizeOutOfRange { s: usize, n: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Matching(#[from] MatchingError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("allocation does not fit the instance: {0}")]
    Mismatch(String),
    #[error("metric only defined for goods")]
    GoodsOnly,
    #[error("welfare ratio undefined: reference welfare 0, sampled welfare {0}")]
    ZeroReference(f64),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("exhaustive scan over {n}^{m} allocations exceeds the cap of {cap}")]
    TooManyAllocations { n: usize, m: usize, cap: u64 },
    #[error("brute-force matching supports at most {limit} left vertices (got {got})")]
    TooManyVertices { got: usize, limit: usize },
}
