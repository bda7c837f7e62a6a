use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("graph is not connected")]
    NotConnected,
    #[error("graph has {0} isolated node(s); drop them before building the Laplacian")]
    IsolatedNodes(usize),
    #[error("node index {index} out of range for graph with {n} nodes")]
    NodeOutOfRange { index: usize, n: usize },
    #[error("self-loop on node {0}")]
    SelfLoopNode(usize),
    #[error("charge {0} outside [0, 1/2]")]
    ChargeOutOfRange(String),
    #[error("invalid charge literal `{0}`")]
    BadCharge(String),
    #[error("node {0} has zero degree")]
    ZeroDegree(usize),
    #[error("dense solver limited to n <= {limit}, got n = {n}")]
    DenseLimitExceeded { n: usize, limit: usize },
    #[error("requested {requested} eigenpairs of a {n}x{n} matrix")]
    TooManyEigenpairs { requested: usize, n: usize },
    #[error("power iteration converged {achieved} of {requested} eigenpairs (residuals {residuals:?})")]
    NoConvergence {
        achieved: usize,
        requested: usize,
        residuals: Vec<f64>,
    },
    #[error("zero vector has no Rayleigh quotient")]
    ZeroVector,
    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },
    #[error("label vector has length {labels}, expected {nodes}")]
    LabelMismatch { labels: usize, nodes: usize },
    #[error("subset refers to node {0} outside the graph")]
    SubsetOutOfRange(usize),
    #[error("angle vector has length {got}, expected {expected}")]
    AngleLengthMismatch { got: usize, expected: usize },
    #[error("partition side is empty or has zero volume")]
    EmptySide,
    #[error("combinatorial spectral gap is zero (graph disconnected)")]
    MissingSpectralGap,
    #[error("parameter `{name}` out of range: {detail}")]
    ParamOutOfRange { name: &'static str, detail: String },
    #[error("no connected sample after {0} retries")]
    ConnectivityRetryExceeded(usize),
    #[error("exhaustive search limited to n <= {limit}, got n = {n}")]
    TooLargeForExhaustive { n: usize, limit: usize },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("self-loop at line {line}")]
    SelfLoop { line: usize },
    #[error("GML parse error at byte {offset}: {msg}")]
    Gml { offset: usize, msg: String },
    #[error("missing field `{field}` in {context}")]
    MissingField {
        field: &'static str,
        context: String,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by malformed input files.
    pub fn is_parse_error(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::SelfLoop { .. }
                | Error::Gml { .. }
                | Error::MissingField { .. }
                | Error::BadCharge(_)
        )
    }

    /// True for failures of the numerical pipeline.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. }
                | Error::DenseLimitExceeded { .. }
                | Error::ZeroDegree(_)
                | Error::MissingSpectralGap
                | Error::ZeroVector
        )
    }
}
