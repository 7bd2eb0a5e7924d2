use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("trace has no gradient events")]
    EmptyTrace,
    #[error("trace carries zero gradient bytes")]
    ZeroTotalBytes,
    #[error("total gradient bytes overflow u64")]
    SizeOverflow,
    #[error("layer {layer}: ready time {value} s is negative or not finite")]
    InvalidReadyTime { layer: u32, value: f64 },
    #[error("layer {layer} appears more than once")]
    DuplicateLayer { layer: u32 },
    #[error("t_back must be positive, got {0} s")]
    NonPositiveTBack(f64),
    #[error("t_batch < t_back ({t_batch} s < {t_back} s)")]
    TBatchBelowTBack { t_batch: f64, t_back: f64 },
    #[error("declared t_back {declared} s does not match latest ready time {derived} s")]
    TBackMismatch { declared: f64, derived: f64 },
    #[error("unknown model `{0}` (expected resnet50, resnet101 or vgg16)")]
    UnknownModel(String),
    #[error("{field}: {reason}")]
    InvalidConfig { field: &'static str, reason: String },
    #[error("malformed bundled table, line {line}: {reason}")]
    Table { line: usize, reason: String },
    #[error("no trace named `{0}` supplied to the sweep")]
    MissingTrace(String),
    #[error("sweep point (model {model}, n_workers {n_workers}, bandwidth_bps {bandwidth_bps}, ratio {ratio}): {source}")]
    SweepPoint {
        model: String,
        n_workers: u32,
        bandwidth_bps: f64,
        ratio: f64,
        source: alloc::boxed::Box<Error>,
    },
}

impl Error {
    pub(crate) fn config(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field,
            reason: reason.into(),
        }
    }
}
