use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid jump kernel: {0}")]
    InvalidKernel(String),
    #[error("density {0} outside [0, 1]")]
    InvalidDensity(f64),
    #[error("invalid window [{lo}, {hi}]")]
    InvalidWindow { lo: i64, hi: i64 },
    #[error("occupancy value {value} at site {site} is not 0 or 1")]
    InvalidOccupancy { site: i64, value: u8 },
    #[error("window of {len} sites is too small for a kernel of range {range}")]
    WindowTooSmall { len: usize, range: u32 },
    #[error("requested time {requested} is beyond the clock horizon {horizon}")]
    HorizonExceeded { requested: f64, horizon: f64 },
    #[error("requested time {requested} is before the current time {current}")]
    TimeReversed { requested: f64, current: f64 },
    #[error("clock realization was built for a different kernel")]
    ClockKernelMismatch,
    #[error("site {0} lies outside the window")]
    OutsideWindow(i64),
    #[error("coupled state invariant violated: {0}")]
    CouplingInvariant(String),
    #[error("height increments violate 0 <= z[i+1] - z[i] <= 1 at site {0}")]
    IncrementViolation(i64),
    #[error("light-cone audit tripped at time {0}: boundary influence reached the observation region")]
    AuditTripped(f64),
    #[error("operation requires the totally asymmetric nearest-neighbour kernel")]
    NotTasep,
    #[error("label window [{ka}, {kb}] is not certified for site {site}")]
    UncertifiedWindow { site: i64, ka: i64, kb: i64 },
    #[error("empty label window")]
    EmptyLabelWindow,
    #[error("no attaining site found in [{lo}, {hi}]; enlarge the search window")]
    SearchWindowTooSmall { lo: i64, hi: i64 },
    #[error("lattice domain incomplete: {0}")]
    DomainIncomplete(String),
    #[error("cell ({0}, {1}) is outside the lattice domain")]
    OutOfDomain(i64, i64),
    #[error("passage level not reached before the horizon at ({0}, {1})")]
    HorizonTooShort(i64, i64),
    #[error("shape function argument outside its domain: x = {x}, y = {y}")]
    ShapeDomain { x: f64, y: f64 },
    #[error("local function is not mean-zero under the product measure (mean {0})")]
    NotMeanZero(f64),
    #[error("local function support {0:?} is not inside the observation window")]
    SupportOutsideWindow(Vec<i64>),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("malformed record: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
