use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter is outside the domain of the function.
    Domain {
        what: &'static str,
        value: f64,
    },
    /// First-passage search exceeded the step cap.
    StepLimit {
        limit: u64,
        t: f64,
        delta: f64,
    },
    /// Risk-neutral probability of the binomial tree fell outside `[0, 1]`.
    TreeCalibration {
        q: f64,
        steps: usize,
        tau: f64,
    },
    /// The option kind is not admissible for the requested pricer.
    UnsupportedOption(&'static str),
    /// The requested relation needs a parameter regime that is not met.
    Regime(&'static str),
    /// A pricer failed for one horizon draw.
    Draw {
        index: usize,
        source: alloc::boxed::Box<Error>,
    },
    /// Finite-difference solution blew up.
    Unstable {
        step: usize,
        value: f64,
    },
    InvalidGrid(&'static str),
    InvalidConfig(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain { what, value } => write!(f, "{what} out of domain: {value}"),
            Error::StepLimit { limit, t, delta } => write!(
                f,
                "inverse subordinator did not pass t={t} within {limit} steps of size {delta}"
            ),
            Error::TreeCalibration { q, steps, tau } => write!(
                f,
                "risk-neutral probability q={q} outside [0,1] (n={steps}, tau={tau})"
            ),
            Error::UnsupportedOption(msg) => write!(f, "unsupported option: {msg}"),
            Error::Regime(msg) => write!(f, "parameter regime violated: {msg}"),
            Error::Draw { index, source } => write!(f, "horizon draw {index}: {source}"),
            Error::Unstable { step, value } => {
                write!(
                    f,
                    "finite-difference solution unstable at time step {step} (value {value})"
                )
            }
            Error::InvalidGrid(msg) => write!(f, "invalid grid: {msg}"),
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn domain(what: &'static str, value: f64) -> Error {
    Error::Domain { what, value }
}
