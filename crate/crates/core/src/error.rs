use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An input lies outside the domain of the physical model.
    #[error("domain error: {0}")]
    Domain(String),

    /// A configuration or command line problem. Always names the offending key.
    #[error("usage error: {0}")]
    Usage(String),

    /// Valid inputs led to a derived quantity outside its usable range.
    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("{routine} did not converge (nodes/panels {nodes}, residual {residual:e})")]
    NoConvergence {
        routine: &'static str,
        nodes: usize,
        residual: f64,
    },

    /// The kernel denominator `D(xi)` reached zero or went negative.
    #[error("kernel denominator not positive: D_min = {d_min:e} at a = {a:e}, b = {b:e}")]
    DenominatorNotPositive { d_min: f64, a: f64, b: f64 },

    /// The real-axis and rotated-contour oracle routes disagree.
    #[error("oracle routes disagree at t = {t:e}: real axis {real_axis:e}, rotated contour {rotated:e}")]
    RouteMismatch { t: f64, real_axis: f64, rotated: f64 },

    /// A numeric failure while evaluating a series, tagged with the time point.
    #[error("at t = {t:e} s: {source}")]
    AtTime {
        t: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    /// True for configuration mistakes, false for numerical failures.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Usage(_) | Error::Domain(_))
    }
}
