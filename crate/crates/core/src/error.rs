use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative or adaptive routine ran out of budget. `value` is the best
    /// estimate reached and `err_est` its error estimate.
    #[error("no convergence: {what} (best estimate {value:e}, error estimate {err_est:e})")]
    Convergence {
        what: &'static str,
        value: f64,
        err_est: f64,
    },

    /// The moments handed to the Gamma fit do not describe a distribution.
    #[error("cannot fit Gamma distribution: variance of chi is {var_chi:e} (must be > 0)")]
    Fit { var_chi: f64 },

    /// A fourth-moment formula produced a negative variance for chi.
    #[error("fourth-moment mode `{mode}` gives negative var_chi = {var_chi:e} for M = {elements}")]
    NegativeVariance {
        mode: &'static str,
        elements: u32,
        var_chi: f64,
    },

    #[error("config error{}: {key}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Config {
        line: Option<usize>,
        key: String,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(line: Option<usize>, key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            line,
            key: key.into(),
            message: message.into(),
        }
    }
}
