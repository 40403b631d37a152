use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("argument {value} outside the domain of {function} ({expected})")]
    Domain {
        function: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, found {found} ({context})")]
    DimensionMismatch {
        expected: usize,
        found: usize,
        context: &'static str,
    },

    #[error("Newton iteration for root {index} of P_{order} did not converge in {iterations} steps")]
    QuadratureNonConvergence {
        order: usize,
        index: usize,
        iterations: usize,
    },

    #[error("matrix is singular to working precision (pivot {pivot:e} at row {row})")]
    Singular { row: usize, pivot: f64 },

    #[error("QR iteration did not converge after {iterations} sweeps; active block rows {low}..={high}")]
    EigenNonConvergence {
        iterations: usize,
        low: usize,
        high: usize,
    },

    #[error("no sign change on [{a}, {b}]: f(a) = {fa:e}, f(b) = {fb:e}")]
    NoSignChange { a: f64, b: f64, fa: f64, fb: f64 },

    #[error("root search did not converge within {0} iterations")]
    RootNonConvergence(usize),

    #[error("profile `{profile}` is not finite at x = {x}, mu = {mu}")]
    ProfileEvaluation {
        profile: &'static str,
        x: f64,
        mu: f64,
    },

    #[error(
        "bracket [{lo}, {hi}] does not straddle criticality (growth rates {g_lo:e}, {g_hi:e}); \
         try a wider bracket"
    )]
    BracketNotCritical {
        lo: f64,
        hi: f64,
        g_lo: f64,
        g_hi: f64,
    },

    #[error("model configuration: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
