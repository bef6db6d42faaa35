use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The argument of the Wegner-Houghton logarithm left the positive axis.
    /// `mode` is the index being integrated when it happened (0 when raised
    /// outside a flow), `log_argument` is 1 + V''(0)/(M w^2).
    #[error("flow breakdown at mode m={mode}: log argument 1 + V''/(M w^2) = {log_argument:.6e}")]
    FlowBreakdown { mode: usize, log_argument: f64 },

    #[error("potential is unbounded below (leading coefficient {leading:.6e}, degree {degree})")]
    Unbounded { leading: f64, degree: usize },

    #[error("effective potential is not convex at its minimum: V''(x0) = {curvature:.6e}")]
    NonConvex { curvature: f64 },

    #[error(
        "non-positive propagator denominator at mode m={mode}: M w^2 + V_m'' = {denominator:.6e}"
    )]
    NegativeModeMass { mode: usize, denominator: f64 },

    #[error("variational energy has no interior minimum over the trial-frequency bracket")]
    NoMinimum,

    #[error("eigensolver did not converge: {0}")]
    Convergence(String),

    #[error("config error: {0}")]
    Config(String),
}
