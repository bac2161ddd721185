use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// One entry per violated invariant, e.g. `"kappa must be positive"`.
    #[error("invalid parameters: {}", .0.join("; "))]
    InvalidParams(Vec<String>),

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("unknown configuration key `{0}`")]
    UnknownKey(String),

    #[error("invalid value `{value}` for key `{key}`: {reason}")]
    BadValue {
        key: String,
        value: String,
        reason: String,
    },

    #[error("detuning difference must be negative (got {0})")]
    DetuningGap(f64),

    #[error("singular determinant D(0) = 0")]
    SingularDeterminant,

    #[error("no cooling steady state: averaged friction {beta} is not negative")]
    NoCooling { beta: f64 },

    #[error("quadrature did not converge within {panels} panels (relative change {change:e})")]
    Quadrature { panels: usize, change: f64 },

    #[error("oracle Hilbert space of dimension {dim} exceeds the limit of 64")]
    HilbertTooLarge { dim: usize },

    #[error("oracle supports 1 or 2 cavity modes, got {0}")]
    ModeCount(usize),

    #[error("Fock cutoff too small: top-level population {population:e} exceeds 1e-6")]
    CutoffTooSmall { population: f64 },

    #[error("steady state is not unique: generator kernel is degenerate")]
    DegenerateKernel,

    #[error(
        "ill-conditioned traceless solve (condition estimate {condition:e}, residual {residual:e})"
    )]
    IllConditioned { condition: f64, residual: f64 },

    #[error("negative momentum diffusion {diffusion:e} at z = {z} (delta_a = {delta_a}, delta_c = {delta_c})")]
    NegativeDiffusion {
        z: f64,
        diffusion: f64,
        delta_a: f64,
        delta_c: f64,
    },

    #[error("time step too large: dt * |beta| / m = {0:e} must stay below 0.01")]
    StepTooLarge(f64),

    #[error("cooling-curve fit rejected: {0}")]
    CoolingFit(String),
}
