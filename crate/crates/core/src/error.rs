use thiserror::Error;

/// Errors raised by the simulator's constructors, scheme design and decoders.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid constellation: {0}")]
    InvalidConstellation(String),

    #[error("constellation spacings differ ({a} vs {b}); the symbols are not aligned")]
    SpacingMismatch { a: f64, b: f64 },

    #[error("invalid strength configuration: {0}")]
    InvalidStrength(String),

    #[error("channel gain h{rx}{tx} = {value} lies outside (1, 2]")]
    GainOutOfRange { rx: usize, tx: usize, value: f64 },

    #[error("alpha = {alpha} is not representable with m_direct = {m_direct} (alpha*m_direct not integral); nearest feasible m: {nearest}")]
    UnrepresentableAlpha {
        alpha: String,
        m_direct: u32,
        nearest: u32,
    },

    #[error("alpha = {alpha} lies in the helper-free regime (alpha <= 1/2); only the closed-form GDoF is available there")]
    NoHelperRegime { alpha: String },

    #[error("epsilon = {epsilon} is too large for the {regime} regime: lambda_{symbol} = {value} is not positive")]
    NegativeLambda {
        regime: String,
        epsilon: String,
        symbol: &'static str,
        value: String,
    },

    #[error("invalid design parameter: {0}")]
    InvalidParameter(String),

    #[error("power constraint violated in the {regime} regime at {input}: E|x|^2 = {value}")]
    PowerViolation {
        regime: String,
        input: &'static str,
        value: f64,
    },

    #[error("degenerate gains: {ties} integer pairs tie for the minimum distance {distance}")]
    DegenerateGains { ties: usize, distance: f64 },

    #[error("operation requires a joint-decoding regime (2/3 <= alpha <= 2), got {regime}")]
    NotJointRegime { regime: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
