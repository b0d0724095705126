//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by model validation, quadrature, eigensolvers and the CLI.
#[derive(Debug, Error)]
#[allow(clippy::enum_variant_names)]
pub enum Error {
    /// An integral failed its own finiteness pre-checks (non-integrable
    /// infrared exponent, non-decaying tail) or produced a non-finite value.
    #[error("divergent integral: {0}")]
    DivergentIntegral(String),

    /// An iterative procedure (adaptive refinement, extrapolation, root
    /// polishing) exhausted its budget before reaching the requested
    /// tolerance. `residual` is the best error estimate achieved.
    #[error("no convergence in {what}: residual {residual:.3e} > tolerance {tolerance:.3e}")]
    NoConvergence {
        what: String,
        residual: f64,
        tolerance: f64,
    },

    /// The two dephasing resonances collide (gamma = pi*xi(0)/4); eigenvectors
    /// do not exist there and the spectral decomposition is refused.
    #[error("exceptional point: gamma = {gamma:.6e} equals pi*xi(0)/4; the two dephasing resonances collide and no eigenbasis exists")]
    ExceptionalPoint { gamma: f64 },

    /// Two resonances coincide (within 1e-12) at the requested coupling, so
    /// continuation labels cannot be assigned. Pairs are 0-based labels.
    #[error("degenerate resonances at the requested coupling: {pairs:?}")]
    DegenerateAtRequestedPoint { pairs: Vec<((usize, usize), (usize, usize))> },

    /// A second-order perturbative denominator delta_{c,d} - delta_{a,b}
    /// vanishes while its numerator does not; the perturbative formula does
    /// not apply to this spectrum.
    #[error("degenerate denominator in second-order term for label ({a},{b}): delta difference with level {c} vanishes")]
    DegenerateDenominator { a: usize, b: usize, c: usize },

    /// A matrix element of the relaxation generator requires dividing by a
    /// vanishing resonance energy delta_{a,b} while the corresponding
    /// Hamiltonian coupling is nonzero.
    #[error("division by zero: delta_({a},{b}) vanishes but |H_S[{a},{b}]| > 0")]
    DivisionByZero { a: usize, b: usize },

    /// An exact-dephasing routine was called with a nonzero energy-exchange
    /// coupling.
    #[error("exact dephasing requires sigma = 0, got sigma = {sigma:.6e}")]
    SigmaNotZero { sigma: f64 },

    /// A truncated Fock-space construction would exceed the dense-eigensolver
    /// dimension cap.
    #[error("truncated space dimension {dim} exceeds cap {cap}")]
    DimensionCapExceeded { dim: usize, cap: usize },

    /// Configuration failed validation; `key` is the offending TOML key.
    #[error("config error at `{key}`: {message}")]
    ConfigError { key: String, message: String },

    /// A numerical routine produced an internally inconsistent result
    /// (failed factorization, cross-check mismatch, I/O failure while
    /// writing results).
    #[error("compute error in {context}: {message}")]
    ComputeError { context: String, message: String },
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::ConfigError {
            key: key.into(),
            message: message.into(),
        }
    }

    pub(crate) fn compute(context: impl Into<String>, message: impl Into<String>) -> Self {
        Error::ComputeError {
            context: context.into(),
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::compute("i/o", e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
