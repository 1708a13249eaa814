//! Bound states of a charged particle confined to the layer `R² × [0, d]`
//! under a perpendicular field `F`, with a Neumann disc window of radius `a`
//! in the otherwise Dirichlet bottom plane.
//!
//! The operator is `−Δ + F z`. Modules:
//!
//! * [`specfun`]: Airy, Bessel, Bessel zeros, quadrature.
//! * [`transverse`]: the 1-D operators `−∂²_z + F z` on `[0, d]` with
//!   Dirichlet/Dirichlet and Neumann/Dirichlet ends.
//! * [`bracket`]: the spectral window and the inner-cylinder Dirichlet
//!   eigenvalues that bound the discrete spectrum from above.
//! * [`certify`]: an explicit trial function whose energy lies below the
//!   essential spectrum.
//! * [`fd2d`]: axisymmetric finite-difference eigensolver on `(r, z)`.
//! * [`cli`]: command-line front end.

pub mod bracket;
pub mod certify;
pub mod cli;
pub mod fd2d;
pub mod specfun;
pub mod transverse;

pub use bracket::{BracketEstimate, SpectralWindow};
pub use certify::{Certificate, TrialSpec, VerticalProfile};
pub use transverse::{BoundaryType, TransverseLevel, WaveguideParams};





use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    SpecFun(#[from] specfun::SpecFunError),
    #[error(transparent)]
    Quadrature(#[from] specfun::QuadratureError),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("root bracketing failed for level {level} on [{lo}, {hi}]")]
    RootBracket { level: usize, lo: f64, hi: f64 },
    #[error("{0}")]
    Domain(String),
    #[error("assembly error: {0}")]
    Assembly(String),
    #[error("eigensolver did not converge after {iterations} iterations (best residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64, values: Vec<f64> },
    #[error("no certificate found (A = {a}, B = {b}, C = {c}, last Q = {q})")]
    CertificateNotFound { a: f64, b: f64, c: f64, q: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
