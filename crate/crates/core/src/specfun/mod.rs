//! Special-function kernel: Airy functions, Bessel functions of the first
//! kind and their zeros, and 1-D quadrature.
//!
//! Accuracy targets (all fixed):
//!
//! | quantity | target |
//! |---|---|
//! | `Ai`, `Ai'`, `Bi`, `Bi'` | 1e-10 relative to the local modulus |
//! | `J_m(x)`, `m <= 64`, `x <= 1e3` | 1e-10 relative to the local envelope |
//! | `x_{m,k}`, `k <= 1000` | 1e-10 absolute |
//! | quadrature | caller-supplied absolute tolerance |

mod airy;
mod bessel;
mod quad;

pub use airy::{
    ai_zero, aip_zero, airy, airy_phase, reference_phase_difference, zeta, AiryPair, AiryPhase, AI_0, AIP_0,
    ASYMPTOTIC_CUTOFF, BIP_0, BI_0,
};
pub use bessel::{
    bessel_j, bessel_j_with_derivative, bessel_zero, mcmahon_guess, sorted_zeros, BesselZeroTable, LabelledZero,
    MAX_ORDER, MAX_ZERO_INDEX,
};
pub use quad::{integrate, integrate_with_breaks, GaussLegendre};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecFunError {
    #[error("Bessel order {order} exceeds the supported maximum {max}")]
    UnsupportedOrder { order: u32, max: u32 },
    #[error("zero index {index} outside the supported range 1..={max}")]
    UnsupportedIndex { index: u32, max: u32 },
    #[error("{what} out of domain: {value}")]
    Domain { what: &'static str, value: f64 },
    #[error("no sign change found while bracketing zero {index} of J_{order}")]
    ZeroSearch { order: u32, index: u32 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("quadrature did not converge on [{lo}, {hi}]; best estimate {estimate}")]
    NoConvergence { estimate: f64, lo: f64, hi: f64 },
    #[error("invalid integration interval [{lo}, {hi}] or tolerance")]
    InvalidInterval { lo: f64, hi: f64 },
}

/// A real number stored as `mantissa · e^exponent`, for quantities whose
/// magnitude can leave the double-precision range.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Scaled {
    pub mantissa: f64,
    pub exponent: f64,
}

impl Scaled {
    pub fn new(mantissa: f64, exponent: f64) -> Self {
        Self { mantissa, exponent }
    }

    pub fn from_f64(v: f64) -> Self {
        Self { mantissa: v, exponent: 0.0 }
    }

    /// The plain value; may overflow or underflow.
    pub fn value(&self) -> f64 {
        if self.mantissa == 0.0 {
            0.0
        } else {
            self.mantissa * self.exponent.exp()
        }
    }

    pub fn signum(&self) -> f64 {
        if self.mantissa == 0.0 {
            0.0
        } else {
            self.mantissa.signum()
        }
    }

    pub fn scale(self, factor: f64) -> Self {
        Self { mantissa: self.mantissa * factor, exponent: self.exponent }
    }

    /// `self · e^extra` as a plain value.
    pub fn value_shifted(&self, extra: f64) -> f64 {
        if self.mantissa == 0.0 {
            0.0
        } else {
            self.mantissa * (self.exponent + extra).exp()
        }
    }
}
