//! Complementary sensitivity Bode integrals (CSBIs) of SISO feedback loops.
//!
//! The crate evaluates
//!
//! * continuous time: `(1/2π) ∫ ln|T(jω)| dω/ω²` over the whole real line,
//! * discrete time: `(1/2π) ∫_{-π}^{π} log₂|T(e^{jω})| dω`,
//!
//! where `T = L/(1+L)`, in two independent ways: in closed form from the
//! zeros, poles, gain and integrator count of the open loop `L`
//! ([`csbi`]), and by adaptive quadrature of `|T|` ([`quadrature`]).
//!
//! All numeric code is generic over [`Scalar`] (`f32` or `f64`). The `*64`
//! aliases below are what the CLI and most callers use.

pub mod csbi;
pub mod parser;
pub mod polynomial;
pub mod quadrature;
pub mod scalar;
pub mod stability;
pub mod transfer_function;

pub use num_complex::Complex;

pub use csbi::{CaseTag, CsbiError, CsbiResult, CsbiStatus, CsbiTerms, LogBase, Refusal};
pub use parser::{format_tf, parse_tf, ParseError, ParseErrorKind};
pub use polynomial::{Poly, PolyError, RootSet};
pub use quadrature::{DivergenceSign, QuadError, QuadOptions, QuadStatus, QuadratureReport};
pub use scalar::Scalar;
pub use stability::StabilityVerdict;
pub use transfer_function::{ClosedLoop, Domain, LoopTf, TfError, ZeroClassification};

pub type Poly64 = Poly<f64>;
pub type RootSet64 = RootSet<f64>;
pub type LoopTf64 = LoopTf<f64>;
pub type ClosedLoop64 = ClosedLoop<f64>;
pub type CsbiResult64 = CsbiResult<f64>;
pub type QuadratureReport64 = QuadratureReport<f64>;
pub type QuadOptions64 = QuadOptions<f64>;
pub type StabilityVerdict64 = StabilityVerdict<f64>;
pub type Complex64 = Complex<f64>;
