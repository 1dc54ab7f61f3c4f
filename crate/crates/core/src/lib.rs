//! Numerical engine for the one-parameter family of (2:2) holomorphic
//! correspondences
//!
//! ```text
//!   Z² + Z·J(W) + J(W)² = 3,    J(W) = ((a+1)W − 2a) / (2W − (a+1))
//! ```
//!
//! which mate quadratic rational maps of the parabolic family
//! `z ↦ z + 1/z + A` with the modular group.
//!
//! The math modules ([`correspondence`], [`domains`], [`dynamics`],
//! [`per11`]) are generic over the real scalar type through [`Real`]; the
//! renderer and the CLI are concrete over `f64` and use the aliases
//! exported at the crate root.

pub mod cli;
pub mod correspondence;
pub mod domains;
pub mod dynamics;
pub mod per11;
pub mod render;
mod scalar;

pub use scalar::Real;

pub use correspondence::{
    BranchPair, CorrespondenceError, CriticalPoint, Direction, MoebiusMap, Parameter,
    RepellingDirection, SpherePoint, TaylorJet,
};
pub use domains::{KleinReport, SamplingSpec, StandardDomains};
pub use dynamics::{
    AmbiguityPolicy, Classification, DynamicsError, PeriodicPoint, StepResult, Verdict,
};
pub use per11::CapParameter;

pub use num_complex::Complex;

/// Complex number over `f64`.
pub type C64 = Complex<f64>;
/// Point of the Riemann sphere over `f64`.
pub type Point = SpherePoint<f64>;
/// Family parameter `a` over `f64`.
pub type Param = Parameter<f64>;
/// Standard Klein pair over `f64`.
pub type Domains = StandardDomains<f64>;
/// Escape-time verdict over `f64`.
pub type Class = Classification<f64>;
/// Parameter `A` of `Per₁(1)` over `f64`.
pub type Cap = CapParameter<f64>;

/// Single-precision variants, mostly useful for quick previews.
pub mod f32 {
    use super::*;

    pub type C32 = Complex<f32>;
    pub type Point = SpherePoint<f32>;
    pub type Param = Parameter<f32>;
    pub type Domains = StandardDomains<f32>;
}
