//! Numerical kernels behind the meta-solver.
//!
//! Everything here is generic over [`Scalar`] (implemented for `f32` and
//! `f64`); the aliases at the crate root pin the common double-precision
//! instantiations.

pub mod classical;
pub mod decomposition;
pub mod formats;
pub mod quantum;
pub mod scalar;
pub mod tsp_qubo;

pub use scalar::Scalar;

pub type Tour64 = classical::Tour<f64>;
pub type Tour32 = classical::Tour<f32>;
pub type TspInstance64 = formats::TspInstance<f64>;
pub type TspInstance32 = formats::TspInstance<f32>;
pub type VrpInstance64 = formats::VrpInstance<f64>;
pub type VrpInstance32 = formats::VrpInstance<f32>;
pub type KnapsackInstance64 = formats::KnapsackInstance<f64>;
pub type Qubo64 = formats::Qubo<f64>;
pub type Qubo32 = formats::Qubo<f32>;
pub type RouteSolution64 = formats::RouteSolution<f64>;
pub type TspQuboEncoding64 = tsp_qubo::TspQuboEncoding<f64>;
pub type SampleSet64 = quantum::SampleSet<f64>;
pub type QuantumJob64 = quantum::QuantumJob<f64>;
