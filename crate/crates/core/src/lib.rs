//! Multi-band channel splicing toolkit.
//!
//! Reconstructs a high-resolution wideband channel impulse response from
//! multiple narrow-band OFDM channel frequency response measurements:
//! sparse multipath channel models, OFDM numerology and least-squares
//! channel estimation, a delay-grid dictionary with orthogonal matching
//! pursuit recovery, and a simulation harness with peak matching and ECDF
//! statistics.
//!
//! All signal-processing modules are generic over the scalar type through
//! the [`numeric::Real`] trait (`f32` or `f64`); the evaluation harness
//! runs at `f64`.

pub mod channel_model;
pub mod error;
pub mod eval_harness;
pub mod linalg;
pub mod numeric;
pub mod ofdm_link;
pub mod splicer;

pub use error::SpliceError;
pub use numeric::{Real, SPEED_OF_LIGHT};

/// Default complex sample type.
pub type C64 = num_complex::Complex<f64>;
/// Single-precision complex sample type.
pub type C32 = num_complex::Complex<f32>;

/// Double-precision aliases for the core domain types.
pub type SparseChannel64 = channel_model::SparseChannel<f64>;
pub type BandPlan64 = ofdm_link::BandPlan<f64>;
pub type CfrMeasurement64 = ofdm_link::CfrMeasurement<f64>;
pub type Dictionary64 = splicer::Dictionary<f64>;
pub type SpliceResult64 = splicer::SpliceResult<f64>;
