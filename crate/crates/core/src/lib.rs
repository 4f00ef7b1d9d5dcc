//! HARQ combining for an iterative soft-interference-aware receiver on a
//! two-user MIMO interference channel.
//!
//! The numerical core is generic over the scalar type (`f32` or `f64`);
//! the `*64` / `*F32` aliases below fix it.

pub mod analysis;
pub mod channel;
pub mod combiner;
pub mod detector;
pub mod error;
pub mod fec;
pub mod harness;
pub mod linalg;
pub mod modem;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

pub type CVec64 = linalg::CVec<f64>;
pub type CMat64 = linalg::CMat<f64>;
pub type CVecF32 = linalg::CVec<f32>;
pub type CMatF32 = linalg::CMat<f32>;
pub type Constellation64 = modem::Constellation<f64>;
pub type ConstellationF32 = modem::Constellation<f32>;
pub type TransmissionRecord64 = channel::TransmissionRecord<f64>;
pub type DetectorModel64 = detector::DetectorModel<f64>;
pub type LlrFrame64 = detector::LlrFrame<f64>;
