//! Forcing for sheaves of metric structures.
//!
//! The crate is generic over the scalar type `T: Real` (`f32` or `f64`).
//! The `*64` aliases fix `T = f64`.

// `!(x > 0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod logic;
pub mod projective;
pub mod scalar;
pub mod sheaf;
pub mod wavepacket;

pub use scalar::Real;

pub type Condition64 = logic::Condition<f64>;
pub type ValueInterval64 = logic::ValueInterval<f64>;
pub type Verdict64 = sheaf::Verdict<f64>;
pub type Resolution64 = sheaf::Resolution<f64>;
pub type TorusSheaf64 = sheaf::torus::TorusSheaf<f64>;
pub type Ray64 = projective::Ray<f64>;
pub type CMatrix64 = projective::CMatrix<f64>;
pub type PacketSheaf64 = wavepacket::PacketSheaf<f64>;
pub use wavepacket::{GaussianPacket64, PhysicalConstants64};
