//! Polynomial times complex-width Gaussian packets in position and momentum
//! representation, the free-particle propagator built from them, and a
//! numerical oracle that checks the symbolic rules.

pub mod packet;
pub mod poly;
pub mod propagator;
pub mod quadrature;
pub mod seminorm;
pub mod sheaf;

use thiserror::Error;

use crate::scalar::Real;

pub use packet::{inner_u, inner_v, Evaluated, GaussianPacket, PacketSort, PhaseTag, DEFAULT_DEGREE_CAP};
pub use poly::Poly;
pub use propagator::{approx_propagator, exact_propagator, propagator, propagator_row, PropagatorRow};
pub use quadrature::{
    integrate, oracle_delta, oracle_fourier, oracle_inner, width_gap, Majorant, QuadResult, QuadratureSpec,
};
pub use seminorm::{schwartz_seminorm, SEMINORM_CAP};
pub use sheaf::{
    envelope_variance, l2_distance, l2_inner, momentum_variance, propagator_limit, PacketFiber, PacketSheaf,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WavepacketError {
    #[error("{0} must be strictly positive")]
    NonPositive(&'static str),
    #[error("width τ² + t has real part {0}, the Gaussian is not normalizable")]
    NotNormalizable(f64),
    #[error("expected a {expected:?} packet, got {got:?}")]
    Sort { expected: PacketSort, got: PacketSort },
    #[error("imperfection parameters differ: {0} vs {1}")]
    TauMismatch(f64, f64),
    #[error("packets use different physical constants")]
    ConstantsMismatch,
    #[error("polynomial degree {degree} exceeds the cap {cap}")]
    DegreeCap { degree: usize, cap: usize },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("τ = 0 and t = 0 together have no propagator value")]
    UndefinedLimit,
    #[error("quadrature stopped at error {achieved:e}, requested {requested:e}")]
    Quadrature { achieved: f64, requested: f64 },
    #[error("{0}")]
    Invalid(String),
}

/// Reduced Planck constant and particle mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants<T> {
    pub hbar: T,
    pub mass: T,
}

impl<T: Real> PhysicalConstants<T> {
    pub fn new(hbar: T, mass: T) -> Result<Self, WavepacketError> {
        if !(hbar > T::zero()) || !hbar.is_finite() {
            return Err(WavepacketError::NonPositive("ħ"));
        }
        if !(mass > T::zero()) || !mass.is_finite() {
            return Err(WavepacketError::NonPositive("mass"));
        }
        Ok(PhysicalConstants { hbar, mass })
    }

    /// `ħ = m = 1`.
    pub fn natural() -> Self {
        PhysicalConstants { hbar: T::one(), mass: T::one() }
    }
}

pub type PhysicalConstants64 = PhysicalConstants<f64>;
pub type GaussianPacket64 = GaussianPacket<f64>;
