//! The free-particle amplitude `⟨x₁, U(t) x₀⟩` between Gaussian
//! approximants of position eigenstates.

use std::f64::consts::PI;

use num_complex::Complex;

use super::packet::{inner_u, GaussianPacket};
use super::{PhysicalConstants, WavepacketError};
use crate::scalar::{lit, Real};

/// Pairs `φ_{(τ,0)}(·, x₁)` with the free evolution of `φ_{(τ,0)}(·, x₀)`.
/// At `τ = 0` no packet exists and the closed form is returned instead.
pub fn propagator<T: Real>(x1: T, x0: T, t: T, tau: T, c: PhysicalConstants<T>) -> Result<Complex<T>, WavepacketError> {
    if tau < T::zero() || !tau.is_finite() {
        return Err(WavepacketError::Invalid(format!("τ = {tau} must be non-negative")));
    }
    if tau == T::zero() {
        return approx_propagator(x1, x0, t, tau, c);
    }
    let bra = GaussianPacket::gaussian(x1, tau, c)?;
    let ket = GaussianPacket::gaussian(x0, tau, c)?.quadratic_phase_evolution(t)?;
    Ok(inner_u(&bra, &ket)?.value())
}

/// `(2πħ(τ² + it/m))^{−1/2} e^{−(x₁−x₀)²/2ħ(τ² + it/m)}`.
pub fn approx_propagator<T: Real>(
    x1: T,
    x0: T,
    t: T,
    tau: T,
    c: PhysicalConstants<T>,
) -> Result<Complex<T>, WavepacketError> {
    if tau == T::zero() && t == T::zero() {
        return Err(WavepacketError::UndefinedLimit);
    }
    let w = Complex::new(tau * tau, t / c.mass);
    let d = x1 - x0;
    let two_hbar = lit::<T>(2.0) * c.hbar;
    let pre = (w * lit::<T>(PI) * two_hbar).sqrt().inv();
    Ok(pre * (-Complex::new(d * d, T::zero()) / (w * two_hbar)).exp())
}

/// `√(m/2πiħt) e^{im(x₁−x₀)²/2ħt}`.
pub fn exact_propagator<T: Real>(x1: T, x0: T, t: T, c: PhysicalConstants<T>) -> Result<Complex<T>, WavepacketError> {
    if t == T::zero() {
        return Err(WavepacketError::UndefinedLimit);
    }
    let d = x1 - x0;
    let two = lit::<T>(2.0);
    let pre = (Complex::new(c.mass, T::zero()) / Complex::new(T::zero(), two * lit::<T>(PI) * c.hbar * t)).sqrt();
    Ok(pre * Complex::new(T::zero(), c.mass * d * d / (two * c.hbar * t)).exp())
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropagatorRow<T> {
    pub x1: T,
    pub x0: T,
    pub t: T,
    pub tau: T,
    pub k: Complex<T>,
    /// `None` at `t = 0`, where the exact kernel is a delta.
    pub exact: Option<Complex<T>>,
    pub rel_err: Option<T>,
}

pub fn propagator_row<T: Real>(
    x1: T,
    x0: T,
    t: T,
    tau: T,
    c: PhysicalConstants<T>,
) -> Result<PropagatorRow<T>, WavepacketError> {
    let k = propagator(x1, x0, t, tau, c)?;
    let exact = if t == T::zero() { None } else { Some(exact_propagator(x1, x0, t, c)?) };
    let rel_err = exact.map(|e| (k - e).norm() / e.norm());
    Ok(PropagatorRow { x1, x0, t, tau, k, exact, rel_err })
}
