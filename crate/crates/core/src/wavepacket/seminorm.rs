use num_complex::Complex;

use super::packet::GaussianPacket;
use super::quadrature::Majorant;
use super::WavepacketError;
use crate::scalar::{lit, Real};

/// Largest `α` and `β` accepted by [`schwartz_seminorm`].
pub const SEMINORM_CAP: usize = 4;

const GRID: usize = 2048;

/// `sup_ξ |ξ^α ∂^β ψ(ξ)|`: grid search over a radius past which the Gaussian
/// majorant is negligible, then golden-section refinement at the best cell.
pub fn schwartz_seminorm<T: Real>(psi: &GaussianPacket<T>, alpha: usize, beta: usize) -> Result<T, WavepacketError> {
    if alpha > SEMINORM_CAP || beta > SEMINORM_CAP {
        return Err(WavepacketError::Invalid(format!("seminorm orders ({alpha}, {beta}) exceed {SEMINORM_CAP}")));
    }
    let mut d = psi.clone();
    d.degree_cap = usize::MAX;
    for _ in 0..beta {
        d = d.derivative()?;
    }
    let c = d.center;
    let g = |xi: T| -> T { (d.eval(xi) * Complex::new(xi.powi(alpha as i32), T::zero())).norm() };

    // |ξ|^α ≤ (|u| + |c|)^α folded into the majorant of the derivative
    let mut m = Majorant::of_packet(&d);
    let mut shift = vec![T::one()];
    for _ in 0..alpha {
        let mut next = vec![T::zero(); shift.len() + 1];
        for (k, s) in shift.iter().enumerate() {
            next[k] += *s * c.abs();
            next[k + 1] += *s;
        }
        shift = next;
    }
    let mut moduli = vec![T::zero(); m.moduli.len() + shift.len() - 1];
    for (i, a) in m.moduli.iter().enumerate() {
        for (j, b) in shift.iter().enumerate() {
            moduli[i + j] += *a * *b;
        }
    }
    m.moduli = moduli;
    let mut l = m.radius_for(lit(1e-15));
    while m.at(l) > lit(1e-15) {
        l *= lit(1.25);
    }

    let step = (l + l) / lit(GRID as f64);
    let (mut best, mut at) = (g(c), c);
    for j in 0..=GRID {
        let xi = c - l + step * lit(j as f64);
        let v = g(xi);
        if v > best {
            best = v;
            at = xi;
        }
    }
    // golden section on the bracketing cells
    let phi: T = lit(0.618_033_988_749_894_8);
    let (mut a, mut b) = (at - step, at + step);
    for _ in 0..80 {
        let x1 = b - phi * (b - a);
        let x2 = a + phi * (b - a);
        if g(x1) < g(x2) {
            a = x1;
        } else {
            b = x2;
        }
    }
    // past the radius the majorant decreases and stays below 1e-15
    Ok(best.max(g((a + b) / lit(2.0))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavepacket::{PacketSort, PhysicalConstants, Poly};

    fn std_gaussian() -> GaussianPacket<f64> {
        GaussianPacket::gaussian(0.0, 1.0, PhysicalConstants::natural()).unwrap()
    }

    #[test]
    fn worked_values() {
        let g = std_gaussian();
        assert!((schwartz_seminorm(&g, 0, 0).unwrap() - 0.398_942_280_401_432_7).abs() < 1e-12);
        let u = g.apply_x().unwrap();
        let want = (-0.5f64).exp() / (2.0 * std::f64::consts::PI).sqrt();
        assert!((schwartz_seminorm(&u, 0, 0).unwrap() - want).abs() < 1e-12);
        assert!((want - 0.241971).abs() < 1e-6);
        // first derivative of the Gaussian is −u φ
        assert!((schwartz_seminorm(&g, 0, 1).unwrap() - want).abs() < 1e-12);
        assert!((schwartz_seminorm(&g, 1, 0).unwrap() - want).abs() < 1e-12);
        assert!(schwartz_seminorm(&g, 5, 0).is_err());
    }

    #[test]
    fn zero_order_is_the_grid_maximum() {
        let p = GaussianPacket::new(
            PacketSort::Position,
            Poly::new(vec![Complex::new(0.3, 1.0), Complex::new(-1.0, 0.2), Complex::new(0.0, 0.7)]),
            1.2,
            0.8,
            Complex::new(0.1, 0.5),
            PhysicalConstants::natural(),
        )
        .unwrap();
        let s = schwartz_seminorm(&p, 0, 0).unwrap();
        let grid = (0..20001).map(|j| p.eval(-10.0 + 0.001 * j as f64).norm()).fold(0.0, f64::max);
        assert!(s >= grid - 1e-12 && s <= grid + 1e-6);
    }
}
