//! Adaptive Gauss–Kronrod integration on the real line, with Gaussian tail
//! bounds, used as an independent check of the symbolic packet rules.

use std::f64::consts::PI;

use num_complex::Complex;

use super::packet::{GaussianPacket, PacketSort};
use super::{PhysicalConstants, WavepacketError};
use crate::scalar::{lit, to_f64, Real};

// published to more digits than f64 holds
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
/// Gauss weights for the odd-indexed Kronrod nodes.
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_segments: usize,
    /// Bound on the mass outside the truncated domain.
    pub tail: T,
}

impl<T: Real> Default for QuadratureSpec<T> {
    fn default() -> Self {
        QuadratureSpec { abs_tol: lit(1e-14), rel_tol: lit(1e-12), max_segments: 4000, tail: lit(1e-13) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<T> {
    pub value: Complex<T>,
    /// Kronrod–Gauss difference summed over the segments.
    pub error: T,
    /// Bound on the integral outside the truncated domain.
    pub tail_bound: T,
    pub segments: usize,
}

#[derive(Clone, Copy)]
struct Segment<T> {
    a: T,
    b: T,
    value: Complex<T>,
    error: T,
}

fn gk15<T: Real, F: Fn(T) -> Complex<T>>(f: &F, a: T, b: T) -> Segment<T> {
    let half = (b - a) / lit(2.0);
    let mid = (a + b) / lit(2.0);
    let zero = Complex::new(T::zero(), T::zero());
    let (mut k, mut g) = (zero, zero);
    for (j, (&x, &w)) in XGK.iter().zip(&WGK).enumerate() {
        let pts: &[T] = if x == 0.0 { &[T::zero()] } else { &[lit(x), lit(-x)] };
        for &s in pts {
            let v = f(mid + half * s);
            k += v * lit::<T>(w);
            if j % 2 == 1 {
                g += v * lit::<T>(WG[j / 2]);
            }
        }
    }
    Segment { a, b, value: k * half, error: ((k - g) * half).norm() }
}

/// `∫_a^b f` by globally adaptive G7–K15, refining the worst segment until the
/// summed error estimate meets `max(abs_tol, rel_tol · |I|)`.
pub fn integrate<T: Real, F: Fn(T) -> Complex<T>>(
    f: F,
    a: T,
    b: T,
    spec: &QuadratureSpec<T>,
) -> Result<QuadResult<T>, WavepacketError> {
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(WavepacketError::Invalid(format!("integration bounds [{a}, {b}]")));
    }
    let start = 8;
    let step = (b - a) / lit(start as f64);
    let mut segs: Vec<Segment<T>> = (0..start)
        .map(|j| {
            let lo = a + step * lit(j as f64);
            let hi = if j + 1 == start { b } else { lo + step };
            gk15(&f, lo, hi)
        })
        .collect();
    loop {
        segs.sort_by(|x, y| x.a.partial_cmp(&y.a).expect("finite bounds"));
        let value = segs.iter().fold(Complex::new(T::zero(), T::zero()), |acc, s| acc + s.value);
        let error = segs.iter().fold(T::zero(), |acc, s| acc + s.error);
        let target = spec.abs_tol.max(spec.rel_tol * value.norm());
        if error <= target {
            return Ok(QuadResult { value, error, tail_bound: T::zero(), segments: segs.len() });
        }
        let worst = (0..segs.len())
            .max_by(|&i, &j| segs[i].error.partial_cmp(&segs[j].error).expect("finite errors"))
            .expect("segments");
        let s = segs[worst];
        let mid = (s.a + s.b) / lit(2.0);
        if segs.len() >= spec.max_segments || !(s.a < mid && mid < s.b) {
            return Err(WavepacketError::Quadrature { achieved: to_f64(error), requested: to_f64(target) });
        }
        segs[worst] = gk15(&f, s.a, mid);
        segs.push(gk15(&f, mid, s.b));
    }
}

/// `|g(x)| ≤ Σ_k m_k |x − c|^k · C e^{−a (x − c)²}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Majorant<T> {
    pub center: T,
    pub moduli: Vec<T>,
    pub scale: T,
    pub rate: T,
}

impl<T: Real> Majorant<T> {
    pub fn of_packet(p: &GaussianPacket<T>) -> Self {
        let (pre, rate) = (p.prefactor().norm(), p.exponent_rate().re);
        Majorant { center: p.center, moduli: p.poly.moduli(), scale: pre, rate }
    }

    pub fn at(&self, r: T) -> T {
        let poly = self.moduli.iter().rev().fold(T::zero(), |acc, m| acc * r + *m);
        poly * self.scale * (-self.rate * r * r).exp()
    }

    /// `sup_u u^k e^{−a u²} = (k / 2ae)^{k/2}` summed over the terms.
    pub fn sup(&self) -> T {
        let two_ae = lit::<T>(2.0) * self.rate * lit(std::f64::consts::E);
        let terms = self.moduli.iter().enumerate().map(|(k, m)| {
            if k == 0 {
                *m
            } else {
                let kk = lit::<T>(k as f64);
                *m * (kk / two_ae).powf(kk / lit(2.0))
            }
        });
        self.scale * terms.fold(T::zero(), |acc, v| acc + v)
    }

    /// Bound on `∫_{|x−c|>L} |g|`. For `2aL² > k` the term `u^k e^{−au²}`
    /// decays at least like `e^{−(2aL − k/L)(u − L)}` beyond `L`.
    pub fn tail(&self, l: T) -> T {
        let two = lit::<T>(2.0);
        let mut sum = T::zero();
        for (k, m) in self.moduli.iter().enumerate() {
            let kk = lit::<T>(k as f64);
            let slope = two * self.rate * l - kk / l;
            if !(slope > T::zero()) {
                return T::infinity();
            }
            sum += *m * l.powi(k as i32) * (-self.rate * l * l).exp() / slope;
        }
        two * self.scale * sum
    }

    /// Smallest radius in a doubling sequence with tail below `target`.
    pub fn radius_for(&self, target: T) -> T {
        let deg = lit::<T>(self.moduli.len() as f64);
        let mut l = (deg / self.rate).sqrt().max(self.rate.sqrt().recip());
        for _ in 0..200 {
            if self.tail(l) < target {
                return l;
            }
            l *= lit(1.25);
        }
        l
    }
}

/// Integrates `f` with `|f| ≤ |g_a| |g_b|` for the two majorised
/// functions; the truncated domain covers both centres.
pub(crate) fn integrate_pair<T: Real, F: Fn(T) -> Complex<T>>(
    f: F,
    a: &Majorant<T>,
    b: &Majorant<T>,
    spec: &QuadratureSpec<T>,
) -> Result<QuadResult<T>, WavepacketError> {
    let half = spec.tail / lit(2.0);
    let (sa, sb) = (a.sup(), b.sup());
    let la = a.radius_for(half / sb.max(T::min_positive_value()));
    let lb = b.radius_for(half / sa.max(T::min_positive_value()));
    let l = la.max(lb);
    let lo = a.center.min(b.center) - l;
    let hi = a.center.max(b.center) + l;
    let mut r = integrate(f, lo, hi, spec)?;
    r.tail_bound = sb * a.tail(l) + sa * b.tail(l);
    Ok(r)
}

/// `∫ φ_{(τ,0)}(x, 0) g(x) dx` for `|g| ≤ g_sup`.
pub fn oracle_delta<T: Real, G: Fn(T) -> Complex<T>>(
    tau: T,
    g: G,
    g_sup: T,
    c: PhysicalConstants<T>,
    spec: &QuadratureSpec<T>,
) -> Result<QuadResult<T>, WavepacketError> {
    let phi = GaussianPacket::gaussian(T::zero(), tau, c)?;
    let flat = Majorant { center: T::zero(), moduli: vec![g_sup], scale: T::one(), rate: T::zero() };
    let m = Majorant::of_packet(&phi);
    let l = m.radius_for(spec.tail / g_sup.max(T::min_positive_value()));
    let mut r = integrate(|x| phi.eval(x) * g(x), -l, l, spec)?;
    r.tail_bound = flat.sup() * m.tail(l);
    Ok(r)
}

/// The literal bilinear integral `∫ a(x) b(x) dx` of two position packets.
pub fn oracle_inner<T: Real>(
    a: &GaussianPacket<T>,
    b: &GaussianPacket<T>,
    spec: &QuadratureSpec<T>,
) -> Result<QuadResult<T>, WavepacketError> {
    for p in [a, b] {
        if p.sort != PacketSort::Position {
            return Err(WavepacketError::Sort { expected: PacketSort::Position, got: p.sort });
        }
    }
    integrate_pair(|x| a.eval(x) * b.eval(x), &Majorant::of_packet(a), &Majorant::of_packet(b), spec)
}

/// `(2πħ)^{−1/2} ∫ e^{−i(x−x₀)(p−p₀)/ħ} ψ(x) dx` at momentum `p`, with `p₀`
/// the packet's conjugate centre.
pub fn oracle_fourier<T: Real>(
    psi: &GaussianPacket<T>,
    p: T,
    spec: &QuadratureSpec<T>,
) -> Result<QuadResult<T>, WavepacketError> {
    if psi.sort != PacketSort::Position {
        return Err(WavepacketError::Sort { expected: PacketSort::Position, got: psi.sort });
    }
    let hbar = psi.constants.hbar;
    let k = (p - psi.conjugate_center) / hbar;
    let norm = (lit::<T>(2.0 * PI) * hbar).sqrt().recip();
    let m = Majorant::of_packet(psi);
    let l = m.radius_for(spec.tail / norm);
    let x0 = psi.center;
    let mut r = integrate(|x| psi.eval(x) * Complex::new(T::zero(), -(x - x0) * k).exp() * norm, x0 - l, x0 + l, spec)?;
    r.tail_bound = norm * m.tail(l);
    Ok(r)
}

/// Width parameter of the literal self-pairing of `φ_{(τ,t)}` at zero
/// separation, read off the quadrature value `(2πħw)^{−1/2}`, minus the
/// parameter `τ² + 2t` the defined pairing keeps.
pub fn width_gap<T: Real>(
    tau: T,
    t: Complex<T>,
    c: PhysicalConstants<T>,
    spec: &QuadratureSpec<T>,
) -> Result<(Complex<T>, QuadResult<T>), WavepacketError> {
    let p = GaussianPacket::new(PacketSort::Position, super::Poly::one(), T::zero(), tau, t, c)?;
    let r = oracle_inner(&p, &p, spec)?;
    let literal = (r.value * r.value * lit::<T>(2.0 * PI) * c.hbar).inv();
    let defined = Complex::new(tau * tau, T::zero()) + t + t;
    Ok((literal - defined, r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavepacket::Poly;

    fn z(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn polynomials_are_exact() {
        let spec = QuadratureSpec::default();
        let r = integrate(|x: f64| z(x * x * x - 2.0 * x, 1.0), -1.0, 2.0, &spec).unwrap();
        assert!((r.value - z(0.75, 3.0)).norm() < 1e-14);
        let r = integrate(|x: f64| z(x.cos(), 0.0), 0.0, PI / 2.0, &spec).unwrap();
        assert!((r.value.re - 1.0).abs() < 1e-13);
        assert!(integrate(|x: f64| z(x, 0.0), 1.0, 0.0, &spec).is_err());
    }

    #[test]
    fn non_convergence_reports_the_achieved_error() {
        let spec = QuadratureSpec { max_segments: 20, ..QuadratureSpec::default() };
        let e = integrate(|x: f64| z((1.0 / x).sin(), 0.0), 1e-6, 1.0, &spec);
        assert!(matches!(e, Err(WavepacketError::Quadrature { .. })));
    }

    #[test]
    fn gaussian_mass() {
        let spec = QuadratureSpec::default();
        let c = PhysicalConstants::new(0.8, 1.0).unwrap();
        for tau in [1.0, 0.1, 0.01] {
            let r = oracle_delta(tau, |_| z(1.0, 0.0), 1.0, c, &spec).unwrap();
            assert!((r.value - z(1.0, 0.0)).norm() < 1e-11, "{tau}");
            assert!(r.tail_bound < 1e-12);
        }
    }

    #[test]
    fn majorant_bounds_the_packet() {
        let p = GaussianPacket::new(
            PacketSort::Position,
            Poly::new(vec![z(1.0, 1.0), z(0.0, -2.0), z(0.5, 0.0)]),
            0.3,
            0.7,
            z(0.2, 0.9),
            PhysicalConstants::natural(),
        )
        .unwrap()
        .phase_multiply_x(&[0.0, 0.0, 0.0, 1.0], 1.0)
        .unwrap();
        let m = Majorant::of_packet(&p);
        let sup = m.sup();
        for j in 0..400 {
            let x = -8.0 + 0.04 * j as f64;
            let v = p.eval(x).norm();
            assert!(v <= m.at((x - 0.3).abs()) * (1.0 + 1e-12));
            assert!(v <= sup * (1.0 + 1e-12));
        }
        let l = m.radius_for(1e-13);
        let rest =
            integrate(|x: f64| z(p.eval(x).norm(), 0.0), 0.3 + l, 0.3 + l + 20.0, &QuadratureSpec::default()).unwrap();
        assert!(rest.value.re <= m.tail(l) / 2.0 + 1e-18);
    }

    #[test]
    fn gaussian_self_pairing_has_doubled_width() {
        let spec = QuadratureSpec::default();
        for tau in [0.5, 0.1, 0.01] {
            let (gap, r) = width_gap(tau, z(0.0, 0.0), PhysicalConstants::natural(), &spec).unwrap();
            assert!((gap - z(tau * tau, 0.0)).norm() < 1e-9 * tau * tau, "{tau}: {gap}");
            assert!(r.tail_bound < 1e-12);
        }
    }
}
