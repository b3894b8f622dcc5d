use std::f64::consts::PI;

use num_complex::Complex;

use super::poly::Poly;
use super::{PhysicalConstants, WavepacketError};
use crate::scalar::{lit, to_f64, Real};

pub const DEFAULT_DEGREE_CAP: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PacketSort {
    /// `q(x − x₀) φ_{(τ,t)}(x, x₀)`.
    Position,
    /// `q(p − p₀) φ_{1/(τ,t)}(p, p₀)`.
    Momentum,
}

/// An unevaluated factor `e^{i s f(u)}` with `f` real of degree above two.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseTag<T> {
    pub f: Vec<T>,
    pub s: T,
}

impl<T: Real> PhaseTag<T> {
    fn factor(&self, u: T) -> Complex<T> {
        let fu = self.f.iter().rev().fold(T::zero(), |acc, c| acc * u + *c);
        Complex::new(T::zero(), self.s * fu).exp()
    }

    /// `s f'` as a polynomial.
    fn log_derivative(&self) -> Poly<T> {
        Poly::from_real(&self.f).derivative().scale(Complex::new(T::zero(), self.s))
    }
}

/// `q(u) · e^{iku} · Π e^{i s f(u)} · envelope(u)` with `u = ξ − ξ₀`.
///
/// The width `w = τ² + t` always has positive real part, so the principal
/// square roots taken of it never meet the branch cut and vary continuously
/// along any path of admissible `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianPacket<T> {
    pub sort: PacketSort,
    pub poly: Poly<T>,
    /// `x₀` for position packets, `p₀` for momentum packets.
    pub center: T,
    /// The other centre, carried through Fourier transforms.
    pub conjugate_center: T,
    pub tau: T,
    pub t: Complex<T>,
    pub constants: PhysicalConstants<T>,
    /// `k` in the linear phase `e^{iku}`.
    pub linear_phase: T,
    pub phases: Vec<PhaseTag<T>>,
    pub degree_cap: usize,
}

fn c<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

fn i<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::one())
}

impl<T: Real> GaussianPacket<T> {
    pub fn new(
        sort: PacketSort,
        poly: Poly<T>,
        center: T,
        tau: T,
        t: Complex<T>,
        constants: PhysicalConstants<T>,
    ) -> Result<Self, WavepacketError> {
        if !(tau > T::zero()) || !tau.is_finite() {
            return Err(WavepacketError::NonPositive("τ"));
        }
        let p = GaussianPacket {
            sort,
            poly,
            center,
            conjugate_center: T::zero(),
            tau,
            t,
            constants,
            linear_phase: T::zero(),
            phases: Vec::new(),
            degree_cap: DEFAULT_DEGREE_CAP,
        };
        p.check()
    }

    /// `φ_{(τ,0)}(·, x₀)`.
    pub fn gaussian(x0: T, tau: T, constants: PhysicalConstants<T>) -> Result<Self, WavepacketError> {
        Self::new(PacketSort::Position, Poly::one(), x0, tau, c(T::zero()), constants)
    }

    pub fn with_conjugate_center(mut self, xi: T) -> Self {
        self.conjugate_center = xi;
        self
    }

    pub fn with_degree_cap(mut self, cap: usize) -> Result<Self, WavepacketError> {
        self.degree_cap = cap;
        self.check()
    }

    fn check(self) -> Result<Self, WavepacketError> {
        let w = self.width();
        if !(w.re > T::zero()) || !w.im.is_finite() {
            return Err(WavepacketError::NotNormalizable(to_f64(w.re)));
        }
        if self.poly.degree() > self.degree_cap {
            return Err(WavepacketError::DegreeCap { degree: self.poly.degree(), cap: self.degree_cap });
        }
        Ok(self)
    }

    fn with_poly(&self, poly: Poly<T>) -> Result<Self, WavepacketError> {
        GaussianPacket { poly, ..self.clone() }.check()
    }

    /// `τ² + t`.
    pub fn width(&self) -> Complex<T> {
        c(self.tau * self.tau) + self.t
    }

    pub fn has_phases(&self) -> bool {
        self.linear_phase != T::zero() || !self.phases.is_empty()
    }

    fn expect_sort(&self, want: PacketSort) -> Result<(), WavepacketError> {
        if self.sort == want {
            Ok(())
        } else {
            Err(WavepacketError::Sort { expected: want, got: self.sort })
        }
    }

    fn expect_plain(&self, what: &str) -> Result<(), WavepacketError> {
        if self.has_phases() {
            Err(WavepacketError::Unsupported(format!("{what} of a packet carrying phase factors")))
        } else {
            Ok(())
        }
    }

    /// Normalization constant of the envelope.
    pub fn prefactor(&self) -> Complex<T> {
        let two_pi_hbar = c(lit::<T>(2.0 * PI) * self.constants.hbar);
        match self.sort {
            PacketSort::Position => (two_pi_hbar * self.width()).sqrt().inv(),
            PacketSort::Momentum => (self.width() / two_pi_hbar).sqrt(),
        }
    }

    /// `a` in the Gaussian factor `e^{−a u²}` of the envelope.
    pub fn exponent_rate(&self) -> Complex<T> {
        let two_hbar = c(lit::<T>(2.0) * self.constants.hbar);
        match self.sort {
            PacketSort::Position => (two_hbar * self.width()).inv(),
            PacketSort::Momentum => self.width() / two_hbar,
        }
    }

    pub fn envelope(&self, u: T) -> Complex<T> {
        self.prefactor() * (-self.exponent_rate() * c(u * u)).exp()
    }

    /// Pointwise value at `ξ`.
    pub fn eval(&self, xi: T) -> Complex<T> {
        let u = xi - self.center;
        let mut v = self.poly.eval_real(u) * self.envelope(u);
        if self.linear_phase != T::zero() {
            v *= Complex::new(T::zero(), self.linear_phase * u).exp();
        }
        self.phases.iter().fold(v, |acc, p| acc * p.factor(u))
    }

    /// Polynomial `L` with `∂_ξ (q · rest) = (q' + L q) · rest`.
    pub(crate) fn log_derivative(&self) -> Poly<T> {
        let rate = self.exponent_rate();
        let mut l = Poly::new(vec![Complex::new(T::zero(), self.linear_phase), -(rate + rate)]);
        for p in &self.phases {
            l = &l + &p.log_derivative();
        }
        l
    }

    /// `∂_ξ`, keeping every factor but the polynomial.
    pub fn derivative(&self) -> Result<Self, WavepacketError> {
        let q = &self.poly.derivative() + &(&self.log_derivative() * &self.poly);
        self.with_poly(q)
    }

    /// `x̂`: multiplies the polynomial by `x − x₀`.
    pub fn apply_x(&self) -> Result<Self, WavepacketError> {
        self.expect_sort(PacketSort::Position)?;
        self.with_poly(self.poly.shift_up())
    }

    /// `p̂ = −iħ ∂_x`.
    pub fn apply_p(&self) -> Result<Self, WavepacketError> {
        self.expect_sort(PacketSort::Position)?;
        if !self.phases.is_empty() {
            return Err(WavepacketError::Unsupported("momentum operator on a tagged phase".into()));
        }
        let d = self.derivative()?;
        self.with_poly(d.poly.scale(-i::<T>() * c(self.constants.hbar)))
    }

    /// Position to momentum representation: same polynomial, scaled by
    /// `1/√(τ² + t)`.
    pub fn fourier(&self) -> Result<Self, WavepacketError> {
        self.expect_sort(PacketSort::Position)?;
        self.expect_plain("Fourier transform")?;
        let poly = self.poly.scale(self.width().sqrt().inv());
        GaussianPacket {
            sort: PacketSort::Momentum,
            poly,
            center: self.conjugate_center,
            conjugate_center: self.center,
            ..self.clone()
        }
        .check()
    }

    pub fn inverse_fourier(&self) -> Result<Self, WavepacketError> {
        self.expect_sort(PacketSort::Momentum)?;
        self.expect_plain("inverse Fourier transform")?;
        let poly = self.poly.scale(self.width().sqrt());
        GaussianPacket {
            sort: PacketSort::Position,
            poly,
            center: self.conjugate_center,
            conjugate_center: self.center,
            ..self.clone()
        }
        .check()
    }

    /// Multiplies by `e^{i s u²}`, absorbed into the width. The envelope
    /// normalization changes with the width, so the polynomial takes the ratio.
    fn fold_quadratic_phase(&self, s: T) -> Result<Self, WavepacketError> {
        let w = self.width();
        let shift = Complex::new(T::zero(), lit::<T>(2.0) * self.constants.hbar * s);
        let (w2, ratio) = match self.sort {
            PacketSort::Position => {
                let w2 = (w.inv() - shift).inv();
                (w2, w2.sqrt() / w.sqrt())
            }
            PacketSort::Momentum => {
                let w2 = w - shift;
                (w2, w.sqrt() / w2.sqrt())
            }
        };
        debug_assert!(w2.sqrt().re > T::zero());
        GaussianPacket { poly: self.poly.scale(ratio), t: w2 - c(self.tau * self.tau), ..self.clone() }.check()
    }

    /// `e^{i t_phys f(x̂)}` for a real polynomial `f` in `x − x₀`. Degrees up to
    /// two fold into the scalar, linear phase and width; higher degrees are kept
    /// as a tag that only pointwise evaluation understands.
    pub fn phase_multiply_x(&self, f: &[T], t_phys: T) -> Result<Self, WavepacketError> {
        self.expect_sort(PacketSort::Position)?;
        let deg = f.iter().rposition(|a| *a != T::zero());
        match deg {
            None => Ok(self.clone()),
            Some(d) if d > 2 => {
                let mut out = self.clone();
                out.phases.push(PhaseTag { f: f[..=d].to_vec(), s: t_phys });
                Ok(out)
            }
            Some(d) => {
                let coef = |k: usize| if k <= d { f[k] } else { T::zero() };
                let mut out = self.with_poly(self.poly.scale(Complex::new(T::zero(), t_phys * coef(0)).exp()))?;
                out.linear_phase += t_phys * coef(1);
                if coef(2) != T::zero() {
                    out = out.fold_quadratic_phase(t_phys * coef(2))?;
                }
                Ok(out)
            }
        }
    }

    /// Free evolution `e^{−i t p̂²/2mħ}` through momentum space: transform,
    /// multiply by the quadratic phase there, transform back. Net effect
    /// `t ← t + i t_phys/m`.
    pub fn quadratic_phase_evolution(&self, t_phys: T) -> Result<Self, WavepacketError> {
        self.expect_sort(PacketSort::Position)?;
        if self.poly.degree() > 0 {
            return Err(WavepacketError::Unsupported(format!(
                "free evolution of a degree {} polynomial packet",
                self.poly.degree()
            )));
        }
        if t_phys == T::zero() {
            return Ok(self.clone());
        }
        let s = -t_phys / (lit::<T>(2.0) * self.constants.mass * self.constants.hbar);
        self.fourier()?.fold_quadratic_phase(s)?.inverse_fourier()
    }

    /// Coefficient-wise comparison, relative to the larger coefficient.
    pub fn approx_eq(&self, other: &Self, rel: T) -> bool {
        let scale = self.poly.moduli().into_iter().chain(other.poly.moduli()).fold(T::zero(), T::max).max(T::one());
        self.sort == other.sort
            && self.center == other.center
            && self.tau == other.tau
            && self.t == other.t
            && self.constants == other.constants
            && self.linear_phase == other.linear_phase
            && self.phases == other.phases
            && self.poly.max_diff(&other.poly) <= rel * scale
    }
}

/// A packet retained symbolically together with the point it is evaluated at.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluated<T> {
    pub packet: GaussianPacket<T>,
    pub at: T,
}

impl<T: Real> Evaluated<T> {
    pub fn value(&self) -> Complex<T> {
        self.packet.eval(self.at)
    }
}

fn pairing<T: Real>(
    a: &GaussianPacket<T>,
    b: &GaussianPacket<T>,
    sort: PacketSort,
) -> Result<Evaluated<T>, WavepacketError> {
    a.expect_sort(sort)?;
    b.expect_sort(sort)?;
    if a.tau != b.tau {
        return Err(WavepacketError::TauMismatch(to_f64(a.tau), to_f64(b.tau)));
    }
    if a.constants != b.constants {
        return Err(WavepacketError::ConstantsMismatch);
    }
    a.expect_plain("inner product")?;
    b.expect_plain("inner product")?;
    let poly = &a.poly * &b.poly;
    let packet = GaussianPacket {
        sort,
        poly,
        center: T::zero(),
        conjugate_center: T::zero(),
        tau: a.tau,
        t: a.t + b.t,
        constants: a.constants,
        linear_phase: T::zero(),
        phases: Vec::new(),
        degree_cap: a.degree_cap.max(b.degree_cap),
    }
    .check()?;
    Ok(Evaluated { packet, at: a.center - b.center })
}

/// The position-sort pairing that keeps `τ`: polynomial product and summed
/// `t`, evaluated at the separation of the centres.
pub fn inner_u<T: Real>(a: &GaussianPacket<T>, b: &GaussianPacket<T>) -> Result<Evaluated<T>, WavepacketError> {
    pairing(a, b, PacketSort::Position)
}

pub fn inner_v<T: Real>(a: &GaussianPacket<T>, b: &GaussianPacket<T>) -> Result<Evaluated<T>, WavepacketError> {
    pairing(a, b, PacketSort::Momentum)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nat() -> PhysicalConstants<f64> {
        PhysicalConstants::natural()
    }

    fn z(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn packet(poly: Poly<f64>, x0: f64, tau: f64, t: Complex<f64>) -> GaussianPacket<f64> {
        GaussianPacket::new(PacketSort::Position, poly, x0, tau, t, nat()).unwrap()
    }

    #[test]
    fn standard_gaussian_values() {
        let g = GaussianPacket::gaussian(0.0, 1.0, nat()).unwrap();
        assert!((g.eval(0.0) - z(0.398_942_280_401_432_7, 0.0)).norm() < 1e-15);
        for x in [-10.5, 10.5, 30.0] {
            assert!(g.eval(x).norm() < 1e-12);
        }
        let q = packet(Poly::monomial(1), 1.7, 0.6, z(0.2, 0.3));
        assert_eq!(q.eval(1.7), z(0.0, 0.0));
    }

    #[test]
    fn rejects_bad_widths() {
        let e = GaussianPacket::new(PacketSort::Position, Poly::one(), 0.0, 1.0, z(-1.0, 0.5), nat());
        assert!(matches!(e, Err(WavepacketError::NotNormalizable(_))));
        assert!(GaussianPacket::gaussian(0.0, 0.0, nat()).is_err());
        let big = GaussianPacket::new(PacketSort::Position, Poly::monomial(17), 0.0, 1.0, z(0.0, 0.0), nat());
        assert!(matches!(big, Err(WavepacketError::DegreeCap { degree: 17, cap: 16 })));
    }

    #[test]
    fn inner_products() {
        let tau = 0.3;
        let hbar = 1.0;
        let a = packet(Poly::one(), 0.4, tau, z(0.0, 0.0));
        let at_zero = inner_u(&a, &a).unwrap().value();
        let want = 1.0 / (2.0 * PI * hbar * tau * tau).sqrt();
        assert!((at_zero - z(want, 0.0)).norm() < 1e-12);

        let (x0, x1) = (0.9, -0.2);
        let b = packet(Poly::one(), x1, tau, z(0.1, 0.4));
        let qa = packet(Poly::monomial(1), x0, tau, z(0.2, 0.0));
        let r = inner_u(&qa, &b).unwrap();
        let env = packet(Poly::one(), 0.0, tau, z(0.3, 0.4));
        assert!((r.value() - env.eval(x0 - x1) * (x0 - x1)).norm() < 1e-14);

        let va = a.fourier().unwrap().with_conjugate_center(0.0);
        let v = inner_v(&va, &va).unwrap().value();
        // fourier scales by 1/τ on each side
        assert!((v - z((tau * tau / (2.0 * PI)).sqrt() / (tau * tau), 0.0)).norm() < 1e-12);
        assert!(matches!(inner_u(&a, &va), Err(WavepacketError::Sort { .. })));
        let other = packet(Poly::one(), 0.0, 0.5, z(0.0, 0.0));
        assert!(matches!(inner_u(&a, &other), Err(WavepacketError::TauMismatch(..))));
    }

    #[test]
    fn momentum_inner_product_at_a_separation() {
        let tau = 0.7;
        let mk = |p0: f64| GaussianPacket::new(PacketSort::Momentum, Poly::one(), p0, tau, z(0.0, 0.0), nat()).unwrap();
        let (a, b) = (mk(0.5), mk(-0.25));
        let r = inner_v(&a, &b).unwrap();
        assert!((r.value() - mk(0.0).eval(0.75)).norm() < 1e-15);
        assert!((mk(0.0).eval(0.0) - z((tau * tau / (2.0 * PI)).sqrt(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn position_and_momentum_operators() {
        let p = packet(Poly::one(), 0.3, 0.8, z(0.1, -0.2));
        assert_eq!(p.apply_x().unwrap().poly, Poly::monomial(1));
        assert_eq!(p.apply_x().unwrap().apply_x().unwrap().poly, Poly::monomial(2));
        let w = p.width();
        let dp = p.apply_p().unwrap();
        assert!(dp.poly.max_diff(&Poly::new(vec![z(0.0, 0.0), z(0.0, 1.0) / w])) < 1e-15);
        let q = packet(Poly::monomial(1), 0.3, 0.8, z(0.1, -0.2));
        let want = Poly::new(vec![z(0.0, -1.0), z(0.0, 0.0), z(0.0, 1.0) / w]);
        assert!(q.apply_p().unwrap().poly.max_diff(&want) < 1e-15);
    }

    #[test]
    fn commutator_is_i_hbar() {
        let consts = PhysicalConstants::new(0.7, 2.0).unwrap();
        let q = Poly::new(vec![z(1.0, 0.5), z(-0.3, 2.0), z(0.25, 0.0)]);
        let p = GaussianPacket::new(PacketSort::Position, q.clone(), -1.0, 0.9, z(0.3, 0.8), consts).unwrap();
        let xp = p.apply_p().unwrap().apply_x().unwrap();
        let px = p.apply_x().unwrap().apply_p().unwrap();
        let comm = &xp.poly - &px.poly;
        assert!(comm.max_diff(&q.scale(z(0.0, 0.7))) < 1e-12);
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let p = packet(Poly::new(vec![z(1.0, 0.0), z(0.0, 1.0)]), 0.2, 1.1, z(0.3, 0.5))
            .phase_multiply_x(&[0.0, 0.7, 0.0, 0.1], 1.3)
            .unwrap()
            .phase_multiply_x(&[0.0, 0.4], 1.0)
            .unwrap();
        let d = p.derivative().unwrap();
        let h = 1e-5;
        for x in [-0.7, 0.1, 1.4] {
            let fd = (p.eval(x + h) - p.eval(x - h)) / (2.0 * h);
            assert!((d.eval(x) - fd).norm() < 1e-8, "{x}");
        }
    }

    #[test]
    fn fourier_round_trip_and_scaling() {
        let g = GaussianPacket::gaussian(0.5, 0.4, nat()).unwrap().with_conjugate_center(-1.0);
        let v = g.fourier().unwrap();
        assert_eq!(v.sort, PacketSort::Momentum);
        assert_eq!((v.center, v.conjugate_center), (-1.0, 0.5));
        assert!(v.poly.max_diff(&Poly::constant(z(1.0 / 0.4, 0.0))) < 1e-14);
        let p = packet(Poly::new(vec![z(1.0, 2.0), z(0.0, -1.0), z(3.0, 0.5)]), 0.1, 0.6, z(0.2, 1.5));
        assert!(p.fourier().unwrap().inverse_fourier().unwrap().approx_eq(&p, 1e-15));
        assert!(p.inverse_fourier().is_err());
    }

    #[test]
    fn free_evolution() {
        let m = 2.0;
        let consts = PhysicalConstants::new(1.0, m).unwrap();
        let g = GaussianPacket::gaussian(0.3, 0.5, consts).unwrap();
        let e = g.quadratic_phase_evolution(1.5).unwrap();
        assert_eq!(e.t, z(0.0, 1.5 / m));
        assert!(e.poly.max_diff(&Poly::one()) < 1e-15);
        assert_eq!(g.quadratic_phase_evolution(0.0).unwrap(), g);
        let two = e.quadratic_phase_evolution(0.7).unwrap();
        let one = g.quadratic_phase_evolution(2.2).unwrap();
        assert!((two.t - one.t).norm() < 1e-15);
        assert!(two.poly.max_diff(&one.poly) < 1e-15);
        let q = packet(Poly::monomial(1), 0.0, 1.0, z(0.0, 0.0));
        assert!(matches!(q.quadratic_phase_evolution(1.0), Err(WavepacketError::Unsupported(_))));
    }

    #[test]
    fn phase_multiplication_matches_direct_products() {
        let p = packet(Poly::new(vec![z(0.5, 1.0), z(1.0, -0.2)]), 0.4, 0.9, z(0.1, 0.3));
        assert_eq!(p.phase_multiply_x(&[0.0, 0.0], 2.0).unwrap(), p);
        let cases: [(&[f64], f64, f64); 4] = [
            (&[0.0, 1.0], 0.8, 1e-12),
            (&[0.0, 0.0, 1.0], 0.6, 1e-10),
            (&[0.3, -1.0, 0.5], 1.1, 1e-10),
            (&[0.0, 0.0, 0.0, 1.0], 0.5, 1e-12),
        ];
        for (f, s, tol) in cases {
            let m = p.phase_multiply_x(f, s).unwrap();
            for x in [-1.3, 0.0, 0.4, 0.9, 2.5] {
                let u: f64 = x - 0.4;
                let fu: f64 = f.iter().rev().fold(0.0, |acc, c| acc * u + c);
                let direct = p.eval(x) * z(0.0, s * fu).exp();
                assert!((m.eval(x) - direct).norm() < tol, "{f:?} at {x}");
            }
        }
        let tagged = p.phase_multiply_x(&[0.0, 0.0, 0.0, 1.0], 0.5).unwrap();
        assert_eq!(tagged.phases.len(), 1);
        assert!(tagged.fourier().is_err());
        let folded = p.phase_multiply_x(&[0.0, 0.0, 1.0], 0.6).unwrap();
        assert!(folded.t != p.t && folded.phases.is_empty());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_packet() -> impl Strategy<Value = GaussianPacket<f64>> {
            (
                prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), 1..5),
                -2.0..2.0f64,
                0.2..2.0f64,
                0.0..1.0f64,
                -1.0..1.0f64,
                0.3..3.0f64,
            )
                .prop_map(|(cs, x0, tau, tr, ti, hbar)| {
                    let poly = Poly::new(cs.into_iter().map(|(re, im)| z(re, im)).collect());
                    let consts = PhysicalConstants::new(hbar, 1.0).unwrap();
                    GaussianPacket::new(PacketSort::Position, poly, x0, tau, z(tr, ti), consts).unwrap()
                })
        }

        proptest! {
            #[test]
            fn commutator_is_i_hbar_on_any_packet(p in arb_packet()) {
                let xp = p.apply_p().unwrap().apply_x().unwrap();
                let px = p.apply_x().unwrap().apply_p().unwrap();
                let want = p.poly.scale(z(0.0, p.constants.hbar));
                prop_assert!((&xp.poly - &px.poly).max_diff(&want) < 1e-10);
            }

            #[test]
            fn fourier_inverts(p in arb_packet()) {
                prop_assert!(p.fourier().unwrap().inverse_fourier().unwrap().approx_eq(&p, 1e-12));
            }

            #[test]
            fn evolution_composes(p in arb_packet(), s in 0.0..2.0f64, t in 0.0..2.0f64) {
                let p = GaussianPacket::new(PacketSort::Position, Poly::one(), p.center, p.tau, p.t, p.constants).unwrap();
                let two = p.quadratic_phase_evolution(s).unwrap().quadratic_phase_evolution(t).unwrap();
                let one = p.quadratic_phase_evolution(s + t).unwrap();
                prop_assert!((two.t - one.t).norm() < 1e-12);
                prop_assert!((two.eval(0.3) - one.eval(0.3)).norm() < 1e-10 * (1.0 + one.eval(0.3).norm()));
            }
        }
    }
}
