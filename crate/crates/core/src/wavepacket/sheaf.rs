//! The sheaf of packet pairs over the imperfection half-line `τ ∈ (0, ∞)`.

use std::f64::consts::PI;

use num_complex::Complex;

use super::packet::{GaussianPacket, PacketSort};
use super::poly::Poly;
use super::propagator::propagator_row;
use super::quadrature::{integrate_pair, Majorant, QuadratureSpec};
use super::{PhysicalConstants, WavepacketError};
use crate::logic::{ElementSample, EvalError, Signature, Structure};
use crate::scalar::{lit, Real};
use crate::sheaf::{BasePoint, BaseSpace, FilterChain, MetricSheaf, OpenSet, Section, SectionSample, SheafError};

/// `∫ conj(f) g` over the line. Closed form by completing the square when
/// neither packet carries a tagged phase, quadrature otherwise.
pub fn l2_inner<T: Real>(f: &GaussianPacket<T>, g: &GaussianPacket<T>) -> Result<Complex<T>, WavepacketError> {
    if f.sort != g.sort {
        return Err(WavepacketError::Sort { expected: f.sort, got: g.sort });
    }
    if !f.phases.is_empty() || !g.phases.is_empty() {
        let spec = QuadratureSpec::default();
        let r =
            integrate_pair(|x| f.eval(x).conj() * g.eval(x), &Majorant::of_packet(f), &Majorant::of_packet(g), &spec)?;
        return Ok(r.value);
    }
    let two = lit::<T>(2.0);
    let re = |x: T| Complex::new(x, T::zero());
    let (alpha, beta) = (f.exponent_rate().conj(), g.exponent_rate());
    let (a, b) = (re(f.center), re(g.center));
    let (kf, kg) = (Complex::new(T::zero(), f.linear_phase), Complex::new(T::zero(), g.linear_phase));
    let gamma = alpha + beta;
    let eta = alpha * a * two + beta * b * two - kf + kg;
    let zeta = -alpha * a * a - beta * b * b + kf * a - kg * b;
    let m = eta / (gamma * two);
    let p = &f.poly.conj().taylor_shift(m - a) * &g.poly.taylor_shift(m - b);
    // ∫ v^{2j} e^{−γv²} = Γ(j + 1/2) γ^{−j−1/2}
    let root = gamma.sqrt();
    let mut gamma_half = lit::<T>(PI.sqrt());
    let mut power = root;
    let mut sum = Complex::new(T::zero(), T::zero());
    for (k, c) in p.coeffs().iter().enumerate().step_by(2) {
        if k > 0 {
            gamma_half = gamma_half * lit::<T>(k as f64 - 1.0) / two;
            power *= gamma;
        }
        sum += *c * gamma_half / power;
    }
    Ok(f.prefactor().conj() * g.prefactor() * (eta * eta / (gamma * lit::<T>(4.0)) + zeta).exp() * sum)
}

/// `min(1, ‖f − g‖₂)`.
pub fn l2_distance<T: Real>(f: &GaussianPacket<T>, g: &GaussianPacket<T>) -> Result<T, WavepacketError> {
    if f == g {
        return Ok(T::zero());
    }
    let sq = l2_inner(f, f)?.re + l2_inner(g, g)?.re - lit::<T>(2.0) * l2_inner(f, g)?.re;
    Ok(sq.max(T::zero()).sqrt().min(T::one()))
}

/// Variance of the normalized density `|envelope|²`.
pub fn envelope_variance<T: Real>(p: &GaussianPacket<T>) -> T {
    (lit::<T>(4.0) * p.exponent_rate().re).recip()
}

/// `envelope_variance` of the momentum packet of `σ_{1,0,0,0}` at `τ`.
pub fn momentum_variance<T: Real>(tau: T, c: PhysicalConstants<T>) -> Result<T, WavepacketError> {
    Ok(envelope_variance(&GaussianPacket::gaussian(T::zero(), tau, c)?.fourier()?))
}

/// For each chain element, the running minimum of the sampled supremum over
/// `τ` of the relative distance between `K_τ(x₁, x₀, t)` and the exact kernel.
pub fn propagator_limit<T: Real>(
    chain: &FilterChain<T>,
    x1: T,
    x0: T,
    t: T,
    c: PhysicalConstants<T>,
    grid: usize,
) -> Result<Vec<T>, WavepacketError> {
    let mut running = T::infinity();
    let mut out = Vec::with_capacity(chain.depth());
    for u in &chain.sets {
        let mut sup = T::neg_infinity();
        for y in u.sample(grid) {
            let tau = y.as_real().ok_or_else(|| WavepacketError::Invalid(format!("{y} is not a τ value")))?;
            let row = propagator_row(x1, x0, t, tau, c)?;
            sup = sup.max(row.rel_err.ok_or(WavepacketError::UndefinedLimit)?);
        }
        running = running.min(sup);
        out.push(running);
    }
    Ok(out)
}

/// Fibers carry both packet sorts. Quantifiers range over position packets;
/// `FT` and `IFT` move between the sorts and `d` is the truncated `L²`
/// distance within a sort.
#[derive(Debug, Clone)]
pub struct PacketSheaf<T> {
    base: BaseSpace<T>,
    sig: Signature,
    pub constants: PhysicalConstants<T>,
    /// Centres and evolution times of the quantifier sample.
    pub sample_centers: Vec<T>,
    pub sample_times: Vec<T>,
}

impl<T: Real> PacketSheaf<T> {
    pub fn new(constants: PhysicalConstants<T>) -> Self {
        let sig = Signature::new().with_function("FT", 1, None).with_function("IFT", 1, None);
        PacketSheaf {
            base: BaseSpace::RealInterval { a: T::zero(), b: T::infinity() },
            sig,
            constants,
            sample_centers: [-1.0, -0.5, 0.0, 0.5, 1.0].iter().map(|x| lit(*x)).collect(),
            sample_times: [0.0, 0.5, 1.0].iter().map(|x| lit(*x)).collect(),
        }
    }

    fn params(q: &Poly<T>, x0: T, p0: T, t: Complex<T>) -> Vec<T> {
        let mut p = vec![x0, p0, t.re, t.im];
        p.extend(q.coeffs().iter().flat_map(|c| [c.re, c.im]));
        p
    }

    /// Position half of `σ_{q,x₀,p₀,t}`.
    pub fn sigma_u(&self, q: &Poly<T>, x0: T, p0: T, t: Complex<T>) -> Section<T> {
        Section::family("u", Self::params(q, x0, p0, t), self.base.whole())
    }

    /// Momentum half of `σ_{q,x₀,p₀,t}`.
    pub fn sigma_v(&self, q: &Poly<T>, x0: T, p0: T, t: Complex<T>) -> Section<T> {
        Section::family("v", Self::params(q, x0, p0, t), self.base.whole())
    }

    pub fn gaussian_u(&self, x0: T) -> Section<T> {
        self.sigma_u(&Poly::one(), x0, T::zero(), Complex::new(T::zero(), T::zero()))
    }

    /// `φ_{(τ, it/m)}(·, x₀)`, the free evolution of `gaussian_u(x₀)`.
    pub fn evolved_u(&self, x0: T, t_phys: T) -> Section<T> {
        self.sigma_u(&Poly::one(), x0, T::zero(), Complex::new(T::zero(), t_phys / self.constants.mass))
    }

    pub fn packet(&self, family: &str, params: &[T], tau: T) -> Result<GaussianPacket<T>, WavepacketError> {
        if params.len() < 6 || !params.len().is_multiple_of(2) {
            return Err(WavepacketError::Invalid(format!("`{family}` takes x₀, p₀, t and polynomial coefficients")));
        }
        let (x0, p0, t) = (params[0], params[1], Complex::new(params[2], params[3]));
        let q = Poly::new(params[4..].chunks(2).map(|c| Complex::new(c[0], c[1])).collect());
        let (sort, center, other) = match family {
            "u" => (PacketSort::Position, x0, p0),
            "v" => (PacketSort::Momentum, p0, x0),
            _ => return Err(WavepacketError::Invalid(format!("unknown packet family `{family}`"))),
        };
        Ok(GaussianPacket::new(sort, q, center, tau, t, self.constants)?.with_conjugate_center(other))
    }

    fn tau(&self, x: &BasePoint<T>) -> Result<T, SheafError> {
        match x {
            BasePoint::Real(t) if *t > T::zero() && t.is_finite() => Ok(*t),
            other => Err(SheafError::Invalid(format!("{other} is not a point of (0, ∞)"))),
        }
    }

    fn sample_sections(&self) -> Vec<Section<T>> {
        let mut out = Vec::new();
        for t in &self.sample_times {
            for x0 in &self.sample_centers {
                out.push(self.evolved_u(*x0, *t));
            }
        }
        out
    }
}

fn eval_err(e: WavepacketError) -> EvalError {
    match e {
        WavepacketError::Sort { .. } => EvalError::Sort(e.to_string()),
        other => EvalError::Domain(other.to_string()),
    }
}

pub struct PacketFiber<'a, T: Real> {
    sheaf: &'a PacketSheaf<T>,
    pub tau: T,
}

impl<'a, T: Real> Structure<T> for PacketFiber<'a, T> {
    type Elem = GaussianPacket<T>;

    fn signature(&self) -> &Signature {
        &self.sheaf.sig
    }

    fn distance(&self, a: &GaussianPacket<T>, b: &GaussianPacket<T>) -> Result<T, EvalError> {
        l2_distance(a, b).map_err(eval_err)
    }

    fn relation(&self, name: &str, _: &[GaussianPacket<T>]) -> Result<T, EvalError> {
        Err(EvalError::UnknownRelation(name.to_string()))
    }

    fn function(&self, name: &str, args: &[GaussianPacket<T>]) -> Result<GaussianPacket<T>, EvalError> {
        let [p] = args else {
            return Err(EvalError::Arity { name: name.into(), expected: 1, got: args.len() });
        };
        match name {
            "FT" => p.fourier().map_err(eval_err),
            "IFT" => p.inverse_fourier().map_err(eval_err),
            _ => Err(EvalError::UnknownFunction(name.to_string())),
        }
    }

    fn sample(&self) -> ElementSample<GaussianPacket<T>, T> {
        let pts = BasePoint::Real(self.tau);
        let elements =
            self.sheaf.sample_sections().iter().filter_map(|s| self.sheaf.section_value(s, &pts).ok()).collect();
        ElementSample::uncertified(elements)
    }
}

impl<T: Real> MetricSheaf<T> for PacketSheaf<T> {
    type Elem = GaussianPacket<T>;
    type Fiber<'a>
        = PacketFiber<'a, T>
    where
        T: 'a;

    fn base(&self) -> &BaseSpace<T> {
        &self.base
    }

    fn signature(&self) -> &Signature {
        &self.sig
    }

    fn fiber(&self, x: &BasePoint<T>) -> Result<PacketFiber<'_, T>, SheafError> {
        Ok(PacketFiber { sheaf: self, tau: self.tau(x)? })
    }

    fn family_value(&self, family: &str, params: &[T], x: &BasePoint<T>) -> Result<GaussianPacket<T>, SheafError> {
        if family != "u" && family != "v" {
            return Err(SheafError::UnknownFamily(family.to_string()));
        }
        self.packet(family, params, self.tau(x)?).map_err(|e| SheafError::Invalid(e.to_string()))
    }

    fn sections_at(&self, _u: &OpenSet<T>) -> SectionSample<T> {
        SectionSample { sections: self.sample_sections(), covering_radius: None }
    }
}
