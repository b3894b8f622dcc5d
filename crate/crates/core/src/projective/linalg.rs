//! Small dense complex matrices and a Hermitian eigensolver.

use std::cmp::Ordering;

use num_complex::Complex;

use crate::scalar::{lit, Real};

pub type CVector<T> = Vec<Complex<T>>;

/// `⟨x, y⟩ = Σ conj(x_i) y_i`.
pub fn inner<T: Real>(x: &[Complex<T>], y: &[Complex<T>]) -> Complex<T> {
    x.iter().zip(y).fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b)
}

pub fn norm_sqr<T: Real>(x: &[Complex<T>]) -> T {
    x.iter().map(|z| z.norm_sqr()).sum()
}

pub fn unit<T: Real>(n: usize, i: usize) -> CVector<T> {
    let mut v = vec![Complex::new(T::zero(), T::zero()); n];
    v[i] = Complex::new(T::one(), T::zero());
    v
}

/// Row-major square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix<T> {
    pub n: usize,
    pub data: Vec<Complex<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        CMatrix { n, data: vec![Complex::new(T::zero(), T::zero()); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_diag(d: &[T]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, x) in d.iter().enumerate() {
            m[(i, i)] = Complex::new(*x, T::zero());
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex<T>>]) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        CMatrix { n, data: rows.iter().flatten().copied().collect() }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[CVector<T>]) -> Self {
        let n = cols.len();
        let mut m = Self::zeros(n);
        for (j, c) in cols.iter().enumerate() {
            for i in 0..n {
                m[(i, j)] = c[i];
            }
        }
        m
    }

    pub fn column(&self, j: usize) -> CVector<T> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.n;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.norm_sqr() == T::zero() {
                    continue;
                }
                for j in 0..n {
                    m[(i, j)] += a * other[(k, j)];
                }
            }
        }
        m
    }

    pub fn mul_vec(&self, x: &[Complex<T>]) -> CVector<T> {
        (0..self.n)
            .map(|i| (0..self.n).fold(Complex::new(T::zero(), T::zero()), |acc, j| acc + self[(i, j)] * x[j]))
            .collect()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        let scale = self.max_abs().max(T::one());
        (0..self.n).all(|i| (0..self.n).all(|j| (self[(i, j)] - self[(j, i)].conj()).norm() <= tol * scale))
    }

    fn off_diagonal(&self) -> T {
        let mut s = T::zero();
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    s += self[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    }
}

impl<T> std::ops::Index<(usize, usize)> for CMatrix<T> {
    type Output = Complex<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.n + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for CMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.n + j]
    }
}

/// Multiplies by a phase so the first component of non-negligible size is real
/// and positive.
pub fn canonical_phase<T: Real>(v: &mut [Complex<T>]) {
    let scale = v.iter().fold(T::zero(), |m, z| m.max(z.norm()));
    let cut = scale * lit(1e-9);
    if let Some(z) = v.iter().find(|z| z.norm() > cut).copied() {
        let phase = z.conj() / z.norm();
        for c in v.iter_mut() {
            *c *= phase;
        }
    }
}

fn lexicographic<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.re.partial_cmp(&y.re).unwrap_or(Ordering::Equal) {
            Ordering::Equal => {}
            o => return o.reverse(),
        }
        match x.im.partial_cmp(&y.im).unwrap_or(Ordering::Equal) {
            Ordering::Equal => {}
            o => return o.reverse(),
        }
    }
    Ordering::Equal
}

/// Eigenpairs of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Eigenvalues ascend; eigenvectors are unit columns with canonical phase.
/// Eigenvalues equal to within `1e-12` relative are ordered by their vectors'
/// components, larger leading components first.
pub fn hermitian_eigen<T: Real>(a: &CMatrix<T>) -> (Vec<T>, Vec<CVector<T>>) {
    let n = a.n;
    let mut m = a.clone();
    let mut v = CMatrix::<T>::identity(n);
    let scale = m.max_abs().max(T::min_positive_value());
    let eps = T::epsilon() * scale;
    for _sweep in 0..100 {
        if m.off_diagonal() <= eps {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                let r = apq.norm();
                if r <= T::min_positive_value() {
                    continue;
                }
                // phase-fix the pivot to a real one, then a real rotation
                let phase = apq / r;
                let (ap, aq) = (m[(p, p)].re, m[(q, q)].re);
                let theta = lit::<T>(0.5) * (r + r).atan2(ap - aq);
                let (c, s) = (theta.cos(), theta.sin());
                // U = diag(1, conj(phase)) · [[c, -s], [s, c]] on (p, q)
                let upp = Complex::new(c, T::zero());
                let upq = Complex::new(-s, T::zero());
                let uqp = phase.conj() * s;
                let uqq = phase.conj() * c;
                for k in 0..n {
                    let (x, y) = (m[(k, p)], m[(k, q)]);
                    m[(k, p)] = x * upp + y * uqp;
                    m[(k, q)] = x * upq + y * uqq;
                    let (x, y) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = x * upp + y * uqp;
                    v[(k, q)] = x * upq + y * uqq;
                }
                for k in 0..n {
                    let (x, y) = (m[(p, k)], m[(q, k)]);
                    m[(p, k)] = upp.conj() * x + uqp.conj() * y;
                    m[(q, k)] = upq.conj() * x + uqq.conj() * y;
                }
                m[(p, q)] = Complex::new(T::zero(), T::zero());
                m[(q, p)] = Complex::new(T::zero(), T::zero());
            }
        }
    }
    let mut pairs: Vec<(T, CVector<T>)> = (0..n)
        .map(|j| {
            let mut col = v.column(j);
            let nrm = norm_sqr(&col).sqrt();
            for z in col.iter_mut() {
                *z /= nrm;
            }
            canonical_phase(&mut col);
            (m[(j, j)].re, col)
        })
        .collect();
    let tie = scale * lit(1e-12);
    pairs.sort_by(|(la, va), (lb, vb)| {
        if (*la - *lb).abs() <= tie {
            lexicographic(va, vb)
        } else {
            la.partial_cmp(lb).unwrap_or(Ordering::Equal)
        }
    });
    pairs.into_iter().unzip()
}

/// `exp(-i t H)` for Hermitian `H`.
pub fn unitary_exp<T: Real>(h: &CMatrix<T>, t: T) -> CMatrix<T> {
    let (vals, vecs) = hermitian_eigen(h);
    let n = h.n;
    let mut out = CMatrix::zeros(n);
    for (lam, x) in vals.iter().zip(&vecs) {
        let ph = Complex::new(T::zero(), -t * *lam).exp();
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] += ph * x[i] * x[j].conj();
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> CMatrix<f64> {
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex::new(rng.gen_range(-2.0..2.0), 0.0);
            for j in i + 1..n {
                let z = Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        m
    }

    #[test]
    fn eigenpairs_reconstruct_random_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=8 {
            let a = random_hermitian(n, &mut rng);
            let (vals, vecs) = hermitian_eigen(&a);
            assert!(vals.windows(2).all(|w| w[0] <= w[1]));
            for (lam, x) in vals.iter().zip(&vecs) {
                let ax = a.mul_vec(x);
                let res: f64 = ax.iter().zip(x).map(|(p, q)| (p - q * lam).norm_sqr()).sum::<f64>().sqrt();
                assert!(res < 1e-10, "n={n} residual {res}");
            }
            for i in 0..n {
                for j in 0..n {
                    let ip = inner(&vecs[i], &vecs[j]).norm();
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((ip - want).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn degenerate_spectrum_orders_by_components() {
        let a = CMatrix::<f64>::from_diag(&[2.0, 1.0, 2.0]);
        let (vals, vecs) = hermitian_eigen(&a);
        assert_eq!(vals, vec![1.0, 2.0, 2.0]);
        assert_eq!(vecs[1], unit(3, 0));
        assert_eq!(vecs[2], unit(3, 2));
    }

    #[test]
    fn unitary_exp_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let h = random_hermitian(4, &mut rng);
        let w = unitary_exp(&h, 0.7);
        let id = w.mul(&w.adjoint());
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((id[(i, j)] - Complex::new(want, 0.0)).norm() < 1e-12);
            }
        }
    }
}
