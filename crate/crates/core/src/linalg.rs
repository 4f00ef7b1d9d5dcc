//! Dense complex matrices and the Hermitian matrix functions used for
//! whitening and maximal-ratio combining.
//!
//! Matrices here are tiny (at most a few dozen rows), so everything is a
//! straightforward row-major `Vec` with no blocking or BLAS.

use std::ops::{Deref, DerefMut, Index, IndexMut};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Complex column vector.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CVec<T>(pub Vec<Complex<T>>);

impl<T: Real> CVec<T> {
    pub fn zeros(len: usize) -> Self {
        Self(vec![Complex::new(T::zero(), T::zero()); len])
    }

    pub fn from_vec(v: Vec<Complex<T>>) -> Self {
        Self(v)
    }

    pub fn norm_sqr(&self) -> T {
        self.0.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr())
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Concatenates `self` on top of `other`.
    pub fn stack(&self, other: &CVec<T>) -> CVec<T> {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        CVec(v)
    }

    pub fn sub(&self, other: &CVec<T>) -> CVec<T> {
        debug_assert_eq!(self.len(), other.len());
        CVec(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn add(&self, other: &CVec<T>) -> CVec<T> {
        debug_assert_eq!(self.len(), other.len());
        CVec(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl<T> Deref for CVec<T> {
    type Target = Vec<Complex<T>>;
    fn deref(&self) -> &Self::Target {
        &self.0
    }
}

impl<T> DerefMut for CVec<T> {
    fn deref_mut(&mut self) -> &mut Self::Target {
        &mut self.0
    }
}

/// Complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> CMat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::new(T::zero(), T::zero()); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::new(T::one(), T::zero());
        }
        m
    }

    /// Real diagonal matrix.
    pub fn from_diag(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex::new(d, T::zero());
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::LengthMismatch {
                expected: rows * cols,
                actual: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn matmul(&self, rhs: &CMat<T>) -> CMat<T> {
        assert_eq!(self.cols, rhs.rows, "matmul dimension mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                for c in 0..rhs.cols {
                    out.data[r * rhs.cols + c] += a * rhs[(k, c)];
                }
            }
        }
        out
    }

    /// `self^H * rhs`, computed without materialising the adjoint.
    pub fn adjoint_matmul(&self, rhs: &CMat<T>) -> CMat<T> {
        assert_eq!(self.rows, rhs.rows, "adjoint_matmul dimension mismatch");
        let mut out = Self::zeros(self.cols, rhs.cols);
        for r in 0..self.cols {
            for c in 0..rhs.cols {
                let mut acc = Complex::new(T::zero(), T::zero());
                for k in 0..self.rows {
                    acc += self[(k, r)].conj() * rhs[(k, c)];
                }
                out[(r, c)] = acc;
            }
        }
        out
    }

    /// Gram matrix `self^H * self`, exactly Hermitian by construction.
    pub fn gram(&self) -> CMat<T> {
        let n = self.cols;
        let mut out = Self::zeros(n, n);
        for r in 0..n {
            for c in r..n {
                let mut acc = Complex::new(T::zero(), T::zero());
                for k in 0..self.rows {
                    acc += self[(k, r)].conj() * self[(k, c)];
                }
                if r == c {
                    acc.im = T::zero();
                }
                out[(r, c)] = acc;
                out[(c, r)] = acc.conj();
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex<T>]) -> CVec<T> {
        assert_eq!(self.cols, v.len(), "mul_vec dimension mismatch");
        let mut out = Vec::with_capacity(self.rows);
        for r in 0..self.rows {
            let row = &self.data[r * self.cols..(r + 1) * self.cols];
            let acc = row
                .iter()
                .zip(v)
                .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a * b);
            out.push(acc);
        }
        CVec(out)
    }

    /// `self^H * v`.
    pub fn adjoint_mul_vec(&self, v: &[Complex<T>]) -> CVec<T> {
        assert_eq!(self.rows, v.len(), "adjoint_mul_vec dimension mismatch");
        let mut out = vec![Complex::new(T::zero(), T::zero()); self.cols];
        for r in 0..self.rows {
            for (c, o) in out.iter_mut().enumerate() {
                *o += self[(r, c)].conj() * v[r];
            }
        }
        CVec(out)
    }

    pub fn add(&self, rhs: &CMat<T>) -> CMat<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, rhs: &CMat<T>) -> CMat<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, s: T) -> CMat<T> {
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |acc, z| acc + z.norm_sqr())
            .sqrt()
    }

    /// Largest `|m_ij - conj(m_ji)|`.
    pub fn hermitian_asymmetry(&self) -> T {
        let mut worst = T::zero();
        for r in 0..self.rows {
            for c in r..self.cols {
                let d = (self[(r, c)] - self[(c, r)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Stacks `self` on top of `below`.
    pub fn vstack(&self, below: &CMat<T>) -> Result<CMat<T>> {
        if self.cols != below.cols {
            return Err(Error::DimensionMismatch(format!(
                "vstack of {} and {} columns",
                self.cols, below.cols
            )));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&below.data);
        Ok(CMat {
            rows: self.rows + below.rows,
            cols: self.cols,
            data,
        })
    }

    /// Copies `block` into `self` with its top-left corner at `(row, col)`.
    pub fn set_block(&mut self, row: usize, col: usize, block: &CMat<T>) {
        assert!(row + block.rows <= self.rows && col + block.cols <= self.cols);
        for r in 0..block.rows {
            for c in 0..block.cols {
                self[(row + r, col + c)] = block[(r, c)];
            }
        }
    }

    /// Rebuilds the matrix as `(M + M^H) / 2`.
    pub fn symmetrized(&self) -> CMat<T> {
        let half = T::lit(0.5);
        let mut out = self.clone();
        for r in 0..self.rows {
            for c in r..self.cols {
                let v = (self[(r, c)] + self[(c, r)].conj()) * half;
                out[(r, c)] = v;
                out[(c, r)] = v.conj();
            }
        }
        out
    }
}

impl<T> Index<(usize, usize)> for CMat<T> {
    type Output = Complex<T>;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &Complex<T> {
        &self.data[r * self.cols + c]
    }
}

impl<T> IndexMut<(usize, usize)> for CMat<T> {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[r * self.cols + c]
    }
}

/// Eigenpairs of a Hermitian matrix: `M = V diag(values) V^H`.
#[derive(Debug, Clone)]
pub struct HermitianEigen<T> {
    pub values: Vec<T>,
    pub vectors: CMat<T>,
}

fn check_hermitian<T: Real>(m: &CMat<T>) -> Result<()> {
    if !m.is_finite() {
        return Err(Error::NonFinite("matrix"));
    }
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let asym = m.hermitian_asymmetry();
    if asym > T::hermitian_tol() {
        return Err(Error::NonHermitian {
            asymmetry: asym.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(())
}

/// Cyclic complex Jacobi eigensolver for Hermitian matrices.
pub fn hermitian_eigen<T: Real>(m: &CMat<T>) -> Result<HermitianEigen<T>> {
    check_hermitian(m)?;
    let n = m.rows();
    let mut a = m.symmetrized();
    let mut v = CMat::identity(n);
    let zero = Complex::new(T::zero(), T::zero());

    let scale = a.frobenius_norm().max(T::min_positive_value());
    let eps = T::epsilon() * T::epsilon();
    for _sweep in 0..64 {
        let mut off = T::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if off <= eps * scale * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= T::min_positive_value() {
                    continue;
                }
                // Phase-align the pivot, then apply a real Jacobi rotation.
                let phase = apq / mag;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (T::lit(2.0) * mag);
                let t = if tau >= T::zero() {
                    T::one() / (tau + (T::one() + tau * tau).sqrt())
                } else {
                    -T::one() / (-tau + (T::one() + tau * tau).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;
                // J acts on columns p, q: [[c, s], [-s e^{-i phi}, c e^{-i phi}]].
                let jpp = Complex::new(c, T::zero());
                let jpq = Complex::new(s, T::zero());
                let jqp = phase.conj() * (-s);
                let jqq = phase.conj() * c;

                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * jpp + akq * jqp;
                    a[(k, q)] = akp * jpq + akq * jqq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
                    a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
                }
                a[(p, q)] = zero;
                a[(q, p)] = zero;
                a[(p, p)].im = T::zero();
                a[(q, q)].im = T::zero();

                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * jpp + vkq * jqp;
                    v[(k, q)] = vkp * jpq + vkq * jqq;
                }
            }
        }
    }
    let values = (0..n).map(|i| a[(i, i)].re).collect();
    Ok(HermitianEigen { values, vectors: v })
}

/// `V diag(f(max(lambda, floor))) V^H`, symmetrized.
fn hermitian_function<T: Real>(m: &CMat<T>, floor: T, f: impl Fn(T) -> T) -> Result<CMat<T>> {
    let eig = hermitian_eigen(m)?;
    let n = m.rows();
    let fv: Vec<T> = eig.values.iter().map(|&l| f(l.max(floor))).collect();
    let mut out = CMat::zeros(n, n);
    for r in 0..n {
        for c in r..n {
            let mut acc = Complex::new(T::zero(), T::zero());
            for (k, &w) in fv.iter().enumerate() {
                acc += eig.vectors[(r, k)] * eig.vectors[(c, k)].conj() * w;
            }
            if r == c {
                acc.im = T::zero();
            }
            out[(r, c)] = acc;
            out[(c, r)] = acc.conj();
        }
    }
    Ok(out)
}

/// Whitening filter `M^{-1/2}` of a Hermitian PSD matrix, eigenvalues floored at `floor`.
pub fn hermitian_inv_sqrt<T: Real>(m: &CMat<T>, floor: T) -> Result<CMat<T>> {
    hermitian_function(m, floor, |l| T::one() / l.sqrt())
}

/// Principal square root `M^{1/2}` of a Hermitian PSD matrix, eigenvalues floored at `floor`.
pub fn hermitian_sqrt<T: Real>(m: &CMat<T>, floor: T) -> Result<CMat<T>> {
    hermitian_function(m, floor, |l| l.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn random_mat(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMat<f64> {
        CMat::from_fn(rows, cols, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    fn random_covariance(rng: &mut ChaCha8Rng, n: usize) -> CMat<f64> {
        // R = H Q H^H + I, the shape of a residual-interference covariance.
        let h = random_mat(rng, n, n);
        let q: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
        h.matmul(&CMat::from_diag(&q))
            .matmul(&h.adjoint())
            .add(&CMat::identity(n))
            .symmetrized()
    }

    #[test]
    fn identity_is_fixed_point() {
        let i2 = CMat::<f64>::identity(2);
        assert!(hermitian_inv_sqrt(&i2, 1e-12).unwrap().sub(&i2).frobenius_norm() < 1e-15);
        assert!(hermitian_sqrt(&i2, 1e-12).unwrap().sub(&i2).frobenius_norm() < 1e-15);
    }

    #[test]
    fn diagonal_case() {
        let m = CMat::from_diag(&[4.0, 9.0]);
        let w = hermitian_inv_sqrt(&m, 1e-12).unwrap();
        assert!(w.sub(&CMat::from_diag(&[0.5, 1.0 / 3.0])).frobenius_norm() < 1e-15);
        let s = hermitian_sqrt(&m, 1e-12).unwrap();
        assert!(s.sub(&CMat::from_diag(&[2.0, 3.0])).frobenius_norm() < 1e-14);
    }

    #[test]
    fn whitening_reconstructs_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=4 {
            for _ in 0..50 {
                let r = random_covariance(&mut rng, n);
                let w = hermitian_inv_sqrt(&r, 1e-12).unwrap();
                let white = w.matmul(&r).matmul(&w.adjoint());
                assert!(white.sub(&CMat::identity(n)).frobenius_norm() < 1e-9);
                assert!(w.hermitian_asymmetry() < 1e-10);
            }
        }
    }

    #[test]
    fn sqrt_squares_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..50 {
            // MRC accumulator shape: sum of Gram matrices.
            let a = random_mat(&mut rng, 2, 2).gram();
            let b = random_mat(&mut rng, 2, 2).gram();
            let h = a.add(&b);
            let s = hermitian_sqrt(&h, 1e-12).unwrap();
            assert!(s.matmul(&s).sub(&h).frobenius_norm() < 1e-9);
            let w = hermitian_inv_sqrt(&h, 1e-12).unwrap();
            assert!(s.matmul(&w).sub(&CMat::identity(2)).frobenius_norm() < 1e-8);
        }
    }

    #[test]
    fn eigen_decomposition_reassembles() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let m = random_covariance(&mut rng, 5);
        let eig = hermitian_eigen(&m).unwrap();
        let back = eig
            .vectors
            .matmul(&CMat::from_diag(&eig.values))
            .matmul(&eig.vectors.adjoint());
        assert!(back.sub(&m).frobenius_norm() < 1e-10);
        assert!(eig.values.iter().all(|&l| l >= 1.0 - 1e-10));
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = CMat::<f64>::identity(2);
        m[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(
            hermitian_inv_sqrt(&m, 1e-12),
            Err(Error::NonHermitian { .. })
        ));
    }

    #[test]
    fn rejects_non_finite() {
        let mut m = CMat::<f64>::identity(2);
        m[(0, 0)] = c(f64::NAN, 0.0);
        assert_eq!(hermitian_sqrt(&m, 1e-12), Err(Error::NonFinite("matrix")));
    }

    #[test]
    fn floor_handles_zero_matrix() {
        let z = CMat::<f64>::zeros(2, 2);
        let w = hermitian_inv_sqrt(&z, 1e-12).unwrap();
        assert!((w[(0, 0)].re - 1e6).abs() < 1e-3);
        let s = hermitian_sqrt(&z, 1e-12).unwrap();
        assert!(s.frobenius_norm() < 1e-5);
    }

    #[test]
    fn works_in_single_precision() {
        let m = CMat::<f32>::from_diag(&[4.0, 9.0]);
        let w = hermitian_inv_sqrt(&m, 1e-6).unwrap();
        assert!((w[(1, 1)].re - 1.0 / 3.0).abs() < 1e-6);
    }
}
