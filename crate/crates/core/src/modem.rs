//! Square QAM constellations with Gray labelling, plus the soft symbol
//! statistics that turn decoder bit LLRs into a symbol mean and variance.
//!
//! Bits are bipolar (`+1` / `-1`). An LLR is `log P(b = +1) / P(b = -1)`.
//!
//! Labelling: point index `k` carries bits read MSB-first from `k`, with a
//! binary 0 mapped to `+1`. For 4-QAM bit 1 selects the sign of the real
//! part and bit 2 the sign of the imaginary part, scaled by `1/sqrt(2)`. For
//! 16-QAM bits (1, 2) pick the in-phase level and bits (3, 4) the quadrature
//! level through the per-axis Gray map `++ -> +3, +- -> +1, -- -> -1,
//! -+ -> -3`, scaled by `1/sqrt(10)`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CVec;
use crate::scalar::Real;

/// Supported modulation orders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub enum Modulation {
    Qam4,
    Qam16,
}

impl Modulation {
    pub fn order(self) -> usize {
        match self {
            Modulation::Qam4 => 4,
            Modulation::Qam16 => 16,
        }
    }

    pub fn bits_per_symbol(self) -> usize {
        match self {
            Modulation::Qam4 => 2,
            Modulation::Qam16 => 4,
        }
    }
}

impl TryFrom<usize> for Modulation {
    type Error = Error;
    fn try_from(order: usize) -> Result<Self> {
        match order {
            4 => Ok(Modulation::Qam4),
            16 => Ok(Modulation::Qam16),
            other => Err(Error::UnsupportedOrder(other)),
        }
    }
}

impl From<Modulation> for usize {
    fn from(m: Modulation) -> usize {
        m.order()
    }
}

impl std::fmt::Display for Modulation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "qam{}", self.order())
    }
}

/// A labelled constellation.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation<T> {
    modulation: Modulation,
    points: Vec<Complex<T>>,
    /// `labels[k * bits_per_symbol + m]` is bit `m` of point `k`.
    labels: Vec<i8>,
}

fn gray_level(b_hi: i8, b_lo: i8) -> f64 {
    match (b_hi, b_lo) {
        (1, 1) => 3.0,
        (1, -1) => 1.0,
        (-1, -1) => -1.0,
        _ => -3.0,
    }
}

impl<T: Real> Constellation<T> {
    pub fn new(modulation: Modulation) -> Self {
        let order = modulation.order();
        let nm = modulation.bits_per_symbol();
        let mut labels = Vec::with_capacity(order * nm);
        let mut points = Vec::with_capacity(order);
        for k in 0..order {
            let bits: Vec<i8> = (0..nm)
                .map(|m| if (k >> (nm - 1 - m)) & 1 == 0 { 1 } else { -1 })
                .collect();
            let (re, im) = match modulation {
                Modulation::Qam4 => {
                    let s = std::f64::consts::FRAC_1_SQRT_2;
                    (bits[0] as f64 * s, bits[1] as f64 * s)
                }
                Modulation::Qam16 => {
                    let s = 1.0 / 10f64.sqrt();
                    (gray_level(bits[0], bits[1]) * s, gray_level(bits[2], bits[3]) * s)
                }
            };
            points.push(Complex::new(T::lit(re), T::lit(im)));
            labels.extend_from_slice(&bits);
        }
        Self {
            modulation,
            points,
            labels,
        }
    }

    pub fn from_order(order: usize) -> Result<Self> {
        Ok(Self::new(Modulation::try_from(order)?))
    }

    pub fn modulation(&self) -> Modulation {
        self.modulation
    }

    pub fn order(&self) -> usize {
        self.points.len()
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.modulation.bits_per_symbol()
    }

    pub fn points(&self) -> &[Complex<T>] {
        &self.points
    }

    pub fn point(&self, k: usize) -> Complex<T> {
        self.points[k]
    }

    /// Bipolar label of point `k`.
    pub fn label(&self, k: usize) -> &[i8] {
        let nm = self.bits_per_symbol();
        &self.labels[k * nm..(k + 1) * nm]
    }

    /// Index of the point carrying `bits`.
    pub fn index_of(&self, bits: &[i8]) -> usize {
        debug_assert_eq!(bits.len(), self.bits_per_symbol());
        bits.iter().fold(0, |k, &b| (k << 1) | usize::from(b < 0))
    }

    pub fn max_energy(&self) -> T {
        self.points
            .iter()
            .map(|p| p.norm_sqr())
            .fold(T::zero(), T::max)
    }

    /// Maps bipolar bits onto symbols, `N_m` bits per symbol.
    pub fn modulate(&self, bits: &[i8]) -> Result<CVec<T>> {
        let nm = self.bits_per_symbol();
        if bits.len() % nm != 0 {
            return Err(Error::LengthMismatch {
                expected: bits.len().div_ceil(nm) * nm,
                actual: bits.len(),
            });
        }
        Ok(CVec(
            bits.chunks_exact(nm)
                .map(|group| self.points[self.index_of(group)])
                .collect(),
        ))
    }

    /// Point index nearest to `z` (hard demapping).
    pub fn nearest(&self, z: Complex<T>) -> usize {
        let mut best = 0;
        let mut best_d = T::infinity();
        for (k, p) in self.points.iter().enumerate() {
            let d = (z - p).norm_sqr();
            if d < best_d {
                best = k;
                best_d = d;
            }
        }
        best
    }

    /// Symbol PMF implied by independent per-bit LLRs.
    pub fn symbol_probs(&self, llrs: &[T]) -> Vec<T> {
        let nm = self.bits_per_symbol();
        debug_assert_eq!(llrs.len(), nm);
        let half = T::lit(0.5);
        // tanh saturates to exactly +-1 at +-inf, so hard bits give exact zeros.
        let t: Vec<T> = llrs.iter().map(|&l| (l * half).tanh()).collect();
        (0..self.order())
            .map(|k| {
                self.label(k)
                    .iter()
                    .zip(&t)
                    .fold(T::one(), |p, (&b, &th)| {
                        let signed = if b > 0 { th } else { -th };
                        p * half * (T::one() + signed)
                    })
            })
            .collect()
    }

    /// Posterior mean of the symbol.
    pub fn soft_mean(&self, llrs: &[T]) -> Complex<T> {
        self.symbol_probs(llrs)
            .iter()
            .zip(&self.points)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (&p, &s)| acc + s * p)
    }

    /// Posterior second moment `E|x|^2`.
    pub fn soft_second_moment(&self, llrs: &[T]) -> T {
        self.symbol_probs(llrs)
            .iter()
            .zip(&self.points)
            .fold(T::zero(), |acc, (&p, s)| acc + s.norm_sqr() * p)
    }

    /// Mean and variance in one pass over the PMF.
    pub fn soft_stats(&self, llrs: &[T]) -> (Complex<T>, T) {
        let probs = self.symbol_probs(llrs);
        let mut mean = Complex::new(T::zero(), T::zero());
        let mut second = T::zero();
        for (&p, s) in probs.iter().zip(&self.points) {
            mean += s * p;
            second += s.norm_sqr() * p;
        }
        let var = (second - mean.norm_sqr()).max(T::zero());
        (mean, var)
    }
}

/// Per-stream soft mean and variance of a symbol vector.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftSymbolStats<T> {
    pub mean: CVec<T>,
    pub var: Vec<T>,
}

impl<T: Real> SoftSymbolStats<T> {
    /// `llrs` holds `N_m` consecutive LLRs per stream.
    pub fn from_llrs(llrs: &[T], constellation: &Constellation<T>) -> Self {
        let nm = constellation.bits_per_symbol();
        let (mean, var) = llrs
            .chunks_exact(nm)
            .map(|chunk| constellation.soft_stats(chunk))
            .unzip();
        Self {
            mean: CVec(mean),
            var,
        }
    }
}

/// Converts a binary bit (0/1) to bipolar (+1/-1).
#[inline]
pub fn to_bipolar(bit: u8) -> i8 {
    if bit == 0 {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-12;

    /// Independent enumeration of the per-bit product for a PMF.
    fn brute_probs(c: &Constellation<f64>, llrs: &[f64]) -> Vec<f64> {
        (0..c.order())
            .map(|k| {
                c.label(k)
                    .iter()
                    .zip(llrs)
                    .map(|(&b, &l)| {
                        let p_plus = 1.0 / (1.0 + (-l).exp());
                        if b > 0 {
                            p_plus
                        } else {
                            1.0 - p_plus
                        }
                    })
                    .product()
            })
            .collect()
    }

    #[test]
    fn qam4_labels() {
        let c = Constellation::<f64>::new(Modulation::Qam4);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let x = c.modulate(&[1, 1, -1, -1]).unwrap();
        assert!((x[0] - Complex::new(s, s)).norm() < TOL);
        assert!((x[1] - Complex::new(-s, -s)).norm() < TOL);
    }

    #[test]
    fn unit_power_and_gray() {
        for m in [Modulation::Qam4, Modulation::Qam16] {
            let c = Constellation::<f64>::new(m);
            let p: f64 = c.points().iter().map(|z| z.norm_sqr()).sum::<f64>() / c.order() as f64;
            assert!((p - 1.0).abs() < TOL);
            let mut seen = c.points().to_vec();
            seen.dedup_by(|a, b| (*a - *b).norm() < 1e-9);
            assert_eq!(seen.len(), c.order());
            // Nearest neighbours along an axis differ in exactly one bit.
            let d_min = 2.0 / if m == Modulation::Qam4 { 2f64.sqrt() } else { 10f64.sqrt() };
            for a in 0..c.order() {
                for b in 0..c.order() {
                    if ((c.point(a) - c.point(b)).norm() - d_min).abs() < 1e-9 {
                        let diff = c.label(a).iter().zip(c.label(b)).filter(|(x, y)| x != y).count();
                        assert_eq!(diff, 1);
                    }
                }
                // Symmetric about the origin.
                assert!(c.points().iter().any(|z| (z + c.point(a)).norm() < 1e-12));
            }
        }
    }

    #[test]
    fn index_roundtrip() {
        let c = Constellation::<f64>::new(Modulation::Qam16);
        for k in 0..16 {
            assert_eq!(c.index_of(c.label(k)), k);
        }
    }

    #[test]
    fn modulate_rejects_ragged_input() {
        let c = Constellation::<f64>::new(Modulation::Qam16);
        assert!(matches!(
            c.modulate(&[1, 1, 1]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn zero_llrs_give_uniform_prior() {
        for m in [Modulation::Qam4, Modulation::Qam16] {
            let c = Constellation::<f64>::new(m);
            let zeros = vec![0.0; c.bits_per_symbol()];
            assert!(c.soft_mean(&zeros).norm() < TOL);
            assert!((c.soft_second_moment(&zeros) - 1.0).abs() < TOL);
            for p in c.symbol_probs(&zeros) {
                assert!((p - 1.0 / c.order() as f64).abs() < TOL);
            }
        }
    }

    #[test]
    fn infinite_llrs_are_hard_decisions() {
        let c = Constellation::<f64>::new(Modulation::Qam16);
        let inf = vec![f64::INFINITY; 4];
        let probs = c.symbol_probs(&inf);
        assert_eq!(probs[0], 1.0);
        assert!(probs[1..].iter().all(|&p| p == 0.0));
        assert_eq!(c.soft_mean(&inf), c.point(0));
        let (_, var) = c.soft_stats(&[f64::NEG_INFINITY, 1e300, f64::INFINITY, -3.0]);
        assert!(var.is_finite());
    }

    #[test]
    fn qam4_mean_matches_enumeration() {
        let c = Constellation::<f64>::new(Modulation::Qam4);
        let llrs = [2.0, 0.0];
        let probs = brute_probs(&c, &llrs);
        let want = (0..4).fold(Complex::new(0.0, 0.0), |acc, k| acc + c.point(k) * probs[k]);
        assert!((c.soft_mean(&llrs) - want).norm() < TOL);
        // Bit 1 drives the real axis: E[re] = tanh(1)/sqrt(2), E[im] = 0.
        assert!((want.re - 1f64.tanh() * std::f64::consts::FRAC_1_SQRT_2).abs() < TOL);
        for (a, b) in c.symbol_probs(&llrs).iter().zip(&probs) {
            assert!((a - b).abs() < TOL);
        }
    }

    #[test]
    fn qam4_second_moment_is_one() {
        let c = Constellation::<f64>::new(Modulation::Qam4);
        for llrs in [[0.3, -7.0], [40.0, 2.0], [f64::INFINITY, -1.0]] {
            assert!((c.soft_second_moment(&llrs) - 1.0).abs() < TOL);
        }
    }

    #[test]
    fn qam16_second_moment_matches_enumeration() {
        let c = Constellation::<f64>::new(Modulation::Qam16);
        let llrs = [3.0, -1.0, 0.0, 2.0];
        let probs = brute_probs(&c, &llrs);
        let want: f64 = (0..16).map(|k| c.point(k).norm_sqr() * probs[k]).sum();
        assert!((c.soft_second_moment(&llrs) - want).abs() < TOL);
    }

    #[test]
    fn stats_per_stream() {
        let c = Constellation::<f64>::new(Modulation::Qam4);
        let stats = SoftSymbolStats::from_llrs(&[0.0, 0.0, f64::INFINITY, f64::INFINITY], &c);
        assert_eq!(stats.var.len(), 2);
        assert!((stats.var[0] - 1.0).abs() < TOL);
        assert_eq!(stats.var[1], 0.0);
        assert_eq!(stats.mean[1], c.point(0));
    }
}
