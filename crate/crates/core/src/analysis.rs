//! Accuracy of the Gaussian treatment of residual interference.
//!
//! After soft cancellation, the residual `v = H_I (x_I - x_bar) + n` is a
//! Gaussian mixture with one component per interference symbol vector. The
//! exact LLR of a desired bit sums over that mixture; the whitened
//! approximation replaces it by a single Gaussian with the matching
//! covariance. Both are computed with exact log-sum-exp arithmetic here.

use std::io::Write;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::channel::{complex_gaussian, draw_channels, LinkConfig, TransmissionRecord};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_inv_sqrt, CMat, CVec};
use crate::modem::{Constellation, Modulation};
use crate::scalar::{log_sum_exp, Real};

/// Gaussian-mixture model of the residual interference plus noise.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureSpec<T> {
    /// `(w_k, s_k - x_bar)` per interference symbol vector.
    pub components: Vec<(T, CVec<T>)>,
    pub h_i: CMat<T>,
}

/// All `M^{N_s}` symbol vectors of `c`, stream 0 varying fastest.
pub fn symbol_vectors<T: Real>(c: &Constellation<T>, streams: usize) -> Vec<CVec<T>> {
    let m = c.order();
    (0..m.pow(streams as u32))
        .map(|h| {
            let mut rest = h;
            CVec(
                (0..streams)
                    .map(|_| {
                        let k = rest % m;
                        rest /= m;
                        c.point(k)
                    })
                    .collect(),
            )
        })
        .collect()
}

/// Vector PMF from independent per-stream symbol PMFs.
pub fn product_weights<T: Real>(stream_pmfs: &[Vec<T>]) -> Vec<T> {
    let m = stream_pmfs.first().map_or(1, |p| p.len());
    let total = m.pow(stream_pmfs.len() as u32);
    (0..total)
        .map(|h| {
            let mut rest = h;
            stream_pmfs.iter().fold(T::one(), |acc, pmf| {
                let k = rest % m;
                rest /= m;
                acc * pmf[k]
            })
        })
        .collect()
}

/// Mean symbol vector under `weights`.
pub fn weighted_mean<T: Real>(vectors: &[CVec<T>], weights: &[T]) -> CVec<T> {
    let n = vectors.first().map_or(0, |v| v.len());
    let mut mean = CVec::zeros(n);
    for (v, &w) in vectors.iter().zip(weights) {
        for (m, &x) in mean.iter_mut().zip(v.iter()) {
            *m += x * w;
        }
    }
    mean
}

fn check_pmf<T: Real>(weights: &[T], expected_len: usize) -> Result<()> {
    if weights.len() != expected_len {
        return Err(Error::LengthMismatch {
            expected: expected_len,
            actual: weights.len(),
        });
    }
    let sum = weights.iter().fold(T::zero(), |a, &w| a + w);
    let tol = T::lit(1e-12).max(T::epsilon() * T::lit(64.0));
    if weights.iter().any(|&w| w < T::zero() || !w.is_finite()) || (sum - T::one()).abs() > tol {
        return Err(Error::Config("mixture weights do not form a PMF".into()));
    }
    Ok(())
}

impl<T: Real> MixtureSpec<T> {
    /// Builds the mixture for interference drawn from `c` with vector PMF
    /// `weights`, centred on `x_bar`.
    pub fn new(h_i: CMat<T>, c: &Constellation<T>, weights: &[T], x_bar: &CVec<T>) -> Result<Self> {
        let vectors = symbol_vectors(c, h_i.cols());
        check_pmf(weights, vectors.len())?;
        let components = vectors
            .into_iter()
            .zip(weights)
            .map(|(s, &w)| (w, s.sub(x_bar)))
            .collect();
        Ok(Self { components, h_i })
    }
}

/// Density of the residual `v` at a point.
pub fn residual_pdf<T: Real>(v: &CVec<T>, spec: &MixtureSpec<T>) -> T {
    let nr = spec.h_i.rows() as i32;
    let norm = T::PI().powi(nr);
    spec.components
        .iter()
        .filter(|(w, _)| *w > T::zero())
        .fold(T::zero(), |acc, (w, off)| {
            let d = v.sub(&spec.h_i.mul_vec(off)).norm_sqr();
            acc + *w / norm * (-d).exp()
        })
}

/// Draws one sample of the residual for the given mixture.
pub fn sample_residual<T, R>(spec: &MixtureSpec<T>, rng: &mut R) -> CVec<T>
where
    T: Real,
    R: Rng + ?Sized,
    StandardNormal: Distribution<T>,
{
    let u = T::lit(rng.gen::<f64>());
    let mut acc = T::zero();
    let mut pick = spec.components.len() - 1;
    for (k, (w, _)) in spec.components.iter().enumerate() {
        acc += *w;
        if u < acc {
            pick = k;
            break;
        }
    }
    let mean = spec.h_i.mul_vec(&spec.components[pick].1);
    CVec(mean.iter().map(|&m| m + complex_gaussian(T::one(), rng)).collect())
}

/// Target desired-signal bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TargetBit {
    pub stream: usize,
    pub bit: usize,
}

fn desired_split<T: Real>(c_d: &Constellation<T>, streams: usize, target: TargetBit) -> Vec<(CVec<T>, bool)> {
    let m = c_d.order();
    symbol_vectors(c_d, streams)
        .into_iter()
        .enumerate()
        .map(|(h, x)| {
            let k = (h / m.pow(target.stream as u32)) % m;
            (x, c_d.label(k)[target.bit] > 0)
        })
        .collect()
}

/// Exact LLR of a desired bit under the Gaussian-mixture residual.
pub fn mixture_llr<T: Real>(
    rec: &TransmissionRecord<T>,
    weights: &[T],
    x_bar: &CVec<T>,
    target: TargetBit,
    c_d: &Constellation<T>,
    c_i: &Constellation<T>,
) -> Result<T> {
    rec.validate()?;
    let spec = MixtureSpec::new(rec.h_i.clone(), c_i, weights, x_bar)?;
    let y_acute = rec.y.sub(&rec.h_i.mul_vec(x_bar));
    let offsets: Vec<(T, CVec<T>)> = spec
        .components
        .iter()
        .filter(|(w, _)| *w > T::zero())
        .map(|(w, off)| (w.ln(), spec.h_i.mul_vec(off)))
        .collect();
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for (x, is_plus) in desired_split(c_d, rec.h_d.cols(), target) {
        let base = y_acute.sub(&rec.h_d.mul_vec(&x));
        for (lw, off) in &offsets {
            let term = *lw - base.sub(off).norm_sqr();
            if is_plus {
                plus.push(term);
            } else {
                minus.push(term);
            }
        }
    }
    Ok(log_sum_exp(&plus) - log_sum_exp(&minus))
}

/// LLR of a desired bit after whitening the residual as if it were Gaussian.
pub fn approx_llr<T: Real>(
    rec: &TransmissionRecord<T>,
    weights: &[T],
    x_bar: &CVec<T>,
    target: TargetBit,
    c_d: &Constellation<T>,
    c_i: &Constellation<T>,
) -> Result<T> {
    rec.validate()?;
    let streams = rec.h_i.cols();
    let vectors = symbol_vectors(c_i, streams);
    check_pmf(weights, vectors.len())?;
    let mut var = vec![T::zero(); streams];
    for (s, &w) in vectors.iter().zip(weights) {
        for n in 0..streams {
            var[n] += w * (s[n] - x_bar[n]).norm_sqr();
        }
    }
    let r = crate::combiner::residual_covariance(&rec.h_i, &var);
    let w = hermitian_inv_sqrt(&r, T::eigen_floor())?;
    let y_t = w.mul_vec(&rec.y.sub(&rec.h_i.mul_vec(x_bar)));
    let h_t = w.matmul(&rec.h_d);
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for (x, is_plus) in desired_split(c_d, rec.h_d.cols(), target) {
        let term = -y_t.sub(&h_t.mul_vec(&x)).norm_sqr();
        if is_plus {
            plus.push(term);
        } else {
            minus.push(term);
        }
    }
    Ok(log_sum_exp(&plus) - log_sum_exp(&minus))
}

/// Settings of the LLR-gap sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct GapSweepConfig {
    pub snr_db: Vec<f64>,
    pub sir_db: f64,
    pub instances: usize,
    pub seed: u64,
}

impl Default for GapSweepConfig {
    fn default() -> Self {
        Self {
            snr_db: vec![0.0, 5.0, 10.0, 15.0],
            sir_db: 0.0,
            instances: 1000,
            seed: 1,
        }
    }
}

/// Per-stream symbol PMFs of the interference posterior.
pub fn default_profiles() -> Vec<Vec<f64>> {
    vec![
        vec![0.25, 0.25, 0.25, 0.25],
        vec![0.05, 0.05, 0.025, 0.875],
        vec![0.02, 0.02, 0.01, 0.95],
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapRow {
    pub profile: String,
    pub snr_db: f64,
    pub mean_abs_llr_mixture: f64,
    pub mean_abs_llr_approx: f64,
    pub mean_abs_gap: f64,
}

fn profile_label(p: &[f64]) -> String {
    p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("/")
}

/// Mean LLR magnitudes of both detectors, per profile and SNR, on a
/// 2x2 link with 4-QAM on both signals.
///
/// Each instance draws channels, a uniform desired vector and an
/// interference vector from the profile (applied independently per
/// stream). Instances share random numbers across profiles.
pub fn llr_gap_sweep(cfg: &GapSweepConfig, profiles: &[Vec<f64>]) -> Result<Vec<GapRow>> {
    let c: Constellation<f64> = Constellation::new(Modulation::Qam4);
    let streams = 2;
    let target = TargetBit { stream: 0, bit: 0 };
    for p in profiles {
        check_pmf(p, c.order())?;
    }
    let mut rows = Vec::new();
    for &snr_db in &cfg.snr_db {
        let link = LinkConfig {
            snr_db,
            sir_db: cfg.sir_db,
            ..LinkConfig::default()
        };
        for profile in profiles {
            let m = c.order();
            let peak = (0..m).fold(0, |b, k| if profile[k] > profile[b] { k } else { b });
            let (mut sum_mix, mut sum_app, mut sum_gap) = (0.0, 0.0, 0.0);
            for inst in 0..cfg.instances {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(inst as u64));
                let (h_d, h_i) = draw_channels::<f64, _>(&link, &mut rng);
                let x_d = CVec((0..streams).map(|_| c.point(rng.gen_range(0..m))).collect());
                // the posterior's peak sits on the transmitted interference symbol
                let truth: Vec<usize> = (0..streams).map(|_| rng.gen_range(0..m)).collect();
                let pmfs: Vec<Vec<f64>> = truth
                    .iter()
                    .map(|&t| (0..m).map(|k| profile[(k + m + peak - t) % m]).collect())
                    .collect();
                let weights = product_weights(&pmfs);
                let x_bar = weighted_mean(&symbol_vectors(&c, streams), &weights);
                let x_i = CVec(truth.iter().map(|&t| c.point(t)).collect());
                let rec = crate::channel::transmit(1, &x_d, &x_i, &h_d, &h_i, &mut rng)?;
                let mix = mixture_llr(&rec, &weights, &x_bar, target, &c, &c)?;
                let app = approx_llr(&rec, &weights, &x_bar, target, &c, &c)?;
                sum_mix += mix.abs();
                sum_app += app.abs();
                sum_gap += (mix - app).abs();
            }
            let n = cfg.instances.max(1) as f64;
            rows.push(GapRow {
                profile: profile_label(profile),
                snr_db,
                mean_abs_llr_mixture: sum_mix / n,
                mean_abs_llr_approx: sum_app / n,
                mean_abs_gap: sum_gap / n,
            });
        }
    }
    Ok(rows)
}

pub const GAP_CSV_HEADER: &str = "profile,snr_db,mean_abs_llr_mixture,mean_abs_llr_approx,mean_abs_gap";

pub fn write_gap_csv<W: Write>(rows: &[GapRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{GAP_CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.profile, r.snr_db, r.mean_abs_llr_mixture, r.mean_abs_llr_approx, r.mean_abs_gap
        )?;
    }
    Ok(())
}

/// Numerically integrates the residual density over a centred grid of
/// half-width `extent` with `steps` points per real dimension (`N_r = 1`
/// only; higher dimensions use Monte-Carlo).
pub fn integrate_pdf_1d<T: Real>(spec: &MixtureSpec<T>, extent: T, steps: usize) -> T {
    debug_assert_eq!(spec.h_i.rows(), 1);
    let h = extent * T::lit(2.0) / T::from_usize(steps).unwrap();
    let mut total = T::zero();
    for a in 0..steps {
        for b in 0..steps {
            let re = -extent + h * (T::from_usize(a).unwrap() + T::lit(0.5));
            let im = -extent + h * (T::from_usize(b).unwrap() + T::lit(0.5));
            total += residual_pdf(&CVec(vec![Complex::new(re, im)]), spec) * h * h;
        }
    }
    total
}
