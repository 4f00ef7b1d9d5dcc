//! Two-user MIMO interference channel with i.i.d. Rayleigh block fading.
//!
//! SNR is the desired-signal power per receive antenna over the unit noise
//! power; SIR is the desired-over-interference power ratio. With unit-power
//! symbols this fixes the channel entry variances at `snr / N_s` (desired)
//! and `snr / (N_s * sir)` (interference).

use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMat, CVec};
use crate::modem::Modulation;
use crate::scalar::Real;

/// Antenna counts, operating point and modulations of both links.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinkConfig {
    #[serde(rename = "N_t")]
    pub n_t: usize,
    #[serde(rename = "N_r")]
    pub n_r: usize,
    #[serde(rename = "N_s")]
    pub n_s: usize,
    pub snr_db: f64,
    pub sir_db: f64,
    #[serde(rename = "mod_D")]
    pub mod_d: Modulation,
    #[serde(rename = "mod_I")]
    pub mod_i: Modulation,
}

impl Default for LinkConfig {
    fn default() -> Self {
        Self {
            n_t: 2,
            n_r: 2,
            n_s: 2,
            snr_db: 10.0,
            sir_db: 0.0,
            mod_d: Modulation::Qam4,
            mod_i: Modulation::Qam4,
        }
    }
}

impl LinkConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_t != self.n_s {
            return Err(Error::Config(format!(
                "N_t ({}) must equal N_s ({})",
                self.n_t, self.n_s
            )));
        }
        if self.n_r == 0 || self.n_s == 0 {
            return Err(Error::Config("antenna counts must be positive".into()));
        }
        if !self.snr_db.is_finite() || !self.sir_db.is_finite() {
            return Err(Error::Config("snr_db and sir_db must be finite".into()));
        }
        Ok(())
    }

    pub fn snr_lin(&self) -> f64 {
        10f64.powf(self.snr_db / 10.0)
    }

    pub fn sir_lin(&self) -> f64 {
        10f64.powf(self.sir_db / 10.0)
    }

    /// Interference-to-noise ratio per receive antenna.
    pub fn inr_lin(&self) -> f64 {
        self.snr_lin() / self.sir_lin()
    }

    pub fn desired_entry_var(&self) -> f64 {
        self.snr_lin() / self.n_s as f64
    }

    pub fn interference_entry_var(&self) -> f64 {
        self.inr_lin() / self.n_s as f64
    }
}

/// One HARQ round as seen by the receiver.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmissionRecord<T> {
    /// 1-based transmission index.
    pub index: usize,
    pub y: CVec<T>,
    pub h_d: CMat<T>,
    pub h_i: CMat<T>,
}

impl<T: Real> TransmissionRecord<T> {
    pub fn validate(&self) -> Result<()> {
        let nr = self.y.len();
        if self.h_d.rows() != nr || self.h_i.rows() != nr {
            return Err(Error::DimensionMismatch(format!(
                "y has {nr} rows, H_D {} and H_I {}",
                self.h_d.rows(),
                self.h_i.rows()
            )));
        }
        if !self.y.is_finite() || !self.h_d.is_finite() || !self.h_i.is_finite() {
            return Err(Error::NonFinite("transmission record"));
        }
        Ok(())
    }
}

/// A `CN(0, var)` sample.
pub fn complex_gaussian<T, R>(var: T, rng: &mut R) -> Complex<T>
where
    T: Real,
    R: Rng + ?Sized,
    StandardNormal: Distribution<T>,
{
    let s = (var * T::lit(0.5)).sqrt();
    let re: T = StandardNormal.sample(rng);
    let im: T = StandardNormal.sample(rng);
    Complex::new(re * s, im * s)
}

/// Matrix of i.i.d. `CN(0, var)` entries.
pub fn complex_gaussian_mat<T, R>(rows: usize, cols: usize, var: T, rng: &mut R) -> CMat<T>
where
    T: Real,
    R: Rng + ?Sized,
    StandardNormal: Distribution<T>,
{
    CMat::from_fn(rows, cols, |_, _| complex_gaussian(var, rng))
}

/// Draws `(H_D, H_I)`, each `N_r x N_s` Rayleigh.
pub fn draw_channels<T, R>(cfg: &LinkConfig, rng: &mut R) -> (CMat<T>, CMat<T>)
where
    T: Real,
    R: Rng + ?Sized,
    StandardNormal: Distribution<T>,
{
    let h_d = complex_gaussian_mat(cfg.n_r, cfg.n_s, T::lit(cfg.desired_entry_var()), rng);
    let h_i = complex_gaussian_mat(cfg.n_r, cfg.n_s, T::lit(cfg.interference_entry_var()), rng);
    (h_d, h_i)
}

/// `y = H_D x_D + H_I x_I + n` with `n ~ CN(0, I)`.
pub fn transmit<T, R>(
    index: usize,
    x_d: &CVec<T>,
    x_i: &CVec<T>,
    h_d: &CMat<T>,
    h_i: &CMat<T>,
    rng: &mut R,
) -> Result<TransmissionRecord<T>>
where
    T: Real,
    R: Rng + ?Sized,
    StandardNormal: Distribution<T>,
{
    transmit_with_noise_var(index, x_d, x_i, h_d, h_i, T::one(), rng)
}

/// [`transmit`] with an explicit noise variance; `0` gives a noiseless record.
pub fn transmit_with_noise_var<T, R>(
    index: usize,
    x_d: &CVec<T>,
    x_i: &CVec<T>,
    h_d: &CMat<T>,
    h_i: &CMat<T>,
    noise_var: T,
    rng: &mut R,
) -> Result<TransmissionRecord<T>>
where
    T: Real,
    R: Rng + ?Sized,
    StandardNormal: Distribution<T>,
{
    if h_d.cols() != x_d.len() || h_i.cols() != x_i.len() || h_d.rows() != h_i.rows() {
        return Err(Error::DimensionMismatch(format!(
            "H_D {}x{} with x_D {}, H_I {}x{} with x_I {}",
            h_d.rows(),
            h_d.cols(),
            x_d.len(),
            h_i.rows(),
            h_i.cols(),
            x_i.len()
        )));
    }
    let mut y = h_d.mul_vec(x_d).add(&h_i.mul_vec(x_i));
    if noise_var > T::zero() {
        for v in y.iter_mut() {
            *v += complex_gaussian(noise_var, rng);
        }
    }
    Ok(TransmissionRecord {
        index,
        y,
        h_d: h_d.clone(),
        h_i: h_i.clone(),
    })
}
