//! HARQ combining for the IASD receiver: bit-level LLR accumulation (BLC),
//! stacked symbol-level combining (SSLC), symbol-level combining with
//! interference cancellation (SLC-IC), and their memory footprints.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::channel::TransmissionRecord;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_inv_sqrt, hermitian_sqrt, CMat, CVec};
use crate::modem::{Constellation, SoftSymbolStats};
use crate::detector::{Block, DetectorModel, LlrFrame, Signal};
use crate::scalar::Real;

/// Combining scheme used across HARQ rounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    None,
    Blc,
    Sslc,
    Slcic,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::None, Scheme::Blc, Scheme::Sslc, Scheme::Slcic];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::None => "none",
            Scheme::Blc => "blc",
            Scheme::Sslc => "sslc",
            Scheme::Slcic => "slcic",
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "none" => Ok(Scheme::None),
            "blc" => Ok(Scheme::Blc),
            "sslc" => Ok(Scheme::Sslc),
            "slcic" => Ok(Scheme::Slcic),
            _ => Err(Error::UnknownScheme(s.to_string())),
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Running sum of the desired signal's detector extrinsic LLRs.
#[derive(Debug, Clone, PartialEq)]
pub struct BlcState<T> {
    pub acc: Vec<T>,
}

impl<T: Real> BlcState<T> {
    pub fn new(len: usize) -> Self {
        Self {
            acc: vec![T::zero(); len],
        }
    }
}

/// Adds one transmission's extrinsic LLRs to the accumulator.
pub fn blc_accumulate<T: Real>(mut state: BlcState<T>, ext: &[T]) -> Result<BlcState<T>> {
    if ext.len() != state.acc.len() {
        return Err(Error::ShapeMismatch(format!(
            "BLC state holds {} LLRs, frame has {}",
            state.acc.len(),
            ext.len()
        )));
    }
    for (a, &e) in state.acc.iter_mut().zip(ext) {
        *a += e;
    }
    Ok(state)
}

/// [`blc_accumulate`] for a single detector frame.
pub fn blc_accumulate_frame<T: Real>(state: BlcState<T>, ext: &LlrFrame<T>) -> Result<BlcState<T>> {
    if ext.signal != Signal::Desired {
        return Err(Error::ShapeMismatch("BLC accumulates desired-signal LLRs only".into()));
    }
    blc_accumulate(state, ext.values())
}

/// Every past transmission, kept verbatim.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SslcState<T> {
    pub records: Vec<TransmissionRecord<T>>,
}

impl<T: Real> SslcState<T> {
    pub fn new() -> Self {
        Self { records: Vec::new() }
    }

    pub fn push(&mut self, rec: TransmissionRecord<T>) -> Result<()> {
        rec.validate()?;
        if rec.index != self.records.len() + 1 {
            return Err(Error::ShapeMismatch(format!(
                "transmission {} appended after {} records",
                rec.index,
                self.records.len()
            )));
        }
        self.records.push(rec);
        Ok(())
    }
}

/// Stacks all stored transmissions with `rec` into one enlarged model: the
/// desired channels are stacked vertically and each transmission's
/// interference channel sits in its own block-diagonal column block.
pub fn sslc_stack<T: Real>(
    state: &SslcState<T>,
    rec: &TransmissionRecord<T>,
    c_d: &Arc<Constellation<T>>,
    c_i: &Arc<Constellation<T>>,
) -> Result<DetectorModel<T>> {
    rec.validate()?;
    let all: Vec<&TransmissionRecord<T>> = state.records.iter().chain(std::iter::once(rec)).collect();
    let nr = rec.y.len();
    let ns = rec.h_d.cols();
    for r in &all {
        if r.y.len() != nr || r.h_d.cols() != ns {
            return Err(Error::DimensionMismatch("SSLC records differ in shape".into()));
        }
    }
    let total = all.len() * nr;
    let mut y = CVec::zeros(0);
    let mut h_d = CMat::zeros(total, ns);
    let mut blocks = Vec::with_capacity(all.len() + 1);
    for (k, r) in all.iter().enumerate() {
        y.extend_from_slice(&r.y);
        h_d.set_block(k * nr, 0, &r.h_d);
    }
    blocks.push(Block::new(h_d, c_d.clone(), Signal::Desired));
    for (k, r) in all.iter().enumerate() {
        let mut h_i = CMat::zeros(total, r.h_i.cols());
        h_i.set_block(k * nr, 0, &r.h_i);
        blocks.push(Block::new(h_i, c_i.clone(), Signal::Interference));
    }
    Ok(DetectorModel { y, blocks })
}

/// Residual-interference covariance `H_I Q H_I^H + I` for diagonal `Q`.
pub fn residual_covariance<T: Real>(h_i: &CMat<T>, var: &[T]) -> CMat<T> {
    let scaled = CMat::from_fn(h_i.rows(), h_i.cols(), |r, c| h_i[(r, c)] * var[c].max(T::zero()).sqrt());
    scaled.adjoint().gram().add(&CMat::identity(h_i.rows()))
}

/// Soft-cancels the interference of `rec` using the decoder posterior LLRs
/// of its symbols, then whitens the residual interference plus noise.
/// Returns `(y_tilde, H_tilde)` with `y_tilde = H_tilde x_D + white noise`.
pub fn slcic_cancel_and_whiten<T: Real>(
    rec: &TransmissionRecord<T>,
    post_i: &LlrFrame<T>,
    c_i: &Constellation<T>,
) -> Result<(CVec<T>, CMat<T>)> {
    rec.validate()?;
    if post_i.streams() != rec.h_i.cols() || post_i.bits_per_symbol() != c_i.bits_per_symbol() {
        return Err(Error::ShapeMismatch("interference posterior does not match H_I".into()));
    }
    let stats = SoftSymbolStats::from_llrs(post_i.values(), c_i);
    let y_acute = rec.y.sub(&rec.h_i.mul_vec(&stats.mean));
    let r = residual_covariance(&rec.h_i, &stats.var);
    let w = hermitian_inv_sqrt(&r, T::eigen_floor())?;
    Ok((w.mul_vec(&y_acute), w.matmul(&rec.h_d)))
}

/// MRC accumulator `(y_hat, H_hat)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SlcIcState<T> {
    pub y_hat: CVec<T>,
    pub h_hat: CMat<T>,
    /// Number of transmissions folded in.
    pub count: usize,
}

impl<T: Real> SlcIcState<T> {
    /// Empty state for `N_s` desired streams.
    pub fn new(streams: usize) -> Self {
        Self {
            y_hat: CVec::zeros(streams),
            h_hat: CMat::zeros(streams, streams),
            count: 0,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }
}

/// Folds one whitened transmission into the accumulator:
/// `y_hat += H^H y`, `H_hat += H^H H`.
pub fn slcic_update<T: Real>(
    mut state: SlcIcState<T>,
    y_tilde: &CVec<T>,
    h_tilde: &CMat<T>,
) -> Result<SlcIcState<T>> {
    let ns = state.y_hat.len();
    if h_tilde.cols() != ns || h_tilde.rows() != y_tilde.len() {
        return Err(Error::ShapeMismatch(format!(
            "whitened channel {}x{} with y of {} against state of {ns} streams",
            h_tilde.rows(),
            h_tilde.cols(),
            y_tilde.len()
        )));
    }
    state.y_hat = state.y_hat.add(&h_tilde.adjoint_mul_vec(y_tilde));
    state.h_hat = state.h_hat.add(&h_tilde.gram());
    state.count += 1;
    Ok(state)
}

/// Builds the next round's detection model from the accumulator and the
/// new transmission: `[H_hat^{-1/2} y_hat; y]` against desired channel
/// `[H_hat^{1/2}; H_D]` and interference channel `[0; H_I]`.
pub fn slcic_combined_model<T: Real>(
    state: &SlcIcState<T>,
    rec_next: &TransmissionRecord<T>,
    c_d: &Arc<Constellation<T>>,
    c_i: &Arc<Constellation<T>>,
) -> Result<DetectorModel<T>> {
    if state.is_empty() {
        return Err(Error::ShapeMismatch("SLC-IC state is empty".into()));
    }
    rec_next.validate()?;
    let ns = state.y_hat.len();
    if rec_next.h_d.cols() != ns {
        return Err(Error::ShapeMismatch("stream count changed between transmissions".into()));
    }
    let floor = T::eigen_floor();
    let w = hermitian_inv_sqrt(&state.h_hat, floor)?;
    let s = hermitian_sqrt(&state.h_hat, floor)?;
    let y = w.mul_vec(&state.y_hat).stack(&rec_next.y);
    let h_d = s.vstack(&rec_next.h_d)?;
    let h_i = CMat::zeros(ns, rec_next.h_i.cols()).vstack(&rec_next.h_i)?;
    Ok(DetectorModel {
        y,
        blocks: vec![
            Block::new(h_d, c_d.clone(), Signal::Desired),
            Block::new(h_i, c_i.clone(), Signal::Interference),
        ],
    })
}

/// Reference model that keeps every whitened transmission separately:
/// `[y_tilde_1; ...; y_tilde_{i-1}; y_i]`. Its metric equals that of
/// [`slcic_combined_model`] up to an additive constant.
pub fn whitened_stack_model<T: Real>(
    whitened: &[(CVec<T>, CMat<T>)],
    rec_next: &TransmissionRecord<T>,
    c_d: &Arc<Constellation<T>>,
    c_i: &Arc<Constellation<T>>,
) -> Result<DetectorModel<T>> {
    rec_next.validate()?;
    let ns = rec_next.h_d.cols();
    let mut y = CVec::zeros(0);
    let mut h_d = CMat::zeros(0, ns);
    for (yt, ht) in whitened {
        y.extend_from_slice(yt);
        h_d = h_d.vstack(ht)?;
    }
    let top = y.len();
    y.extend_from_slice(&rec_next.y);
    let h_d = h_d.vstack(&rec_next.h_d)?;
    let h_i = CMat::zeros(top, rec_next.h_i.cols()).vstack(&rec_next.h_i)?;
    Ok(DetectorModel {
        y,
        blocks: vec![
            Block::new(h_d, c_d.clone(), Signal::Desired),
            Block::new(h_i, c_i.clone(), Signal::Interference),
        ],
    })
}

/// Inputs of the memory-footprint model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MemoryModel {
    pub scheme: Scheme,
    /// Bits per symbol.
    pub n_m: usize,
    pub n_s: usize,
    pub n_r: usize,
    /// Transmission index the stored state serves.
    pub i: usize,
}

/// Real numbers that must be stored between transmissions.
pub fn memory_units(m: &MemoryModel) -> Result<usize> {
    match m.scheme {
        Scheme::Blc => Ok(m.n_m * m.n_s),
        Scheme::Sslc => Ok(2 * m.i.saturating_sub(1) * m.n_s * m.n_r),
        // y_hat (2 N_s) plus the Hermitian H_hat: N_s real diagonal entries
        // and (N_s^2 - N_s) / 2 complex off-diagonal ones.
        Scheme::Slcic => Ok((m.n_s + 2) * m.n_s),
        Scheme::None => Err(Error::UnknownScheme("none".into())),
    }
}
