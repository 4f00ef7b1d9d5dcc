//! Joint max-log detection of the desired and interfering symbol vectors,
//! and the iterative detection/decoding loop that successively decodes
//! both signals.

use std::ops::Range;
use std::sync::Arc;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::fec::{Interleaver, TurboCode};
use crate::linalg::{CMat, CVec};
use crate::modem::Constellation;
use crate::scalar::Real;

/// Default ceiling on the joint hypothesis count.
pub const DEFAULT_HYPOTHESIS_CAP: u128 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Signal {
    Desired,
    Interference,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    APriori,
    APosteriori,
    Extrinsic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Location {
    Detector,
    Decoder,
}

/// Bit LLRs of one symbol vector, indexed by `(stream, bit)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LlrFrame<T> {
    pub signal: Signal,
    pub stage: Stage,
    pub location: Location,
    streams: usize,
    bits_per_symbol: usize,
    values: Vec<T>,
}

impl<T: Real> LlrFrame<T> {
    pub fn zeros(
        signal: Signal,
        stage: Stage,
        location: Location,
        streams: usize,
        bits_per_symbol: usize,
    ) -> Self {
        Self {
            signal,
            stage,
            location,
            streams,
            bits_per_symbol,
            values: vec![T::zero(); streams * bits_per_symbol],
        }
    }

    /// `values[n * bits_per_symbol + m]` is bit `m` of stream `n`.
    pub fn from_values(
        signal: Signal,
        stage: Stage,
        location: Location,
        streams: usize,
        bits_per_symbol: usize,
        values: Vec<T>,
    ) -> Result<Self> {
        if values.len() != streams * bits_per_symbol {
            return Err(Error::LengthMismatch {
                expected: streams * bits_per_symbol,
                actual: values.len(),
            });
        }
        Ok(Self {
            signal,
            stage,
            location,
            streams,
            bits_per_symbol,
            values,
        })
    }

    pub fn streams(&self) -> usize {
        self.streams
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.bits_per_symbol
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn get(&self, stream: usize, bit: usize) -> T {
        self.values[stream * self.bits_per_symbol + bit]
    }

    pub fn same_shape(&self, other: &LlrFrame<T>) -> bool {
        self.streams == other.streams && self.bits_per_symbol == other.bits_per_symbol
    }
}

/// `post - prior`, elementwise.
pub fn extrinsic<T: Real>(post: &LlrFrame<T>, prior: &LlrFrame<T>) -> Result<LlrFrame<T>> {
    if !post.same_shape(prior) {
        return Err(Error::ShapeMismatch(format!(
            "{}x{} posterior vs {}x{} prior",
            post.streams, post.bits_per_symbol, prior.streams, prior.bits_per_symbol
        )));
    }
    Ok(LlrFrame {
        signal: post.signal,
        stage: Stage::Extrinsic,
        location: post.location,
        streams: post.streams,
        bits_per_symbol: post.bits_per_symbol,
        values: post.values.iter().zip(&prior.values).map(|(&a, &b)| a - b).collect(),
    })
}

/// One column block of the detection model: a channel, its constellation
/// and the a-priori LLRs of the symbols it carries.
#[derive(Debug, Clone, PartialEq)]
pub struct Block<T> {
    pub channel: CMat<T>,
    pub constellation: Arc<Constellation<T>>,
    pub prior: LlrFrame<T>,
}

impl<T: Real> Block<T> {
    /// Block with zero a-priori LLRs.
    pub fn new(channel: CMat<T>, constellation: Arc<Constellation<T>>, signal: Signal) -> Self {
        let prior = LlrFrame::zeros(
            signal,
            Stage::APriori,
            Location::Detector,
            channel.cols(),
            constellation.bits_per_symbol(),
        );
        Self {
            channel,
            constellation,
            prior,
        }
    }

    pub fn hypotheses(&self) -> u128 {
        (self.constellation.order() as u128).pow(self.channel.cols() as u32)
    }
}

/// `y = sum_b H_b x_b + n`; block 0 is the desired signal.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorModel<T> {
    pub y: CVec<T>,
    pub blocks: Vec<Block<T>>,
}

impl<T: Real> DetectorModel<T> {
    pub fn validate(&self) -> Result<()> {
        if !self.y.is_finite() {
            return Err(Error::NonFinite("received vector"));
        }
        for (b, block) in self.blocks.iter().enumerate() {
            if block.channel.rows() != self.y.len() {
                return Err(Error::DimensionMismatch(format!(
                    "block {b} has {} rows, y has {}",
                    block.channel.rows(),
                    self.y.len()
                )));
            }
            if block.prior.streams() != block.channel.cols()
                || block.prior.bits_per_symbol() != block.constellation.bits_per_symbol()
            {
                return Err(Error::ShapeMismatch(format!("block {b} prior shape")));
            }
            if !block.channel.is_finite() {
                return Err(Error::NonFinite("channel matrix"));
            }
        }
        Ok(())
    }

    /// Number of joint hypotheses, saturating.
    pub fn hypothesis_count(&self) -> u128 {
        self.blocks
            .iter()
            .fold(1u128, |acc, b| acc.saturating_mul(b.hypotheses()))
    }

    /// `-||y - sum_b H_b x_b||^2` for explicit point indices per block and stream.
    pub fn distance_metric(&self, points: &[Vec<usize>]) -> T {
        let mut r = self.y.clone();
        for (block, idx) in self.blocks.iter().zip(points) {
            let x: Vec<Complex<T>> = idx.iter().map(|&k| block.constellation.point(k)).collect();
            r = r.sub(&block.channel.mul_vec(&x));
        }
        -r.norm_sqr()
    }
}

/// Precomputed per-block tables over local hypotheses.
struct BlockTable<T> {
    /// `contrib[h * rows .. (h + 1) * rows] = H_b x(h)`.
    contrib: Vec<Complex<T>>,
    /// `0.5 * b(h)^T L_prior`.
    prior: Vec<T>,
    count: usize,
}

fn block_table<T: Real>(block: &Block<T>, rows: usize) -> BlockTable<T> {
    let c = &block.constellation;
    let m = c.order();
    let streams = block.channel.cols();
    let nm = c.bits_per_symbol();
    let count = m.pow(streams as u32);
    let half = T::lit(0.5);

    // Per-stream, per-point contribution and prior term.
    let mut col_terms = Vec::with_capacity(streams * m * rows);
    let mut prior_terms = Vec::with_capacity(streams * m);
    let prior_llrs = block.prior.values();
    for n in 0..streams {
        let llrs = &prior_llrs[n * nm..(n + 1) * nm];
        for (k, &s) in c.points().iter().enumerate() {
            col_terms.extend((0..rows).map(|r| block.channel[(r, n)] * s));
            let mut p = T::zero();
            for (&b, &l) in c.label(k).iter().zip(llrs) {
                p += if b > 0 { l } else { -l };
            }
            prior_terms.push(p * half);
        }
    }

    // Stream 0 varies fastest: hypothesis h = k_0 + m * (k_1 + m * ...).
    let mut contrib = Vec::with_capacity(count * rows);
    let mut prior = Vec::with_capacity(count);
    if streams == 0 {
        contrib.resize(rows, Complex::new(T::zero(), T::zero()));
        prior.push(T::zero());
    }
    for h in (0..count).filter(|_| streams > 0) {
        let mut rest = h;
        let start = contrib.len();
        contrib.extend_from_slice(&col_terms[(rest % m) * rows..(rest % m + 1) * rows]);
        let mut p = prior_terms[rest % m];
        for n in 1..streams {
            rest /= m;
            let k = rest % m;
            let col = &col_terms[(n * m + k) * rows..(n * m + k + 1) * rows];
            for (o, v) in contrib[start..].iter_mut().zip(col) {
                *o += v;
            }
            p += prior_terms[n * m + k];
        }
        prior.push(p);
    }
    BlockTable {
        contrib,
        prior,
        count,
    }
}

/// Best joint metric for every local hypothesis of every block.
fn best_per_block<T: Real>(model: &DetectorModel<T>, cap: u128) -> Result<Vec<Vec<T>>> {
    model.validate()?;
    let count = model.hypothesis_count();
    if count > cap {
        return Err(Error::HypothesisCapExceeded { count, cap });
    }
    let rows = model.y.len();
    let tables: Vec<BlockTable<T>> = model.blocks.iter().map(|b| block_table(b, rows)).collect();
    let mut best: Vec<Vec<T>> = tables.iter().map(|t| vec![T::neg_infinity(); t.count]).collect();

    if tables.len() == 2 {
        // Hot path: desired block against one interference block.
        let (t0, t1) = (&tables[0], &tables[1]);
        let mut r0 = vec![Complex::new(T::zero(), T::zero()); rows];
        let (b0, b1) = best.split_at_mut(1);
        let (b0, b1) = (&mut b0[0], &mut b1[0]);
        for ((c0, &p0), best0) in t0.contrib.chunks_exact(rows).zip(&t0.prior).zip(b0.iter_mut()) {
            for ((r, &y), &c) in r0.iter_mut().zip(model.y.iter()).zip(c0) {
                *r = y - c;
            }
            let mut local = T::neg_infinity();
            let mut visit = |d: T, p1: T, best1: &mut T| {
                let metric = p0 + p1 - d;
                if metric > local {
                    local = metric;
                }
                if metric > *best1 {
                    *best1 = metric;
                }
            };
            let pairs = t1.prior.iter().zip(b1.iter_mut());
            if rows == 2 {
                let (ra, rb) = (r0[0], r0[1]);
                for (c1, (&p1, best1)) in t1.contrib.chunks_exact(2).zip(pairs) {
                    visit((ra - c1[0]).norm_sqr() + (rb - c1[1]).norm_sqr(), p1, best1);
                }
            } else {
                for (c1, (&p1, best1)) in t1.contrib.chunks_exact(rows).zip(pairs) {
                    let d = r0.iter().zip(c1).fold(T::zero(), |acc, (&a, &b)| acc + (a - b).norm_sqr());
                    visit(d, p1, best1);
                }
            }
            *best0 = local;
        }
        return Ok(best);
    }

    let mut residual = vec![model.y.0.clone(); tables.len() + 1];
    let mut choice = vec![0usize; tables.len()];
    enumerate(&tables, rows, 0, T::zero(), &mut residual, &mut choice, &mut best);
    Ok(best)
}

fn enumerate<T: Real>(
    tables: &[BlockTable<T>],
    rows: usize,
    level: usize,
    prior: T,
    residual: &mut [Vec<Complex<T>>],
    choice: &mut [usize],
    best: &mut [Vec<T>],
) {
    if level == tables.len() {
        let metric = prior - residual[level].iter().fold(T::zero(), |acc, z| acc + z.norm_sqr());
        for (b, &h) in choice.iter().enumerate() {
            if metric > best[b][h] {
                best[b][h] = metric;
            }
        }
        return;
    }
    let t = &tables[level];
    for h in 0..t.count {
        let c = &t.contrib[h * rows..(h + 1) * rows];
        let (head, tail) = residual.split_at_mut(level + 1);
        for r in 0..rows {
            tail[0][r] = head[level][r] - c[r];
        }
        choice[level] = h;
        enumerate(tables, rows, level + 1, prior + t.prior[h], residual, choice, best);
    }
}

fn frame_from_best<T: Real>(block: &Block<T>, best: &[T]) -> LlrFrame<T> {
    let c = &block.constellation;
    let m = c.order();
    let streams = block.channel.cols();
    let nm = c.bits_per_symbol();
    let mut plus = vec![T::neg_infinity(); streams * nm];
    let mut minus = vec![T::neg_infinity(); streams * nm];
    for (h, &metric) in best.iter().enumerate() {
        let mut rest = h;
        for n in 0..streams {
            let k = rest % m;
            rest /= m;
            for (bit, &b) in c.label(k).iter().enumerate() {
                let slot = if b > 0 { &mut plus[n * nm + bit] } else { &mut minus[n * nm + bit] };
                if metric > *slot {
                    *slot = metric;
                }
            }
        }
    }
    let values = plus.iter().zip(&minus).map(|(&p, &q)| p - q).collect();
    LlrFrame {
        signal: block.prior.signal,
        stage: Stage::APosteriori,
        location: Location::Detector,
        streams,
        bits_per_symbol: nm,
        values,
    }
}

/// Max-log a-posteriori LLRs of every bit of block `target`.
pub fn joint_maxlog_llrs<T: Real>(
    model: &DetectorModel<T>,
    target: usize,
    cap: u128,
) -> Result<LlrFrame<T>> {
    if target >= model.blocks.len() {
        return Err(Error::ShapeMismatch(format!(
            "target block {target} of {}",
            model.blocks.len()
        )));
    }
    let best = best_per_block(model, cap)?;
    Ok(frame_from_best(&model.blocks[target], &best[target]))
}

/// Max-log a-posteriori LLRs of every block from a single enumeration.
pub fn joint_maxlog_all<T: Real>(model: &DetectorModel<T>, cap: u128) -> Result<Vec<LlrFrame<T>>> {
    let best = best_per_block(model, cap)?;
    Ok(model
        .blocks
        .iter()
        .zip(&best)
        .map(|(block, b)| frame_from_best(block, b))
        .collect())
}

/// Which signal is detected first inside each outer iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectionOrder {
    #[default]
    DesiredFirst,
    InterferenceFirst,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IasdParams {
    /// Outer detect/decode rounds with decoder feedback. Zero runs a single
    /// round with all-zero a-priori LLRs and no feedback.
    pub iters: usize,
    pub turbo_iters: usize,
    pub order: DetectionOrder,
    pub hypothesis_cap: u128,
}

impl Default for IasdParams {
    fn default() -> Self {
        Self {
            iters: 4,
            turbo_iters: 8,
            order: DetectionOrder::DesiredFirst,
            hypothesis_cap: DEFAULT_HYPOTHESIS_CAP,
        }
    }
}

/// Placement of one codeword on the detector models.
///
/// Coded bits are permuted by `bit_interleaver` (`tx = interleave(coded)`)
/// and then fill slots `slots` of block `block` in (slot, stream, bit) order.
#[derive(Debug, Clone)]
pub struct CodewordMap<'a, T> {
    pub block: usize,
    pub slots: Range<usize>,
    pub code: &'a TurboCode,
    pub bit_interleaver: &'a Interleaver,
    /// LLRs (coded order) added to the detector extrinsic before decoding.
    pub channel_offset: Option<&'a [T]>,
}

/// Final state of one codeword after the IASD loop.
#[derive(Debug, Clone, PartialEq)]
pub struct CodewordResult<T> {
    pub hard_bits: Vec<i8>,
    /// Decoder a-posteriori LLRs of the coded bits, in coded order.
    pub decoder_posterior: Vec<T>,
    /// Detector extrinsic LLRs of the last detection pass, in coded order
    /// (without any channel offset).
    pub detector_extrinsic: Vec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IasdOutput<T> {
    /// One entry per codeword map; `None` if the loop stopped before that
    /// codeword was decoded.
    pub codewords: Vec<Option<CodewordResult<T>>>,
    pub rounds: usize,
}

impl<T> IasdOutput<T> {
    pub fn hard_bits(&self, cw: usize) -> Option<&[i8]> {
        self.codewords[cw].as_ref().map(|c| c.hard_bits.as_slice())
    }
}

/// Callback deciding, after the desired codewords of a round have been
/// decoded, whether the loop may stop.
pub type EarlyStop<'a, T> = &'a dyn Fn(&[Option<CodewordResult<T>>]) -> bool;

/// Interference-aware successive decoding over a set of slot models.
///
/// Each round visits the blocks in detection order. For a block, every
/// slot is detected with the joint max-log detector; the extrinsic LLRs
/// are de-interleaved into each codeword carried by that block, decoded,
/// and (when feedback is on) the decoder extrinsic LLRs become the block's
/// a-priori LLRs for subsequent detections.
pub fn iasd_decode<T: Real>(
    slots: &mut [DetectorModel<T>],
    codewords: &[CodewordMap<'_, T>],
    params: &IasdParams,
    early_stop: Option<EarlyStop<'_, T>>,
) -> Result<IasdOutput<T>> {
    let blocks = slots.first().map_or(0, |m| m.blocks.len());
    if blocks < 2 {
        return Err(Error::ShapeMismatch("IASD needs a desired and at least one interference block".into()));
    }
    for (i, cw) in codewords.iter().enumerate() {
        if cw.block >= blocks || cw.slots.end > slots.len() {
            return Err(Error::ShapeMismatch(format!("codeword {i} is out of range")));
        }
        let per_slot: usize = {
            let b = &slots[cw.slots.start].blocks[cw.block];
            b.channel.cols() * b.constellation.bits_per_symbol()
        };
        let capacity = per_slot * cw.slots.len();
        if capacity != cw.code.coded_len() || cw.bit_interleaver.len() != capacity {
            return Err(Error::LengthMismatch {
                expected: capacity,
                actual: cw.code.coded_len(),
            });
        }
        if let Some(off) = cw.channel_offset {
            if off.len() != capacity {
                return Err(Error::LengthMismatch {
                    expected: capacity,
                    actual: off.len(),
                });
            }
        }
    }

    let block_order: Vec<usize> = match params.order {
        DetectionOrder::DesiredFirst => (0..blocks).collect(),
        DetectionOrder::InterferenceFirst => (1..blocks).chain(std::iter::once(0)).collect(),
    };
    let feedback = params.iters > 0;
    let rounds = params.iters.max(1);
    let mut results: Vec<Option<CodewordResult<T>>> = vec![None; codewords.len()];
    let mut rounds_run = 0;

    'outer: for _ in 0..rounds {
        rounds_run += 1;
        for &block in &block_order {
            let on_block: Vec<usize> = (0..codewords.len()).filter(|&i| codewords[i].block == block).collect();
            if on_block.is_empty() {
                continue;
            }
            for &ci in &on_block {
                let cw = &codewords[ci];
                let mut tx_ext = Vec::with_capacity(cw.code.coded_len());
                for model in &slots[cw.slots.clone()] {
                    let post = joint_maxlog_llrs(model, block, params.hypothesis_cap)?;
                    let ext = extrinsic(&post, &model.blocks[block].prior)?;
                    tx_ext.extend_from_slice(ext.values());
                }
                let det_ext = cw.bit_interleaver.deinterleave(&tx_ext);
                let dec_in: Vec<T> = match cw.channel_offset {
                    Some(off) => det_ext.iter().zip(off).map(|(&a, &b)| a + b).collect(),
                    None => det_ext.clone(),
                };
                let out = cw.code.decode(&dec_in, &[], params.turbo_iters)?;
                if feedback {
                    let tx_prior = cw.bit_interleaver.interleave(&out.coded_extrinsic);
                    let mut chunks = tx_prior.chunks_exact(slots[cw.slots.start].blocks[block].prior.values().len());
                    for model in &mut slots[cw.slots.clone()] {
                        let chunk = chunks.next().expect("capacity checked above");
                        model.blocks[block].prior.values_mut().copy_from_slice(chunk);
                    }
                }
                results[ci] = Some(CodewordResult {
                    hard_bits: out.hard_bits,
                    decoder_posterior: out.coded_posterior,
                    detector_extrinsic: det_ext,
                });
            }
            if block == 0 {
                if let Some(stop) = early_stop {
                    if stop(&results) {
                        break 'outer;
                    }
                }
            }
        }
    }

    Ok(IasdOutput {
        codewords: results,
        rounds: rounds_run,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modem::Modulation;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_c(rng: &mut ChaCha8Rng) -> Complex<f64> {
        Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    }

    fn qam4() -> Arc<Constellation<f64>> {
        Arc::new(Constellation::new(Modulation::Qam4))
    }

    fn random_model(rng: &mut ChaCha8Rng, nr: usize, ns: usize) -> DetectorModel<f64> {
        let c = qam4();
        let h_d = CMat::from_fn(nr, ns, |_, _| rand_c(rng));
        let h_i = CMat::from_fn(nr, ns, |_, _| rand_c(rng));
        let y = CVec((0..nr).map(|_| rand_c(rng) * 2.0).collect());
        let mut d = Block::new(h_d, c.clone(), Signal::Desired);
        let mut i = Block::new(h_i, c, Signal::Interference);
        for v in d.prior.values_mut().iter_mut().chain(i.prior.values_mut()) {
            *v = rng.gen_range(-2.0..2.0);
        }
        DetectorModel { y, blocks: vec![d, i] }
    }

    #[test]
    fn noiseless_signs_match_transmitted_bits() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let c = qam4();
        let h_d = CMat::from_fn(2, 2, |_, _| rand_c(&mut rng));
        let bits = [1i8, -1, -1, 1];
        let x = c.modulate(&bits).unwrap();
        let y = h_d.mul_vec(&x);
        let model = DetectorModel {
            y,
            blocks: vec![
                Block::new(h_d, c.clone(), Signal::Desired),
                Block::new(CMat::zeros(2, 2), c, Signal::Interference),
            ],
        };
        let llr = joint_maxlog_llrs(&model, 0, DEFAULT_HYPOTHESIS_CAP).unwrap();
        for (l, &b) in llr.values().iter().zip(&bits) {
            assert!(l * b as f64 > 0.0);
        }
    }

    #[test]
    fn scalar_case_matches_sixteen_hypotheses() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let model = random_model(&mut rng, 1, 1);
        let c = qam4();
        let llr = joint_maxlog_llrs(&model, 0, DEFAULT_HYPOTHESIS_CAP).unwrap();
        for bit in 0..2 {
            let mut best = [f64::NEG_INFINITY; 2];
            for kd in 0..4 {
                for ki in 0..4 {
                    let r = model.y[0]
                        - model.blocks[0].channel[(0, 0)] * c.point(kd)
                        - model.blocks[1].channel[(0, 0)] * c.point(ki);
                    let prior: f64 = (0..2)
                        .map(|m| {
                            0.5 * (c.label(kd)[m] as f64 * model.blocks[0].prior.get(0, m)
                                + c.label(ki)[m] as f64 * model.blocks[1].prior.get(0, m))
                        })
                        .sum();
                    let metric = -r.norm_sqr() + prior;
                    let side = usize::from(c.label(kd)[bit] < 0);
                    best[side] = best[side].max(metric);
                }
            }
            assert!((llr.get(0, bit) - (best[0] - best[1])).abs() < 1e-12);
        }
    }

    #[test]
    fn two_block_fast_path_matches_general_path() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let model = random_model(&mut rng, 2, 2);
            // A zero-width third block forces the recursive path.
            let mut padded = model.clone();
            padded.blocks.push(Block::new(CMat::zeros(2, 0), qam4(), Signal::Interference));
            let fast = joint_maxlog_all(&model, DEFAULT_HYPOTHESIS_CAP).unwrap();
            let slow = joint_maxlog_all(&padded, DEFAULT_HYPOTHESIS_CAP).unwrap();
            for b in 0..2 {
                for (a, c) in fast[b].values().iter().zip(slow[b].values()) {
                    assert!((a - c).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let model = random_model(&mut rng, 2, 2);
        assert_eq!(
            joint_maxlog_llrs(&model, 0, 255),
            Err(Error::HypothesisCapExceeded { count: 256, cap: 255 })
        );
    }

    #[test]
    fn extrinsic_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let vals: Vec<f64> = (0..4).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let post = LlrFrame::from_values(Signal::Desired, Stage::APosteriori, Location::Detector, 2, 2, vals.clone()).unwrap();
        let zero = LlrFrame::zeros(Signal::Desired, Stage::APriori, Location::Detector, 2, 2);
        assert_eq!(extrinsic(&post, &zero).unwrap().values(), &vals[..]);
        assert!(extrinsic(&post, &post).unwrap().values().iter().all(|&v| v == 0.0));
        let wrong = LlrFrame::<f64>::zeros(Signal::Desired, Stage::APriori, Location::Detector, 1, 2);
        assert!(matches!(extrinsic(&post, &wrong), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn frame_shape_is_checked() {
        assert!(LlrFrame::<f64>::from_values(Signal::Desired, Stage::APriori, Location::Decoder, 2, 2, vec![0.0; 3]).is_err());
    }
}
