//! HARQ Monte-Carlo experiments.
//!
//! A packet carries `info_bits` desired bits split evenly into
//! `codewords_per_packet` turbo codewords. Each codeword is bit-interleaved
//! and occupies a contiguous run of slots (one `N_s`-stream symbol vector
//! per slot); slot `s` sits on subcarrier `s % subcarriers`. The desired
//! packet is re-sent unchanged (Chase combining) while the interferer sends
//! a fresh codeword in the same slots every transmission. Packet success is
//! checked against the transmitted bits and is acknowledged per packet.

use std::io::Write;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{draw_channels, transmit, LinkConfig, TransmissionRecord};
use crate::combiner::{
    blc_accumulate, slcic_cancel_and_whiten, slcic_combined_model, slcic_update, sslc_stack, BlcState,
    Scheme, SlcIcState, SslcState,
};
use crate::detector::{
    iasd_decode, Block, CodewordMap, CodewordResult, DetectionOrder, DetectorModel, IasdParams, LlrFrame,
    Location, Signal, Stage, DEFAULT_HYPOTHESIS_CAP,
};
use crate::error::{Error, Result};
use crate::fec::{CodeRate, Interleaver, TurboCode};
use crate::linalg::{CMat, CVec};
use crate::modem::{Constellation, Modulation};

pub const MAX_TRANSMISSIONS: usize = 8;
pub const THREADS_ENV: &str = "IASD_THREADS";

fn default_scheme() -> Scheme {
    Scheme::None
}
fn default_n() -> usize {
    4
}
fn default_packets() -> usize {
    2000
}
fn default_subcarriers() -> usize {
    10
}
fn default_codewords() -> usize {
    2
}
fn default_iasd_iters() -> usize {
    4
}
fn default_turbo_iters() -> usize {
    8
}
fn default_seed() -> u64 {
    1
}
fn default_info_bits() -> usize {
    400
}
fn default_true() -> bool {
    true
}
fn default_rate() -> CodeRate {
    CodeRate::Third
}

/// Experiment configuration, read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    #[serde(default)]
    pub link: LinkConfig,
    #[serde(default = "default_scheme")]
    pub scheme: Scheme,
    #[serde(rename = "rate_D", default = "default_rate")]
    pub rate_d: CodeRate,
    #[serde(rename = "rate_I", default = "default_rate")]
    pub rate_i: CodeRate,
    /// Maximum number of transmissions per packet.
    #[serde(rename = "N", default = "default_n")]
    pub n: usize,
    #[serde(default = "default_packets")]
    pub packets: usize,
    #[serde(default = "default_subcarriers")]
    pub subcarriers: usize,
    #[serde(default = "default_codewords")]
    pub codewords_per_packet: usize,
    #[serde(default = "default_iasd_iters")]
    pub iasd_iters: usize,
    #[serde(default = "default_turbo_iters")]
    pub turbo_iters: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_info_bits")]
    pub info_bits: usize,
    /// Independent fading per subcarrier; `false` reuses one draw for all.
    #[serde(default = "default_true")]
    pub independent_subcarriers: bool,
    #[serde(default)]
    pub detection_order: DetectionOrder,
    /// Stop the detect/decode loop once the desired packet is correct.
    #[serde(default = "default_true")]
    pub early_stop: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields have defaults")
    }
}

impl SimConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let cfg: SimConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.link.validate()?;
        if self.n == 0 || self.n > MAX_TRANSMISSIONS {
            return Err(Error::Config(format!("N must be in 1..={MAX_TRANSMISSIONS}, got {}", self.n)));
        }
        if self.packets == 0 {
            return Err(Error::Config("packets must be at least 1".into()));
        }
        if self.subcarriers == 0 || self.codewords_per_packet == 0 {
            return Err(Error::Config("subcarriers and codewords_per_packet must be positive".into()));
        }
        if self.info_bits == 0 || self.info_bits % self.codewords_per_packet != 0 {
            return Err(Error::Config(format!(
                "info_bits ({}) must be a positive multiple of codewords_per_packet ({})",
                self.info_bits, self.codewords_per_packet
            )));
        }
        Ok(())
    }

    pub fn iasd_params(&self) -> IasdParams {
        IasdParams {
            iters: self.iasd_iters,
            turbo_iters: self.turbo_iters,
            order: self.detection_order,
            hypothesis_cap: DEFAULT_HYPOTHESIS_CAP,
        }
    }
}

/// Codes, interleavers and slot layout shared by all packets of a run.
#[derive(Debug, Clone)]
pub struct PacketPlan {
    pub c_d: Arc<Constellation<f64>>,
    pub c_i: Arc<Constellation<f64>>,
    pub code_d: TurboCode,
    pub code_i: TurboCode,
    pub bit_il_d: Vec<Interleaver>,
    pub bit_il_i: Vec<Interleaver>,
    /// Slots per codeword.
    pub slots_per_codeword: usize,
}

fn interference_info_len(rate: CodeRate, coded_len: usize) -> usize {
    // Keep the coded length reachable: K + 8 <= L <= 3K + 8.
    let lo = (coded_len.saturating_sub(8) + 2) / 3;
    let hi = coded_len.saturating_sub(8);
    rate.info_len_for(coded_len).clamp(lo.max(1), hi.max(1))
}

impl PacketPlan {
    pub fn new(cfg: &SimConfig) -> Result<Self> {
        cfg.validate()?;
        let link = &cfg.link;
        let c_d = Arc::new(Constellation::new(link.mod_d));
        let c_i = Arc::new(Constellation::new(link.mod_i));
        let k = cfg.info_bits / cfg.codewords_per_packet;
        let per_slot_d = link.n_s * c_d.bits_per_symbol();
        let slots = cfg.rate_d.coded_len(k).div_ceil(per_slot_d);
        let seed = cfg.seed;
        let code_d = TurboCode::with_coded_len(k, slots * per_slot_d, seed ^ 0x5eed_0001)?;
        let len_i = slots * link.n_s * c_i.bits_per_symbol();
        let code_i = TurboCode::with_coded_len(interference_info_len(cfg.rate_i, len_i), len_i, seed ^ 0x5eed_0002)?;
        let bit_il_d = (0..cfg.codewords_per_packet)
            .map(|c| Interleaver::random(code_d.coded_len(), seed ^ (0x1000 + c as u64)))
            .collect();
        let bit_il_i = (0..cfg.codewords_per_packet)
            .map(|c| Interleaver::random(code_i.coded_len(), seed ^ (0x2000 + c as u64)))
            .collect();
        Ok(Self {
            c_d,
            c_i,
            code_d,
            code_i,
            bit_il_d,
            bit_il_i,
            slots_per_codeword: slots,
        })
    }

    pub fn total_slots(&self) -> usize {
        self.slots_per_codeword * self.bit_il_d.len()
    }

    fn slot_range(&self, cw: usize) -> std::ops::Range<usize> {
        cw * self.slots_per_codeword..(cw + 1) * self.slots_per_codeword
    }
}

fn random_bits<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<i8> {
    (0..n).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect()
}

/// Encodes, bit-interleaves and maps codewords onto per-slot symbol vectors.
fn map_codewords(
    messages: &[Vec<i8>],
    code: &TurboCode,
    interleavers: &[Interleaver],
    c: &Constellation<f64>,
    streams: usize,
) -> Result<Vec<CVec<f64>>> {
    let per_slot = streams * c.bits_per_symbol();
    let mut slots = Vec::new();
    for (msg, il) in messages.iter().zip(interleavers) {
        let tx = il.interleave(&code.encode(msg)?);
        for chunk in tx.chunks_exact(per_slot) {
            slots.push(c.modulate(chunk)?);
        }
    }
    Ok(slots)
}

/// Per-packet combining memory.
enum CombinerState {
    None,
    Blc(Vec<BlcState<f64>>),
    Sslc(Vec<SslcState<f64>>),
    Slcic(Vec<SlcIcState<f64>>),
}

/// Simulates one packet of up to `cfg.n` transmissions. Returns one flag
/// per transmission made; only the last can be `true`.
pub fn run_packet<R: Rng + ?Sized>(cfg: &SimConfig, plan: &PacketPlan, rng: &mut R) -> Result<Vec<bool>> {
    let link = &cfg.link;
    let ns = link.n_s;
    let n_cw = cfg.codewords_per_packet;
    let k_d = plan.code_d.info_len();
    let k_i = plan.code_i.info_len();
    let total_slots = plan.total_slots();
    let params = cfg.iasd_params();

    let truth: Vec<Vec<i8>> = (0..n_cw).map(|_| random_bits(k_d, rng)).collect();
    let x_d = map_codewords(&truth, &plan.code_d, &plan.bit_il_d, &plan.c_d, ns)?;

    let mut state = match cfg.scheme {
        Scheme::None => CombinerState::None,
        Scheme::Blc => CombinerState::Blc(vec![BlcState::new(plan.code_d.coded_len()); n_cw]),
        Scheme::Sslc => CombinerState::Sslc(vec![SslcState::new(); total_slots]),
        Scheme::Slcic => CombinerState::Slcic(vec![SlcIcState::new(ns); total_slots]),
    };
    let mut flags = Vec::with_capacity(cfg.n);

    for tx in 1..=cfg.n {
        let channels: Vec<(CMat<f64>, CMat<f64>)> = if cfg.independent_subcarriers {
            (0..cfg.subcarriers).map(|_| draw_channels(link, rng)).collect()
        } else {
            vec![draw_channels(link, rng); cfg.subcarriers]
        };
        let msg_i: Vec<Vec<i8>> = (0..n_cw).map(|_| random_bits(k_i, rng)).collect();
        let x_i = map_codewords(&msg_i, &plan.code_i, &plan.bit_il_i, &plan.c_i, ns)?;
        let records = (0..total_slots)
            .map(|s| {
                let (h_d, h_i) = &channels[s % cfg.subcarriers];
                transmit(tx, &x_d[s], &x_i[s], h_d, h_i, rng)
            })
            .collect::<Result<Vec<_>>>()?;

        let base = |rec: &TransmissionRecord<f64>| DetectorModel {
            y: rec.y.clone(),
            blocks: vec![
                Block::new(rec.h_d.clone(), plan.c_d.clone(), Signal::Desired),
                Block::new(rec.h_i.clone(), plan.c_i.clone(), Signal::Interference),
            ],
        };
        let mut models: Vec<DetectorModel<f64>> = match &state {
            CombinerState::Sslc(st) => records
                .iter()
                .zip(st)
                .map(|(rec, s)| sslc_stack(s, rec, &plan.c_d, &plan.c_i))
                .collect::<Result<_>>()?,
            CombinerState::Slcic(st) if tx > 1 => records
                .iter()
                .zip(st)
                .map(|(rec, s)| slcic_combined_model(s, rec, &plan.c_d, &plan.c_i))
                .collect::<Result<_>>()?,
            _ => records.iter().map(base).collect(),
        };

        let offsets: Option<&Vec<BlcState<f64>>> = match &state {
            CombinerState::Blc(acc) if tx > 1 => Some(acc),
            _ => None,
        };
        let mut maps: Vec<CodewordMap<'_, f64>> = (0..n_cw)
            .map(|c| CodewordMap {
                block: 0,
                slots: plan.slot_range(c),
                code: &plan.code_d,
                bit_interleaver: &plan.bit_il_d[c],
                channel_offset: offsets.map(|o| o[c].acc.as_slice()),
            })
            .collect();
        // Interference blocks: one per transmission when stacking, else one.
        let interference_blocks = models[0].blocks.len() - 1;
        for b in 1..=interference_blocks {
            for c in 0..n_cw {
                maps.push(CodewordMap {
                    block: b,
                    slots: plan.slot_range(c),
                    code: &plan.code_i,
                    bit_interleaver: &plan.bit_il_i[c],
                    channel_offset: None,
                });
            }
        }

        let decoded = |res: &[Option<CodewordResult<f64>>]| {
            truth
                .iter()
                .zip(res)
                .all(|(t, r)| r.as_ref().is_some_and(|r| &r.hard_bits == t))
        };
        let out = if cfg.early_stop {
            iasd_decode(&mut models, &maps, &params, Some(&decoded))?
        } else {
            iasd_decode(&mut models, &maps, &params, None)?
        };
        let success = decoded(&out.codewords);
        flags.push(success);
        if success {
            break;
        }
        if tx == cfg.n {
            break;
        }
        let n_maps = maps.len();
        drop(maps);

        match &mut state {
            CombinerState::None => {}
            CombinerState::Blc(acc) => {
                for (c, a) in acc.iter_mut().enumerate() {
                    let res = out.codewords[c].as_ref().expect("failed packets decode every codeword");
                    *a = blc_accumulate(std::mem::replace(a, BlcState::new(0)), &res.detector_extrinsic)?;
                }
            }
            CombinerState::Sslc(st) => {
                for (s, rec) in st.iter_mut().zip(records) {
                    s.push(rec)?;
                }
            }
            CombinerState::Slcic(st) => {
                let per_slot = ns * plan.c_i.bits_per_symbol();
                // The current transmission's interference sits in the last block.
                let first = n_maps - n_cw;
                for c in 0..n_cw {
                    let res = out.codewords[first + c].as_ref().expect("failed packets decode every codeword");
                    let tx_post = plan.bit_il_i[c].interleave(&res.decoder_posterior);
                    for (s, chunk) in plan.slot_range(c).zip(tx_post.chunks_exact(per_slot)) {
                        let post = LlrFrame::from_values(
                            Signal::Interference,
                            Stage::APosteriori,
                            Location::Decoder,
                            ns,
                            plan.c_i.bits_per_symbol(),
                            chunk.to_vec(),
                        )?;
                        let (y_t, h_t) = slcic_cancel_and_whiten(&records[s], &post, &plan.c_i)?;
                        st[s] = slcic_update(std::mem::replace(&mut st[s], SlcIcState::new(ns)), &y_t, &h_t)?;
                    }
                }
            }
        }
    }
    Ok(flags)
}

/// Worker count from `IASD_THREADS`, if set to a positive integer.
pub fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

fn packet_rng(seed: u64, packet: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(packet as u64))
}

/// Transmission index of success per packet (`None` if all `N` failed).
pub fn run_packets(cfg: &SimConfig, threads: Option<usize>) -> Result<Vec<Option<usize>>> {
    let plan = PacketPlan::new(cfg)?;
    let work = || {
        (0..cfg.packets)
            .into_par_iter()
            .map(|p| {
                let flags = run_packet(cfg, &plan, &mut packet_rng(cfg.seed, p))?;
                Ok(flags.iter().position(|&ok| ok).map(|i| i + 1))
            })
            .collect::<Result<Vec<_>>>()
    };
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    }
}

/// One point of a PER curve.
#[derive(Debug, Clone, PartialEq)]
pub struct PerRow {
    pub snr_db: f64,
    pub sir_db: f64,
    pub scheme: Scheme,
    pub tx_index: usize,
    pub packets: usize,
    pub failures: usize,
    pub per: f64,
}

pub const PER_CSV_HEADER: &str = "snr_db,sir_db,scheme,tx_index,packets,failures,per";
pub const THROUGHPUT_CSV_HEADER: &str = "snr_db,mcs,throughput";

fn check_grid(snr_grid: &[f64]) -> Result<()> {
    if snr_grid.is_empty() {
        return Err(Error::Config("SNR grid is empty".into()));
    }
    if snr_grid.iter().any(|s| !s.is_finite()) {
        return Err(Error::Config("SNR grid contains a non-finite value".into()));
    }
    Ok(())
}

/// PER after each transmission index, for every SNR of the grid.
pub fn run_per_experiment(cfg: &SimConfig, snr_grid: &[f64]) -> Result<Vec<PerRow>> {
    run_per_experiment_with(cfg, snr_grid, threads_from_env())
}

pub fn run_per_experiment_with(cfg: &SimConfig, snr_grid: &[f64], threads: Option<usize>) -> Result<Vec<PerRow>> {
    check_grid(snr_grid)?;
    let mut rows = Vec::new();
    for &snr_db in snr_grid {
        let mut point = cfg.clone();
        point.link.snr_db = snr_db;
        let outcomes = run_packets(&point, threads)?;
        for i in 1..=cfg.n {
            let failures = outcomes.iter().filter(|o| o.map_or(true, |s| s > i)).count();
            rows.push(PerRow {
                snr_db,
                sir_db: cfg.link.sir_db,
                scheme: cfg.scheme,
                tx_index: i,
                packets: cfg.packets,
                failures,
                per: failures as f64 / cfg.packets as f64,
            });
        }
    }
    Ok(rows)
}

pub fn write_per_csv<W: Write>(rows: &[PerRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{PER_CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.snr_db, r.sir_db, r.scheme, r.tx_index, r.packets, r.failures, r.per
        )?;
    }
    Ok(())
}

/// Modulation and code rate applied to both users.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mcs {
    pub modulation: Modulation,
    pub rate: CodeRate,
}

impl Mcs {
    pub fn label(&self) -> String {
        format!("qam{}_r{:.2}", self.modulation.order(), self.rate.nominal())
    }
}

pub fn default_mcs_list() -> Vec<Mcs> {
    let mut v = Vec::new();
    for modulation in [Modulation::Qam4, Modulation::Qam16] {
        for rate in [CodeRate::Third, CodeRate::Half] {
            v.push(Mcs { modulation, rate });
        }
    }
    v
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThroughputRow {
    pub snr_db: f64,
    pub mcs: String,
    pub throughput: f64,
}

/// Information bits per slot delivered, as a renewal-reward ratio:
/// `R N_m N_s P(success within N) / E[transmissions used]`.
pub fn throughput(outcomes: &[Option<usize>], n: usize, rate: f64, bits_per_slot: usize) -> f64 {
    if outcomes.is_empty() {
        return 0.0;
    }
    let successes = outcomes.iter().filter(|o| o.is_some()).count() as f64;
    let used: usize = outcomes.iter().map(|o| o.unwrap_or(n)).sum();
    let p = successes / outcomes.len() as f64;
    let mean_used = used as f64 / outcomes.len() as f64;
    rate * bits_per_slot as f64 * p / mean_used
}

pub fn run_throughput_experiment(cfg: &SimConfig, snr_grid: &[f64], mcs: &[Mcs]) -> Result<Vec<ThroughputRow>> {
    run_throughput_experiment_with(cfg, snr_grid, mcs, threads_from_env())
}

pub fn run_throughput_experiment_with(
    cfg: &SimConfig,
    snr_grid: &[f64],
    mcs: &[Mcs],
    threads: Option<usize>,
) -> Result<Vec<ThroughputRow>> {
    check_grid(snr_grid)?;
    let mut rows = Vec::new();
    for &snr_db in snr_grid {
        for m in mcs {
            let mut point = cfg.clone();
            point.link.snr_db = snr_db;
            point.link.mod_d = m.modulation;
            point.link.mod_i = m.modulation;
            point.rate_d = m.rate;
            point.rate_i = m.rate;
            let outcomes = run_packets(&point, threads)?;
            let bits = point.link.n_s * m.modulation.bits_per_symbol();
            rows.push(ThroughputRow {
                snr_db,
                mcs: m.label(),
                throughput: throughput(&outcomes, cfg.n, m.rate.value(), bits),
            });
        }
    }
    Ok(rows)
}

pub fn write_throughput_csv<W: Write>(rows: &[ThroughputRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{THROUGHPUT_CSV_HEADER}")?;
    for r in rows {
        writeln!(out, "{},{},{}", r.snr_db, r.mcs, r.throughput)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(scheme: Scheme) -> SimConfig {
        SimConfig {
            scheme,
            packets: 4,
            n: 2,
            info_bits: 80,
            iasd_iters: 2,
            turbo_iters: 4,
            ..SimConfig::default()
        }
    }

    #[test]
    fn defaults_follow_the_packet_layout() {
        let cfg = SimConfig::default();
        assert_eq!((cfg.subcarriers, cfg.codewords_per_packet, cfg.info_bits), (10, 2, 400));
        let plan = PacketPlan::new(&cfg).unwrap();
        assert_eq!(plan.code_d.coded_len(), 600);
        assert_eq!(plan.slots_per_codeword, 150);
        assert_eq!(plan.code_i.coded_len(), 600);
        assert_eq!(plan.code_i.info_len(), 200);
    }

    #[test]
    fn mixed_modulations_share_slots() {
        let mut cfg = SimConfig::default();
        cfg.link.mod_i = Modulation::Qam16;
        cfg.rate_i = CodeRate::Half;
        let plan = PacketPlan::new(&cfg).unwrap();
        assert_eq!(plan.code_i.coded_len(), 150 * 2 * 4);
        assert_eq!(plan.code_i.info_len(), 600);
    }

    #[test]
    fn parses_named_fields() {
        let cfg = SimConfig::from_json_str(
            r#"{"link": {"N_t": 2, "N_r": 2, "N_s": 2, "snr_db": 5, "sir_db": 0, "mod_D": 4, "mod_I": 16},
                "scheme": "slcic", "rate_D": 0.33, "rate_I": 0.5, "N": 4, "packets": 10,
                "subcarriers": 10, "codewords_per_packet": 2, "iasd_iters": 4, "turbo_iters": 8, "seed": 3}"#,
        )
        .unwrap();
        assert_eq!(cfg.scheme, Scheme::Slcic);
        assert_eq!(cfg.rate_i, CodeRate::Half);
        assert_eq!(cfg.link.mod_i, Modulation::Qam16);
    }

    #[test]
    fn rejects_bad_configs() {
        for text in [
            r#"{"N": 9}"#,
            r#"{"packets": 0}"#,
            r#"{"rate_D": 0.7}"#,
            r#"{"scheme": "mrc"}"#,
            r#"{"unknown": 1}"#,
            r#"{"link": {"N_t": 3}}"#,
            "{",
        ] {
            assert!(matches!(SimConfig::from_json_str(text), Err(Error::Config(_))), "{text}");
        }
    }

    #[test]
    fn high_snr_succeeds_first_time() {
        let mut cfg = small(Scheme::None);
        cfg.link.snr_db = 30.0;
        let plan = PacketPlan::new(&cfg).unwrap();
        for p in 0..4 {
            assert_eq!(run_packet(&cfg, &plan, &mut packet_rng(9, p)).unwrap(), vec![true]);
        }
    }

    #[test]
    fn single_transmission_ignores_scheme() {
        let mut flags = Vec::new();
        for scheme in [Scheme::None, Scheme::Blc, Scheme::Sslc, Scheme::Slcic] {
            let mut cfg = small(scheme);
            cfg.n = 1;
            cfg.link.snr_db = 2.0;
            flags.push(run_packets(&cfg, Some(1)).unwrap());
        }
        assert!(flags.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn all_schemes_run_two_rounds() {
        for scheme in [Scheme::None, Scheme::Blc, Scheme::Sslc, Scheme::Slcic] {
            let mut cfg = small(scheme);
            cfg.link.snr_db = -10.0;
            let rows = run_per_experiment_with(&cfg, &[-10.0], Some(1)).unwrap();
            assert_eq!(rows.len(), 2);
            assert!(rows.iter().all(|r| r.per == 1.0), "{scheme}");
        }
    }

    #[test]
    fn per_rows_are_monotone_and_csv_formatted() {
        let cfg = small(Scheme::Blc);
        let rows = run_per_experiment_with(&cfg, &[4.0], Some(1)).unwrap();
        assert!(rows[1].failures <= rows[0].failures);
        let mut buf = Vec::new();
        write_per_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("snr_db,sir_db,scheme,tx_index,packets,failures,per\n4,0,blc,1,4,"));
    }

    #[test]
    fn empty_grid_is_rejected() {
        assert!(run_per_experiment_with(&small(Scheme::None), &[], Some(1)).is_err());
    }

    #[test]
    fn throughput_limits() {
        assert_eq!(throughput(&[Some(1); 10], 4, 1.0 / 3.0, 4), 4.0 / 3.0);
        assert_eq!(throughput(&[None; 10], 4, 0.5, 4), 0.0);
        assert_eq!(throughput(&[Some(2), None], 4, 0.5, 4), 0.5 * 4.0 * 0.5 / 3.0);
    }

    #[test]
    fn mcs_labels() {
        let labels: Vec<String> = default_mcs_list().iter().map(Mcs::label).collect();
        assert_eq!(labels, ["qam4_r0.33", "qam4_r0.50", "qam16_r0.33", "qam16_r0.50"]);
    }
}
