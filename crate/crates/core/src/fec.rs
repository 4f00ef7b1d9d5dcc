//! Parallel-concatenated turbo code built from two 4-state recursive
//! systematic convolutional encoders (feedforward 7, feedback 5, octal),
//! decoded with max-log BCJR.
//!
//! # Codeword layout
//!
//! The mother codeword of `K` information bits holds `K` systematic bits,
//! four tail bits per constituent (`u, p, u, p` for the two termination
//! steps), and a pool of `2K` parity bits ordered so that time step `t`
//! contributes `(p1[t], p2[t])` when `t` is even and `(p2[t], p1[t])` when
//! `t` is odd.
//!
//! A code with coded length `L` transmits, in order: the `K` systematic
//! bits, the 8 tail bits, and `B = L - K - 8` parity bits picked from the
//! pool at positions `floor(j * 2K / B)` for `j = 0..B`. Systematic and tail
//! bits are never punctured. With the pool ordering above, rate 1/2 reduces
//! to the classic alternating `p1, p2, p1, ...` pattern, rate 5/6 keeps one
//! parity bit every `~2K/B` pool slots, and rate 1/3 drops only as many
//! parity bits as needed to make room for the tails.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

const MEMORY: usize = 2;
const STATES: usize = 1 << MEMORY;
const TAIL_BITS_PER_RSC: usize = 2 * MEMORY;
const TAIL_BITS: usize = 2 * TAIL_BITS_PER_RSC;

/// Nominal code rates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub enum CodeRate {
    /// 1/3, written 0.33.
    Third,
    /// 1/2, written 0.50.
    Half,
    /// 5/6, written 0.83.
    FiveSixths,
}

impl CodeRate {
    pub const ALL: [CodeRate; 3] = [CodeRate::Third, CodeRate::Half, CodeRate::FiveSixths];

    /// The exact fraction `(numerator, denominator)`.
    pub fn fraction(self) -> (usize, usize) {
        match self {
            CodeRate::Third => (1, 3),
            CodeRate::Half => (1, 2),
            CodeRate::FiveSixths => (5, 6),
        }
    }

    pub fn value(self) -> f64 {
        let (n, d) = self.fraction();
        n as f64 / d as f64
    }

    /// Two-decimal label used in configs and CSV output.
    pub fn nominal(self) -> f64 {
        match self {
            CodeRate::Third => 0.33,
            CodeRate::Half => 0.50,
            CodeRate::FiveSixths => 0.83,
        }
    }

    /// `round(K / R)` with the exact fraction.
    pub fn coded_len(self, k: usize) -> usize {
        let (n, d) = self.fraction();
        (2 * k * d + n) / (2 * n)
    }

    /// Information length that fits `coded_len` coded bits at this rate.
    pub fn info_len_for(self, coded_len: usize) -> usize {
        let (n, d) = self.fraction();
        (2 * coded_len * n + d) / (2 * d)
    }
}

impl TryFrom<f64> for CodeRate {
    type Error = Error;
    fn try_from(x: f64) -> Result<Self> {
        CodeRate::ALL
            .into_iter()
            .find(|r| (r.nominal() - x).abs() < 0.01 || (r.value() - x).abs() < 1e-9)
            .ok_or(Error::InvalidRate(x))
    }
}

impl From<CodeRate> for f64 {
    fn from(r: CodeRate) -> f64 {
        r.nominal()
    }
}

impl std::fmt::Display for CodeRate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:.2}", self.nominal())
    }
}

/// A permutation of `0..len`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interleaver {
    perm: Vec<usize>,
    inverse: Vec<usize>,
}

impl Interleaver {
    /// Uniformly random permutation drawn from `seed`.
    pub fn random(len: usize, seed: u64) -> Self {
        let mut perm: Vec<usize> = (0..len).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        Self::from_permutation(perm).expect("shuffle yields a permutation")
    }

    pub fn identity(len: usize) -> Self {
        Self::from_permutation((0..len).collect()).expect("identity is a permutation")
    }

    pub fn from_permutation(perm: Vec<usize>) -> Result<Self> {
        let mut inverse = vec![usize::MAX; perm.len()];
        for (i, &p) in perm.iter().enumerate() {
            if p >= perm.len() || inverse[p] != usize::MAX {
                return Err(Error::InvalidCode(format!("not a permutation at index {i}")));
            }
            inverse[p] = i;
        }
        Ok(Self { perm, inverse })
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    /// `out[i] = input[perm[i]]`.
    pub fn interleave<X: Copy>(&self, input: &[X]) -> Vec<X> {
        debug_assert_eq!(input.len(), self.len());
        self.perm.iter().map(|&p| input[p]).collect()
    }

    /// Inverse of [`Interleaver::interleave`].
    pub fn deinterleave<X: Copy>(&self, input: &[X]) -> Vec<X> {
        debug_assert_eq!(input.len(), self.len());
        self.inverse.iter().map(|&i| input[i]).collect()
    }
}

/// Precomputed 4-state trellis for feedback 1 + D^2 and feedforward 1 + D + D^2.
struct Trellis {
    /// `next[s][u]` for binary input `u`.
    next: [[usize; 2]; STATES],
    /// Binary parity output for `(s, u)`.
    parity: [[u8; 2]; STATES],
}

const TRELLIS: Trellis = build_trellis();

const fn build_trellis() -> Trellis {
    let mut next = [[0usize; 2]; STATES];
    let mut parity = [[0u8; 2]; STATES];
    let mut s = 0;
    while s < STATES {
        let s1 = (s >> 1) & 1;
        let s2 = s & 1;
        let mut u = 0;
        while u < 2 {
            let a = u ^ s2;
            next[s][u] = (a << 1) | s1;
            parity[s][u] = (a ^ s1 ^ s2) as u8;
            u += 1;
        }
        s += 1;
    }
    Trellis { next, parity }
}

/// Input bit that drives the register towards zero.
#[inline]
fn termination_input(state: usize) -> usize {
    state & 1
}

/// Encodes binary `bits`; returns the `K` parity bits and the termination
/// sequence `[u, p, u, p]`.
fn rsc_encode(bits: &[u8]) -> (Vec<u8>, [u8; TAIL_BITS_PER_RSC]) {
    let mut state = 0;
    let mut parity = Vec::with_capacity(bits.len());
    for &b in bits {
        let u = b as usize;
        parity.push(TRELLIS.parity[state][u]);
        state = TRELLIS.next[state][u];
    }
    let mut tail = [0u8; TAIL_BITS_PER_RSC];
    for step in 0..MEMORY {
        let u = termination_input(state);
        tail[2 * step] = u as u8;
        tail[2 * step + 1] = TRELLIS.parity[state][u];
        state = TRELLIS.next[state][u];
    }
    debug_assert_eq!(state, 0);
    (parity, tail)
}

#[inline]
fn bipolar_to_binary(b: i8) -> u8 {
    u8::from(b < 0)
}

#[inline]
fn binary_to_bipolar(b: u8) -> i8 {
    if b == 0 {
        1
    } else {
        -1
    }
}

/// Output of [`TurboCode::decode`].
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeOutput<T> {
    /// Information-bit posterior LLRs.
    pub posterior: Vec<T>,
    /// Information-bit extrinsic LLRs (`posterior - channel - a_priori`).
    pub extrinsic: Vec<T>,
    pub hard_bits: Vec<i8>,
    /// Posterior LLRs of every transmitted coded bit.
    pub coded_posterior: Vec<T>,
    /// `coded_posterior` minus the channel LLRs fed in.
    pub coded_extrinsic: Vec<T>,
}

/// A rate-matched turbo code with a fixed internal interleaver.
#[derive(Debug, Clone, PartialEq)]
pub struct TurboCode {
    k: usize,
    coded_len: usize,
    interleaver: Interleaver,
    /// Sorted pool indices of the transmitted parity bits.
    kept_parity: Vec<usize>,
}

impl TurboCode {
    /// Code with `K` information bits and `round(K / rate)` coded bits.
    pub fn new(k: usize, rate: CodeRate, interleaver_seed: u64) -> Result<Self> {
        Self::with_coded_len(k, rate.coded_len(k), interleaver_seed)
    }

    /// Code with an explicit coded length in `[K + 8, 3K + 8]`.
    pub fn with_coded_len(k: usize, coded_len: usize, interleaver_seed: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidCode("empty information block".into()));
        }
        if coded_len < k + TAIL_BITS || coded_len > 3 * k + TAIL_BITS {
            return Err(Error::InvalidCode(format!(
                "coded length {coded_len} outside [{}, {}] for K = {k}",
                k + TAIL_BITS,
                3 * k + TAIL_BITS
            )));
        }
        let pool = 2 * k;
        let budget = coded_len - k - TAIL_BITS;
        let kept_parity = (0..budget).map(|j| j * pool / budget).collect();
        Ok(Self {
            k,
            coded_len,
            interleaver: Interleaver::random(k, interleaver_seed),
            kept_parity,
        })
    }

    pub fn info_len(&self) -> usize {
        self.k
    }

    pub fn coded_len(&self) -> usize {
        self.coded_len
    }

    pub fn interleaver(&self) -> &Interleaver {
        &self.interleaver
    }

    /// Maps a parity-pool index to `(encoder, time)`.
    #[inline]
    fn pool_slot(j: usize) -> (usize, usize) {
        let t = j / 2;
        let r = j % 2;
        let enc = if t % 2 == 0 { r } else { 1 - r };
        (enc, t)
    }

    /// Encodes `K` bipolar bits into `L` bipolar coded bits.
    pub fn encode(&self, bits: &[i8]) -> Result<Vec<i8>> {
        if bits.len() != self.k {
            return Err(Error::LengthMismatch {
                expected: self.k,
                actual: bits.len(),
            });
        }
        let binary: Vec<u8> = bits.iter().map(|&b| bipolar_to_binary(b)).collect();
        let (p1, t1) = rsc_encode(&binary);
        let (p2, t2) = rsc_encode(&self.interleaver.interleave(&binary));

        let mut out = Vec::with_capacity(self.coded_len);
        out.extend(bits.iter().copied());
        out.extend(t1.iter().chain(&t2).map(|&b| binary_to_bipolar(b)));
        for &j in &self.kept_parity {
            let (enc, t) = Self::pool_slot(j);
            let p = if enc == 0 { p1[t] } else { p2[t] };
            out.push(binary_to_bipolar(p));
        }
        debug_assert_eq!(out.len(), self.coded_len);
        Ok(out)
    }

    /// Spreads transmitted LLRs back onto the mother code; punctured parity
    /// positions get LLR 0.
    pub fn depuncture<T: Real>(&self, llrs: &[T]) -> Result<Depunctured<T>> {
        if llrs.len() != self.coded_len {
            return Err(Error::LengthMismatch {
                expected: self.coded_len,
                actual: llrs.len(),
            });
        }
        let k = self.k;
        let mut d = Depunctured {
            sys: llrs[..k].to_vec(),
            tail: [
                llrs[k..k + TAIL_BITS_PER_RSC].to_vec(),
                llrs[k + TAIL_BITS_PER_RSC..k + TAIL_BITS].to_vec(),
            ],
            parity: [vec![T::zero(); k], vec![T::zero(); k]],
            known: [vec![false; k], vec![false; k]],
        };
        for (&j, &l) in self.kept_parity.iter().zip(&llrs[k + TAIL_BITS..]) {
            let (enc, t) = Self::pool_slot(j);
            d.parity[enc][t] = l;
            d.known[enc][t] = true;
        }
        Ok(d)
    }

    /// Max-log BCJR turbo decoding.
    ///
    /// `llrs` are channel LLRs of the `L` transmitted bits, `a_priori` holds
    /// `K` information-bit LLRs (or is empty for none).
    pub fn decode<T: Real>(&self, llrs: &[T], a_priori: &[T], iters: usize) -> Result<DecodeOutput<T>> {
        let k = self.k;
        if !a_priori.is_empty() && a_priori.len() != k {
            return Err(Error::LengthMismatch {
                expected: k,
                actual: a_priori.len(),
            });
        }
        let d = self.depuncture(llrs)?;
        let apriori: Vec<T> = if a_priori.is_empty() {
            vec![T::zero(); k]
        } else {
            a_priori.to_vec()
        };

        let tail_sys = |t: &[T]| [t[0], t[2]];
        let tail_par = |t: &[T]| [t[1], t[3]];

        let mut sys1 = d.sys.clone();
        sys1.extend(tail_sys(&d.tail[0]));
        let mut par1 = d.parity[0].clone();
        par1.extend(tail_par(&d.tail[0]));
        let mut sys2 = self.interleaver.interleave(&d.sys);
        sys2.extend(tail_sys(&d.tail[1]));
        let mut par2 = d.parity[1].clone();
        par2.extend(tail_par(&d.tail[1]));

        let mut ext2 = vec![T::zero(); k];
        let mut ext1 = vec![T::zero(); k];
        let mut run1 = BcjrOutput::default();
        let mut run2 = BcjrOutput::default();
        for _ in 0..iters.max(1) {
            let la1: Vec<T> = apriori.iter().zip(&ext2).map(|(&a, &e)| a + e).collect();
            run1 = bcjr_maxlog(&sys1, &la1, &par1);
            for t in 0..k {
                ext1[t] = run1.app_u[t] - d.sys[t] - la1[t];
            }
            let la2_nat: Vec<T> = apriori.iter().zip(&ext1).map(|(&a, &e)| a + e).collect();
            let la2 = self.interleaver.interleave(&la2_nat);
            run2 = bcjr_maxlog(&sys2, &la2, &par2);
            let e2: Vec<T> = (0..k).map(|t| run2.app_u[t] - sys2[t] - la2[t]).collect();
            ext2 = self.interleaver.deinterleave(&e2);
        }

        let extrinsic: Vec<T> = ext1.iter().zip(&ext2).map(|(&a, &b)| a + b).collect();
        let posterior: Vec<T> = (0..k).map(|t| d.sys[t] + apriori[t] + extrinsic[t]).collect();
        let hard_bits = posterior.iter().map(|&l| if l >= T::zero() { 1 } else { -1 }).collect();

        let mut coded_posterior = Vec::with_capacity(self.coded_len);
        coded_posterior.extend_from_slice(&posterior);
        for run in [&run1, &run2] {
            for step in 0..MEMORY {
                coded_posterior.push(run.app_u[k + step]);
                coded_posterior.push(run.app_p[k + step]);
            }
        }
        for &j in &self.kept_parity {
            let (enc, t) = Self::pool_slot(j);
            let run = if enc == 0 { &run1 } else { &run2 };
            coded_posterior.push(run.app_p[t]);
        }
        let coded_extrinsic = coded_posterior.iter().zip(llrs).map(|(&p, &c)| p - c).collect();

        Ok(DecodeOutput {
            posterior,
            extrinsic,
            hard_bits,
            coded_posterior,
            coded_extrinsic,
        })
    }
}

/// Channel LLRs laid out on the unpunctured mother code.
#[derive(Debug, Clone, PartialEq)]
pub struct Depunctured<T> {
    pub sys: Vec<T>,
    /// Per constituent: `[u, p, u, p]` termination LLRs.
    pub tail: [Vec<T>; 2],
    pub parity: [Vec<T>; 2],
    /// Whether each parity bit was transmitted.
    pub known: [Vec<bool>; 2],
}

#[derive(Debug, Clone, Default)]
struct BcjrOutput<T> {
    /// A-posteriori LLRs of the input bits, including termination steps.
    app_u: Vec<T>,
    /// A-posteriori LLRs of the parity bits, including termination steps.
    app_p: Vec<T>,
}

/// Max-log BCJR over a terminated trellis. `sys` and `par` cover all
/// `K + 2` steps; `apr` covers the first `K`.
fn bcjr_maxlog<T: Real>(sys: &[T], apr: &[T], par: &[T]) -> BcjrOutput<T> {
    let steps = sys.len();
    let ninf = T::neg_infinity();
    let half = T::lit(0.5);

    // gamma[t][u][p] with bipolar u, p: index 0 <-> +1, 1 <-> -1.
    let gamma = |t: usize, u: usize, p: u8| -> T {
        let lu = sys[t] + if t < apr.len() { apr[t] } else { T::zero() };
        let su = if u == 0 { lu } else { -lu };
        let sp = if p == 0 { par[t] } else { -par[t] };
        half * (su + sp)
    };

    let mut alpha = vec![[ninf; STATES]; steps + 1];
    alpha[0][0] = T::zero();
    for t in 0..steps {
        let mut next = [ninf; STATES];
        for s in 0..STATES {
            let a = alpha[t][s];
            if a == ninf {
                continue;
            }
            for u in 0..2 {
                let ns = TRELLIS.next[s][u];
                let m = a + gamma(t, u, TRELLIS.parity[s][u]);
                if m > next[ns] {
                    next[ns] = m;
                }
            }
        }
        let norm = next.iter().copied().fold(ninf, T::max);
        for v in next.iter_mut() {
            *v -= norm;
        }
        alpha[t + 1] = next;
    }

    let mut beta = [ninf; STATES];
    beta[0] = T::zero();
    let mut app_u = vec![T::zero(); steps];
    let mut app_p = vec![T::zero(); steps];
    for t in (0..steps).rev() {
        let mut best_u = [ninf; 2];
        let mut best_p = [ninf; 2];
        let mut prev = [ninf; STATES];
        for s in 0..STATES {
            for u in 0..2 {
                let ns = TRELLIS.next[s][u];
                let p = TRELLIS.parity[s][u];
                let g = gamma(t, u, p);
                let b = g + beta[ns];
                if b > prev[s] {
                    prev[s] = b;
                }
                let full = alpha[t][s] + b;
                if full > best_u[u] {
                    best_u[u] = full;
                }
                if full > best_p[p as usize] {
                    best_p[p as usize] = full;
                }
            }
        }
        app_u[t] = best_u[0] - best_u[1];
        app_p[t] = best_p[0] - best_p[1];
        let norm = prev.iter().copied().fold(ninf, T::max);
        for v in prev.iter_mut() {
            *v -= norm;
        }
        beta = prev;
    }
    BcjrOutput { app_u, app_p }
}
