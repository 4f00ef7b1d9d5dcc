//! The joint detector against a direct enumeration written from the metric
//! definition.

use std::sync::Arc;

use iasd_core::detector::{joint_maxlog_all, joint_maxlog_llrs, Block, DetectorModel, Signal, DEFAULT_HYPOTHESIS_CAP};
use iasd_core::linalg::{CMat, CVec};
use iasd_core::modem::{Constellation, Modulation};
use iasd_core::Error;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rc(rng: &mut ChaCha8Rng) -> Complex<f64> {
    Complex::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5))
}

fn model(rng: &mut ChaCha8Rng, mod_d: Modulation, mod_i: Modulation) -> DetectorModel<f64> {
    let mut blocks = Vec::new();
    for (m, sig) in [(mod_d, Signal::Desired), (mod_i, Signal::Interference)] {
        let mut b = Block::new(CMat::from_fn(2, 2, |_, _| rc(rng)), Arc::new(Constellation::new(m)), sig);
        for v in b.prior.values_mut() {
            *v = rng.gen_range(-4.0..4.0);
        }
        blocks.push(b);
    }
    DetectorModel { y: CVec((0..2).map(|_| rc(rng) * 2.0).collect()), blocks }
}

/// Max-log LLRs of block `target` by nested loops over all four symbols.
fn brute_force(m: &DetectorModel<f64>, target: usize) -> Vec<f64> {
    let (d, i) = (&m.blocks[0], &m.blocks[1]);
    let (cd, ci) = (&d.constellation, &i.constellation);
    let bits = |c: &Constellation<f64>, k: usize| c.label(k).to_vec();
    let tb = m.blocks[target].constellation.bits_per_symbol();
    let mut plus = vec![f64::NEG_INFINITY; 2 * tb];
    let mut minus = vec![f64::NEG_INFINITY; 2 * tb];
    for d0 in 0..cd.order() {
        for d1 in 0..cd.order() {
            for i0 in 0..ci.order() {
                for i1 in 0..ci.order() {
                    let xd = [cd.point(d0), cd.point(d1)];
                    let xi = [ci.point(i0), ci.point(i1)];
                    let mut dist = 0.0;
                    for r in 0..2 {
                        let mut e = m.y[r];
                        for n in 0..2 {
                            e -= d.channel[(r, n)] * xd[n] + i.channel[(r, n)] * xi[n];
                        }
                        dist += e.norm_sqr();
                    }
                    let mut prior = 0.0;
                    let labels = [bits(cd, d0), bits(cd, d1), bits(ci, i0), bits(ci, i1)];
                    let llrs = [d.prior.values(), i.prior.values()];
                    for (s, lab) in labels.iter().enumerate() {
                        let (blk, n) = (s / 2, s % 2);
                        let nm = lab.len();
                        for (b, &v) in lab.iter().enumerate() {
                            prior += 0.5 * v as f64 * llrs[blk][n * nm + b];
                        }
                    }
                    let metric = prior - dist;
                    for n in 0..2 {
                        let lab = &labels[2 * target + n];
                        for (b, &v) in lab.iter().enumerate() {
                            let slot = if v > 0 { &mut plus[n * tb + b] } else { &mut minus[n * tb + b] };
                            *slot = slot.max(metric);
                        }
                    }
                }
            }
        }
    }
    plus.iter().zip(&minus).map(|(p, q)| p - q).collect()
}

#[test]
fn matches_enumeration_for_qam4() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let m = model(&mut rng, Modulation::Qam4, Modulation::Qam4);
        for target in 0..2 {
            let got = joint_maxlog_llrs(&m, target, DEFAULT_HYPOTHESIS_CAP).unwrap();
            for (a, b) in got.values().iter().zip(brute_force(&m, target)) {
                assert!((a - b).abs() < 1e-9, "{a} vs {b}");
            }
        }
    }
}

#[test]
fn matches_enumeration_for_mixed_orders() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..10 {
        let m = model(&mut rng, Modulation::Qam16, Modulation::Qam4);
        let all = joint_maxlog_all(&m, DEFAULT_HYPOTHESIS_CAP).unwrap();
        for (target, frame) in all.iter().enumerate() {
            for (a, b) in frame.values().iter().zip(brute_force(&m, target)) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn cap_is_enforced() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let m = model(&mut rng, Modulation::Qam16, Modulation::Qam16);
    assert!(matches!(joint_maxlog_llrs(&m, 0, 1000), Err(Error::HypothesisCapExceeded { .. })));
}

#[test]
fn non_finite_input_is_rejected() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let mut m = model(&mut rng, Modulation::Qam4, Modulation::Qam4);
    m.y[0] = Complex::new(f64::NAN, 0.0);
    assert!(joint_maxlog_llrs(&m, 0, DEFAULT_HYPOTHESIS_CAP).is_err());
}
