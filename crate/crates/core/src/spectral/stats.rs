//! Time-averaged mode correlators with block-jackknife standard errors.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::FourierField;
#[cfg(test)]
use super::{bare_from_renormalized, ModeTransformer};
use crate::error::{FpuError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct RealEstimate {
    pub mean: f64,
    pub se: f64,
}

impl RealEstimate {
    /// `|mean - target| <= z se`.
    pub fn within(&self, target: f64, z: f64) -> bool {
        (self.mean - target).abs() <= z * self.se
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct ComplexEstimate {
    pub mean: Complex64,
    /// Standard error of the modulus test, `sqrt(se_re^2 + se_im^2)`.
    pub se: f64,
}

impl ComplexEstimate {
    pub fn consistent_with_zero(&self, z: f64) -> bool {
        self.mean.norm() <= z * self.se
    }
}

const PER_K: usize = 12;
// layout of the per-k accumulator: raw Fourier moments
const P2: usize = 0; // |P_k|^2
const Q2: usize = 1; // |Q_k|^2
const PQC: usize = 2; // P_k Q_k^*
const PPR: usize = 4; // P_k P_{N-k}
const QQR: usize = 6; // Q_k Q_{N-k}
const PQR: usize = 8; // P_k Q_{N-k}
const QPR: usize = 10; // Q_k P_{N-k}

/// Streaming accumulator over equilibrium snapshots. Samples are grouped into
/// consecutive blocks of `block_len`; a trailing partial block is ignored.
///
/// Only raw Fourier moments are stored, so wave correlators can be evaluated
/// afterwards for any renormalization factor.
#[derive(Debug)]
pub struct ModeStatistics {
    n: usize,
    eta: f64,
    block_len: usize,
    current: Vec<f64>,
    in_block: usize,
    blocks: Vec<Vec<f64>>,
}

/// Jackknife summary of the correlators, indexed by wave number (slot 0 unused).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeStatsReport {
    pub n: usize,
    pub eta: f64,
    pub blocks: usize,
    pub block_len: usize,
    /// `<|a~_k|^2>`
    pub n_tilde: Vec<RealEstimate>,
    /// `<|a_k|^2>` for the bare waves
    pub n_bare: Vec<RealEstimate>,
    /// `<a~_k a~_{N-k}>`
    pub pair_renormalized: Vec<ComplexEstimate>,
    /// `<a_k a_{N-k}>` for the bare waves
    pub pair_bare: Vec<ComplexEstimate>,
    /// `<P_k P_{N-k}>`
    pub pp: Vec<RealEstimate>,
    /// `<Q_k Q_{N-k}>`
    pub qq: Vec<RealEstimate>,
    /// `<P_k Q_{N-k}>`
    pub pq: Vec<ComplexEstimate>,
    /// Kinetic temperature `sum_k |P_k|^2 / (N - 1)`.
    pub theta_kinetic: RealEstimate,
}

// derived layout: n_ren, n_bare, pair_ren (2), pair_bare (2), pp, qq, pq (2)
const D_PER_K: usize = 10;

fn wave_moments(raw: &[f64], w: f64) -> (f64, Complex64) {
    let i = Complex64::i();
    let c = |o: usize| Complex64::new(raw[o], raw[o + 1]);
    let n = (raw[P2] + w * w * raw[Q2] - 2.0 * w * raw[PQC + 1]) / (2.0 * w);
    let pair = (c(PPR) - w * w * c(QQR) - i * w * (c(PQR) + c(QPR))) / (2.0 * w);
    (n, pair)
}

impl ModeStatistics {
    pub fn new(n: usize, eta: f64, block_len: usize) -> Result<Self> {
        if block_len == 0 || !(eta > 0.0) {
            return Err(FpuError::InvalidParameter("block_len >= 1 and eta > 0 required".into()));
        }
        Ok(Self { n, eta, block_len, current: vec![0.0; PER_K * n + 1], in_block: 0, blocks: Vec::new() })
    }

    pub fn push(&mut self, f: &FourierField) -> Result<()> {
        let n = self.n;
        if f.len() != n {
            return Err(FpuError::LengthMismatch { expected: n, got: f.len() });
        }
        let mut ke = 0.0;
        for k in 1..n {
            let r = n - k;
            let acc = &mut self.current[PER_K * k..PER_K * (k + 1)];
            let (pk, qk) = (f.pk[k], f.qk[k]);
            let mut add = |o: usize, z: Complex64| {
                acc[o] += z.re;
                acc[o + 1] += z.im;
            };
            add(PQC, pk * qk.conj());
            add(PPR, pk * f.pk[r]);
            add(QQR, qk * f.qk[r]);
            add(PQR, pk * f.qk[r]);
            add(QPR, qk * f.pk[r]);
            acc[P2] += pk.norm_sqr();
            acc[Q2] += qk.norm_sqr();
            ke += pk.norm_sqr();
        }
        self.current[PER_K * n] += ke / (n - 1) as f64;
        self.in_block += 1;
        if self.in_block == self.block_len {
            let s = 1.0 / self.block_len as f64;
            let block = self.current.iter().map(|x| x * s).collect();
            self.blocks.push(block);
            self.current.iter_mut().for_each(|x| *x = 0.0);
            self.in_block = 0;
        }
        Ok(())
    }

    pub fn complete_blocks(&self) -> usize {
        self.blocks.len()
    }

    fn check_blocks(&self) -> Result<usize> {
        let b = self.blocks.len();
        if b < 2 {
            return Err(FpuError::InsufficientSamples { needed: 2 * self.block_len, got: b * self.block_len });
        }
        Ok(b)
    }

    /// Renormalization factor of the sampled run,
    /// `sqrt(sum_k <|P_k|^2> / sum_k w_k^2 <|Q_k|^2>)`, with a jackknife error.
    pub fn measured_eta(&self) -> Result<RealEstimate> {
        let b = self.check_blocks()?;
        let omega = super::linear_dispersion(self.n);
        let sums = |blk: &[f64]| {
            (1..self.n).fold((0.0, 0.0), |(p, q), k| (p + blk[PER_K * k + P2], q + omega[k] * omega[k] * blk[PER_K * k + Q2]))
        };
        let parts: Vec<(f64, f64)> = self.blocks.iter().map(|blk| sums(blk)).collect();
        let (tp, tq) = parts.iter().fold((0.0, 0.0), |(a, c), (p, q)| (a + p, c + q));
        let full = (tp / tq).sqrt();
        let loo: Vec<f64> = parts.iter().map(|(p, q)| ((tp - p) / (tq - q)).sqrt()).collect();
        let bf = b as f64;
        let m = loo.iter().sum::<f64>() / bf;
        let var = loo.iter().map(|x| (x - m).powi(2)).sum::<f64>() * (bf - 1.0) / bf;
        Ok(RealEstimate { mean: full, se: var.sqrt() })
    }

    pub fn finish(&self) -> Result<ModeStatsReport> {
        self.finish_with_eta(self.eta)
    }

    /// Jackknife summary with the wave amplitudes built from `eta`.
    pub fn finish_with_eta(&self, eta: f64) -> Result<ModeStatsReport> {
        if !(eta > 0.0) {
            return Err(FpuError::InvalidParameter(format!("eta must be positive, got {eta}")));
        }
        let b = self.check_blocks()?;
        let n = self.n;
        let omega = super::linear_dispersion(n);
        let derived: Vec<Vec<f64>> = self
            .blocks
            .iter()
            .map(|blk| {
                let mut d = vec![0.0; D_PER_K * n + 1];
                for k in 1..n {
                    let raw = &blk[PER_K * k..PER_K * (k + 1)];
                    let (nr, pr) = wave_moments(raw, eta * omega[k]);
                    let (nb, pb) = wave_moments(raw, omega[k]);
                    let out = &mut d[D_PER_K * k..D_PER_K * (k + 1)];
                    out.copy_from_slice(&[nr, nb, pr.re, pr.im, pb.re, pb.im, raw[PPR], raw[QQR], raw[PQR], raw[PQR + 1]]);
                }
                d[D_PER_K * n] = blk[PER_K * n];
                d
            })
            .collect();
        let (mean, se) = jackknife_means(&derived, D_PER_K * n + 1);
        let real = |k: usize, off: usize| RealEstimate { mean: mean[D_PER_K * k + off], se: se[D_PER_K * k + off] };
        let cplx = |k: usize, off: usize| {
            let i = D_PER_K * k + off;
            ComplexEstimate { mean: Complex64::new(mean[i], mean[i + 1]), se: (se[i] * se[i] + se[i + 1] * se[i + 1]).sqrt() }
        };
        let collect_r = |off: usize| (0..n).map(|k| if k == 0 { RealEstimate::default() } else { real(k, off) }).collect();
        let collect_c = |off: usize| (0..n).map(|k| if k == 0 { ComplexEstimate::default() } else { cplx(k, off) }).collect();
        Ok(ModeStatsReport {
            n,
            eta,
            blocks: b,
            block_len: self.block_len,
            n_tilde: collect_r(0),
            n_bare: collect_r(1),
            pair_renormalized: collect_c(2),
            pair_bare: collect_c(4),
            pp: collect_r(6),
            qq: collect_r(7),
            pq: collect_c(8),
            theta_kinetic: RealEstimate { mean: mean[D_PER_K * n], se: se[D_PER_K * n] },
        })
    }
}

/// Delete-one-block jackknife of a mean: returns component means and standard errors.
fn jackknife_means(blocks: &[Vec<f64>], dim: usize) -> (Vec<f64>, Vec<f64>) {
    let b = blocks.len() as f64;
    let mut total = vec![0.0; dim];
    for blk in blocks {
        for (t, x) in total.iter_mut().zip(blk) {
            *t += x;
        }
    }
    let mean: Vec<f64> = total.iter().map(|t| t / b).collect();
    let mut var = vec![0.0; dim];
    for blk in blocks {
        for i in 0..dim {
            let loo = (total[i] - blk[i]) / (b - 1.0);
            let d = loo - mean[i];
            var[i] += d * d;
        }
    }
    let se = var.iter().map(|v| ((b - 1.0) / b * v).sqrt()).collect();
    (mean, se)
}
