//! Four-wave resonance manifolds of the periodic chain, including Umklapp branches.
//!
//! Wave numbers are integers in `1..N`; the continuum coordinates are
//! `x = k/N`, `y = l/N`, `z = m/N`, `v = s/N`. Residuals use the bare dispersion
//! because a common factor `eta` cancels from every resonance condition.

use std::f64::consts::PI;

use astro_float::{BigFloat, Consts, RoundingMode};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{FpuError, Result};
use crate::spectral::{linear_dispersion, WaveField};

/// Float pre-screen threshold for exact resonances.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Binary precision of the confirmation pass.
const HP_BITS: usize = 256;
/// High-precision residuals must have a binary exponent at or below this (about 1e-40).
const HP_EXPONENT_CUTOFF: i32 = -133;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuartetKind {
    /// `{k, l} = {m, s}`.
    Trivial,
    /// `s = k + l - m + N`.
    UmklappPlus,
    /// `s = k + l - m - N`.
    UmklappMinus,
    /// Non-trivial with `s = k + l - m`; never an exact resonance.
    Direct,
}

impl QuartetKind {
    pub fn offset(self, n: usize) -> i64 {
        match self {
            QuartetKind::UmklappPlus => n as i64,
            QuartetKind::UmklappMinus => -(n as i64),
            _ => 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonanceQuartet {
    pub k: usize,
    pub l: usize,
    pub m: usize,
    pub s: usize,
    pub kind: QuartetKind,
    pub residual: f64,
}

impl ResonanceQuartet {
    pub fn tuple(&self) -> [usize; 4] {
        [self.k, self.l, self.m, self.s]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PeriodicDelta {
    D22,
    D31,
    D40,
}

impl PeriodicDelta {
    /// 1 when the periodic momentum balance holds, else 0.
    pub fn value(self, n: usize, k: usize, l: usize, m: usize, s: usize) -> u8 {
        let (n, k, l, m, s) = (n as i64, k as i64, l as i64, m as i64, s as i64);
        let hit = match self {
            PeriodicDelta::D22 => {
                let d = k + l - m - s;
                d == -n || d == 0 || d == n
            }
            PeriodicDelta::D31 => {
                let d = k + l + m - s;
                d == 0 || d == n || d == 2 * n
            }
            PeriodicDelta::D40 => {
                let d = k + l + m + s;
                d == n || d == 2 * n || d == 3 * n
            }
        };
        hit as u8
    }
}

/// `w_k + w_l - w_m - w_s` over a precomputed dispersion table.
#[inline]
fn mismatch(w: &[f64], k: usize, l: usize, m: usize, s: usize) -> f64 {
    w[k] + w[l] - w[m] - w[s]
}

/// `A = tan(pi (x+y)/2) cos(pi (x-y)/2)`; the Umklapp branches exist where `|A| <= 1`.
fn branch_parameter(x: f64, y: f64) -> f64 {
    (PI * 0.5 * (x + y)).tan() * (PI * 0.5 * (x - y)).cos()
}

fn wrap_unit(z: f64) -> f64 {
    z - 2.0 * (z / 2.0).floor()
}

/// The matching fourth coordinate for an Umklapp quartet, if it lies in `(0, 1)`.
pub fn umklapp_partner(x: f64, y: f64, z: f64) -> Option<f64> {
    [x + y - z - 1.0, x + y - z + 1.0].into_iter().find(|v| *v > 0.0 && *v < 1.0)
}

/// `sin(pi x) + sin(pi y) - sin(pi z) - sin(pi v)`.
pub fn continuum_residual(x: f64, y: f64, z: f64, v: f64) -> f64 {
    (PI * x).sin() + (PI * y).sin() - (PI * z).sin() - (PI * v).sin()
}

/// Non-trivial (Umklapp) solutions `z in (0, 1)` of the continuum resonance condition.
/// Empty when `|A| > 1`.
pub fn nontrivial_branches(x: f64, y: f64) -> Vec<f64> {
    let a = branch_parameter(x, y);
    if !(a.abs() <= 1.0) {
        return Vec::new();
    }
    let sigma = 0.5 * (x + y);
    let r = a.asin() / PI;
    let mut out = Vec::with_capacity(2);
    for z in [wrap_unit(sigma + r), wrap_unit(sigma - 1.0 - r)] {
        if z > 0.0 && z < 1.0 && umklapp_partner(x, y, z).is_some() {
            out.push(z);
        }
    }
    out
}

/// High-precision `sin(pi j / N)` for `j = 0..N`.
struct PreciseSines {
    sines: Vec<BigFloat>,
}

impl PreciseSines {
    fn new(n: usize) -> Result<Self> {
        let rm = RoundingMode::ToEven;
        let mut cc = Consts::new().map_err(|e| FpuError::InvalidParameter(format!("{e:?}")))?;
        let pi = cc.pi(HP_BITS, rm);
        let nn = BigFloat::from_u64(n as u64, HP_BITS);
        let sines = (0..n)
            .map(|j| {
                BigFloat::from_u64(j as u64, HP_BITS)
                    .mul(&pi, HP_BITS, rm)
                    .div(&nn, HP_BITS, rm)
                    .sin(HP_BITS, rm, &mut cc)
            })
            .collect();
        Ok(Self { sines })
    }

    fn is_exact(&self, idx: &[usize], signs: &[bool]) -> bool {
        let rm = RoundingMode::ToEven;
        let mut acc = BigFloat::from_u64(0, HP_BITS);
        for (&i, &plus) in idx.iter().zip(signs) {
            acc = if plus {
                acc.add(&self.sines[i], HP_BITS, rm)
            } else {
                acc.sub(&self.sines[i], HP_BITS, rm)
            };
        }
        acc.is_zero() || acc.exponent().is_some_and(|e| e <= HP_EXPONENT_CUTOFF)
    }
}

fn classify(k: usize, l: usize, m: usize, s: usize, offset: i64) -> QuartetKind {
    if (k == m && l == s) || (k == s && l == m) {
        QuartetKind::Trivial
    } else if offset > 0 {
        QuartetKind::UmklappPlus
    } else if offset < 0 {
        QuartetKind::UmklappMinus
    } else {
        QuartetKind::Direct
    }
}

/// Exhaustive list of non-trivial exact (2 -> 2) resonances, ordered by `(k, l, m)`.
/// Candidates with float residual below `tol` are confirmed at 256-bit precision.
pub fn exact_quartets(n: usize, tol: f64) -> Result<Vec<ResonanceQuartet>> {
    if n < 4 || n % 2 != 0 {
        return Err(FpuError::InvalidParameter(format!("N must be even and >= 4, got {n}")));
    }
    let w = linear_dispersion(n);
    let hp = PreciseSines::new(n)?;
    let ni = n as i64;
    let mut out = Vec::new();
    for k in 1..n {
        for l in 1..n {
            for m in 1..n {
                for offset in [-ni, 0, ni] {
                    let s = k as i64 + l as i64 - m as i64 + offset;
                    if s < 1 || s >= ni {
                        continue;
                    }
                    let s = s as usize;
                    let kind = classify(k, l, m, s, offset);
                    if kind == QuartetKind::Trivial {
                        continue;
                    }
                    let r = mismatch(&w, k, l, m, s);
                    if r.abs() < tol && hp.is_exact(&[k, l, m, s], &[true, true, false, false]) {
                        out.push(ResonanceQuartet { k, l, m, s, kind, residual: r.abs() });
                    }
                }
            }
        }
    }
    Ok(out)
}

/// The two quartet families `{k, N/2-k, N/2+k, N-k}` (k < N/2) and
/// `{k, 3N/2-k, k-N/2, N-k}` (k > N/2), each with both orderings of the last pair.
pub fn half_period_families(n: usize) -> Vec<[usize; 4]> {
    let h = n / 2;
    let mut out = Vec::new();
    for k in 1..n {
        if k < h {
            out.push([k, h - k, h + k, n - k]);
            out.push([k, h - k, n - k, h + k]);
        } else if k > h {
            out.push([k, 3 * h - k, k - h, n - k]);
            out.push([k, 3 * h - k, n - k, k - h]);
        }
    }
    out
}

/// Outcome of a (3 -> 1) or (4 -> 0) certification scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceReport {
    pub n: usize,
    pub combinations: u64,
    pub exact: Vec<[usize; 4]>,
    pub min_residual: f64,
    pub min_at: Option<[usize; 4]>,
    /// Smallest `sin(pi x) + sin(pi y) + sin(pi z) - |sin(pi (x + y + z))|` over an interior grid.
    pub continuum_margin: f64,
    pub continuum_strict: bool,
}

/// Scans every `(k, l, m, s)` with `k + l + m - s in {0, N, 2N}` for `w_k + w_l + w_m = w_s`.
pub fn verify_no_3to1(n: usize) -> Result<ResonanceReport> {
    if n < 4 {
        return Err(FpuError::InvalidParameter(format!("N must be >= 4, got {n}")));
    }
    let w = linear_dispersion(n);
    let hp = PreciseSines::new(n)?;
    let ni = n as i64;
    let mut combos = 0u64;
    let mut exact = Vec::new();
    let mut min_res = f64::INFINITY;
    let mut min_at = None;
    for k in 1..n {
        for l in 1..n {
            for m in 1..n {
                for o in 0..3 {
                    let s = (k + l + m) as i64 - o * ni;
                    if s < 1 || s >= ni {
                        continue;
                    }
                    let s = s as usize;
                    combos += 1;
                    let r = (w[k] + w[l] + w[m] - w[s]).abs();
                    if r < min_res {
                        min_res = r;
                        min_at = Some([k, l, m, s]);
                    }
                    if r < DEFAULT_TOL && hp.is_exact(&[k, l, m, s], &[true, true, true, false]) {
                        exact.push([k, l, m, s]);
                    }
                }
            }
        }
    }
    let (margin, strict) = three_sine_margin(200);
    Ok(ResonanceReport {
        n,
        combinations: combos,
        exact,
        min_residual: min_res,
        min_at,
        continuum_margin: margin,
        continuum_strict: strict,
    })
}

fn three_sine_margin(grid: usize) -> (f64, bool) {
    let mut margin = f64::INFINITY;
    let mut strict = true;
    let h = 1.0 / grid as f64;
    for i in 1..grid {
        for j in 1..grid {
            for k in 1..grid {
                let (x, y, z) = (i as f64 * h, j as f64 * h, k as f64 * h);
                let d = (PI * x).sin() + (PI * y).sin() + (PI * z).sin() - (PI * (x + y + z)).sin().abs();
                margin = margin.min(d);
                strict &= d > 0.0;
            }
        }
    }
    (margin, strict)
}

/// Scans every `(k, l, m, s)` with `k + l + m + s in {N, 2N, 3N}` for a vanishing frequency sum.
pub fn verify_no_4to0(n: usize) -> Result<ResonanceReport> {
    if n < 4 {
        return Err(FpuError::InvalidParameter(format!("N must be >= 4, got {n}")));
    }
    let w = linear_dispersion(n);
    let ni = n as i64;
    let mut combos = 0u64;
    let mut exact = Vec::new();
    let mut min_res = f64::INFINITY;
    let mut min_at = None;
    for k in 1..n {
        for l in 1..n {
            for m in 1..n {
                for o in 1..4 {
                    let s = o * ni - (k + l + m) as i64;
                    if s < 1 || s >= ni {
                        continue;
                    }
                    let s = s as usize;
                    combos += 1;
                    let r = w[k] + w[l] + w[m] + w[s];
                    if r < min_res {
                        min_res = r;
                        min_at = Some([k, l, m, s]);
                    }
                    if r == 0.0 {
                        exact.push([k, l, m, s]);
                    }
                }
            }
        }
    }
    Ok(ResonanceReport {
        n,
        combinations: combos,
        exact,
        min_residual: min_res,
        min_at,
        continuum_margin: min_res,
        continuum_strict: min_res > 0.0,
    })
}

/// `|<conj(a~_k) conj(a~_l) a~_m a~_s>|` over `(l, m)` for fixed `k`, with
/// `s = (k + l - m) mod N`; cells with `s = 0` stay zero.
#[derive(Debug, Clone)]
pub struct QuartetAverager {
    n: usize,
    k: usize,
    sum: Vec<Complex64>,
    samples: usize,
    row: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuartetMap {
    pub n: usize,
    pub k: usize,
    /// Row `l`, column `m`, both `0..N` (row and column 0 are zero).
    pub values: Vec<Vec<f64>>,
    pub duration: f64,
    pub samples: usize,
}

impl QuartetAverager {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if k == 0 || k >= n {
            return Err(FpuError::InvalidParameter(format!("k = {k} outside 1..{n}")));
        }
        Ok(Self { n, k, sum: vec![Complex64::default(); n * n], samples: 0, row: vec![Complex64::default(); n] })
    }

    pub fn push(&mut self, a: &[Complex64]) -> Result<()> {
        let n = self.n;
        if a.len() != n {
            return Err(FpuError::LengthMismatch { expected: n, got: a.len() });
        }
        let ak = a[self.k].conj();
        for l in 1..n {
            let c = ak * a[l].conj();
            let base = (self.k + l) % n;
            let dst = &mut self.sum[l * n..(l + 1) * n];
            // s = base - m (mod N), so walk m upward and s downward
            for m in 1..n {
                let s = (base + n - m) % n;
                if s != 0 {
                    self.row[m] = a[s];
                } else {
                    self.row[m] = Complex64::default();
                }
            }
            for m in 1..n {
                dst[m] += c * a[m] * self.row[m];
            }
        }
        self.samples += 1;
        Ok(())
    }

    pub fn push_field(&mut self, w: &WaveField) -> Result<()> {
        self.push(&w.ak)
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    /// Requires at least `min_duration` of averaging time at spacing `sample_dt`.
    pub fn finish(&self, sample_dt: f64, min_duration: f64) -> Result<QuartetMap> {
        let duration = self.samples as f64 * sample_dt;
        if self.samples == 0 || duration < min_duration {
            let needed = (min_duration / sample_dt).ceil() as usize;
            return Err(FpuError::InsufficientSamples { needed, got: self.samples });
        }
        let n = self.n;
        let inv = 1.0 / self.samples as f64;
        let values = (0..n)
            .map(|l| (0..n).map(|m| (self.sum[l * n + m] * inv).norm()).collect())
            .collect();
        Ok(QuartetMap { n, k: self.k, values, duration, samples: self.samples })
    }
}

/// `400` longest renormalized periods, `400 * 2 pi / (eta w_1)`.
pub fn quartet_min_duration(n: usize, eta: f64) -> f64 {
    400.0 * 2.0 * PI / (eta * linear_dispersion(n)[1])
}

/// Cells `(l, m)` within Chebyshev distance `radius` of the resonance curves for
/// fixed `x = k/N`: the trivial lines `m = k`, `m = l` and the Umklapp branches.
pub fn resonance_curve_mask(n: usize, k: usize, radius: usize) -> Vec<Vec<bool>> {
    let mut hit = vec![vec![false; n]; n];
    let mark = |hit: &mut Vec<Vec<bool>>, l: f64, m: f64| {
        let (li, mi) = (l.round() as i64, m.round() as i64);
        let r = radius as i64;
        for a in (li - r)..=(li + r) {
            for b in (mi - r)..=(mi + r) {
                if a >= 1 && a < n as i64 && b >= 1 && b < n as i64 {
                    hit[a as usize][b as usize] = true;
                }
            }
        }
    };
    for l in 1..n {
        mark(&mut hit, l as f64, k as f64);
        mark(&mut hit, l as f64, l as f64);
    }
    // zero set of the Umklapp residual located by sign changes on a fine grid
    let x = k as f64 / n as f64;
    let fine = 8 * n;
    let f = |y: f64, z: f64| -> Option<f64> {
        umklapp_partner(x, y, z).map(|v| continuum_residual(x, y, z, v))
    };
    let h = 1.0 / fine as f64;
    let vals: Vec<Vec<Option<f64>>> =
        (0..=fine).map(|i| (0..=fine).map(|j| f(i as f64 * h, j as f64 * h)).collect()).collect();
    for i in 0..fine {
        for j in 0..fine {
            let here = vals[i][j];
            for (a, b) in [(i + 1, j), (i, j + 1)] {
                if let (Some(p), Some(q)) = (here, vals[a][b]) {
                    if p == 0.0 || p.signum() != q.signum() {
                        let y = 0.5 * (i + a) as f64 * h;
                        let z = 0.5 * (j + b) as f64 * h;
                        mark(&mut hit, y * n as f64, z * n as f64);
                    }
                }
            }
        }
    }
    hit
}

/// Fraction of the summed value of the largest `fraction` of cells that falls inside `mask`.
pub fn top_mass_fraction_in_mask(values: &[Vec<f64>], mask: &[Vec<bool>], fraction: f64) -> f64 {
    let mut cells: Vec<(f64, bool)> = values
        .iter()
        .zip(mask)
        .flat_map(|(r, mr)| r.iter().zip(mr).map(|(&v, &b)| (v, b)))
        .filter(|c| c.0 > 0.0)
        .collect();
    cells.sort_by(|a, b| b.0.total_cmp(&a.0));
    let take = ((cells.len() as f64 * fraction).ceil() as usize).max(1).min(cells.len());
    let total: f64 = cells[..take].iter().map(|c| c.0).sum();
    let inside: f64 = cells[..take].iter().filter(|c| c.1).map(|c| c.0).sum();
    if total > 0.0 {
        inside / total
    } else {
        0.0
    }
}

/// Sum of the values inside `mask`.
pub fn mass_in_mask(values: &[Vec<f64>], mask: &[Vec<bool>]) -> f64 {
    values
        .iter()
        .zip(mask)
        .flat_map(|(r, mr)| r.iter().zip(mr).filter(|(_, &b)| b).map(|(&v, _)| v))
        .sum()
}
