//! Welch spectra, spectral-centroid dispersion measurement and correlation functions.
//!
//! All transforms here use the kernel `exp(+i w t)`, so a series rotating as
//! `exp(-i w0 t)` produces a peak at `w = +w0`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::{FourierSeries, ModeSeries};
use crate::error::{FpuError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Window {
    #[default]
    Hann,
    Rect,
}

impl Window {
    pub fn coefficients(self, len: usize) -> Vec<f64> {
        match self {
            Window::Rect => vec![1.0; len],
            Window::Hann => (0..len)
                .map(|n| 0.5 - 0.5 * (2.0 * PI * n as f64 / len as f64).cos())
                .collect(),
        }
    }
}

impl std::str::FromStr for Window {
    type Err = FpuError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hann" => Ok(Window::Hann),
            "rect" => Ok(Window::Rect),
            other => Err(FpuError::InvalidParameter(format!("unknown window '{other}'"))),
        }
    }
}

/// Signed DFT bin offsets in ascending order: `-(L-1)/2 ..= L/2`.
fn ascending_bins(len: usize) -> impl Iterator<Item = i64> {
    let lo = -(((len as i64) - 1) / 2);
    let hi = len as i64 / 2;
    lo..=hi
}

/// Angular frequencies of a length-`len` transform at spacing `dt`, ascending.
pub fn two_sided_frequencies(len: usize, dt: f64) -> Vec<f64> {
    let dw = 2.0 * PI / (len as f64 * dt);
    ascending_bins(len).map(|m| m as f64 * dw).collect()
}

fn reorder(buf: &[Complex64]) -> impl Iterator<Item = Complex64> + '_ {
    let len = buf.len() as i64;
    ascending_bins(buf.len()).map(move |m| buf[m.rem_euclid(len) as usize])
}

/// Power spectral density estimates on a two-sided ascending frequency grid.
/// Normalized so that `sum(power) dw / (2 pi)` is the mean squared modulus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralDensity {
    pub k_list: Vec<usize>,
    pub omega_grid: Vec<f64>,
    pub power: Vec<Vec<f64>>,
    pub sample_dt: f64,
    pub window: Window,
    pub segments: usize,
    pub segment_len: usize,
}

impl SpectralDensity {
    pub fn delta_omega(&self) -> f64 {
        if self.omega_grid.len() < 2 {
            return 0.0;
        }
        self.omega_grid[1] - self.omega_grid[0]
    }

    /// Frequency resolution of one unpadded segment.
    pub fn resolution(&self) -> f64 {
        2.0 * PI / (self.segment_len as f64 * self.sample_dt)
    }

    /// Index of the first grid point with `w > 0`.
    fn first_positive(&self) -> usize {
        self.omega_grid.partition_point(|&w| w <= 0.0)
    }

    /// Grid and rows restricted to `w in (0, pi / sample_dt]`.
    pub fn one_sided(&self) -> (Vec<f64>, Vec<Vec<f64>>) {
        let i0 = self.first_positive();
        let grid = self.omega_grid[i0..].to_vec();
        let rows = self.power.iter().map(|r| r[i0..].to_vec()).collect();
        (grid, rows)
    }

    /// `sum(power) dw / (2 pi)` for row `i`.
    pub fn total_power(&self, i: usize) -> f64 {
        self.power[i].iter().sum::<f64>() * self.delta_omega() / (2.0 * PI)
    }

    /// Location of the largest value with `w > 0` in row `i`.
    pub fn peak_frequency(&self, i: usize) -> Option<f64> {
        let i0 = self.first_positive();
        let row = &self.power[i][i0..];
        row.iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(j, _)| self.omega_grid[i0 + j])
    }

    pub fn row(&self, k: usize) -> Option<&[f64]> {
        self.k_list.iter().position(|&x| x == k).map(|i| self.power[i].as_slice())
    }
}

/// Welch estimate with 50% overlapping segments, each zero-padded to `pad` times its length.
pub fn spatiotemporal_spectrum_padded(
    series: &ModeSeries,
    max_omega: f64,
    window: Window,
    segments: usize,
    pad: usize,
) -> Result<SpectralDensity> {
    let dt = series.sample_dt;
    if !(dt > 0.0) {
        return Err(FpuError::InvalidParameter("sample spacing must be positive".into()));
    }
    let nyquist = PI / dt;
    if nyquist <= 1.5 * max_omega {
        return Err(FpuError::NyquistViolation { nyquist, required: 1.5 * max_omega });
    }
    if segments < 2 || pad == 0 {
        return Err(FpuError::InvalidParameter("need at least 2 segments and pad >= 1".into()));
    }
    let m = series.samples();
    let half = m / (segments + 1);
    let seg_len = 2 * half;
    if half < 4 {
        return Err(FpuError::InsufficientSamples { needed: 8 * (segments + 1) / 2, got: m });
    }
    let w = window.coefficients(seg_len);
    let wsum2: f64 = w.iter().map(|x| x * x).sum();
    let fft_len = seg_len * pad;
    let mut planner = FftPlanner::new();
    let plan = planner.plan_fft_inverse(fft_len);
    let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
    let mut buf = vec![Complex64::default(); fft_len];
    let norm = dt / (wsum2 * segments as f64);
    let mut power = Vec::with_capacity(series.k_list.len());
    for row in &series.data {
        let mut acc = vec![0.0; fft_len];
        for s in 0..segments {
            let start = s * half;
            buf.iter_mut().for_each(|b| *b = Complex64::default());
            for n in 0..seg_len {
                buf[n] = row[start + n] * w[n];
            }
            plan.process_with_scratch(&mut buf, &mut scratch);
            for (a, b) in acc.iter_mut().zip(&buf) {
                *a += b.norm_sqr();
            }
        }
        let ordered: Vec<f64> = {
            let c: Vec<Complex64> = acc.iter().map(|&x| Complex64::new(x * norm, 0.0)).collect();
            reorder(&c).map(|z| z.re).collect()
        };
        power.push(ordered);
    }
    Ok(SpectralDensity {
        k_list: series.k_list.clone(),
        omega_grid: two_sided_frequencies(fft_len, dt),
        power,
        sample_dt: dt,
        window,
        segments,
        segment_len: seg_len,
    })
}

/// Welch estimate without zero padding. `max_omega` is the highest frequency that
/// must be resolved; the sampling must put Nyquist above `1.5 max_omega`.
pub fn spatiotemporal_spectrum(
    series: &ModeSeries,
    max_omega: f64,
    window: Window,
    segments: usize,
) -> Result<SpectralDensity> {
    spatiotemporal_spectrum_padded(series, max_omega, window, segments, 1)
}

/// Per-mode spectral centroids and the implied renormalization factors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaMeasurement {
    pub k_list: Vec<usize>,
    pub omega_k: Vec<f64>,
    pub omega_c: Vec<f64>,
    pub eta_k: Vec<f64>,
    pub eta_bar: f64,
    /// `max |eta_k - eta_bar| / eta_bar`.
    pub spread: f64,
}

fn centroid(grid: &[f64], row: &[f64], lo: f64, hi: f64) -> Option<f64> {
    let a = grid.partition_point(|&w| w < lo);
    let b = grid.partition_point(|&w| w <= hi);
    let (mut num, mut den) = (0.0, 0.0);
    for j in a..b {
        num += grid[j] * row[j];
        den += row[j];
    }
    (den > 0.0).then(|| num / den)
}

/// Spectral centroid of each row in a band centred on its peak, iterated once.
/// The band is symmetric, `center +- h` with `h = max(0.75 center, 4 resolution)`
/// capped at `center`, so it never extends below zero frequency.
pub fn measure_eta(s: &SpectralDensity, omega_k: &[f64]) -> Result<EtaMeasurement> {
    let grid = &s.omega_grid;
    let res = s.resolution();
    let mut omega_c = Vec::with_capacity(s.k_list.len());
    let mut eta_k = Vec::with_capacity(s.k_list.len());
    let mut wk = Vec::with_capacity(s.k_list.len());
    for (i, &k) in s.k_list.iter().enumerate() {
        let w = *omega_k
            .get(k)
            .ok_or(FpuError::LengthMismatch { expected: k + 1, got: omega_k.len() })?;
        let mut center = s.peak_frequency(i).ok_or(FpuError::EmptyBand { k })?;
        for _ in 0..2 {
            let h = (0.75 * center).max(4.0 * res).min(center);
            center = centroid(grid, &s.power[i], center - h, center + h).ok_or(FpuError::EmptyBand { k })?;
        }
        omega_c.push(center);
        eta_k.push(center / w);
        wk.push(w);
    }
    if eta_k.is_empty() {
        return Err(FpuError::EmptyBand { k: 0 });
    }
    let eta_bar = eta_k.iter().sum::<f64>() / eta_k.len() as f64;
    let spread = eta_k.iter().map(|e| (e - eta_bar).abs() / eta_bar).fold(0.0, f64::max);
    Ok(EtaMeasurement { k_list: s.k_list.clone(), omega_k: wk, omega_c, eta_k, eta_bar, spread })
}

/// Re-measures with `a~` rebuilt from the previous estimate, starting at `eta0`.
pub fn measure_eta_fixed_point(
    fs: &FourierSeries,
    max_omega: f64,
    window: Window,
    segments: usize,
    eta0: f64,
    iterations: usize,
) -> Result<EtaMeasurement> {
    let omega = super::linear_dispersion(fs.n);
    let mut eta = eta0;
    let mut last = None;
    for _ in 0..iterations.max(1) {
        let s = spatiotemporal_spectrum(&fs.waves(eta), max_omega, window, segments)?;
        let m = measure_eta(&s, &omega)?;
        eta = m.eta_bar;
        last = Some(m);
    }
    last.ok_or(FpuError::EmptyBand { k: 0 })
}

/// Biased estimator `C(tau) = M^{-1} sum_t x(t + tau) conj(x(t))` for `tau = 0..=max_lag`.
pub fn autocorrelation(x: &[Complex64], max_lag: usize) -> Result<Vec<Complex64>> {
    let m = x.len();
    if m < 2 || 2 * max_lag >= m {
        return Err(FpuError::InvalidParameter(format!(
            "max_lag {max_lag} must be below half the series length {m}"
        )));
    }
    let len = (2 * m).next_power_of_two();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(len);
    let inv = planner.plan_fft_inverse(len);
    let mut buf = vec![Complex64::default(); len];
    buf[..m].copy_from_slice(x);
    fwd.process(&mut buf);
    buf.iter_mut().for_each(|z| *z = Complex64::new(z.norm_sqr(), 0.0));
    inv.process(&mut buf);
    let s = 1.0 / (len as f64 * m as f64);
    Ok(buf[..=max_lag].iter().map(|z| z * s).collect())
}

/// `S(w) = dt sum_tau C(tau) exp(i w tau dt)` with `C(-tau) = conj(C(tau))`.
/// Returns the two-sided grid and the (real) spectrum.
pub fn spectrum_from_correlation(c: &[Complex64], dt: f64) -> (Vec<f64>, Vec<f64>) {
    let l = c.len();
    let len = 2 * l;
    let mut buf = vec![Complex64::default(); len];
    buf[0] = c[0];
    for tau in 1..l {
        buf[tau] = c[tau];
        buf[len - tau] = c[tau].conj();
    }
    let mut planner = FftPlanner::new();
    planner.plan_fft_inverse(len).process(&mut buf);
    let spec = reorder(&buf).map(|z| z.re * dt).collect();
    (two_sided_frequencies(len, dt), spec)
}
