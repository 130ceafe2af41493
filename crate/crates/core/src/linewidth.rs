//! Near-resonance closure for the renormalized-wave two-point correlation
//! `C_k(t)`, the implied line shape, spectral widths and correlation times.
//!
//! ```text
//! ln C_k(t)/C_k(0) = 9 beta^2 theta^2 / (8 N^2 eta^6) * w_k
//!     * sum' (w_m + w_s - w_l) Delta^{kl}_{ms} (exp(i W t) - 1 - i W t) / W^2
//! ```
//!
//! with `W = eta (w_k + w_l - w_m - w_s)`. The primed sum skips terms with
//! `m = k` or `s = k` and the exact non-trivial resonances.

use std::collections::HashSet;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{FpuError, Result};
use crate::resonance::{exact_quartets, ResonanceQuartet, DEFAULT_TOL};
use crate::spectral::{linear_dispersion, spectrum_from_correlation};
use crate::thermo::ThermoSolution;

/// Below this `|W t|` the kernel is evaluated from its Taylor series.
const SERIES_CUTOFF: f64 = 1e-3;
/// Phase recurrences are re-seeded from `sin_cos` this often.
const RESEED: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Denominator {
    /// `W = eta (w_k + w_l - w_m - w_s)`.
    #[default]
    Renormalized,
    /// `W = w_k + w_l - w_m - w_s`.
    Bare,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinewidthParams {
    pub n: usize,
    pub beta: f64,
    pub edensity: f64,
    pub theta: f64,
    pub eta: f64,
}

impl LinewidthParams {
    pub fn from_thermo(n: usize, t: &ThermoSolution) -> Self {
        Self { n, beta: t.beta, edensity: t.edensity, theta: t.theta, eta: t.eta }
    }

    pub fn solve(n: usize, beta: f64, energy: f64) -> Result<Self> {
        let t = ThermoSolution::solve(beta, energy / n as f64)?;
        Ok(Self::from_thermo(n, &t))
    }

    fn validate(&self) -> Result<()> {
        if self.n < 4 || self.n % 2 != 0 {
            return Err(FpuError::InvalidParameter(format!("N must be even and >= 4, got {}", self.n)));
        }
        if !(self.theta > 0.0) || !(self.eta > 0.0) || !(self.beta >= 0.0) {
            return Err(FpuError::InvalidParameter("theta, eta must be positive and beta >= 0".into()));
        }
        Ok(())
    }

    pub fn prefactor(&self) -> f64 {
        let nn = self.n as f64;
        9.0 * self.beta * self.beta * self.theta * self.theta / (8.0 * nn * nn * self.eta.powi(6))
    }
}

/// One distinct term `weight * K(omega, t)` of the closure sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub omega: f64,
    pub weight: f64,
}

#[derive(Debug, Clone)]
pub struct LinewidthModel {
    pub params: LinewidthParams,
    pub umklapp: bool,
    pub denominator: Denominator,
    omega: Vec<f64>,
    excluded: HashSet<[usize; 4]>,
}

impl LinewidthModel {
    /// Builds the model, finding the exact resonances to exclude by a full scan.
    pub fn new(params: LinewidthParams, umklapp: bool, denominator: Denominator) -> Result<Self> {
        params.validate()?;
        let exact = if umklapp { exact_quartets(params.n, DEFAULT_TOL)? } else { Vec::new() };
        Self::with_exclusions(params, umklapp, denominator, &exact)
    }

    pub fn with_exclusions(
        params: LinewidthParams,
        umklapp: bool,
        denominator: Denominator,
        exact: &[ResonanceQuartet],
    ) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            params,
            umklapp,
            denominator,
            omega: linear_dispersion(params.n),
            excluded: exact.iter().map(|q| q.tuple()).collect(),
        })
    }

    pub fn omega_tilde(&self, k: usize) -> f64 {
        self.params.eta * self.omega[k]
    }

    /// Renormalized period `2 pi / w~_k`.
    pub fn period(&self, k: usize) -> f64 {
        2.0 * PI / self.omega_tilde(k)
    }

    /// Terms of the sum for mode `k`, already multiplied by the prefactor and `w_k`.
    /// The `(m, s)` and `(s, m)` orderings are merged.
    pub fn terms(&self, k: usize) -> Result<Vec<Term>> {
        let n = self.params.n;
        if k == 0 || k >= n {
            return Err(FpuError::InvalidParameter(format!("k = {k} outside 1..{n}")));
        }
        let w = &self.omega;
        let ni = n as i64;
        let offsets: &[i64] = if self.umklapp { &[-ni, 0, ni] } else { &[0] };
        let scale = self.params.prefactor() * w[k];
        let freq_scale = match self.denominator {
            Denominator::Renormalized => self.params.eta,
            Denominator::Bare => 1.0,
        };
        let mut out = Vec::with_capacity(n * n / 2);
        for l in 1..n {
            for m in 1..n {
                if m == k {
                    continue;
                }
                for &o in offsets {
                    let s = k as i64 + l as i64 - m as i64 + o;
                    if s < 1 || s >= ni {
                        continue;
                    }
                    let s = s as usize;
                    if s == k || s < m {
                        continue;
                    }
                    if self.excluded.contains(&[k, l, m, s]) {
                        continue;
                    }
                    let mult = if s == m { 1.0 } else { 2.0 };
                    out.push(Term {
                        omega: freq_scale * (w[k] + w[l] - w[m] - w[s]),
                        weight: mult * scale * (w[m] + w[s] - w[l]),
                    });
                }
            }
        }
        Ok(out)
    }

    /// `C_k(t) / C_k(0)` on `t_j = j dt`, `j = 0..len`.
    pub fn predict_correlation(&self, k: usize, dt: f64, len: usize) -> Result<CorrelationPrediction> {
        if !(dt > 0.0) || len < 2 {
            return Err(FpuError::InvalidParameter("need dt > 0 and at least two grid points".into()));
        }
        let terms = self.terms(k)?;
        let log = log_correlation(&terms, dt, len);
        let c = log.iter().map(|z| z.exp()).collect();
        Ok(CorrelationPrediction {
            k,
            dt,
            t_grid: (0..len).map(|j| j as f64 * dt).collect(),
            c_over_c0: c,
            umklapp: self.umklapp,
            params: self.params,
            omega_tilde_k: self.omega_tilde(k),
        })
    }

    /// Prediction on a grid that reaches the `1/e` point, doubling the horizon from
    /// `initial_periods` renormalized periods up to `max_horizon`.
    pub fn predict_until_crossing(
        &self,
        k: usize,
        points: usize,
        initial_periods: f64,
        max_horizon: f64,
    ) -> Result<(CorrelationPrediction, CorrelationTime)> {
        let mut horizon = initial_periods * self.period(k);
        loop {
            let pred = self.predict_correlation(k, horizon / (points - 1) as f64, points)?;
            match correlation_time(&pred) {
                Ok(ct) => return Ok((pred, ct)),
                Err(e) if horizon >= max_horizon => return Err(e),
                Err(_) => horizon = (2.0 * horizon).min(max_horizon),
            }
        }
    }

    /// Prediction sampled at `tau / points_per_tau` and extended until `|C| < target`.
    pub fn predict_decayed(
        &self,
        k: usize,
        points_per_tau: usize,
        target: f64,
        max_horizon: f64,
    ) -> Result<CorrelationPrediction> {
        let (_, ct) = self.predict_until_crossing(k, 512, 20.0, max_horizon)?;
        let dt = ct.tau / points_per_tau as f64;
        let mut len = 8 * points_per_tau;
        loop {
            let pred = self.predict_correlation(k, dt, len)?;
            let tail = pred.c_over_c0.last().map_or(1.0, |z| z.norm());
            if tail < target {
                return Ok(pred);
            }
            if len as f64 * dt >= max_horizon {
                return Err(FpuError::InsufficientDecay { target, reached: tail });
            }
            len *= 2;
        }
    }
}

/// `(exp(i w t) - 1 - i w t) / w^2`.
pub fn kernel(w: f64, t: f64) -> Complex64 {
    let u = w * t;
    if u.abs() < SERIES_CUTOFF {
        let t2 = t * t;
        return Complex64::new(-0.5 * t2 + w * w * t2 * t2 / 24.0, -w * t2 * t / 6.0);
    }
    let (s, c) = u.sin_cos();
    Complex64::new(c - 1.0, s - u) / (w * w)
}

fn log_correlation(terms: &[Term], dt: f64, len: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::default(); len];
    for term in terms {
        let w = term.omega;
        let a = term.weight;
        let step = Complex64::from_polar(1.0, w * dt);
        let w2 = w * w;
        let mut j = 0;
        while j < len {
            let end = (j + RESEED).min(len);
            let t0 = j as f64 * dt;
            let mut z = Complex64::from_polar(1.0, w * t0);
            for (idx, slot) in out.iter_mut().enumerate().take(end).skip(j) {
                let t = idx as f64 * dt;
                let u = w * t;
                if u.abs() < SERIES_CUTOFF {
                    *slot += a * kernel(w, t);
                } else {
                    *slot += a * Complex64::new(z.re - 1.0, z.im - u) / w2;
                }
                z *= step;
            }
            j = end;
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationPrediction {
    pub k: usize,
    pub dt: f64,
    pub t_grid: Vec<f64>,
    pub c_over_c0: Vec<Complex64>,
    pub umklapp: bool,
    pub params: LinewidthParams,
    pub omega_tilde_k: f64,
}

impl CorrelationPrediction {
    /// Values at `t = -t_j` are `conj(C(t_j))`.
    pub fn at_negative_lag(&self, j: usize) -> Complex64 {
        self.c_over_c0[j].conj()
    }
}

/// One-mode line shape on an ascending angular-frequency grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineSpectrum {
    pub omega: Vec<f64>,
    pub power: Vec<f64>,
}

impl LineSpectrum {
    pub fn delta_omega(&self) -> f64 {
        self.omega[1] - self.omega[0]
    }

    /// `sum(power) dw / (2 pi)`.
    pub fn total(&self) -> f64 {
        self.power.iter().sum::<f64>() * self.delta_omega() / (2.0 * PI)
    }

    pub fn peak(&self) -> f64 {
        let i = self
            .power
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map_or(0, |(i, _)| i);
        self.omega[i]
    }
}

/// `|a_k(w)|^2 = C^(w - w~_k)` with `C^(nu) = int C(t) exp(i nu t) dt`.
///
/// `lag_window` multiplies `C` lag by lag before transforming (for instance the
/// normalized autocorrelation of a Welch data window, expressed on the same lag
/// grid); lags beyond its end are dropped. `pad` zero-pads the lag sequence.
pub fn predict_spectrum(pred: &CorrelationPrediction, lag_window: Option<&[f64]>, pad: usize) -> Result<LineSpectrum> {
    let tail = pred.c_over_c0.last().map_or(1.0, |z| z.norm());
    let windowed_tail = match lag_window {
        Some(w) if w.len() <= pred.c_over_c0.len() => 0.0,
        _ => tail,
    };
    if windowed_tail >= 1e-3 {
        return Err(FpuError::InsufficientDecay { target: 1e-3, reached: tail });
    }
    let mut c: Vec<Complex64> = match lag_window {
        Some(w) => pred.c_over_c0.iter().zip(w).map(|(c, &w)| c * w).collect(),
        None => pred.c_over_c0.clone(),
    };
    c.resize(c.len() * pad.max(1), Complex64::default());
    let (grid, spec) = spectrum_from_correlation(&c, pred.dt);
    Ok(LineSpectrum {
        omega: grid.iter().map(|nu| nu + pred.omega_tilde_k).collect(),
        power: spec.into_iter().map(|p| p.max(0.0)).collect(),
    })
}

/// Normalized autocorrelation of a data window, `sum_n w_n w_{n+j} / sum_n w_n^2`.
pub fn window_lag_weights(window: &[f64]) -> Vec<f64> {
    let norm: f64 = window.iter().map(|x| x * x).sum();
    (0..window.len())
        .map(|j| window.iter().zip(&window[j..]).map(|(a, b)| a * b).sum::<f64>() / norm)
        .collect()
}

/// Expected Welch estimate of `a~_k` for a data window `window`: the prediction
/// must be sampled at the series spacing with at least `window.len()` lags.
/// The result lies on the same ascending grid as a Welch spectrum with that
/// segment length, and is normalized like `C/C(0)`.
pub fn expected_welch_spectrum(pred: &CorrelationPrediction, window: &[f64]) -> Result<LineSpectrum> {
    let l = window.len();
    if l < 2 || pred.c_over_c0.len() < l {
        return Err(FpuError::InsufficientSamples { needed: l, got: pred.c_over_c0.len() });
    }
    let lag = window_lag_weights(window);
    let c: Vec<Complex64> = (0..l)
        .map(|j| pred.c_over_c0[j] * lag[j] * Complex64::from_polar(1.0, -pred.omega_tilde_k * j as f64 * pred.dt))
        .collect();
    let (grid, spec) = spectrum_from_correlation(&c, pred.dt);
    // fine-grid bin m sits at index m - lo; Welch bins are the even m
    let lo = -(((2 * l) as i64 - 1) / 2);
    let welch_lo = -((l as i64 - 1) / 2);
    let welch_hi = l as i64 / 2;
    let idx = |j: i64| (2 * j - lo) as usize;
    Ok(LineSpectrum {
        omega: (welch_lo..=welch_hi).map(|j| grid[idx(j)]).collect(),
        power: (welch_lo..=welch_hi).map(|j| spec[idx(j)].max(0.0)).collect(),
    })
}

/// Centered running mean over `2 half + 1` bins, truncated at the ends.
pub fn running_mean(v: &[f64], half: usize) -> Vec<f64> {
    (0..v.len())
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(v.len());
            v[lo..hi].iter().sum::<f64>() / (hi - lo) as f64
        })
        .collect()
}

/// Zeroes `f` outside `|w - center| < half_width`.
pub fn band_limited(omega: &[f64], f: &[f64], center: f64, half_width: f64) -> Vec<f64> {
    omega.iter().zip(f).map(|(w, &v)| if (w - center).abs() < half_width { v } else { 0.0 }).collect()
}

/// `W = sum(f) dw / max f`.
pub fn spectral_width(f: &[f64], dw: f64) -> Result<f64> {
    let max = f.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(max > 0.0) {
        return Err(FpuError::ZeroFunction);
    }
    Ok(f.iter().sum::<f64>() * dw / max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTime {
    pub tau: f64,
    pub period: f64,
    pub ratio: f64,
}

/// First `t` with `|C(t)/C(0)| = 1/e`, linearly interpolated.
pub fn correlation_time(pred: &CorrelationPrediction) -> Result<CorrelationTime> {
    let target = (-1.0f64).exp();
    let mags: Vec<f64> = pred.c_over_c0.iter().map(|z| z.norm()).collect();
    for j in 1..mags.len() {
        if mags[j] <= target {
            let (a, b) = (mags[j - 1], mags[j]);
            let frac = if a > b { (a - target) / (a - b) } else { 0.0 };
            let tau = pred.t_grid[j - 1] + frac * (pred.t_grid[j] - pred.t_grid[j - 1]);
            let period = 2.0 * PI / pred.omega_tilde_k;
            return Ok(CorrelationTime { tau, period, ratio: tau / period });
        }
    }
    let min = mags.iter().cloned().fold(f64::INFINITY, f64::min);
    Err(FpuError::NoCrossing { min })
}

/// Overlap `int min(f, g)` of two line shapes after normalizing each to unit area
/// and shifting `g` so the peaks coincide. `g` is linearly interpolated onto `f`'s grid.
pub fn shape_overlap(f: &LineSpectrum, g: &LineSpectrum) -> f64 {
    let area = |s: &LineSpectrum| s.power.iter().sum::<f64>() * s.delta_omega();
    let (af, ag) = (area(f), area(g));
    if !(af > 0.0) || !(ag > 0.0) {
        return 0.0;
    }
    let shift = f.peak() - g.peak();
    let df = f.delta_omega();
    let mut total = 0.0;
    for (&w, &p) in f.omega.iter().zip(&f.power) {
        let gv = interpolate(&g.omega, &g.power, w - shift) / ag;
        total += (p / af).min(gv) * df;
    }
    total
}

fn interpolate(grid: &[f64], vals: &[f64], x: f64) -> f64 {
    if x <= grid[0] || x >= grid[grid.len() - 1] {
        return 0.0;
    }
    let i = grid.partition_point(|&g| g <= x);
    let (x0, x1) = (grid[i - 1], grid[i]);
    let t = (x - x0) / (x1 - x0);
    vals[i - 1] * (1.0 - t) + vals[i] * t
}
