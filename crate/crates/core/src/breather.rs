//! Discrete-breather experiments: temporal high-pass filtering of site
//! trajectories, detection and tracking of localized hot spots, and the
//! pi-mode modulational-instability transient.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::chain::{localization_of, pi_mode_init, site_energies_of, ChainState, ModelParams};
use crate::error::{FpuError, Result};
use crate::integrator::Integrator;
use crate::spectral::{spatiotemporal_spectrum, FourierSeries, ModeTransformer, SpectralDensity, Window};

pub const DEFAULT_THRESHOLD: f64 = 5.0;
pub const MAX_SPAN: usize = 6;
/// Minimum track lifetime in units of `2 pi / omega_cut`.
pub const MIN_LIFETIME_PERIODS: f64 = 10.0;

/// High-pass filtered site trajectories `q^f_n(t)` and their time derivatives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilteredField {
    /// `[site][time]`
    pub values: Vec<Vec<f64>>,
    /// Spectral time derivative of `values`, same layout.
    pub velocities: Vec<Vec<f64>>,
    /// Kinetic envelope `|v_a|^2 / 2` of the analytic velocity signal, same layout.
    pub envelope: Vec<Vec<f64>>,
    pub omega_cut: f64,
    pub sample_dt: f64,
}

impl FilteredField {
    pub fn sites(&self) -> usize {
        self.values.len()
    }

    pub fn frames(&self) -> usize {
        self.values.first().map_or(0, Vec::len)
    }

    /// Kinetic envelope as `[frame][site]`. It is smooth on the oscillation time
    /// scale, so a breather stays above threshold through its whole period.
    pub fn local_energy(&self) -> Vec<Vec<f64>> {
        (0..self.frames()).map(|t| self.envelope.iter().map(|row| row[t]).collect()).collect()
    }

    /// Angular frequency of the largest one-sided periodogram bin at `site`.
    pub fn dominant_frequency(&self, site: usize) -> f64 {
        let x = &self.values[site];
        let m = x.len();
        let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        FftPlanner::new().plan_fft_forward(m).process(&mut buf);
        let best = (1..=m / 2).max_by(|&a, &b| buf[a].norm_sqr().total_cmp(&buf[b].norm_sqr())).unwrap_or(0);
        2.0 * PI * best as f64 / (m as f64 * self.sample_dt)
    }
}

fn bin_frequency(j: usize, m: usize, dt: f64) -> f64 {
    let signed = if j <= m / 2 { j as f64 } else { j as f64 - m as f64 };
    2.0 * PI * signed / (m as f64 * dt)
}

/// Per-site brick-wall filter: zero every bin with `|w| < omega_cut`.
pub fn frequency_filter(series: &[Vec<f64>], omega_cut: f64, sample_dt: f64) -> Result<FilteredField> {
    if !(sample_dt > 0.0) || !(omega_cut >= 0.0) {
        return Err(FpuError::InvalidParameter("need sample_dt > 0 and omega_cut >= 0".into()));
    }
    let nyquist = PI / sample_dt;
    if omega_cut >= nyquist {
        return Err(FpuError::NyquistViolation { nyquist, required: omega_cut });
    }
    let m = series.first().map_or(0, Vec::len);
    if m < 2 || series.iter().any(|r| r.len() != m) {
        return Err(FpuError::InvalidParameter("site series must share a length of at least 2".into()));
    }
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(m);
    let inv = planner.plan_fft_inverse(m);
    let scale = 1.0 / m as f64;
    let mut values = Vec::with_capacity(series.len());
    let mut velocities = Vec::with_capacity(series.len());
    let mut envelope = Vec::with_capacity(series.len());
    for row in series {
        let mut buf: Vec<Complex64> = row.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fwd.process(&mut buf);
        let mut deriv = buf.clone();
        for j in 0..m {
            let w = bin_frequency(j, m, sample_dt);
            if w.abs() < omega_cut {
                buf[j] = Complex64::default();
                deriv[j] = Complex64::default();
            } else if 2 * j == m {
                deriv[j] = Complex64::default();
            } else {
                deriv[j] *= Complex64::new(0.0, w);
            }
        }
        let mut analytic: Vec<Complex64> = (0..m)
            .map(|j| if bin_frequency(j, m, sample_dt) > 0.0 && 2 * j != m { 2.0 * deriv[j] } else { Complex64::default() })
            .collect();
        inv.process(&mut buf);
        inv.process(&mut deriv);
        inv.process(&mut analytic);
        values.push(buf.iter().map(|z| z.re * scale).collect());
        velocities.push(deriv.iter().map(|z| z.re * scale).collect());
        envelope.push(analytic.iter().map(|z| 0.5 * (z * scale).norm_sqr()).collect());
    }
    Ok(FilteredField { values, velocities, envelope, omega_cut, sample_dt })
}

/// Transposes snapshots into `[site][time]` displacement rows.
pub fn site_series(snapshots: &[ChainState]) -> Vec<Vec<f64>> {
    let n = snapshots.first().map_or(0, ChainState::len);
    (0..n).map(|j| snapshots.iter().map(|s| s.q[j]).collect()).collect()
}

/// Cyclic site interval `start, start+1, .., start+width-1 (mod N)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SiteInterval {
    pub start: usize,
    pub width: usize,
}

impl SiteInterval {
    pub fn contains(&self, site: usize, n: usize) -> bool {
        (site + n - self.start) % n < self.width
    }

    pub fn center(&self, n: usize) -> usize {
        (self.start + self.width / 2) % n
    }

    /// Overlapping or adjacent on the ring.
    pub fn touches(&self, other: &SiteInterval, n: usize) -> bool {
        let grown = SiteInterval { start: (self.start + n - 1) % n, width: (self.width + 2).min(n) };
        (0..other.width).any(|i| grown.contains((other.start + i) % n, n))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackFrame {
    pub time: f64,
    pub interval: SiteInterval,
    pub peak_energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BreatherTrack {
    pub frames: Vec<TrackFrame>,
    pub lifetime: f64,
    pub mean_span: f64,
}

impl BreatherTrack {
    /// Site of maximal energy proxy in the longest-lived frame region.
    pub fn center_site(&self, n: usize) -> usize {
        let f = self.frames.iter().max_by(|a, b| a.peak_energy.total_cmp(&b.peak_energy)).expect("non-empty track");
        f.interval.center(n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionConfig {
    pub threshold_factor: f64,
    pub max_span: usize,
    pub min_lifetime: f64,
}

impl DetectionConfig {
    pub fn for_cut(omega_cut: f64) -> Self {
        Self {
            threshold_factor: DEFAULT_THRESHOLD,
            max_span: MAX_SPAN,
            min_lifetime: MIN_LIFETIME_PERIODS * 2.0 * PI / omega_cut,
        }
    }
}

/// Runs of flagged sites of width at most `max_span`, with their peak value.
/// Longer runs are not localized and are dropped.
fn flagged_intervals(g: &[f64], threshold: f64, max_span: usize) -> Vec<(SiteInterval, f64)> {
    let n = g.len();
    let hot: Vec<bool> = g.iter().map(|&x| x > threshold).collect();
    if hot.iter().all(|&h| h) {
        return Vec::new();
    }
    // start scanning just after a cold site so runs never wrap across the origin
    let origin = (0..n).find(|&j| !hot[j]).unwrap_or(0);
    let mut out = Vec::new();
    let mut i = 1;
    while i <= n {
        let j = (origin + i) % n;
        if hot[j] {
            let mut width = 0;
            let mut peak = f64::NEG_INFINITY;
            while width < n && hot[(j + width) % n] {
                peak = peak.max(g[(j + width) % n]);
                width += 1;
            }
            if width <= max_span {
                out.push((SiteInterval { start: j, width }, peak));
            }
            i += width;
        } else {
            i += 1;
        }
    }
    out
}

/// Detects localized hot spots frame by frame and links them into tracks.
/// `frames[t][j]` is an energy-like field sampled at `times[t]`; sites above
/// `threshold_factor * reference` are flagged.
pub fn detect_breathers(frames: &[Vec<f64>], times: &[f64], reference: f64, cfg: &DetectionConfig) -> Vec<BreatherTrack> {
    let threshold = cfg.threshold_factor * reference;
    let n = frames.first().map_or(0, Vec::len);
    let mut active: Vec<Vec<TrackFrame>> = Vec::new();
    let mut done: Vec<Vec<TrackFrame>> = Vec::new();
    for (g, &time) in frames.iter().zip(times) {
        let mut cands = flagged_intervals(g, threshold, cfg.max_span);
        cands.sort_by(|a, b| b.1.total_cmp(&a.1));
        let mut used = vec![false; cands.len()];
        let mut next = Vec::with_capacity(active.len());
        for track in active.drain(..) {
            let last = track.last().expect("tracks are non-empty").interval;
            match cands.iter().enumerate().position(|(c, (iv, _))| !used[c] && last.touches(iv, n)) {
                Some(c) => {
                    used[c] = true;
                    let mut t = track;
                    t.push(TrackFrame { time, interval: cands[c].0, peak_energy: cands[c].1 });
                    next.push(t);
                }
                None => done.push(track),
            }
        }
        for (c, (iv, peak)) in cands.iter().enumerate() {
            if !used[c] {
                next.push(vec![TrackFrame { time, interval: *iv, peak_energy: *peak }]);
            }
        }
        active = next;
    }
    done.extend(active);
    let frame_dt = if times.len() > 1 { times[1] - times[0] } else { 0.0 };
    let mut tracks: Vec<BreatherTrack> = done
        .into_iter()
        .filter_map(|frames| {
            let lifetime = frames.last()?.time - frames[0].time + frame_dt;
            if lifetime < cfg.min_lifetime {
                return None;
            }
            let mean_span = frames.iter().map(|f| f.interval.width as f64).sum::<f64>() / frames.len() as f64;
            Some(BreatherTrack { frames, lifetime, mean_span })
        })
        .collect();
    tracks.sort_by(|a, b| a.frames[0].time.total_cmp(&b.frames[0].time).then(a.frames[0].interval.start.cmp(&b.frames[0].interval.start)));
    tracks
}

/// Detection on site energies `G_j(t)` with the mean energy density as reference.
pub fn detect_in_site_energies(frames: &[Vec<f64>], times: &[f64], edensity: f64, cfg: &DetectionConfig) -> Vec<BreatherTrack> {
    detect_breathers(frames, times, edensity, cfg)
}

/// Detection on the energy proxy of a filtered field, referenced to its own mean.
pub fn detect_in_filtered(field: &FilteredField, cfg: &DetectionConfig) -> Vec<BreatherTrack> {
    let e = field.local_energy();
    let count = (field.sites() * field.frames()).max(1) as f64;
    let mean = e.iter().flatten().sum::<f64>() / count;
    let times: Vec<f64> = (0..field.frames()).map(|t| t as f64 * field.sample_dt).collect();
    detect_breathers(&e, &times, mean, cfg)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PiModeConfig {
    pub amplitude: f64,
    pub noise_amp: f64,
    pub seed: u64,
    pub dt: f64,
    pub horizon: f64,
    /// Spacing of the `L(t)` and `G_j(t)` frames.
    pub frame_dt: f64,
    /// Spacing of the wave samples collected over the breather window.
    pub spectrum_dt: f64,
    /// Number of wave samples in the breather window.
    pub spectrum_samples: usize,
    /// Minimum peak `L` for a breather window to be taken.
    pub window_level: f64,
}

impl Default for PiModeConfig {
    fn default() -> Self {
        Self {
            amplitude: 0.8,
            noise_amp: crate::chain::DEFAULT_PI_NOISE,
            seed: 1,
            dt: 0.01,
            horizon: 30_000.0,
            frame_dt: 0.5,
            spectrum_dt: 0.1,
            spectrum_samples: 16384,
            window_level: 3.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiModeRun {
    pub times: Vec<f64>,
    pub localization: Vec<f64>,
    /// `G_j(t)` at each frame.
    pub energy_frames: Vec<Vec<f64>>,
    /// `[start, end)` spectrum window centred on the localization maximum, clipped to the run.
    pub window: Option<(f64, f64)>,
    #[serde(skip)]
    pub spectrum: Option<SpectralDensity>,
}

impl PiModeRun {
    pub fn max_localization(&self) -> f64 {
        self.localization.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }
}

fn steps_for(interval: f64, dt: f64) -> Result<u64> {
    let s = (interval / dt).round();
    if !(s >= 1.0) || ((s * dt) - interval).abs() > 1e-9 * interval.max(1.0) {
        return Err(FpuError::InvalidParameter(format!("{interval} is not a multiple of dt = {dt}")));
    }
    Ok(s as u64)
}

/// Integrates the noisy pi-mode, records `L(t)` and `G_j(t)`, locates the breather
/// window and, by a deterministic re-run, collects the wave spectrum over it.
pub fn pi_mode_experiment(params: &ModelParams, cfg: &PiModeConfig) -> Result<PiModeRun> {
    let init = pi_mode_init(params, cfg.amplitude, cfg.noise_amp, cfg.seed)?;
    let every = steps_for(cfg.frame_dt, cfg.dt)?;
    let steps = (cfg.horizon / cfg.dt).round() as u64;
    let mut integ = Integrator::yoshida6(cfg.dt, params)?;
    let mut times = Vec::new();
    let mut localization = Vec::new();
    let mut energy_frames = Vec::new();
    let mut fail = None;
    let mut state = init.clone();
    integ.integrate_with(&mut state, steps, every, |s| {
        let g = site_energies_of(&s.q, &s.p, params.beta);
        match localization_of(&g) {
            Ok(l) => localization.push(l),
            Err(e) => fail = Some(e),
        }
        times.push(s.t);
        energy_frames.push(g);
    })?;
    if let Some(e) = fail {
        return Err(e);
    }
    let span = cfg.spectrum_samples as f64 * cfg.spectrum_dt;
    let window = breather_window(&times, &localization, cfg.window_level, span, cfg.horizon);
    let spectrum = match window {
        Some((t0, _)) => Some(window_spectrum(params, &init, cfg, t0)?),
        None => None,
    };
    Ok(PiModeRun { times, localization, energy_frames, window, spectrum })
}

fn breather_window(times: &[f64], l: &[f64], level: f64, span: f64, horizon: f64) -> Option<(f64, f64)> {
    let (imax, &lmax) = l.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1))?;
    if lmax < level || span > horizon {
        return None;
    }
    let t0 = (times[imax] - 0.5 * span).clamp(0.0, horizon - span);
    Some((t0, t0 + span))
}

fn window_spectrum(params: &ModelParams, init: &ChainState, cfg: &PiModeConfig, t0: f64) -> Result<SpectralDensity> {
    let every = steps_for(cfg.spectrum_dt, cfg.dt)?;
    let start = (t0 / cfg.dt).round() as u64;
    let span = every * (cfg.spectrum_samples as u64 - 1);
    let mut integ = Integrator::new(crate::integrator::CompositionScheme::yoshida6(), cfg.dt, params.beta)?;
    let mut state = init.clone();
    for _ in 0..start {
        integ.step(&mut state);
    }
    let n = params.n;
    let mut tr = ModeTransformer::new(n);
    let mut series = FourierSeries::new(n, (1..n).collect(), cfg.spectrum_dt)?;
    let mut fail = None;
    integ.integrate_with(&mut state, span, every, |s| match tr.to_fourier(s) {
        Ok(f) => series.push(&f),
        Err(e) => fail = Some(e),
    })?;
    if let Some(e) = fail {
        return Err(e);
    }
    let max_omega = PI / cfg.spectrum_dt / 1.5 * 0.999;
    spatiotemporal_spectrum(&series.waves(1.0), max_omega, Window::Hann, 4)
}

/// Smallest power fraction above the gap for a high-frequency branch to count.
pub const MIN_BRANCH_FRACTION: f64 = 0.01;

/// Spectral gap that separates a high-frequency branch from the linear band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandGap {
    /// Centre of the deepest bin between the band and the branch.
    pub omega: f64,
    /// Gap power over the smaller of the two flanking peak powers.
    pub depth: f64,
    /// Fraction of the positive-frequency power above the gap.
    pub power_above: f64,
}

/// Sums the spectrum over all wave numbers into bins of width `bin` on
/// `[0, omega_max)` and finds the deepest valley above `omega_min` that still
/// leaves at least [`MIN_BRANCH_FRACTION`] of the power above it.
pub fn band_gap(s: &SpectralDensity, bin: f64, omega_min: f64) -> Option<BandGap> {
    if !(bin > 0.0) {
        return None;
    }
    let top = s.omega_grid.iter().cloned().fold(0.0, f64::max);
    let bins = (top / bin).floor() as usize;
    if bins < 3 {
        return None;
    }
    let mut prof = vec![0.0; bins];
    for row in &s.power {
        for (&w, &x) in s.omega_grid.iter().zip(row) {
            if w >= 0.0 {
                let b = (w / bin) as usize;
                if b < bins {
                    prof[b] += x;
                }
            }
        }
    }
    let total: f64 = prof.iter().sum();
    if !(total > 0.0) {
        return None;
    }
    let mut above = vec![0.0; bins + 1];
    for b in (0..bins).rev() {
        above[b] = above[b + 1] + prof[b];
    }
    let mut best: Option<BandGap> = None;
    for g in 1..bins - 1 {
        let omega = (g as f64 + 0.5) * bin;
        let frac = above[g + 1] / total;
        if omega <= omega_min || frac < MIN_BRANCH_FRACTION {
            continue;
        }
        let lower = prof[..g].iter().cloned().fold(0.0, f64::max);
        let upper = prof[g + 1..].iter().cloned().fold(0.0, f64::max);
        let depth = prof[g] / lower.min(upper);
        if best.is_none_or(|b| depth < b.depth) {
            best = Some(BandGap { omega, depth, power_above: frac });
        }
    }
    best
}
