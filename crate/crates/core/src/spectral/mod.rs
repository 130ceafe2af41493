//! Mode-space transforms and the statistical estimators built on them.
//!
//! Fourier convention: `Q_k = N^{-1/2} sum_j q_j exp(+2 pi i k j / N)` with
//! `j, k = 0..N`. Renormalized waves are
//! `a~_k = (P_k - i w~_k Q_k) / sqrt(2 w~_k)` with `w~_k = eta w_k`.

mod estimate;
mod stats;

pub use estimate::{
    autocorrelation, measure_eta, measure_eta_fixed_point, spatiotemporal_spectrum, spatiotemporal_spectrum_padded,
    spectrum_from_correlation, two_sided_frequencies, EtaMeasurement, SpectralDensity, Window,
};
pub use stats::{ComplexEstimate, ModeStatistics, ModeStatsReport, RealEstimate};

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::chain::ChainState;
use crate::error::{FpuError, Result};

/// `w_k = 2 sin(pi k / N)` for `k = 0..N` (so `w_0 = 0`).
pub fn linear_dispersion(n: usize) -> Vec<f64> {
    (0..n).map(|k| 2.0 * (PI * k as f64 / n as f64).sin()).collect()
}

/// Fourier coefficients of displacements and momenta, indices `0..N`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierField {
    pub qk: Vec<Complex64>,
    pub pk: Vec<Complex64>,
}

impl FourierField {
    pub fn len(&self) -> usize {
        self.qk.len()
    }

    pub fn is_empty(&self) -> bool {
        self.qk.is_empty()
    }

    /// Largest violation of `X_{N-k} = conj(X_k)` over both fields.
    pub fn reality_defect(&self) -> f64 {
        let n = self.len();
        let mut worst: f64 = 0.0;
        for k in 0..n {
            let m = (n - k) % n;
            worst = worst.max((self.qk[m] - self.qk[k].conj()).norm());
            worst = worst.max((self.pk[m] - self.pk[k].conj()).norm());
        }
        worst
    }

    /// `1/2 sum_k (|P_k|^2 + w_k^2 |Q_k|^2)`, equal to the quadratic part of the Hamiltonian.
    pub fn quadratic_energy(&self) -> f64 {
        let w = linear_dispersion(self.len());
        self.qk
            .iter()
            .zip(&self.pk)
            .zip(&w)
            .map(|((q, p), w)| 0.5 * (p.norm_sqr() + w * w * q.norm_sqr()))
            .sum()
    }
}

/// Renormalized wave amplitudes. Index `k` is stored at position `k`; slot 0 is
/// unused and holds zero. The zero mode is carried separately so round trips are exact.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveField {
    pub ak: Vec<Complex64>,
    pub omega_tilde: Vec<f64>,
    pub eta_used: f64,
    pub q0: Complex64,
    pub p0: Complex64,
}

impl WaveField {
    pub fn len(&self) -> usize {
        self.ak.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ak.is_empty()
    }
}

/// Cached FFT plans for chains of one length.
pub struct ModeTransformer {
    n: usize,
    // e^{+i}: rustfft's inverse direction
    plus: Arc<dyn Fft<f64>>,
    minus: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
    buf: Vec<Complex64>,
    omega: Vec<f64>,
}

impl std::fmt::Debug for ModeTransformer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ModeTransformer").field("n", &self.n).finish()
    }
}

impl ModeTransformer {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        let plus = planner.plan_fft_inverse(n);
        let minus = planner.plan_fft_forward(n);
        let len = plus.get_inplace_scratch_len().max(minus.get_inplace_scratch_len());
        Self {
            n,
            plus,
            minus,
            scratch: vec![Complex64::default(); len],
            buf: vec![Complex64::default(); n],
            omega: linear_dispersion(n),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    fn check(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(FpuError::LengthMismatch { expected: self.n, got: len });
        }
        Ok(())
    }

    /// `N^{-1/2} sum_j x_j exp(+2 pi i k j / N)`.
    pub fn forward_real(&mut self, x: &[f64]) -> Result<Vec<Complex64>> {
        self.check(x.len())?;
        let s = 1.0 / (self.n as f64).sqrt();
        for (b, &v) in self.buf.iter_mut().zip(x) {
            *b = Complex64::new(v * s, 0.0);
        }
        self.plus.process_with_scratch(&mut self.buf, &mut self.scratch);
        Ok(self.buf.clone())
    }

    /// Inverse of [`forward_real`](Self::forward_real) for reality-symmetric input.
    pub fn inverse_real(&mut self, xk: &[Complex64]) -> Result<Vec<f64>> {
        self.check(xk.len())?;
        let s = 1.0 / (self.n as f64).sqrt();
        for (b, &v) in self.buf.iter_mut().zip(xk) {
            *b = v * s;
        }
        self.minus.process_with_scratch(&mut self.buf, &mut self.scratch);
        Ok(self.buf.iter().map(|c| c.re).collect())
    }

    pub fn to_fourier(&mut self, state: &ChainState) -> Result<FourierField> {
        self.fourier_of(&state.q, &state.p)
    }

    pub fn fourier_of(&mut self, q: &[f64], p: &[f64]) -> Result<FourierField> {
        let qk = self.forward_real(q)?;
        let pk = self.forward_real(p)?;
        Ok(FourierField { qk, pk })
    }

    pub fn from_fourier(&mut self, f: &FourierField, t: f64) -> Result<ChainState> {
        let q = self.inverse_real(&f.qk)?;
        let p = self.inverse_real(&f.pk)?;
        ChainState::new(q, p, t)
    }

    /// Fourier transform of the bond stretches `y_j = q_j - q_{j-1}`.
    pub fn relative_displacement_modes(&mut self, q: &[f64]) -> Result<Vec<Complex64>> {
        self.check(q.len())?;
        let n = self.n;
        let y: Vec<f64> = (0..n).map(|j| q[j] - q[(j + n - 1) % n]).collect();
        self.forward_real(&y)
    }

    pub fn to_waves(&self, f: &FourierField, eta: f64) -> Result<WaveField> {
        self.check(f.len())?;
        if !(eta > 0.0) {
            return Err(FpuError::InvalidParameter(format!("eta must be positive, got {eta}")));
        }
        let n = self.n;
        let omega_tilde: Vec<f64> = self.omega.iter().map(|w| eta * w).collect();
        let mut ak = vec![Complex64::default(); n];
        for k in 1..n {
            ak[k] = wave_of(f.pk[k], f.qk[k], omega_tilde[k]);
        }
        Ok(WaveField { ak, omega_tilde, eta_used: eta, q0: f.qk[0], p0: f.pk[0] })
    }

    pub fn from_waves(&self, w: &WaveField) -> Result<FourierField> {
        self.check(w.len())?;
        let n = self.n;
        let mut qk = vec![Complex64::default(); n];
        let mut pk = vec![Complex64::default(); n];
        qk[0] = w.q0;
        pk[0] = w.p0;
        let i = Complex64::i();
        for k in 1..n {
            let wt = w.omega_tilde[k];
            let a = w.ak[k];
            let b = w.ak[n - k].conj();
            pk[k] = (wt / 2.0).sqrt() * (a + b);
            qk[k] = i / (2.0 * wt).sqrt() * (a - b);
        }
        Ok(FourierField { qk, pk })
    }

    pub fn waves_of_state(&mut self, state: &ChainState, eta: f64) -> Result<WaveField> {
        let f = self.to_fourier(state)?;
        self.to_waves(&f, eta)
    }
}

#[inline]
pub(crate) fn wave_of(p: Complex64, q: Complex64, omega_tilde: f64) -> Complex64 {
    (p - Complex64::i() * omega_tilde * q) / (2.0 * omega_tilde).sqrt()
}

/// Bare waves `a_k` expressed through renormalized ones:
/// `a_k = (sqrt(eta) + 1/sqrt(eta))/2 a~_k + (sqrt(eta) - 1/sqrt(eta))/2 conj(a~_{N-k})`.
pub fn bare_from_renormalized(w: &WaveField) -> Vec<Complex64> {
    let n = w.len();
    let r = w.eta_used.sqrt();
    let plus = 0.5 * (r + 1.0 / r);
    let minus = 0.5 * (r - 1.0 / r);
    let mut out = vec![Complex64::default(); n];
    for k in 1..n {
        out[k] = plus * w.ak[k] + minus * w.ak[n - k].conj();
    }
    out
}

/// Time series of `(Q_k, P_k)` for a fixed list of wave numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierSeries {
    pub n: usize,
    pub k_list: Vec<usize>,
    pub sample_dt: f64,
    pub q: Vec<Vec<Complex64>>,
    pub p: Vec<Vec<Complex64>>,
}

impl FourierSeries {
    pub fn new(n: usize, k_list: Vec<usize>, sample_dt: f64) -> Result<Self> {
        if let Some(&k) = k_list.iter().find(|&&k| k == 0 || k >= n) {
            return Err(FpuError::InvalidParameter(format!("wave number {k} outside 1..{n}")));
        }
        let m = k_list.len();
        Ok(Self { n, k_list, sample_dt, q: vec![Vec::new(); m], p: vec![Vec::new(); m] })
    }

    pub fn push(&mut self, f: &FourierField) {
        for (i, &k) in self.k_list.iter().enumerate() {
            self.q[i].push(f.qk[k]);
            self.p[i].push(f.pk[k]);
        }
    }

    pub fn samples(&self) -> usize {
        self.q.first().map_or(0, Vec::len)
    }

    /// Renormalized wave series built with factor `eta`.
    pub fn waves(&self, eta: f64) -> ModeSeries {
        let omega = linear_dispersion(self.n);
        let data = self
            .k_list
            .iter()
            .enumerate()
            .map(|(i, &k)| {
                let wt = eta * omega[k];
                self.q[i].iter().zip(&self.p[i]).map(|(&q, &p)| wave_of(p, q, wt)).collect()
            })
            .collect();
        ModeSeries { k_list: self.k_list.clone(), sample_dt: self.sample_dt, data }
    }
}

/// Complex time series `x_k(t_i)`, one row per entry of `k_list`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSeries {
    pub k_list: Vec<usize>,
    pub sample_dt: f64,
    pub data: Vec<Vec<Complex64>>,
}

impl ModeSeries {
    pub fn samples(&self) -> usize {
        self.data.first().map_or(0, Vec::len)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{energy_parts, random_thermal_init, ModelParams};

    fn random_state(n: usize, seed: u64) -> ChainState {
        let prm = ModelParams::new(n, 0.5, n as f64 * 0.4).unwrap();
        random_thermal_init(&prm, seed, 1.0, 1.0).unwrap()
    }

    #[test]
    fn impulse_has_flat_spectrum() {
        let n = 16;
        let mut t = ModeTransformer::new(n);
        let mut q = vec![0.0; n];
        q[1] = 1.0;
        let qk = t.forward_real(&q).unwrap();
        for (k, c) in qk.iter().enumerate() {
            assert!((c.norm() - 0.25).abs() < 1e-15);
            let phase = 2.0 * PI * k as f64 / n as f64;
            assert!((c - 0.25 * Complex64::from_polar(1.0, phase)).norm() < 1e-15);
        }
    }

    #[test]
    fn fourier_round_trip_and_parseval() {
        let s = random_state(64, 3);
        let mut t = ModeTransformer::new(64);
        let f = t.to_fourier(&s).unwrap();
        assert!(f.reality_defect() < 1e-12);
        assert!(f.qk[0].norm() < 1e-12 && f.pk[0].norm() < 1e-12);
        let back = t.from_fourier(&f, s.t).unwrap();
        for j in 0..64 {
            assert!((back.q[j] - s.q[j]).abs() < 1e-12);
            assert!((back.p[j] - s.p[j]).abs() < 1e-12);
        }
        let lhs: f64 = s.p.iter().map(|x| x * x).sum();
        let rhs: f64 = f.pk.iter().map(|c| c.norm_sqr()).sum();
        assert!((lhs - rhs).abs() < 1e-12 * lhs);
        let (k, u, _) = energy_parts(&s.q, &s.p, 0.5);
        assert!((f.quadratic_energy() - (k + u)).abs() < 1e-10 * (k + u));
    }

    #[test]
    fn dispersion_symmetry() {
        let w = linear_dispersion(32);
        assert!((w[16] - 2.0).abs() < 1e-15);
        for k in 1..32 {
            assert!((w[k] - w[32 - k]).abs() < 1e-14);
        }
    }

    #[test]
    fn wave_round_trip() {
        let s = random_state(32, 5);
        let mut t = ModeTransformer::new(32);
        let f = t.to_fourier(&s).unwrap();
        for eta in [1.0, 1.18, 2.7] {
            let w = t.to_waves(&f, eta).unwrap();
            let f2 = t.from_waves(&w).unwrap();
            let w2 = t.to_waves(&f2, eta).unwrap();
            for k in 1..32 {
                assert!((w.ak[k] - w2.ak[k]).norm() < 1e-12);
                assert!((f.qk[k] - f2.qk[k]).norm() < 1e-12);
                assert!((f.pk[k] - f2.pk[k]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn bare_waves_from_renormalized() {
        let s = random_state(32, 8);
        let mut t = ModeTransformer::new(32);
        let f = t.to_fourier(&s).unwrap();
        let bare = t.to_waves(&f, 1.0).unwrap();
        let ren = t.to_waves(&f, 1.3).unwrap();
        let rebuilt = bare_from_renormalized(&ren);
        for k in 1..32 {
            assert!((rebuilt[k] - bare.ak[k]).norm() < 1e-12);
        }
    }

    #[test]
    fn relative_displacement_identity() {
        let s = random_state(64, 11);
        let mut t = ModeTransformer::new(64);
        let qk = t.forward_real(&s.q).unwrap();
        let yk = t.relative_displacement_modes(&s.q).unwrap();
        let w = linear_dispersion(64);
        for k in 0..64 {
            let phase = Complex64::from_polar(1.0, PI * k as f64 / 64.0);
            let predicted = -Complex64::i() * phase * w[k] * qk[k];
            assert!((yk[k] - predicted).norm() < 1e-12, "k = {k}");
        }
    }

    #[test]
    fn series_waves_match_field_waves() {
        let s = random_state(16, 2);
        let mut t = ModeTransformer::new(16);
        let f = t.to_fourier(&s).unwrap();
        let mut fs = FourierSeries::new(16, vec![1, 5, 15], 0.1).unwrap();
        fs.push(&f);
        let ms = fs.waves(1.2);
        let w = t.to_waves(&f, 1.2).unwrap();
        for (i, &k) in ms.k_list.iter().enumerate() {
            assert!((ms.data[i][0] - w.ak[k]).norm() < 1e-15);
        }
        assert!(FourierSeries::new(16, vec![0], 0.1).is_err());
    }
}
