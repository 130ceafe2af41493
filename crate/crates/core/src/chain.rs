//! Physical-space representation of the periodic beta-FPU chain.
//!
//! Particles are indexed `0..N` with periodic identification `q_N == q_0`.
//! The bond to the right of particle `j` is `q_{j+1} - q_j`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{FpuError, Result};

/// Redraws allowed before [`random_thermal_init`] gives up on a zero-energy draw.
const MAX_REDRAWS: usize = 16;

/// Default momentum noise used to destabilize the pi-mode.
pub const DEFAULT_PI_NOISE: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    pub n: usize,
    pub beta: f64,
    pub energy: f64,
    pub edensity: f64,
}

impl ModelParams {
    pub fn new(n: usize, beta: f64, energy: f64) -> Result<Self> {
        if n < 4 || n % 2 != 0 {
            return Err(FpuError::InvalidParameter(format!(
                "chain length must be even and at least 4, got {n}"
            )));
        }
        if !(beta >= 0.0) || !beta.is_finite() {
            return Err(FpuError::InvalidParameter(format!("beta must be >= 0, got {beta}")));
        }
        if !(energy > 0.0) || !energy.is_finite() {
            return Err(FpuError::InvalidParameter(format!("energy must be > 0, got {energy}")));
        }
        Ok(Self { n, beta, energy, edensity: energy / n as f64 })
    }

    /// Parameters at fixed energy density rather than fixed total energy.
    pub fn with_edensity(n: usize, beta: f64, edensity: f64) -> Result<Self> {
        Self::new(n, beta, edensity * n as f64)
    }

    /// Re-validates a deserialized value, including the derived energy density.
    pub fn validate(&self) -> Result<()> {
        let fresh = Self::new(self.n, self.beta, self.energy)?;
        if fresh.edensity != self.edensity {
            return Err(FpuError::InvalidParameter(format!(
                "edensity {} does not equal energy / n = {}",
                self.edensity, fresh.edensity
            )));
        }
        Ok(())
    }
}

/// Snapshot of displacements and momenta at time `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainState {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    pub t: f64,
}

impl ChainState {
    pub fn new(q: Vec<f64>, p: Vec<f64>, t: f64) -> Result<Self> {
        if q.len() != p.len() {
            return Err(FpuError::LengthMismatch { expected: q.len(), got: p.len() });
        }
        let n = q.len();
        if n < 4 || n % 2 != 0 {
            return Err(FpuError::InvalidParameter(format!(
                "chain length must be even and at least 4, got {n}"
            )));
        }
        Ok(Self { q, p, t })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(vec![0.0; n], vec![0.0; n], 0.0)
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    pub fn total_momentum(&self) -> f64 {
        self.p.iter().sum()
    }

    pub fn is_finite(&self) -> bool {
        self.q.iter().chain(self.p.iter()).all(|x| x.is_finite())
    }

    /// The state with every coordinate multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            q: self.q.iter().map(|x| s * x).collect(),
            p: self.p.iter().map(|x| s * x).collect(),
            t: self.t,
        }
    }

    fn check(&self, params: &ModelParams) -> Result<()> {
        if self.q.len() != params.n {
            return Err(FpuError::LengthMismatch { expected: params.n, got: self.q.len() });
        }
        if self.p.len() != params.n {
            return Err(FpuError::LengthMismatch { expected: params.n, got: self.p.len() });
        }
        Ok(())
    }
}

/// Per-particle energies `G_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct SiteEnergy {
    pub g: Vec<f64>,
}

impl SiteEnergy {
    pub fn total(&self) -> f64 {
        self.g.iter().sum()
    }
}

#[inline]
fn bond_energy(y: f64, beta: f64) -> f64 {
    let y2 = y * y;
    0.5 * y2 + 0.25 * beta * y2 * y2
}

/// Hamiltonian of raw coordinate slices. Works for any `N >= 2`.
pub fn hamiltonian(q: &[f64], p: &[f64], beta: f64) -> f64 {
    let n = q.len();
    let kinetic: f64 = p.iter().map(|x| 0.5 * x * x).sum();
    let potential: f64 = (0..n)
        .map(|j| bond_energy(q[j] - q[(j + 1) % n], beta))
        .sum();
    kinetic + potential
}

/// Kinetic, quadratic-potential and quartic-potential parts `(K, U, V)`.
pub fn energy_parts(q: &[f64], p: &[f64], beta: f64) -> (f64, f64, f64) {
    let n = q.len();
    let k: f64 = p.iter().map(|x| 0.5 * x * x).sum();
    let mut u = 0.0;
    let mut v = 0.0;
    for j in 0..n {
        let y = q[(j + 1) % n] - q[j];
        let y2 = y * y;
        u += 0.5 * y2;
        v += 0.25 * beta * y2 * y2;
    }
    (k, u, v)
}

pub fn total_energy(state: &ChainState, params: &ModelParams) -> Result<f64> {
    state.check(params)?;
    Ok(hamiltonian(&state.q, &state.p, params.beta))
}

/// Writes `dp_j/dt` into `out`. `out.len()` must equal `q.len()`.
pub fn forces_into(q: &[f64], beta: f64, out: &mut [f64]) {
    let n = q.len();
    debug_assert_eq!(out.len(), n);
    // F(y) on the bond left of site 0, i.e. between q_{N-1} and q_0
    let y_last = q[0] - q[n - 1];
    let mut left = y_last + beta * y_last * y_last * y_last;
    for j in 0..n {
        let next = if j + 1 == n { q[0] } else { q[j + 1] };
        let y = next - q[j];
        let right = y + beta * y * y * y;
        out[j] = right - left;
        left = right;
    }
}

pub fn forces(q: &[f64], beta: f64) -> Vec<f64> {
    let mut out = vec![0.0; q.len()];
    forces_into(q, beta, &mut out);
    out
}

/// Site energies of raw slices.
pub fn site_energies_of(q: &[f64], p: &[f64], beta: f64) -> Vec<f64> {
    let n = q.len();
    // bond energies b_j for bond (j, j+1); each site takes half of both neighbouring bonds
    let bonds: Vec<f64> = (0..n).map(|j| bond_energy(q[j] - q[(j + 1) % n], beta)).collect();
    (0..n)
        .map(|j| 0.5 * p[j] * p[j] + 0.5 * (bonds[j] + bonds[(j + n - 1) % n]))
        .collect()
}

pub fn site_energies(state: &ChainState, params: &ModelParams) -> Result<SiteEnergy> {
    state.check(params)?;
    Ok(SiteEnergy { g: site_energies_of(&state.q, &state.p, params.beta) })
}

/// `L = N sum G_j^2 / (sum G_j)^2`, between 1 (uniform) and N (one site).
pub fn localization_of(g: &[f64]) -> Result<f64> {
    let total: f64 = g.iter().sum();
    if !(total > 0.0) {
        return Err(FpuError::UndefinedLocalization);
    }
    let sq: f64 = g.iter().map(|x| x * x).sum();
    Ok(g.len() as f64 * sq / (total * total))
}

pub fn localization(state: &ChainState, params: &ModelParams) -> Result<f64> {
    let g = site_energies(state, params)?;
    localization_of(&g.g)
}

fn subtract_mean(x: &mut [f64]) {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    x.iter_mut().for_each(|v| *v -= mean);
}

/// Scale factor `s > 0` with `H(s q, s p) = energy`, where `H(s) = s^2 h2 + s^4 h4`.
fn energy_scale(h2: f64, h4: f64, energy: f64) -> f64 {
    let s2 = if h4 > 0.0 {
        // stable root of h4 x^2 + h2 x - E = 0
        2.0 * energy / (h2 + (h2 * h2 + 4.0 * h4 * energy).sqrt())
    } else {
        energy / h2
    };
    let mut s = s2.sqrt();
    // one Newton polish on H(s) - E
    for _ in 0..2 {
        let s2 = s * s;
        let f = s2 * h2 + s2 * s2 * h4 - energy;
        let df = 2.0 * s * h2 + 4.0 * s2 * s * h4;
        if df > 0.0 {
            s -= f / df;
        }
    }
    s
}

/// Uniform random draw constrained to zero total momentum, zero mean displacement
/// and total energy `params.energy`.
pub fn random_thermal_init(params: &ModelParams, seed: u64, pmax: f64, qmax: f64) -> Result<ChainState> {
    if !(pmax > 0.0) || !(qmax > 0.0) {
        return Err(FpuError::InvalidParameter("pmax and qmax must be positive".into()));
    }
    let n = params.n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_REDRAWS {
        let mut q: Vec<f64> = (0..n).map(|_| rng.random_range(-qmax..qmax)).collect();
        let mut p: Vec<f64> = (0..n).map(|_| rng.random_range(-pmax..pmax)).collect();
        subtract_mean(&mut q);
        subtract_mean(&mut p);
        let (k, u, v) = energy_parts(&q, &p, params.beta);
        let h2 = k + u;
        if !(h2 > 0.0) {
            continue;
        }
        let s = energy_scale(h2, v, params.energy);
        q.iter_mut().for_each(|x| *x *= s);
        p.iter_mut().for_each(|x| *x *= s);
        return ChainState::new(q, p, 0.0);
    }
    Err(FpuError::DegenerateDraw(MAX_REDRAWS))
}

/// Zig-zag state `q_j = (-1)^j a` with mean-free uniform momentum noise.
pub fn pi_mode_init(params: &ModelParams, amplitude: f64, noise_amp: f64, seed: u64) -> Result<ChainState> {
    let n = params.n;
    if n % 2 != 0 {
        return Err(FpuError::InvalidParameter("pi-mode requires an even chain length".into()));
    }
    let q: Vec<f64> = (0..n).map(|j| if j % 2 == 0 { amplitude } else { -amplitude }).collect();
    let mut p = vec![0.0; n];
    if noise_amp > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        p.iter_mut().for_each(|x| *x = rng.random_range(-noise_amp..noise_amp));
        subtract_mean(&mut p);
    }
    ChainState::new(q, p, 0.0)
}

/// Total energy of the pi-mode with amplitude `a` (per site `2a^2 + 4 beta a^4`).
pub fn pi_mode_energy(n: usize, beta: f64, amplitude: f64) -> f64 {
    n as f64 * bond_energy(2.0 * amplitude, beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn params(n: usize, beta: f64) -> ModelParams {
        ModelParams::new(n, beta, 1.0).unwrap()
    }

    #[test]
    fn zero_state_has_zero_energy() {
        let s = ChainState::zeros(8).unwrap();
        let prm = params(8, 1.0);
        assert_eq!(total_energy(&s, &prm).unwrap(), 0.0);
        assert!(site_energies(&s, &prm).unwrap().g.iter().all(|&g| g == 0.0));
        assert_eq!(localization(&s, &prm), Err(FpuError::UndefinedLocalization));
    }

    #[test]
    fn two_particle_hamiltonian_by_hand() {
        let (a, beta) = (0.7, 2.5);
        let h = hamiltonian(&[a, 0.0], &[0.0, 0.0], beta);
        assert_relative_eq!(h, a * a + beta * a.powi(4) / 2.0, max_relative = 1e-15);
    }

    #[test]
    fn length_mismatch_is_reported() {
        let s = ChainState::zeros(8).unwrap();
        let prm = params(10, 1.0);
        assert_eq!(total_energy(&s, &prm), Err(FpuError::LengthMismatch { expected: 10, got: 8 }));
        assert!(ChainState::new(vec![0.0; 4], vec![0.0; 6], 0.0).is_err());
        assert!(ChainState::new(vec![0.0; 5], vec![0.0; 5], 0.0).is_err());
    }

    #[test]
    fn constant_displacement_gives_zero_force() {
        let f = forces(&[3.2; 16], 4.0);
        assert!(f.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn harmonic_eigenvectors() {
        let n = 32;
        for k in [1usize, 5, 16, 31] {
            let q: Vec<f64> = (0..n).map(|j| (2.0 * PI * (k * j) as f64 / n as f64).cos()).collect();
            let w = 2.0 * (PI * k as f64 / n as f64).sin();
            let f = forces(&q, 0.0);
            for j in 0..n {
                assert!((f[j] + w * w * q[j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn displaced_particle_shares_bond_energy() {
        let mut q = vec![0.0; 8];
        q[3] = 0.4;
        let g = site_energies_of(&q, &[0.0; 8], 1.5);
        let b = bond_energy(0.4, 1.5);
        assert_relative_eq!(g[3], b, max_relative = 1e-15);
        assert_relative_eq!(g[2], 0.5 * b, max_relative = 1e-15);
        assert_relative_eq!(g[4], 0.5 * b, max_relative = 1e-15);
        assert_relative_eq!(g.iter().sum::<f64>(), hamiltonian(&q, &[0.0; 8], 1.5), max_relative = 1e-15);
    }

    #[test]
    fn localization_extremes() {
        assert_relative_eq!(localization_of(&[2.0; 10]).unwrap(), 1.0, max_relative = 1e-15);
        let mut g = vec![0.0; 10];
        g[3] = 5.0;
        assert_relative_eq!(localization_of(&g).unwrap(), 10.0, max_relative = 1e-15);
    }

    #[test]
    fn thermal_init_constraints_and_determinism() {
        let prm = ModelParams::new(128, 1.0, 100.0).unwrap();
        for seed in 0..10 {
            let s = random_thermal_init(&prm, seed, 1.0, 1.0).unwrap();
            assert!(s.total_momentum().abs() <= 1e-12 * 128.0);
            let h = total_energy(&s, &prm).unwrap();
            assert!((h - 100.0).abs() <= 1e-10 * 100.0, "seed {seed}: H = {h}");
        }
        let a = random_thermal_init(&prm, 42, 1.0, 1.0).unwrap();
        let b = random_thermal_init(&prm, 42, 1.0, 1.0).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, random_thermal_init(&prm, 43, 1.0, 1.0).unwrap());
    }

    #[test]
    fn pi_mode_is_uniform() {
        let prm = ModelParams::new(128, 0.1, 1.0).unwrap();
        let s = pi_mode_init(&prm, 0.8, 1e-14, 3).unwrap();
        assert!((localization(&s, &prm).unwrap() - 1.0).abs() < 1e-12);
        let exact = pi_mode_init(&prm, 0.8, 0.0, 3).unwrap();
        assert!(exact.p.iter().all(|&x| x == 0.0));
        assert_relative_eq!(
            total_energy(&exact, &prm).unwrap(),
            pi_mode_energy(128, 0.1, 0.8),
            max_relative = 1e-14
        );
    }
}
