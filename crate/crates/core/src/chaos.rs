//! Largest Lyapunov exponent of the chain from tangent dynamics with periodic
//! renormalization, and the logistic-map exponent used as an oracle.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chain::{random_thermal_init, ModelParams};
use crate::error::{FpuError, Result};
use crate::integrator::Integrator;

/// Perturbation `(delta, eps)` of `(q, p)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangentState {
    pub delta: Vec<f64>,
    pub eps: Vec<f64>,
    pub norm0: f64,
}

impl TangentState {
    pub fn new(delta: Vec<f64>, eps: Vec<f64>, norm0: f64) -> Result<Self> {
        if delta.len() != eps.len() {
            return Err(FpuError::LengthMismatch { expected: delta.len(), got: eps.len() });
        }
        if !(norm0 > 0.0) {
            return Err(FpuError::InvalidParameter("norm0 must be positive".into()));
        }
        Ok(Self { delta, eps, norm0 })
    }

    /// Random direction scaled to `norm0`.
    pub fn random(n: usize, norm0: f64, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let delta = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let eps = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut t = Self::new(delta, eps, norm0)?;
        t.renormalize();
        Ok(t)
    }

    /// Joint Euclidean norm of `(delta, eps)`.
    pub fn norm(&self) -> f64 {
        self.delta.iter().chain(&self.eps).map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Rescales to `norm0` and returns the norm before rescaling.
    pub fn renormalize(&mut self) -> f64 {
        let d = self.norm();
        let s = self.norm0 / d;
        self.delta.iter_mut().chain(self.eps.iter_mut()).for_each(|x| *x *= s);
        d
    }

    pub fn is_finite(&self) -> bool {
        self.delta.iter().chain(&self.eps).all(|x| x.is_finite())
    }
}

/// Linearized force `dF_j = (1 + 3 beta r_j^2)(d_{j+1} - d_j) - (1 + 3 beta r_{j-1}^2)(d_j - d_{j-1})`
/// with `r_j = q_{j+1} - q_j`.
pub fn tangent_force_into(q: &[f64], delta: &[f64], beta: f64, out: &mut [f64]) {
    let n = q.len();
    let stiff = |j: usize| {
        let r = q[(j + 1) % n] - q[j];
        (1.0 + 3.0 * beta * r * r) * (delta[(j + 1) % n] - delta[j])
    };
    let mut prev = stiff(n - 1);
    for j in 0..n {
        let cur = stiff(j);
        out[j] = cur - prev;
        prev = cur;
    }
}

/// One classical RK4 step of the variational equations along a base step from
/// `(q0, p0)` to `(q1, p1)`. The base midpoint is the cubic Hermite interpolant.
pub fn tangent_step(
    q0: &[f64],
    p0: &[f64],
    q1: &[f64],
    p1: &[f64],
    tangent: &mut TangentState,
    dt: f64,
    beta: f64,
) -> Result<()> {
    let n = q0.len();
    for len in [p0.len(), q1.len(), p1.len(), tangent.delta.len()] {
        if len != n {
            return Err(FpuError::LengthMismatch { expected: n, got: len });
        }
    }
    let qm: Vec<f64> = (0..n).map(|j| 0.5 * (q0[j] + q1[j]) + dt * (p0[j] - p1[j]) / 8.0).collect();
    let d0 = &tangent.delta;
    let e0 = &tangent.eps;
    let mut f = vec![0.0; n];
    let axpy = |x: &[f64], y: &[f64], h: f64| -> Vec<f64> { x.iter().zip(y).map(|(a, b)| a + h * b).collect() };

    tangent_force_into(q0, d0, beta, &mut f);
    let (k1d, k1e) = (e0.clone(), f.clone());
    let d = axpy(d0, &k1d, 0.5 * dt);
    let e = axpy(e0, &k1e, 0.5 * dt);
    tangent_force_into(&qm, &d, beta, &mut f);
    let (k2d, k2e) = (e, f.clone());
    let d = axpy(d0, &k2d, 0.5 * dt);
    let e = axpy(e0, &k2e, 0.5 * dt);
    tangent_force_into(&qm, &d, beta, &mut f);
    let (k3d, k3e) = (e, f.clone());
    let d = axpy(d0, &k3d, dt);
    let e = axpy(e0, &k3e, dt);
    tangent_force_into(q1, &d, beta, &mut f);
    let (k4d, k4e) = (e, f);

    let h = dt / 6.0;
    for j in 0..n {
        tangent.delta[j] += h * (k1d[j] + 2.0 * k2d[j] + 2.0 * k3d[j] + k4d[j]);
        tangent.eps[j] += h * (k1e[j] + 2.0 * k2e[j] + 2.0 * k3e[j] + k4e[j]);
    }
    if !tangent.is_finite() {
        return Err(FpuError::NumericalBlowUp { step: 0 });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LyapunovConfig {
    pub dt: f64,
    /// Time between renormalizations.
    pub renorm_interval: f64,
    pub resets: usize,
    pub d0: f64,
    /// Base-trajectory steps discarded before the tangent is switched on.
    pub warmup_steps: u64,
}

impl Default for LyapunovConfig {
    fn default() -> Self {
        Self { dt: 0.01, renorm_interval: 1.0, resets: 1000, d0: 1e-10, warmup_steps: 10_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LyapunovEstimate {
    /// Running means of the interval increments.
    pub h_partial: Vec<f64>,
    pub h: f64,
    /// Batch-means standard error of `h` (20 batches).
    pub se: f64,
    pub renorm_interval: f64,
    pub resets: usize,
}

impl LyapunovEstimate {
    pub fn from_increments(hs: &[f64], renorm_interval: f64) -> Self {
        let mut acc = 0.0;
        let h_partial: Vec<f64> = hs
            .iter()
            .enumerate()
            .map(|(i, x)| {
                acc += x;
                acc / (i + 1) as f64
            })
            .collect();
        let h = h_partial.last().copied().unwrap_or(0.0);
        Self { h_partial, h, se: batch_se(hs, 20), renorm_interval, resets: hs.len() }
    }
}

fn batch_se(xs: &[f64], batches: usize) -> f64 {
    let size = xs.len() / batches;
    if size == 0 {
        return f64::NAN;
    }
    let means: Vec<f64> = xs.chunks_exact(size).take(batches).map(|c| c.iter().sum::<f64>() / size as f64).collect();
    let b = means.len() as f64;
    let m = means.iter().sum::<f64>() / b;
    (means.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (b - 1.0) / b).sqrt()
}

/// Largest Lyapunov exponent from a thermal initial state drawn with `seed`.
pub fn lyapunov_fpu(params: &ModelParams, seed: u64, cfg: &LyapunovConfig) -> Result<LyapunovEstimate> {
    if cfg.resets < 100 {
        return Err(FpuError::InvalidParameter(format!("need at least 100 resets, got {}", cfg.resets)));
    }
    if !(cfg.d0 > 0.0) || !(cfg.dt > 0.0) {
        return Err(FpuError::InvalidParameter("d0 and dt must be positive".into()));
    }
    let per = (cfg.renorm_interval / cfg.dt).round();
    if per < 1.0 || (per * cfg.dt - cfg.renorm_interval).abs() > 1e-9 * cfg.renorm_interval {
        return Err(FpuError::InvalidParameter("renorm_interval must be a multiple of dt".into()));
    }
    let per = per as u64;
    let n = params.n;
    let mut state = random_thermal_init(params, seed, 1.0, 1.0)?;
    let mut integ = Integrator::yoshida6(cfg.dt, params)?;
    integ.integrate_with(&mut state, cfg.warmup_steps, cfg.warmup_steps.max(1), |_| {})?;
    let mut tangent = TangentState::random(n, cfg.d0, seed ^ 0x9e37_79b9_7f4a_7c15)?;
    let (mut q, mut p) = (state.q, state.p);
    let (mut q0, mut p0) = (q.clone(), p.clone());
    let mut hs = Vec::with_capacity(cfg.resets);
    let mut step = 0u64;
    for _ in 0..cfg.resets {
        for _ in 0..per {
            q0.copy_from_slice(&q);
            p0.copy_from_slice(&p);
            integ.step_slices(&mut q, &mut p);
            step += 1;
            tangent_step(&q0, &p0, &q, &p, &mut tangent, cfg.dt, params.beta)
                .map_err(|_| FpuError::NumericalBlowUp { step })?;
        }
        if !q.iter().chain(&p).all(|x| x.is_finite()) {
            return Err(FpuError::NumericalBlowUp { step });
        }
        let d1 = tangent.renormalize();
        hs.push((d1 / cfg.d0).ln() / cfg.renorm_interval);
    }
    Ok(LyapunovEstimate::from_increments(&hs, cfg.renorm_interval))
}

/// Smallest `ln|f'|` contribution retained; exact superstable orbits are capped here.
pub const LN_DERIVATIVE_FLOOR: f64 = -700.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MapFamily {
    /// `f(x) = 4 lambda x (1 - x)`
    Logistic { lambda: f64 },
}

impl MapFamily {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            MapFamily::Logistic { lambda } => 4.0 * lambda * x * (1.0 - x),
        }
    }

    pub fn derivative(self, x: f64) -> f64 {
        match self {
            MapFamily::Logistic { lambda } => 4.0 * lambda * (1.0 - 2.0 * x),
        }
    }
}

/// Mean of `ln|f'(x_i)|` over `iterations` points after `burn_in`. A point with
/// `f'(x) = 0` is nudged by `1e-15` before continuing.
pub fn lyapunov_map(family: MapFamily, x0: f64, iterations: usize, burn_in: usize) -> Result<f64> {
    let MapFamily::Logistic { lambda } = family;
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(FpuError::InvalidParameter(format!("lambda must lie in (0, 1], got {lambda}")));
    }
    if !(0.0..=1.0).contains(&x0) || iterations == 0 {
        return Err(FpuError::InvalidParameter("x0 must lie in [0, 1] and iterations > 0".into()));
    }
    let mut x = x0;
    for _ in 0..burn_in {
        x = family.apply(x);
    }
    let mut sum = 0.0;
    for _ in 0..iterations {
        let mut d = family.derivative(x);
        if d == 0.0 {
            x += 1e-15;
            d = family.derivative(x);
        }
        sum += d.abs().ln().max(LN_DERIVATIVE_FLOOR);
        x = family.apply(x);
    }
    Ok(sum / iterations as f64)
}
