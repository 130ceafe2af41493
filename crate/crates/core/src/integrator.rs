//! Explicit symplectic composition schemes for separable Hamiltonians.

use serde::{Deserialize, Serialize};

use crate::chain::{forces_into, ChainState, ModelParams};
use crate::error::{FpuError, Result};

/// Drift/kick composition: stage `j` does `q += dt c_j p` then `p += dt d_j F(q)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositionScheme {
    pub c: Vec<f64>,
    pub d: Vec<f64>,
    pub order: u32,
}

impl CompositionScheme {
    pub fn new(c: Vec<f64>, d: Vec<f64>, order: u32) -> Result<Self> {
        if c.len() != d.len() || c.is_empty() {
            return Err(FpuError::InvalidParameter(
                "drift and kick coefficient lists must be non-empty and of equal length".into(),
            ));
        }
        let sc: f64 = c.iter().sum();
        let sd: f64 = d.iter().sum();
        if (sc - 1.0).abs() > 1e-12 || (sd - 1.0).abs() > 1e-12 {
            return Err(FpuError::InvalidParameter(format!(
                "coefficients must sum to one (got {sc}, {sd})"
            )));
        }
        Ok(Self { c, d, order })
    }

    /// Sixth-order Yoshida composition with 7 force evaluations per step.
    pub fn yoshida6() -> Self {
        Self {
            c: vec![
                0.392256805238780,
                0.510043411918458,
                -0.471053385409757,
                0.068753168252518,
                0.068753168252518,
                -0.471053385409757,
                0.510043411918458,
                0.392256805238780,
            ],
            d: vec![
                0.784513610477560,
                0.235573213359357,
                -1.177679984178870,
                1.315186320683906,
                -1.177679984178870,
                0.235573213359357,
                0.784513610477560,
                0.0,
            ],
            order: 6,
        }
    }

    /// Second-order velocity Verlet written as drift-kick-drift.
    pub fn leapfrog() -> Self {
        Self { c: vec![0.5, 0.5], d: vec![1.0, 0.0], order: 2 }
    }

    pub fn force_evaluations(&self) -> usize {
        self.d.iter().filter(|&&d| d != 0.0).count()
    }
}

/// Advances chain states with a fixed step and composition scheme.
#[derive(Debug, Clone)]
pub struct Integrator {
    pub scheme: CompositionScheme,
    pub dt: f64,
    pub beta: f64,
    scratch: Vec<f64>,
}

impl Integrator {
    pub fn new(scheme: CompositionScheme, dt: f64, beta: f64) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(FpuError::InvalidParameter(format!("time step must be positive, got {dt}")));
        }
        Ok(Self { scheme, dt, beta, scratch: Vec::new() })
    }

    pub fn yoshida6(dt: f64, params: &ModelParams) -> Result<Self> {
        Self::new(CompositionScheme::yoshida6(), dt, params.beta)
    }

    /// One step on raw slices. Accepts any `N >= 2`.
    pub fn step_slices(&mut self, q: &mut [f64], p: &mut [f64]) {
        let n = q.len();
        if self.scratch.len() != n {
            self.scratch = vec![0.0; n];
        }
        let dt = self.dt;
        for (&c, &d) in self.scheme.c.iter().zip(self.scheme.d.iter()) {
            if c != 0.0 {
                let h = dt * c;
                q.iter_mut().zip(p.iter()).for_each(|(x, v)| *x += h * v);
            }
            if d != 0.0 {
                forces_into(q, self.beta, &mut self.scratch);
                let h = dt * d;
                p.iter_mut().zip(self.scratch.iter()).for_each(|(v, f)| *v += h * f);
            }
        }
    }

    pub fn step(&mut self, state: &mut ChainState) {
        self.step_slices(&mut state.q, &mut state.p);
        state.t += self.dt;
    }

    /// Runs `steps` steps, calling `sink` on the initial state and after every
    /// `sample_every` steps. Aborts on the first non-finite state.
    pub fn integrate_with<F>(
        &mut self,
        state: &mut ChainState,
        steps: u64,
        sample_every: u64,
        mut sink: F,
    ) -> Result<()>
    where
        F: FnMut(&ChainState),
    {
        if sample_every == 0 {
            return Err(FpuError::InvalidParameter("sample_every must be at least 1".into()));
        }
        let t0 = state.t;
        sink(state);
        for i in 1..=steps {
            self.step_slices(&mut state.q, &mut state.p);
            state.t = t0 + i as f64 * self.dt;
            if i % sample_every == 0 {
                if !state.is_finite() {
                    return Err(FpuError::NumericalBlowUp { step: i });
                }
                sink(state);
            } else if i % 64 == 0 && !state.is_finite() {
                return Err(FpuError::NumericalBlowUp { step: i });
            }
        }
        if !state.is_finite() {
            return Err(FpuError::NumericalBlowUp { step: steps });
        }
        Ok(())
    }

    /// Collects `floor(steps / sample_every) + 1` snapshots including the initial state.
    pub fn integrate(&mut self, initial: &ChainState, steps: u64, sample_every: u64) -> Result<Vec<ChainState>> {
        let mut state = initial.clone();
        let mut out = Vec::with_capacity((steps / sample_every.max(1)) as usize + 1);
        self.integrate_with(&mut state, steps, sample_every, |s| out.push(s.clone()))?;
        Ok(out)
    }
}
