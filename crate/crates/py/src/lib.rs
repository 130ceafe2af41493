//! Python bindings for `fpulab`.

use fpulab::breather::{detect_in_filtered, frequency_filter, site_series, DetectionConfig};
use fpulab::chain;
use fpulab::chaos::{self, LyapunovConfig, MapFamily};
use fpulab::linewidth::{correlation_time, Denominator, LinewidthModel, LinewidthParams};
use fpulab::resonance;
use fpulab::spectral::{self, FourierSeries, ModeTransformer, Window};
use fpulab::{Complex64, FpuError};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn err(e: FpuError) -> PyErr {
    match e {
        FpuError::InvalidParameter(_) | FpuError::LengthMismatch { .. } => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

#[pyclass(name = "ModelParams", frozen, from_py_object)]
#[derive(Clone)]
struct PyModelParams(chain::ModelParams);

#[pymethods]
impl PyModelParams {
    #[new]
    fn new(n: usize, beta: f64, energy: f64) -> PyResult<Self> {
        chain::ModelParams::new(n, beta, energy).map(Self).map_err(err)
    }

    #[staticmethod]
    fn with_edensity(n: usize, beta: f64, edensity: f64) -> PyResult<Self> {
        chain::ModelParams::with_edensity(n, beta, edensity).map(Self).map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n
    }

    #[getter]
    fn beta(&self) -> f64 {
        self.0.beta
    }

    #[getter]
    fn energy(&self) -> f64 {
        self.0.energy
    }

    #[getter]
    fn edensity(&self) -> f64 {
        self.0.edensity
    }

    fn __repr__(&self) -> String {
        format!("ModelParams(n={}, beta={}, energy={})", self.0.n, self.0.beta, self.0.energy)
    }
}

#[pyclass(name = "ChainState", from_py_object)]
#[derive(Clone)]
struct PyChainState(chain::ChainState);

#[pymethods]
impl PyChainState {
    #[new]
    #[pyo3(signature = (q, p, t = 0.0))]
    fn new(q: Vec<f64>, p: Vec<f64>, t: f64) -> PyResult<Self> {
        chain::ChainState::new(q, p, t).map(Self).map_err(err)
    }

    /// Random state with zero momentum, zero mean displacement and the requested energy.
    #[staticmethod]
    #[pyo3(signature = (params, seed, pmax = 1.0, qmax = 1.0))]
    fn thermal(params: &PyModelParams, seed: u64, pmax: f64, qmax: f64) -> PyResult<Self> {
        chain::random_thermal_init(&params.0, seed, pmax, qmax).map(Self).map_err(err)
    }

    #[staticmethod]
    #[pyo3(signature = (params, amplitude, noise = chain::DEFAULT_PI_NOISE, seed = 1))]
    fn pi_mode(params: &PyModelParams, amplitude: f64, noise: f64, seed: u64) -> PyResult<Self> {
        chain::pi_mode_init(&params.0, amplitude, noise, seed).map(Self).map_err(err)
    }

    #[getter]
    fn q(&self) -> Vec<f64> {
        self.0.q.clone()
    }

    #[getter]
    fn p(&self) -> Vec<f64> {
        self.0.p.clone()
    }

    #[getter]
    fn t(&self) -> f64 {
        self.0.t
    }

    fn energy(&self, params: &PyModelParams) -> PyResult<f64> {
        chain::total_energy(&self.0, &params.0).map_err(err)
    }

    fn site_energies(&self, params: &PyModelParams) -> PyResult<Vec<f64>> {
        Ok(chain::site_energies(&self.0, &params.0).map_err(err)?.g)
    }

    fn localization(&self, params: &PyModelParams) -> PyResult<f64> {
        chain::localization(&self.0, &params.0).map_err(err)
    }

    /// Renormalized waves `a~_k` for `k = 0..N` built with factor `eta`.
    fn waves(&self, eta: f64) -> PyResult<Vec<Complex64>> {
        let mut tr = ModeTransformer::new(self.0.len());
        Ok(tr.waves_of_state(&self.0, eta).map_err(err)?.ak)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }
}

#[pyclass(name = "Integrator")]
struct PyIntegrator(fpulab::Integrator);

#[pymethods]
impl PyIntegrator {
    /// Sixth-order Yoshida composition.
    #[new]
    fn new(dt: f64, params: &PyModelParams) -> PyResult<Self> {
        fpulab::Integrator::yoshida6(dt, &params.0).map(Self).map_err(err)
    }

    /// Advances `state` in place by `steps`; returns the snapshots taken every `sample_every` steps.
    #[pyo3(signature = (state, steps, sample_every = 0))]
    fn run(&mut self, state: &mut PyChainState, steps: u64, sample_every: u64) -> PyResult<Vec<PyChainState>> {
        let mut out = Vec::new();
        let every = if sample_every == 0 { steps.max(1) } else { sample_every };
        self.0
            .integrate_with(&mut state.0, steps, every, |s| {
                if sample_every > 0 {
                    out.push(PyChainState(s.clone()));
                }
            })
            .map_err(err)?;
        Ok(out)
    }
}

#[pyclass(name = "Thermo", frozen, get_all)]
struct PyThermo {
    beta: f64,
    edensity: f64,
    theta: f64,
    y2: f64,
    y4: f64,
    eta: f64,
    eta_sc: f64,
    a_coef: f64,
    b_coef: f64,
    ae: f64,
    ae_tilde: f64,
}

/// Canonical-ensemble temperature, moments and renormalization factors.
#[pyfunction]
fn thermo(beta: f64, edensity: f64) -> PyResult<PyThermo> {
    let t = fpulab::ThermoSolution::solve(beta, edensity).map_err(err)?;
    Ok(PyThermo {
        beta: t.beta,
        edensity: t.edensity,
        theta: t.theta,
        y2: t.y2,
        y4: t.y4,
        eta: t.eta,
        eta_sc: t.eta_sc,
        a_coef: t.a_coef,
        b_coef: t.b_coef,
        ae: t.ae,
        ae_tilde: t.ae_tilde,
    })
}

/// Renormalization factor from the spectral centroids of `snapshots`, spaced `sample_dt`.
/// Returns `(eta_bar, spread, eta_k)`.
#[pyfunction]
#[pyo3(signature = (snapshots, sample_dt, eta, segments = 4, pad = 4))]
fn measure_eta(
    snapshots: Vec<PyChainState>,
    sample_dt: f64,
    eta: f64,
    segments: usize,
    pad: usize,
) -> PyResult<(f64, f64, Vec<f64>)> {
    let n = snapshots.first().map_or(0, |s| s.0.len());
    if n < 4 {
        return Err(PyValueError::new_err("need snapshots of a chain with N >= 4"));
    }
    let mut fs = FourierSeries::new(n, (1..n).collect(), sample_dt).map_err(err)?;
    let mut tr = ModeTransformer::new(n);
    for s in &snapshots {
        fs.push(&tr.to_fourier(&s.0).map_err(err)?);
    }
    let spec = spectral::spatiotemporal_spectrum_padded(&fs.waves(eta), 2.0 * eta, Window::Hann, segments, pad)
        .map_err(err)?;
    let m = spectral::measure_eta(&spec, &spectral::linear_dispersion(n)).map_err(err)?;
    Ok((m.eta_bar, m.spread, m.eta_k))
}

/// Non-trivial exact resonant quartets `(k, l, m, s)` of an `N`-site chain.
#[pyfunction]
#[pyo3(signature = (n, tol = resonance::DEFAULT_TOL))]
fn exact_quartets(n: usize, tol: f64) -> PyResult<Vec<(usize, usize, usize, usize)>> {
    Ok(resonance::exact_quartets(n, tol).map_err(err)?.iter().map(|q| (q.k, q.l, q.m, q.s)).collect())
}

/// `(solutions, min_residual)` of the (3 -> 1) scan.
#[pyfunction]
fn verify_no_3to1(n: usize) -> PyResult<(usize, f64)> {
    let r = resonance::verify_no_3to1(n).map_err(err)?;
    Ok((r.exact.len(), r.min_residual))
}

/// `(solutions, min_residual)` of the (4 -> 0) scan.
#[pyfunction]
fn verify_no_4to0(n: usize) -> PyResult<(usize, f64)> {
    let r = resonance::verify_no_4to0(n).map_err(err)?;
    Ok((r.exact.len(), r.min_residual))
}

/// Non-trivial `z` solving the continuum resonance for fixed `(x, y)`.
#[pyfunction]
fn resonance_branches(x: f64, y: f64) -> Vec<f64> {
    resonance::nontrivial_branches(x, y)
}

#[pyclass(name = "LinewidthModel")]
struct PyLinewidthModel(LinewidthModel);

#[pymethods]
impl PyLinewidthModel {
    #[new]
    #[pyo3(signature = (n, beta, energy, umklapp = true, bare_denominator = false))]
    fn new(n: usize, beta: f64, energy: f64, umklapp: bool, bare_denominator: bool) -> PyResult<Self> {
        let lp = LinewidthParams::solve(n, beta, energy).map_err(err)?;
        let d = if bare_denominator { Denominator::Bare } else { Denominator::Renormalized };
        LinewidthModel::new(lp, umklapp, d).map(Self).map_err(err)
    }

    fn omega_tilde(&self, k: usize) -> f64 {
        self.0.omega_tilde(k)
    }

    /// `C_k(t) / C_k(0)` on `t_j = j dt`.
    fn correlation(&self, k: usize, dt: f64, len: usize) -> PyResult<Vec<Complex64>> {
        Ok(self.0.predict_correlation(k, dt, len).map_err(err)?.c_over_c0)
    }

    /// `(tau, tau / period)` with `tau` the `1/e` time of `|C_k|`.
    fn correlation_time(&self, k: usize) -> PyResult<(f64, f64)> {
        let (pred, _) = self.0.predict_until_crossing(k, 1024, 20.0, 1e7).map_err(err)?;
        let ct = correlation_time(&pred).map_err(err)?;
        Ok((ct.tau, ct.ratio))
    }
}

/// Tracks in the high-pass filtered displacement field of `snapshots`.
/// Returns `(start, lifetime, mean_span, center_site)` per track.
#[pyfunction]
fn detect_breathers(
    snapshots: Vec<PyChainState>,
    sample_dt: f64,
    omega_cut: f64,
) -> PyResult<Vec<(f64, f64, f64, usize)>> {
    let snaps: Vec<chain::ChainState> = snapshots.into_iter().map(|s| s.0).collect();
    let n = snaps.first().map_or(0, chain::ChainState::len);
    let field = frequency_filter(&site_series(&snaps), omega_cut, sample_dt).map_err(err)?;
    let tracks = detect_in_filtered(&field, &DetectionConfig::for_cut(omega_cut));
    Ok(tracks.iter().map(|t| (t.frames[0].time, t.lifetime, t.mean_span, t.center_site(n))).collect())
}

/// Largest Lyapunov exponent `(h, standard_error)` from a thermal start.
#[pyfunction]
#[pyo3(signature = (params, seed = 1, resets = 1000, dt = 0.01, interval = 1.0, d0 = 1e-10, warmup = 10_000))]
fn lyapunov(
    params: &PyModelParams,
    seed: u64,
    resets: usize,
    dt: f64,
    interval: f64,
    d0: f64,
    warmup: u64,
) -> PyResult<(f64, f64)> {
    let cfg = LyapunovConfig { dt, renorm_interval: interval, resets, d0, warmup_steps: warmup };
    let e = chaos::lyapunov_fpu(&params.0, seed, &cfg).map_err(err)?;
    Ok((e.h, e.se))
}

#[pyfunction]
#[pyo3(signature = (lam, iterations = 1_000_000, burn_in = 1000, x0 = 0.3))]
fn logistic_lyapunov(lam: f64, iterations: usize, burn_in: usize, x0: f64) -> PyResult<f64> {
    chaos::lyapunov_map(MapFamily::Logistic { lambda: lam }, x0, iterations, burn_in).map_err(err)
}

#[pymodule]
fn fpulab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModelParams>()?;
    m.add_class::<PyChainState>()?;
    m.add_class::<PyIntegrator>()?;
    m.add_class::<PyThermo>()?;
    m.add_class::<PyLinewidthModel>()?;
    m.add_function(wrap_pyfunction!(thermo, m)?)?;
    m.add_function(wrap_pyfunction!(measure_eta, m)?)?;
    m.add_function(wrap_pyfunction!(exact_quartets, m)?)?;
    m.add_function(wrap_pyfunction!(verify_no_3to1, m)?)?;
    m.add_function(wrap_pyfunction!(verify_no_4to0, m)?)?;
    m.add_function(wrap_pyfunction!(resonance_branches, m)?)?;
    m.add_function(wrap_pyfunction!(detect_breathers, m)?)?;
    m.add_function(wrap_pyfunction!(lyapunov, m)?)?;
    m.add_function(wrap_pyfunction!(logistic_lyapunov, m)?)?;
    Ok(())
}
