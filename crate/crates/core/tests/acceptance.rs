//! Acceptance suite. Prints one PASS/FAIL line per criterion and a summary.
//!
//! Run all criteria with `cargo test --release -p fpulab --test acceptance`, or pass
//! criterion numbers after `--` to select a subset. The process exits non-zero on
//! failure only when `ACCEPTANCE_STRICT=1` is set.

use std::collections::HashSet;
use std::sync::OnceLock;
use std::time::Instant;

use fpulab::breather::{
    band_gap, detect_in_filtered, detect_in_site_energies, frequency_filter, pi_mode_experiment, site_series,
    DetectionConfig, PiModeConfig,
};
use fpulab::chain::{hamiltonian, localization_of, pi_mode_energy, random_thermal_init, site_energies_of};
use fpulab::chaos::{lyapunov_fpu, lyapunov_map, LyapunovConfig, MapFamily};
use fpulab::linewidth::{
    band_limited, expected_welch_spectrum, running_mean, shape_overlap, spectral_width, Denominator, LineSpectrum,
    LinewidthModel, LinewidthParams,
};
use fpulab::resonance::{
    exact_quartets, half_period_families, quartet_min_duration, resonance_curve_mask, top_mass_fraction_in_mask,
    verify_no_3to1, verify_no_4to0, QuartetAverager, QuartetMap,
};
use fpulab::spectral::{
    linear_dispersion, measure_eta, spatiotemporal_spectrum, spatiotemporal_spectrum_padded, FourierSeries,
    ModeSeries, ModeStatistics, ModeTransformer, SpectralDensity, Window,
};
use fpulab::thermo::{eta_exact, solve_temperature, ThermoSolution};
use fpulab::{ChainState, Complex64, Integrator, ModelParams};

const EDENSITY: f64 = 100.0 / 256.0;

// 1
const ETA_REF: f64 = 1.1812;
const ETA_REF_TOL: f64 = 0.002;
// 2
const ETA_MEAN_TOL: f64 = 0.01;
const ETA_SPREAD_TOL: f64 = 0.01;
// 3
const ETA_CURVE_TOL: f64 = 0.02;
const SLOPE_TARGET: f64 = 0.25;
const SLOPE_TOL: f64 = 0.01;
// 4
const ETA_SC_TOL: f64 = 0.05;
// 5
const THETA_INF_TOL: f64 = 1e-3;
// 6
const DRIFT_TOL: f64 = 1e-8;
const REVERSE_TOL: f64 = 1e-10;
const ORDER_TOL: f64 = 0.3;
// 7, 8
const Z_GATE: f64 = 3.0;
// 10
const QUARTET_RADIUS: usize = 2;
const QUARTET_TOP: f64 = 0.01;
const QUARTET_MIN_MASS: f64 = 0.9;
// 11
const WIDTH_TOL_WEAK: f64 = 0.25;
const WIDTH_FACTOR_STRONG: f64 = 2.0;
const OVERLAP_MIN: f64 = 0.8;
const UMKLAPP_RATIO: (f64, f64) = (1.2, 1.4);
// 12
const SEPARATION_STRONG: f64 = 10.0;
const SEPARATION_WEAK: f64 = 50.0;
// 13
const L_RANGE: (f64, f64) = (1.0, 3.0);
// 14
const PI_PEAK_L: f64 = 5.0;
const PI_GAP_DEPTH: f64 = 0.25;
const DB_SPAN: f64 = 3.0;
// 15
const LOGISTIC_TOL: f64 = 0.01;
const FEIGENBAUM_TOL: f64 = 0.02;
// 16
const SCALING_TOL: f64 = 1e-9;

struct Outcome {
    id: String,
    pass: bool,
}

#[derive(Default)]
struct Report {
    lines: Vec<Outcome>,
}

impl Report {
    fn check(&mut self, id: &str, pass: bool, detail: String) {
        println!("{} {id}: {detail}", if pass { "PASS" } else { "FAIL" });
        self.lines.push(Outcome { id: id.into(), pass });
    }

    fn info(&self, id: &str, detail: String) {
        println!("INFO {id}: {detail}");
    }

    fn error(&mut self, id: &str, e: impl std::fmt::Debug) {
        self.check(id, false, format!("error {e:?}"));
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn slope(xs: &[(f64, f64)]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = xs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = xs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

fn log_betas() -> Vec<f64> {
    (0..10).map(|i| 10f64.powf(-3.0 + 7.0 * i as f64 / 9.0)).collect()
}

fn thermalized(params: &ModelParams, seed: u64, dt: f64, warmup: u64) -> (ChainState, Integrator) {
    let mut s = random_thermal_init(params, seed, 1.0, 1.0).expect("init");
    let mut it = Integrator::yoshida6(dt, params).expect("integrator");
    it.integrate_with(&mut s, warmup, warmup.max(1), |_| {}).expect("warmup");
    (s, it)
}

/// Equal-weight mix of the `k` and `N-k` rows.
fn mirrored_row(spec: &SpectralDensity, i: usize, j: usize) -> Vec<f64> {
    spec.power[i].iter().zip(&spec.power[j]).map(|(a, b)| 0.5 * (a + b)).collect()
}

// ---------------------------------------------------------------- fixtures

/// N=256, E=100 runs shared by the quartet and linewidth criteria.
struct WideRun {
    beta: f64,
    thermo: ThermoSolution,
    ks: Vec<usize>,
    spectrum: SpectralDensity,
    quartet: Option<QuartetMap>,
    quartet_required: f64,
    elapsed: f64,
}

const WIDE_N: usize = 256;
const WIDE_SEED: u64 = 11;
const WIDE_DT: f64 = 0.01;
const WIDE_WARMUP: u64 = 1_000_000;
const WIDE_EVERY: u64 = 50;
const WIDE_SEGMENTS: usize = 128;
const WIDE_SEGMENT_LEN: usize = 4096;
const QUARTET_K: usize = 90;

fn wide_run(beta: f64, with_quartet: bool) -> WideRun {
    let t0 = Instant::now();
    let n = WIDE_N;
    let params = ModelParams::new(n, beta, 100.0).expect("params");
    let thermo = ThermoSolution::solve(beta, EDENSITY).expect("thermo");
    let (mut s, mut it) = thermalized(&params, WIDE_SEED, WIDE_DT, WIDE_WARMUP);
    let ks: Vec<usize> = (20..=100).step_by(10).collect();
    let mut k_list = ks.clone();
    k_list.extend(ks.iter().map(|k| n - k));
    let samples = (WIDE_SEGMENTS + 1) * WIDE_SEGMENT_LEN / 2;
    let sample_dt = WIDE_EVERY as f64 * WIDE_DT;
    let mut data: Vec<Vec<Complex64>> = vec![Vec::with_capacity(samples); k_list.len()];
    let mut tr = ModeTransformer::new(n);
    let mut avg = with_quartet.then(|| QuartetAverager::new(n, QUARTET_K).expect("averager"));
    it.integrate_with(&mut s, (samples as u64 - 1) * WIDE_EVERY, WIDE_EVERY, |st| {
        let w = tr.waves_of_state(st, thermo.eta).expect("waves");
        for (row, &k) in data.iter_mut().zip(&k_list) {
            row.push(w.ak[k]);
        }
        if let Some(a) = avg.as_mut() {
            a.push_field(&w).expect("quartet");
        }
    })
    .expect("run");
    let series = ModeSeries { k_list, sample_dt, data };
    let spectrum = spatiotemporal_spectrum(&series, 2.0 * thermo.eta, Window::Hann, WIDE_SEGMENTS).expect("spectrum");
    let quartet_required = quartet_min_duration(n, thermo.eta);
    let quartet = avg.map(|a| a.finish(sample_dt, quartet_required).expect("quartet map"));
    WideRun { beta, thermo, ks, spectrum, quartet, quartet_required, elapsed: t0.elapsed().as_secs_f64() }
}

fn wide_strong() -> &'static WideRun {
    static RUN: OnceLock<WideRun> = OnceLock::new();
    RUN.get_or_init(|| wide_run(0.5, true))
}

fn wide_weak() -> &'static WideRun {
    static RUN: OnceLock<WideRun> = OnceLock::new();
    RUN.get_or_init(|| wide_run(0.125, false))
}

/// Correlation times `tau_k / t~_k` for `k = 1..=N/2` (`None` where no `1/e` crossing).
fn separation(beta: f64, umklapp: bool) -> Vec<(usize, Option<f64>, Option<f64>)> {
    let lp = LinewidthParams::solve(WIDE_N, beta, 100.0).expect("params");
    let model = LinewidthModel::new(lp, umklapp, Denominator::Renormalized).expect("model");
    (1..=WIDE_N / 2)
        .map(|k| match model.predict_until_crossing(k, 1024, 20.0, 1e7) {
            Ok((_, ct)) => (k, Some(ct.tau), Some(ct.ratio)),
            Err(_) => (k, None, None),
        })
        .collect()
}

fn separation_strong_on() -> &'static Vec<(usize, Option<f64>, Option<f64>)> {
    static S: OnceLock<Vec<(usize, Option<f64>, Option<f64>)>> = OnceLock::new();
    S.get_or_init(|| separation(0.5, true))
}

// ---------------------------------------------------------------- criteria

fn c1(r: &mut Report) {
    let t0 = Instant::now();
    match eta_exact(0.5, EDENSITY) {
        Ok(eta) => {
            let secs = t0.elapsed().as_secs_f64();
            let ok = (eta - ETA_REF).abs() <= ETA_REF_TOL && secs < 1.0;
            r.check("1 gibbs-eta", ok, format!("eta = {eta:.6} (target {ETA_REF} +- {ETA_REF_TOL}), {secs:.3} s (< 1 s)"));
        }
        Err(e) => r.error("1 gibbs-eta", e),
    }
}

fn c2(r: &mut Report) {
    let n = 128;
    let beta = 0.5;
    let t0 = Instant::now();
    let params = ModelParams::new(n, beta, 50.0).unwrap();
    let th = ThermoSolution::solve(beta, 50.0 / n as f64).unwrap();
    let (mut s, mut it) = thermalized(&params, 1, 0.01, 100_000);
    let mut fs = FourierSeries::new(n, (1..n).collect(), 0.1).unwrap();
    let mut tr = ModeTransformer::new(n);
    it.integrate_with(&mut s, 8191 * 10, 10, |st| fs.push(&tr.to_fourier(st).unwrap())).unwrap();
    let sp = spatiotemporal_spectrum_padded(&fs.waves(th.eta), 2.0 * th.eta, Window::Hann, 4, 4).unwrap();
    let m = measure_eta(&sp, &linear_dispersion(n)).unwrap();
    let (worst, _) = m
        .eta_k
        .iter()
        .enumerate()
        .max_by(|a, b| (a.1 - m.eta_bar).abs().total_cmp(&(b.1 - m.eta_bar).abs()))
        .unwrap();
    let e = rel(m.eta_bar, th.eta);
    r.check(
        "2a measured-eta-mean",
        e <= ETA_MEAN_TOL,
        format!("eta_bar = {:.5}, Gibbs {:.5}, rel {e:.2e} (<= {ETA_MEAN_TOL})", m.eta_bar, th.eta),
    );
    r.check(
        "2b measured-eta-spread",
        m.spread <= ETA_SPREAD_TOL,
        format!(
            "max |eta_k - eta_bar| / eta_bar = {:.3e} at k = {} (<= {ETA_SPREAD_TOL}); {:.1} s",
            m.spread,
            m.k_list[worst],
            t0.elapsed().as_secs_f64()
        ),
    );
}

fn c3(r: &mut Report) {
    let n = 128;
    let mut worst: (f64, f64) = (0.0, 0.0);
    let mut pts = Vec::new();
    let mut all = true;
    for beta in log_betas() {
        let th = ThermoSolution::solve(beta, EDENSITY).unwrap();
        let dt = 0.01 / th.eta.max(1.0);
        let params = ModelParams::new(n, beta, EDENSITY * n as f64).unwrap();
        let (mut s, mut it) = thermalized(&params, 1, dt, 100_000);
        let mut fs = FourierSeries::new(n, (1..n).collect(), 10.0 * dt).unwrap();
        let mut tr = ModeTransformer::new(n);
        it.integrate_with(&mut s, 8191 * 10, 10, |st| fs.push(&tr.to_fourier(st).unwrap())).unwrap();
        let sp = spatiotemporal_spectrum_padded(&fs.waves(th.eta), 2.0 * th.eta, Window::Hann, 4, 4).unwrap();
        let m = measure_eta(&sp, &linear_dispersion(n)).unwrap();
        let e = rel(m.eta_bar, th.eta);
        r.info("3", format!("beta = {beta:.3e}: eta = {:.5}, measured {:.5}, rel {e:.2e}", th.eta, m.eta_bar));
        all &= e <= ETA_CURVE_TOL;
        if e > worst.1 {
            worst = (beta, e);
        }
        pts.push((beta.ln(), th.eta.ln(), m.eta_bar.ln()));
    }
    r.check(
        "3a eta-curve",
        all,
        format!("worst rel deviation {:.2e} at beta = {:.3e} (<= {ETA_CURVE_TOL})", worst.1, worst.0),
    );
    let top = &pts[pts.len() - 3..];
    let measured = slope(&top.iter().map(|p| (p.0, p.2)).collect::<Vec<_>>());
    let exact = slope(&top.iter().map(|p| (p.0, p.1)).collect::<Vec<_>>());
    r.check(
        "3b large-beta-exponent",
        (measured - SLOPE_TARGET).abs() <= SLOPE_TOL,
        format!("measured slope {measured:.4}, Gibbs slope {exact:.4} over the top 3 betas ({SLOPE_TARGET} +- {SLOPE_TOL})"),
    );
}

fn c4(r: &mut Report) {
    let mut worst: (f64, f64) = (0.0, 0.0);
    for i in 0..=28 {
        let beta = 10f64.powf(-3.0 + 7.0 * i as f64 / 28.0);
        let th = ThermoSolution::solve(beta, EDENSITY).unwrap();
        let e = rel(th.eta_sc, th.eta);
        if e > worst.1 {
            worst = (beta, e);
        }
    }
    r.check(
        "4 eta-sc",
        worst.1 <= ETA_SC_TOL,
        format!("max |eta_sc - eta| / eta = {:.3e} at beta = {:.3e} (<= {ETA_SC_TOL})", worst.1, worst.0),
    );
}

fn c5(r: &mut Report) {
    let zero: Vec<(f64, f64)> = [EDENSITY, 1.0, 7.5].iter().map(|&e| (e, solve_temperature(0.0, e).unwrap())).collect();
    let exact = zero.iter().all(|(e, t)| e == t);
    let inf = solve_temperature(1e6, 1.0).unwrap();
    r.check(
        "5 temperature-limits",
        exact && (inf - 4.0 / 3.0).abs() <= THETA_INF_TOL,
        format!("theta(0, e) == e: {exact}; theta(1e6, 1) = {inf:.6} (4/3 +- {THETA_INF_TOL})"),
    );
}

fn c6(r: &mut Report) {
    let n = 128;
    let beta = 1.0;
    let params = ModelParams::new(n, beta, 100.0).unwrap();
    let init = random_thermal_init(&params, 2, 1.0, 1.0).unwrap();

    let t0 = Instant::now();
    let h0 = hamiltonian(&init.q, &init.p, beta);
    let mut s = init.clone();
    let mut it = Integrator::yoshida6(0.01, &params).unwrap();
    let mut drift: f64 = 0.0;
    it.integrate_with(&mut s, 1_000_000, 1000, |st| drift = drift.max(rel(hamiltonian(&st.q, &st.p, beta), h0))).unwrap();
    r.check(
        "6a energy-drift",
        drift <= DRIFT_TOL,
        format!("max |H - H0| / H0 = {drift:.2e} over 1e6 steps (<= {DRIFT_TOL}); {:.1} s", t0.elapsed().as_secs_f64()),
    );

    let mut s = init.clone();
    let mut it = Integrator::yoshida6(0.01, &params).unwrap();
    for _ in 0..1000 {
        it.step(&mut s);
    }
    s.p.iter_mut().for_each(|p| *p = -*p);
    for _ in 0..1000 {
        it.step(&mut s);
    }
    s.p.iter_mut().for_each(|p| *p = -*p);
    let back = s.q.iter().zip(&init.q).chain(s.p.iter().zip(&init.p)).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    r.check("6b reversibility", back <= REVERSE_TOL, format!("max deviation after 1000 steps forth and back = {back:.2e} (<= {REVERSE_TOL})"));

    let horizon = 10.0;
    let run = |dt: f64| {
        let mut s = init.clone();
        let mut it = Integrator::yoshida6(dt, &params).unwrap();
        let steps = (horizon / dt).round() as u64;
        for _ in 0..steps {
            it.step(&mut s);
        }
        s
    };
    let reference = run(0.00625);
    let errs: Vec<(f64, f64)> = [0.1, 0.05, 0.025]
        .iter()
        .map(|&dt| {
            let s = run(dt);
            let e = s.q.iter().zip(&reference.q).chain(s.p.iter().zip(&reference.p)).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            (dt, e)
        })
        .collect();
    let order = slope(&errs.iter().map(|(d, e)| (d.ln(), e.ln())).collect::<Vec<_>>());
    r.check(
        "6c order",
        (order - 6.0).abs() <= ORDER_TOL,
        format!("fitted order {order:.3} from errors {:?} (6 +- {ORDER_TOL})", errs.iter().map(|(d, e)| format!("dt {d}: {e:.2e}")).collect::<Vec<_>>()),
    );
}

fn c78(r: &mut Report, run7: bool, run8: bool) {
    let n = 128;
    let beta = 0.5;
    let t0 = Instant::now();
    let params = ModelParams::new(n, beta, 50.0).unwrap();
    let th = ThermoSolution::solve(beta, 50.0 / n as f64).unwrap();
    let (mut s, mut it) = thermalized(&params, 7, 0.01, 1_000_000);
    let (blocks, block_len) = (40, 10_000);
    let mut st = ModeStatistics::new(n, th.eta, block_len).unwrap();
    let mut tr = ModeTransformer::new(n);
    it.integrate_with(&mut s, (blocks * block_len) as u64 * 100 - 1, 100, |x| st.push(&tr.to_fourier(x).unwrap()).unwrap())
        .unwrap();
    let eta_run = st.measured_eta().unwrap();
    let rep = st.finish_with_eta(eta_run.mean).unwrap();
    let gibbs = st.finish_with_eta(th.eta).unwrap();
    let theta = rep.theta_kinetic.mean;
    let omega = linear_dispersion(n);
    r.info(
        "7/8",
        format!(
            "run eta = {:.5} +- {:.1e} (Gibbs {:.5}); theta_kin = {:.5} +- {:.1e} (Gibbs {:.5}); {} blocks of {}; {:.0} s",
            eta_run.mean,
            eta_run.se,
            th.eta,
            theta,
            rep.theta_kinetic.se,
            th.theta,
            rep.blocks,
            rep.block_len,
            t0.elapsed().as_secs_f64()
        ),
    );
    let zmax = |f: &dyn Fn(usize) -> f64| (1..n).map(|k| (k, f(k))).max_by(|a, b| a.1.abs().total_cmp(&b.1.abs())).unwrap();
    if run7 {
        let z_ren = |k: usize| {
            let w = eta_run.mean * omega[k];
            (rep.n_tilde[k].mean * w - theta) / (rep.n_tilde[k].se * w)
        };
        let bare_level = 0.5 * (1.0 + 1.0 / eta_run.mean.powi(2)) * theta;
        let z_bare = |k: usize| (rep.n_bare[k].mean * omega[k] - bare_level) / (rep.n_bare[k].se * omega[k]);
        let (kr, zr) = zmax(&z_ren);
        let (kb, zb) = zmax(&z_bare);
        r.check("7a rayleigh-jeans", zr.abs() <= Z_GATE, format!("max |n~_k w~_k - theta| / se = {:.2} at k = {kr} (<= {Z_GATE})", zr.abs()));
        r.check(
            "7b modified-rayleigh-jeans",
            zb.abs() <= Z_GATE,
            format!("max |n_k w_k - (1 + 1/eta^2) theta / 2| / se = {:.2} at k = {kb} (<= {Z_GATE})", zb.abs()),
        );
        let z_gibbs = |k: usize| {
            let w = th.eta * omega[k];
            (gibbs.n_tilde[k].mean * w - th.theta) / (gibbs.n_tilde[k].se * w)
        };
        let (kg, zg) = zmax(&z_gibbs);
        r.info("7", format!("with Gibbs eta and theta: max |z| = {:.2} at k = {kg}", zg.abs()));
    }
    if run8 {
        let z_pair = |k: usize| rep.pair_renormalized[k].mean.norm() / rep.pair_renormalized[k].se;
        let (kp, zp) = zmax(&z_pair);
        r.check("8a renormalized-pairs-vanish", zp <= Z_GATE, format!("max |<a~_k a~_N-k>| / se = {zp:.2} at k = {kp} (<= {Z_GATE})"));
        let (kb, zb) = (1..n)
            .map(|k| (k, rep.pair_bare[k].mean.norm() / rep.pair_bare[k].se))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        r.check("8b bare-pairs-nonzero", zb > Z_GATE, format!("min |<a_k a_N-k>| / se = {zb:.2} at k = {kb} (> {Z_GATE})"));
        let (kg, zg) = zmax(&|k: usize| gibbs.pair_renormalized[k].mean.norm() / gibbs.pair_renormalized[k].se);
        r.info("8", format!("with Gibbs eta: max pair |z| = {zg:.2} at k = {kg}"));
    }
}

fn c9(r: &mut Report) {
    let n = 256;
    let t0 = Instant::now();
    let quartets = match exact_quartets(n, 1e-9) {
        Ok(q) => q,
        Err(e) => return r.error("9a exact-quartets", e),
    };
    let found: HashSet<[usize; 4]> = quartets.iter().map(|q| q.tuple()).collect();
    let mut expected = HashSet::new();
    for f in half_period_families(n) {
        let [k, l, m, s] = f;
        for (a, b) in [(k, l), (l, k)] {
            for (c, d) in [(m, s), (s, m)] {
                expected.insert([a, b, c, d]);
            }
        }
    }
    let missing = expected.difference(&found).count();
    let extra = found.difference(&expected).count();
    r.check(
        "9a exact-quartets",
        missing == 0 && extra == 0,
        format!("{} found, {} expected, {missing} missing, {extra} extra", found.len(), expected.len()),
    );
    let three = verify_no_3to1(n);
    let four = verify_no_4to0(n);
    let secs = t0.elapsed().as_secs_f64();
    match (three, four) {
        (Ok(a), Ok(b)) => r.check(
            "9b no-3to1-4to0",
            a.exact.is_empty() && b.exact.is_empty() && secs < 60.0,
            format!(
                "(3->1) {} solutions, min residual {:.3e}; (4->0) {} solutions; {secs:.1} s (< 60 s)",
                a.exact.len(),
                a.min_residual,
                b.exact.len()
            ),
        ),
        (a, b) => r.error("9b no-3to1-4to0", (a.err(), b.err())),
    }
}

fn c10(r: &mut Report) {
    let run = wide_strong();
    let map = run.quartet.as_ref().expect("quartet map");
    let mask = resonance_curve_mask(WIDE_N, QUARTET_K, QUARTET_RADIUS);
    let frac = top_mass_fraction_in_mask(&map.values, &mask, QUARTET_TOP);
    r.check(
        "10 quartet-peaks",
        frac >= QUARTET_MIN_MASS,
        format!(
            "top {:.0}% mass within {QUARTET_RADIUS} cells of the resonance curves: {frac:.3} (>= {QUARTET_MIN_MASS}); averaged {:.0} time units (needs {:.0}); run {:.0} s",
            QUARTET_TOP * 100.0,
            map.duration,
            run.quartet_required,
            run.elapsed
        ),
    );
}

struct WidthRow {
    k: usize,
    measured: f64,
    predicted: f64,
    overlap: f64,
}

fn width_rows(run: &WideRun) -> Vec<WidthRow> {
    let lp = LinewidthParams::from_thermo(WIDE_N, &run.thermo);
    let model = LinewidthModel::new(lp, true, Denominator::Renormalized).expect("model");
    let spec = &run.spectrum;
    let window = Window::Hann.coefficients(spec.segment_len);
    let dw = spec.delta_omega();
    let m = run.ks.len();
    run.ks
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let wt = model.omega_tilde(k);
            let meas = band_limited(&spec.omega_grid, &running_mean(&mirrored_row(spec, i, i + m), 1), wt, 0.5 * wt);
            let pred = model.predict_correlation(k, spec.sample_dt, spec.segment_len).expect("prediction");
            let ew = expected_welch_spectrum(&pred, &window).expect("expected spectrum");
            let ps = band_limited(&ew.omega, &running_mean(&ew.power, 1), wt, 0.5 * wt);
            let measured = spectral_width(&meas, dw).expect("width");
            let predicted = spectral_width(&ps, ew.delta_omega()).expect("width");
            let overlap = shape_overlap(
                &LineSpectrum { omega: spec.omega_grid.clone(), power: meas },
                &LineSpectrum { omega: ew.omega, power: ps },
            );
            WidthRow { k, measured, predicted, overlap }
        })
        .collect()
}

fn c11(r: &mut Report) {
    for (run, strong) in [(wide_weak(), false), (wide_strong(), true)] {
        let rows = width_rows(run);
        let mut all = true;
        for w in &rows {
            let q = w.predicted / w.measured;
            all &= if strong { (1.0 / WIDTH_FACTOR_STRONG..=WIDTH_FACTOR_STRONG).contains(&q) } else { (q - 1.0).abs() <= WIDTH_TOL_WEAK };
            r.info(
                "11",
                format!("beta = {}: k = {:3} W_meas = {:.5} W_pred = {:.5} ratio {:.3} overlap {:.3}", run.beta, w.k, w.measured, w.predicted, q, w.overlap),
            );
        }
        let ratios: Vec<f64> = rows.iter().map(|w| w.predicted / w.measured).collect();
        let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = ratios.iter().cloned().fold(0.0, f64::max);
        if strong {
            r.check("11b width-beta-0.5", all, format!("W_pred / W_meas in [{lo:.3}, {hi:.3}] for k = 20..100 (within factor {WIDTH_FACTOR_STRONG}); run {:.0} s", run.elapsed));
        } else {
            r.check("11a width-beta-0.125", all, format!("W_pred / W_meas in [{lo:.3}, {hi:.3}] for k = 20..100 (1 +- {WIDTH_TOL_WEAK}); run {:.0} s", run.elapsed));
            let shapes: Vec<String> = rows.iter().filter(|w| w.k == 30 || w.k == 50).map(|w| format!("k = {}: {:.3}", w.k, w.overlap)).collect();
            let ok = rows.iter().filter(|w| w.k == 30 || w.k == 50).all(|w| w.overlap >= OVERLAP_MIN);
            r.check("11c line-shape-beta-0.125", ok, format!("overlap {} (>= {OVERLAP_MIN})", shapes.join(", ")));
        }
    }
    let on = separation_strong_on();
    let off = separation(0.5, false);
    let pairs: Vec<(usize, f64)> = on
        .iter()
        .zip(&off)
        .filter_map(|(a, b)| Some((a.0, b.1? / a.1?)))
        .collect();
    let gmean = (pairs.iter().map(|p| p.1.ln()).sum::<f64>() / pairs.len() as f64).exp();
    let pick = |k: usize| pairs.iter().find(|p| p.0 == k).map_or(f64::NAN, |p| p.1);
    r.check(
        "11d umklapp-ratio",
        (UMKLAPP_RATIO.0..=UMKLAPP_RATIO.1).contains(&gmean),
        format!(
            "geometric mean of tau_off / tau_on over {} wave numbers = {gmean:.3} (k = 1: {:.3}, k = 64: {:.3}, k = 128: {:.3}) (in [{}, {}])",
            pairs.len(),
            pick(1),
            pick(64),
            pick(128),
            UMKLAPP_RATIO.0,
            UMKLAPP_RATIO.1
        ),
    );
}

fn c12(r: &mut Report) {
    let on = separation_strong_on();
    let weak = separation(0.125, true);
    for (rows, beta, gate, id) in [(on, 0.5, SEPARATION_STRONG, "12a separation-beta-0.5"), (&weak, 0.125, SEPARATION_WEAK, "12b separation-beta-0.125")] {
        let missing: Vec<usize> = rows.iter().filter(|x| x.2.is_none()).map(|x| x.0).collect();
        let (kmin, min) = rows
            .iter()
            .filter_map(|x| Some((x.0, x.2?)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap_or((0, f64::NAN));
        let list: Vec<String> = [1, 10, 30, 64, 128].iter().filter_map(|&k| rows.iter().find(|x| x.0 == k)).map(|x| format!("{}: {}", x.0, x.2.map_or("none".into(), |v| format!("{v:.1}")))).collect();
        r.check(
            id,
            missing.is_empty() && min >= gate,
            format!("beta = {beta}: min tau_k / t~_k = {min:.2} at k = {kmin} (>= {gate}); no 1/e crossing for k = {missing:?}; samples {}", list.join(", ")),
        );
    }
}

fn c13(r: &mut Report) {
    let (n, beta) = (256, 1.0);
    let params = ModelParams::new(n, beta, 100.0).unwrap();
    let (mut s, mut it) = thermalized(&params, 3, 0.01, 1_000_000);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    let mut count = 0;
    it.integrate_with(&mut s, 1_000_000, 100, |x| {
        let l = localization_of(&site_energies_of(&x.q, &x.p, beta)).unwrap();
        lo = lo.min(l);
        hi = hi.max(l);
        count += 1;
    })
    .unwrap();
    r.check(
        "13 localization",
        lo >= L_RANGE.0 && hi <= L_RANGE.1,
        format!("L(t) in [{lo:.3}, {hi:.3}] over {count} samples spanning 1e4 time units (within [{}, {}])", L_RANGE.0, L_RANGE.1),
    );
}

fn c14(r: &mut Report) {
    let n = 128;
    let e = pi_mode_energy(n, 0.1, 0.8);
    let params = ModelParams::new(n, 0.1, e).unwrap();
    let cfg = PiModeConfig::default();
    let t0 = Instant::now();
    let run = match pi_mode_experiment(&params, &cfg) {
        Ok(x) => x,
        Err(err) => return r.error("14a pi-mode-localization", err),
    };
    let peak = run.max_localization();
    let tail = &run.localization[run.localization.len() * 3 / 4..];
    let tail_max = tail.iter().cloned().fold(0.0, f64::max);
    r.check(
        "14a pi-mode-localization",
        peak > PI_PEAK_L && tail_max <= L_RANGE.1,
        format!(
            "max L = {peak:.2} (> {PI_PEAK_L}); max L over the last quarter of {} time units = {tail_max:.2} (<= {}); {:.0} s",
            cfg.horizon,
            L_RANGE.1,
            t0.elapsed().as_secs_f64()
        ),
    );
    let tracks = detect_in_site_energies(&run.energy_frames, &run.times, e / n as f64, &DetectionConfig::for_cut(2.0));
    let longest = tracks.iter().map(|t| t.lifetime).fold(0.0, f64::max);
    r.info("14", format!("transient: {} tracks on G_j, longest {longest:.0} time units", tracks.len()));
    match run.spectrum.as_ref().and_then(|s| band_gap(s, 0.1, 2.0)) {
        Some(g) => r.check(
            "14b breather-band",
            g.omega > 2.0 && g.depth <= PI_GAP_DEPTH,
            format!(
                "window {:?}: gap at w = {:.2} with depth {:.3} (<= {PI_GAP_DEPTH}), {:.1}% of power above it",
                run.window,
                g.omega,
                g.depth,
                100.0 * g.power_above
            ),
        ),
        None => r.check("14b breather-band", false, format!("no gap found; window {:?}", run.window)),
    }

    let (n, beta, energy) = (128, 25.0, 200.0);
    let params = ModelParams::new(n, beta, energy).unwrap();
    let th = ThermoSolution::solve(beta, energy / n as f64).unwrap();
    let (mut s, mut it) = thermalized(&params, 5, 0.005, 2_000_000);
    let mut snaps = Vec::new();
    it.integrate_with(&mut s, 20 * 4095, 20, |x| snaps.push(x.clone())).unwrap();
    let cut = 7.0;
    let field = frequency_filter(&site_series(&snaps), cut, 0.1).unwrap();
    let tracks = detect_in_filtered(&field, &DetectionConfig::for_cut(cut));
    let narrow: Vec<_> = tracks.iter().filter(|t| t.mean_span <= DB_SPAN).collect();
    let freqs: Vec<String> = narrow.iter().map(|t| format!("{:.2}", field.dominant_frequency(t.center_site(n)))).collect();
    r.check(
        "14c thermal-breathers",
        !narrow.is_empty(),
        format!(
            "{} tracks, {} with mean span <= {DB_SPAN} sites (lifetimes {:?}); dominant frequencies {:?} vs 2 eta = {:.2}",
            tracks.len(),
            narrow.len(),
            narrow.iter().map(|t| (t.lifetime * 10.0).round() / 10.0).collect::<Vec<_>>(),
            freqs,
            2.0 * th.eta
        ),
    );
}

fn c15(r: &mut Report) {
    let cfg = LyapunovConfig { resets: 3000, ..LyapunovConfig::default() };
    let betas = [16.0, 4.0, 1.0, 0.25];
    let hs: Vec<(f64, f64)> = betas
        .iter()
        .map(|&b| {
            let p = ModelParams::new(128, b, 100.0).unwrap();
            let h = lyapunov_fpu(&p, 1, &cfg).unwrap();
            (h.h, h.se)
        })
        .collect();
    let ordered = hs.windows(2).all(|w| w[0].0 > w[1].0) && hs[3].0 > 0.0;
    r.check(
        "15a lyapunov-ordering",
        ordered,
        format!(
            "h = {}",
            betas.iter().zip(&hs).map(|(b, h)| format!("{:.4} +- {:.4} (beta {b})", h.0, h.1)).collect::<Vec<_>>().join(", ")
        ),
    );
    let h1 = lyapunov_map(MapFamily::Logistic { lambda: 1.0 }, 0.3, 1_000_000, 1000).unwrap();
    let lambda_inf = 3.569_945_671_870_944 / 4.0;
    let hinf = lyapunov_map(MapFamily::Logistic { lambda: lambda_inf }, 0.3, 1_000_000, 1000).unwrap();
    let hprinted = lyapunov_map(MapFamily::Logistic { lambda: 0.89286 }, 0.3, 1_000_000, 1000).unwrap();
    r.check("15b logistic-full-chaos", (h1 - 2f64.ln()).abs() <= LOGISTIC_TOL, format!("h(1) = {h1:.5}, ln 2 = {:.5} (+- {LOGISTIC_TOL})", 2f64.ln()));
    r.check(
        "15c logistic-accumulation",
        hinf.abs() <= FEIGENBAUM_TOL,
        format!("h(lambda_inf = {lambda_inf:.7}) = {hinf:.2e} (|h| <= {FEIGENBAUM_TOL}); at the rounded 0.89286, h = {hprinted:.4}"),
    );
}

fn c16(r: &mut Report) {
    let (n, beta, energy) = (128, 1.0, 100.0);
    let params = ModelParams::new(n, beta, energy).unwrap();
    let init = random_thermal_init(&params, 4, 1.0, 1.0).unwrap();
    let mut all = true;
    let mut parts = Vec::new();
    for s in [2.0, 1.7] {
        let scaled = ModelParams::new(n, beta / (s * s), energy * s * s).unwrap();
        let mut a = init.clone();
        let mut b = init.scaled(s);
        let mut ia = Integrator::yoshida6(0.01, &params).unwrap();
        let mut ib = Integrator::yoshida6(0.01, &scaled).unwrap();
        let mut worst: f64 = 0.0;
        for _ in 0..10_000 {
            ia.step(&mut a);
            ib.step(&mut b);
            let d = a.q.iter().zip(&b.q).chain(a.p.iter().zip(&b.p)).map(|(x, y)| (s * x - y).abs()).fold(0.0, f64::max);
            worst = worst.max(d);
        }
        all &= worst <= SCALING_TOL;
        parts.push(format!("s = {s}: max |s x_a - x_b| = {worst:.2e}"));
    }
    r.check("16 scaling", all, format!("{} over 1e4 steps (<= {SCALING_TOL})", parts.join("; ")));
}

fn main() {
    let wanted: HashSet<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let on = |c: u32| wanted.is_empty() || wanted.contains(&c);
    let mut r = Report::default();
    let t0 = Instant::now();
    let table: [(u32, fn(&mut Report)); 11] = [
        (1, c1),
        (2, c2),
        (3, c3),
        (4, c4),
        (5, c5),
        (6, c6),
        (9, c9),
        (13, c13),
        (15, c15),
        (16, c16),
        (14, c14),
    ];
    for (c, f) in table {
        if on(c) {
            f(&mut r);
        }
        if c == 6 && (on(7) || on(8)) {
            c78(&mut r, on(7), on(8));
        }
    }
    for (c, f) in [(10u32, c10 as fn(&mut Report)), (11, c11), (12, c12)] {
        if on(c) {
            f(&mut r);
        }
    }
    let failed: Vec<&str> = r.lines.iter().filter(|l| !l.pass).map(|l| l.id.as_str()).collect();
    println!(
        "acceptance: {} checks, {} passed, {} failed {:?}; {:.0} s",
        r.lines.len(),
        r.lines.len() - failed.len(),
        failed.len(),
        failed,
        t0.elapsed().as_secs_f64()
    );
    if std::env::var("ACCEPTANCE_STRICT").as_deref() == Ok("1") && !failed.is_empty() {
        std::process::exit(1);
    }
}
