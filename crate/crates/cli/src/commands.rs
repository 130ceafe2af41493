use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::Path;

use fpulab::breather::{
    band_gap, detect_in_filtered, detect_in_site_energies, frequency_filter, pi_mode_experiment, site_series,
    BreatherTrack, DetectionConfig, PiModeConfig,
};
use fpulab::chain::{self, pi_mode_energy, random_thermal_init};
use fpulab::chaos::{lyapunov_fpu, lyapunov_map, LyapunovConfig, MapFamily};
use fpulab::linewidth::{
    band_limited, expected_welch_spectrum, running_mean, shape_overlap, spectral_width, Denominator, LineSpectrum,
    LinewidthModel, LinewidthParams,
};
use fpulab::resonance::{
    exact_quartets, half_period_families, nontrivial_branches, quartet_min_duration, resonance_curve_mask,
    top_mass_fraction_in_mask, umklapp_partner, verify_no_3to1, verify_no_4to0, QuartetAverager,
};
use fpulab::spectral::{
    linear_dispersion, measure_eta, spatiotemporal_spectrum_padded, FourierSeries, ModeTransformer, SpectralDensity,
    Window,
};
use fpulab::{Integrator, ModelParams, ThermoSolution};
use serde::Serialize;
use serde_json::json;

use crate::error::CliError;
use crate::run::{self, Run, RunLock, RunManifest, SeriesWriter, SCHEMA_VERSION};
use crate::{
    BreatherArgs, DenominatorKind, EtaArgs, InitKind, LinewidthArgs, LogisticArgs, LyapunovArgs, ResonanceArgs,
    SimulateArgs, SpectralArgs, SpectrumArgs, ThermoArgs, UmklappMode,
};

const PRODUCER: &str = concat!("fpulab ", env!("CARGO_PKG_VERSION"));
const CURVE_POINTS: usize = 1000;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>, CliError> {
    let f = fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    Ok(csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(f))
}

fn write_rows<R: Serialize>(path: &Path, rows: impl IntoIterator<Item = R>) -> Result<(), CliError> {
    let mut w = csv_writer(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

fn write_json(path: &Path, v: &serde_json::Value) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(v).map_err(|e| CliError::Schema(e.to_string()))?;
    fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
}

fn print_json(v: &serde_json::Value) {
    let text = serde_json::to_string_pretty(v).expect("json values serialize");
    // a closed pipe downstream is not an error for us
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn thermo_of(p: &ModelParams) -> Result<ThermoSolution, CliError> {
    Ok(ThermoSolution::solve(p.beta, p.edensity)?)
}

// ---------------------------------------------------------------- simulate

pub fn simulate(a: &SimulateArgs) -> Result<(), CliError> {
    if a.sample_every == 0 {
        return Err(usage("--sample-every must be positive"));
    }
    if a.steps % a.sample_every != 0 {
        return Err(usage(format!("--steps {} is not a multiple of --sample-every {}", a.steps, a.sample_every)));
    }
    let (params, init) = match a.init {
        InitKind::Thermal => {
            let p = ModelParams::new(a.n, a.beta, a.energy)?;
            let s = random_thermal_init(&p, a.seed, 1.0, 1.0)?;
            (p, s)
        }
        InitKind::PiMode => {
            let e = pi_mode_energy(a.n, a.beta, a.amplitude);
            let p = ModelParams::new(a.n, a.beta, e)?;
            let s = chain::pi_mode_init(&p, a.amplitude, a.noise, a.seed)?;
            (p, s)
        }
    };
    ensure_dir(&a.out)?;
    let _lock = RunLock::acquire(&a.out)?;
    let manifest_path = a.out.join(run::MANIFEST);
    if manifest_path.exists() {
        if !a.force {
            return Err(usage(format!("{} already holds a run; pass --force to replace it", a.out.display())));
        }
        fs::remove_file(&manifest_path).map_err(|e| CliError::io(&manifest_path, e))?;
    }

    let mut state = init;
    let mut integ = Integrator::yoshida6(a.dt, &params)?;
    if a.warmup > 0 {
        integ.integrate_with(&mut state, a.warmup, a.warmup, |_| {})?;
    }
    state.t = 0.0;
    let mut writer = SeriesWriter::create(&a.out, a.n)?;
    let h0 = chain::total_energy(&state, &params)?;
    let mut drift = 0.0f64;
    let mut failure = None;
    integ.integrate_with(&mut state, a.steps, a.sample_every, |s| {
        if failure.is_some() {
            return;
        }
        if let Err(e) = writer.push(s) {
            failure = Some(e);
            return;
        }
        let h = chain::hamiltonian(&s.q, &s.p, params.beta);
        drift = drift.max(((h - h0) / h0).abs());
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    let samples = writer.finish()?;
    let manifest = RunManifest {
        schema_version: SCHEMA_VERSION,
        params,
        dt: a.dt,
        seed: a.seed,
        warmup_steps: a.warmup,
        sample_every: a.sample_every,
        samples,
        horizon: (samples - 1) as f64 * a.sample_every as f64 * a.dt,
        created_utc: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        producer: PRODUCER.into(),
    };
    run::write_manifest(&a.out, &manifest)?;
    print_json(&json!({
        "out": a.out.display().to_string(),
        "samples": samples,
        "horizon": manifest.horizon,
        "energy_initial": h0,
        "max_relative_drift": drift,
    }));
    Ok(())
}

// ---------------------------------------------------------------- thermo

pub fn thermo(a: &ThermoArgs) -> Result<(), CliError> {
    let t = ThermoSolution::solve(a.beta, a.edensity)?;
    print_json(&serde_json::to_value(t).map_err(|e| CliError::Schema(e.to_string()))?);
    Ok(())
}

// ---------------------------------------------------------------- eta / spectrum

struct Spectral {
    run: Run,
    eta: f64,
    spectrum: SpectralDensity,
}

fn spectral_of(a: &SpectralArgs, k_list: Vec<usize>) -> Result<Spectral, CliError> {
    let run = Run::open(&a.run)?;
    let m = &run.manifest;
    let n = m.params.n;
    let eta = match a.eta {
        Some(e) => e,
        None => thermo_of(&m.params)?.eta,
    };
    let mut fs = FourierSeries::new(n, k_list, m.sample_dt())?;
    let mut tr = ModeTransformer::new(n);
    for s in &run.snapshots {
        fs.push(&tr.to_fourier(s)?);
    }
    let spectrum = spatiotemporal_spectrum_padded(&fs.waves(eta), 2.0 * eta, a.window.into(), a.segments, a.pad)?;
    Ok(Spectral { run, eta, spectrum })
}

#[derive(Serialize)]
struct EtaRow {
    k: usize,
    omega_k: f64,
    omega_c: f64,
    eta_k: f64,
}

pub fn eta(a: &EtaArgs) -> Result<(), CliError> {
    let s = &a.spectral;
    let n = run::read_manifest(&s.run)?.params.n;
    let sp = spectral_of(s, (1..n).collect())?;
    let omega = linear_dispersion(n);
    let m = measure_eta(&sp.spectrum, &omega)?;
    let thermo = thermo_of(&sp.run.manifest.params)?;
    ensure_dir(&s.out)?;
    write_rows(
        &s.out.join("eta_by_k.csv"),
        (0..m.k_list.len()).map(|i| EtaRow { k: m.k_list[i], omega_k: m.omega_k[i], omega_c: m.omega_c[i], eta_k: m.eta_k[i] }),
    )?;
    let summary = json!({
        "n": n,
        "eta_bar": m.eta_bar,
        "spread": m.spread,
        "eta_gibbs": thermo.eta,
        "eta_sc": thermo.eta_sc,
        "wave_eta": sp.eta,
        "segments": sp.spectrum.segments,
        "segment_len": sp.spectrum.segment_len,
    });
    write_json(&s.out.join("eta.json"), &summary)?;
    print_json(&summary);
    Ok(())
}

#[derive(Serialize)]
struct SpectrumRow {
    k: usize,
    omega: f64,
    power: f64,
}

pub fn spectrum(a: &SpectrumArgs) -> Result<(), CliError> {
    let s = &a.spectral;
    let n = run::read_manifest(&s.run)?.params.n;
    let k_list = if a.k.is_empty() { (1..n).collect() } else { a.k.clone() };
    let sp = spectral_of(s, k_list)?;
    let spec = &sp.spectrum;
    ensure_dir(&s.out)?;
    let (grid, rows) = spec.one_sided();
    write_rows(
        &s.out.join("spectrum.csv"),
        spec.k_list.iter().zip(&rows).flat_map(|(&k, row)| {
            grid.iter().zip(row).map(move |(&omega, &power)| SpectrumRow { k, omega, power })
        }),
    )?;
    let peaks: Vec<serde_json::Value> = (0..spec.k_list.len())
        .map(|i| json!({ "k": spec.k_list[i], "peak": spec.peak_frequency(i), "total_power": spec.total_power(i) }))
        .collect();
    let summary = json!({
        "wave_eta": sp.eta,
        "delta_omega": spec.delta_omega(),
        "resolution": spec.resolution(),
        "segments": spec.segments,
        "segment_len": spec.segment_len,
        "modes": peaks,
    });
    write_json(&s.out.join("spectrum.json"), &summary)?;
    let _ = writeln!(std::io::stdout().lock(), "wrote {} modes to {}", spec.k_list.len(), s.out.join("spectrum.csv").display());
    Ok(())
}

// ---------------------------------------------------------------- resonances

#[derive(Serialize)]
struct QuartetRow {
    k: usize,
    l: usize,
    m: usize,
    s: usize,
    kind: String,
    residual: f64,
}

#[derive(Serialize)]
struct CurveRow {
    branch: &'static str,
    y: f64,
    z: f64,
    v: f64,
}

#[derive(Serialize)]
struct MapRow {
    l: usize,
    m: usize,
    value: f64,
}

fn kind_name(k: fpulab::resonance::QuartetKind) -> String {
    serde_json::to_value(k).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default()
}

pub fn resonances(a: &ResonanceArgs) -> Result<(), CliError> {
    if a.run.is_some() && a.k.is_none() {
        return Err(usage("--run requires --k"));
    }
    ensure_dir(&a.out)?;
    let n = a.n;
    let found = exact_quartets(n, a.tol)?;
    let mut expected = BTreeSet::new();
    for [k, l, m, s] in half_period_families(n) {
        for (p, q) in [(k, l), (l, k)] {
            for (r, t) in [(m, s), (s, m)] {
                expected.insert([p, q, r, t]);
            }
        }
    }
    let got: BTreeSet<[usize; 4]> = found.iter().map(|q| q.tuple()).collect();
    write_rows(
        &a.out.join("exact_quartets.csv"),
        found.iter().map(|q| QuartetRow { k: q.k, l: q.l, m: q.m, s: q.s, kind: kind_name(q.kind), residual: q.residual }),
    )?;
    let r31 = verify_no_3to1(n)?;
    let r40 = verify_no_4to0(n)?;
    let mut summary = json!({
        "n": n,
        "tol": a.tol,
        "exact": found.len(),
        "expected_from_families": expected.len(),
        "families_match": expected == got,
        "three_to_one": r31,
        "four_to_zero": r40,
    });

    if let Some(k) = a.k {
        if k == 0 || k >= n {
            return Err(usage(format!("--k must lie in 1..{n}")));
        }
        let x = k as f64 / n as f64;
        let mut rows = Vec::new();
        for i in 1..CURVE_POINTS {
            let y = i as f64 / CURVE_POINTS as f64;
            for z in nontrivial_branches(x, y) {
                if let Some(v) = umklapp_partner(x, y, z) {
                    rows.push(CurveRow { branch: "umklapp", y, z, v });
                }
            }
            rows.push(CurveRow { branch: "trivial_m_eq_k", y, z: x, v: y });
            rows.push(CurveRow { branch: "trivial_m_eq_l", y, z: y, v: x });
        }
        write_rows(&a.out.join("resonance_curves.csv"), rows)?;

        if let Some(dir) = &a.run {
            let run = Run::open(dir)?;
            let m = &run.manifest;
            if m.params.n != n {
                return Err(usage(format!("run has N = {}, but --n is {n}", m.params.n)));
            }
            let eta = thermo_of(&m.params)?.eta;
            let mut avg = QuartetAverager::new(n, k)?;
            let mut tr = ModeTransformer::new(n);
            for s in &run.snapshots {
                avg.push_field(&tr.waves_of_state(s, eta)?)?;
            }
            let map = avg.finish(m.sample_dt(), quartet_min_duration(n, eta))?;
            write_rows(
                &a.out.join("quartet_map.csv"),
                (1..n).flat_map(|l| {
                    let row = &map.values[l];
                    (1..n).map(move |mm| MapRow { l, m: mm, value: row[mm] })
                }),
            )?;
            let mask = resonance_curve_mask(n, k, 2);
            let frac = top_mass_fraction_in_mask(&map.values, &mask, 0.01);
            summary["quartet_map"] =
                json!({ "k": k, "samples": map.samples, "duration": map.duration, "top_1pct_mass_near_curves": frac });
        }
    }
    write_json(&a.out.join("resonances.json"), &summary)?;
    print_json(&json!({
        "n": n,
        "exact": summary["exact"],
        "expected_from_families": summary["expected_from_families"],
        "families_match": summary["families_match"],
        "three_to_one_exact": summary["three_to_one"]["exact"].as_array().map_or(0, Vec::len),
        "four_to_zero_exact": summary["four_to_zero"]["exact"].as_array().map_or(0, Vec::len),
    }));
    Ok(())
}

// ---------------------------------------------------------------- linewidth

#[derive(Serialize)]
struct TauRow {
    k: usize,
    omega_tilde: f64,
    tau_on: Option<f64>,
    ratio_on: Option<f64>,
    tau_off: Option<f64>,
    ratio_off: Option<f64>,
}

#[derive(Serialize)]
struct WidthRow {
    k: usize,
    w_pred: f64,
    w_meas: f64,
    overlap: f64,
}

fn tau(model: &LinewidthModel, k: usize) -> (Option<f64>, Option<f64>) {
    match model.predict_until_crossing(k, 1024, 20.0, 1e7) {
        Ok((_, ct)) => (Some(ct.tau), Some(ct.ratio)),
        Err(_) => (None, None),
    }
}

pub fn linewidth(a: &LinewidthArgs) -> Result<(), CliError> {
    let n = a.n;
    let ks: Vec<usize> = if a.k.is_empty() { (1..=n / 2).collect() } else { a.k.clone() };
    if let Some(&k) = ks.iter().find(|&&k| k == 0 || k >= n) {
        return Err(usage(format!("wave number {k} outside 1..{n}")));
    }
    let denominator = match a.denominator {
        DenominatorKind::Renormalized => Denominator::Renormalized,
        DenominatorKind::Bare => Denominator::Bare,
    };
    let lp = LinewidthParams::solve(n, a.beta, a.energy)?;
    let on = LinewidthModel::new(lp, true, denominator)?;
    let off = LinewidthModel::new(lp, false, denominator)?;
    let want_on = a.umklapp != UmklappMode::Off;
    let want_off = a.umklapp != UmklappMode::On;
    ensure_dir(&a.out)?;
    let rows: Vec<TauRow> = ks
        .iter()
        .map(|&k| {
            let (tau_on, ratio_on) = if want_on { tau(&on, k) } else { (None, None) };
            let (tau_off, ratio_off) = if want_off { tau(&off, k) } else { (None, None) };
            TauRow { k, omega_tilde: on.omega_tilde(k), tau_on, ratio_on, tau_off, ratio_off }
        })
        .collect();
    let logs: Vec<f64> = rows
        .iter()
        .filter_map(|r| Some((r.tau_off? / r.tau_on?).ln()))
        .collect();
    let geo = (!logs.is_empty()).then(|| (logs.iter().sum::<f64>() / logs.len() as f64).exp());
    let min_ratio = |f: fn(&TauRow) -> Option<f64>| rows.iter().filter_map(f).fold(None, |m: Option<f64>, x| Some(m.map_or(x, |m| m.min(x))));
    let mut summary = json!({
        "n": n,
        "beta": a.beta,
        "energy": a.energy,
        "eta": lp.eta,
        "prefactor": lp.prefactor(),
        "min_ratio_on": min_ratio(|r| r.ratio_on),
        "min_ratio_off": min_ratio(|r| r.ratio_off),
        "geometric_mean_tau_off_over_on": geo,
    });
    write_rows(&a.out.join("linewidth.csv"), rows)?;

    if let Some(dir) = &a.run {
        let run = Run::open(dir)?;
        let m = &run.manifest;
        if m.params.n != n || m.params.beta != a.beta || (m.params.energy - a.energy).abs() > 1e-9 * a.energy {
            return Err(usage("run parameters differ from --n/--beta/--energy"));
        }
        let mut k_list = ks.clone();
        k_list.extend(ks.iter().map(|k| n - k));
        let mut fs = FourierSeries::new(n, k_list, m.sample_dt())?;
        let mut tr = ModeTransformer::new(n);
        for s in &run.snapshots {
            fs.push(&tr.to_fourier(s)?);
        }
        let spec = spatiotemporal_spectrum_padded(&fs.waves(lp.eta), 2.0 * lp.eta, Window::Hann, a.segments, 1)?;
        let window = Window::Hann.coefficients(spec.segment_len);
        let dw = spec.delta_omega();
        let model = if want_on { &on } else { &off };
        let c = ks.len();
        let mut widths = Vec::with_capacity(c);
        for (i, &k) in ks.iter().enumerate() {
            let wt = model.omega_tilde(k);
            let mixed: Vec<f64> = spec.power[i].iter().zip(&spec.power[i + c]).map(|(x, y)| 0.5 * (x + y)).collect();
            let meas = band_limited(&spec.omega_grid, &running_mean(&mixed, 1), wt, 0.5 * wt);
            let pred = model.predict_correlation(k, spec.sample_dt, spec.segment_len)?;
            let ew = expected_welch_spectrum(&pred, &window)?;
            let ps = band_limited(&ew.omega, &running_mean(&ew.power, 1), wt, 0.5 * wt);
            let w_meas = spectral_width(&meas, dw)?;
            let w_pred = spectral_width(&ps, ew.delta_omega())?;
            let overlap = shape_overlap(
                &LineSpectrum { omega: spec.omega_grid.clone(), power: meas },
                &LineSpectrum { omega: ew.omega, power: ps },
            );
            widths.push(WidthRow { k, w_pred, w_meas, overlap });
        }
        summary["widths"] = json!({ "segments": spec.segments, "segment_len": spec.segment_len, "modes": widths.len() });
        write_rows(&a.out.join("width.csv"), widths)?;
    }
    write_json(&a.out.join("linewidth.json"), &summary)?;
    print_json(&summary);
    Ok(())
}

// ---------------------------------------------------------------- breathers

#[derive(Serialize)]
struct TrackRow {
    track: usize,
    start: f64,
    lifetime: f64,
    mean_span: f64,
    center_site: usize,
    frames: usize,
    dominant_frequency: Option<f64>,
}

#[derive(Serialize)]
struct LocalizationRow {
    t: f64,
    l: f64,
}

fn track_rows(tracks: &[BreatherTrack], n: usize, freq: impl Fn(usize) -> Option<f64>) -> Vec<TrackRow> {
    tracks
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let c = t.center_site(n);
            TrackRow {
                track: i,
                start: t.frames[0].time,
                lifetime: t.lifetime,
                mean_span: t.mean_span,
                center_site: c,
                frames: t.frames.len(),
                dominant_frequency: freq(c),
            }
        })
        .collect()
}

pub fn breathers(a: &BreatherArgs) -> Result<(), CliError> {
    ensure_dir(&a.out)?;
    if a.pi_mode {
        let e = pi_mode_energy(a.n, a.beta, a.amplitude);
        let params = ModelParams::new(a.n, a.beta, e)?;
        let cfg = PiModeConfig { amplitude: a.amplitude, seed: a.seed, horizon: a.horizon, ..PiModeConfig::default() };
        let run = pi_mode_experiment(&params, &cfg)?;
        write_rows(
            &a.out.join("localization.csv"),
            run.times.iter().zip(&run.localization).map(|(&t, &l)| LocalizationRow { t, l }),
        )?;
        let det = DetectionConfig {
            threshold_factor: a.threshold,
            max_span: a.max_span,
            ..DetectionConfig::for_cut(a.omega_cut.unwrap_or(2.0))
        };
        let tracks = detect_in_site_energies(&run.energy_frames, &run.times, params.edensity, &det);
        write_rows(&a.out.join("tracks.csv"), track_rows(&tracks, a.n, |_| None))?;
        let gap = run.spectrum.as_ref().and_then(|s| band_gap(s, 0.1, 2.0));
        let summary = json!({
            "n": a.n,
            "beta": a.beta,
            "amplitude": a.amplitude,
            "energy": e,
            "max_localization": run.max_localization(),
            "window": run.window,
            "band_gap": gap.map(|g| json!({ "omega": g.omega, "depth": g.depth, "power_above": g.power_above })),
            "tracks": tracks.len(),
        });
        write_json(&a.out.join("breathers.json"), &summary)?;
        print_json(&summary);
        return Ok(());
    }
    let dir = a.run.as_ref().ok_or_else(|| usage("pass --run DIR or --pi-mode"))?;
    let run = Run::open(dir)?;
    let m = &run.manifest;
    let n = m.params.n;
    let cut = match a.omega_cut {
        Some(c) => c,
        None => 1.1 * 2.0 * thermo_of(&m.params)?.eta,
    };
    let field = frequency_filter(&site_series(&run.snapshots), cut, m.sample_dt())?;
    let det = DetectionConfig { threshold_factor: a.threshold, max_span: a.max_span, ..DetectionConfig::for_cut(cut) };
    let tracks = detect_in_filtered(&field, &det);
    let rows = track_rows(&tracks, n, |c| Some(field.dominant_frequency(c)));
    let narrow = tracks.iter().filter(|t| t.mean_span <= 3.0).count();
    let longest = tracks.iter().map(|t| t.lifetime).fold(0.0, f64::max);
    write_rows(&a.out.join("tracks.csv"), rows)?;
    let summary = json!({
        "n": n,
        "omega_cut": cut,
        "threshold": a.threshold,
        "max_span": a.max_span,
        "min_lifetime": det.min_lifetime,
        "tracks": tracks.len(),
        "narrow_tracks": narrow,
        "longest_lifetime": longest,
    });
    write_json(&a.out.join("breathers.json"), &summary)?;
    print_json(&summary);
    Ok(())
}

// ---------------------------------------------------------------- chaos

#[derive(Serialize)]
struct PartialRow {
    reset: usize,
    t: f64,
    h: f64,
}

pub fn lyapunov(a: &LyapunovArgs) -> Result<(), CliError> {
    let params = ModelParams::new(a.n, a.beta, a.energy)?;
    let cfg = LyapunovConfig { dt: a.dt, renorm_interval: a.interval, resets: a.resets, d0: a.d0, warmup_steps: a.warmup };
    let est = lyapunov_fpu(&params, a.seed, &cfg)?;
    if let Some(out) = &a.out {
        ensure_dir(out)?;
        write_rows(
            &out.join("h_partial.csv"),
            est.h_partial.iter().enumerate().map(|(i, &h)| PartialRow { reset: i + 1, t: (i + 1) as f64 * a.interval, h }),
        )?;
    }
    print_json(&json!({
        "n": a.n,
        "beta": a.beta,
        "energy": a.energy,
        "h": est.h,
        "se": est.se,
        "resets": est.resets,
        "renorm_interval": est.renorm_interval,
    }));
    Ok(())
}

pub fn logistic(a: &LogisticArgs) -> Result<(), CliError> {
    let h = lyapunov_map(MapFamily::Logistic { lambda: a.lambda }, a.x0, a.iters, a.burn_in)?;
    print_json(&json!({ "lambda": a.lambda, "h": h, "iterations": a.iters, "burn_in": a.burn_in }));
    Ok(())
}
