//! Experiment commands behind the CLI. Each writes its CSV files into the
//! configured output directory and returns a summary for the caller.
//!
//! Floats are written as `{:.16e}` (17 significant digits), which
//! round-trips exactly and makes reruns byte-identical.

use std::fs;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::diagnostics::{deviations, fourier_amplitudes, FourierSeries};
use crate::error::{Error, Result};
use crate::integrator::{run, TrajectoryRecord};
use crate::model_law::ModelLaw;
use crate::ring::{RingConfig, RingState};
use crate::stability::{
    bisect_threshold, classify_law, long_wave_probe, max_growth_nonzero, max_real_part,
    threshold_ratio, EquilibriumInfo, Linearization, Stability,
};

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_writer(dir: &Path, name: &str) -> Result<csv::Writer<fs::File>> {
    let file = fs::File::create(dir.join(name))?;
    Ok(csv::WriterBuilder::new().from_writer(file))
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(std::io::Error::from)?;
    fs::write(dir.join(name), text + "\n")?;
    Ok(())
}

fn prepare_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

fn io(e: csv::Error) -> Error {
    Error::Io(e.into())
}

/// Run metadata written to `meta.json`.
#[derive(Debug, Clone, Serialize)]
pub struct SimulationMeta {
    pub preset: Option<String>,
    pub model: &'static str,
    /// `a` for the hybrid law, `alpha` for the classical one.
    pub parameter: f64,
    /// `a* = c V'(b)` or `alpha* = 2 V'(b)`.
    pub critical_parameter: f64,
    pub a: Option<f64>,
    pub a_star: f64,
    pub ratio: f64,
    pub classification: Stability,
    pub n_vehicles: usize,
    pub ring_length: f64,
    pub b: f64,
    pub c: f64,
    pub f: f64,
    pub scheme: &'static str,
    pub dt: f64,
    pub t_end: f64,
    pub n_steps: usize,
    pub record_stride: usize,
    pub clamp_nonnegative: bool,
    pub perturbation_index: usize,
    pub perturbation_dx: f64,
    pub modes: Vec<usize>,
    pub n_samples: usize,
    pub min_velocity: f64,
    pub max_velocity: f64,
    pub collision: bool,
    pub first_collision_time: Option<f64>,
    pub status: &'static str,
    pub failure_step: Option<usize>,
    pub wall_clock_seconds: f64,
}

#[derive(Debug, Clone)]
pub struct SimulationOutcome {
    pub meta: SimulationMeta,
    pub record: TrajectoryRecord,
    pub fourier: FourierSeries,
}

fn critical_parameter(law: &ModelLaw, eq: &EquilibriumInfo) -> f64 {
    match law {
        ModelLaw::HybridOvd { .. } => eq.a_star,
        ModelLaw::ClassicalOvm { .. } => eq.alpha_star(),
    }
}

fn law_parameter(law: &ModelLaw) -> f64 {
    match *law {
        ModelLaw::HybridOvd { a, .. } => a,
        ModelLaw::ClassicalOvm { alpha } => alpha,
    }
}

/// Integrates the configured ring and writes `trajectories.csv`,
/// `velocities.csv`, `fourier.csv` and `meta.json`. On divergence the
/// samples recorded so far are still written and `meta.json` notes the
/// failing step.
pub fn cmd_simulate(cfg: &ExperimentConfig) -> Result<SimulationOutcome> {
    cfg.validate()?;
    let eq = cfg.equilibrium()?;
    let law = cfg.law()?;
    let initial = cfg.initial_state()?;
    let dir = cfg.output_dir.as_path();
    prepare_dir(dir)?;

    let started = Instant::now();
    let (record, failure) = match run(&initial, &law, &cfg.ov, &cfg.ring, &cfg.plan) {
        Ok(rec) => (rec, None),
        Err(Error::Diverged {
            step,
            time,
            partial: Some(rec),
        }) => (*rec, Some((step, time))),
        Err(e) => return Err(e),
    };
    let elapsed = started.elapsed().as_secs_f64();

    let fourier = fourier_amplitudes(&deviations(&record, &eq)?, &cfg.modes)?;
    write_trajectories(dir, &record, cfg.ring.ring_length)?;
    write_velocities(dir, &record)?;
    write_fourier(dir, &fourier)?;

    let meta = SimulationMeta {
        preset: cfg.preset.map(|p| p.name().to_string()),
        model: cfg.model.kind_name(),
        parameter: law_parameter(&law),
        critical_parameter: critical_parameter(&law, &eq),
        a: law.is_hybrid().then(|| law_parameter(&law)),
        a_star: eq.a_star,
        ratio: threshold_ratio(&law, &eq),
        classification: classify_law(&law, &eq),
        n_vehicles: cfg.ring.n_vehicles,
        ring_length: cfg.ring.ring_length,
        b: eq.b,
        c: eq.c,
        f: eq.f,
        scheme: cfg.plan.scheme.name(),
        dt: cfg.plan.dt,
        t_end: cfg.plan.t_end,
        n_steps: record.meta.n_steps,
        record_stride: cfg.plan.record_stride,
        clamp_nonnegative: cfg.plan.clamp_nonnegative,
        perturbation_index: cfg.perturbation.index,
        perturbation_dx: cfg.perturbation.dx(eq.b),
        modes: cfg.modes.clone(),
        n_samples: record.n_samples(),
        min_velocity: record.meta.min_velocity,
        max_velocity: record.meta.max_velocity,
        collision: record.meta.collision,
        first_collision_time: record.meta.first_collision_time,
        status: if failure.is_some() { "diverged" } else { "ok" },
        failure_step: failure.map(|f| f.0),
        wall_clock_seconds: elapsed,
    };
    write_json(dir, "meta.json", &meta)?;

    if let Some((step, time)) = failure {
        return Err(Error::Diverged {
            step,
            time,
            partial: None,
        });
    }
    Ok(SimulationOutcome {
        meta,
        record,
        fourier,
    })
}

fn write_trajectories(dir: &Path, record: &TrajectoryRecord, ring_length: f64) -> Result<()> {
    let mut w = csv_writer(dir, "trajectories.csv")?;
    w.write_record(["t", "vehicle", "x_unwrapped", "x_wrapped", "v"])
        .map_err(io)?;
    for s in 0..record.n_samples() {
        let t = fmt_f64(record.times[s]);
        for (i, (&x, &v)) in record
            .positions_at(s)
            .iter()
            .zip(record.velocities_at(s))
            .enumerate()
        {
            w.write_record([
                t.clone(),
                i.to_string(),
                fmt_f64(x),
                fmt_f64(x.rem_euclid(ring_length)),
                fmt_f64(v),
            ])
            .map_err(io)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn write_velocities(dir: &Path, record: &TrajectoryRecord) -> Result<()> {
    let mut w = csv_writer(dir, "velocities.csv")?;
    let header: Vec<String> = std::iter::once("t".to_string())
        .chain((0..record.n_vehicles).map(|i| format!("v_{i}")))
        .collect();
    w.write_record(&header).map_err(io)?;
    for s in 0..record.n_samples() {
        let row: Vec<String> = std::iter::once(record.times[s])
            .chain(record.velocities_at(s).iter().copied())
            .map(fmt_f64)
            .collect();
        w.write_record(&row).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

fn write_fourier(dir: &Path, series: &FourierSeries) -> Result<()> {
    let mut w = csv_writer(dir, "fourier.csv")?;
    let header: Vec<String> = std::iter::once("time".to_string())
        .chain(series.modes.iter().map(|m| format!("A_{m}")))
        .collect();
    w.write_record(&header).map_err(io)?;
    for (t, row) in series.times.iter().zip(&series.amplitudes) {
        let rec: Vec<String> = std::iter::once(*t)
            .chain(row.iter().copied())
            .map(fmt_f64)
            .collect();
        w.write_record(&rec).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumSummary {
    pub model: &'static str,
    pub n_vehicles: usize,
    pub b: f64,
    pub ratio: f64,
    pub classification: Stability,
    /// Over all `2N` eigenvalues, Goldstone root included.
    pub max_re_lambda: f64,
    /// Over `lambda_+` of the modes `m != 0`.
    pub max_re_lambda_nonzero: f64,
    pub fastest_mode: usize,
}

/// Writes `spectrum.csv` (`m, k, Re/Im lambda_+, Re/Im lambda_-`) and
/// `spectrum_meta.json`.
pub fn cmd_spectrum(cfg: &ExperimentConfig) -> Result<SpectrumSummary> {
    cfg.validate()?;
    let eq = cfg.equilibrium()?;
    let law = cfg.law()?;
    let dir = cfg.output_dir.as_path();
    prepare_dir(dir)?;

    let spectrum = Linearization::for_law(&law, &eq).ring_spectrum(cfg.ring.n_vehicles);
    let mut w = csv_writer(dir, "spectrum.csv")?;
    w.write_record([
        "m",
        "k",
        "re_lambda_plus",
        "im_lambda_plus",
        "re_lambda_minus",
        "im_lambda_minus",
    ])
    .map_err(io)?;
    for (m, p) in spectrum.iter().enumerate() {
        w.write_record([
            m.to_string(),
            fmt_f64(p.k),
            fmt_f64(p.lambda_plus.re),
            fmt_f64(p.lambda_plus.im),
            fmt_f64(p.lambda_minus.re),
            fmt_f64(p.lambda_minus.im),
        ])
        .map_err(io)?;
    }
    w.flush()?;

    let (fastest_mode, max_nonzero) = max_growth_nonzero(&spectrum).unwrap_or((0, f64::NAN));
    let summary = SpectrumSummary {
        model: cfg.model.kind_name(),
        n_vehicles: cfg.ring.n_vehicles,
        b: eq.b,
        ratio: threshold_ratio(&law, &eq),
        classification: classify_law(&law, &eq),
        max_re_lambda: max_real_part(&spectrum),
        max_re_lambda_nonzero: max_nonzero,
        fastest_mode,
    };
    write_json(dir, "spectrum_meta.json", &summary)?;
    Ok(summary)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdRow {
    pub b: f64,
    pub c: f64,
    pub f: f64,
    pub a_star_closed_form: f64,
    pub a_star_bisection: f64,
    pub relative_difference: f64,
}

/// Closed-form `a* = c V'(b)` against the spectrum bisection, one row per
/// headway of `cfg.b_grid`, written to `threshold.csv`.
pub fn cmd_threshold(cfg: &ExperimentConfig) -> Result<Vec<ThresholdRow>> {
    cfg.validate()?;
    let dir = cfg.output_dir.as_path();
    prepare_dir(dir)?;
    let probe = long_wave_probe();
    let rows = cfg
        .b_grid
        .iter()
        .map(|&b| {
            let eq = EquilibriumInfo::at_headway(&cfg.ov, b)?;
            let bisected = bisect_threshold(&eq, &probe)?;
            Ok(ThresholdRow {
                b,
                c: eq.c,
                f: eq.f,
                a_star_closed_form: eq.a_star,
                a_star_bisection: bisected,
                relative_difference: (bisected - eq.a_star).abs() / eq.a_star,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut w = csv_writer(dir, "threshold.csv")?;
    w.write_record([
        "b",
        "c",
        "f",
        "a_star_closed_form",
        "a_star_bisection",
        "relative_difference",
    ])
    .map_err(io)?;
    for r in &rows {
        w.write_record(
            [
                r.b,
                r.c,
                r.f,
                r.a_star_closed_form,
                r.a_star_bisection,
                r.relative_difference,
            ]
            .map(fmt_f64),
        )
        .map_err(io)?;
    }
    w.flush()?;
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct JerkRow {
    pub v: f64,
    pub accel_ovm: f64,
    pub accel_hybrid: f64,
    pub alpha_eff: f64,
    pub jerk_ovm: f64,
    pub jerk_hybrid: f64,
}

/// Acceleration, effective sensitivity and jerk of both laws at fixed
/// desired speed over a velocity grid, written to `jerk.csv`.
pub fn cmd_jerk_profile(cfg: &ExperimentConfig) -> Result<Vec<JerkRow>> {
    let spec = &cfg.jerk;
    if !(spec.v_des > 0.0) {
        return Err(Error::Config(
            "jerk profile needs a positive desired speed".into(),
        ));
    }
    let ovm = ModelLaw::classical(spec.alpha)?;
    let hybrid = ModelLaw::hybrid(spec.a)?;
    let dir = cfg.output_dir.as_path();
    prepare_dir(dir)?;

    let vd = spec.v_des;
    let rows = spec
        .v_grid
        .iter()
        .map(|&v| {
            Ok(JerkRow {
                v,
                accel_ovm: ovm.accel(v, vd)?,
                accel_hybrid: hybrid.accel(v, vd)?,
                alpha_eff: hybrid.effective_sensitivity(v, vd)?,
                jerk_ovm: ovm.jerk(v, vd)?,
                jerk_hybrid: hybrid.jerk(v, vd)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut w = csv_writer(dir, "jerk.csv")?;
    w.write_record([
        "v",
        "accel_ovm",
        "accel_hybrid",
        "alpha_eff",
        "jerk_ovm",
        "jerk_hybrid",
    ])
    .map_err(io)?;
    for r in &rows {
        w.write_record(
            [
                r.v,
                r.accel_ovm,
                r.accel_hybrid,
                r.alpha_eff,
                r.jerk_ovm,
                r.jerk_hybrid,
            ]
            .map(fmt_f64),
        )
        .map_err(io)?;
    }
    w.flush()?;
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub b: f64,
    pub a_ratio: f64,
    pub classification: Option<Stability>,
    /// Largest `Re lambda_+` over the modes `m != 0`.
    pub max_re_lambda: f64,
    /// Mode with the largest final/initial amplitude ratio.
    pub fastest_mode: Option<usize>,
    pub amplitude_ratio: f64,
    pub status: String,
}

/// One simulation per `(b, a/a*)` cell on a ring of the configured size,
/// written in grid order to `sweep.csv`. Cells run in parallel; a failing
/// cell is reported in its row.
pub fn cmd_sweep(cfg: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    let dir = cfg.output_dir.as_path();
    prepare_dir(dir)?;

    let cells: Vec<(f64, f64)> = cfg
        .sweep
        .b_values
        .iter()
        .flat_map(|&b| cfg.sweep.a_ratios.iter().map(move |&r| (b, r)))
        .collect();
    let rows: Vec<SweepRow> = cells
        .par_iter()
        .map(|&(b, ratio)| {
            sweep_cell(cfg, b, ratio).unwrap_or_else(|e| SweepRow {
                b,
                a_ratio: ratio,
                classification: None,
                max_re_lambda: f64::NAN,
                fastest_mode: None,
                amplitude_ratio: f64::NAN,
                status: format!("error: {e}"),
            })
        })
        .collect();

    let mut w = csv_writer(dir, "sweep.csv")?;
    w.write_record([
        "b",
        "a_ratio",
        "classification",
        "max_re_lambda",
        "fastest_mode",
        "amplitude_ratio",
        "status",
    ])
    .map_err(io)?;
    for r in &rows {
        w.write_record([
            fmt_f64(r.b),
            fmt_f64(r.a_ratio),
            r.classification.map_or_else(String::new, |c| c.to_string()),
            fmt_f64(r.max_re_lambda),
            r.fastest_mode.map_or_else(String::new, |m| m.to_string()),
            fmt_f64(r.amplitude_ratio),
            r.status.clone(),
        ])
        .map_err(io)?;
    }
    w.flush()?;
    Ok(rows)
}

fn sweep_cell(cfg: &ExperimentConfig, b: f64, ratio: f64) -> Result<SweepRow> {
    let n = cfg.ring.n_vehicles;
    let ring = RingConfig::new(n, n as f64 * b)?;
    let eq = EquilibriumInfo::new(&cfg.ov, &ring)?;
    let law = cfg.model.with_ratio(ratio).law(&eq)?;
    let spectrum = Linearization::for_law(&law, &eq).ring_spectrum(n);
    let max_re = max_growth_nonzero(&spectrum).map_or(f64::NAN, |(_, r)| r);

    let initial = RingState::uniform_flow(&ring, &cfg.ov)?
        .perturbed(cfg.perturbation.index, cfg.perturbation.dx(b))?;
    let record = run(&initial, &law, &cfg.ov, &ring, &cfg.plan)?;
    let modes: Vec<usize> = (1..=n / 2).collect();
    let series = fourier_amplitudes(&deviations(&record, &eq)?, &modes)?;
    let first = &series.amplitudes[0];
    let last = series
        .amplitudes
        .last()
        .expect("record has at least two samples");
    let mut best: Option<(usize, f64)> = None;
    for (j, &m) in modes.iter().enumerate() {
        if first[j] > 0.0 {
            let r = last[j] / first[j];
            if best.is_none_or(|(_, b)| r > b) {
                best = Some((m, r));
            }
        }
    }
    let (mode, amp_ratio) =
        best.ok_or_else(|| Error::UndefinedGrowth("perturbation excites no Fourier mode".into()))?;
    Ok(SweepRow {
        b,
        a_ratio: ratio,
        classification: Some(classify_law(&law, &eq)),
        max_re_lambda: max_re,
        fastest_mode: Some(mode),
        amplitude_ratio: amp_ratio,
        status: if record.meta.collision {
            "collision".into()
        } else {
            "ok".into()
        },
    })
}
