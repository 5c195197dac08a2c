//! Acceptance criteria for the ring-road experiments. Each test prints one
//! `[PASS]` / `[FAIL]` line with the measured quantities before asserting.
//!
//! Run with `cargo test -p ovd --test acceptance -- --nocapture` to see the
//! report.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use ovd::commands::cmd_simulate;
use ovd::config::{Displacement, ExperimentConfig, Preset};
use ovd::diagnostics::{deviations, fastest_growing_mode, fourier_amplitudes, DEFAULT_MODES};
use ovd::integrator::{FrozenTarget, OdeSystem, Workspace};
use ovd::model_law::single_vehicle_solution;
use ovd::stability::{bisect_threshold, long_wave_probe, max_real_part, Linearization};
use ovd::{
    dispersion_eigenvalues, full_spectrum, long_wave_coefficients, run, EquilibriumInfo,
    IntegrationPlan, ModelLaw, OvFunction, RingConfig, RingState, Scheme,
};

fn report(id: &str, title: &str, pass: bool, detail: String) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("[{tag}] {id} {title}: {detail}");
    assert!(pass, "{id} {title} failed: {detail}");
}

fn tanh_eq(b: f64) -> EquilibriumInfo {
    EquilibriumInfo::at_headway(&OvFunction::Tanh, b).unwrap()
}

fn quiet_preset(preset: Preset) -> (ExperimentConfig, tempfile::TempDir) {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::preset(preset);
    cfg.output_dir = dir.path().to_path_buf();
    (cfg, dir)
}

/// Runs a preset through the library path (no file output).
fn run_preset(cfg: &ExperimentConfig) -> ovd::TrajectoryRecord {
    let law = cfg.law().unwrap();
    run(
        &cfg.initial_state().unwrap(),
        &law,
        &cfg.ov,
        &cfg.ring,
        &cfg.plan,
    )
    .unwrap()
}

fn integrate_single(
    system: &FrozenTarget,
    scheme: Scheme,
    v0: f64,
    dt: f64,
    t_end: f64,
) -> Vec<(f64, f64)> {
    assert_eq!(system.dim(), 1);
    let steps = (t_end / dt).round() as usize;
    let mut y = [v0];
    let mut work = Workspace::default();
    let mut out = vec![(0.0, v0)];
    for k in 1..=steps {
        scheme.advance(system, &mut y, dt, &mut work).unwrap();
        out.push((k as f64 * dt, y[0]));
    }
    out
}

#[test]
fn c01_threshold_closed_form_vs_bisection() {
    let start = Instant::now();
    let probe = long_wave_probe();
    let mut worst: f64 = 0.0;
    for b in [0.25, 0.5, 1.0, 2.0, 3.0] {
        let eq = tanh_eq(b);
        let closed = b.tanh() / b.cosh().powi(2);
        let bisected = bisect_threshold(&eq, &probe).unwrap();
        worst = worst.max((bisected - closed).abs() / closed);
    }
    let elapsed = start.elapsed();
    report(
        "C01",
        "threshold bisection vs a* = tanh(b) sech^2(b)",
        worst <= 1e-6 && elapsed < Duration::from_secs(1),
        format!("max relative difference {worst:.3e} (tol 1e-6), {elapsed:?} (< 1 s)"),
    );
}

#[test]
fn c02_spectrum_half_plane_placement() {
    let start = Instant::now();
    let stable_eq = tanh_eq(2.0);
    let stable = full_spectrum(2.2 * stable_eq.a_star, &stable_eq, 100);
    let stable_max = max_real_part(&stable);
    let n_eigs = 2 * stable.len();

    let unstable_eq = tanh_eq(0.5);
    let unstable = full_spectrum(0.5 * unstable_eq.a_star, &unstable_eq, 100);
    let n_positive = unstable
        .iter()
        .flat_map(|p| [p.lambda_plus.re, p.lambda_minus.re])
        .filter(|&r| r > 0.0)
        .count();
    let elapsed = start.elapsed();
    report(
        "C02",
        "spectrum half-plane placement",
        n_eigs == 200
            && stable_max <= 1e-12
            && n_positive >= 1
            && elapsed < Duration::from_millis(100),
        format!(
            "stable: {n_eigs} eigenvalues, max Re = {stable_max:.3e} (<= 1e-12); \
             unstable: {n_positive} eigenvalues with Re > 0; {elapsed:?} (< 0.1 s)"
        ),
    );
}

#[test]
fn c03_stable_regime_decay() {
    let (cfg, _dir) = quiet_preset(Preset::StablePaper);
    let start = Instant::now();
    let eq = cfg.equilibrium().unwrap();
    let record = run_preset(&cfg);
    let series = fourier_amplitudes(&deviations(&record, &eq).unwrap(), &DEFAULT_MODES).unwrap();
    let elapsed = start.elapsed();

    let mut ratios = Vec::new();
    for &m in &DEFAULT_MODES {
        let col = series.column(m).unwrap();
        let peak = col.iter().copied().fold(0.0, f64::max);
        ratios.push((m, col.last().unwrap() / peak));
    }
    let pass = ratios.iter().all(|&(_, r)| r < 0.1) && elapsed < Duration::from_secs(5);
    let detail = ratios
        .iter()
        .map(|(m, r)| format!("A_{m}: {r:.3e}"))
        .collect::<Vec<_>>()
        .join(", ");
    report(
        "C03",
        "stable preset A_k(100)/max_t A_k < 0.1",
        pass,
        format!("{detail}; {elapsed:?} (< 5 s)"),
    );
}

#[test]
fn c04_unstable_regime_growth() {
    let (cfg, _dir) = quiet_preset(Preset::UnstablePaper);
    let start = Instant::now();
    let eq = cfg.equilibrium().unwrap();
    let record = run_preset(&cfg);
    let series = fourier_amplitudes(&deviations(&record, &eq).unwrap(), &DEFAULT_MODES).unwrap();
    let elapsed = start.elapsed();

    let s1 = record.sample_near(1.0).unwrap();
    assert!((record.times[s1] - 1.0).abs() < 1e-9);
    let last = record.n_samples() - 1;
    let best_mode_growth = DEFAULT_MODES
        .iter()
        .map(|&m| {
            let col = series.column(m).unwrap();
            (m, col[last] / col[s1])
        })
        .fold(
            (0, 0.0),
            |best, cur| if cur.1 > best.1 { cur } else { best },
        );
    let spread_growth = record.velocity_spread_at(last) / record.velocity_spread_at(s1);
    report(
        "C04",
        "unstable preset growth",
        best_mode_growth.1 > 10.0 && spread_growth > 10.0 && elapsed < Duration::from_secs(5),
        format!(
            "A_{}(100)/A(1) = {:.1} (> 10), velocity spread ratio {spread_growth:.1} (> 10), {elapsed:?} (< 5 s)",
            best_mode_growth.0, best_mode_growth.1
        ),
    );
}

#[test]
fn c05_no_full_stops() {
    let (cfg, _dir) = quiet_preset(Preset::UnstableLong);
    let start = Instant::now();
    let record = run_preset(&cfg);
    let elapsed = start.elapsed();
    let min_sampled = record
        .velocities
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    report(
        "C05",
        "no full stops over T = 300",
        record.times.last().copied().unwrap() >= 300.0 - 1e-9
            && min_sampled > 0.0
            && elapsed < Duration::from_secs(15),
        format!("min v over all samples = {min_sampled:.4}, {elapsed:?} (< 15 s)"),
    );
}

#[test]
fn c06_linear_growth_rate_matches_dispersion() {
    let start = Instant::now();
    let mut cfg = ExperimentConfig::preset(Preset::UnstablePaper);
    cfg.plan = IntegrationPlan::new(Scheme::RungeKutta4, 0.01, 30.0).unwrap();
    cfg.perturbation.dx = Displacement::FractionOfHeadway(1e-4);
    let eq = cfg.equilibrium().unwrap();
    let law = cfg.law().unwrap();
    let record = run_preset(&cfg);
    let (mode, measured) =
        fastest_growing_mode(&deviations(&record, &eq).unwrap(), (5.0, 30.0)).unwrap();

    let spectrum = Linearization::for_law(&law, &eq).ring_spectrum(cfg.ring.n_vehicles);
    let predicted = spectrum
        .iter()
        .map(|p| p.lambda_plus.re)
        .fold(f64::NEG_INFINITY, f64::max);
    let elapsed = start.elapsed();
    let rel = (measured - predicted).abs() / predicted;
    report(
        "C06",
        "measured growth rate vs max Re lambda_+",
        rel <= 0.10 && elapsed < Duration::from_secs(60),
        format!(
            "fastest mode {mode}: measured {measured:.6}, predicted {predicted:.6}, rel {rel:.2e} (<= 0.10), {elapsed:?}"
        ),
    );
}

#[test]
fn c07_integrator_order() {
    let (a, v_max) = (5.0, 20.0);
    let system = FrozenTarget {
        law: ModelLaw::hybrid(a).unwrap(),
        v_des: v_max,
    };
    let max_err = |scheme, dt| {
        integrate_single(&system, scheme, 0.0, dt, 10.0)
            .into_iter()
            .map(|(t, v)| (v - single_vehicle_solution(a, v_max, 0.0, t).unwrap()).abs())
            .fold(0.0, f64::max)
    };
    let rk4 = max_err(Scheme::RungeKutta4, 0.01);
    let e1 = max_err(Scheme::ForwardEuler, 0.1);
    let e2 = max_err(Scheme::ForwardEuler, 0.05);
    let ratio = e1 / e2;
    report(
        "C07",
        "integrator order against closed-form drag solution",
        rk4 <= 1e-6 && (1.6..=2.4).contains(&ratio),
        format!("RK4 max error {rk4:.3e} (<= 1e-6); Euler error ratio dt 0.1/0.05 = {ratio:.3} (2 +- 20%)"),
    );
}

#[test]
fn c08_long_wave_expansion() {
    let eq = tanh_eq(2.0);
    let a = 2.0 * eq.a_star;
    let k = 1e-3;
    let lw = long_wave_coefficients(a, &eq);
    let p = dispersion_eigenvalues(a, &eq, k);
    let re_rel = (p.lambda_plus.re - lw.nu * k * k).abs() / (lw.nu * k * k).abs();
    let im_rel = (p.lambda_plus.im - eq.f * k).abs() / (eq.f * k).abs();
    let nu_at_threshold = long_wave_coefficients(eq.a_star, &eq).nu;
    report(
        "C08",
        "long-wave expansion",
        re_rel <= 1e-2 && im_rel <= 1e-4 && nu_at_threshold.abs() <= 1e-14,
        format!(
            "Re rel {re_rel:.3e} (<= 1e-2), Im rel {im_rel:.3e} (<= 1e-4), nu(a*) = {nu_at_threshold:.3e} (|.| <= 1e-14)"
        ),
    );
}

#[test]
fn c09_local_correspondence() {
    let (a, v) = (5.0, 20.0);
    let alpha_eff = 2.0 * a / v;
    let system = FrozenTarget {
        law: ModelLaw::hybrid(a).unwrap(),
        v_des: v,
    };
    let e_fold = 1.0 / alpha_eff;
    let mut worst: f64 = 0.0;
    for sign in [1.0, -1.0] {
        let dv = sign * 1e-4 * v;
        let traj = integrate_single(&system, Scheme::RungeKutta4, v + dv, 1e-3, e_fold);
        let pts: Vec<(f64, f64)> = traj.iter().map(|&(t, u)| (t, (u - v).abs().ln())).collect();
        let n = pts.len() as f64;
        let tm = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let ym = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - tm) * (p.1 - ym)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - tm).powi(2)).sum();
        let rate = -sxy / sxx;
        worst = worst.max((rate - alpha_eff).abs() / alpha_eff);
    }
    report(
        "C09",
        "relaxation rate near equilibrium is 2a/V",
        worst <= 1e-2,
        format!("worst relative deviation from 2a/V = {alpha_eff}: {worst:.3e} (<= 1e-2)"),
    );
}

#[test]
fn c10_jerk_identities() {
    let (a, v_des, alpha) = (5.0, 20.0, 0.5);
    let hybrid = ModelLaw::hybrid(a).unwrap();
    let ovm = ModelLaw::classical(alpha).unwrap();
    let h = 1e-4;
    let mut worst: f64 = 0.0;
    for i in 1..=100 {
        let t = 0.1 * i as f64;
        // closed-form trajectories from rest
        let vh = |t: f64| single_vehicle_solution(a, v_des, 0.0, t).unwrap();
        let vo = |t: f64| v_des * (1.0 - (-alpha * t).exp());
        for (law, traj) in [(&hybrid, &vh as &dyn Fn(f64) -> f64), (&ovm, &vo)] {
            let fd = (law.accel(traj(t + h), v_des).unwrap()
                - law.accel(traj(t - h), v_des).unwrap())
                / (2.0 * h);
            let exact = law.jerk(traj(t), v_des).unwrap();
            worst = worst.max((fd - exact).abs() / exact.abs());
        }
    }
    let j0 = hybrid.jerk(0.0, v_des).unwrap();
    let jv = hybrid.jerk(v_des, v_des).unwrap();
    report(
        "C10",
        "jerk identities",
        worst <= 1e-3 && j0 == 0.0 && jv == 0.0,
        format!("max relative FD mismatch {worst:.3e} (<= 1e-3), j(0) = {j0}, j(V) = {jv}"),
    );
}

#[test]
fn c11_property_suites() {
    // equilibrium preservation
    let mut eq_drift: f64 = 0.0;
    for (l, ratio) in [(200.0, 2.2), (50.0, 0.5)] {
        let ring = RingConfig::new(100, l).unwrap();
        let eq = EquilibriumInfo::new(&OvFunction::Tanh, &ring).unwrap();
        let law = ModelLaw::hybrid(ratio * eq.a_star).unwrap();
        let s0 = RingState::uniform_flow(&ring, &OvFunction::Tanh).unwrap();
        for scheme in [Scheme::ForwardEuler, Scheme::RungeKutta4] {
            let plan = IntegrationPlan::new(scheme, 0.1, 100.0).unwrap();
            let rec = run(&s0, &law, &OvFunction::Tanh, &ring, &plan).unwrap();
            for v in &rec.velocities {
                eq_drift = eq_drift.max((v - eq.c).abs());
            }
        }
    }

    // headway-sum conservation on the perturbed presets
    let mut sum_err: f64 = 0.0;
    for preset in [Preset::StablePaper, Preset::UnstablePaper] {
        let cfg = ExperimentConfig::preset(preset);
        let rec = run_preset(&cfg);
        let l = cfg.ring.ring_length;
        for s in 0..rec.n_samples() {
            let h = rec.state_at(s).headways(&cfg.ring).unwrap();
            sum_err = sum_err.max((h.iter().sum::<f64>() - l).abs() / l);
        }
    }

    // conjugate symmetry and Vieta residuals
    let mut conj_err: f64 = 0.0;
    let mut vieta_err: f64 = 0.0;
    for (b, ratio) in [(2.0, 2.2), (0.5, 0.5), (1.0, 1.0)] {
        let eq = tanh_eq(b);
        let lin = Linearization::hybrid(ratio * eq.a_star, &eq);
        let n = 100;
        let spec = lin.ring_spectrum(n);
        for m in 1..n {
            let p = spec[m];
            let q = spec[n - m];
            // compare as root sets: the self-conjugate mode m = N/2 swaps the pair
            let direct = (p.lambda_plus - q.lambda_plus.conj())
                .norm()
                .max((p.lambda_minus - q.lambda_minus.conj()).norm());
            let swapped = (p.lambda_plus - q.lambda_minus.conj())
                .norm()
                .max((p.lambda_minus - q.lambda_plus.conj()).norm());
            conj_err = conj_err.max(direct.min(swapped));
            let constant = lin.coupling
                * num_complex::Complex64::new(1.0 - p.k.cos(), -p.k.sin())
                    .norm()
                    .max(1e-300);
            let sum = p.lambda_plus + p.lambda_minus;
            let prod = p.lambda_plus * p.lambda_minus;
            let expected = num_complex::Complex64::new(1.0, 0.0)
                - num_complex::Complex64::from_polar(1.0, 2.0 * PI * m as f64 / n as f64);
            vieta_err = vieta_err
                .max((sum + lin.damping).norm() / lin.damping)
                .max((prod - expected * lin.coupling).norm() / constant);
        }
    }

    // byte-identical reruns
    let run_once = || {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = ExperimentConfig::preset(Preset::UnstablePaper);
        cfg.plan.t_end = 20.0;
        cfg.output_dir = dir.path().to_path_buf();
        cmd_simulate(&cfg).unwrap();
        let files: Vec<Vec<u8>> = ["trajectories.csv", "velocities.csv", "fourier.csv"]
            .iter()
            .map(|f| std::fs::read(dir.path().join(f)).unwrap())
            .collect();
        files
    };
    let identical = run_once() == run_once();

    report(
        "C11",
        "property suites",
        eq_drift <= 1e-12 && sum_err <= 1e-9 && conj_err <= 1e-12 && vieta_err <= 1e-10 && identical,
        format!(
            "equilibrium drift {eq_drift:.2e} (<= 1e-12), headway sum {sum_err:.2e} L (<= 1e-9), \
             conjugate mismatch {conj_err:.2e}, Vieta {vieta_err:.2e} (<= 1e-10), byte-identical {identical}"
        ),
    );
}
