//! Post-processing of trajectory records: position deviations from uniform
//! flow, their discrete Fourier amplitudes, and fitted growth rates.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::integrator::TrajectoryRecord;
use crate::stability::EquilibriumInfo;

/// Modes plotted for the stable/unstable ring experiments.
pub const DEFAULT_MODES: [usize; 5] = [10, 20, 30, 40, 50];

/// Default fitting window for growth rates.
pub const DEFAULT_GROWTH_WINDOW: (f64, f64) = (5.0, 30.0);

/// `y_n(t) = x_n(t) - (n b + c t)`, one row per recorded sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Deviations {
    pub n_vehicles: usize,
    pub times: Vec<f64>,
    values: Vec<f64>,
}

impl Deviations {
    pub fn from_rows(times: Vec<f64>, rows: Vec<Vec<f64>>) -> Result<Self> {
        if times.len() != rows.len() {
            return Err(Error::SizeMismatch {
                expected: times.len(),
                actual: rows.len(),
            });
        }
        let n = rows.first().map_or(0, Vec::len);
        if n == 0 {
            return Err(Error::Config("deviation rows must be non-empty".into()));
        }
        let mut values = Vec::with_capacity(n * rows.len());
        for row in &rows {
            if row.len() != n {
                return Err(Error::SizeMismatch {
                    expected: n,
                    actual: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        Ok(Deviations {
            n_vehicles: n,
            times,
            values,
        })
    }

    pub fn row(&self, sample: usize) -> &[f64] {
        let n = self.n_vehicles;
        &self.values[sample * n..(sample + 1) * n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.n_vehicles)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, y| m.max(y.abs()))
    }
}

pub fn deviations(record: &TrajectoryRecord, eq: &EquilibriumInfo) -> Result<Deviations> {
    let ring = record.meta.ring;
    if ring.n_vehicles != record.n_vehicles {
        return Err(Error::SizeMismatch {
            expected: ring.n_vehicles,
            actual: record.n_vehicles,
        });
    }
    let b = ring.mean_headway();
    if (b - eq.b).abs() > 1e-12 * b.abs().max(1.0) {
        return Err(Error::Config(format!(
            "record headway {b} does not match equilibrium headway {}",
            eq.b
        )));
    }
    let n = record.n_vehicles;
    let mut values = Vec::with_capacity(record.positions.len());
    for (s, &t) in record.times.iter().enumerate() {
        let drift = eq.c * t;
        values.extend(
            record
                .positions_at(s)
                .iter()
                .enumerate()
                .map(|(i, &x)| x - (i as f64 * eq.b + drift)),
        );
    }
    Ok(Deviations {
        n_vehicles: n,
        times: record.times.clone(),
        values,
    })
}

/// Amplitudes `A_k(t)`, one row per sample and one column per mode.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierSeries {
    pub modes: Vec<usize>,
    pub times: Vec<f64>,
    pub amplitudes: Vec<Vec<f64>>,
}

impl FourierSeries {
    pub fn column(&self, mode: usize) -> Option<Vec<f64>> {
        let j = self.modes.iter().position(|&m| m == mode)?;
        Some(self.amplitudes.iter().map(|row| row[j]).collect())
    }
}

/// Cached `e^{-2 pi i j / N}` for `j = 0..N`.
struct Twiddles {
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl Twiddles {
    fn new(n: usize) -> Self {
        let angle = |j: usize| 2.0 * PI * j as f64 / n as f64;
        Twiddles {
            cos: (0..n).map(|j| angle(j).cos()).collect(),
            sin: (0..n).map(|j| angle(j).sin()).collect(),
        }
    }

    fn amplitude(&self, y: &[f64], k: usize) -> f64 {
        let n = y.len();
        let k = k % n;
        let (mut re, mut im) = (0.0, 0.0);
        for (i, &yi) in y.iter().enumerate() {
            // k * i can be reduced exactly, so aliased modes share twiddles
            let j = (k * i) % n;
            re += yi * self.cos[j];
            im -= yi * self.sin[j];
        }
        re.hypot(im)
    }
}

/// `|sum_n y_n e^{-2 pi i k n / N}|` for any `k`; `k` and `k + N` give
/// identical results.
pub fn mode_amplitude(y: &[f64], k: usize) -> f64 {
    if y.is_empty() {
        return 0.0;
    }
    Twiddles::new(y.len()).amplitude(y, k)
}

pub fn fourier_amplitudes(dev: &Deviations, modes: &[usize]) -> Result<FourierSeries> {
    let n = dev.n_vehicles;
    if let Some(&bad) = modes.iter().find(|&&m| m >= n) {
        return Err(Error::ModeOutOfRange { mode: bad, n });
    }
    let tw = Twiddles::new(n);
    let amplitudes = dev
        .rows()
        .map(|y| modes.iter().map(|&k| tw.amplitude(y, k)).collect())
        .collect();
    Ok(FourierSeries {
        modes: modes.to_vec(),
        times: dev.times.clone(),
        amplitudes,
    })
}

/// Least-squares slope of `ln A_mode(t)` for samples with `t0 <= t <= t1`.
pub fn measure_growth_rate(series: &FourierSeries, mode: usize, window: (f64, f64)) -> Result<f64> {
    let (t0, t1) = window;
    let amps = series
        .column(mode)
        .ok_or_else(|| Error::Config(format!("mode {mode} is not part of the Fourier series")))?;
    let (first, last) = match (series.times.first(), series.times.last()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => return Err(Error::UndefinedGrowth("empty series".into())),
    };
    let slack = 1e-9 * (last - first).abs().max(1.0);
    if !(t0 < t1) || t0 < first - slack || t1 > last + slack {
        return Err(Error::Config(format!(
            "window [{t0}, {t1}] must be increasing and inside [{first}, {last}]"
        )));
    }

    let mut pts = Vec::new();
    for (&t, &a) in series.times.iter().zip(&amps) {
        if t < t0 - slack || t > t1 + slack {
            continue;
        }
        if !(a > 0.0) {
            return Err(Error::UndefinedGrowth(format!(
                "amplitude of mode {mode} is {a} at t = {t}"
            )));
        }
        pts.push((t, a.ln()));
    }
    if pts.len() < 2 {
        return Err(Error::UndefinedGrowth(
            "fewer than two samples in window".into(),
        ));
    }
    Ok(least_squares_slope(&pts))
}

fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let tm = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let ym = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for &(t, y) in pts {
        sxy += (t - tm) * (y - ym);
        sxx += (t - tm) * (t - tm);
    }
    sxy / sxx
}

/// Fitted growth rate of every mode `1..=N/2` over `window`; returns the
/// fastest `(mode, rate)`.
pub fn fastest_growing_mode(dev: &Deviations, window: (f64, f64)) -> Result<(usize, f64)> {
    let modes: Vec<usize> = (1..=dev.n_vehicles / 2).collect();
    let series = fourier_amplitudes(dev, &modes)?;
    let mut best: Option<(usize, f64)> = None;
    for &m in &modes {
        let rate = measure_growth_rate(&series, m, window)?;
        if best.is_none_or(|(_, r)| rate > r) {
            best = Some((m, rate));
        }
    }
    best.ok_or_else(|| Error::UndefinedGrowth("no modes to fit".into()))
}
