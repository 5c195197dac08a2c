//! Linear stability of uniform flow.
//!
//! Around uniform flow (headway `b`, speed `c = V(b)`, slope `f = V'(b)`)
//! both laws linearize to
//!
//! ```text
//! d xi_n / dt  = eta_n
//! d eta_n / dt = -beta eta_n + gamma (xi_{n+1} - xi_n)
//! ```
//!
//! with `beta = 2a/c, gamma = 2af/c` for the hybrid law and
//! `beta = alpha, gamma = alpha f` for the classical one. A Fourier mode
//! `e^{ikn}` then grows like `e^{lambda t}` where
//!
//! ```text
//! lambda^2 + beta lambda + gamma (1 - e^{ik}) = 0.
//! ```
//!
//! Roots come from a cancellation-free quadratic formula. The long-wave
//! expansion `lambda = i f k + nu k^2 + O(k^3)` gives the threshold
//! `a* = c f`: uniform flow is stable for `a > a*`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model_law::ModelLaw;
use crate::ov_function::OvFunction;
use crate::ring::RingConfig;

/// Relative half-width of the neutral band around the threshold.
pub const NEUTRAL_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumInfo {
    pub b: f64,
    pub c: f64,
    pub f: f64,
    pub a_star: f64,
}

impl EquilibriumInfo {
    pub fn new(ov: &OvFunction, config: &RingConfig) -> Result<Self> {
        config.validate()?;
        Self::at_headway(ov, config.mean_headway())
    }

    pub fn at_headway(ov: &OvFunction, b: f64) -> Result<Self> {
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::Domain(format!(
                "equilibrium headway must be positive, got {b}"
            )));
        }
        let c = ov.eval(b)?;
        let f = ov.eval_deriv(b)?;
        Ok(EquilibriumInfo {
            b,
            c,
            f,
            a_star: c * f,
        })
    }

    /// Critical sensitivity of the classical OVM, `2 V'(b)`.
    pub fn alpha_star(&self) -> f64 {
        2.0 * self.f
    }
}

/// Coefficients of `lambda^2 + damping lambda + coupling (1 - e^{ik}) = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Linearization {
    pub damping: f64,
    pub coupling: f64,
}

impl Linearization {
    pub fn hybrid(a: f64, eq: &EquilibriumInfo) -> Self {
        let damping = 2.0 * a / eq.c;
        Linearization {
            damping,
            coupling: damping * eq.f,
        }
    }

    pub fn classical(alpha: f64, eq: &EquilibriumInfo) -> Self {
        Linearization {
            damping: alpha,
            coupling: alpha * eq.f,
        }
    }

    pub fn for_law(law: &ModelLaw, eq: &EquilibriumInfo) -> Self {
        match *law {
            ModelLaw::HybridOvd { a, .. } => Self::hybrid(a, eq),
            ModelLaw::ClassicalOvm { alpha } => Self::classical(alpha, eq),
        }
    }

    /// Roots at wavenumber `k`.
    pub fn eigenvalues(&self, k: f64) -> SpectrumPoint {
        self.eigenvalues_with(k, one_minus_expi(k))
    }

    fn eigenvalues_with(&self, k: f64, one_minus_e: Complex64) -> SpectrumPoint {
        let beta = self.damping;
        let constant = one_minus_e * self.coupling;
        let s = csqrt(Complex64::new(beta * beta, 0.0) - constant * 4.0);
        // beta > 0 and Re s >= 0, so q has no cancellation
        let q = -(s + beta) * 0.5;
        let lambda_plus = if q == Complex64::new(0.0, 0.0) {
            q
        } else {
            constant / q
        };
        SpectrumPoint {
            k,
            lambda_plus,
            lambda_minus: q,
        }
    }

    /// `lambda^2 + damping lambda + coupling (1 - e^{ik})`.
    pub fn residual(&self, k: f64, lambda: Complex64) -> Complex64 {
        lambda * lambda + lambda * self.damping + one_minus_expi(k) * self.coupling
    }

    /// One spectrum point per ring mode `m = 0..N-1`, `k = 2 pi m / N`.
    pub fn ring_spectrum(&self, n_vehicles: usize) -> Vec<SpectrumPoint> {
        (0..n_vehicles)
            .map(|m| {
                let k = 2.0 * PI * m as f64 / n_vehicles as f64;
                self.eigenvalues_with(k, ring_one_minus_expi(m, n_vehicles))
            })
            .collect()
    }
}

/// `1 - e^{ik}` without cancellation for small `k`.
fn one_minus_expi(k: f64) -> Complex64 {
    let h = (0.5 * k).sin();
    Complex64::new(2.0 * h * h, -k.sin())
}

// Reduces m into (-N/2, N/2] so that modes m and N - m are exact conjugates.
fn ring_one_minus_expi(m: usize, n: usize) -> Complex64 {
    let m = m % n;
    let signed = if 2 * m > n {
        m as f64 - n as f64
    } else {
        m as f64
    };
    one_minus_expi(2.0 * PI * signed / n as f64)
}

/// Principal square root, accurate in both components.
fn csqrt(z: Complex64) -> Complex64 {
    let (x, y) = (z.re, z.im);
    if x == 0.0 && y == 0.0 {
        return Complex64::new(0.0, y);
    }
    let t = ((x.abs() + x.hypot(y)) * 0.5).sqrt();
    if x >= 0.0 {
        Complex64::new(t, y / (2.0 * t))
    } else {
        Complex64::new(y.abs() / (2.0 * t), t.copysign(y))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumPoint {
    pub k: f64,
    /// Root with the larger real part (`+` branch of the principal root).
    pub lambda_plus: Complex64,
    pub lambda_minus: Complex64,
}

impl SpectrumPoint {
    pub fn max_re(&self) -> f64 {
        self.lambda_plus.re.max(self.lambda_minus.re)
    }
}

pub fn dispersion_eigenvalues(a: f64, eq: &EquilibriumInfo, k: f64) -> SpectrumPoint {
    Linearization::hybrid(a, eq).eigenvalues(k)
}

pub fn full_spectrum(a: f64, eq: &EquilibriumInfo, n_vehicles: usize) -> Vec<SpectrumPoint> {
    Linearization::hybrid(a, eq).ring_spectrum(n_vehicles)
}

/// Largest real part over both branches of every point.
pub fn max_real_part(spectrum: &[SpectrumPoint]) -> f64 {
    spectrum
        .iter()
        .map(SpectrumPoint::max_re)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Largest `Re lambda_+` over the points with `k != 0`.
pub fn max_growth_nonzero(spectrum: &[SpectrumPoint]) -> Option<(usize, f64)> {
    spectrum
        .iter()
        .enumerate()
        .filter(|(_, p)| p.k != 0.0)
        .map(|(i, p)| (i, p.lambda_plus.re))
        .fold(None, |best, cur| match best {
            Some((_, r)) if r >= cur.1 => best,
            _ => Some(cur),
        })
}

/// Long-wave coefficients of `lambda(k) = i mu k + nu k^2 + O(k^3)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LongWave {
    pub mu: f64,
    pub nu: f64,
}

pub fn long_wave_coefficients(a: f64, eq: &EquilibriumInfo) -> LongWave {
    let f = eq.f;
    LongWave {
        mu: f,
        nu: eq.c / (2.0 * a) * f * f - 0.5 * f,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stability {
    Stable,
    Neutral,
    Unstable,
}

impl Stability {
    fn from_ratio(ratio: f64) -> Self {
        if ratio > 1.0 + NEUTRAL_TOLERANCE {
            Stability::Stable
        } else if ratio < 1.0 - NEUTRAL_TOLERANCE {
            Stability::Unstable
        } else {
            Stability::Neutral
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Stability::Stable => "Stable",
            Stability::Neutral => "Neutral",
            Stability::Unstable => "Unstable",
        }
    }
}

impl std::fmt::Display for Stability {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Hybrid-law classification against `a* = c V'(b)`.
pub fn classify(a: f64, eq: &EquilibriumInfo) -> Stability {
    Stability::from_ratio(a / eq.a_star)
}

/// Ratio of the law's parameter to its critical value (`a / a*` or
/// `alpha / 2f`).
pub fn threshold_ratio(law: &ModelLaw, eq: &EquilibriumInfo) -> f64 {
    match *law {
        ModelLaw::HybridOvd { a, .. } => a / eq.a_star,
        ModelLaw::ClassicalOvm { alpha } => alpha / eq.alpha_star(),
    }
}

pub fn classify_law(law: &ModelLaw, eq: &EquilibriumInfo) -> Stability {
    Stability::from_ratio(threshold_ratio(law, eq))
}

/// Geometric ladder `pi 2^-j`, `j = 0..=24`. Its smallest wavenumber sits
/// far enough into the long-wave limit that the finite-k shift of the
/// threshold is below 1e-13 relative.
pub fn long_wave_probe() -> Vec<f64> {
    (0..=24).map(|j| PI * 0.5f64.powi(j)).collect()
}

/// Wavenumbers `2 pi m / N` of the non-trivial ring modes.
pub fn ring_wavenumbers(n_vehicles: usize) -> Vec<f64> {
    (1..n_vehicles)
        .map(|m| 2.0 * PI * m as f64 / n_vehicles as f64)
        .collect()
}

/// Acceleration scale at which `max_k Re lambda_+(k; a)` over the non-zero
/// `wavenumbers` changes sign, found by bisection on the spectrum alone.
pub fn bisect_threshold(eq: &EquilibriumInfo, wavenumbers: &[f64]) -> Result<f64> {
    let probe: Vec<(f64, Complex64)> = wavenumbers
        .iter()
        .filter(|&&k| k != 0.0)
        .map(|&k| (k, one_minus_expi(k)))
        .collect();
    if probe.is_empty() {
        return Err(Error::Config(
            "threshold bisection needs a non-zero wavenumber".into(),
        ));
    }
    let unstable = |a: f64| {
        let lin = Linearization::hybrid(a, eq);
        probe
            .iter()
            .any(|&(k, e)| lin.eigenvalues_with(k, e).lambda_plus.re > 0.0)
    };

    let mut hi = 1.0;
    let mut guard = 0;
    while unstable(hi) {
        hi *= 2.0;
        guard += 1;
        if guard > 2000 {
            return Err(Error::Domain("no stable acceleration scale found".into()));
        }
    }
    let mut lo = hi;
    guard = 0;
    while !unstable(lo) {
        lo *= 0.5;
        guard += 1;
        if guard > 2000 {
            return Err(Error::Domain("no unstable acceleration scale found".into()));
        }
    }
    // invariant: unstable(lo), !unstable(hi)
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if unstable(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Right-hand side of the linearized hybrid system on a periodic ring.
pub fn linearized_rhs(
    eq: &EquilibriumInfo,
    a: f64,
    xi: &[f64],
    eta: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    if xi.len() != eta.len() {
        return Err(Error::SizeMismatch {
            expected: xi.len(),
            actual: eta.len(),
        });
    }
    let n = xi.len();
    let lin = Linearization::hybrid(a, eq);
    let d_xi = eta.to_vec();
    let d_eta = (0..n)
        .map(|i| {
            let next = xi[(i + 1) % n];
            -lin.damping * eta[i] + lin.coupling * (next - xi[i])
        })
        .collect();
    Ok((d_xi, d_eta))
}
