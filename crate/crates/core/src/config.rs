//! Experiment configuration.
//!
//! Values are resolved in three layers: a preset (or the built-in defaults,
//! which equal the stable ring preset), then the TOML file, then command-line
//! overrides.
//!
//! ```toml
//! preset = "unstable-paper"
//! output_dir = "runs/unstable"
//! modes = [10, 20, 30, 40, 50]
//!
//! [model]
//! kind = "hybrid"        # or "ovm"
//! a_ratio = 0.5          # a = a_ratio * a*;  or give `a` directly
//!
//! [ov]
//! kind = "tanh"          # or "sigmoid" with v_max, h_c, ell
//!
//! [ring]
//! n_vehicles = 100
//! ring_length = 50.0
//!
//! [plan]
//! scheme = "euler"       # or "rk4"
//! dt = 0.1
//! t_end = 100.0
//!
//! [perturbation]
//! index = 0
//! dx_ratio = 0.01        # dx = dx_ratio * b;  or give `dx` directly
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;

use crate::diagnostics::DEFAULT_MODES;
use crate::error::{Error, Result};
use crate::integrator::{IntegrationPlan, Scheme};
use crate::model_law::{ModelLaw, DEFAULT_V_FLOOR};
use crate::ov_function::OvFunction;
use crate::ring::{RingConfig, RingState};
use crate::stability::EquilibriumInfo;

/// Default initial displacement of the perturbed vehicle, as a fraction of `b`.
pub const DEFAULT_DX_RATIO: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    StablePaper,
    UnstablePaper,
    UnstableLong,
}

impl Preset {
    pub fn name(&self) -> &'static str {
        match self {
            Preset::StablePaper => "stable-paper",
            Preset::UnstablePaper => "unstable-paper",
            Preset::UnstableLong => "unstable-long",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| *c != '-' && *c != '_')
            .collect::<String>()
            .to_lowercase();
        match key.as_str() {
            "stablepaper" | "stable" => Ok(Preset::StablePaper),
            "unstablepaper" | "unstable" => Ok(Preset::UnstablePaper),
            "unstablelong" => Ok(Preset::UnstableLong),
            _ => Err(Error::Config(format!(
                "unknown preset '{s}' (expected stable-paper, unstable-paper or unstable-long)"
            ))),
        }
    }
}

/// A model parameter given either directly or relative to its critical value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Strength {
    Absolute(f64),
    RatioToCritical(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelSpec {
    Hybrid { a: Strength, v_floor: f64 },
    Classical { alpha: Strength },
}

impl ModelSpec {
    pub fn law(&self, eq: &EquilibriumInfo) -> Result<ModelLaw> {
        match *self {
            ModelSpec::Hybrid { a, v_floor } => {
                let a = match a {
                    Strength::Absolute(a) => a,
                    Strength::RatioToCritical(r) => r * eq.a_star,
                };
                ModelLaw::hybrid_with_floor(a, v_floor)
            }
            ModelSpec::Classical { alpha } => {
                let alpha = match alpha {
                    Strength::Absolute(a) => a,
                    Strength::RatioToCritical(r) => r * eq.alpha_star(),
                };
                ModelLaw::classical(alpha)
            }
        }
    }

    pub fn with_ratio(&self, ratio: f64) -> ModelSpec {
        match *self {
            ModelSpec::Hybrid { v_floor, .. } => ModelSpec::Hybrid {
                a: Strength::RatioToCritical(ratio),
                v_floor,
            },
            ModelSpec::Classical { .. } => ModelSpec::Classical {
                alpha: Strength::RatioToCritical(ratio),
            },
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            ModelSpec::Hybrid { .. } => "hybrid",
            ModelSpec::Classical { .. } => "ovm",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Displacement {
    Absolute(f64),
    FractionOfHeadway(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Perturbation {
    pub index: usize,
    pub dx: Displacement,
}

impl Perturbation {
    pub fn dx(&self, b: f64) -> f64 {
        match self.dx {
            Displacement::Absolute(dx) => dx,
            Displacement::FractionOfHeadway(r) => r * b,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JerkSpec {
    pub v_des: f64,
    pub a: f64,
    pub alpha: f64,
    pub v_grid: Vec<f64>,
}

impl Default for JerkSpec {
    fn default() -> Self {
        // V = 20 m/s, a = 5 m/s^2, matched alpha = 2a/V
        JerkSpec {
            v_des: 20.0,
            a: 5.0,
            alpha: 0.5,
            v_grid: uniform_grid(0.0, 30.0, 0.25),
        }
    }
}

fn uniform_grid(start: f64, end: f64, step: f64) -> Vec<f64> {
    let n = ((end - start) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| start + i as f64 * step).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub a_ratios: Vec<f64>,
    pub b_values: Vec<f64>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            a_ratios: vec![0.5, 0.8, 1.0, 1.2, 2.2],
            b_values: vec![0.5, 1.0, 2.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub preset: Option<Preset>,
    pub model: ModelSpec,
    pub ov: OvFunction,
    pub ring: RingConfig,
    pub plan: IntegrationPlan,
    pub perturbation: Perturbation,
    pub modes: Vec<usize>,
    pub output_dir: PathBuf,
    pub b_grid: Vec<f64>,
    pub jerk: JerkSpec,
    pub sweep: SweepSpec,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let mut cfg = Self::preset(Preset::StablePaper);
        cfg.preset = None;
        cfg
    }
}

impl ExperimentConfig {
    pub fn preset(preset: Preset) -> Self {
        let (ring_length, ratio, t_end) = match preset {
            Preset::StablePaper => (200.0, 2.2, 100.0),
            Preset::UnstablePaper => (50.0, 0.5, 100.0),
            Preset::UnstableLong => (50.0, 0.5, 300.0),
        };
        ExperimentConfig {
            preset: Some(preset),
            model: ModelSpec::Hybrid {
                a: Strength::RatioToCritical(ratio),
                v_floor: DEFAULT_V_FLOOR,
            },
            ov: OvFunction::Tanh,
            ring: RingConfig {
                n_vehicles: 100,
                ring_length,
            },
            plan: IntegrationPlan {
                scheme: Scheme::ForwardEuler,
                dt: 0.1,
                t_end,
                record_stride: 1,
                clamp_nonnegative: false,
            },
            perturbation: Perturbation {
                index: 0,
                dx: Displacement::FractionOfHeadway(DEFAULT_DX_RATIO),
            },
            modes: DEFAULT_MODES.to_vec(),
            output_dir: PathBuf::from("out"),
            b_grid: vec![0.25, 0.5, 1.0, 2.0, 3.0],
            jerk: JerkSpec::default(),
            sweep: SweepSpec::default(),
        }
    }

    /// Reads an optional TOML file and applies `overrides` on top.
    pub fn load(path: Option<&Path>, overrides: &Overrides) -> Result<Self> {
        let text = match path {
            Some(p) => std::fs::read_to_string(p).map_err(|e| {
                Error::Config(format!("cannot read config file {}: {e}", p.display()))
            })?,
            None => String::new(),
        };
        Self::from_toml_str(&text, overrides)
    }

    pub fn from_toml_str(text: &str, overrides: &Overrides) -> Result<Self> {
        let raw: RawConfig =
            toml::from_str(text).map_err(|e| Error::Config(format!("invalid config: {e}")))?;
        let preset = match overrides.preset {
            Some(p) => Some(p),
            None => raw.preset.as_deref().map(Preset::from_str).transpose()?,
        };
        let mut cfg = match preset {
            Some(p) => Self::preset(p),
            None => Self::default(),
        };
        raw.apply(&mut cfg)?;
        overrides.apply(&mut cfg);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.ov.validate()?;
        self.ring.validate()?;
        self.plan.validate()?;
        if self.perturbation.index >= self.ring.n_vehicles {
            return Err(Error::IndexOutOfRange {
                index: self.perturbation.index,
                len: self.ring.n_vehicles,
            });
        }
        if let Some(&m) = self.modes.iter().find(|&&m| m >= self.ring.n_vehicles) {
            return Err(Error::ModeOutOfRange {
                mode: m,
                n: self.ring.n_vehicles,
            });
        }
        if let Some(&b) = self.b_grid.iter().find(|&&b| !(b > 0.0 && b.is_finite())) {
            return Err(Error::Config(format!(
                "threshold headways must be positive, got {b}"
            )));
        }
        if self.sweep.a_ratios.is_empty() || self.sweep.b_values.is_empty() {
            return Err(Error::Config("sweep grids must be non-empty".into()));
        }
        if !(self.jerk.v_des > 0.0) {
            return Err(Error::Config(
                "jerk profile needs a positive desired speed".into(),
            ));
        }
        let eq = self.equilibrium()?;
        self.model.law(&eq)?;
        Ok(())
    }

    pub fn equilibrium(&self) -> Result<EquilibriumInfo> {
        EquilibriumInfo::new(&self.ov, &self.ring)
    }

    pub fn law(&self) -> Result<ModelLaw> {
        self.model.law(&self.equilibrium()?)
    }

    /// Uniform flow with the configured single-vehicle displacement.
    pub fn initial_state(&self) -> Result<RingState> {
        let uniform = RingState::uniform_flow(&self.ring, &self.ov)?;
        let dx = self.perturbation.dx(self.ring.mean_headway());
        uniform.perturbed(self.perturbation.index, dx)
    }
}

/// Command-line overrides; `None` leaves the configured value alone.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub preset: Option<Preset>,
    pub output_dir: Option<PathBuf>,
    pub scheme: Option<Scheme>,
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub dx: Option<f64>,
    pub modes: Option<Vec<usize>>,
}

impl Overrides {
    fn apply(&self, cfg: &mut ExperimentConfig) {
        if let Some(dir) = &self.output_dir {
            cfg.output_dir = dir.clone();
        }
        if let Some(s) = self.scheme {
            cfg.plan.scheme = s;
        }
        if let Some(dt) = self.dt {
            cfg.plan.dt = dt;
        }
        if let Some(t) = self.t_end {
            cfg.plan.t_end = t;
        }
        if let Some(dx) = self.dx {
            cfg.perturbation.dx = Displacement::Absolute(dx);
        }
        if let Some(m) = &self.modes {
            cfg.modes = m.clone();
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    preset: Option<String>,
    output_dir: Option<PathBuf>,
    modes: Option<Vec<usize>>,
    model: Option<RawModel>,
    ov: Option<OvFunction>,
    ring: Option<RawRing>,
    plan: Option<RawPlan>,
    perturbation: Option<RawPerturbation>,
    threshold: Option<RawThreshold>,
    jerk: Option<RawJerk>,
    sweep: Option<RawSweep>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    kind: Option<String>,
    a: Option<f64>,
    a_ratio: Option<f64>,
    alpha: Option<f64>,
    alpha_ratio: Option<f64>,
    v_floor: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRing {
    n_vehicles: Option<usize>,
    ring_length: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPlan {
    scheme: Option<Scheme>,
    dt: Option<f64>,
    t_end: Option<f64>,
    record_stride: Option<usize>,
    clamp_nonnegative: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPerturbation {
    index: Option<usize>,
    dx: Option<f64>,
    dx_ratio: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawThreshold {
    b_grid: Option<Vec<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawJerk {
    v_des: Option<f64>,
    a: Option<f64>,
    alpha: Option<f64>,
    v_grid: Option<Vec<f64>>,
    v_min: Option<f64>,
    v_max: Option<f64>,
    v_step: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    a_ratios: Option<Vec<f64>>,
    b_values: Option<Vec<f64>>,
}

fn exclusive<T>(
    name_a: &str,
    a: Option<T>,
    name_b: &str,
    b: Option<T>,
) -> Result<Option<(bool, T)>> {
    match (a, b) {
        (Some(_), Some(_)) => Err(Error::Config(format!(
            "set at most one of '{name_a}' and '{name_b}'"
        ))),
        (Some(x), None) => Ok(Some((true, x))),
        (None, Some(y)) => Ok(Some((false, y))),
        (None, None) => Ok(None),
    }
}

impl RawModel {
    fn apply(&self, spec: &mut ModelSpec) -> Result<()> {
        let kind = match self.kind.as_deref() {
            None => spec.kind_name(),
            Some("hybrid") | Some("ovd") | Some("hybrid_ovd") => "hybrid",
            Some("ovm") | Some("classical") | Some("classical_ovm") => "ovm",
            Some(other) => {
                return Err(Error::Config(format!(
                    "unknown model kind '{other}' (expected hybrid or ovm)"
                )))
            }
        };
        let strength = |given: Option<(bool, f64)>| {
            given.map(|(abs, x)| {
                if abs {
                    Strength::Absolute(x)
                } else {
                    Strength::RatioToCritical(x)
                }
            })
        };
        let a = strength(exclusive("a", self.a, "a_ratio", self.a_ratio)?);
        let alpha = strength(exclusive(
            "alpha",
            self.alpha,
            "alpha_ratio",
            self.alpha_ratio,
        )?);

        *spec = match (kind, *spec) {
            ("hybrid", current) => {
                if alpha.is_some() {
                    return Err(Error::Config(
                        "'alpha' applies only to the ovm model".into(),
                    ));
                }
                let (base_a, base_floor) = match current {
                    ModelSpec::Hybrid { a, v_floor } => (Some(a), v_floor),
                    ModelSpec::Classical { .. } => (None, DEFAULT_V_FLOOR),
                };
                let a = a
                    .or(base_a)
                    .ok_or_else(|| Error::Config("hybrid model needs 'a' or 'a_ratio'".into()))?;
                ModelSpec::Hybrid {
                    a,
                    v_floor: self.v_floor.unwrap_or(base_floor),
                }
            }
            (_, current) => {
                if a.is_some() || self.v_floor.is_some() {
                    return Err(Error::Config(
                        "'a', 'a_ratio' and 'v_floor' apply only to the hybrid model".into(),
                    ));
                }
                let base = match current {
                    ModelSpec::Classical { alpha } => Some(alpha),
                    ModelSpec::Hybrid { .. } => None,
                };
                let alpha = alpha.or(base).ok_or_else(|| {
                    Error::Config("ovm model needs 'alpha' or 'alpha_ratio'".into())
                })?;
                ModelSpec::Classical { alpha }
            }
        };
        Ok(())
    }
}

impl RawConfig {
    fn apply(self, cfg: &mut ExperimentConfig) -> Result<()> {
        if let Some(dir) = self.output_dir {
            cfg.output_dir = dir;
        }
        if let Some(m) = self.modes {
            cfg.modes = m;
        }
        if let Some(model) = self.model {
            model.apply(&mut cfg.model)?;
        }
        if let Some(ov) = self.ov {
            cfg.ov = ov;
        }
        if let Some(ring) = self.ring {
            if let Some(n) = ring.n_vehicles {
                cfg.ring.n_vehicles = n;
            }
            if let Some(l) = ring.ring_length {
                cfg.ring.ring_length = l;
            }
        }
        if let Some(plan) = self.plan {
            if let Some(s) = plan.scheme {
                cfg.plan.scheme = s;
            }
            if let Some(dt) = plan.dt {
                cfg.plan.dt = dt;
            }
            if let Some(t) = plan.t_end {
                cfg.plan.t_end = t;
            }
            if let Some(s) = plan.record_stride {
                cfg.plan.record_stride = s;
            }
            if let Some(c) = plan.clamp_nonnegative {
                cfg.plan.clamp_nonnegative = c;
            }
        }
        if let Some(p) = self.perturbation {
            if let Some(i) = p.index {
                cfg.perturbation.index = i;
            }
            match exclusive("dx", p.dx, "dx_ratio", p.dx_ratio)? {
                Some((true, dx)) => cfg.perturbation.dx = Displacement::Absolute(dx),
                Some((false, r)) => cfg.perturbation.dx = Displacement::FractionOfHeadway(r),
                None => {}
            }
        }
        if let Some(grid) = self.threshold.and_then(|t| t.b_grid) {
            cfg.b_grid = grid;
        }
        if let Some(j) = self.jerk {
            if let Some(v) = j.v_des {
                cfg.jerk.v_des = v;
            }
            if let Some(a) = j.a {
                cfg.jerk.a = a;
            }
            if let Some(alpha) = j.alpha {
                cfg.jerk.alpha = alpha;
            }
            let ranged = j.v_min.is_some() || j.v_max.is_some() || j.v_step.is_some();
            match (j.v_grid, ranged) {
                (Some(_), true) => {
                    return Err(Error::Config(
                        "give either jerk.v_grid or jerk.v_min/v_max/v_step".into(),
                    ))
                }
                (Some(grid), false) => cfg.jerk.v_grid = grid,
                (None, true) => {
                    let step = j.v_step.unwrap_or(0.25);
                    let lo = j.v_min.unwrap_or(0.0);
                    let hi = j.v_max.unwrap_or(1.5 * cfg.jerk.v_des);
                    if !(step > 0.0) || !(hi >= lo) {
                        return Err(Error::Config("invalid jerk velocity range".into()));
                    }
                    cfg.jerk.v_grid = uniform_grid(lo, hi, step);
                }
                (None, false) => {}
            }
        }
        if let Some(s) = self.sweep {
            if let Some(r) = s.a_ratios {
                cfg.sweep.a_ratios = r;
            }
            if let Some(b) = s.b_values {
                cfg.sweep.b_values = b;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_expand_to_ring_experiments() {
        let s = ExperimentConfig::preset(Preset::StablePaper);
        assert_eq!(
            s.ring,
            RingConfig {
                n_vehicles: 100,
                ring_length: 200.0
            }
        );
        assert_eq!(s.plan.scheme, Scheme::ForwardEuler);
        assert_eq!((s.plan.dt, s.plan.t_end), (0.1, 100.0));
        assert_eq!(s.ov, OvFunction::Tanh);
        assert!(
            matches!(s.model, ModelSpec::Hybrid { a: Strength::RatioToCritical(r), .. } if r == 2.2)
        );

        let u = ExperimentConfig::preset(Preset::UnstablePaper);
        assert_eq!(u.ring.ring_length, 50.0);
        assert!(
            matches!(u.model, ModelSpec::Hybrid { a: Strength::RatioToCritical(r), .. } if r == 0.5)
        );
        assert_eq!(u.plan.t_end, 100.0);

        let l = ExperimentConfig::preset(Preset::UnstableLong);
        assert_eq!(l.plan.t_end, 300.0);
        assert_eq!(l.ring, u.ring);
        assert_eq!(l.model, u.model);
    }

    #[test]
    fn preset_names_parse() {
        assert_eq!(
            "stable-paper".parse::<Preset>().unwrap(),
            Preset::StablePaper
        );
        assert_eq!(
            "UnstablePaper".parse::<Preset>().unwrap(),
            Preset::UnstablePaper
        );
        assert_eq!(
            "unstable_long".parse::<Preset>().unwrap(),
            Preset::UnstableLong
        );
        assert!("fast".parse::<Preset>().is_err());
    }

    #[test]
    fn file_then_flags() {
        let text = r#"
            preset = "unstable-paper"
            [plan]
            scheme = "rk4"
            dt = 0.05
            [perturbation]
            dx = 0.001
        "#;
        let cfg = ExperimentConfig::from_toml_str(text, &Overrides::default()).unwrap();
        assert_eq!(cfg.preset, Some(Preset::UnstablePaper));
        assert_eq!(cfg.plan.scheme, Scheme::RungeKutta4);
        assert_eq!(cfg.plan.dt, 0.05);
        assert_eq!(cfg.perturbation.dx, Displacement::Absolute(0.001));

        let ov = Overrides {
            dt: Some(0.01),
            preset: Some(Preset::StablePaper),
            ..Default::default()
        };
        let cfg = ExperimentConfig::from_toml_str(text, &ov).unwrap();
        assert_eq!(cfg.ring.ring_length, 200.0);
        assert_eq!(cfg.plan.dt, 0.01);
        assert_eq!(cfg.plan.scheme, Scheme::RungeKutta4);
    }

    #[test]
    fn switching_to_ovm_requires_alpha() {
        let err = ExperimentConfig::from_toml_str("[model]\nkind = \"ovm\"", &Overrides::default());
        assert!(matches!(err, Err(Error::Config(_))));
        let cfg = ExperimentConfig::from_toml_str(
            "[model]\nkind = \"ovm\"\nalpha_ratio = 1.5",
            &Overrides::default(),
        )
        .unwrap();
        let law = cfg.law().unwrap();
        let eq = cfg.equilibrium().unwrap();
        assert!(
            matches!(law, ModelLaw::ClassicalOvm { alpha } if (alpha - 3.0 * eq.f).abs() < 1e-15)
        );
    }

    #[test]
    fn sigmoid_ov_from_file() {
        let text = "[ov]\nkind = \"sigmoid\"\nv_max = 30.0\nh_c = 25.0\nell = 10.0\n[ring]\nring_length = 2500.0";
        let cfg = ExperimentConfig::from_toml_str(text, &Overrides::default()).unwrap();
        assert_eq!(
            cfg.ov,
            OvFunction::Sigmoid {
                v_max: 30.0,
                h_c: 25.0,
                ell: 10.0
            }
        );
    }

    #[test]
    fn rejects_bad_input() {
        let o = Overrides::default();
        assert!(ExperimentConfig::from_toml_str("bogus = 1", &o).is_err());
        assert!(ExperimentConfig::from_toml_str("[model]\na = 1.0\na_ratio = 2.0", &o).is_err());
        assert!(ExperimentConfig::from_toml_str("modes = [100]", &o).is_err());
        assert!(ExperimentConfig::from_toml_str("[perturbation]\nindex = 100", &o).is_err());
        assert!(ExperimentConfig::from_toml_str("[ring]\nn_vehicles = 1", &o).is_err());
        assert!(ExperimentConfig::from_toml_str("[plan]\ndt = -0.1", &o).is_err());
        assert!(ExperimentConfig::from_toml_str(
            "[ov]\nkind = \"sigmoid\"\nv_max = 30.0\nh_c = 25.0\nell = 0.0",
            &o
        )
        .is_err());
    }

    #[test]
    fn jerk_grid_defaults_cover_overspeed() {
        let cfg = ExperimentConfig::default();
        assert_eq!(cfg.jerk.v_grid.first(), Some(&0.0));
        assert_eq!(cfg.jerk.v_grid.last(), Some(&30.0));
        assert!(cfg.jerk.v_grid.contains(&20.0) && cfg.jerk.v_grid.contains(&25.0));
    }
}
