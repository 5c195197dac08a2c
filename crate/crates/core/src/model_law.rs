//! Per-vehicle acceleration laws.
//!
//! * classical OVM: `dv/dt = alpha * (V - v)`
//! * hybrid OVD: `dv/dt = a * (1 - v^2 / V^2)`, the quadratic-drag law with
//!   the terminal speed replaced by the headway-dependent desired speed `V`.
//!
//! The hybrid law divides by `V^2`. The desired speed is floored at
//! `v_floor` first, so a vanishing `V` produces hard braking instead of a
//! division by zero.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

pub const DEFAULT_V_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelLaw {
    ClassicalOvm { alpha: f64 },
    HybridOvd { a: f64, v_floor: f64 },
}

impl ModelLaw {
    pub fn classical(alpha: f64) -> Result<Self> {
        let law = ModelLaw::ClassicalOvm { alpha };
        law.validate()?;
        Ok(law)
    }

    pub fn hybrid(a: f64) -> Result<Self> {
        Self::hybrid_with_floor(a, DEFAULT_V_FLOOR)
    }

    pub fn hybrid_with_floor(a: f64, v_floor: f64) -> Result<Self> {
        let law = ModelLaw::HybridOvd { a, v_floor };
        law.validate()?;
        Ok(law)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ModelLaw::ClassicalOvm { alpha } => {
                if !(alpha > 0.0 && alpha.is_finite()) {
                    return Err(Error::Config(format!(
                        "alpha must be positive, got {alpha}"
                    )));
                }
            }
            ModelLaw::HybridOvd { a, v_floor } => {
                if !(a > 0.0 && a.is_finite()) {
                    return Err(Error::Config(format!(
                        "acceleration scale a must be positive, got {a}"
                    )));
                }
                if !(v_floor >= 0.0 && v_floor.is_finite()) {
                    return Err(Error::Config(format!(
                        "v_floor must be non-negative, got {v_floor}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn is_hybrid(&self) -> bool {
        matches!(self, ModelLaw::HybridOvd { .. })
    }

    /// Acceleration of a vehicle at speed `v` whose desired speed is `v_des`.
    pub fn accel(&self, v: f64, v_des: f64) -> Result<f64> {
        ensure_finite("velocity", v)?;
        ensure_finite("desired velocity", v_des)?;
        Ok(match *self {
            ModelLaw::ClassicalOvm { alpha } => alpha * (v_des - v),
            ModelLaw::HybridOvd { a, v_floor } => hybrid_accel(a, v, v_des.max(v_floor)),
        })
    }

    /// State-dependent sensitivity `a (V + v) / V^2` such that
    /// `accel = alpha_eff * (V - v)`. The classical law returns its constant
    /// `alpha`.
    pub fn effective_sensitivity(&self, v: f64, v_des: f64) -> Result<f64> {
        ensure_finite("velocity", v)?;
        ensure_finite("desired velocity", v_des)?;
        Ok(match *self {
            ModelLaw::ClassicalOvm { alpha } => alpha,
            ModelLaw::HybridOvd { a, v_floor } => {
                let vd = v_des.max(v_floor);
                if vd <= 0.0 {
                    return Err(Error::Domain(
                        "effective sensitivity needs a positive desired speed".into(),
                    ));
                }
                a * (vd + v) / (vd * vd)
            }
        })
    }

    /// Jerk `d^2 v / dt^2` with the desired speed held fixed.
    pub fn jerk(&self, v: f64, v_des: f64) -> Result<f64> {
        ensure_finite("velocity", v)?;
        ensure_finite("desired velocity", v_des)?;
        Ok(match *self {
            ModelLaw::ClassicalOvm { alpha } => -alpha * alpha * (v_des - v),
            ModelLaw::HybridOvd { a, v_floor } => {
                let vd = v_des.max(v_floor);
                -2.0 * a * v * hybrid_accel(a, v, vd) / (vd * vd)
            }
        })
    }
}

// a (V - v)(V + v) / V^2. The ratio is exactly 1 at v = 0 and exactly 0 at
// v = V; the true value never exceeds a, so the min only trims rounding.
fn hybrid_accel(a: f64, v: f64, vd: f64) -> f64 {
    (a * ((vd - v) * (vd + v) / (vd * vd))).min(a)
}

/// Closed-form speed of a lone vehicle under the drag law
/// `dv/dt = a (1 - v^2 / v_max^2)` starting from `v0`.
pub fn single_vehicle_solution(a: f64, v_max: f64, v0: f64, t: f64) -> Result<f64> {
    ensure_finite("a", a)?;
    ensure_finite("v_max", v_max)?;
    ensure_finite("v0", v0)?;
    ensure_finite("t", t)?;
    if !(a > 0.0) || !(v_max > 0.0) {
        return Err(Error::Domain("a and v_max must be positive".into()));
    }
    if !(0.0..v_max).contains(&v0) {
        return Err(Error::Domain(format!(
            "initial speed {v0} must lie in [0, v_max = {v_max})"
        )));
    }
    if t < 0.0 {
        return Err(Error::Domain(format!("time must be non-negative, got {t}")));
    }
    Ok(v_max * ((a / v_max) * t + (v0 / v_max).atanh()).tanh())
}
