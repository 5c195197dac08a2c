//! Optimal-velocity (desired speed) functions of headway.
//!
//! `Tanh` is the parameter-free form `V(s) = tanh(s)` and works in
//! nondimensional units (headway and speed both scaled to order one).
//! `Sigmoid` is `V(s) = (v_max / 2) * (tanh((s - h_c) / ell) + 1)`, usually
//! given in SI units (m, m/s).
//!
//! Negative headways are evaluated as written rather than clamped; collision
//! handling belongs to the integrator.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OvFunction {
    Tanh,
    Sigmoid { v_max: f64, h_c: f64, ell: f64 },
}

impl OvFunction {
    pub fn sigmoid(v_max: f64, h_c: f64, ell: f64) -> Result<Self> {
        let f = OvFunction::Sigmoid { v_max, h_c, ell };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            OvFunction::Tanh => Ok(()),
            OvFunction::Sigmoid { v_max, h_c, ell } => {
                if !(ell > 0.0) || !ell.is_finite() {
                    return Err(Error::Config(format!(
                        "sigmoid slope length ell must be positive and finite, got {ell}"
                    )));
                }
                if !(v_max > 0.0) || !v_max.is_finite() {
                    return Err(Error::Config(format!(
                        "sigmoid v_max must be positive and finite, got {v_max}"
                    )));
                }
                if !h_c.is_finite() {
                    return Err(Error::Config(format!(
                        "sigmoid h_c must be finite, got {h_c}"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Desired speed `V(headway)`.
    pub fn eval(&self, headway: f64) -> Result<f64> {
        self.validate()?;
        ensure_finite("headway", headway)?;
        Ok(match *self {
            OvFunction::Tanh => headway.tanh(),
            OvFunction::Sigmoid { v_max, h_c, ell } => {
                0.5 * v_max * (((headway - h_c) / ell).tanh() + 1.0)
            }
        })
    }

    /// Analytic derivative `V'(headway)`.
    pub fn eval_deriv(&self, headway: f64) -> Result<f64> {
        self.validate()?;
        ensure_finite("headway", headway)?;
        Ok(match *self {
            OvFunction::Tanh => sech_squared(headway),
            OvFunction::Sigmoid { v_max, h_c, ell } => {
                v_max / (2.0 * ell) * sech_squared((headway - h_c) / ell)
            }
        })
    }

    /// Least upper bound of `V` (never attained).
    pub fn supremum(&self) -> f64 {
        match *self {
            OvFunction::Tanh => 1.0,
            OvFunction::Sigmoid { v_max, .. } => v_max,
        }
    }
}

// 1 - tanh^2 loses all precision once tanh saturates; 1/cosh^2 does not.
fn sech_squared(x: f64) -> f64 {
    let sech = 1.0 / x.cosh();
    sech * sech
}
