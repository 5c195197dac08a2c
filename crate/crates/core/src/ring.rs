//! Ring-road geometry and state.
//!
//! Positions are stored unwrapped; the headway of the last vehicle closes
//! the ring through `x[0] + L`. Wrapping into `[0, L)` is only done for
//! output.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ov_function::OvFunction;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RingConfig {
    pub n_vehicles: usize,
    pub ring_length: f64,
}

impl RingConfig {
    pub fn new(n_vehicles: usize, ring_length: f64) -> Result<Self> {
        let cfg = RingConfig {
            n_vehicles,
            ring_length,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_vehicles < 2 {
            return Err(Error::Config(format!(
                "ring needs at least 2 vehicles, got {}",
                self.n_vehicles
            )));
        }
        if !(self.ring_length > 0.0 && self.ring_length.is_finite()) {
            return Err(Error::Config(format!(
                "ring length must be positive, got {}",
                self.ring_length
            )));
        }
        Ok(())
    }

    /// Equilibrium headway `b = L / N`.
    pub fn mean_headway(&self) -> f64 {
        self.ring_length / self.n_vehicles as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RingState {
    pub t: f64,
    pub x: Vec<f64>,
    pub v: Vec<f64>,
}

impl RingState {
    /// Uniform flow: `x_n = n b`, `v_n = V(b)` at `t = 0`.
    pub fn uniform_flow(config: &RingConfig, ov: &OvFunction) -> Result<Self> {
        config.validate()?;
        let b = config.mean_headway();
        let c = ov.eval(b)?;
        let n = config.n_vehicles;
        Ok(RingState {
            t: 0.0,
            x: (0..n).map(|i| i as f64 * b).collect(),
            v: vec![c; n],
        })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Copy of the state with vehicle `index` shifted forward by `dx`.
    pub fn perturbed(&self, index: usize, dx: f64) -> Result<Self> {
        if index >= self.x.len() {
            return Err(Error::IndexOutOfRange {
                index,
                len: self.x.len(),
            });
        }
        let mut out = self.clone();
        out.x[index] += dx;
        Ok(out)
    }

    pub fn headways(&self, config: &RingConfig) -> Result<Vec<f64>> {
        self.check_shape(config)?;
        let mut out = vec![0.0; self.x.len()];
        fill_headways(&self.x, config.ring_length, &mut out);
        Ok(out)
    }

    pub fn check_shape(&self, config: &RingConfig) -> Result<()> {
        let n = config.n_vehicles;
        if self.x.len() != n {
            return Err(Error::SizeMismatch {
                expected: n,
                actual: self.x.len(),
            });
        }
        if self.v.len() != n {
            return Err(Error::SizeMismatch {
                expected: n,
                actual: self.v.len(),
            });
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.x.iter().chain(&self.v).all(|z| z.is_finite())
    }
}

/// `out[n] = x[n+1] - x[n]`, with `x[N] = x[0] + L`.
pub fn fill_headways(x: &[f64], ring_length: f64, out: &mut [f64]) {
    let n = x.len();
    for i in 0..n - 1 {
        out[i] = x[i + 1] - x[i];
    }
    out[n - 1] = x[0] + ring_length - x[n - 1];
}
