//! Fixed-step time integration of the ring-road system.
//!
//! Every stage evaluates all accelerations from one frozen state (Jacobi
//! update), which is what the coupled ODE system prescribes.
//!
//! [`run`] and [`step`] integrate positions as displacements from the
//! uniform-flow reference `n b + c t`. This is the same ODE and the same
//! discrete scheme, but the unperturbed ring stays exactly stationary and
//! roundoff in large absolute positions never seeds unstable modes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model_law::ModelLaw;
use crate::ov_function::OvFunction;
use crate::ring::{fill_headways, RingConfig, RingState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    #[serde(alias = "euler")]
    ForwardEuler,
    #[serde(alias = "rk4")]
    RungeKutta4,
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::ForwardEuler => "euler",
            Scheme::RungeKutta4 => "rk4",
        }
    }

    /// Advance `y` in place by one step of size `dt`.
    pub fn advance<S: OdeSystem + ?Sized>(
        &self,
        system: &S,
        y: &mut [f64],
        dt: f64,
        work: &mut Workspace,
    ) -> Result<()> {
        work.resize(y.len());
        match self {
            Scheme::ForwardEuler => {
                system.rhs(y, &mut work.k1)?;
                for (yi, ki) in y.iter_mut().zip(&work.k1) {
                    *yi += dt * ki;
                }
            }
            Scheme::RungeKutta4 => {
                let Workspace {
                    k1,
                    k2,
                    k3,
                    k4,
                    tmp,
                } = work;
                system.rhs(y, k1)?;
                axpy_into(tmp, y, 0.5 * dt, k1);
                system.rhs(tmp, k2)?;
                axpy_into(tmp, y, 0.5 * dt, k2);
                system.rhs(tmp, k3)?;
                axpy_into(tmp, y, dt, k3);
                system.rhs(tmp, k4)?;
                let w = dt / 6.0;
                for i in 0..y.len() {
                    y[i] += w * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
                }
            }
        }
        Ok(())
    }
}

fn axpy_into(out: &mut [f64], y: &[f64], h: f64, k: &[f64]) {
    for ((o, yi), ki) in out.iter_mut().zip(y).zip(k) {
        *o = yi + h * ki;
    }
}

/// Scratch buffers reused across steps.
#[derive(Debug, Default, Clone)]
pub struct Workspace {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl Workspace {
    fn resize(&mut self, n: usize) {
        for buf in [
            &mut self.k1,
            &mut self.k2,
            &mut self.k3,
            &mut self.k4,
            &mut self.tmp,
        ] {
            buf.resize(n, 0.0);
        }
    }
}

/// Autonomous first-order system `dy/dt = F(y)`.
pub trait OdeSystem {
    fn dim(&self) -> usize;
    fn rhs(&self, y: &[f64], dy: &mut [f64]) -> Result<()>;
}

/// N vehicles on a ring, all following the same law and OV function, with
/// state `[x_0 .. x_{N-1}, v_0 .. v_{N-1}]` in absolute positions.
#[derive(Debug, Clone, Copy)]
pub struct RingSystem {
    pub law: ModelLaw,
    pub ov: OvFunction,
    pub config: RingConfig,
}

impl OdeSystem for RingSystem {
    fn dim(&self) -> usize {
        2 * self.config.n_vehicles
    }

    fn rhs(&self, y: &[f64], dy: &mut [f64]) -> Result<()> {
        let n = self.config.n_vehicles;
        let (x, v) = y.split_at(n);
        let (dx, dv) = dy.split_at_mut(n);
        dx.copy_from_slice(v);
        // headways go into dv first, then get overwritten by accelerations
        fill_headways(x, self.config.ring_length, dv);
        for (acc, &vi) in dv.iter_mut().zip(v) {
            let v_des = self.ov.eval(*acc)?;
            *acc = self.law.accel(vi, v_des)?;
        }
        Ok(())
    }
}

/// Uniform-flow reference trajectory `x_n(t) = n b + c t`.
#[derive(Debug, Clone, Copy)]
struct Comoving {
    b: f64,
    c: f64,
}

impl Comoving {
    fn new(ov: &OvFunction, config: &RingConfig) -> Result<Self> {
        let b = config.mean_headway();
        Ok(Comoving { b, c: ov.eval(b)? })
    }

    fn reference(&self, n: usize, t: f64) -> f64 {
        n as f64 * self.b + self.c * t
    }

    /// `[y_0 .. y_{N-1}, v_0 .. v_{N-1}]` with `y_n = x_n - (n b + c t)`.
    fn pack(&self, state: &RingState) -> Vec<f64> {
        let mut y = Vec::with_capacity(2 * state.x.len());
        y.extend(
            state
                .x
                .iter()
                .enumerate()
                .map(|(i, x)| x - self.reference(i, state.t)),
        );
        y.extend_from_slice(&state.v);
        y
    }

    fn positions<'a>(&'a self, y: &'a [f64], t: f64) -> impl Iterator<Item = f64> + 'a {
        y.iter()
            .enumerate()
            .map(move |(i, d)| self.reference(i, t) + d)
    }

    fn headways(&self, y: &[f64], out: &mut [f64]) {
        let n = y.len();
        for i in 0..n {
            out[i] = self.b + (y[(i + 1) % n] - y[i]);
        }
    }
}

/// The ring in displacement coordinates relative to [`Comoving`].
struct ComovingRing {
    law: ModelLaw,
    ov: OvFunction,
    frame: Comoving,
    n: usize,
}

impl OdeSystem for ComovingRing {
    fn dim(&self) -> usize {
        2 * self.n
    }

    fn rhs(&self, y: &[f64], dy: &mut [f64]) -> Result<()> {
        let (d, v) = y.split_at(self.n);
        let (dd, dv) = dy.split_at_mut(self.n);
        for (out, vi) in dd.iter_mut().zip(v) {
            *out = vi - self.frame.c;
        }
        self.frame.headways(d, dv);
        for (acc, &vi) in dv.iter_mut().zip(v) {
            let v_des = self.ov.eval(*acc)?;
            *acc = self.law.accel(vi, v_des)?;
        }
        Ok(())
    }
}

/// A single vehicle relaxing toward a fixed desired speed.
#[derive(Debug, Clone, Copy)]
pub struct FrozenTarget {
    pub law: ModelLaw,
    pub v_des: f64,
}

impl OdeSystem for FrozenTarget {
    fn dim(&self) -> usize {
        1
    }

    fn rhs(&self, y: &[f64], dy: &mut [f64]) -> Result<()> {
        dy[0] = self.law.accel(y[0], self.v_des)?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrationPlan {
    pub scheme: Scheme,
    pub dt: f64,
    pub t_end: f64,
    pub record_stride: usize,
    /// Clamp speeds at zero after every step. Off by default.
    #[serde(default)]
    pub clamp_nonnegative: bool,
}

impl IntegrationPlan {
    pub fn new(scheme: Scheme, dt: f64, t_end: f64) -> Result<Self> {
        let plan = IntegrationPlan {
            scheme,
            dt,
            t_end,
            record_stride: 1,
            clamp_nonnegative: false,
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn with_stride(mut self, stride: usize) -> Result<Self> {
        self.record_stride = stride;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::Config(format!(
                "t_end must be positive, got {}",
                self.t_end
            )));
        }
        if self.dt > self.t_end {
            return Err(Error::Config(format!(
                "dt = {} exceeds t_end = {}",
                self.dt, self.t_end
            )));
        }
        if self.record_stride == 0 {
            return Err(Error::Config("record_stride must be at least 1".into()));
        }
        Ok(())
    }

    /// `ceil(t_end / dt)`, ignoring a quotient that overshoots an integer
    /// only through rounding.
    pub fn n_steps(&self) -> usize {
        let q = self.t_end / self.dt;
        let r = q.round();
        if (q - r).abs() <= 1e-9 * r.max(1.0) {
            r as usize
        } else {
            q.ceil() as usize
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub law: ModelLaw,
    pub ov: OvFunction,
    pub ring: RingConfig,
    pub plan: IntegrationPlan,
    pub n_steps: usize,
    /// Set when any headway was `<= 0` at some step (integration continues).
    pub collision: bool,
    pub first_collision_time: Option<f64>,
    /// Extremes over every integration step, not just recorded samples.
    pub min_velocity: f64,
    pub max_velocity: f64,
}

/// Sampled history of a run. Matrices are row-major, one row per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub n_vehicles: usize,
    pub times: Vec<f64>,
    pub positions: Vec<f64>,
    pub velocities: Vec<f64>,
    pub meta: RunMetadata,
}

impl TrajectoryRecord {
    pub fn n_samples(&self) -> usize {
        self.times.len()
    }

    pub fn positions_at(&self, sample: usize) -> &[f64] {
        let n = self.n_vehicles;
        &self.positions[sample * n..(sample + 1) * n]
    }

    pub fn velocities_at(&self, sample: usize) -> &[f64] {
        let n = self.n_vehicles;
        &self.velocities[sample * n..(sample + 1) * n]
    }

    pub fn state_at(&self, sample: usize) -> RingState {
        RingState {
            t: self.times[sample],
            x: self.positions_at(sample).to_vec(),
            v: self.velocities_at(sample).to_vec(),
        }
    }

    /// Index of the first sample with `time >= t` (within half a step).
    pub fn sample_near(&self, t: f64) -> Option<usize> {
        let tol = 0.5 * self.meta.plan.dt * self.meta.plan.record_stride as f64;
        self.times.iter().position(|&s| s >= t - tol)
    }

    pub fn velocity_spread_at(&self, sample: usize) -> f64 {
        let v = self.velocities_at(sample);
        let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = v.iter().copied().fold(f64::INFINITY, f64::min);
        max - min
    }

    fn push(&mut self, t: f64, y: &[f64], frame: &Comoving) {
        let n = self.n_vehicles;
        self.times.push(t);
        self.positions.extend(frame.positions(&y[..n], t));
        self.velocities.extend_from_slice(&y[n..]);
    }
}

fn clamp_speeds(y: &mut [f64], n: usize) {
    for v in &mut y[n..] {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
}

/// One step of size `dt` for the whole ring.
pub fn step(
    state: &RingState,
    law: &ModelLaw,
    ov: &OvFunction,
    config: &RingConfig,
    dt: f64,
    scheme: Scheme,
) -> Result<RingState> {
    state.check_shape(config)?;
    law.validate()?;
    ov.validate()?;
    config.validate()?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Config(format!("dt must be positive, got {dt}")));
    }
    let frame = Comoving::new(ov, config)?;
    let n = config.n_vehicles;
    let system = ComovingRing {
        law: *law,
        ov: *ov,
        frame,
        n,
    };
    let step_index = (state.t / dt).round().max(0.0) as usize;
    let mut y = frame.pack(state);
    let mut work = Workspace::default();
    let t = state.t + dt;
    let diverged = |_| Error::Diverged {
        step: step_index,
        time: t,
        partial: None,
    };
    scheme
        .advance(&system, &mut y, dt, &mut work)
        .map_err(diverged)?;
    if !y.iter().all(|z| z.is_finite()) {
        return Err(Error::Diverged {
            step: step_index,
            time: t,
            partial: None,
        });
    }
    Ok(RingState {
        t,
        x: frame.positions(&y[..n], t).collect(),
        v: y[n..].to_vec(),
    })
}

/// Integrate from `initial` over the whole plan, recording every
/// `record_stride`-th step plus the final state.
pub fn run(
    initial: &RingState,
    law: &ModelLaw,
    ov: &OvFunction,
    config: &RingConfig,
    plan: &IntegrationPlan,
) -> Result<TrajectoryRecord> {
    initial.check_shape(config)?;
    law.validate()?;
    ov.validate()?;
    config.validate()?;
    plan.validate()?;
    if !initial.is_finite() {
        return Err(Error::Domain(
            "initial state contains non-finite values".into(),
        ));
    }

    let n = config.n_vehicles;
    let n_steps = plan.n_steps();
    let frame = Comoving::new(ov, config)?;
    let system = ComovingRing {
        law: *law,
        ov: *ov,
        frame,
        n,
    };
    let mut work = Workspace::default();
    let mut y = frame.pack(initial);
    let mut headways = vec![0.0; n];

    let n_samples = n_steps / plan.record_stride + 2;
    let mut record = TrajectoryRecord {
        n_vehicles: n,
        times: Vec::with_capacity(n_samples),
        positions: Vec::with_capacity(n_samples * n),
        velocities: Vec::with_capacity(n_samples * n),
        meta: RunMetadata {
            law: *law,
            ov: *ov,
            ring: *config,
            plan: *plan,
            n_steps,
            collision: false,
            first_collision_time: None,
            min_velocity: f64::INFINITY,
            max_velocity: f64::NEG_INFINITY,
        },
    };

    let observe = |y: &[f64], t: f64, headways: &mut [f64], meta: &mut RunMetadata| {
        for &v in &y[n..] {
            meta.min_velocity = meta.min_velocity.min(v);
            meta.max_velocity = meta.max_velocity.max(v);
        }
        frame.headways(&y[..n], headways);
        if !meta.collision && headways.iter().any(|&h| h <= 0.0) {
            meta.collision = true;
            meta.first_collision_time = Some(t);
        }
    };

    observe(&y, initial.t, &mut headways, &mut record.meta);
    record.push(initial.t, &y, &frame);

    for k in 1..=n_steps {
        let t = initial.t + k as f64 * plan.dt;
        let ok = plan
            .scheme
            .advance(&system, &mut y, plan.dt, &mut work)
            .is_ok()
            && y.iter().all(|z| z.is_finite());
        if !ok {
            return Err(Error::Diverged {
                step: k,
                time: t,
                partial: Some(Box::new(record)),
            });
        }
        if plan.clamp_nonnegative {
            clamp_speeds(&mut y, n);
        }
        observe(&y, t, &mut headways, &mut record.meta);
        if k % plan.record_stride == 0 || k == n_steps {
            record.push(t, &y, &frame);
        }
    }
    Ok(record)
}
