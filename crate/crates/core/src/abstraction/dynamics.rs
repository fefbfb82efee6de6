use serde::{Deserialize, Serialize};

use super::AbstractionError;
use crate::scalar::wrap_angle;
use crate::Real;

/// Vehicle state: position, heading, speed, time.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct State5<T> {
    pub x: T,
    pub y: T,
    pub theta: T,
    pub v: T,
    pub tau: T,
}

impl<T: Real> State5<T> {
    pub fn new(x: T, y: T, theta: T, v: T, tau: T) -> Self {
        State5 {
            x,
            y,
            theta: wrap_angle(theta),
            v,
            tau,
        }
    }

    pub fn to_array(self) -> [f64; 5] {
        [
            self.x.as_f64(),
            self.y.as_f64(),
            self.theta.as_f64(),
            self.v.as_f64(),
            self.tau.as_f64(),
        ]
    }

    pub fn from_array(a: [f64; 5]) -> Self {
        State5::new(
            T::lit(a[0]),
            T::lit(a[1]),
            T::lit(a[2]),
            T::lit(a[3]),
            T::lit(a[4]),
        )
    }

    fn axpy(self, k: T, d: &Deriv<T>) -> Self {
        State5 {
            x: self.x + k * d.0[0],
            y: self.y + k * d.0[1],
            theta: self.theta + k * d.0[2],
            v: self.v + k * d.0[3],
            tau: self.tau + k * d.0[4],
        }
    }
}

/// Steering angle and longitudinal acceleration.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ControlInput<T> {
    pub steer: T,
    pub accel: T,
}

impl<T> ControlInput<T> {
    pub fn new(steer: T, accel: T) -> Self {
        ControlInput { steer, accel }
    }
}

/// A control held constant for `duration` seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlSegment<T> {
    pub control: ControlInput<T>,
    pub duration: T,
}

/// Wheelbase and actuation limits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleParams<T> {
    pub wheelbase: T,
    pub max_steer: T,
    pub max_accel: T,
}

impl<T: Real> Default for VehicleParams<T> {
    fn default() -> Self {
        VehicleParams {
            wheelbase: T::lit(2.7),
            max_steer: T::lit(0.6),
            max_accel: T::lit(3.0),
        }
    }
}

impl<T: Real> VehicleParams<T> {
    pub fn check(&self, u: &ControlInput<T>) -> Result<(), AbstractionError> {
        if !(u.steer.abs() <= self.max_steer && u.accel.abs() <= self.max_accel) {
            return Err(AbstractionError::ControlBounds {
                steer: u.steer.as_f64(),
                accel: u.accel.as_f64(),
                max_steer: self.max_steer.as_f64(),
                max_accel: self.max_accel.as_f64(),
            });
        }
        Ok(())
    }
}

/// States sampled every `step` seconds, first sample at the start state.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    samples: Vec<State5<T>>,
    step: T,
}

impl<T: Real> Trajectory<T> {
    pub fn new(samples: Vec<State5<T>>, step: T) -> Result<Self, AbstractionError> {
        if samples.is_empty() {
            return Err(AbstractionError::Schedule(
                "trajectory needs at least one sample".into(),
            ));
        }
        if !(step > T::zero()) {
            return Err(AbstractionError::InvalidStep(step.as_f64()));
        }
        Ok(Trajectory { samples, step })
    }

    pub fn samples(&self) -> &[State5<T>] {
        &self.samples
    }

    pub fn step(&self) -> T {
        self.step
    }

    pub fn duration(&self) -> T {
        T::lit((self.samples.len() - 1) as f64) * self.step
    }

    pub fn start(&self) -> State5<T> {
        self.samples[0]
    }

    pub fn end(&self) -> State5<T> {
        *self.samples.last().unwrap()
    }
}

struct Deriv<T>([T; 5]);

fn deriv<T: Real>(s: &State5<T>, u: &ControlInput<T>, wheelbase: T) -> Deriv<T> {
    let phi = s.theta + u.steer;
    Deriv([
        s.v * phi.cos(),
        s.v * phi.sin(),
        s.v / wheelbase * u.steer.sin(),
        u.accel,
        T::one(),
    ])
}

fn rk4_step<T: Real>(s: State5<T>, u: &ControlInput<T>, l: T, h: T) -> State5<T> {
    let half = h / T::lit(2.0);
    let k1 = deriv(&s, u, l);
    let k2 = deriv(&s.axpy(half, &k1), u, l);
    let k3 = deriv(&s.axpy(half, &k2), u, l);
    let k4 = deriv(&s.axpy(h, &k3), u, l);
    let six = T::lit(6.0);
    let two = T::lit(2.0);
    let mut out = s;
    for (dst, i) in [&mut out.x, &mut out.y, &mut out.theta, &mut out.v]
        .into_iter()
        .zip(0..)
    {
        *dst = *dst + h / six * (k1.0[i] + two * k2.0[i] + two * k3.0[i] + k4.0[i]);
    }
    out
}

/// Number of whole steps of length `h` in `t`, if `t` is such a multiple.
pub(crate) fn step_count<T: Real>(t: T, h: T) -> Option<usize> {
    let n = (t / h).round();
    let tol = T::lit(1e-6);
    ((t / h - n).abs() <= tol && n >= T::zero()).then(|| n.to_usize().unwrap())
}

/// Classical fourth-order Runge-Kutta integration of the single-track
/// model under a piecewise-constant control schedule.
///
/// The `tau` of sample `k` is set to `tau0 + k * h` directly.
pub fn integrate_bicycle<T: Real>(
    x0: State5<T>,
    schedule: &[ControlSegment<T>],
    h: T,
    duration: T,
    params: &VehicleParams<T>,
) -> Result<Trajectory<T>, AbstractionError> {
    if !(h > T::zero()) || !h.is_finite() {
        return Err(AbstractionError::InvalidStep(h.as_f64()));
    }
    if !(params.wheelbase > T::zero()) {
        return Err(AbstractionError::Schedule(
            "wheelbase must be positive".into(),
        ));
    }
    let n = step_count(duration, h).ok_or_else(|| {
        AbstractionError::Schedule(format!(
            "duration {} is not a multiple of step {}",
            duration.as_f64(),
            h.as_f64()
        ))
    })?;
    let mut per_step = Vec::with_capacity(n);
    for seg in schedule {
        params.check(&seg.control)?;
        let m = step_count(seg.duration, h).ok_or_else(|| {
            AbstractionError::Schedule(format!(
                "segment duration {} is not a multiple of the step",
                seg.duration.as_f64()
            ))
        })?;
        per_step.extend(std::iter::repeat_n(seg.control, m));
    }
    if per_step.len() < n {
        return Err(AbstractionError::Schedule(format!(
            "schedule covers {} steps, {} needed",
            per_step.len(),
            n
        )));
    }
    let mut samples = Vec::with_capacity(n + 1);
    let mut s = x0;
    samples.push(s);
    for (k, u) in per_step[..n].iter().enumerate() {
        s = rk4_step(s, u, params.wheelbase, h);
        s.theta = wrap_angle(s.theta);
        s.tau = x0.tau + T::lit((k + 1) as f64) * h;
        samples.push(s);
    }
    Trajectory::new(samples, h)
}

/// Integrates a single constant control.
pub fn integrate_constant<T: Real>(
    x0: State5<T>,
    u: ControlInput<T>,
    h: T,
    duration: T,
    params: &VehicleParams<T>,
) -> Result<Trajectory<T>, AbstractionError> {
    integrate_bicycle(
        x0,
        &[ControlSegment {
            control: u,
            duration,
        }],
        h,
        duration,
        params,
    )
}

/// Trapezoid-rule integral of `g` over the trajectory samples.
pub fn edge_cost_with<T: Real>(tr: &Trajectory<T>, g: impl Fn(&State5<T>) -> T) -> T {
    let s = tr.samples();
    let two = T::lit(2.0);
    s.windows(2).fold(T::zero(), |acc, w| {
        acc + (g(&w[0]) + g(&w[1])) / two * tr.step()
    })
}

/// Cost with unit running cost, i.e. the duration.
pub fn edge_cost<T: Real>(tr: &Trajectory<T>) -> T {
    tr.duration()
}
