//! Fixed-step integration of x'(t) = A0 x(t) + A1 x(t - tau) by the method of
//! steps with a constant pre-history.

use std::io::{self, Write};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::system::RetardedSystem;

/// Growth factor of the state norm over the initial norm that ends a run early.
pub const DIVERGENCE_FACTOR: f64 = 1e12;

/// Envelope ratio below which a run counts as decaying.
pub const DECAY_RATIO: f64 = 0.5;

/// Envelope ratio above which a run counts as growing.
pub const GROWTH_RATIO: f64 = 2.0;

/// Fraction of the horizon covered by each envelope window.
const ENVELOPE_FRACTION: f64 = 0.2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub tau: f64,
    pub horizon: f64,
    pub dt: f64,
    /// Value of the state on [-tau, 0].
    pub x0: Vec<f64>,
}

impl SimConfig {
    pub fn validate(&self, n: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.tau.is_finite() && self.tau >= 0.0) {
            return bad(format!("tau must be finite and non-negative, got {}", self.tau));
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return bad(format!("horizon must be positive, got {}", self.horizon));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if self.dt > self.horizon {
            return bad(format!("dt {} exceeds horizon {}", self.dt, self.horizon));
        }
        if self.tau > 0.0 && self.dt > self.tau / 10.0 {
            return bad(format!("dt {} exceeds tau/10 = {}", self.dt, self.tau / 10.0));
        }
        if self.x0.len() != n {
            return bad(format!("x0 has length {}, system dimension is {n}", self.x0.len()));
        }
        if let Some(i) = self.x0.iter().position(|v| !v.is_finite()) {
            return bad(format!("x0[{i}] is not finite"));
        }
        Ok(())
    }
}

/// Samples at t = k*dt, k = 0, 1, ...; states are stored row by row.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    dim: usize,
    times: Vec<f64>,
    states: Vec<f64>,
    diverged: bool,
}

impl Trajectory {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn state(&self, k: usize) -> &[f64] {
        &self.states[k * self.dim..(k + 1) * self.dim]
    }

    pub fn final_state(&self) -> &[f64] {
        self.state(self.len() - 1)
    }

    /// True when the run stopped because the norm passed the divergence bound.
    pub fn diverged(&self) -> bool {
        self.diverged
    }

    pub fn norms(&self) -> impl Iterator<Item = f64> + '_ {
        self.states.chunks(self.dim).map(|x| x.iter().map(|v| v * v).sum::<f64>().sqrt())
    }

    /// Writes `t,x1,...,xn` rows with a header line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        write!(out, "t")?;
        for i in 1..=self.dim {
            write!(out, ",x{i}")?;
        }
        writeln!(out)?;
        for (k, t) in self.times.iter().enumerate() {
            write!(out, "{t}")?;
            for v in self.state(k) {
                write!(out, ",{v}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// Classical RK4 with the delayed state linearly interpolated from the
/// stored samples.
pub fn simulate(sys: &RetardedSystem, cfg: &SimConfig) -> Result<Trajectory> {
    let n = sys.dim();
    cfg.validate(n)?;
    let x0 = DVector::from_column_slice(&cfg.x0);
    let bound = DIVERGENCE_FACTOR * x0.norm();
    let steps = (cfg.horizon / cfg.dt).round().max(1.0) as usize;
    let dt = cfg.dt;

    let mut traj = Trajectory {
        dim: n,
        times: Vec::with_capacity(steps + 1),
        states: Vec::with_capacity((steps + 1) * n),
        diverged: false,
    };
    traj.times.push(0.0);
    traj.states.extend_from_slice(&cfg.x0);

    let sum;
    let (a0, a1): (&DMatrix<f64>, Option<&DMatrix<f64>>) = if cfg.tau == 0.0 {
        sum = sys.delay_free_matrix();
        (&sum, None)
    } else {
        (sys.a0(), Some(sys.a1()))
    };

    let mut x = x0.clone();
    let mut delayed = DVector::zeros(n);
    for k in 0..steps {
        let t = k as f64 * dt;
        let rhs = |x: &DVector<f64>, at: f64, delayed: &mut DVector<f64>| {
            let mut dx = a0 * x;
            if let Some(a1) = a1 {
                history(&traj, &cfg.x0, at - cfg.tau, dt, delayed);
                dx.gemv(1.0, a1, delayed, 1.0);
            }
            dx
        };
        let k1 = rhs(&x, t, &mut delayed);
        let k2 = rhs(&(&x + &k1 * (0.5 * dt)), t + 0.5 * dt, &mut delayed);
        let k3 = rhs(&(&x + &k2 * (0.5 * dt)), t + 0.5 * dt, &mut delayed);
        let k4 = rhs(&(&x + &k3 * dt), t + dt, &mut delayed);
        x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);

        traj.times.push((k + 1) as f64 * dt);
        traj.states.extend_from_slice(x.as_slice());
        if !x.iter().all(|v| v.is_finite()) || x.norm() > bound {
            traj.diverged = true;
            break;
        }
    }
    Ok(traj)
}

/// x(s) from the stored samples, or the pre-history for s <= 0.
fn history(traj: &Trajectory, x0: &[f64], s: f64, dt: f64, out: &mut DVector<f64>) {
    if s <= 0.0 {
        out.copy_from_slice(x0);
        return;
    }
    let last = traj.len() - 1;
    let pos = s / dt;
    let i = (pos.floor() as usize).min(last);
    let frac = (pos - i as f64).clamp(0.0, 1.0);
    if i == last || frac == 0.0 {
        out.copy_from_slice(traj.state(i));
        return;
    }
    let (lo, hi) = (traj.state(i), traj.state(i + 1));
    for j in 0..out.len() {
        out[j] = lo[j] + frac * (hi[j] - lo[j]);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Decaying,
    Growing,
    Inconclusive,
}

impl Verdict {
    /// Compares the peak norm over the last fifth of the run with the peak
    /// over the first fifth.
    pub fn from_trajectory(traj: &Trajectory) -> Verdict {
        if traj.diverged() {
            return Verdict::Growing;
        }
        let end = traj.times().last().copied().unwrap_or(0.0);
        let (early_cut, late_cut) = (ENVELOPE_FRACTION * end, (1.0 - ENVELOPE_FRACTION) * end);
        let mut early = 0.0_f64;
        let mut late = 0.0_f64;
        for (t, norm) in traj.times().iter().zip(traj.norms()) {
            if *t <= early_cut {
                early = early.max(norm);
            }
            if *t >= late_cut {
                late = late.max(norm);
            }
        }
        if early == 0.0 {
            return Verdict::Inconclusive;
        }
        let ratio = late / early;
        if ratio < DECAY_RATIO {
            Verdict::Decaying
        } else if ratio > GROWTH_RATIO {
            Verdict::Growing
        } else {
            Verdict::Inconclusive
        }
    }
}

/// All-ones vector of unit length.
pub fn canonical_x0(n: usize) -> Vec<f64> {
    vec![1.0 / (n as f64).sqrt(); n]
}

/// Step used by [`verdict`]: a tenth of the delay, a thousandth of the
/// horizon, and small against the fastest time scale of the matrices.
pub fn default_step(sys: &RetardedSystem, tau: f64, horizon: f64) -> f64 {
    let rate = sys.a0().norm() + sys.a1().norm();
    let mut dt = (horizon / 1000.0).min(0.05 / rate.max(f64::MIN_POSITIVE));
    if tau > 0.0 {
        dt = dt.min(tau / 10.0);
    }
    dt
}

pub fn sim_config(sys: &RetardedSystem, tau: f64, horizon: f64) -> SimConfig {
    SimConfig {
        tau,
        horizon,
        dt: default_step(sys, tau, horizon),
        x0: canonical_x0(sys.dim()),
    }
}

/// Simulates from the canonical initial history and classifies the envelope.
pub fn verdict(sys: &RetardedSystem, tau: f64, horizon: f64) -> Result<Verdict> {
    let traj = simulate(sys, &sim_config(sys, tau, horizon))?;
    Ok(Verdict::from_trajectory(&traj))
}
