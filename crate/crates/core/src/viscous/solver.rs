use serde::{Deserialize, Serialize};

use super::grid::{Field, Trajectory};
use crate::error::{Error, Result};
use crate::model::SystemModel;

/// Time-stepping parameters for [`solve`] and [`solve_tangent`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub epsilon: f64,
    pub t_end: f64,
    /// Absolute output times, ascending, within `[t0, t_end]`.
    pub snapshot_times: Vec<f64>,
    #[serde(default = "default_cfl")]
    pub cfl_adv: f64,
    #[serde(default = "default_cfl")]
    pub cfl_diff: f64,
    #[serde(default = "default_dt_max")]
    pub dt_max: f64,
}

fn default_cfl() -> f64 {
    0.4
}

fn default_dt_max() -> f64 {
    f64::INFINITY
}

impl SolveConfig {
    pub fn new(epsilon: f64, t_end: f64) -> Self {
        Self {
            epsilon,
            t_end,
            snapshot_times: vec![t_end],
            cfl_adv: 0.4,
            cfl_diff: 0.4,
            dt_max: f64::INFINITY,
        }
    }

    pub fn with_snapshots(mut self, times: Vec<f64>) -> Self {
        self.snapshot_times = times;
        self
    }

    /// `count + 1` equally spaced snapshots from `t0` to `t_end`.
    pub fn with_uniform_snapshots(mut self, t0: f64, count: usize) -> Self {
        let h = (self.t_end - t0) / count as f64;
        self.snapshot_times = (0..=count).map(|k| if k == count { self.t_end } else { t0 + k as f64 * h }).collect();
        self
    }

    pub fn validate(&self, t0: f64) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidInput(m.to_string()));
        if !(self.epsilon > 0.0) {
            return bad("epsilon must be positive");
        }
        for c in [self.cfl_adv, self.cfl_diff] {
            if !(c > 0.0 && c <= 0.5) {
                return bad("cfl factors must lie in (0, 0.5]");
            }
        }
        if !(self.dt_max > 0.0) {
            return bad("dt_max must be positive");
        }
        if self.t_end < t0 {
            return bad("t_end precedes the initial time");
        }
        if self.snapshot_times.windows(2).any(|w| w[1] < w[0]) {
            return bad("snapshot times must be sorted");
        }
        if self.snapshot_times.iter().any(|&s| s < t0 - 1e-12 || s > self.t_end + 1e-12) {
            return bad("snapshot times must lie in [t0, t_end]");
        }
        Ok(())
    }

    fn dt(&self, dx: f64, max_speed: f64) -> f64 {
        let adv = if max_speed > 0.0 { self.cfl_adv * dx / max_speed } else { f64::INFINITY };
        let diff = self.cfl_diff * dx * dx / (2.0 * self.epsilon);
        self.dt_max.min(adv).min(diff)
    }
}

fn max_speed(model: &SystemModel, values: &[f64]) -> Result<f64> {
    let n = model.n;
    let mut m: f64 = 0.0;
    if n == 1 {
        let mut a = [0.0];
        for u in values.chunks(1) {
            model.matrix_into(u, &mut a);
            m = m.max(a[0].abs());
        }
        return Ok(m);
    }
    for u in values.chunks(n) {
        for l in model.eigenvalues(u)? {
            m = m.max(l.abs());
        }
    }
    Ok(m)
}

/// `−A(u_j) D0 u_j + ε D2 u_j` with constant-extrapolation ghosts.
fn viscous_rhs(model: &SystemModel, eps: f64, dx: f64, u: &[f64], out: &mut [f64], abuf: &mut [f64]) {
    let n = model.n;
    let m = u.len() / n;
    let inv2 = 1.0 / (2.0 * dx);
    let invsq = eps / (dx * dx);
    for j in 0..m {
        let jm = j.saturating_sub(1);
        let jp = (j + 1).min(m - 1);
        let (um, uc, up) = (&u[jm * n..jm * n + n], &u[j * n..j * n + n], &u[jp * n..jp * n + n]);
        model.matrix_into(uc, abuf);
        for r in 0..n {
            let mut adv = 0.0;
            for c in 0..n {
                adv += abuf[r * n + c] * (up[c] - um[c]) * inv2;
            }
            out[j * n + r] = -adv + (up[r] - 2.0 * uc[r] + um[r]) * invsq;
        }
    }
}

fn check_state(model: &SystemModel, u: &[f64], t: f64) -> Result<()> {
    for s in u.chunks(model.n) {
        if s.iter().any(|x| !x.is_finite()) || !model.in_ball(s) {
            return Err(Error::BlowUp { t });
        }
    }
    Ok(())
}

/// Classical RK4 step of `y' = f(t, y)` with scratch buffers.
struct Rk4 {
    k: [Vec<f64>; 4],
    tmp: Vec<f64>,
}

impl Rk4 {
    fn new(len: usize) -> Self {
        Self { k: std::array::from_fn(|_| vec![0.0; len]), tmp: vec![0.0; len] }
    }

    fn step(&mut self, y: &mut [f64], t: f64, dt: f64, f: &mut dyn FnMut(f64, &[f64], &mut [f64])) {
        let len = y.len();
        f(t, y, &mut self.k[0]);
        for i in 0..len {
            self.tmp[i] = y[i] + 0.5 * dt * self.k[0][i];
        }
        f(t + 0.5 * dt, &self.tmp, &mut self.k[1]);
        for i in 0..len {
            self.tmp[i] = y[i] + 0.5 * dt * self.k[1][i];
        }
        f(t + 0.5 * dt, &self.tmp, &mut self.k[2]);
        for i in 0..len {
            self.tmp[i] = y[i] + dt * self.k[2][i];
        }
        f(t + dt, &self.tmp, &mut self.k[3]);
        for i in 0..len {
            y[i] += dt / 6.0 * (self.k[0][i] + 2.0 * self.k[1][i] + 2.0 * self.k[2][i] + self.k[3][i]);
        }
    }
}

/// Integrates `u_t + A(u) u_x = ε u_xx` and returns the requested snapshots.
pub fn solve(model: &SystemModel, u0: &Field, cfg: &SolveConfig) -> Result<Trajectory> {
    solve_observed(model, u0, cfg, &mut |_, _| {})
}

/// As [`solve`], calling `observer(t, values)` after every accepted step.
pub fn solve_observed(
    model: &SystemModel,
    u0: &Field,
    cfg: &SolveConfig,
    observer: &mut dyn FnMut(f64, &[f64]),
) -> Result<Trajectory> {
    cfg.validate(u0.t)?;
    if u0.n != model.n {
        return Err(Error::GridMismatch(format!("field has n={}, model n={}", u0.n, model.n)));
    }
    check_state(model, &u0.values, u0.t)?;
    let n = model.n;
    let dx = u0.grid.dx;
    let mut u = u0.values.clone();
    let mut t = u0.t;
    let mut rk = Rk4::new(u.len());
    let mut abuf = vec![0.0; n * n];
    let mut snaps = Vec::with_capacity(cfg.snapshot_times.len());
    for &target in &cfg.snapshot_times {
        while t < target - 1e-14 * (1.0 + target.abs()) {
            let dt_cfl = cfg.dt(dx, max_speed(model, &u)?);
            if dt_cfl < 1e-12 {
                return Err(Error::StepUnderflow { t, dt: dt_cfl });
            }
            let dt = dt_cfl.min(target - t);
            rk.step(&mut u, t, dt, &mut |_t, y, out| viscous_rhs(model, cfg.epsilon, dx, y, out, &mut abuf));
            t = if dt == target - t { target } else { t + dt };
            check_state(model, &u, t)?;
            observer(t, &u);
        }
        snaps.push(Field { grid: u0.grid, t: target, n, values: u.clone() });
    }
    Ok(Trajectory { snapshots: snaps })
}

/// Integrates the linearised equation
/// `z_t + (A(u) z)_x − ε z_xx = (u_x • A) z − (z • A) u_x`
/// along a stored trajectory, with `u` linear in time between snapshots.
///
/// Snapshots of `u_traj` must be spaced by at most `0.05 ε` over the
/// integration window, so that the interpolation error stays small on the
/// unit-viscosity time scale.
pub fn solve_tangent(model: &SystemModel, u_traj: &Trajectory, z0: &Field, cfg: &SolveConfig) -> Result<Trajectory> {
    cfg.validate(z0.t)?;
    let snaps = &u_traj.snapshots;
    if snaps.is_empty() {
        return Err(Error::GridMismatch("empty trajectory".into()));
    }
    let n = model.n;
    if z0.n != n || snaps.iter().any(|s| !s.grid.same_as(&z0.grid) || s.n != n) {
        return Err(Error::GridMismatch("tangent data and trajectory differ in grid or dimension".into()));
    }
    let t_first = snaps[0].t;
    let t_last = snaps.last().unwrap().t;
    if (z0.t - t_first).abs() > 1e-12 * (1.0 + t_first.abs()) || cfg.t_end > t_last + 1e-12 {
        return Err(Error::GridMismatch(format!(
            "tangent window [{}, {}] not covered by trajectory [{t_first}, {t_last}]",
            z0.t, cfg.t_end
        )));
    }
    let max_gap = 0.05 * cfg.epsilon;
    for w in snaps.windows(2) {
        if w[0].t < cfg.t_end && w[1].t - w[0].t > max_gap * (1.0 + 1e-9) {
            return Err(Error::GridMismatch(format!(
                "snapshot spacing {} exceeds {max_gap}",
                w[1].t - w[0].t
            )));
        }
    }
    let dx = z0.grid.dx;
    let m = z0.grid.m;
    let eps = cfg.epsilon;
    let ux: Vec<Vec<f64>> = snaps.iter().map(|s| s.dx_central()).collect();
    let mut z = z0.values.clone();
    let mut t = z0.t;
    let mut rk = Rk4::new(z.len());
    let mut out_snaps = Vec::new();
    let mut abuf = vec![0.0; n * n];
    let mut dbuf = vec![0.0; n * n];
    let mut us = vec![0.0; n];
    let mut uxs = vec![0.0; n];
    let mut seg = 0usize;
    for &target in &cfg.snapshot_times {
        while t < target - 1e-14 * (1.0 + target.abs()) {
            while seg + 1 < snaps.len() - 1 && snaps[seg + 1].t <= t + 1e-14 {
                seg += 1;
            }
            let (sa, sb) = (&snaps[seg], &snaps[(seg + 1).min(snaps.len() - 1)]);
            let seg_end = if sb.t > sa.t { sb.t } else { f64::INFINITY };
            let dt_cfl = cfg.dt(dx, max_speed(model, &sa.values)?.max(max_speed(model, &sb.values)?));
            if dt_cfl < 1e-12 {
                return Err(Error::StepUnderflow { t, dt: dt_cfl });
            }
            let stop = target.min(seg_end);
            let dt = dt_cfl.min(stop - t);
            let (uxa, uxb) = (&ux[seg], &ux[(seg + 1).min(snaps.len() - 1)]);
            rk.step(&mut z, t, dt, &mut |ts, y, out| {
                let w = if sb.t > sa.t { ((ts - sa.t) / (sb.t - sa.t)).clamp(0.0, 1.0) } else { 0.0 };
                for j in 0..m {
                    for k in 0..n {
                        us[k] = (1.0 - w) * sa.values[j * n + k] + w * sb.values[j * n + k];
                        uxs[k] = (1.0 - w) * uxa[j * n + k] + w * uxb[j * n + k];
                    }
                    let jm = j.saturating_sub(1);
                    let jp = (j + 1).min(m - 1);
                    let zc = &y[j * n..j * n + n];
                    model.matrix_into(&us, &mut abuf);
                    model.directional_into(&us, zc, &mut dbuf);
                    for r in 0..n {
                        let mut acc = 0.0;
                        for c in 0..n {
                            let dz = (y[jp * n + c] - y[jm * n + c]) / (2.0 * dx);
                            acc -= abuf[r * n + c] * dz + dbuf[r * n + c] * uxs[c];
                        }
                        acc += eps * (y[jp * n + r] - 2.0 * zc[r] + y[jm * n + r]) / (dx * dx);
                        out[j * n + r] = acc;
                    }
                }
            });
            t = if dt == stop - t { stop } else { t + dt };
            if z.iter().any(|v| !v.is_finite()) {
                return Err(Error::BlowUp { t });
            }
        }
        out_snaps.push(Field { grid: z0.grid, t: target, n, values: z.clone() });
    }
    Ok(Trajectory { snapshots: out_snaps })
}
