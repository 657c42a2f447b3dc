use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SystemModel;
use crate::numerics::{dot, hermite, norm2};

/// Viscous travelling wave `U(x − σt)` sampled on a uniform grid in `x`,
/// with `U'' = (A(U) − σ) U'`.
#[derive(Debug, Clone, PartialEq)]
pub struct TravellingProfile {
    pub sigma: f64,
    pub family: usize,
    pub xs: Vec<f64>,
    pub u: Vec<Vec<f64>>,
    pub up: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileOptions {
    pub sample_dx: f64,
    pub rtol: f64,
    /// Integration stops once `|U'| < decay · |v_mid|`.
    pub decay: f64,
    /// Growth factor of the unstable directions over one shooting horizon.
    pub amplification: f64,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        Self { sample_dx: 0.05, rtol: 1e-11, decay: 1e-10, amplification: 1e8 }
    }
}

impl TravellingProfile {
    pub fn left_state(&self) -> &[f64] {
        &self.u[0]
    }

    pub fn right_state(&self) -> &[f64] {
        self.u.last().unwrap()
    }

    /// `(U(x), U'(x))` by cubic Hermite interpolation; constant beyond the ends.
    pub fn sample(&self, model: &SystemModel, x: f64) -> (Vec<f64>, Vec<f64>) {
        let n = model.n;
        let last = self.xs.len() - 1;
        if x <= self.xs[0] {
            return (self.u[0].clone(), vec![0.0; n]);
        }
        if x >= self.xs[last] {
            return (self.u[last].clone(), vec![0.0; n]);
        }
        let h = self.xs[1] - self.xs[0];
        let k = (((x - self.xs[0]) / h).floor() as usize).min(last - 1);
        let (x0, x1) = (self.xs[k], self.xs[k + 1]);
        let upp0 = self.second_derivative(model, k);
        let upp1 = self.second_derivative(model, k + 1);
        let u = (0..n)
            .map(|c| hermite(x0, x1, self.u[k][c], self.u[k + 1][c], self.up[k][c], self.up[k + 1][c], x))
            .collect();
        let up = (0..n)
            .map(|c| hermite(x0, x1, self.up[k][c], self.up[k + 1][c], upp0[c], upp1[c], x))
            .collect();
        (u, up)
    }

    fn second_derivative(&self, model: &SystemModel, k: usize) -> Vec<f64> {
        let mut out = model.apply(&self.u[k], &self.up[k]);
        for (o, v) in out.iter_mut().zip(&self.up[k]) {
            *o -= self.sigma * v;
        }
        out
    }

    /// Largest `|Δ²U/h² − (A(U) − σ)U'|` over interior samples.
    pub fn max_residual(&self, model: &SystemModel) -> f64 {
        let h = self.xs[1] - self.xs[0];
        let mut worst: f64 = 0.0;
        for k in 1..self.xs.len() - 1 {
            let rhs = self.second_derivative(model, k);
            for c in 0..model.n {
                let d2 = (self.u[k + 1][c] - 2.0 * self.u[k][c] + self.u[k - 1][c]) / (h * h);
                worst = worst.max((d2 - rhs[c]).abs());
            }
        }
        worst
    }
}

struct Flow<'a> {
    model: &'a SystemModel,
    sigma: f64,
    n: usize,
    rtol: f64,
    atol_v: f64,
}

enum Stop {
    Done,
    /// Left the ball or grew past the guard at this offset.
    Early(f64),
}

impl Flow<'_> {
    fn rhs(&self, y: &[f64], out: &mut [f64]) {
        let n = self.n;
        let (u, v) = y.split_at(n);
        let av = self.model.apply(u, v);
        out[..n].copy_from_slice(v);
        for k in 0..n {
            out[n + k] = av[k] - self.sigma * v[k];
        }
    }

    /// One Fehlberg 4(5) step of signed size `h`; returns the error ratio.
    fn rkf45(&self, y: &[f64], h: f64, out: &mut [f64]) -> f64 {
        let len = y.len();
        let mut k = [vec![0.0; len], vec![0.0; len], vec![0.0; len], vec![0.0; len], vec![0.0; len], vec![0.0; len]];
        let a: [&[f64]; 6] = [
            &[],
            &[0.25],
            &[3.0 / 32.0, 9.0 / 32.0],
            &[1932.0 / 2197.0, -7200.0 / 2197.0, 7296.0 / 2197.0],
            &[439.0 / 216.0, -8.0, 3680.0 / 513.0, -845.0 / 4104.0],
            &[-8.0 / 27.0, 2.0, -3544.0 / 2565.0, 1859.0 / 4104.0, -11.0 / 40.0],
        ];
        let mut tmp = vec![0.0; len];
        for s in 0..6 {
            for c in 0..len {
                tmp[c] = y[c] + h * a[s].iter().enumerate().map(|(r, w)| w * k[r][c]).sum::<f64>();
            }
            self.rhs(&tmp, &mut k[s]);
        }
        let b5 = [16.0 / 135.0, 0.0, 6656.0 / 12825.0, 28561.0 / 56430.0, -9.0 / 50.0, 2.0 / 55.0];
        let b4 = [25.0 / 216.0, 0.0, 1408.0 / 2565.0, 2197.0 / 4104.0, -0.2, 0.0];
        let mut err: f64 = 0.0;
        for c in 0..len {
            let hi: f64 = (0..6).map(|s| b5[s] * k[s][c]).sum();
            let lo: f64 = (0..6).map(|s| b4[s] * k[s][c]).sum();
            out[c] = y[c] + h * hi;
            let atol = if c < self.n { 1e-13 } else { self.atol_v };
            err = err.max((h * (hi - lo)).abs() / (atol + self.rtol * y[c].abs().max(out[c].abs())));
        }
        err
    }

    /// Integrates over the signed length `len`, stopping early when the state
    /// leaves the ball or `|v|` exceeds `guard`.
    fn run(&self, y: &mut Vec<f64>, len: f64, guard: f64) -> Result<Stop> {
        let n = self.n;
        let dir = len.signum();
        let total = len.abs();
        let mut done = 0.0;
        let mut h = (0.05f64).min(total);
        let mut out = vec![0.0; y.len()];
        while done < total {
            let step = h.min(total - done);
            let err = self.rkf45(y, dir * step, &mut out);
            if err <= 1.0 || step < 1e-12 {
                y.copy_from_slice(&out);
                done += step;
                if !self.model.in_ball(&y[..n]) || norm2(&y[n..]) > guard || y.iter().any(|x| !x.is_finite()) {
                    return Ok(Stop::Early(dir * done));
                }
            }
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h = (step * fac).min(1.0);
            if h < 1e-14 {
                return Err(Error::Divergence { x: dir * done });
            }
        }
        Ok(Stop::Done)
    }
}

/// Families `j ≠ i` growing in direction `dir` (`λ_j > σ` forward, `λ_j < σ` backward).
fn unstable(lambdas: &[f64], i: usize, sigma: f64, dir: f64) -> Vec<usize> {
    (0..lambdas.len()).filter(|&j| j != i && dir * (lambdas[j] - sigma) > 0.0).collect()
}

/// Solves for corrections `a_j` (along `r_j(u0)`, `j ∈ dirs`) that remove the
/// unstable growth over `horizon` in every direction of `legs`.
fn shoot(
    flow: &Flow,
    y0: &[f64],
    dirs: &[usize],
    legs: &[(f64, Vec<usize>)],
    horizon_for: &dyn Fn(f64) -> f64,
    vref: f64,
    amplifications: &[f64],
) -> Result<Vec<f64>> {
    let n = flow.n;
    let model = flow.model;
    let spec0 = model.spectrum(&y0[..n])?;
    let k = dirs.len();
    let mut a = vec![0.0; k];
    if k == 0 {
        return Ok(a);
    }
    let start = |a: &[f64]| {
        let mut y = y0.to_vec();
        for (c, &j) in a.iter().zip(dirs) {
            for q in 0..n {
                y[n + q] += c * spec0.right[j][q];
            }
        }
        y
    };
    for &amp in amplifications {
        let horizon = horizon_for(amp);
        let residual = |a: &[f64]| -> Result<Vec<f64>> {
            let y = start(a);
            let mut r = Vec::with_capacity(k);
            for (dir, js) in legs {
                let mut yy = y.clone();
                let stop = flow.run(&mut yy, dir * horizon, 1e6 * vref + 10.0 * flow.model.radius)?;
                let (u, v) = yy.split_at(n);
                let sp = model.spectrum(u).or_else(|_| model.spectrum(&y0[..n]))?;
                let reached = match stop {
                    Stop::Done => horizon,
                    Stop::Early(x) => x.abs(),
                };
                for &j in js {
                    let g = (sp.lambdas[j] - flow.sigma).abs();
                    r.push(dot(&sp.left[j], v) * (g * (horizon - reached)).min(700.0).exp() / amp);
                }
            }
            Ok(r)
        };
        let tol = 1e-14 * vref;
        for _ in 0..30 {
            let r0 = residual(&a)?;
            let rn = r0.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            if rn <= tol {
                break;
            }
            let mut jac = DMatrix::zeros(k, k);
            for c in 0..k {
                let d = 1e-7 * a[c].abs().max(vref / amp);
                let mut ap = a.clone();
                ap[c] += d;
                let rp = residual(&ap)?;
                for r in 0..k {
                    jac[(r, c)] = (rp[r] - r0[r]) / d;
                }
            }
            let rhs = DVector::from_iterator(k, r0.iter().map(|x| -x));
            let Some(step) = jac.lu().solve(&rhs) else { break };
            let mut lam = 1.0;
            let mut improved = false;
            for _ in 0..8 {
                let trial: Vec<f64> = a.iter().zip(step.iter()).map(|(x, s)| x + lam * s).collect();
                let rt = residual(&trial)?;
                if rt.iter().fold(0.0f64, |m, x| m.max(x.abs())) < rn {
                    a = trial;
                    improved = true;
                    break;
                }
                lam *= 0.5;
            }
            if !improved {
                break;
            }
        }
    }
    Ok(a)
}

/// Integrates the travelling-wave system `u' = v`, `v' = (A(u) − σ)v` both
/// ways from `(u_mid, v_mid r_i(u_mid))`, with shooting corrections along the
/// other eigendirections so the orbit stays on the slow manifold of family
/// `i`, until `|v|` decays below `decay · |v_mid|` or `|x|` reaches `span`.
pub fn integrate_profile(
    model: &SystemModel,
    u_mid: &[f64],
    v_mid: f64,
    sigma: f64,
    i: usize,
    span: f64,
) -> Result<TravellingProfile> {
    integrate_profile_with(model, u_mid, v_mid, sigma, i, span, ProfileOptions::default())
}

pub fn integrate_profile_with(
    model: &SystemModel,
    u_mid: &[f64],
    v_mid: f64,
    sigma: f64,
    i: usize,
    span: f64,
    opts: ProfileOptions,
) -> Result<TravellingProfile> {
    let n = model.n;
    let h = opts.sample_dx;
    if v_mid == 0.0 {
        let xs = vec![-h, 0.0, h];
        return Ok(TravellingProfile {
            sigma,
            family: i,
            xs,
            u: vec![u_mid.to_vec(); 3],
            up: vec![vec![0.0; n]; 3],
        });
    }
    let spec = model.spectrum(u_mid)?;
    let vref = v_mid.abs();
    let flow = Flow { model, sigma, n, rtol: opts.rtol, atol_v: 1e-6 * opts.decay * vref };
    let mut y0 = u_mid.to_vec();
    y0.extend(spec.right[i].iter().map(|r| v_mid * r));

    let horizon_at = |u: &[f64], dirs: &[usize]| -> Result<Box<dyn Fn(f64) -> f64>> {
        let l = model.eigenvalues(u)?;
        let g = dirs.iter().map(|&j| (l[j] - sigma).abs()).fold(f64::INFINITY, f64::min);
        Ok(Box::new(move |amp: f64| {
            let x = amp.ln() / g;
            (x / h).ceil().max(2.0) * h
        }))
    };
    let amps: Vec<f64> = [1e2, 1e4, 1e6, opts.amplification]
        .into_iter()
        .filter(|a| *a <= opts.amplification)
        .collect();

    // Joint correction at the midpoint.
    let fwd = unstable(&spec.lambdas, i, sigma, 1.0);
    let bwd = unstable(&spec.lambdas, i, sigma, -1.0);
    let mut all: Vec<usize> = fwd.iter().chain(&bwd).copied().collect();
    all.sort();
    if !all.is_empty() {
        let hz = horizon_at(u_mid, &all)?;
        let legs = vec![(1.0, fwd.clone()), (-1.0, bwd.clone())];
        let a = shoot(&flow, &y0, &all, &legs, &*hz, vref, &amps)?;
        for (c, &j) in a.iter().zip(&all) {
            for q in 0..n {
                y0[n + q] += c * spec.right[j][q];
            }
        }
    }

    let mut sides: Vec<Vec<(f64, Vec<f64>)>> = Vec::new();
    for dir in [1.0, -1.0] {
        let mut samples = Vec::new();
        let mut y = y0.clone();
        let mut x = 0.0;
        let mut first = true;
        loop {
            let u = y[..n].to_vec();
            let l = model.eigenvalues(&u)?;
            let dirs = unstable(&l, i, sigma, dir);
            let seg = if dirs.is_empty() {
                span
            } else {
                let hz = horizon_at(&u, &dirs)?;
                if !first {
                    let legs = vec![(dir, dirs.clone())];
                    let vnow = norm2(&y[n..]).max(1e-300);
                    let a = shoot(&flow, &y, &dirs, &legs, &*hz, vnow, &amps[amps.len() - 1..])?;
                    let sp = model.spectrum(&u)?;
                    for (c, &j) in a.iter().zip(&dirs) {
                        for q in 0..n {
                            y[n + q] += c * sp.right[j][q];
                        }
                    }
                }
                (0.5 * hz(opts.amplification) / h).round().max(1.0) * h
            };
            first = false;
            let steps = ((seg.min(span - x)) / h).round() as usize;
            let mut finished = steps == 0;
            for _ in 0..steps {
                match flow.run(&mut y, dir * h, f64::INFINITY)? {
                    Stop::Done => {}
                    Stop::Early(_) => return Err(Error::Divergence { x: dir * (x + h) }),
                }
                if !model.in_ball(&y[..n]) {
                    return Err(Error::Divergence { x: dir * (x + h) });
                }
                x += h;
                samples.push((dir * x, y.clone()));
                if norm2(&y[n..]) < opts.decay * vref {
                    finished = true;
                    break;
                }
            }
            if finished || x >= span - 0.5 * h {
                break;
            }
        }
        sides.push(samples);
    }
    let mut pts: Vec<(f64, Vec<f64>)> = sides.pop().unwrap().into_iter().rev().collect();
    pts.push((0.0, y0.clone()));
    pts.extend(sides.pop().unwrap());
    let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let u = pts.iter().map(|p| p.1[..n].to_vec()).collect();
    let up = pts.iter().map(|p| p.1[n..].to_vec()).collect();
    Ok(TravellingProfile { sigma, family: i, xs, u, up })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{burgers, nc_toy, p_system};

    #[test]
    fn zero_strength_is_constant() {
        let p = integrate_profile(&p_system(1.4), &[1.0, 0.0], 0.0, -1.0, 0, 10.0).unwrap();
        assert!(p.u.iter().all(|u| u == &vec![1.0, 0.0]));
        assert!(p.up.iter().all(|v| v.iter().all(|x| *x == 0.0)));
    }

    #[test]
    fn burgers_profile_connects_rankine_hugoniot_states() {
        let m = burgers();
        let p = integrate_profile(&m, &[0.5], -0.1, 0.5, 0, 200.0).unwrap();
        let (l, r) = (p.left_state()[0], p.right_state()[0]);
        assert!(l > r);
        assert!((0.5 * (l + r) - 0.5).abs() < 1e-4);
        // Oracle: U' = ((U − 1/2)² − 0.2)/2, so the end states are 1/2 ± √0.2.
        assert!((l - 0.5 - 0.2f64.sqrt()).abs() < 1e-8);
        assert!((r - 0.5 + 0.2f64.sqrt()).abs() < 1e-8);
    }

    #[test]
    fn p_system_small_shock_satisfies_rankine_hugoniot() {
        let m = p_system(1.4);
        let u_mid = [1.0, 0.0];
        let sigma = m.eigenvalues(&u_mid).unwrap()[0];
        let p = integrate_profile(&m, &u_mid, 2e-3, sigma, 0, 600.0).unwrap();
        let (l, r) = (p.left_state().to_vec(), p.right_state().to_vec());
        let (fl, fr) = (m.flux(&l).unwrap(), m.flux(&r).unwrap());
        let jump = crate::numerics::dist2(&l, &r);
        assert!(jump > 0.05, "jump {jump}");
        for k in 0..2 {
            let res = sigma * (r[k] - l[k]) - (fr[k] - fl[k]);
            assert!(res.abs() <= 1e-6, "RH residual {res}");
        }
        assert!(norm2(p.up.last().unwrap()) < 1e-6 * 2e-3 || p.xs.last().unwrap() >= &599.0);
    }

    #[test]
    fn profile_ode_residual_on_fine_samples() {
        let m = nc_toy();
        let opts = ProfileOptions { sample_dx: 1e-3, ..Default::default() };
        // Family 1 (r_1 = e_1, λ_1 = 1 + u2) is linearly degenerate and family 2
        // degenerates at the origin, so move off it.
        let u_mid = [0.1, 0.0];
        let s2 = m.eigenvalues(&u_mid).unwrap()[1];
        let p = integrate_profile_with(&m, &u_mid, -0.02, s2, 1, 5.0, opts).unwrap();
        assert!(p.max_residual(&m) <= 1e-8, "residual {}", p.max_residual(&m));
    }

    #[test]
    fn wrong_orientation_diverges() {
        let m = burgers();
        let err = integrate_profile(&m, &[0.5], 0.1, 0.5, 0, 200.0).unwrap_err();
        assert!(matches!(err, Error::Divergence { .. }));
    }
}
