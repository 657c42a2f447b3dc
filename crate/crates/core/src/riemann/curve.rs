use serde::{Deserialize, Serialize};

use super::envelope::lower_convex_envelope;
use crate::error::{Error, Result};
use crate::model::SystemModel;
use crate::numerics::{cumtrapz, dist2};
use crate::waves::rtilde_with;

/// Tunables of the wave-curve construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiemannParams {
    /// Number of curve intervals.
    pub m: usize,
    /// Radius of the ball the curves must stay in; also the weight of `σ` in
    /// the curve distance.
    pub eps_gamma: f64,
    pub s_max: f64,
    pub max_jump: f64,
    pub fixed_tol: f64,
    pub max_iter: usize,
    pub newton_tol: f64,
    pub jac_step: f64,
    pub max_halvings: usize,
    pub lax_tol: f64,
}

impl Default for RiemannParams {
    fn default() -> Self {
        Self {
            m: 400,
            eps_gamma: 0.3,
            s_max: 0.15,
            max_jump: 0.1,
            fixed_tol: 1e-10,
            max_iter: 200,
            newton_tol: 1e-9,
            jac_step: 1e-6,
            max_halvings: 8,
            lax_tol: 1e-3,
        }
    }
}

impl RiemannParams {
    /// Defaults, widened to the whole validity ball for scalar models where
    /// the construction is exact for any strength.
    pub fn for_model(model: &SystemModel) -> Self {
        let mut p = Self::default();
        if model.n == 1 {
            p.eps_gamma = 2.0 * model.radius;
            p.s_max = 2.0 * model.radius;
            p.max_jump = 2.0 * model.radius;
        }
        p
    }
}

/// Discrete curve `τ ↦ (u(τ), v(τ), σ(τ))` on `τ_k = k s / M`.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaCurve {
    pub family: usize,
    pub s: f64,
    pub u: Vec<Vec<f64>>,
    pub v: Vec<f64>,
    pub sigma: Vec<f64>,
    /// `h(t) = ∫_0^t λ̃` in the unsigned parameter `t = |τ|`, as produced by
    /// the last application of the map (empty for an initial guess).
    pub h: Vec<f64>,
}

impl GammaCurve {
    pub fn nodes(&self) -> usize {
        self.u.len()
    }

    pub fn taus(&self) -> Vec<f64> {
        let m = (self.nodes() - 1).max(1) as f64;
        (0..self.nodes()).map(|k| k as f64 * self.s / m).collect()
    }

    pub fn endpoint(&self) -> &[f64] {
        self.u.last().unwrap()
    }

    fn sign(&self) -> f64 {
        if self.s < 0.0 {
            -1.0
        } else {
            1.0
        }
    }

    /// Signed flux `f(τ_k) = ∫_0^{τ_k} λ̃` from the stored `h`.
    pub fn flux_values(&self) -> Vec<f64> {
        self.h.iter().map(|x| self.sign() * x).collect()
    }

    /// `‖u‖_∞ + ‖v‖_∞ + w ‖σ‖_∞` of the difference of two curves on the same nodes.
    pub fn distance(&self, other: &GammaCurve, weight: f64) -> f64 {
        assert_eq!(self.nodes(), other.nodes());
        let mut du: f64 = 0.0;
        let mut dv: f64 = 0.0;
        let mut ds: f64 = 0.0;
        for k in 0..self.nodes() {
            du = du.max(dist2(&self.u[k], &other.u[k]));
            dv = dv.max((self.v[k] - other.v[k]).abs());
            ds = ds.max((self.sigma[k] - other.sigma[k]).abs());
        }
        du + dv + weight * ds
    }

    /// Starting guess: the straight segment along `r_i(u⁻)` at speed `λ_i(u⁻)`.
    pub fn initial(model: &SystemModel, u_minus: &[f64], i: usize, s: f64, m: usize) -> Result<Self> {
        let spec = model.spectrum(u_minus)?;
        let nodes = if s == 0.0 { 1 } else { m + 1 };
        let u = (0..nodes)
            .map(|k| {
                let tau = if s == 0.0 { 0.0 } else { k as f64 * s / m as f64 };
                u_minus.iter().zip(&spec.right[i]).map(|(a, r)| a + tau * r).collect()
            })
            .collect();
        Ok(Self {
            family: i,
            s,
            u,
            v: vec![0.0; nodes],
            sigma: vec![spec.lambdas[i]; nodes],
            h: vec![],
        })
    }
}

fn speeds_and_vectors(model: &SystemModel, curve: &GammaCurve) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let mut lt = Vec::with_capacity(curve.nodes());
    let mut rt = Vec::with_capacity(curve.nodes());
    for k in 0..curve.nodes() {
        let u = &curve.u[k];
        let spec = model.spectrum(u)?;
        let (r, l) = rtilde_with(model, u, &spec, curve.v[k], curve.sigma[k], curve.family)?;
        lt.push(l);
        rt.push(r);
    }
    Ok((lt, rt))
}

/// `h(t_k) = ∫_0^{t_k} λ̃(u, v, σ)` on the unsigned parameter; the signed
/// flux is `sign(s) h`.
pub fn flux_integral(model: &SystemModel, curve: &GammaCurve) -> Result<Vec<f64>> {
    if curve.nodes() == 1 {
        return Ok(vec![0.0]);
    }
    let (lt, _) = speeds_and_vectors(model, curve)?;
    let dt = curve.s.abs() / (curve.nodes() - 1) as f64;
    let h = cumtrapz(&lt, dt);
    let sg = if curve.s < 0.0 { -1.0 } else { 1.0 };
    Ok(h.into_iter().map(|x| sg * x).collect())
}

/// One application of the map whose fixed point is the `i`-wave curve:
/// `û = u⁻ + ∫ r̃`, `v̂ = f − conv f`, `σ̂ = (conv f)'`, with the concave
/// envelope in place of the convex one when `s < 0`.
pub fn t_step(model: &SystemModel, u_minus: &[f64], curve: &GammaCurve, p: &RiemannParams) -> Result<GammaCurve> {
    let nodes = curve.nodes();
    let i = curve.family;
    let lam0 = model.eigenvalues(u_minus)?[i];
    if nodes == 1 {
        return Ok(GammaCurve { family: i, s: curve.s, u: vec![u_minus.to_vec()], v: vec![0.0], sigma: vec![lam0], h: vec![0.0] });
    }
    let n = model.n;
    let sg = if curve.s < 0.0 { -1.0 } else { 1.0 };
    let dt = curve.s.abs() / (nodes - 1) as f64;
    let (lt, rt) = speeds_and_vectors(model, curve)?;
    // In t = |τ| the concave envelope of f becomes the convex envelope of h.
    let h = cumtrapz(&lt, dt);
    let ts: Vec<f64> = (0..nodes).map(|k| k as f64 * dt).collect();
    let (conv, slope) = lower_convex_envelope(&ts, &h);
    let mut u = Vec::with_capacity(nodes);
    let mut acc = u_minus.to_vec();
    u.push(acc.clone());
    for k in 1..nodes {
        for c in 0..n {
            acc[c] += sg * 0.5 * dt * (rt[k - 1][c] + rt[k][c]);
        }
        u.push(acc.clone());
    }
    let v: Vec<f64> = h.iter().zip(&conv).map(|(a, b)| sg * (a - b)).collect();
    let out = GammaCurve { family: i, s: curve.s, u, v, sigma: slope, h };
    let du = out.u.iter().map(|x| dist2(x, u_minus)).fold(0.0, f64::max);
    let dv = out.v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let ds = out.sigma.iter().fold(0.0f64, |m, x| m.max((x - lam0).abs()));
    let worst = du.max(dv).max(ds);
    if worst > p.eps_gamma {
        return Err(Error::LeftBall { radius: p.eps_gamma, distance: worst });
    }
    Ok(out)
}

/// Fixed point of [`t_step`] started from the straight segment.
pub fn wave_curve(model: &SystemModel, u_minus: &[f64], i: usize, s: f64, p: &RiemannParams) -> Result<GammaCurve> {
    if s.abs() > p.s_max {
        return Err(Error::InvalidInput(format!("wave strength {s} exceeds s_max = {}", p.s_max)));
    }
    let mut g = GammaCurve::initial(model, u_minus, i, s, p.m)?;
    if s == 0.0 {
        return t_step(model, u_minus, &g, p);
    }
    let mut prev_d = f64::NAN;
    let mut ratio = f64::NAN;
    for _ in 0..p.max_iter {
        let next = t_step(model, u_minus, &g, p)?;
        let d = next.distance(&g, p.eps_gamma);
        if prev_d.is_finite() && prev_d > 0.0 {
            ratio = d / prev_d;
        }
        g = next;
        if d <= p.fixed_tol {
            return Ok(g);
        }
        prev_d = d;
    }
    Err(Error::NoConvergence { ratio })
}

/// Right state `Ψ_i(s)(u⁻)` reached by an `i`-wave of strength `s`.
pub fn psi(model: &SystemModel, u_minus: &[f64], i: usize, s: f64, p: &RiemannParams) -> Result<Vec<f64>> {
    Ok(wave_curve(model, u_minus, i, s, p)?.endpoint().to_vec())
}
