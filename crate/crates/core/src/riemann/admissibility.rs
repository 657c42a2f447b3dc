use serde::Serialize;

use super::fan::WaveFan;
use crate::error::{Error, Result};
use crate::model::SystemModel;
use crate::numerics::norm2;

/// `λ (u⁺ − u⁻) − (f(u⁺) − f(u⁻))`.
pub fn rankine_hugoniot_residual(model: &SystemModel, u_minus: &[f64], u_plus: &[f64], lambda: f64) -> Result<Vec<f64>> {
    let fm = model.flux(u_minus).ok_or(Error::NoFlux)?;
    let fp = model.flux(u_plus).ok_or(Error::NoFlux)?;
    Ok((0..model.n).map(|k| lambda * (u_plus[k] - u_minus[k]) - (fp[k] - fm[k])).collect())
}

/// A maximal run of equal envelope slopes inside one family curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Shock {
    pub family: usize,
    /// Node range `[k_a, k_b]` on the curve.
    pub nodes: (usize, usize),
    pub u_minus: Vec<f64>,
    pub u_plus: Vec<f64>,
    pub sigma: f64,
}

/// Shocks of a fan: maximal runs of at least two consecutive curve segments
/// sharing the same speed.
pub fn shocks(fan: &WaveFan) -> Vec<Shock> {
    let mut out = Vec::new();
    for c in &fan.curves {
        let m = c.nodes();
        if m < 3 {
            continue;
        }
        let same = |a: f64, b: f64| (a - b).abs() <= 1e-10 * (1.0 + a.abs());
        let mut k = 1;
        while k < m {
            let mut e = k;
            while e + 1 < m && same(c.sigma[e + 1], c.sigma[k]) {
                e += 1;
            }
            if e > k {
                out.push(Shock {
                    family: c.family,
                    nodes: (k - 1, e),
                    u_minus: c.u[k - 1].clone(),
                    u_plus: c.u[e].clone(),
                    sigma: c.sigma[k],
                });
            }
            k = e + 1;
        }
    }
    out
}

/// Whether family `i` is genuinely nonlinear at `u` (`|∇λ_i · r_i| > 1e-6`).
pub fn genuinely_nonlinear(model: &SystemModel, u: &[f64], i: usize) -> Result<bool> {
    let spec = model.spectrum(u)?;
    let h = 1e-5;
    let up: Vec<f64> = u.iter().zip(&spec.right[i]).map(|(a, r)| a + h * r).collect();
    let um: Vec<f64> = u.iter().zip(&spec.right[i]).map(|(a, r)| a - h * r).collect();
    let d = (model.eigenvalues(&up)?[i] - model.eigenvalues(&um)?[i]) / (2.0 * h);
    Ok(d.abs() > 1e-6)
}

/// `λ_i(u⁺) ≤ σ + tol ≤ λ_i(u⁻) + 2 tol`.
pub fn lax_holds(model: &SystemModel, i: usize, u_minus: &[f64], u_plus: &[f64], sigma: f64, tol: f64) -> Result<bool> {
    let lm = model.eigenvalues(u_minus)?[i];
    let lp = model.eigenvalues(u_plus)?[i];
    Ok(lp <= sigma + tol && sigma + tol <= lm + 2.0 * tol)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShockCheck {
    pub shock: Shock,
    /// Smallest `chord slope − σ` over intermediate nodes (≥ 0 when Liu holds).
    pub liu_margin: f64,
    pub liu: bool,
    /// `None` for families that are not genuinely nonlinear.
    pub lax: Option<bool>,
    pub rh_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdmissibilityReport {
    pub checks: Vec<ShockCheck>,
    pub passed: bool,
}

/// Liu and Lax checks on every shock of the fan.
///
/// Liu is read off the flux stored with each curve: on `[t_a, t_b]` every
/// chord slope from the left end must be at least the shock speed. Lax is
/// only applied to genuinely nonlinear families.
pub fn check_admissibility(fan: &WaveFan, model: &SystemModel, lax_tol: f64) -> Result<AdmissibilityReport> {
    let env_tol = 1e-9;
    let mut checks = Vec::new();
    for sh in shocks(fan) {
        let c = &fan.curves[sh.family];
        let (a, b) = sh.nodes;
        let dt = c.s.abs() / (c.nodes() - 1) as f64;
        let mut margin = f64::INFINITY;
        if c.h.len() == c.nodes() {
            for k in a + 1..b {
                let chord = (c.h[k] - c.h[a]) / ((k - a) as f64 * dt);
                margin = margin.min(chord - sh.sigma);
            }
        }
        let liu = margin >= -env_tol * (1.0 + sh.sigma.abs());
        let lax = if genuinely_nonlinear(model, &sh.u_minus, sh.family)? {
            Some(lax_holds(model, sh.family, &sh.u_minus, &sh.u_plus, sh.sigma, lax_tol)?)
        } else {
            None
        };
        let rh = if model.has_flux() {
            Some(norm2(&rankine_hugoniot_residual(model, &sh.u_minus, &sh.u_plus, sh.sigma)?))
        } else {
            None
        };
        checks.push(ShockCheck { shock: sh, liu_margin: margin, liu, lax, rh_residual: rh });
    }
    let passed = checks.iter().all(|c| c.liu && c.lax.unwrap_or(true));
    Ok(AdmissibilityReport { checks, passed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{burgers, nc_toy, p_system};
    use crate::riemann::{solve_riemann, RiemannParams};

    #[test]
    fn rankine_hugoniot_examples() {
        let m = burgers();
        assert_eq!(rankine_hugoniot_residual(&m, &[0.4], &[0.4], 3.0).unwrap(), vec![0.0]);
        assert_eq!(rankine_hugoniot_residual(&m, &[1.0], &[0.0], 0.5).unwrap(), vec![0.0]);
        assert!((rankine_hugoniot_residual(&m, &[1.0], &[0.0], 0.6).unwrap()[0] + 0.1).abs() < 1e-15);
        assert_eq!(rankine_hugoniot_residual(&nc_toy(), &[0.0, 0.0], &[0.1, 0.0], 1.0), Err(Error::NoFlux));
    }

    #[test]
    fn burgers_shock_is_admissible_and_rarefaction_has_no_shock() {
        let m = burgers();
        let p = RiemannParams::for_model(&m);
        let f = solve_riemann(&m, &[1.0], &[0.0], &p).unwrap();
        let r = check_admissibility(&f, &m, 1e-3).unwrap();
        assert_eq!(r.checks.len(), 1);
        assert!(r.passed && r.checks[0].lax == Some(true));
        assert!(r.checks[0].rh_residual.unwrap() < 1e-12);
        let g = solve_riemann(&m, &[0.0], &[1.0], &p).unwrap();
        let r = check_admissibility(&g, &m, 1e-3).unwrap();
        assert!(r.checks.is_empty() && r.passed);
    }

    #[test]
    fn expansive_jump_fails_lax() {
        assert!(!lax_holds(&burgers(), 0, &[0.0], &[1.0], 0.5, 1e-3).unwrap());
        assert!(lax_holds(&burgers(), 0, &[1.0], &[0.0], 0.5, 1e-3).unwrap());
    }

    #[test]
    fn p_system_shocks_are_nearly_rankine_hugoniot() {
        let m = p_system(1.4);
        let um = [1.0, 0.0];
        // Compressive 1-wave: strength of the sign opposite to ∇λ_1·r_1.
        let f = solve_riemann(&m, &um, &[1.0 - 0.04, 0.06], &RiemannParams::default()).unwrap();
        let r = check_admissibility(&f, &m, 1e-3).unwrap();
        assert!(!r.checks.is_empty());
        assert!(r.passed);
        for c in &r.checks {
            let s = crate::numerics::dist2(&c.shock.u_minus, &c.shock.u_plus);
            assert!(c.rh_residual.unwrap() <= 5e-3 * s, "{} vs {}", c.rh_residual.unwrap(), s);
        }
    }
}
