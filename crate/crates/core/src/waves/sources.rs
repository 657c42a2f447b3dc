use serde::Serialize;

use super::decomposition::{decompose_field, eigen_components, DecompParams, Decomposition};
use crate::error::{Error, Result};
use crate::model::SystemModel;
use crate::viscous::Field;

/// Integrated absolute residuals of the component equations, per family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SourceReport {
    /// `∫|v_t + (λ̃ v)_x − v_xx|`.
    pub phi: Vec<f64>,
    /// `∫|w_t + (λ̃ w)_x − w_xx|`.
    pub psi: Vec<f64>,
    /// Same operator applied to `l_i · u_x` with speed `λ_i(u)`.
    pub phi_eigen: Vec<f64>,
}

impl SourceReport {
    pub fn total_phi(&self) -> f64 {
        self.phi.iter().sum()
    }

    pub fn total_phi_eigen(&self) -> f64 {
        self.phi_eigen.iter().sum()
    }
}

/// `∫ |a_t + (c a)_x − a_xx| dx` at the middle of three equally spaced
/// samples, over interior cells.
fn residual(prev: &[f64], mid: &[f64], next: &[f64], speed: &[f64], dt: f64, dx: f64) -> f64 {
    let m = mid.len();
    let mut s = 0.0;
    for j in 1..m - 1 {
        let at = (next[j] - prev[j]) / (2.0 * dt);
        let flux = (speed[j + 1] * mid[j + 1] - speed[j - 1] * mid[j - 1]) / (2.0 * dx);
        let diff = (mid[j + 1] - 2.0 * mid[j] + mid[j - 1]) / (dx * dx);
        s += (at + flux - diff).abs() * dx;
    }
    s
}

/// Residuals of the travelling-wave decomposition and of the plain
/// eigenvector projection, both in unit-viscosity variables. The three
/// snapshots must be equally spaced in time.
pub fn source_residuals(model: &SystemModel, snaps: [&Field; 3], eps: f64, p: &DecompParams) -> Result<SourceReport> {
    let (a, b, c) = (snaps[0], snaps[1], snaps[2]);
    if !(a.grid.same_as(&b.grid) && b.grid.same_as(&c.grid)) {
        return Err(Error::GridMismatch("source residuals need a common grid".into()));
    }
    let (h1, h2) = (b.t - a.t, c.t - b.t);
    if !(h1 > 0.0) || (h1 - h2).abs() > 1e-9 * h1 {
        return Err(Error::GridMismatch("snapshots must be equally spaced in time".into()));
    }
    let dt = h1 / eps;
    let dx = a.grid.dx / eps;
    let n = model.n;
    let d: Vec<Decomposition> = snaps
        .iter()
        .map(|f| decompose_field(model, f, eps, p))
        .collect::<Result<_>>()?;
    let e: Vec<Vec<f64>> = snaps.iter().map(|f| eigen_components(model, f)).collect::<Result<_>>()?;
    let mut lam_mid = vec![0.0; b.grid.m * n];
    for j in 0..b.grid.m {
        let l = model.eigenvalues(b.state(j))?;
        lam_mid[j * n..(j + 1) * n].copy_from_slice(&l);
    }
    let mut rep = SourceReport { phi: vec![], psi: vec![], phi_eigen: vec![] };
    let pick = |v: &[f64], i: usize| -> Vec<f64> { v.iter().skip(i).step_by(n).copied().collect() };
    for i in 0..n {
        let speed = d[1].family_speed(i);
        rep.phi.push(residual(&d[0].family(i), &d[1].family(i), &d[2].family(i), &speed, dt, dx));
        rep.psi.push(residual(&d[0].family_w(i), &d[1].family_w(i), &d[2].family_w(i), &speed, dt, dx));
        let scale = |v: Vec<f64>| -> Vec<f64> { v.into_iter().map(|x| eps * x).collect() };
        rep.phi_eigen.push(residual(
            &scale(pick(&e[0], i)),
            &scale(pick(&e[1], i)),
            &scale(pick(&e[2], i)),
            &pick(&lam_mid, i),
            dt,
            dx,
        ));
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::p_system;
    use crate::viscous::Grid1D;

    #[test]
    fn constant_solution_has_no_sources() {
        let g = Grid1D::new(0.0, 0.1, 20).unwrap();
        let f = |t| Field::constant(g, t, &[1.05, 0.01]);
        let r = source_residuals(&p_system(1.4), [&f(0.0), &f(0.1), &f(0.2)], 0.1, &DecompParams::default()).unwrap();
        assert!(r.phi.iter().chain(&r.psi).chain(&r.phi_eigen).all(|x| *x == 0.0));
    }

    #[test]
    fn uneven_spacing_is_rejected() {
        let g = Grid1D::new(0.0, 0.1, 20).unwrap();
        let f = |t| Field::constant(g, t, &[1.05, 0.01]);
        assert!(source_residuals(&p_system(1.4), [&f(0.0), &f(0.1), &f(0.3)], 0.1, &DecompParams::default()).is_err());
    }
}
