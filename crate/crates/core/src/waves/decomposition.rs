use std::io::Write;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::center::rtilde_with;
use super::cutoff::{theta, CutoffParams};
use crate::error::{Error, Result};
use crate::model::{Spectrum, SystemModel};
use crate::viscous::{Field, Grid1D};

/// Tunables of the gradient decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecompParams {
    pub cutoff: CutoffParams,
    /// Regularisation of the ratio `w/v`.
    pub eta: f64,
    pub newton_tol: f64,
    pub max_iter: usize,
    pub jet_bound: f64,
    pub fd_step: f64,
    pub max_halvings: usize,
}

impl Default for DecompParams {
    fn default() -> Self {
        Self {
            cutoff: CutoffParams::default(),
            eta: 1e-12,
            newton_tol: 1e-11,
            max_iter: 50,
            jet_bound: 0.2,
            fd_step: 1e-7,
            max_halvings: 8,
        }
    }
}

/// Per-family quantities attached to one jet `(u, v, w)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Components {
    pub sigma: Vec<f64>,
    pub rtilde: Vec<Vec<f64>>,
    pub lambdatilde: Vec<f64>,
}

/// `σ_i = λ_i* − θ(w_i/v_i)` with the ratio regularised as `w v/(v² + η²)`.
pub fn speed(lambda_star: f64, v: f64, w: f64, p: &DecompParams) -> f64 {
    if v.abs() <= p.eta && w.abs() <= p.eta {
        return lambda_star;
    }
    lambda_star - theta(w * v / (v * v + p.eta * p.eta), p.cutoff)
}

pub fn components(
    model: &SystemModel,
    u: &[f64],
    spec: &Spectrum,
    lstar: &[f64],
    v: &[f64],
    w: &[f64],
    p: &DecompParams,
) -> Result<Components> {
    let n = model.n;
    let mut sigma = Vec::with_capacity(n);
    let mut rt = Vec::with_capacity(n);
    let mut lt = Vec::with_capacity(n);
    for i in 0..n {
        let s = speed(lstar[i], v[i], w[i], p);
        let (r, l) = if v[i].abs() <= p.eta && w[i].abs() <= p.eta {
            (spec.right[i].clone(), spec.lambdas[i])
        } else {
            rtilde_with(model, u, spec, v[i], s, i)?
        };
        sigma.push(s);
        rt.push(r);
        lt.push(l);
    }
    Ok(Components { sigma, rtilde: rt, lambdatilde: lt })
}

fn forward_with(
    model: &SystemModel,
    u: &[f64],
    spec: &Spectrum,
    lstar: &[f64],
    v: &[f64],
    w: &[f64],
    p: &DecompParams,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = model.n;
    let c = components(model, u, spec, lstar, v, w, p)?;
    let mut ux = vec![0.0; n];
    let mut ut = vec![0.0; n];
    for i in 0..n {
        for k in 0..n {
            ux[k] += v[i] * c.rtilde[i][k];
            ut[k] += (w[i] - lstar[i] * v[i]) * c.rtilde[i][k];
        }
    }
    Ok((ux, ut))
}

/// `(v, w) ↦ (u_x, u_t) = (Σ v_i r̃_i, Σ (w_i − λ_i* v_i) r̃_i)`.
pub fn lambda_forward(model: &SystemModel, u: &[f64], v: &[f64], w: &[f64], p: &DecompParams) -> Result<(Vec<f64>, Vec<f64>)> {
    let spec = model.spectrum(u)?;
    let lstar = model.eigenvalues(&model.u_star)?;
    forward_with(model, u, &spec, &lstar, v, w, p)
}

/// Components `(v, w)` of one jet.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub v: Vec<f64>,
    pub w: Vec<f64>,
}

fn inf_norm(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Newton inverse of [`lambda_forward`].
pub fn decompose_jet(model: &SystemModel, u: &[f64], ux: &[f64], ut: &[f64], p: &DecompParams) -> Result<Jet> {
    let spec = model.spectrum(u)?;
    let lstar = model.eigenvalues(&model.u_star)?;
    decompose_jet_with(model, u, &spec, &lstar, ux, ut, p)
}

fn decompose_jet_with(
    model: &SystemModel,
    u: &[f64],
    spec: &Spectrum,
    lstar: &[f64],
    ux: &[f64],
    ut: &[f64],
    p: &DecompParams,
) -> Result<Jet> {
    let n = model.n;
    if crate::numerics::norm2(ux) > p.jet_bound || crate::numerics::norm2(ut) > p.jet_bound {
        return Err(Error::InvalidInput(format!("jet exceeds the bound {}", p.jet_bound)));
    }
    let v0 = spec.project(ux);
    let wt = spec.project(ut);
    let mut x: Vec<f64> = v0.clone();
    x.extend((0..n).map(|i| wt[i] + lstar[i] * v0[i]));
    let target: Vec<f64> = ux.iter().chain(ut).copied().collect();
    let resid = |x: &[f64]| -> Result<Vec<f64>> {
        let (a, b) = forward_with(model, u, spec, lstar, &x[..n], &x[n..], p)?;
        Ok(a.iter().chain(&b).zip(&target).map(|(y, t)| y - t).collect())
    };
    let mut r = resid(&x)?;
    let mut rn = inf_norm(&r);
    let mut it = 0;
    while rn > p.newton_tol {
        if it == p.max_iter {
            return Err(Error::NewtonStall { residual: rn, cell: None });
        }
        it += 1;
        let dim = 2 * n;
        let mut jac = DMatrix::zeros(dim, dim);
        for c in 0..dim {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[c] += p.fd_step;
            xm[c] -= p.fd_step;
            let (rp, rm) = (resid(&xp)?, resid(&xm)?);
            for row in 0..dim {
                jac[(row, c)] = (rp[row] - rm[row]) / (2.0 * p.fd_step);
            }
        }
        let rhs = DVector::from_iterator(dim, r.iter().map(|v| -v));
        let step = jac.lu().solve(&rhs).ok_or(Error::NewtonStall { residual: rn, cell: None })?;
        let mut lam = 1.0;
        let mut accepted = false;
        for _ in 0..=p.max_halvings {
            let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, s)| a + lam * s).collect();
            let rt = resid(&trial)?;
            let rtn = inf_norm(&rt);
            if rtn < rn {
                x = trial;
                r = rt;
                rn = rtn;
                accepted = true;
                break;
            }
            lam *= 0.5;
        }
        if !accepted {
            return Err(Error::NewtonStall { residual: rn, cell: None });
        }
    }
    Ok(Jet { v: x[..n].to_vec(), w: x[n..].to_vec() })
}

/// Per-cell decomposition of a snapshot, in unit-viscosity variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    /// Grid in unit-viscosity coordinates.
    pub grid: Grid1D,
    pub n: usize,
    /// `v[j*n + i]`.
    pub v: Vec<f64>,
    pub w: Vec<f64>,
    pub sigma: Vec<f64>,
    pub lambdatilde: Vec<f64>,
    /// `rtilde[(j*n + i)*n + k]`.
    pub rtilde: Vec<f64>,
    pub lambda_star: Vec<f64>,
}

impl Decomposition {
    pub fn family(&self, i: usize) -> Vec<f64> {
        self.v.iter().skip(i).step_by(self.n).copied().collect()
    }

    pub fn family_w(&self, i: usize) -> Vec<f64> {
        self.w.iter().skip(i).step_by(self.n).copied().collect()
    }

    pub fn family_speed(&self, i: usize) -> Vec<f64> {
        self.lambdatilde.iter().skip(i).step_by(self.n).copied().collect()
    }

    pub fn rtilde(&self, j: usize, i: usize) -> &[f64] {
        let n = self.n;
        &self.rtilde[(j * n + i) * n..(j * n + i + 1) * n]
    }

    /// CSV with header `x,i,v_i,w_i,sigma_i,lambdatilde_i` (family index from 1).
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["x", "i", "v_i", "w_i", "sigma_i", "lambdatilde_i"])?;
        for j in 0..self.grid.m {
            for i in 0..self.n {
                let k = j * self.n + i;
                wr.write_record([
                    self.grid.x(j).to_string(),
                    (i + 1).to_string(),
                    self.v[k].to_string(),
                    self.w[k].to_string(),
                    self.sigma[k].to_string(),
                    self.lambdatilde[k].to_string(),
                ])?;
            }
        }
        wr.flush()?;
        Ok(())
    }
}

/// Decomposes every cell of a snapshot of the viscous problem with viscosity
/// `eps`. Derivatives are central differences; the jet is taken in
/// unit-viscosity variables, `(ε u_x, ε² u_xx − ε A(u) u_x)`.
pub fn decompose_field(model: &SystemModel, snapshot: &Field, eps: f64, p: &DecompParams) -> Result<Decomposition> {
    let n = model.n;
    let m = snapshot.grid.m;
    let ux = snapshot.dx_central();
    let uxx = snapshot.dxx_central();
    let lstar = model.eigenvalues(&model.u_star)?;
    let mut out = Decomposition {
        grid: Grid1D { x0: snapshot.grid.x0 / eps, dx: snapshot.grid.dx / eps, m },
        n,
        v: vec![0.0; m * n],
        w: vec![0.0; m * n],
        sigma: vec![0.0; m * n],
        lambdatilde: vec![0.0; m * n],
        rtilde: vec![0.0; m * n * n],
        lambda_star: lstar.clone(),
    };
    for j in 0..m {
        let u = snapshot.state(j);
        let spec = model.spectrum(u)?;
        let p1: Vec<f64> = ux[j * n..(j + 1) * n].iter().map(|d| eps * d).collect();
        let au = model.apply(u, &ux[j * n..(j + 1) * n]);
        let q1: Vec<f64> = (0..n).map(|k| eps * eps * uxx[j * n + k] - eps * au[k]).collect();
        let jet = decompose_jet_with(model, u, &spec, &lstar, &p1, &q1, p).map_err(|e| match e {
            Error::NewtonStall { residual, .. } => Error::NewtonStall { residual, cell: Some(j) },
            other => other,
        })?;
        let c = components(model, u, &spec, &lstar, &jet.v, &jet.w, p)?;
        for i in 0..n {
            let k = j * n + i;
            out.v[k] = jet.v[i];
            out.w[k] = jet.w[i];
            out.sigma[k] = c.sigma[i];
            out.lambdatilde[k] = c.lambdatilde[i];
            out.rtilde[k * n..(k + 1) * n].copy_from_slice(&c.rtilde[i]);
        }
    }
    Ok(out)
}

/// Projections `l_i(u) · u_x` per cell (`[j*n + i]`), in the snapshot's own units.
pub fn eigen_components(model: &SystemModel, snapshot: &Field) -> Result<Vec<f64>> {
    let n = model.n;
    let ux = snapshot.dx_central();
    let mut out = vec![0.0; ux.len()];
    for j in 0..snapshot.grid.m {
        let spec = model.spectrum(snapshot.state(j))?;
        let c = spec.project(&ux[j * n..(j + 1) * n]);
        out[j * n..(j + 1) * n].copy_from_slice(&c);
    }
    Ok(out)
}
