//! System definitions `u_t + A(u) u_x = ε u_xx`, eigen-decompositions and
//! the registry of built-in benchmark systems.

mod builtins;
mod spectrum;

pub use builtins::{builtin_models, burgers, linear2, lookup, nc_toy, p_system, MODEL_NAMES};
pub use spectrum::{check_strict_hyperbolicity, GapReport, Spectrum};

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numerics::{dist2, norm2};

/// `u ↦ A(u)` written row-major into an `n*n` buffer.
pub type MatrixFn = Arc<dyn Fn(&[f64], &mut [f64]) + Send + Sync>;
/// `u ↦ f(u)` written into an `n` buffer.
pub type FluxFn = Arc<dyn Fn(&[f64], &mut [f64]) + Send + Sync>;
/// `(u, z) ↦ (z • A)(u)`, the derivative of `A` at `u` in direction `z`.
pub type DirectionalFn = Arc<dyn Fn(&[f64], &[f64], &mut [f64]) + Send + Sync>;

/// A strictly hyperbolic system on a ball around a reference state.
#[derive(Clone)]
pub struct SystemModel {
    pub name: String,
    pub n: usize,
    matrix: MatrixFn,
    flux: Option<FluxFn>,
    directional: Option<DirectionalFn>,
    pub u_star: Vec<f64>,
    pub radius: f64,
    /// Minimal admissible gap between consecutive eigenvalues.
    pub gap_tol: f64,
}

impl fmt::Debug for SystemModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SystemModel")
            .field("name", &self.name)
            .field("n", &self.n)
            .field("flux", &self.flux.is_some())
            .field("u_star", &self.u_star)
            .field("radius", &self.radius)
            .finish()
    }
}

impl SystemModel {
    pub fn new(name: impl Into<String>, n: usize, matrix: MatrixFn, u_star: Vec<f64>, radius: f64) -> Self {
        assert!((1..=4).contains(&n), "dimension must be between 1 and 4");
        assert_eq!(u_star.len(), n);
        Self {
            name: name.into(),
            n,
            matrix,
            flux: None,
            directional: None,
            u_star,
            radius,
            gap_tol: 1e-8,
        }
    }

    /// Constant-coefficient system with the linear flux `A u`.
    pub fn constant(name: impl Into<String>, a: Vec<Vec<f64>>, radius: f64) -> Self {
        let n = a.len();
        let flat: Vec<f64> = a.iter().flat_map(|r| r.iter().copied()).collect();
        assert_eq!(flat.len(), n * n);
        let fm = flat.clone();
        let ff = flat;
        Self::new(
            name,
            n,
            Arc::new(move |_u, out| out.copy_from_slice(&fm)),
            vec![0.0; n],
            radius,
        )
        .with_flux(Arc::new(move |u, out| {
            for i in 0..n {
                out[i] = (0..n).map(|j| ff[i * n + j] * u[j]).sum();
            }
        }))
        .with_directional(Arc::new(|_u, _z, out| out.fill(0.0)))
    }

    pub fn with_flux(mut self, flux: FluxFn) -> Self {
        self.flux = Some(flux);
        self
    }

    pub fn with_directional(mut self, d: DirectionalFn) -> Self {
        self.directional = Some(d);
        self
    }

    pub fn with_radius(mut self, radius: f64) -> Self {
        self.radius = radius;
        self
    }

    pub fn with_u_star(mut self, u_star: Vec<f64>) -> Self {
        assert_eq!(u_star.len(), self.n);
        self.u_star = u_star;
        self
    }

    /// `Â(u) = A(u) + δ·B(u)`; a flux, if present, is kept only when `b_flux`
    /// supplies the matching perturbation.
    pub fn perturbed(&self, delta: f64, b: MatrixFn, b_flux: Option<FluxFn>) -> Self {
        let n = self.n;
        let a = self.matrix.clone();
        let b2 = b.clone();
        let mut m = Self::new(
            format!("{}+{}B", self.name, delta),
            n,
            Arc::new(move |u, out| {
                a(u, out);
                let mut tmp = vec![0.0; n * n];
                b2(u, &mut tmp);
                for (o, t) in out.iter_mut().zip(&tmp) {
                    *o += delta * t;
                }
            }),
            self.u_star.clone(),
            self.radius,
        );
        m.gap_tol = self.gap_tol;
        if let (Some(f), Some(bf)) = (self.flux.clone(), b_flux) {
            m.flux = Some(Arc::new(move |u, out| {
                f(u, out);
                let mut tmp = vec![0.0; n];
                bf(u, &mut tmp);
                for (o, t) in out.iter_mut().zip(&tmp) {
                    *o += delta * t;
                }
            }));
        }
        m
    }

    /// `A + δ I`, with flux `f + δ u` when `f` exists.
    pub fn shifted(&self, delta: f64) -> Self {
        let n = self.n;
        let mut m = self.perturbed(
            delta,
            Arc::new(move |_u, out| {
                out.fill(0.0);
                for i in 0..n {
                    out[i * n + i] = 1.0;
                }
            }),
            Some(Arc::new(|u, out| out.copy_from_slice(u))),
        );
        if let Some(d) = self.directional.clone() {
            m.directional = Some(d);
        }
        m
    }

    pub fn matrix_into(&self, u: &[f64], out: &mut [f64]) {
        (self.matrix)(u, out)
    }

    pub fn matrix(&self, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n * self.n];
        (self.matrix)(u, &mut out);
        out
    }

    /// `A(u) z`.
    pub fn apply(&self, u: &[f64], z: &[f64]) -> Vec<f64> {
        let a = self.matrix(u);
        mat_vec(&a, z, self.n)
    }

    pub fn has_flux(&self) -> bool {
        self.flux.is_some()
    }

    pub fn flux(&self, u: &[f64]) -> Option<Vec<f64>> {
        self.flux.as_ref().map(|f| {
            let mut out = vec![0.0; self.n];
            f(u, &mut out);
            out
        })
    }

    /// `(z • A)(u)`, row-major. Falls back to a central difference with step
    /// `1e-6 (1 + |u|)` along the unit direction of `z`.
    pub fn directional_into(&self, u: &[f64], z: &[f64], out: &mut [f64]) {
        if let Some(d) = &self.directional {
            d(u, z, out);
            return;
        }
        let nz = norm2(z);
        if nz == 0.0 {
            out.fill(0.0);
            return;
        }
        let h = 1e-6 * (1.0 + norm2(u));
        let up: Vec<f64> = u.iter().zip(z).map(|(a, b)| a + h * b / nz).collect();
        let um: Vec<f64> = u.iter().zip(z).map(|(a, b)| a - h * b / nz).collect();
        let ap = self.matrix(&up);
        let am = self.matrix(&um);
        for k in 0..out.len() {
            out[k] = nz * (ap[k] - am[k]) / (2.0 * h);
        }
    }

    pub fn directional(&self, u: &[f64], z: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n * self.n];
        self.directional_into(u, z, &mut out);
        out
    }

    pub fn distance_from_star(&self, u: &[f64]) -> f64 {
        dist2(u, &self.u_star)
    }

    pub fn in_ball(&self, u: &[f64]) -> bool {
        self.distance_from_star(u) <= self.radius
    }

    /// Eigenvalues, right and left eigenvectors at `u`.
    pub fn spectrum(&self, u: &[f64]) -> Result<Spectrum> {
        spectrum::compute(self, u)
    }

    /// Eigenvalues only, ascending.
    pub fn eigenvalues(&self, u: &[f64]) -> Result<Vec<f64>> {
        spectrum::eigenvalues(self, u)
    }

    /// Maximal `|λ_i(u)|` over the given states.
    pub fn max_speed<'a>(&self, states: impl IntoIterator<Item = &'a [f64]>) -> Result<f64> {
        let mut m: f64 = 0.0;
        for u in states {
            for l in self.eigenvalues(u)? {
                m = m.max(l.abs());
            }
        }
        Ok(m)
    }

    /// Largest deviation `‖A(u) − Df(u)‖_max` over the given states, using a
    /// central-difference Jacobian of the flux.
    pub fn flux_consistency(&self, states: &[Vec<f64>]) -> Result<f64> {
        let f = self.flux.as_ref().ok_or(Error::NoFlux)?;
        let n = self.n;
        let mut worst: f64 = 0.0;
        let mut fp = vec![0.0; n];
        let mut fm = vec![0.0; n];
        for u in states {
            let a = self.matrix(u);
            for j in 0..n {
                let h = 1e-6 * (1.0 + u[j].abs());
                let mut up = u.clone();
                let mut um = u.clone();
                up[j] += h;
                um[j] -= h;
                f(&up, &mut fp);
                f(&um, &mut fm);
                for i in 0..n {
                    let d = (fp[i] - fm[i]) / (2.0 * h);
                    worst = worst.max((a[i * n + j] - d).abs());
                }
            }
        }
        Ok(worst)
    }
}

pub(crate) fn mat_vec(a: &[f64], z: &[f64], n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| (0..n).map(|j| a[i * n + j] * z[j]).sum())
        .collect()
}
