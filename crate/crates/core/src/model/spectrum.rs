use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::SystemModel;
use crate::error::{Error, Result};
use crate::numerics::norm2;

/// Eigen-decomposition of `A(u)`: ascending eigenvalues, unit right
/// eigenvectors `right[i] = r_i` and dual left eigenvectors `left[i] = l_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub lambdas: Vec<f64>,
    pub right: Vec<Vec<f64>>,
    pub left: Vec<Vec<f64>>,
}

impl Spectrum {
    pub fn n(&self) -> usize {
        self.lambdas.len()
    }

    /// `l_i · z` for every family.
    pub fn project(&self, z: &[f64]) -> Vec<f64> {
        self.left
            .iter()
            .map(|l| l.iter().zip(z).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `Σ c_i r_i`.
    pub fn combine(&self, c: &[f64]) -> Vec<f64> {
        let n = self.n();
        let mut out = vec![0.0; n];
        for (ci, r) in c.iter().zip(&self.right) {
            for k in 0..n {
                out[k] += ci * r[k];
            }
        }
        out
    }
}

/// Outcome of sampling the validity ball for strict hyperbolicity.
#[derive(Debug, Clone, PartialEq)]
pub struct GapReport {
    /// `+∞` for scalar models.
    pub min_gap: f64,
    pub argmin: Vec<f64>,
    pub scalar: bool,
    pub violation: bool,
    pub samples: usize,
}

fn raw_eigenvalues(model: &SystemModel, u: &[f64]) -> Result<Vec<f64>> {
    let n = model.n;
    let a = model.matrix(u);
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonConvergence(u.to_vec()));
    }
    match n {
        1 => Ok(vec![a[0]]),
        2 => {
            let half_tr = 0.5 * (a[0] + a[3]);
            let d = 0.5 * (a[0] - a[3]);
            let disc = d * d + a[1] * a[2];
            if disc < 0.0 {
                return Err(Error::NotStrictlyHyperbolic { state: u.to_vec(), gap: 0.0 });
            }
            let s = disc.sqrt();
            Ok(vec![half_tr - s, half_tr + s])
        }
        _ => {
            let m = DMatrix::from_row_slice(n, n, &a);
            let schur = nalgebra::Schur::try_new(m, 1e-15, 10_000)
                .ok_or_else(|| Error::NonConvergence(u.to_vec()))?;
            let ev = schur
                .eigenvalues()
                .ok_or_else(|| Error::NotStrictlyHyperbolic { state: u.to_vec(), gap: 0.0 })?;
            let mut v: Vec<f64> = ev.iter().copied().collect();
            v.sort_by(|x, y| x.partial_cmp(y).unwrap());
            Ok(v)
        }
    }
}

fn min_gap(l: &[f64]) -> f64 {
    l.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
}

pub(super) fn eigenvalues(model: &SystemModel, u: &[f64]) -> Result<Vec<f64>> {
    let l = raw_eigenvalues(model, u)?;
    let gap = min_gap(&l);
    if gap < model.gap_tol {
        return Err(Error::NotStrictlyHyperbolic { state: u.to_vec(), gap });
    }
    Ok(l)
}

/// Flip `r` so that its largest-magnitude entry (first one on ties) is positive.
fn fix_sign(r: &mut [f64]) {
    let mut k = 0;
    for j in 1..r.len() {
        if r[j].abs() > r[k].abs() {
            k = j;
        }
    }
    if r[k] < 0.0 {
        r.iter_mut().for_each(|x| *x = -*x);
    }
}

fn null_vector(a: &[f64], n: usize, lambda: f64) -> Result<Vec<f64>> {
    if n == 2 {
        // Rows of A − λI are parallel; take the better conditioned candidate.
        let c1 = [a[1], lambda - a[0]];
        let c2 = [lambda - a[3], a[2]];
        let (n1, n2) = (norm2(&c1), norm2(&c2));
        let c = if n1 >= n2 { c1 } else { c2 };
        let nc = n1.max(n2);
        if nc == 0.0 {
            return Err(Error::NonConvergence(vec![lambda]));
        }
        return Ok(vec![c[0] / nc, c[1] / nc]);
    }
    let mut m = DMatrix::from_row_slice(n, n, a);
    for i in 0..n {
        m[(i, i)] -= lambda;
    }
    let svd = m.svd(false, true);
    let vt = svd.v_t.ok_or_else(|| Error::NonConvergence(vec![lambda]))?;
    let mut k = 0;
    for j in 1..n {
        if svd.singular_values[j] < svd.singular_values[k] {
            k = j;
        }
    }
    let r: Vec<f64> = (0..n).map(|c| vt[(k, c)]).collect();
    let nr = norm2(&r);
    Ok(r.into_iter().map(|x| x / nr).collect())
}

pub(super) fn compute(model: &SystemModel, u: &[f64]) -> Result<Spectrum> {
    let n = model.n;
    let lambdas = eigenvalues(model, u)?;
    if n == 1 {
        return Ok(Spectrum { lambdas, right: vec![vec![1.0]], left: vec![vec![1.0]] });
    }
    let a = model.matrix(u);
    let mut right = Vec::with_capacity(n);
    for &l in &lambdas {
        let mut r = null_vector(&a, n, l)?;
        fix_sign(&mut r);
        right.push(r);
    }
    // Columns r_i form R; rows of R^{-1} are the dual left eigenvectors.
    let rm = DMatrix::from_fn(n, n, |row, col| right[col][row]);
    let inv = rm.try_inverse().ok_or_else(|| Error::NonConvergence(u.to_vec()))?;
    let left = (0..n).map(|i| (0..n).map(|c| inv[(i, c)]).collect()).collect();
    Ok(Spectrum { lambdas, right, left })
}

/// Minimal eigenvalue gap over a deterministic uniform sample of the
/// validity ball (the centre is always included).
pub fn check_strict_hyperbolicity(model: &SystemModel, sample_count: usize) -> GapReport {
    let n = model.n;
    if n == 1 {
        return GapReport {
            min_gap: f64::INFINITY,
            argmin: model.u_star.clone(),
            scalar: true,
            violation: false,
            samples: sample_count,
        };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let mut best = f64::INFINITY;
    let mut argmin = model.u_star.clone();
    let mut consider = |u: Vec<f64>| {
        let g = match raw_eigenvalues(model, &u) {
            Ok(l) => min_gap(&l),
            Err(_) => 0.0,
        };
        if g < best {
            best = g;
            argmin = u;
        }
    };
    consider(model.u_star.clone());
    let mut taken = 1;
    while taken < sample_count {
        let d: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect();
        if norm2(&d) > 1.0 {
            continue;
        }
        let u = model.u_star.iter().zip(&d).map(|(s, x)| s + model.radius * x).collect();
        consider(u);
        taken += 1;
    }
    GapReport {
        min_gap: best,
        argmin,
        scalar: false,
        violation: best < model.gap_tol,
        samples: sample_count,
    }
}
