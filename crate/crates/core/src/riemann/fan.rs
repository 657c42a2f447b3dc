use std::io::Write;

use nalgebra::{DMatrix, DVector};

use super::curve::{wave_curve, GammaCurve, RiemannParams};
use crate::error::{Error, Result};
use crate::model::SystemModel;
use crate::numerics::dist2;

/// Composite self-similar solution `ξ = x/t ↦ u` of a Riemann problem.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFan {
    pub u_left: Vec<f64>,
    pub u_right: Vec<f64>,
    pub strengths: Vec<f64>,
    pub curves: Vec<GammaCurve>,
    /// `u_0 = u⁻, …, u_n ≈ u⁺`.
    pub states: Vec<Vec<f64>>,
    /// Separating speeds `λ'_0 = −∞ < λ'_1 < … < λ'_n = +∞`.
    pub partition: Vec<f64>,
    /// `[min σ, max σ]` per family.
    pub speed_ranges: Vec<(f64, f64)>,
}

fn composite(model: &SystemModel, u_minus: &[f64], s: &[f64], p: &RiemannParams) -> Result<Vec<GammaCurve>> {
    let mut u = u_minus.to_vec();
    let mut curves = Vec::with_capacity(s.len());
    for (i, &si) in s.iter().enumerate() {
        let c = wave_curve(model, &u, i, si, p)?;
        u = c.endpoint().to_vec();
        curves.push(c);
    }
    Ok(curves)
}

fn endpoint(model: &SystemModel, u_minus: &[f64], s: &[f64], p: &RiemannParams) -> Result<Vec<f64>> {
    Ok(composite(model, u_minus, s, p)?.last().map(|c| c.endpoint().to_vec()).unwrap_or_else(|| u_minus.to_vec()))
}

/// Solves `Ψ_n(s_n) ∘ … ∘ Ψ_1(s_1)(u⁻) = u⁺` by damped Newton with a
/// finite-difference Jacobian and assembles the fan.
pub fn solve_riemann(model: &SystemModel, u_minus: &[f64], u_plus: &[f64], p: &RiemannParams) -> Result<WaveFan> {
    let n = model.n;
    let jump = dist2(u_minus, u_plus);
    if jump > p.max_jump {
        return Err(Error::InvalidInput(format!("Riemann jump {jump} exceeds max_jump = {}", p.max_jump)));
    }
    let spec = model.spectrum(u_minus)?;
    let diff: Vec<f64> = u_plus.iter().zip(u_minus).map(|(a, b)| a - b).collect();
    let mut s = spec.project(&diff);
    if jump == 0.0 {
        s = vec![0.0; n];
    }
    let resid = |s: &[f64]| -> Result<Vec<f64>> {
        Ok(endpoint(model, u_minus, s, p)?.iter().zip(u_plus).map(|(a, b)| a - b).collect())
    };
    let norm = |r: &[f64]| r.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut r = resid(&s)?;
    let mut rn = norm(&r);
    let mut it = 0;
    while rn > p.newton_tol {
        if it == 50 {
            return Err(Error::NewtonStall { residual: rn, cell: None });
        }
        it += 1;
        let mut jac = DMatrix::zeros(n, n);
        for c in 0..n {
            let mut sp = s.clone();
            sp[c] += p.jac_step;
            let rp = resid(&sp)?;
            for row in 0..n {
                jac[(row, c)] = (rp[row] - r[row]) / p.jac_step;
            }
        }
        let rhs = DVector::from_iterator(n, r.iter().map(|x| -x));
        let step = jac.lu().solve(&rhs).ok_or(Error::NewtonStall { residual: rn, cell: None })?;
        let mut lam = 1.0;
        let mut accepted = false;
        for _ in 0..=p.max_halvings {
            let trial: Vec<f64> = s.iter().zip(step.iter()).map(|(a, d)| a + lam * d).collect();
            if let Ok(rt) = resid(&trial) {
                let rtn = norm(&rt);
                if rtn < rn {
                    s = trial;
                    r = rt;
                    rn = rtn;
                    accepted = true;
                    break;
                }
            }
            lam *= 0.5;
        }
        if !accepted {
            return Err(Error::NewtonStall { residual: rn, cell: None });
        }
    }
    let curves = composite(model, u_minus, &s, p)?;
    let mut states = vec![u_minus.to_vec()];
    states.extend(curves.iter().map(|c| c.endpoint().to_vec()));
    let speed_ranges: Vec<(f64, f64)> = curves
        .iter()
        .map(|c| {
            let lo = c.sigma.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = c.sigma.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            (lo, hi)
        })
        .collect();
    let mut partition = vec![f64::NEG_INFINITY];
    for i in 0..n.saturating_sub(1) {
        let (hi, lo) = (speed_ranges[i].1, speed_ranges[i + 1].0);
        if hi >= lo {
            return Err(Error::SpeedOverlap(i + 1, i + 2));
        }
        partition.push(0.5 * (hi + lo));
    }
    partition.push(f64::INFINITY);
    Ok(WaveFan {
        u_left: u_minus.to_vec(),
        u_right: u_plus.to_vec(),
        strengths: s,
        curves,
        states,
        partition,
        speed_ranges,
    })
}

impl WaveFan {
    /// State at `ξ = x/t`. Within family `i` the state is `u(τ_K)` with `K`
    /// the number of curve segments whose speed is below `ξ`, so a run of
    /// equal speeds is crossed in one jump.
    pub fn sample(&self, xi: f64) -> Vec<f64> {
        let n = self.curves.len();
        let i = (0..n).find(|&i| xi <= self.partition[i + 1]).unwrap_or(n - 1);
        let c = &self.curves[i];
        let k = c.sigma.iter().skip(1).filter(|&&s| s < xi).count();
        c.u[k].clone()
    }

    /// `(ξ, u(ξ))` on `count` equally spaced points of `[a, b]`.
    pub fn profile(&self, a: f64, b: f64, count: usize) -> Vec<(f64, Vec<f64>)> {
        (0..count)
            .map(|k| {
                let xi = a + (b - a) * k as f64 / (count - 1).max(1) as f64;
                (xi, self.sample(xi))
            })
            .collect()
    }

    /// CSV with header `family,tau,sigma,u1..un` (family index from 1).
    pub fn write_curves_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let n = self.u_left.len();
        let mut header = vec!["family".to_string(), "tau".into(), "sigma".into()];
        header.extend((1..=n).map(|k| format!("u{k}")));
        wr.write_record(&header)?;
        for c in &self.curves {
            for (k, tau) in c.taus().iter().enumerate() {
                let mut rec = vec![(c.family + 1).to_string(), tau.to_string(), c.sigma[k].to_string()];
                rec.extend(c.u[k].iter().map(|x| x.to_string()));
                wr.write_record(&rec)?;
            }
        }
        wr.flush()?;
        Ok(())
    }

    /// CSV with header `xi,u1..un`.
    pub fn write_profile_csv<W: Write>(&self, w: W, a: f64, b: f64, count: usize) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let n = self.u_left.len();
        let mut header = vec!["xi".to_string()];
        header.extend((1..=n).map(|k| format!("u{k}")));
        wr.write_record(&header)?;
        for (xi, u) in self.profile(a, b, count) {
            let mut rec = vec![xi.to_string()];
            rec.extend(u.iter().map(|x| x.to_string()));
            wr.write_record(&rec)?;
        }
        wr.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{burgers, linear2, p_system};

    #[test]
    fn trivial_problem_gives_constant_fan() {
        let m = p_system(1.4);
        let f = solve_riemann(&m, &[1.0, 0.0], &[1.0, 0.0], &RiemannParams::default()).unwrap();
        assert_eq!(f.strengths, vec![0.0, 0.0]);
        for xi in [-5.0, -1.0, 0.0, 1.0, 5.0] {
            assert_eq!(f.sample(xi), vec![1.0, 0.0]);
        }
    }

    #[test]
    fn burgers_shock_and_rarefaction() {
        let m = burgers();
        let p = RiemannParams::for_model(&m);
        let f = solve_riemann(&m, &[1.0], &[0.0], &p).unwrap();
        assert!(f.curves[0].sigma.iter().all(|s| (s - 0.5).abs() < 1e-6));
        assert_eq!(f.sample(0.499), vec![1.0]);
        assert!(f.sample(0.501)[0].abs() < 1e-12);
        let r = solve_riemann(&m, &[0.0], &[1.0], &p).unwrap();
        for xi in [-2.0, -0.1, 0.0, 0.3, 0.77, 1.0, 1.5] {
            assert!((r.sample(xi)[0] - xi.clamp(0.0, 1.0)).abs() <= 2.0 / p.m as f64);
        }
    }

    #[test]
    fn linear_superposition() {
        let m = linear2();
        let s = m.spectrum(&[0.0, 0.0]).unwrap();
        let up: Vec<f64> = (0..2).map(|k| 0.05 * s.right[0][k] + 0.03 * s.right[1][k]).collect();
        let f = solve_riemann(&m, &[0.0, 0.0], &up, &RiemannParams::default()).unwrap();
        assert!((f.strengths[0] - 0.05).abs() < 1e-9 && (f.strengths[1] - 0.03).abs() < 1e-9);
        assert!(f.curves[0].sigma.iter().all(|x| (x + 1.0).abs() < 1e-12));
        assert!(f.curves[1].sigma.iter().all(|x| (x - 1.0).abs() < 1e-12));
        assert!(f.partition[1].abs() < 1e-12);
        let mid = f.sample(0.0);
        assert!(dist2(&mid, &f.states[1]) < 1e-15);
    }

    #[test]
    fn p_system_fan_reaches_the_right_state() {
        let m = p_system(1.4);
        let ur = [1.05, -0.04];
        let f = solve_riemann(&m, &[1.0, 0.0], &ur, &RiemannParams::default()).unwrap();
        assert!(dist2(f.states.last().unwrap(), &ur) <= 1e-9);
        assert!(f.speed_ranges[0].1 < f.partition[1] && f.partition[1] < f.speed_ranges[1].0);
        assert_eq!(f.sample(-10.0), vec![1.0, 0.0]);
        assert!(dist2(&f.sample(10.0), &ur) <= 1e-9);
    }

    #[test]
    fn csv_outputs() {
        let m = burgers();
        let f = solve_riemann(&m, &[1.0], &[0.0], &RiemannParams::for_model(&m)).unwrap();
        let mut a = Vec::new();
        f.write_curves_csv(&mut a).unwrap();
        let a = String::from_utf8(a).unwrap();
        let mut lines = a.lines();
        assert_eq!(lines.next(), Some("family,tau,sigma,u1"));
        let first: Vec<f64> = lines.next().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(&first[..2], &[1.0, 0.0]);
        assert!((first[2] - 0.5).abs() < 1e-9 && first[3] == 1.0);
        assert_eq!(a.lines().count(), 1 + f.curves[0].nodes());
        let mut b = Vec::new();
        f.write_profile_csv(&mut b, -1.0, 1.0, 5).unwrap();
        let b = String::from_utf8(b).unwrap();
        let rows: Vec<&str> = b.lines().collect();
        assert_eq!(&rows[..4], &["xi,u1", "-1,1", "-0.5,1", "0,1"]);
        assert_eq!(rows.len(), 6);
    }
}
