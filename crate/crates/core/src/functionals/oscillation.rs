use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::dist2;
use crate::viscous::Trajectory;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TameOscillation {
    /// Oscillation over the triangle, as the largest per-component range.
    pub oscillation: f64,
    /// Total variation of `u(τ)` on `]a, b[`.
    pub total_variation: f64,
    /// `oscillation / total_variation` (`0` when both vanish).
    pub ratio: f64,
    pub points: usize,
}

/// Oscillation of `u` over `{t > τ, a + β(t − τ) < x < b − β(t − τ)}` against
/// the total variation of `u(τ)` on `]a, b[`. Snapshots supply the times;
/// the one nearest `τ` supplies the base.
pub fn tame_oscillation(traj: &Trajectory, a: f64, b: f64, tau: f64, beta: f64) -> Result<TameOscillation> {
    let base = traj.at(tau);
    let n = base.n;
    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];
    let mut points = 0;
    for s in traj.snapshots.iter().filter(|s| s.t > tau) {
        let r = beta * (s.t - tau);
        for j in 0..s.grid.m {
            let x = s.grid.x(j);
            if a + r < x && x < b - r {
                points += 1;
                for (k, u) in s.state(j).iter().enumerate() {
                    lo[k] = lo[k].min(*u);
                    hi[k] = hi[k].max(*u);
                }
            }
        }
    }
    if points == 0 {
        return Err(Error::EmptyTriangle);
    }
    let oscillation = (0..n).map(|k| hi[k] - lo[k]).fold(0.0, f64::max);
    let inside: Vec<usize> = (0..base.grid.m).filter(|&j| a < base.grid.x(j) && base.grid.x(j) < b).collect();
    let total_variation: f64 = inside.windows(2).map(|w| dist2(base.state(w[1]), base.state(w[0]))).sum();
    let ratio = if oscillation == 0.0 { 0.0 } else { oscillation / total_variation };
    Ok(TameOscillation { oscillation, total_variation, ratio, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::burgers;
    use crate::viscous::{solve, Field, Grid1D, SolveConfig};

    #[test]
    fn constant_solution_has_no_oscillation() {
        let g = Grid1D::covering(-2.0, 2.0, 0.05).unwrap();
        let cfg = SolveConfig::new(0.1, 0.5).with_uniform_snapshots(0.0, 6);
        let traj = solve(&burgers(), &Field::constant(g, 0.0, &[0.4]), &cfg).unwrap();
        let r = tame_oscillation(&traj, -1.0, 1.0, 0.0, 1.0).unwrap();
        assert_eq!((r.oscillation, r.ratio), (0.0, 0.0));
        assert_eq!(tame_oscillation(&traj, 0.0, 0.01, 0.0, 1.0), Err(Error::EmptyTriangle));
        assert_eq!(tame_oscillation(&traj, -1.0, 1.0, 0.5, 1.0), Err(Error::EmptyTriangle));
    }

    #[test]
    fn rarefaction_is_tame_and_constant_regions_are_quiet() {
        let eps = 0.02;
        let g = Grid1D::covering(-3.0, 3.0, eps / 4.0).unwrap();
        let u0 = Field::from_fn(g, 0.0, 1, |x| vec![0.5 * (1.0 + (x / 0.05).tanh())]);
        let cfg = SolveConfig::new(eps, 1.0).with_uniform_snapshots(0.0, 21);
        let traj = solve(&burgers(), &u0, &cfg).unwrap();
        let r = tame_oscillation(&traj, -1.5, 1.5, 0.0, 1.1).unwrap();
        assert!(r.ratio <= 2.5 && r.ratio > 0.5, "{r:?}");
        let mut last = f64::INFINITY;
        for half in [0.6, 0.4, 0.2] {
            let r = tame_oscillation(&traj, 2.3 - half, 2.3 + half, 0.0, 0.1).unwrap();
            assert!(r.oscillation <= last);
            last = r.oscillation;
        }
        assert!(last < 1e-5, "{last}");
    }
}
