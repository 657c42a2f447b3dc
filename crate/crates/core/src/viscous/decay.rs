use serde::Serialize;

use super::grid::Trajectory;
use crate::numerics::{loglog_slope, norm2};

/// Discrete derivative norms of one snapshot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayRow {
    pub t: f64,
    pub ux_l1: f64,
    pub uxx_l1: f64,
    pub uxxx_l1: f64,
    pub ux_inf: f64,
    pub uxx_inf: f64,
    pub uxxx_inf: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayReport {
    pub rows: Vec<DecayRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Derivative {
    First,
    Second,
    Third,
}

impl DecayReport {
    /// Fitted exponent `p` in `‖∂^k u‖_L1 ≈ C t^p` over snapshots with
    /// `t_lo ≤ t ≤ t_hi` (shifted by the initial time).
    pub fn fitted_exponent(&self, which: Derivative, t_lo: f64, t_hi: f64) -> Option<f64> {
        let t0 = self.rows.first()?.t;
        let pts: Vec<(f64, f64)> = self
            .rows
            .iter()
            .filter(|r| r.t - t0 >= t_lo && r.t - t0 <= t_hi && r.t > t0)
            .map(|r| {
                let v = match which {
                    Derivative::First => r.ux_l1,
                    Derivative::Second => r.uxx_l1,
                    Derivative::Third => r.uxxx_l1,
                };
                (r.t - t0, v)
            })
            .filter(|p| p.1 > 0.0)
            .collect();
        if pts.len() < 2 {
            return None;
        }
        let (x, y): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
        Some(loglog_slope(&x, &y))
    }
}

/// Norms of the first three difference quotients of every snapshot.
pub fn decay_report(traj: &Trajectory) -> DecayReport {
    let rows = traj
        .snapshots
        .iter()
        .map(|f| {
            let m = f.grid.m;
            let dx = f.grid.dx;
            let d1: Vec<Vec<f64>> = (1..m)
                .map(|j| f.state(j).iter().zip(f.state(j - 1)).map(|(a, b)| (a - b) / dx).collect())
                .collect();
            let diff = |v: &Vec<Vec<f64>>| -> Vec<Vec<f64>> {
                v.windows(2)
                    .map(|w| w[1].iter().zip(&w[0]).map(|(a, b)| (a - b) / dx).collect())
                    .collect()
            };
            let d2 = diff(&d1);
            let d3 = diff(&d2);
            let l1 = |v: &Vec<Vec<f64>>| v.iter().map(|x| norm2(x)).sum::<f64>() * dx;
            let linf = |v: &Vec<Vec<f64>>| v.iter().map(|x| norm2(x)).fold(0.0, f64::max);
            DecayRow {
                t: f.t,
                ux_l1: l1(&d1),
                uxx_l1: l1(&d2),
                uxxx_l1: l1(&d3),
                ux_inf: linf(&d1),
                uxx_inf: linf(&d2),
                uxxx_inf: linf(&d3),
            }
        })
        .collect();
    DecayReport { rows }
}
