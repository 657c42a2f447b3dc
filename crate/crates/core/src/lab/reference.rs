use crate::error::{Error, Result};
use crate::viscous::Field;

/// Exact entropy solution of inviscid Burgers `u_t + (u²/2)_x = 0` with
/// piecewise-constant data, by the Hopf–Lax formula
/// `u(t, x) = (x − y*)/t`, `y* = argmin_y U_0(y) + (x − y)²/(2t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HopfLax {
    breaks: Vec<f64>,
    states: Vec<f64>,
    /// `U_0` at each break, with `U_0(breaks[0]) = 0`.
    prim: Vec<f64>,
}

impl HopfLax {
    pub fn new(breaks: Vec<f64>, states: Vec<f64>) -> Result<Self> {
        if states.len() != breaks.len() + 1 || breaks.is_empty() {
            return Err(Error::InvalidInput("need at least one break and one more state than breaks".into()));
        }
        if breaks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput("breaks must increase".into()));
        }
        let mut prim = vec![0.0; breaks.len()];
        for k in 1..breaks.len() {
            prim[k] = prim[k - 1] + states[k] * (breaks[k] - breaks[k - 1]);
        }
        Ok(Self { breaks, states, prim })
    }

    /// Value at `t = 0`.
    pub fn initial(&self, x: f64) -> f64 {
        self.states[self.breaks.iter().filter(|&&b| b <= x).count()]
    }

    pub fn eval(&self, t: f64, x: f64) -> f64 {
        if t <= 0.0 {
            return self.initial(x);
        }
        let kb = self.breaks.len();
        let mut best = (f64::INFINITY, 0.0);
        for k in 0..=kb {
            let c = self.states[k];
            let lo = if k == 0 { f64::NEG_INFINITY } else { self.breaks[k - 1] };
            let hi = if k == kb { f64::INFINITY } else { self.breaks[k] };
            let y = (x - c * t).clamp(lo, hi);
            // U_0 on piece k, anchored at its nearest break.
            let u0 = if k == 0 { self.prim[0] + c * (y - self.breaks[0]) } else { self.prim[k - 1] + c * (y - self.breaks[k - 1]) };
            let obj = u0 + (x - y) * (x - y) / (2.0 * t);
            if obj < best.0 {
                best = (obj, y);
            }
        }
        (x - best.1) / t
    }
}

/// Midpoint-rule `∫_a^b |u(x) − r(x)| dx` on `count` points, with `u` and `r`
/// vector valued.
pub fn l1_on(a: f64, b: f64, count: usize, u: impl Fn(f64) -> Vec<f64>, r: impl Fn(f64) -> Vec<f64>) -> f64 {
    let h = (b - a) / count as f64;
    (0..count)
        .map(|k| {
            let x = a + (k as f64 + 0.5) * h;
            let (p, q) = (u(x), r(x));
            p.iter().zip(&q).map(|(s, t)| (s - t) * (s - t)).sum::<f64>().sqrt()
        })
        .sum::<f64>()
        * h
}

/// `∫ |u − r| dx` over the cells of `f` whose centres lie in `[a, b]`.
pub fn l1_cells(f: &Field, a: f64, b: f64, r: impl Fn(f64) -> Vec<f64>) -> f64 {
    let mut s = 0.0;
    for j in 0..f.grid.m {
        let x = f.grid.x(j);
        if x < a || x > b {
            continue;
        }
        let q = r(x);
        s += f.state(j).iter().zip(&q).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt();
    }
    s * f.grid.dx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_shock_and_rarefaction() {
        let s = HopfLax::new(vec![0.0], vec![1.0, 0.0]).unwrap();
        assert_eq!(s.eval(2.0, 0.99), 1.0);
        assert_eq!(s.eval(2.0, 1.01), 0.0);
        let r = HopfLax::new(vec![0.0], vec![0.0, 1.0]).unwrap();
        for x in [-1.0, 0.3, 1.0, 1.7, 2.5] {
            assert!((r.eval(2.0, x) - (x / 2.0).clamp(0.0, 1.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn box_data_shock_position() {
        // 1 on ]−1, 0[: the rarefaction catches the shock at t = 2, after
        // which the shock sits at −1 + √(2t) with left state √(2/t).
        let s = HopfLax::new(vec![-1.0, 0.0], vec![0.0, 1.0, 0.0]).unwrap();
        assert!((s.eval(1.0, 0.49) - 1.0).abs() < 1e-14 && s.eval(1.0, 0.51) == 0.0);
        let t: f64 = 3.0;
        let xs = -1.0 + (2.0 * t).sqrt();
        let left = s.eval(t, xs - 1e-9);
        assert!((left - (2.0f64 / 3.0).sqrt()).abs() < 1e-8, "{left}");
        assert_eq!(s.eval(t, xs + 1e-9), 0.0);
        // Mass is conserved.
        let mass: f64 = (0..20000).map(|k| s.eval(t, -2.0 + (k as f64 + 0.5) * 5e-4)).sum::<f64>() * 5e-4;
        assert!((mass - 1.0).abs() < 1e-3, "{mass}");
    }

    #[test]
    fn quadrature_helpers() {
        let v = l1_on(0.0, 2.0, 1000, |x| vec![x], |_| vec![0.0]);
        assert!((v - 2.0).abs() < 1e-12);
        assert!(HopfLax::new(vec![], vec![1.0]).is_err());
    }
}
