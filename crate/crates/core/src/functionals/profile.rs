use crate::error::{Error, Result};
use crate::model::SystemModel;
use crate::viscous::{Field, Grid1D};

/// One scalar quantity sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarProfile {
    pub grid: Grid1D,
    pub values: Vec<f64>,
}

impl ScalarProfile {
    pub fn new(grid: Grid1D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.m {
            return Err(Error::GridMismatch(format!("{} values on a grid of {} cells", values.len(), grid.m)));
        }
        if values.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("profile has non-finite entries".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.xs().into_iter().map(f).collect();
        Self { grid, values }
    }

    /// Component `i` of a field.
    pub fn component(field: &Field, i: usize) -> Self {
        Self { grid: field.grid, values: field.component(i) }
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|x| a * x).collect() }
    }

    pub fn l1(&self) -> f64 {
        self.values.iter().map(|x| x.abs()).sum::<f64>() * self.grid.dx
    }

    /// Central first difference with constant-extrapolation ghosts.
    pub fn derivative(&self) -> Vec<f64> {
        let m = self.values.len();
        let h = self.grid.dx;
        (0..m)
            .map(|j| {
                let a = self.values[(j + 1).min(m - 1)];
                let b = self.values[j.saturating_sub(1)];
                (a - b) / (2.0 * h)
            })
            .collect()
    }
}

fn same_grid(a: &ScalarProfile, b: &ScalarProfile) -> Result<()> {
    if a.grid.same_as(&b.grid) {
        Ok(())
    } else {
        Err(Error::GridMismatch("profiles live on different grids".into()))
    }
}

/// `Σ_j |u_{j+1} − u_j|`.
pub fn total_variation(values: &[f64]) -> f64 {
    values.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

/// `Q = Σ_j Σ_k K(x_j − y_k) |z_j| |z♯_k| dx²` with `K(s) = 1/c` for
/// `s ≥ 0` and `e^{cs/2}/c` for `s < 0`.
///
/// Evaluated in linear time: the `s ≥ 0` part is a prefix sum and the
/// exponential tail obeys a backward recurrence.
pub fn interaction_potential(z: &ScalarProfile, zs: &ScalarProfile, c: f64) -> Result<f64> {
    if c <= 0.0 || c.is_nan() {
        return Err(Error::NonpositiveGap(c));
    }
    same_grid(z, zs)?;
    let m = z.values.len();
    let dx = z.grid.dx;
    let decay = (-0.5 * c * dx).exp();
    let mut prefix = 0.0;
    let mut near = 0.0;
    for j in 0..m {
        prefix += zs.values[j].abs();
        near += z.values[j].abs() * prefix;
    }
    let mut tail = 0.0;
    let mut far = 0.0;
    for j in (0..m).rev() {
        far += z.values[j].abs() * tail;
        tail = decay * (zs.values[j].abs() + tail);
    }
    Ok((near + far) * dx * dx / c)
}

/// `(1/2) Σ_{j<k} |v_j w_k − v_k w_j| dx²`.
pub fn area_functional(v: &ScalarProfile, w: &ScalarProfile) -> Result<f64> {
    same_grid(v, w)?;
    let dx = v.grid.dx;
    let (v, w) = (&v.values, &w.values);
    let m = v.len();
    let mut total = 0.0;
    for j in 0..m {
        let (vj, wj) = (v[j], w[j]);
        if vj == 0.0 && wj == 0.0 {
            continue;
        }
        let mut row = 0.0;
        for k in j + 1..m {
            row += (vj * w[k] - v[k] * wj).abs();
        }
        total += row;
    }
    Ok(0.5 * total * dx * dx)
}

/// `Σ_j √(v_j² + w_j²) dx`.
pub fn length_functional(v: &ScalarProfile, w: &ScalarProfile) -> Result<f64> {
    same_grid(v, w)?;
    Ok(v.values.iter().zip(&w.values).map(|(a, b)| a.hypot(*b)).sum::<f64>() * v.grid.dx)
}

/// Dissipation density `|v_x w − v w_x|` integrated in space.
pub fn area_dissipation(v: &ScalarProfile, w: &ScalarProfile) -> Result<f64> {
    same_grid(v, w)?;
    let (vx, wx) = (v.derivative(), w.derivative());
    let s: f64 = (0..v.values.len()).map(|j| (vx[j] * w.values[j] - v.values[j] * wx[j]).abs()).sum();
    Ok(s * v.grid.dx)
}

/// `∫ |z| |z♯| dx`.
pub fn overlap(z: &ScalarProfile, zs: &ScalarProfile) -> Result<f64> {
    same_grid(z, zs)?;
    Ok(z.values.iter().zip(&zs.values).map(|(a, b)| (a * b).abs()).sum::<f64>() * z.grid.dx)
}

/// Points of a planar curve, one per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarCurve {
    pub grid: Grid1D,
    pub points: Vec<[f64; 2]>,
}

impl PlanarCurve {
    /// `γ(x) = (∫_{−∞}^x v, ∫_{−∞}^x w)` by cumulative midpoint sums.
    pub fn primitive(v: &ScalarProfile, w: &ScalarProfile) -> Result<Self> {
        same_grid(v, w)?;
        let dx = v.grid.dx;
        let (mut a, mut b) = (0.0, 0.0);
        let points = v
            .values
            .iter()
            .zip(&w.values)
            .map(|(p, q)| {
                a += p * dx;
                b += q * dx;
                [a, b]
            })
            .collect();
        Ok(Self { grid: v.grid, points })
    }

    pub fn length(&self) -> f64 {
        self.points.windows(2).map(|s| (s[1][0] - s[0][0]).hypot(s[1][1] - s[0][1])).sum()
    }

    /// Largest distance between consecutive points.
    pub fn max_step(&self) -> f64 {
        self.points.windows(2).map(|s| (s[1][0] - s[0][0]).hypot(s[1][1] - s[0][1])).fold(0.0, f64::max)
    }
}

/// `(u_j, f(u_j) − ε (u_x)_j)` for a scalar conservation law.
pub fn flux_curve(model: &SystemModel, snapshot: &Field, eps: f64) -> Result<PlanarCurve> {
    if model.n != 1 || snapshot.n != 1 {
        return Err(Error::NotScalar);
    }
    if !model.has_flux() {
        return Err(Error::NoFlux);
    }
    let ux = snapshot.dx_central();
    let points = (0..snapshot.grid.m)
        .map(|j| {
            let u = snapshot.values[j];
            let f = model.flux(&[u]).ok_or(Error::NoFlux)?[0];
            Ok([u, f - eps * ux[j]])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PlanarCurve { grid: snapshot.grid, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{burgers, linear2, nc_toy};
    use proptest::prelude::*;

    fn grid(a: f64, b: f64, dx: f64) -> Grid1D {
        Grid1D::covering(a, b, dx).unwrap()
    }

    /// Unit point mass on the cell whose centre is nearest `x`.
    fn mass(g: Grid1D, x: f64) -> ScalarProfile {
        let j = ((x - g.x0) / g.dx - 0.5).round() as usize;
        let mut v = vec![0.0; g.m];
        v[j] = 1.0 / g.dx;
        ScalarProfile::new(g, v).unwrap()
    }

    fn brute_q(z: &ScalarProfile, zs: &ScalarProfile, c: f64) -> f64 {
        let xs = z.grid.xs();
        let mut s = 0.0;
        for j in 0..xs.len() {
            for k in 0..xs.len() {
                let d = xs[j] - xs[k];
                let kern = if d >= 0.0 { 1.0 / c } else { (c * d / 2.0).exp() / c };
                s += kern * z.values[j].abs() * zs.values[k].abs();
            }
        }
        s * z.grid.dx * z.grid.dx
    }

    #[test]
    fn total_variation_examples() {
        assert_eq!(total_variation(&[2.0; 10]), 0.0);
        assert_eq!(total_variation(&[1.0, 1.0, -0.5, -0.5]), 1.5);
        let n = 1000;
        let s: Vec<f64> = (0..n).map(|j| ((j as f64 + 0.5) * 2.0 * std::f64::consts::PI / n as f64).sin()).collect();
        assert!((total_variation(&s) - 4.0).abs() < 0.01);
    }

    #[test]
    fn interaction_potential_point_masses() {
        let g = grid(-3.0, 3.0, 0.01);
        let z0 = ScalarProfile::new(g, vec![0.0; g.m]).unwrap();
        assert_eq!(interaction_potential(&z0, &mass(g, 1.0), 1.0).unwrap(), 0.0);
        let q = interaction_potential(&mass(g, -1.0), &mass(g, 1.0), 1.0).unwrap();
        assert!((q - (-1.0f64).exp()).abs() < 1e-6, "{q}");
        let q = interaction_potential(&mass(g, 1.0), &mass(g, -1.0), 1.0).unwrap();
        assert!((q - 1.0).abs() < 1e-9);
        assert_eq!(interaction_potential(&z0, &z0, 0.0), Err(Error::NonpositiveGap(0.0)));
    }

    #[test]
    fn interaction_potential_matches_double_sum() {
        let g = grid(-4.0, 4.0, 0.05);
        let z = ScalarProfile::from_fn(g, |x| (x * 1.3).sin() * (-x * x / 3.0).exp());
        let zs = ScalarProfile::from_fn(g, |x| (x - 0.7).cos().powi(3));
        for c in [0.3, 1.0, 4.0] {
            let q = interaction_potential(&z, &zs, c).unwrap();
            let b = brute_q(&z, &zs, c);
            assert!((q - b).abs() <= 1e-12 * b, "{q} vs {b}");
        }
    }

    #[test]
    fn kernel_is_continuous_at_zero() {
        // Two masses in the same cell see K(0) = 1/c.
        let g = grid(-1.0, 1.0, 0.1);
        let q = interaction_potential(&mass(g, 0.05), &mass(g, 0.05), 2.0).unwrap();
        assert!((q - 0.5).abs() < 1e-12);
        let q = interaction_potential(&mass(g, 0.05), &mass(g, 0.15), 2.0).unwrap();
        assert!((q - (-0.1f64).exp() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn area_examples() {
        let g = grid(-2.0, 2.0, 0.01);
        let v = ScalarProfile::from_fn(g, |x| (-x * x).exp());
        assert_eq!(area_functional(&v, &v.scaled(2.0)).unwrap(), 0.0);
        assert!(area_functional(&v, &v.scaled(2.7)).unwrap() < 1e-14);
        let a = area_functional(&mass(g, 0.0), &mass(g, 1.0)).unwrap();
        assert!((a - 0.5).abs() < 1e-12);
        let w = ScalarProfile::from_fn(g, |x| x * (-x * x).exp());
        let (a, b) = (area_functional(&v, &w).unwrap(), area_functional(&w, &v).unwrap());
        assert!((a - b).abs() <= 1e-14 * a);
    }

    #[test]
    fn length_examples() {
        let g = grid(-1.0, 2.0, 0.01);
        let z = ScalarProfile::new(g, vec![0.0; g.m]).unwrap();
        assert_eq!(length_functional(&z, &z).unwrap(), 0.0);
        let v = ScalarProfile::from_fn(g, |x| x.sin());
        assert!((length_functional(&v, &z).unwrap() - v.l1()).abs() < 1e-14);
        let ind = |a: f64| move |x: f64| if (0.0..1.0).contains(&x) { a } else { 0.0 };
        let (v, w) = (ScalarProfile::from_fn(g, ind(3.0)), ScalarProfile::from_fn(g, ind(4.0)));
        assert!((length_functional(&v, &w).unwrap() - 5.0).abs() < 1e-9);
    }

    #[test]
    fn flux_curve_examples() {
        let g = grid(-10.0, 10.0, 0.002);
        let c = flux_curve(&burgers(), &Field::constant(g, 0.0, &[0.3]), 0.1).unwrap();
        assert!(c.points.iter().all(|p| *p == [0.3, 0.045]));
        // Stationary profile u = −tanh(x/2ε): f(u) − ε u_x = 1/2.
        let eps = 1.0;
        let f = Field::from_fn(g, 0.0, 1, |x| vec![-(x / (2.0 * eps)).tanh()]);
        let c = flux_curve(&burgers(), &f, eps).unwrap();
        let dev = c.points[1..g.m - 1].iter().map(|p| (p[1] - 0.5).abs()).fold(0.0, f64::max);
        assert!(dev < 1e-6, "{dev}");
        let f2 = Field::constant(g, 0.0, &[0.0, 0.0]);
        assert_eq!(flux_curve(&linear2(), &f2, 1.0), Err(Error::NotScalar));
        assert_eq!(flux_curve(&nc_toy(), &f2, 1.0), Err(Error::NotScalar));
    }

    #[test]
    fn flux_curve_length_converges() {
        // Curve length of a smooth front under refinement, Richardson style.
        let len = |dx: f64| {
            let g = grid(-15.0, 15.0, dx);
            let f = Field::from_fn(g, 0.0, 1, |x| vec![0.5 * (1.0 - (x / 1.5).tanh()) + 0.2 * (-x * x).exp()]);
            flux_curve(&burgers(), &f, 0.5).unwrap().length()
        };
        let (a, b, c) = (len(0.04), len(0.02), len(0.01));
        let order = ((a - b) / (b - c)).abs().log2();
        assert!(order > 1.5, "order {order}");
    }

    #[test]
    fn primitive_curve_endpoints() {
        let g = grid(-5.0, 5.0, 0.01);
        let v = ScalarProfile::from_fn(g, |x| (-x * x).exp());
        let w = v.scaled(-2.0);
        let c = PlanarCurve::primitive(&v, &w).unwrap();
        let end = c.points[g.m - 1];
        assert!((end[0] - std::f64::consts::PI.sqrt()).abs() < 1e-9 && (end[1] + 2.0 * end[0]).abs() < 1e-12);
        assert!((c.length() - 5f64.sqrt() * end[0]).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn homogeneity(alpha in -3.0f64..3.0, seed in 0u64..1000) {
            let g = grid(-2.0, 2.0, 0.05);
            let s = seed as f64;
            let z = ScalarProfile::from_fn(g, |x| (x * (1.0 + s * 1e-3)).sin());
            let zs = ScalarProfile::from_fn(g, |x| (x * 0.7 + s).cos());
            let q = interaction_potential(&z, &zs, 1.3).unwrap();
            let qa = interaction_potential(&z.scaled(alpha), &zs, 1.3).unwrap();
            prop_assert!((qa - alpha.abs() * q).abs() <= 1e-12 * (1.0 + q));
            let a = area_functional(&z, &zs).unwrap();
            let aa = area_functional(&z.scaled(alpha), &zs.scaled(alpha)).unwrap();
            prop_assert!((aa - alpha * alpha * a).abs() <= 1e-12 * (1.0 + a));
            let l = length_functional(&z, &zs).unwrap();
            let la = length_functional(&z.scaled(alpha), &zs.scaled(alpha)).unwrap();
            prop_assert!((la - alpha.abs() * l).abs() <= 1e-12 * (1.0 + l));
            prop_assert!(q >= 0.0 && a >= 0.0 && l >= 0.0);
        }
    }
}
