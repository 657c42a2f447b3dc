use std::f64::consts::PI;

use super::grid::{Field, Grid1D};
use crate::error::{Error, Result};

/// Heat kernel drifting at speed `λ*`:
/// `G(t, x) = exp(−(x − λ* t)² / 4t) / (2 √(π t))`.
pub fn heat_kernel(lambda_star: f64, t: f64, x: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::NonpositiveTime(t));
    }
    let y = x - lambda_star * t;
    Ok((-(y * y) / (4.0 * t)).exp() / (2.0 * (PI * t).sqrt()))
}

/// `(‖G‖_L1, ‖G_x‖_L1, ‖G_xx‖_L1)` at time `t`.
///
/// `G_x` changes sign once, so its mass is `2 G(t, 0) = 1/√(πt)`; `G_xx`
/// changes sign at `±√(2t)`, so its mass is `4 max|G_x| = √(2/π) e^{−1/2} / t`.
pub fn kernel_norms(t: f64) -> Result<(f64, f64, f64)> {
    if !(t > 0.0) {
        return Err(Error::NonpositiveTime(t));
    }
    Ok((1.0, 1.0 / (PI * t).sqrt(), (2.0 / PI).sqrt() * (-0.5f64).exp() / t))
}

/// Relabels coordinates as `t' = t/ε`, `x' = x/ε`; values are untouched.
pub fn rescale_to_unit_viscosity(field: &Field, eps: f64) -> Field {
    assert!(eps > 0.0, "epsilon must be positive");
    Field {
        grid: Grid1D { x0: field.grid.x0 / eps, dx: field.grid.dx / eps, m: field.grid.m },
        t: field.t / eps,
        n: field.n,
        values: field.values.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_value_at_origin() {
        let g = heat_kernel(0.0, 1.0, 0.0).unwrap();
        assert!((g - 0.5 / PI.sqrt()).abs() < 1e-15);
        assert!((g - 0.28209).abs() < 1e-5);
        assert_eq!(heat_kernel(0.0, 0.0, 0.0), Err(Error::NonpositiveTime(0.0)));
        assert!(kernel_norms(-1.0).is_err());
    }

    #[test]
    fn closed_form_norms_match_quadrature() {
        // Independent oracle: midpoint quadrature of G and its exact derivatives.
        for &t in &[0.3f64, 1.0, 2.5] {
            let h = 1e-3;
            let (mut n0, mut n1, mut n2) = (0.0, 0.0, 0.0);
            let lim = 20.0 * t.sqrt() + 5.0;
            let mut x = -lim + 0.5 * h;
            while x < lim {
                let g = heat_kernel(0.7, t, x + 0.7 * t).unwrap();
                n0 += g * h;
                n1 += (x / (2.0 * t) * g).abs() * h;
                n2 += ((x * x / (4.0 * t * t) - 1.0 / (2.0 * t)) * g).abs() * h;
                x += h;
            }
            let (a, b, c) = kernel_norms(t).unwrap();
            assert!((n0 - a).abs() < 1e-6);
            assert!((n1 - b).abs() < 1e-5);
            assert!((n2 - c).abs() < 1e-4);
        }
        assert!((kernel_norms(1.0).unwrap().1 - 0.56419).abs() < 1e-5);
    }

    #[test]
    fn rescaling_is_a_relabeling() {
        let g = Grid1D::new(0.0, 0.01, 10).unwrap();
        let f = Field::from_fn(g, 2.0, 1, |x| vec![x.sin()]);
        assert_eq!(rescale_to_unit_viscosity(&f, 1.0), f);
        let r = rescale_to_unit_viscosity(&f, 0.5);
        assert_eq!(r.grid.dx, 0.02);
        assert_eq!(r.t, 4.0);
        assert_eq!(r.values, f.values);
        let back = rescale_to_unit_viscosity(&r, 2.0);
        assert_eq!(back, f);
    }
}
