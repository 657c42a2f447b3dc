use crate::error::{Error, Result};
use crate::model::{mat_vec, Spectrum, SystemModel};
use crate::numerics::{dot, norm2};

/// `(r_i • r_i)(u)`: derivative of the unit eigenvector field `r_i` along
/// itself, obtained by differentiating `A r_i = λ_i r_i` with `|r_i| = 1`.
pub fn eigenvector_derivative(model: &SystemModel, u: &[f64], spec: &Spectrum, i: usize) -> Vec<f64> {
    let n = model.n;
    if n == 1 {
        return vec![0.0];
    }
    let ri = &spec.right[i];
    let da = model.directional(u, ri);
    let g = mat_vec(&da, ri, n);
    let mut c = vec![0.0; n];
    for j in 0..n {
        if j != i {
            c[j] = dot(&spec.left[j], &g) / (spec.lambdas[i] - spec.lambdas[j]);
        }
    }
    // Unit length forces r_i · r_i' = 0.
    c[i] = -(0..n).filter(|&j| j != i).map(|j| c[j] * dot(&spec.right[j], ri)).sum::<f64>();
    spec.combine(&c)
}

/// First-order centre-manifold vector `r̃_i(u, v_i, σ_i)` and its speed
/// `λ̃_i = ⟨r̃_i, A(u) r̃_i⟩`.
///
/// The correction `ρ` has no `r_i` component and
/// `l_j·ρ = l_j·(r_i • r_i) / (λ_j − 2λ_i + σ_i)` for `j ≠ i`; at `v_i = 0`
/// the eigenpair `(r_i, λ_i)` is returned unchanged.
pub fn rtilde(model: &SystemModel, u: &[f64], v: f64, sigma: f64, i: usize) -> Result<(Vec<f64>, f64)> {
    let spec = model.spectrum(u)?;
    rtilde_with(model, u, &spec, v, sigma, i)
}

pub fn rtilde_with(
    model: &SystemModel,
    u: &[f64],
    spec: &Spectrum,
    v: f64,
    sigma: f64,
    i: usize,
) -> Result<(Vec<f64>, f64)> {
    let n = model.n;
    if v == 0.0 || n == 1 {
        return Ok((spec.right[i].clone(), spec.lambdas[i]));
    }
    let drr = eigenvector_derivative(model, u, spec, i);
    let mut c = vec![0.0; n];
    for j in 0..n {
        if j == i {
            continue;
        }
        let den = spec.lambdas[j] - 2.0 * spec.lambdas[i] + sigma;
        if den.abs() < 1e-6 {
            return Err(Error::ResonantDenominator { i, j, denominator: den });
        }
        c[j] = v * dot(&spec.left[j], &drr) / den;
    }
    let mut r = spec.combine(&c);
    for (rk, ek) in r.iter_mut().zip(&spec.right[i]) {
        *rk += ek;
    }
    let nr = norm2(&r);
    r.iter_mut().for_each(|x| *x /= nr);
    let speed = dot(&r, &model.apply(u, &r));
    Ok((r, speed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{burgers, linear2, nc_toy, p_system};

    #[test]
    fn zero_strength_is_the_eigenpair() {
        for m in [burgers(), linear2(), p_system(1.4), nc_toy()] {
            let u: Vec<f64> = m.u_star.iter().map(|x| x + 0.05).collect();
            let s = m.spectrum(&u).unwrap();
            for i in 0..m.n {
                let (r, l) = rtilde(&m, &u, 0.0, s.lambdas[i] + 0.03, i).unwrap();
                assert_eq!(r, s.right[i]);
                assert_eq!(l, s.lambdas[i]);
            }
        }
    }

    #[test]
    fn constant_coefficients_need_no_correction() {
        let m = linear2();
        let s = m.spectrum(&[0.0, 0.0]).unwrap();
        for v in [0.01, -0.1, 0.2] {
            let (r, l) = rtilde(&m, &[0.0, 0.0], v, 1.0, 1).unwrap();
            for k in 0..2 {
                assert!((r[k] - s.right[1][k]).abs() < 1e-15);
            }
            assert!((l - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn eigenvector_derivative_matches_finite_difference() {
        let m = p_system(1.4);
        let u = [1.1, 0.02];
        let s = m.spectrum(&u).unwrap();
        for i in 0..2 {
            let d = eigenvector_derivative(&m, &u, &s, i);
            let h = 1e-5;
            let up: Vec<f64> = u.iter().zip(&s.right[i]).map(|(a, b)| a + h * b).collect();
            let um: Vec<f64> = u.iter().zip(&s.right[i]).map(|(a, b)| a - h * b).collect();
            let (rp, rm) = (m.spectrum(&up).unwrap().right[i].clone(), m.spectrum(&um).unwrap().right[i].clone());
            for k in 0..2 {
                assert!(((rp[k] - rm[k]) / (2.0 * h) - d[k]).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn speed_deviation_is_first_order() {
        let m = p_system(1.4);
        let u = [1.05, -0.02];
        let s = m.spectrum(&u).unwrap();
        let dev = |v: f64| (rtilde(&m, &u, v, s.lambdas[0], 0).unwrap().1 - s.lambdas[0]).abs();
        let (a, b) = (dev(0.02), dev(0.01));
        assert!(a > 0.0 && (a / b - 2.0).abs() < 0.1, "ratio {}", a / b);
    }

    #[test]
    fn resonance_is_reported() {
        // λ_2 − 2λ_1 + σ = 3c + σ vanishes at σ = −3c.
        let err = rtilde(&p_system(1.4), &[1.0, 0.0], 0.1, -3.0 * 1.4f64.sqrt(), 0).unwrap_err();
        assert!(matches!(err, Error::ResonantDenominator { .. }));
    }
}
