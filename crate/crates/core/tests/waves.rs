use vanvisc::model::{nc_toy, p_system};
use vanvisc::numerics::loglog_slope;
use vanvisc::waves::{decompose_jet, integrate_profile, lambda_forward, rtilde, DecompParams};

use proptest::prelude::*;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Angle between `r̃_i` and the unit tangent of the integrated profile
/// through `u*` with `|U'| = v`.
fn tangent_angle(i: usize, v: f64) -> f64 {
    let m = p_system(1.4);
    let u = m.u_star.clone();
    let spec = m.spectrum(&u).unwrap();
    let h = 1e-6;
    let shift = |d: f64| -> Vec<f64> { u.iter().zip(&spec.right[i]).map(|(a, r)| a + d * r).collect() };
    let k = (m.eigenvalues(&shift(h)).unwrap()[i] - m.eigenvalues(&shift(-h)).unwrap()[i]) / (2.0 * h);
    let v_mid = -k.signum() * v;
    let sigma = spec.lambdas[i];
    let prof = integrate_profile(&m, &u, v_mid, sigma, i, 400.0).unwrap();
    let (_, up) = prof.sample(&m, 0.0);
    let norm = dot(&up, &up).sqrt();
    let (rt, _) = rtilde(&m, &u, v_mid, sigma, i).unwrap();
    (dot(&rt, &up).abs() / norm).clamp(-1.0, 1.0).acos()
}

#[test]
fn rtilde_tracks_the_profile_tangent_to_second_order() {
    let vs = [0.02, 0.04, 0.08];
    for i in 0..2 {
        let angles: Vec<f64> = vs.iter().map(|&v| tangent_angle(i, v)).collect();
        let slope = loglog_slope(&vs, &angles);
        println!("family {}: angles {angles:?}, slope {slope:.3}", i + 1);
        assert!(slope >= 1.7, "family {}: angles {angles:?}, slope {slope}", i + 1);
    }
}

#[test]
fn rtilde_at_zero_amplitude_is_the_eigenpair() {
    for m in [p_system(1.4), nc_toy()] {
        let u: Vec<f64> = m.u_star.iter().map(|c| c + 0.03).collect();
        let spec = m.spectrum(&u).unwrap();
        for i in 0..m.n {
            let (r, l) = rtilde(&m, &u, 0.0, spec.lambdas[i] + 0.05, i).unwrap();
            assert_eq!(r, spec.right[i]);
            assert_eq!(l, spec.lambdas[i]);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn nc_toy_round_trip(du in prop::collection::vec(-0.1f64..0.1, 2), v in prop::collection::vec(-0.05f64..0.05, 2),
                         w in prop::collection::vec(-0.05f64..0.05, 2)) {
        let m = nc_toy();
        let p = DecompParams::default();
        let u: Vec<f64> = m.u_star.iter().zip(&du).map(|(a, b)| a + b * m.radius).collect();
        let (ux, ut) = lambda_forward(&m, &u, &v, &w, &p).unwrap();
        let jet = decompose_jet(&m, &u, &ux, &ut, &p).unwrap();
        for (a, b) in jet.v.iter().chain(&jet.w).zip(v.iter().chain(&w)) {
            prop_assert!((a - b).abs() <= 1e-9);
        }
    }
}

#[test]
fn solver_evolved_travelling_wave_keeps_small_sources() {
    use vanvisc::viscous::{solve, Field, Grid1D, SolveConfig};
    use vanvisc::waves::source_residuals;
    let m = p_system(1.4);
    let u = m.u_star.clone();
    let spec = m.spectrum(&u).unwrap();
    let (i, amp) = (0, 0.1);
    let h = 1e-6;
    let shift = |d: f64| -> Vec<f64> { u.iter().zip(&spec.right[i]).map(|(a, r)| a + d * r).collect() };
    let k = (m.eigenvalues(&shift(h)).unwrap()[i] - m.eigenvalues(&shift(-h)).unwrap()[i]) / (2.0 * h);
    let sigma = spec.lambdas[i];
    let prof = integrate_profile(&m, &u, -k.signum() * k.abs() * amp * amp / 8.0, sigma, i, 800.0).unwrap();
    let grid = Grid1D::covering(-300.0, 300.0, 0.25).unwrap();
    let u0 = Field::from_fn(grid, 0.0, 2, |x| prof.sample(&m, x).0);
    let dt = 0.05;
    let tr = solve(&m, &u0, &SolveConfig::new(1.0, 1.0 + 2.0 * dt).with_snapshots(vec![1.0, 1.0 + dt, 1.0 + 2.0 * dt])).unwrap();
    let s = &tr.snapshots;
    let r = source_residuals(&m, [&s[0], &s[1], &s[2]], 1.0, &DecompParams::default()).unwrap();
    let ratio = r.total_phi() / r.total_phi_eigen();
    println!("solver-evolved source ratio {ratio:.4e}");
    assert!(ratio <= 0.1, "{ratio}");
}
