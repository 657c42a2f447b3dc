use proptest::prelude::*;
use vanvisc::lab::l1_on;
use vanvisc::model::{burgers, p_system};
use vanvisc::riemann::{solve_riemann, t_step, wave_curve, RiemannParams};
use vanvisc::viscous::{solve, Field, Grid1D, SolveConfig};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn wave_curves_are_fixed_points(i in 0usize..2, s in -0.1f64..0.1) {
        let m = p_system(1.4);
        let p = RiemannParams::default();
        prop_assume!(s.abs() > 1e-4);
        let g = wave_curve(&m, &m.u_star, i, s, &p).unwrap();
        let tg = t_step(&m, &m.u_star, &g, &p).unwrap();
        prop_assert!(tg.distance(&g, p.eps_gamma) <= 1e-9);
    }
}

/// Oleinik entropy solution of Burgers at `ξ` for data `(ul, ur)`.
fn oleinik(ul: f64, ur: f64, xi: f64) -> f64 {
    if ul > ur {
        if xi < 0.5 * (ul + ur) {
            ul
        } else {
            ur
        }
    } else {
        xi.clamp(ul, ur)
    }
}

#[test]
fn scalar_fans_match_the_entropy_solution() {
    let m = burgers();
    let mut p = RiemannParams::for_model(&m);
    p.m = 400;
    for (ul, ur) in [(1.0, 0.0), (0.0, 1.0), (-0.5, 0.8), (0.7, -0.9), (0.2, 0.25)] {
        let fan = solve_riemann(&m, &[ul], &[ur], &p).unwrap();
        let e = l1_on(-2.0, 2.0, 20000, |x| fan.sample(x), |x| vec![oleinik(ul, ur, x)]);
        assert!(e <= 2.0 / p.m as f64, "({ul}, {ur}): {e}");
    }
}

#[test]
fn p_system_fan_is_the_vanishing_viscosity_limit() {
    let m = p_system(1.4);
    let (ul, ur) = (vec![1.0, 0.0], vec![0.96, 0.06]);
    let fan = solve_riemann(&m, &ul, &ur, &RiemannParams::default()).unwrap();
    let mut errs = Vec::new();
    for eps in [0.04, 0.02, 0.01] {
        let grid = Grid1D::covering(-3.0, 3.0, eps / 4.0).unwrap();
        let u0 = Field::from_fn(grid, 0.0, 2, |x| if x < 0.0 { ul.clone() } else { ur.clone() });
        let tr = solve(&m, &u0, &SolveConfig::new(eps, 1.0)).unwrap();
        let f = tr.last();
        errs.push(l1_on(-2.0, 2.0, 8000, |x| f.sample(x), |x| fan.sample(x)));
    }
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
}
