use proptest::prelude::*;
use vanvisc::model::burgers;
use vanvisc::viscous::{l1_distance, solve, Field, Grid1D, SolveConfig};

fn bump(x: f64, c: f64, a: f64) -> f64 {
    if (x - c).abs() < 0.5 {
        a * (std::f64::consts::PI * (x - c)).cos().powi(2)
    } else {
        0.0
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn burgers_pairs_contract_in_l1(c1 in -1.0f64..1.0, a1 in -0.4f64..0.4, c2 in -1.0f64..1.0, a2 in -0.4f64..0.4) {
        let eps = 0.05;
        let grid = Grid1D::covering(-3.0, 4.0, eps / 4.0).unwrap();
        let base = |x: f64| 0.5 * (1.0 - (x / 0.3).tanh());
        let u0 = Field::from_fn(grid, 0.0, 1, |x| vec![base(x) + bump(x, c1, a1)]);
        let v0 = Field::from_fn(grid, 0.0, 1, |x| vec![base(x) + bump(x, c2, a2)]);
        let cfg = SolveConfig::new(eps, 1.0).with_uniform_snapshots(0.0, 5);
        let (tu, tv) = (solve(&burgers(), &u0, &cfg).unwrap(), solve(&burgers(), &v0, &cfg).unwrap());
        let d0 = l1_distance(&u0, &v0).unwrap();
        prop_assume!(d0 > 1e-6);
        for (a, b) in tu.snapshots.iter().zip(&tv.snapshots) {
            prop_assert!(l1_distance(a, b).unwrap() <= d0 * (1.0 + 1e-6));
        }
    }
}

#[test]
fn snapshots_land_on_requested_times() {
    let grid = Grid1D::covering(-2.0, 2.0, 0.02).unwrap();
    let u0 = Field::from_fn(grid, 0.0, 1, |x| vec![(-x * x).exp()]);
    let times = vec![0.013, 0.2, 0.77];
    let tr = solve(&burgers(), &u0, &SolveConfig::new(0.1, 0.77).with_snapshots(times.clone())).unwrap();
    assert_eq!(tr.times(), times);
}
