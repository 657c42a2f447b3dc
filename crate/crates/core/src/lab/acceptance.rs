//! The acceptance criteria as runnable checks. `quick` trims sample counts
//! and domains where a criterion leaves them open; every stated grid,
//! viscosity and tolerance is kept.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{Bump, ExperimentConfig, GridSpec, InitialData};
use super::experiments::{
    exp_asymptotics, exp_l1_stability, exp_propagation_speed, exp_system_perturbation, exp_vanishing_viscosity,
    exp_viscosity_solution_check,
};
use super::reference::l1_on;
use super::report::{Cmp, Report, Verdict};
use crate::error::Result;
use crate::functionals::{
    decay_monitor, interaction_bound, interaction_series, scalar_series, MonitorParams, ScalarProfile,
};
use crate::model::{burgers, nc_toy, p_system, SystemModel};
use crate::numerics::{dist2, median, norm2};
use crate::riemann::{lower_convex_envelope, psi, rankine_hugoniot_residual, shocks, solve_riemann, t_step, GammaCurve, RiemannParams};
use crate::viscous::{field_total_variation, l1_distance, l1_norm, solve, solve_observed, solve_tangent, Field, Grid1D, SolveConfig};
use crate::waves::{decompose_jet, integrate_profile, lambda_forward, source_residuals, DecompParams};

pub struct Criterion {
    pub id: usize,
    pub title: &'static str,
    /// Wall-clock budget in seconds.
    pub limit: f64,
}

pub const CRITERIA: [Criterion; 18] = [
    Criterion { id: 1, title: "Burgers Riemann shock", limit: 1.0 },
    Criterion { id: 2, title: "Burgers rarefaction", limit: 1.0 },
    Criterion { id: 3, title: "convex envelope vs brute force", limit: 1.0 },
    Criterion { id: 4, title: "wave-curve map contraction", limit: 10.0 },
    Criterion { id: 5, title: "wave-curve tangency", limit: 10.0 },
    Criterion { id: 6, title: "vanishing-viscosity convergence", limit: 120.0 },
    Criterion { id: 7, title: "viscous shock fidelity", limit: 30.0 },
    Criterion { id: 8, title: "scalar L1 contraction", limit: 60.0 },
    Criterion { id: 9, title: "total variation bound", limit: 60.0 },
    Criterion { id: 10, title: "interaction-potential decay", limit: 30.0 },
    Criterion { id: 11, title: "area and length decay", limit: 30.0 },
    Criterion { id: 12, title: "decomposition round trip", limit: 5.0 },
    Criterion { id: 13, title: "source annihilation on travelling waves", limit: 60.0 },
    Criterion { id: 14, title: "tangent particular solution", limit: 30.0 },
    Criterion { id: 15, title: "propagation speed", limit: 60.0 },
    Criterion { id: 16, title: "viscosity-solution estimate", limit: 120.0 },
    Criterion { id: 17, title: "large-time asymptotics", limit: 180.0 },
    Criterion { id: 18, title: "perturbation bound", limit: 120.0 },
];

#[derive(Debug, Clone)]
pub struct CriterionOutcome {
    pub id: usize,
    pub title: &'static str,
    pub verdicts: Vec<Verdict>,
    pub error: Option<String>,
    pub seconds: f64,
    pub passed: bool,
}

impl CriterionOutcome {
    pub fn line(&self) -> String {
        let detail = match &self.error {
            Some(e) => format!("error: {e}"),
            None => self
                .verdicts
                .iter()
                .filter(|v| !v.passed)
                .map(|v| v.line())
                .next()
                .unwrap_or_else(|| self.verdicts.iter().map(|v| format!("{} = {:.4e}", v.metric, v.value)).collect::<Vec<_>>().join("; ")),
        };
        format!(
            "criterion {:>2} [{}] {} ({:.2}s): {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.title,
            self.seconds,
            detail
        )
    }
}

/// Runs one criterion, adding a runtime verdict against its budget.
pub fn run_criterion(id: usize, quick: bool) -> CriterionOutcome {
    let c = CRITERIA.iter().find(|c| c.id == id).expect("criterion id in 1..=18");
    let start = Instant::now();
    let res = match id {
        1 => c01(),
        2 => c02(),
        3 => c03(),
        4 => c04(quick),
        5 => c05(),
        6 => report_verdicts(exp_vanishing_viscosity(&criterion_config(6, quick).unwrap())),
        7 => c07(),
        8 => report_verdicts(exp_l1_stability(&criterion_config(8, quick).unwrap())),
        9 => c09(quick),
        10 => c10(),
        11 => c11(),
        12 => c12(),
        13 => c13(),
        14 => c14(),
        15 => report_verdicts(exp_propagation_speed(&criterion_config(15, quick).unwrap())),
        16 => report_verdicts(exp_viscosity_solution_check(&criterion_config(16, quick).unwrap())),
        17 => report_verdicts(exp_asymptotics(&criterion_config(17, quick).unwrap())),
        18 => report_verdicts(exp_system_perturbation(&criterion_config(18, quick).unwrap())),
        _ => unreachable!(),
    };
    let seconds = start.elapsed().as_secs_f64();
    let (mut verdicts, error) = match res {
        Ok(v) => (v, None),
        Err(e) => (vec![], Some(e.to_string())),
    };
    if error.is_none() {
        verdicts.push(Verdict::new("runtime", "seconds", seconds, Cmp::Lt, c.limit));
    }
    let passed = error.is_none() && !verdicts.is_empty() && verdicts.iter().all(|v| v.passed);
    CriterionOutcome { id, title: c.title, verdicts, error, seconds, passed }
}

pub fn run_all(quick: bool) -> Vec<CriterionOutcome> {
    CRITERIA.iter().map(|c| run_criterion(c.id, quick)).collect()
}

fn report_verdicts(r: Result<Report>) -> Result<Vec<Verdict>> {
    r.map(|r| r.verdicts)
}

/// The experiment configuration behind criteria 6, 8 and 15–18.
pub fn criterion_config(id: usize, quick: bool) -> Option<ExperimentConfig> {
    let grid = |a: f64, b: f64, dx_over_eps: f64| GridSpec { a, b, dx: None, dx_over_eps };
    let burgers_step = InitialData::riemann(vec![1.0], vec![0.0]);
    let cfg = match id {
        6 => ExperimentConfig::new(
            "vanishing_viscosity",
            "burgers",
            burgers_step,
            vec![0.1, 0.05, 0.025, 0.0125],
            grid(-2.0, 3.0, 0.125),
        )
        .with_times(vec![1.0])
        .with_param("window_a", -1.5)
        .with_param("window_b", 2.5)
        .with_tol("ratio_max", 0.7),
        8 => ExperimentConfig::new(
            "l1_stability",
            "burgers",
            InitialData::Gaussian { base: vec![0.5], amplitude: vec![0.3], center: 0.0, width: 0.5 },
            vec![0.05],
            grid(-3.0, 3.0, 0.25),
        )
        .with_times(vec![1.0])
        .with_param("pairs", 10.0)
        .with_param("homotopy", if quick { 0.0 } else { 1.0 })
        .with_tol("lhat_max", 1.0 + 1e-6)
        .with_seed(8),
        15 => ExperimentConfig::new(
            "propagation_speed",
            "burgers",
            InitialData::Riemann { ul: vec![1.0], ur: vec![0.0], x0: 0.0, width: 0.2, bump: None },
            vec![0.05],
            grid(-5.0, 5.0, 0.25),
        )
        .with_times(vec![0.5])
        .with_param("bump_amp", 0.1)
        .with_param("bump_half_width", 0.25)
        .with_param("beyond", 0.5)
        .with_tol("tail_max", 1e-4),
        16 => ExperimentConfig::new(
            "viscosity_solution_check",
            "burgers",
            InitialData::Piecewise { breaks: vec![-1.0, 0.0], states: vec![vec![0.0], vec![1.0], vec![0.0]] },
            vec![0.01],
            grid(-2.0, 4.0, 0.25),
        )
        .with_times(vec![3.0])
        .with_param("h_max", 0.2)
        .with_param("h_levels", 4.0)
        .with_param("flat_a", 0.2)
        .with_param("flat_b", 1.2)
        .with_tol("sharp_ratio_max", 0.2),
        17 => ExperimentConfig::new(
            "asymptotics",
            "burgers",
            InitialData::Riemann {
                ul: vec![1.0],
                ur: vec![0.0],
                x0: 0.0,
                width: 0.0,
                bump: Some(Bump { amplitude: vec![0.5], center: 1.0, half_width: 0.5 }),
            },
            vec![0.1],
            grid(-35.0, 35.0, if quick { 0.5 } else { 0.25 }),
        )
        .with_times(vec![5.0, 10.0, 20.0]),
        18 => ExperimentConfig::new(
            "system_perturbation",
            "burgers",
            InitialData::Gaussian { base: vec![0.2], amplitude: vec![0.5], center: 0.0, width: 0.5 },
            vec![0.05],
            grid(-3.0, 4.0, 0.25),
        )
        .with_times(vec![0.25, 0.5, 0.75, 1.0])
        .with_param("delta", 0.01)
        .with_tol("c_max", 3.0)
        .with_tol("linear_tol", 0.3),
        _ => return None,
    };
    Some(cfg)
}

/// Default configuration for each experiment kind, as used by `verify`.
pub fn default_config(name: &str, quick: bool) -> Option<ExperimentConfig> {
    let id = match name {
        "vanishing_viscosity" => 6,
        "l1_stability" => 8,
        "propagation_speed" => 15,
        "viscosity_solution_check" => 16,
        "asymptotics" => 17,
        "system_perturbation" => 18,
        "shock_conditions" => {
            let grid = GridSpec { a: -1.0, b: 2.0, dx: None, dx_over_eps: 0.25 };
            return Some(
                ExperimentConfig::new("shock_conditions", "burgers", InitialData::riemann(vec![1.0], vec![0.0]), vec![0.01], grid)
                    .with_times(vec![0.8, 1.0]),
            );
        }
        _ => return None,
    };
    criterion_config(id, quick)
}

fn c01() -> Result<Vec<Verdict>> {
    let m = burgers();
    let mut p = RiemannParams::for_model(&m);
    p.m = 400;
    let fan = solve_riemann(&m, &[1.0], &[0.0], &p)?;
    let sh = shocks(&fan);
    let mut v = vec![Verdict::new("single shock", "shock count", sh.len() as f64, Cmp::Le, 1.0)];
    v.push(Verdict::new("single shock", "shock count", sh.len() as f64, Cmp::Ge, 1.0));
    if let Some(s) = sh.first() {
        v.push(Verdict::new("shock speed", "|sigma - 0.5|", (s.sigma - 0.5).abs(), Cmp::Le, 1e-6));
        let rh = norm2(&rankine_hugoniot_residual(&m, &s.u_minus, &s.u_plus, s.sigma)?);
        v.push(Verdict::new("Rankine-Hugoniot", "residual", rh, Cmp::Le, 1e-6));
    }
    Ok(v)
}

fn c02() -> Result<Vec<Verdict>> {
    let m = burgers();
    let mut p = RiemannParams::for_model(&m);
    p.m = 400;
    let fan = solve_riemann(&m, &[0.0], &[1.0], &p)?;
    let e = l1_on(-2.0, 2.0, 8000, |x| fan.sample(x), |x| vec![x.clamp(0.0, 1.0)]);
    Ok(vec![Verdict::new("rarefaction fan", "L1 error on [-2,2]", e, Cmp::Le, 5e-3)])
}

/// Lower convex envelope straight from its definition: the least chord
/// value over all node pairs bracketing each node.
pub fn brute_force_envelope(taus: &[f64], f: &[f64]) -> Vec<f64> {
    let m = taus.len();
    (0..m)
        .map(|j| {
            let mut best = f[j];
            for i in 0..=j {
                for k in j..m {
                    if k > i {
                        let w = (taus[j] - taus[i]) / (taus[k] - taus[i]);
                        best = best.min((1.0 - w) * f[i] + w * f[k]);
                    }
                }
            }
            best
        })
        .collect()
}

fn c03() -> Result<Vec<Verdict>> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let m = 200;
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let pieces = rng.random_range(2..6);
        let mut knots: Vec<f64> = (0..pieces - 1).map(|_| rng.random_range(0.05..0.95)).collect();
        knots.sort_by(f64::total_cmp);
        let coeffs: Vec<[f64; 4]> = (0..pieces).map(|_| std::array::from_fn(|_| rng.random_range(-2.0..2.0))).collect();
        let taus: Vec<f64> = (0..m).map(|k| k as f64 / (m - 1) as f64).collect();
        let f: Vec<f64> = taus
            .iter()
            .map(|&t| {
                let p = knots.iter().filter(|&&k| k <= t).count();
                let c = coeffs[p];
                c[0] + t * (c[1] + t * (c[2] + t * c[3]))
            })
            .collect();
        let (conv, _) = lower_convex_envelope(&taus, &f);
        let brute = brute_force_envelope(&taus, &f);
        worst = conv.iter().zip(&brute).fold(worst, |w, (a, b)| w.max((a - b).abs()));
    }
    Ok(vec![Verdict::new("envelope", "max |conv - brute|", worst, Cmp::Le, 1e-12)])
}

/// A random member of Γ for family `i` and strength `s` around `u⁻`.
fn random_curve(rng: &mut ChaCha8Rng, model: &SystemModel, u_minus: &[f64], i: usize, s: f64, m: usize) -> Result<GammaCurve> {
    let spec = model.spectrum(u_minus)?;
    let lam = spec.lambdas[i];
    let n = model.n;
    let wave = |rng: &mut ChaCha8Rng, amp: f64| {
        let (a, f, ph) = (rng.random_range(-amp..amp), rng.random_range(0.5..3.0), rng.random_range(0.0..6.3));
        move |x: f64| a * (std::f64::consts::PI * f * x + ph).sin()
    };
    let du: Vec<_> = (0..n).map(|_| wave(rng, 0.5)).collect();
    let dv = wave(rng, 0.02);
    let ds = wave(rng, 0.1);
    let mut c = GammaCurve::initial(model, u_minus, i, s, m)?;
    for (k, tau) in c.taus().into_iter().enumerate() {
        let x = tau / s;
        for q in 0..n {
            c.u[k][q] = u_minus[q] + tau * (spec.right[i][q] + du[q](x));
        }
        c.v[k] = dv(x) * x.abs().min(1.0);
        c.sigma[k] = lam + ds(x);
    }
    Ok(c)
}

fn c04(quick: bool) -> Result<Vec<Verdict>> {
    let model = p_system(1.4);
    let um = model.u_star.clone();
    let mut p = RiemannParams::default();
    p.m = if quick { 200 } else { 400 };
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut ratios = Vec::new();
    for k in 0..20 {
        let i = k % 2;
        let a = random_curve(&mut rng, &model, &um, i, 0.1, p.m)?;
        let b = random_curve(&mut rng, &model, &um, i, 0.1, p.m)?;
        let (ta, tb) = (t_step(&model, &um, &a, &p)?, t_step(&model, &um, &b, &p)?);
        ratios.push(ta.distance(&tb, p.eps_gamma) / a.distance(&b, p.eps_gamma));
    }
    let worst = ratios.iter().copied().fold(0.0, f64::max);
    Ok(vec![
        Verdict::new("contraction", "max ratio", worst, Cmp::Le, 0.9),
        Verdict::new("contraction", "median ratio", median(&ratios), Cmp::Le, 0.5),
    ])
}

fn c05() -> Result<Vec<Verdict>> {
    let mut worst = 0.0f64;
    for model in [p_system(1.4), nc_toy()] {
        let um = model.u_star.clone();
        let spec = model.spectrum(&um)?;
        let p = RiemannParams::default();
        for i in 0..model.n {
            for s in [1e-2, -1e-2, 1e-3, -1e-3] {
                let up = psi(&model, &um, i, s, &p)?;
                let d: Vec<f64> = (0..model.n).map(|k| (up[k] - um[k]) / s - spec.right[i][k]).collect();
                worst = worst.max(norm2(&d) / (20.0 * s.abs()));
            }
        }
    }
    Ok(vec![Verdict::new("tangency", "max |(psi(s)-u)/s - r| / (20|s|)", worst, Cmp::Le, 1.0)])
}

fn c07() -> Result<Vec<Verdict>> {
    let eps = 0.05;
    let model = burgers().shifted(-0.5);
    let grid = Grid1D::covering(-2.0, 2.0, eps / 4.0)?;
    let u0 = Field::from_fn(grid, 0.0, 1, |x| vec![0.5 * (1.0 - (x / (4.0 * eps)).tanh())]);
    let traj = solve(&model, &u0, &SolveConfig::new(eps, 1.0))?;
    let drift = l1_distance(&u0, traj.last())?;
    Ok(vec![Verdict::new("stationary profile", "L1 drift over t = 1", drift, Cmp::Le, 1e-3)])
}

fn c09(quick: bool) -> Result<Vec<Verdict>> {
    let eps = 0.05;
    let grid = Grid1D::covering(-3.0, 3.0, eps / 4.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst_rise = f64::NEG_INFINITY;
    let runs = if quick { 2 } else { 5 };
    for _ in 0..runs {
        let bumps: Vec<Bump> = (0..3)
            .map(|_| Bump { amplitude: vec![rng.random_range(-0.4..0.4)], center: rng.random_range(-1.0..1.0), half_width: rng.random_range(0.1..0.5) })
            .collect();
        let u0 = Field::from_fn(grid, 0.0, 1, |x| vec![0.5 + bumps.iter().map(|b| b.value(x, 0)).sum::<f64>()]);
        let mut prev = field_total_variation(&u0);
        solve_observed(&burgers(), &u0, &SolveConfig::new(eps, 1.0), &mut |_, u| {
            let tv: f64 = u.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
            worst_rise = worst_rise.max(tv - prev);
            prev = tv;
        })?;
    }
    let model = p_system(1.4);
    let u0 = Field::from_fn(grid, 0.0, 2, |x| {
        let b = Bump { amplitude: vec![0.05, -0.04], center: 0.0, half_width: 0.6 };
        vec![1.0 + b.value(x, 0), b.value(x, 1)]
    });
    let tv0 = field_total_variation(&u0);
    let traj = solve(&model, &u0, &SolveConfig::new(eps, 1.0).with_uniform_snapshots(0.0, 20))?;
    let tv_max = traj.snapshots.iter().map(field_total_variation).fold(0.0, f64::max);
    Ok(vec![
        Verdict::new("scalar TV per step", "max TV increase", worst_rise, Cmp::Le, 1e-8),
        Verdict::new("p-system TV", "max_t TV(t)/TV(0)", tv_max / tv0, Cmp::Le, 2.0),
    ])
}

fn c10() -> Result<Vec<Verdict>> {
    let m = SystemModel::constant("drift pair", vec![vec![0.0, 0.0], vec![0.0, 1.0]], 10.0);
    let grid = Grid1D::covering(-12.0, 16.0, 0.1)?;
    let u0 = Field::from_fn(grid, 0.0, 2, |x| vec![(-(x - 1.0).powi(2)).exp(), (-(x + 2.0).powi(2)).exp()]);
    let traj = solve(&m, &u0, &SolveConfig::new(1.0, 4.0).with_uniform_snapshots(0.0, 200))?;
    let s = interaction_series(&traj, 0, 1, 1.0, 1.0)?;
    let r = decay_monitor(&s, &MonitorParams::default());
    let z0 = ScalarProfile::component(&u0, 0).l1();
    let zs0 = ScalarProfile::component(&u0, 1).l1();
    let (lhs, rhs) = interaction_bound(&s, z0, zs0, 1.0);
    Ok(vec![
        Verdict::new("Q decay per interval", "min (bound - dQ)", r.q_margin, Cmp::Ge, 0.0),
        Verdict::new("interaction estimate", "int int |z z#| / (||z0|| ||z#0|| / c)", lhs / rhs, Cmp::Le, 1.0),
    ])
}

fn c11() -> Result<Vec<Verdict>> {
    let m = burgers();
    let grid = Grid1D::covering(-25.0, 25.0, 0.1)?;
    let u0 = Field::from_fn(grid, 0.0, 1, |x| vec![0.5 * (1.0 - (x / 3.0).tanh()) + 0.3 * (-(x - 4.0).powi(2) / 4.0).exp()]);
    let traj = solve(&m, &u0, &SolveConfig::new(1.0, 3.0).with_uniform_snapshots(0.0, 150))?;
    let s = scalar_series(&m, &traj, 1.0)?;
    let r = decay_monitor(&s, &MonitorParams::default());
    Ok(vec![
        Verdict::new("area decay with dissipation", "min (bound - dA)", r.a_margin, Cmp::Ge, 0.0),
        Verdict::new("length nonincreasing", "min (-dL)", r.l_margin, Cmp::Ge, 0.0),
        Verdict::new("gamma_x nonvanishing", "flagged intervals", r.flagged as f64, Cmp::Le, 0.0),
    ])
}

fn c12() -> Result<Vec<Verdict>> {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let p = DecompParams::default();
    let models = [p_system(1.4), nc_toy()];
    let mut worst = 0.0f64;
    for k in 0..1000 {
        let m = &models[k % 2];
        let u: Vec<f64> = m.u_star.iter().map(|c| c + rng.random_range(-0.2..0.2) * m.radius).collect();
        let v: Vec<f64> = (0..m.n).map(|_| rng.random_range(-0.05..0.05)).collect();
        let w: Vec<f64> = (0..m.n).map(|_| rng.random_range(-0.05..0.05)).collect();
        let (ux, ut) = lambda_forward(m, &u, &v, &w, &p)?;
        let jet = decompose_jet(m, &u, &ux, &ut, &p)?;
        for (a, b) in jet.v.iter().chain(&jet.w).zip(v.iter().chain(&w)) {
            worst = worst.max((a - b).abs());
        }
    }
    Ok(vec![Verdict::new("round trip", "max |inverse(forward(v,w)) - (v,w)|", worst, Cmp::Le, 1e-9)])
}

/// `(ratio, jump)` for the source-annihilation test on a p-system profile
/// of the given amplitude.
pub fn source_ratio(amplitude: f64) -> Result<(f64, f64)> {
    let model = p_system(1.4);
    let um = model.u_star.clone();
    let spec = model.spectrum(&um)?;
    let i = 0;
    let h = 1e-6;
    let shift = |d: f64| -> Vec<f64> { um.iter().zip(&spec.right[i]).map(|(a, r)| a + d * r).collect() };
    let k = (model.eigenvalues(&shift(h))?[i] - model.eigenvalues(&shift(-h))?[i]) / (2.0 * h);
    let v_mid = -k.signum() * k.abs() * amplitude * amplitude / 8.0;
    let sigma = spec.lambdas[i];
    let prof = integrate_profile(&model, &um, v_mid, sigma, i, 800.0)?;
    let jump = dist2(&prof.left_state(), &prof.right_state());
    let grid = Grid1D::covering(-300.0, 300.0, 0.25)?;
    let dt = 0.05;
    let snaps: Vec<Field> = (0..3)
        .map(|q| {
            let t = q as f64 * dt;
            Field::from_fn(grid, t, model.n, |x| prof.sample(&model, x - sigma * t).0)
        })
        .collect();
    let r = source_residuals(&model, [&snaps[0], &snaps[1], &snaps[2]], 1.0, &DecompParams::default())?;
    Ok((r.total_phi() / r.total_phi_eigen(), jump))
}

fn c13() -> Result<Vec<Verdict>> {
    let (ratio, jump) = source_ratio(0.1)?;
    Ok(vec![
        Verdict::new("profile amplitude", "relative error of |u(+inf) - u(-inf)| vs 0.1", (jump - 0.1).abs() / 0.1, Cmp::Le, 0.25),
        Verdict::new("source annihilation", "sum int|phi| / eigen baseline", ratio, Cmp::Le, 0.1),
    ])
}

fn c14() -> Result<Vec<Verdict>> {
    let eps = 0.05;
    let t = 0.5;
    let model = burgers();
    let grid = Grid1D::covering(-3.0, 3.0, eps / 4.0)?;
    let u0 = Field::from_fn(grid, 0.0, 1, |x| vec![0.5 * (1.0 - (x / 0.3).tanh()) + 0.3 * (-(x + 1.0).powi(2) * 4.0).exp()]);
    let steps = (t / (0.02 * eps)).ceil() as usize;
    let traj = solve(&model, &u0, &SolveConfig::new(eps, t).with_uniform_snapshots(0.0, steps))?;
    let z0 = u0.with_values(u0.dx_central());
    let z = solve_tangent(&model, &traj, &z0, &SolveConfig::new(eps, t))?;
    let ux = traj.last().dx_central();
    let diff: Vec<f64> = z.last().values.iter().zip(&ux).map(|(a, b)| a - b).collect();
    let rel = l1_norm(&diff, 1, grid.dx) / l1_norm(&ux, 1, grid.dx);
    Ok(vec![Verdict::new("tangent reproduces u_x", "||z - u_x|| / ||u_x||", rel, Cmp::Le, 1e-3)])
}
