use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{lookup, SystemModel};
use crate::viscous::{Field, Grid1D};

/// Smooth compactly supported bump `amplitude · cos²(π (x − center) / (2 half_width))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bump {
    pub amplitude: Vec<f64>,
    pub center: f64,
    pub half_width: f64,
}

impl Bump {
    pub fn value(&self, x: f64, k: usize) -> f64 {
        let s = (x - self.center) / self.half_width;
        if s.abs() >= 1.0 {
            0.0
        } else {
            self.amplitude[k] * (0.5 * std::f64::consts::PI * s).cos().powi(2)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    /// `ul` left of `x0`, `ur` right of it; `width > 0` smooths the step with
    /// `tanh((x − x0)/width)`. An optional bump is added on top.
    Riemann {
        ul: Vec<f64>,
        ur: Vec<f64>,
        #[serde(default)]
        x0: f64,
        #[serde(default)]
        width: f64,
        #[serde(default)]
        bump: Option<Bump>,
    },
    /// `base + amplitude · exp(−((x − center)/width)²)`.
    Gaussian { base: Vec<f64>, amplitude: Vec<f64>, center: f64, width: f64 },
    /// Piecewise constant: `states[k]` on `]breaks[k−1], breaks[k][`.
    Piecewise { breaks: Vec<f64>, states: Vec<Vec<f64>> },
    /// Linear interpolation of samples, constant outside.
    Samples { x: Vec<f64>, u: Vec<Vec<f64>> },
}

impl InitialData {
    pub fn riemann(ul: Vec<f64>, ur: Vec<f64>) -> Self {
        InitialData::Riemann { ul, ur, x0: 0.0, width: 0.0, bump: None }
    }

    pub fn dim(&self) -> usize {
        match self {
            InitialData::Riemann { ul, .. } => ul.len(),
            InitialData::Gaussian { base, .. } => base.len(),
            InitialData::Piecewise { states, .. } => states.first().map_or(0, |s| s.len()),
            InitialData::Samples { u, .. } => u.first().map_or(0, |s| s.len()),
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidInput(format!("initial data: {m}")));
        let all_n = |v: &[Vec<f64>]| v.iter().all(|s| s.len() == n);
        match self {
            InitialData::Riemann { ul, ur, width, bump, .. } => {
                if ul.len() != n || ur.len() != n || bump.as_ref().is_some_and(|b| b.amplitude.len() != n) {
                    return bad("state dimension does not match the model");
                }
                if *width < 0.0 || bump.as_ref().is_some_and(|b| b.half_width <= 0.0) {
                    return bad("widths must be positive");
                }
            }
            InitialData::Gaussian { base, amplitude, width, .. } => {
                if base.len() != n || amplitude.len() != n {
                    return bad("state dimension does not match the model");
                }
                if *width <= 0.0 {
                    return bad("width must be positive");
                }
            }
            InitialData::Piecewise { breaks, states } => {
                if states.len() != breaks.len() + 1 || !all_n(states) {
                    return bad("need one more state than breaks, each of model dimension");
                }
                if breaks.windows(2).any(|w| w[0] >= w[1]) {
                    return bad("breaks must increase");
                }
            }
            InitialData::Samples { x, u } => {
                if x.is_empty() || x.len() != u.len() || !all_n(u) {
                    return bad("samples need matching x and u of model dimension");
                }
                if x.windows(2).any(|w| w[0] >= w[1]) {
                    return bad("sample abscissae must increase");
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, x: f64) -> Vec<f64> {
        match self {
            InitialData::Riemann { ul, ur, x0, width, bump } => {
                let s = if *width > 0.0 {
                    0.5 * (1.0 + ((x - x0) / width).tanh())
                } else if x < *x0 {
                    0.0
                } else {
                    1.0
                };
                (0..ul.len())
                    .map(|k| ul[k] + s * (ur[k] - ul[k]) + bump.as_ref().map_or(0.0, |b| b.value(x, k)))
                    .collect()
            }
            InitialData::Gaussian { base, amplitude, center, width } => {
                let g = (-((x - center) / width).powi(2)).exp();
                base.iter().zip(amplitude).map(|(b, a)| b + a * g).collect()
            }
            InitialData::Piecewise { breaks, states } => states[breaks.iter().filter(|&&b| b <= x).count()].clone(),
            InitialData::Samples { x: xs, u } => {
                if x <= xs[0] {
                    return u[0].clone();
                }
                let last = xs.len() - 1;
                if x >= xs[last] {
                    return u[last].clone();
                }
                let k = xs.partition_point(|&p| p <= x) - 1;
                let w = (x - xs[k]) / (xs[k + 1] - xs[k]);
                u[k].iter().zip(&u[k + 1]).map(|(a, b)| (1.0 - w) * a + w * b).collect()
            }
        }
    }

    /// Far-field states `(u(−∞), u(+∞))`.
    pub fn limits(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            InitialData::Riemann { ul, ur, .. } => (ul.clone(), ur.clone()),
            InitialData::Gaussian { base, .. } => (base.clone(), base.clone()),
            InitialData::Piecewise { states, .. } => (states[0].clone(), states[states.len() - 1].clone()),
            InitialData::Samples { u, .. } => (u[0].clone(), u[u.len() - 1].clone()),
        }
    }

    pub fn field(&self, grid: Grid1D) -> Field {
        Field::from_fn(grid, 0.0, self.dim(), |x| self.eval(x))
    }
}

/// Domain `[a, b]` with cell size `dx`, or `dx_over_eps · ε` when `dx` is absent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub a: f64,
    pub b: f64,
    #[serde(default)]
    pub dx: Option<f64>,
    #[serde(default = "default_dx_over_eps")]
    pub dx_over_eps: f64,
}

fn default_dx_over_eps() -> f64 {
    0.25
}

impl GridSpec {
    pub fn grid(&self, eps: f64) -> Result<Grid1D> {
        let dx = self.dx.unwrap_or(self.dx_over_eps * eps);
        Grid1D::covering(self.a, self.b, dx)
    }
}

/// One experiment run. Thresholds live in `tolerances` and knobs in
/// `params`; every experiment documents its keys and defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Experiment kind, e.g. `vanishing_viscosity`.
    pub name: String,
    pub model: String,
    pub initial: InitialData,
    /// Viscosities, strictly decreasing.
    pub eps: Vec<f64>,
    pub grid: GridSpec,
    #[serde(default)]
    pub times: Vec<f64>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn new(name: &str, model: &str, initial: InitialData, eps: Vec<f64>, grid: GridSpec) -> Self {
        Self {
            name: name.into(),
            model: model.into(),
            initial,
            eps,
            grid,
            times: vec![],
            tolerances: BTreeMap::new(),
            params: BTreeMap::new(),
            output: None,
            seed: 0,
        }
    }

    pub fn with_times(mut self, times: Vec<f64>) -> Self {
        self.times = times;
        self
    }

    pub fn with_tol(mut self, key: &str, v: f64) -> Self {
        self.tolerances.insert(key.into(), v);
        self
    }

    pub fn with_param(mut self, key: &str, v: f64) -> Self {
        self.params.insert(key.into(), v);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(s).map_err(|e| Error::InvalidInput(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn model(&self) -> Result<SystemModel> {
        lookup(&self.model)
    }

    pub fn validate(&self) -> Result<()> {
        let model = self.model()?;
        self.initial.validate(model.n)?;
        if self.eps.is_empty() || self.eps.iter().any(|e| !(*e > 0.0)) {
            return Err(Error::InvalidInput("eps must be a non-empty list of positive values".into()));
        }
        if self.eps.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::InvalidInput("eps must be strictly decreasing".into()));
        }
        if !(self.grid.b > self.grid.a) {
            return Err(Error::InvalidInput("grid needs a < b".into()));
        }
        if self.times.iter().any(|t| !(*t > 0.0)) || self.times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput("times must be positive and increasing".into()));
        }
        Ok(())
    }

    /// Threshold `key`, or `default` when the config leaves it out.
    pub fn tol(&self, key: &str, default: f64) -> f64 {
        self.tolerances.get(key).copied().unwrap_or(default)
    }

    pub fn param(&self, key: &str, default: f64) -> f64 {
        self.params.get(key).copied().unwrap_or(default)
    }

    /// Hex SHA-256 of the canonical TOML rendering.
    pub fn hash(&self) -> String {
        use sha2::{Digest, Sha256};
        hex::encode(Sha256::digest(self.to_toml().as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
name = "vanishing_viscosity"
model = "burgers"
eps = [0.1, 0.05, 0.025]
times = [1.0]
seed = 7

[initial]
kind = "riemann"
ul = [1.0]
ur = [0.0]

[grid]
a = -2.0
b = 3.0
dx_over_eps = 0.125

[tolerances]
ratio_max = 0.7
"#;

    #[test]
    fn parses_and_round_trips() {
        let c = ExperimentConfig::from_toml_str(SAMPLE).unwrap();
        assert_eq!(c.eps, vec![0.1, 0.05, 0.025]);
        assert_eq!(c.tol("ratio_max", 1.0), 0.7);
        assert_eq!(c.tol("missing", 1.5), 1.5);
        assert_eq!(c.grid.grid(0.1).unwrap().dx, 0.0125);
        let again = ExperimentConfig::from_toml_str(&c.to_toml()).unwrap();
        assert_eq!(again, c);
        assert_eq!(again.hash(), c.hash());
        assert_eq!(c.hash().len(), 64);
    }

    #[test]
    fn rejects_bad_configs() {
        let bad = SAMPLE.replace("[0.1, 0.05, 0.025]", "[0.05, 0.1]");
        assert!(ExperimentConfig::from_toml_str(&bad).is_err());
        let bad = SAMPLE.replace("\"burgers\"", "\"nope\"");
        assert!(matches!(ExperimentConfig::from_toml_str(&bad), Err(Error::UnknownModel(_))));
        let bad = SAMPLE.replace("ur = [0.0]", "ur = [0.0, 1.0]");
        assert!(ExperimentConfig::from_toml_str(&bad).is_err());
        let bad = SAMPLE.replace("seed = 7", "seed = 7\nbogus = 1");
        assert!(ExperimentConfig::from_toml_str(&bad).is_err());
    }

    #[test]
    fn initial_data_shapes() {
        let r = InitialData::riemann(vec![1.0], vec![0.0]);
        assert_eq!((r.eval(-0.1), r.eval(0.0)), (vec![1.0], vec![0.0]));
        let p = InitialData::Piecewise { breaks: vec![-1.0, 0.0], states: vec![vec![0.0], vec![1.0], vec![0.0]] };
        assert_eq!((p.eval(-2.0), p.eval(-0.5), p.eval(0.5)), (vec![0.0], vec![1.0], vec![0.0]));
        let s = InitialData::Samples { x: vec![0.0, 1.0], u: vec![vec![0.0], vec![2.0]] };
        assert_eq!((s.eval(-1.0), s.eval(0.25), s.eval(3.0)), (vec![0.0], vec![0.5], vec![2.0]));
        let b = Bump { amplitude: vec![0.2], center: 1.0, half_width: 0.5 };
        assert_eq!((b.value(1.0, 0), b.value(1.5, 0), b.value(0.4, 0)), (0.2, 0.0, 0.0));
    }
}
