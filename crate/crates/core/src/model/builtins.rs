use std::collections::BTreeMap;
use std::sync::Arc;

use super::SystemModel;
use crate::error::{Error, Result};

pub const MODEL_NAMES: [&str; 4] = ["burgers", "linear2", "p_system", "nc_toy"];

/// Inviscid Burgers, `f(u) = u²/2`, `u* = 0`.
///
/// The radius is 2 rather than the usual 0.5 so the unit Riemann data
/// `(1, 0)` and `(0, 1)` sit inside the ball; the scalar equation is
/// hyperbolic everywhere.
pub fn burgers() -> SystemModel {
    SystemModel::new("burgers", 1, Arc::new(|u, out| out[0] = u[0]), vec![0.0], 2.0)
        .with_flux(Arc::new(|u, out| out[0] = 0.5 * u[0] * u[0]))
        .with_directional(Arc::new(|_u, z, out| out[0] = z[0]))
}

/// Constant wave equation `A = [[0, 1], [1, 0]]`.
pub fn linear2() -> SystemModel {
    SystemModel::constant("linear2", vec![vec![0.0, 1.0], vec![1.0, 0.0]], 0.5)
}

/// Isentropic gas in Lagrangian variables `(v, w)` with `p(v) = v^{-γ}`:
/// `A = [[0, 1], [-p'(v), 0]]`, flux `(w, -p(v))`, `u* = (1, 0)`.
/// Both families are genuinely nonlinear for `v > 0`.
pub fn p_system(gamma: f64) -> SystemModel {
    SystemModel::new(
        "p_system",
        2,
        Arc::new(move |u, out| {
            out[0] = 0.0;
            out[1] = 1.0;
            out[2] = gamma * u[0].powf(-gamma - 1.0);
            out[3] = 0.0;
        }),
        vec![1.0, 0.0],
        0.5,
    )
    .with_flux(Arc::new(move |u, out| {
        out[0] = u[1];
        out[1] = -u[0].powf(-gamma);
    }))
    .with_directional(Arc::new(move |u, z, out| {
        out.fill(0.0);
        out[2] = -gamma * (gamma + 1.0) * u[0].powf(-gamma - 2.0) * z[0];
    }))
}

/// Non-conservative `A(u) = [[1 + u2, u1], [0, 2 + u1]]`, `u* = 0`.
pub fn nc_toy() -> SystemModel {
    SystemModel::new(
        "nc_toy",
        2,
        Arc::new(|u, out| {
            out[0] = 1.0 + u[1];
            out[1] = u[0];
            out[2] = 0.0;
            out[3] = 2.0 + u[0];
        }),
        vec![0.0, 0.0],
        0.5,
    )
    .with_directional(Arc::new(|_u, z, out| {
        out[0] = z[1];
        out[1] = z[0];
        out[2] = 0.0;
        out[3] = z[0];
    }))
}

pub fn builtin_models() -> BTreeMap<String, SystemModel> {
    let mut m = BTreeMap::new();
    for model in [burgers(), linear2(), p_system(1.4), nc_toy()] {
        m.insert(model.name.clone(), model);
    }
    m
}

/// Resolve a model by name. `p_system` accepts an optional exponent suffix,
/// e.g. `p_system:1.6`.
pub fn lookup(name: &str) -> Result<SystemModel> {
    if let Some(g) = name.strip_prefix("p_system:") {
        let gamma: f64 = g.parse().map_err(|_| Error::UnknownModel(name.to_string()))?;
        if gamma <= 1.0 {
            return Err(Error::UnknownModel(name.to_string()));
        }
        return Ok(p_system(gamma));
    }
    builtin_models()
        .remove(name)
        .ok_or_else(|| Error::UnknownModel(name.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::check_strict_hyperbolicity;

    #[test]
    fn registry_lookup() {
        let b = lookup("burgers").unwrap();
        assert_eq!(b.n, 1);
        assert!(b.has_flux());
        assert!(!lookup("nc_toy").unwrap().has_flux());
        assert_eq!(lookup("unknown").unwrap_err(), Error::UnknownModel("unknown".into()));
        assert!(lookup("p_system:1.6").is_ok());
    }

    #[test]
    fn fluxes_match_matrices() {
        for m in builtin_models().values().filter(|m| m.has_flux()) {
            let mut states = vec![m.u_star.clone()];
            for k in 0..m.n {
                let mut u = m.u_star.clone();
                u[k] += 0.6 * m.radius;
                states.push(u);
            }
            assert!(m.flux_consistency(&states).unwrap() <= 1e-6, "{}", m.name);
        }
    }

    #[test]
    fn builtins_are_strictly_hyperbolic_on_their_balls() {
        for m in builtin_models().values() {
            assert!(!check_strict_hyperbolicity(m, 500).violation, "{}", m.name);
        }
    }
}
