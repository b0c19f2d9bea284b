use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde_json::{Map, Number, Value};
use sha2::{Digest, Sha256};

use crate::mass::{CutoffShape, DEFAULT_EPS_LIST, DEFAULT_SUPPORT_RADIUS};
use crate::momentum::{AngularQuadrature, DEFAULT_ANGULAR_NODES, DEFAULT_MOMENTUM_N, DEFAULT_PMAX, DEFAULT_REDUCED_N};
use crate::solver::{InitialProfile, SolverOptions, DEFAULT_FLOW_STEP};

/// A configuration problem, tied to the offending key when there is one.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{field}: {message}")]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    fn new(field: &str, message: impl Into<String>) -> Self {
        ConfigError {
            field: field.to_string(),
            message: message.into(),
        }
    }
}

/// Fully resolved run configuration. On disk it is a single JSON object
/// with flat dotted keys (`"grid.n": 3000`); missing keys take defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub grid_n: usize,
    pub grid_rmax: f64,
    pub momentum_n: usize,
    pub momentum_pmax: f64,
    pub quad_reduced_n: usize,
    pub quad_angular_nodes: usize,
    pub solver_init: InitialProfile,
    pub solver_mixing: f64,
    pub solver_tol_energy: f64,
    pub solver_tol_psi: f64,
    pub solver_max_iter: usize,
    pub oracle_step: f64,
    pub cutoff_shape: CutoffShape,
    pub cutoff_support_radius: f64,
    pub cutoff_eps_list: Vec<f64>,
    pub output_dir: PathBuf,
}

pub const KEYS: [&str; 16] = [
    "grid.n",
    "grid.rmax",
    "momentum.n",
    "momentum.pmax",
    "quad.reduced_n",
    "quad.angular_nodes",
    "solver.init",
    "solver.mixing",
    "solver.tol_energy",
    "solver.tol_psi",
    "solver.max_iter",
    "oracle.step",
    "cutoff.shape",
    "cutoff.support_radius",
    "cutoff.eps_list",
    "output.dir",
];

impl Default for RunConfig {
    fn default() -> Self {
        let solver = SolverOptions::default();
        RunConfig {
            grid_n: solver.n,
            grid_rmax: solver.rmax,
            momentum_n: DEFAULT_MOMENTUM_N,
            momentum_pmax: DEFAULT_PMAX,
            quad_reduced_n: DEFAULT_REDUCED_N,
            quad_angular_nodes: DEFAULT_ANGULAR_NODES,
            solver_init: solver.init,
            solver_mixing: solver.mixing,
            solver_tol_energy: solver.tol_energy,
            solver_tol_psi: solver.tol_psi,
            solver_max_iter: solver.max_iter,
            oracle_step: DEFAULT_FLOW_STEP,
            cutoff_shape: CutoffShape::Bump,
            cutoff_support_radius: DEFAULT_SUPPORT_RADIUS,
            cutoff_eps_list: DEFAULT_EPS_LIST.to_vec(),
            output_dir: PathBuf::from("polaron-out"),
        }
    }
}

fn positive_int(key: &str, v: &Value, min: usize) -> Result<usize, ConfigError> {
    match v.as_u64() {
        Some(x) if x as usize >= min => Ok(x as usize),
        _ => Err(ConfigError::new(key, format!("expected an integer >= {min}, got {v}"))),
    }
}

fn positive_real(key: &str, v: &Value) -> Result<f64, ConfigError> {
    match v.as_f64() {
        Some(x) if x > 0.0 && x.is_finite() => Ok(x),
        _ => Err(ConfigError::new(key, format!("expected a positive number, got {v}"))),
    }
}

fn string<'a>(key: &str, v: &'a Value) -> Result<&'a str, ConfigError> {
    v.as_str()
        .ok_or_else(|| ConfigError::new(key, format!("expected a string, got {v}")))
}

impl RunConfig {
    pub fn from_json_str(text: &str) -> Result<Self, ConfigError> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| ConfigError::new("<config>", format!("not valid JSON: {e}")))?;
        let Value::Object(map) = value else {
            return Err(ConfigError::new("<config>", "expected a JSON object with dotted keys"));
        };
        Self::from_map(&map)
    }

    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("<config>", format!("cannot read {}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn from_map(map: &Map<String, Value>) -> Result<Self, ConfigError> {
        let mut cfg = RunConfig::default();
        for (key, v) in map {
            match key.as_str() {
                "grid.n" => cfg.grid_n = positive_int(key, v, 4)?,
                "grid.rmax" => cfg.grid_rmax = positive_real(key, v)?,
                "momentum.n" => cfg.momentum_n = positive_int(key, v, 4)?,
                "momentum.pmax" => cfg.momentum_pmax = positive_real(key, v)?,
                "quad.reduced_n" => cfg.quad_reduced_n = positive_int(key, v, 2)?,
                "quad.angular_nodes" => cfg.quad_angular_nodes = positive_int(key, v, 2)?,
                "solver.init" => {
                    cfg.solver_init = string(key, v)?
                        .parse()
                        .map_err(|e: crate::PolaronError| ConfigError::new(key, e.to_string()))?
                }
                "solver.mixing" => {
                    let m = positive_real(key, v)?;
                    if m > 1.0 {
                        return Err(ConfigError::new(key, format!("must lie in (0, 1], got {m}")));
                    }
                    cfg.solver_mixing = m;
                }
                "solver.tol_energy" => cfg.solver_tol_energy = positive_real(key, v)?,
                "solver.tol_psi" => cfg.solver_tol_psi = positive_real(key, v)?,
                "solver.max_iter" => cfg.solver_max_iter = positive_int(key, v, 1)?,
                "oracle.step" => cfg.oracle_step = positive_real(key, v)?,
                "cutoff.shape" => {
                    cfg.cutoff_shape = string(key, v)?
                        .parse()
                        .map_err(|e: crate::PolaronError| ConfigError::new(key, e.to_string()))?
                }
                "cutoff.support_radius" => cfg.cutoff_support_radius = positive_real(key, v)?,
                "cutoff.eps_list" => cfg.cutoff_eps_list = eps_list(key, v)?,
                "output.dir" => cfg.output_dir = PathBuf::from(string(key, v)?),
                other => {
                    return Err(ConfigError::new(
                        other,
                        format!("unknown key (known keys: {})", KEYS.join(", ")),
                    ))
                }
            }
        }
        Ok(cfg)
    }

    pub fn solver_options(&self) -> SolverOptions {
        SolverOptions {
            n: self.grid_n,
            rmax: self.grid_rmax,
            init: self.solver_init,
            mixing: self.solver_mixing,
            tol_energy: self.solver_tol_energy,
            tol_psi: self.solver_tol_psi,
            max_iter: self.solver_max_iter,
        }
    }

    pub fn quadrature(&self) -> AngularQuadrature {
        AngularQuadrature::new(self.quad_reduced_n, self.quad_angular_nodes).expect("validated at parse time")
    }

    /// The resolved configuration as a flat, key-sorted JSON object.
    pub fn to_flat_json(&self) -> Value {
        let num = |x: f64| Value::Number(Number::from_f64(x).expect("finite"));
        let mut m = BTreeMap::new();
        m.insert("grid.n", Value::from(self.grid_n));
        m.insert("grid.rmax", num(self.grid_rmax));
        m.insert("momentum.n", Value::from(self.momentum_n));
        m.insert("momentum.pmax", num(self.momentum_pmax));
        m.insert("quad.reduced_n", Value::from(self.quad_reduced_n));
        m.insert("quad.angular_nodes", Value::from(self.quad_angular_nodes));
        m.insert("solver.init", Value::from(init_name(self.solver_init)));
        m.insert("solver.mixing", num(self.solver_mixing));
        m.insert("solver.tol_energy", num(self.solver_tol_energy));
        m.insert("solver.tol_psi", num(self.solver_tol_psi));
        m.insert("solver.max_iter", Value::from(self.solver_max_iter));
        m.insert("oracle.step", num(self.oracle_step));
        m.insert("cutoff.shape", Value::from(self.cutoff_shape.to_string()));
        m.insert("cutoff.support_radius", num(self.cutoff_support_radius));
        m.insert(
            "cutoff.eps_list",
            Value::Array(self.cutoff_eps_list.iter().map(|&e| num(e)).collect()),
        );
        m.insert(
            "output.dir",
            Value::from(self.output_dir.to_string_lossy().into_owned()),
        );
        Value::Object(m.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
    }

    pub fn canonical_json(&self) -> String {
        serde_json::to_string(&self.to_flat_json()).expect("serializable")
    }

    pub fn sha256(&self) -> String {
        sha256_hex(self.canonical_json().as_bytes())
    }
}

fn init_name(init: InitialProfile) -> &'static str {
    match init {
        InitialProfile::Hydrogenic => "hydrogenic",
        InitialProfile::Gaussian => "gaussian",
    }
}

fn eps_list(key: &str, v: &Value) -> Result<Vec<f64>, ConfigError> {
    let arr = v
        .as_array()
        .ok_or_else(|| ConfigError::new(key, format!("expected an array of numbers, got {v}")))?;
    if arr.is_empty() {
        return Err(ConfigError::new(key, "must not be empty"));
    }
    let list = arr
        .iter()
        .map(|x| positive_real(key, x))
        .collect::<Result<Vec<_>, _>>()?;
    if list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(ConfigError::new(key, "must be strictly decreasing"));
    }
    Ok(list)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_gives_defaults() {
        assert_eq!(RunConfig::from_json_str("{}").unwrap(), RunConfig::default());
    }

    #[test]
    fn flat_json_round_trips() {
        let cfg = RunConfig::from_json_str(
            r#"{"grid.n": 1200, "cutoff.eps_list": [0.4, 0.1], "solver.init": "gaussian", "output.dir": "x"}"#,
        )
        .unwrap();
        assert_eq!(cfg.grid_n, 1200);
        let again = RunConfig::from_json_str(&cfg.canonical_json()).unwrap();
        assert_eq!(again, cfg);
        assert_eq!(again.sha256(), cfg.sha256());
        assert_ne!(RunConfig::default().sha256(), cfg.sha256());
    }

    #[test]
    fn errors_name_the_field() {
        let cases = [
            (r#"{"grid.n": 0}"#, "grid.n"),
            (r#"{"grid.rmax": -1}"#, "grid.rmax"),
            (r#"{"solver.mixing": 1.5}"#, "solver.mixing"),
            (r#"{"solver.tol_psi": 0}"#, "solver.tol_psi"),
            (r#"{"cutoff.eps_list": [0.1, 0.2]}"#, "cutoff.eps_list"),
            (r#"{"cutoff.eps_list": []}"#, "cutoff.eps_list"),
            (r#"{"cutoff.shape": "box"}"#, "cutoff.shape"),
            (r#"{"quad.angular_nodes": 1}"#, "quad.angular_nodes"),
            (r#"{"grid.size": 10}"#, "grid.size"),
        ];
        for (text, field) in cases {
            let err = RunConfig::from_json_str(text).unwrap_err();
            assert_eq!(err.field, field, "{text}");
            assert!(err.to_string().starts_with(field));
        }
        assert_eq!(RunConfig::from_json_str("[1]").unwrap_err().field, "<config>");
        assert_eq!(RunConfig::from_json_str("{").unwrap_err().field, "<config>");
    }
}
