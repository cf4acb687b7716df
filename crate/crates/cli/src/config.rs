// src/config.rs
//
// Experiment configuration: a flat JSON document parsed fail-closed. Every
// key is checked against the schema of the named experiment; unknown keys
// are rejected with a nearest-key suggestion, and every violation names
// the offending key.

use std::collections::BTreeMap;
use std::path::Path;

use serde_json::Value;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Profile,
    Cube,
    Dislocation,
    EntropyCheck,
    IdentitySuite,
    Minimize,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::Profile,
        Experiment::Cube,
        Experiment::Dislocation,
        Experiment::EntropyCheck,
        Experiment::IdentitySuite,
        Experiment::Minimize,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Profile => "profile",
            Experiment::Cube => "cube",
            Experiment::Dislocation => "dislocation",
            Experiment::EntropyCheck => "entropy-check",
            Experiment::IdentitySuite => "identity-suite",
            Experiment::Minimize => "minimize",
        }
    }

    pub fn from_name(name: &str) -> Option<Experiment> {
        Experiment::ALL.into_iter().find(|e| e.name() == name)
    }
}

/// Jump-state pair shared by the profile and minimizer experiments.
#[derive(Debug, Clone)]
pub struct StatesConfig {
    pub m_plus: [f64; 3],
    pub m_minus: [f64; 3],
    pub t_max: f64,
    pub tol: f64,
}

#[derive(Debug, Clone)]
pub struct ProfileConfig {
    pub states: StatesConfig,
    pub epsilon: f64,
}

#[derive(Debug, Clone)]
pub struct MinimizeExperimentConfig {
    pub states: StatesConfig,
    pub epsilon: f64,
    pub shape: [usize; 3],
    pub bounds: [[f64; 2]; 3],
    pub max_iters: usize,
    pub grad_tol: f64,
    pub slab_frac: f64,
    pub blend_frac: f64,
    pub window_frac: f64,
    pub frame_clamp: bool,
    pub armijo: f64,
    pub fixed_step: Option<f64>,
    pub lp: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct DislocationConfig {
    pub b: f64,
    pub epsilon: f64,
    pub sign: i32,
    pub shape: [usize; 3],
    pub bounds: [[f64; 2]; 3],
}

#[derive(Debug, Clone)]
pub struct EntropyCheckConfig {
    pub samples: usize,
    pub n: usize,
    pub n_theta: usize,
}

#[derive(Debug, Clone)]
pub struct IdentitySuiteConfig {
    pub epsilon: f64,
    pub grids: Vec<usize>,
}

#[derive(Debug, Clone)]
pub enum Params {
    Profile(ProfileConfig),
    Cube(MinimizeExperimentConfig),
    Dislocation(DislocationConfig),
    EntropyCheck(EntropyCheckConfig),
    IdentitySuite(IdentitySuiteConfig),
    Minimize(MinimizeExperimentConfig),
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub seed: u64,
    pub out: Option<String>,
    pub params: Params,
}

/// Edit distance for the unknown-key suggestion.
fn levenshtein(a: &str, b: &str) -> usize {
    let (a, b): (Vec<char>, Vec<char>) = (a.chars().collect(), b.chars().collect());
    let mut row: Vec<usize> = (0..=b.len()).collect();
    for (i, &ca) in a.iter().enumerate() {
        let mut prev = row[0];
        row[0] = i + 1;
        for (j, &cb) in b.iter().enumerate() {
            let cost = if ca == cb { prev } else { prev + 1 };
            prev = row[j + 1];
            row[j + 1] = cost.min(prev + 1).min(row[j] + 1);
        }
    }
    row[b.len()]
}

fn nearest_key(key: &str, allowed: &[&str]) -> Option<String> {
    allowed
        .iter()
        .map(|&k| (levenshtein(key, k), k))
        .min()
        .filter(|&(d, k)| d <= (k.len() / 2).max(2))
        .map(|(_, k)| k.to_string())
}

/// The config document with type- and range-checked key access; every
/// error message carries the key it refers to.
struct Doc {
    map: BTreeMap<String, Value>,
}

impl Doc {
    fn check_no_unknown_keys(&self, allowed: &[&str]) -> Result<(), CliError> {
        for key in self.map.keys() {
            if !allowed.contains(&key.as_str()) {
                let mut msg = format!("unknown key \"{key}\"");
                if let Some(near) = nearest_key(key, allowed) {
                    msg.push_str(&format!(" (did you mean \"{near}\"?)"));
                }
                return Err(CliError::Config(msg));
            }
        }
        Ok(())
    }

    fn f64(&self, key: &str, default: f64) -> Result<f64, CliError> {
        match self.map.get(key) {
            None => Ok(default),
            Some(Value::Number(n)) => n
                .as_f64()
                .ok_or_else(|| CliError::Config(format!("\"{key}\" is not a finite number"))),
            Some(_) => Err(CliError::Config(format!("\"{key}\" must be a number"))),
        }
    }

    fn positive_f64(&self, key: &str, default: f64) -> Result<f64, CliError> {
        let v = self.f64(key, default)?;
        if !v.is_finite() || v <= 0.0 {
            return Err(CliError::Config(format!(
                "\"{key}\" must be > 0 (got {v})"
            )));
        }
        Ok(v)
    }

    fn usize(&self, key: &str, default: usize) -> Result<usize, CliError> {
        match self.map.get(key) {
            None => Ok(default),
            Some(Value::Number(n)) => n
                .as_u64()
                .map(|v| v as usize)
                .ok_or_else(|| {
                    CliError::Config(format!("\"{key}\" must be a nonnegative integer"))
                }),
            Some(_) => Err(CliError::Config(format!(
                "\"{key}\" must be a nonnegative integer"
            ))),
        }
    }

    fn bool(&self, key: &str, default: bool) -> Result<bool, CliError> {
        match self.map.get(key) {
            None => Ok(default),
            Some(Value::Bool(b)) => Ok(*b),
            Some(_) => Err(CliError::Config(format!("\"{key}\" must be true or false"))),
        }
    }

    fn string(&self, key: &str) -> Result<Option<String>, CliError> {
        match self.map.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(_) => Err(CliError::Config(format!("\"{key}\" must be a string"))),
        }
    }

    fn vec3(&self, key: &str, default: [f64; 3]) -> Result<[f64; 3], CliError> {
        match self.map.get(key) {
            None => Ok(default),
            Some(Value::Array(items)) if items.len() == 3 => {
                let mut out = [0.0; 3];
                for (i, item) in items.iter().enumerate() {
                    out[i] = item.as_f64().ok_or_else(|| {
                        CliError::Config(format!("\"{key}\"[{i}] must be a number"))
                    })?;
                }
                Ok(out)
            }
            Some(_) => Err(CliError::Config(format!(
                "\"{key}\" must be an array of 3 numbers"
            ))),
        }
    }

    fn bounds(&self, key: &str, default: [[f64; 2]; 3]) -> Result<[[f64; 2]; 3], CliError> {
        match self.map.get(key) {
            None => Ok(default),
            Some(Value::Array(axes)) if axes.len() == 3 => {
                let mut out = [[0.0; 2]; 3];
                for (a, axis) in axes.iter().enumerate() {
                    let pair = axis.as_array().filter(|p| p.len() == 2).ok_or_else(|| {
                        CliError::Config(format!("\"{key}\"[{a}] must be a [lo, hi] pair"))
                    })?;
                    for (i, item) in pair.iter().enumerate() {
                        out[a][i] = item.as_f64().ok_or_else(|| {
                            CliError::Config(format!("\"{key}\"[{a}][{i}] must be a number"))
                        })?;
                    }
                    if !(out[a][0] < out[a][1]) {
                        return Err(CliError::Config(format!(
                            "\"{key}\"[{a}] must satisfy lo < hi (got [{}, {}])",
                            out[a][0], out[a][1]
                        )));
                    }
                }
                Ok(out)
            }
            Some(_) => Err(CliError::Config(format!(
                "\"{key}\" must be an array of 3 [lo, hi] pairs"
            ))),
        }
    }

    fn usize_list(&self, key: &str, default: &[usize]) -> Result<Vec<usize>, CliError> {
        match self.map.get(key) {
            None => Ok(default.to_vec()),
            Some(Value::Array(items)) if !items.is_empty() => items
                .iter()
                .enumerate()
                .map(|(i, item)| {
                    item.as_u64().map(|v| v as usize).ok_or_else(|| {
                        CliError::Config(format!(
                            "\"{key}\"[{i}] must be a nonnegative integer"
                        ))
                    })
                })
                .collect(),
            Some(_) => Err(CliError::Config(format!(
                "\"{key}\" must be a nonempty array of integers"
            ))),
        }
    }

    fn f64_list(&self, key: &str, default: &[f64]) -> Result<Vec<f64>, CliError> {
        match self.map.get(key) {
            None => Ok(default.to_vec()),
            Some(Value::Array(items)) if !items.is_empty() => items
                .iter()
                .enumerate()
                .map(|(i, item)| {
                    item.as_f64().ok_or_else(|| {
                        CliError::Config(format!("\"{key}\"[{i}] must be a number"))
                    })
                })
                .collect(),
            Some(_) => Err(CliError::Config(format!(
                "\"{key}\" must be a nonempty array of numbers"
            ))),
        }
    }
}

const COMMON_KEYS: [&str; 3] = ["experiment", "seed", "out"];

const PROFILE_T_MAX: f64 = 40.0;
const PROFILE_TOL: f64 = 1e-10;

fn states(doc: &Doc, default_plus: [f64; 3], default_minus: [f64; 3]) -> Result<StatesConfig, CliError> {
    Ok(StatesConfig {
        m_plus: doc.vec3("m_plus", default_plus)?,
        m_minus: doc.vec3("m_minus", default_minus)?,
        t_max: doc.positive_f64("t_max", PROFILE_T_MAX)?,
        tol: doc.positive_f64("tol", PROFILE_TOL)?,
    })
}

const CUBE_PLUS: [f64; 3] = [1.0, 0.0, 0.5];
const CUBE_MINUS: [f64; 3] = [-1.0, 0.0, 0.5];
const UNIT_BOX: [[f64; 2]; 3] = [[-0.5, 0.5]; 3];

fn minimize_params(
    doc: &Doc,
    defaults: (f64, [usize; 3], usize, bool),
) -> Result<MinimizeExperimentConfig, CliError> {
    let (d_eps, d_shape, d_iters, d_frame) = defaults;
    let fixed_step = match doc.map.contains_key("fixed_step") {
        true => Some(doc.positive_f64("fixed_step", 1.0)?),
        false => None,
    };
    let armijo = doc.positive_f64("armijo", 1e-4)?;
    if armijo >= 1.0 {
        return Err(CliError::Config(format!(
            "\"armijo\" must lie in (0, 1) (got {armijo})"
        )));
    }
    Ok(MinimizeExperimentConfig {
        states: states(doc, CUBE_PLUS, CUBE_MINUS)?,
        epsilon: doc.positive_f64("epsilon", d_eps)?,
        shape: [
            doc.usize("nx", d_shape[0])?,
            doc.usize("ny", d_shape[1])?,
            doc.usize("nz", d_shape[2])?,
        ],
        bounds: doc.bounds("bounds", UNIT_BOX)?,
        max_iters: doc.usize("max_iters", d_iters)?,
        grad_tol: doc.positive_f64("grad_tol", 1e-12)?,
        slab_frac: doc.positive_f64("slab_frac", 0.05)?,
        blend_frac: doc.positive_f64("blend_frac", 0.05)?,
        window_frac: doc.positive_f64("window_frac", 0.05)?,
        frame_clamp: doc.bool("frame_clamp", d_frame)?,
        armijo,
        fixed_step,
        lp: doc.f64_list("lp", &[2.0])?,
    })
}

const MINIMIZE_KEYS: [&str; 17] = [
    "m_plus", "m_minus", "t_max", "tol", "epsilon", "nx", "ny", "nz", "bounds", "max_iters",
    "grad_tol", "slab_frac", "blend_frac", "window_frac", "frame_clamp", "armijo", "fixed_step",
];

/// Parse and validate the JSON config document at `path`. The experiment
/// named on the command line must match the one named in the file.
pub fn parse_config(path: &Path, cli_experiment: Experiment) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        CliError::Config(format!("cannot read config {}: {e}", path.display()))
    })?;
    let value: Value = serde_json::from_str(&text).map_err(|e| {
        CliError::Config(format!("malformed JSON in {}: {e}", path.display()))
    })?;
    let Value::Object(map) = value else {
        return Err(CliError::Config(format!(
            "{} must contain a JSON object",
            path.display()
        )));
    };
    let doc = Doc {
        map: map.into_iter().collect(),
    };

    let Some(name) = doc.string("experiment")? else {
        return Err(CliError::Config(
            "missing required key \"experiment\"".into(),
        ));
    };
    let experiment = Experiment::from_name(&name).ok_or_else(|| {
        let names: Vec<&str> = Experiment::ALL.iter().map(|e| e.name()).collect();
        CliError::Config(format!(
            "\"experiment\" must be one of {} (got \"{name}\")",
            names.join(" | ")
        ))
    })?;
    if experiment != cli_experiment {
        return Err(CliError::Config(format!(
            "config names experiment \"{name}\" but the command line asked for \"{}\"",
            cli_experiment.name()
        )));
    }

    let seed = doc.usize("seed", 0)? as u64;
    let out = doc.string("out")?;

    fn with_common<'a>(keys: &[&'a str]) -> Vec<&'a str> {
        COMMON_KEYS.iter().chain(keys.iter()).copied().collect()
    }

    let params = match experiment {
        Experiment::Profile => {
            doc.check_no_unknown_keys(&with_common(&[
                "m_plus", "m_minus", "t_max", "tol", "epsilon",
            ]))?;
            Params::Profile(ProfileConfig {
                states: states(&doc, [1.0, 0.0, 0.5], [0.0; 3])?,
                epsilon: doc.positive_f64("epsilon", 1.0)?,
            })
        }
        Experiment::Cube => {
            doc.check_no_unknown_keys(&with_common(&MINIMIZE_KEYS))?;
            Params::Cube(minimize_params(&doc, (0.1, [49, 49, 49], 800, true))?)
        }
        Experiment::Minimize => {
            let mut keys: Vec<&str> = MINIMIZE_KEYS.to_vec();
            keys.push("lp");
            doc.check_no_unknown_keys(&with_common(&keys))?;
            Params::Minimize(minimize_params(&doc, (0.1, [49, 49, 49], 2000, false))?)
        }
        Experiment::Dislocation => {
            doc.check_no_unknown_keys(&with_common(&[
                "b", "epsilon", "sign", "nx", "ny", "nz", "bounds",
            ]))?;
            let sign_raw = doc.f64("sign", 1.0)?;
            let sign = if sign_raw == 1.0 {
                1
            } else if sign_raw == -1.0 {
                -1
            } else {
                return Err(CliError::Config(format!(
                    "\"sign\" must be 1 or -1 (got {sign_raw})"
                )));
            };
            let b = doc.f64("b", 0.5)?;
            if !b.is_finite() || b < 0.0 {
                return Err(CliError::Config(format!("\"b\" must be >= 0 (got {b})")));
            }
            Params::Dislocation(DislocationConfig {
                b,
                epsilon: doc.positive_f64("epsilon", 0.2)?,
                sign,
                shape: [
                    doc.usize("nx", 65)?,
                    doc.usize("ny", 3)?,
                    doc.usize("nz", 65)?,
                ],
                bounds: doc.bounds(
                    "bounds",
                    [[-2.5, 2.5], [-0.5, 0.5], [0.05, 0.55]],
                )?,
            })
        }
        Experiment::EntropyCheck => {
            doc.check_no_unknown_keys(&with_common(&["samples", "n", "n_theta"]))?;
            Params::EntropyCheck(EntropyCheckConfig {
                samples: doc.usize("samples", 10_000)?,
                n: doc.usize("n", 33)?,
                n_theta: doc.usize("n_theta", 360)?,
            })
        }
        Experiment::IdentitySuite => {
            doc.check_no_unknown_keys(&with_common(&["epsilon", "grids"]))?;
            let grids = doc.usize_list("grids", &[17, 33, 65])?;
            if grids.len() < 2 {
                return Err(CliError::Config(format!(
                    "\"grids\" needs at least 2 sizes for a refinement study (got {})",
                    grids.len()
                )));
            }
            if grids.windows(2).any(|w| w[1] <= w[0]) {
                return Err(CliError::Config(
                    "\"grids\" must be strictly increasing".into(),
                ));
            }
            Params::IdentitySuite(IdentitySuiteConfig {
                epsilon: doc.positive_f64("epsilon", 0.7)?,
                grids,
            })
        }
    };

    Ok(ExperimentConfig {
        experiment,
        seed,
        out,
        params,
    })
}
