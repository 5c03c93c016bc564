//! Line-oriented `key = value` configuration shared by all subcommands.

use std::collections::HashMap;
use std::fmt;

use spinepr_core::PopulationModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scale {
    Linear,
    #[default]
    Log,
}

/// Monte-Carlo settings: sample count, seed and verifying-pulse parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub m: usize,
    pub seed: u64,
    pub alpha: f64,
    pub n_p: f64,
    pub r_light: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub z_min: f64,
    pub z_max: f64,
    pub z_steps: usize,
    pub scale: Scale,
    pub d: f64,
    pub gamma: f64,
    pub gamma_d_add_list: Vec<f64>,
    pub n_atoms: f64,
    pub pop: PopulationModel,
    pub mc: Option<McConfig>,
    pub output: String,
    /// Operating point for the `steady`, `dynamics` and `montecarlo` commands.
    pub z: f64,
    pub t_end: Option<f64>,
    pub h: Option<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            z_min: 1.0,
            z_max: 4.0,
            z_steps: 300,
            scale: Scale::Log,
            d: 30.0,
            gamma: 1.0,
            gamma_d_add_list: vec![0.0, 2.0, 5.0],
            n_atoms: 1e6,
            pop: PopulationModel::RateBalance,
            mc: None,
            output: "-".into(),
            z: 2.0,
            t_end: None,
            h: None,
        }
    }
}

impl SweepConfig {
    /// Non-radiative dephasing used by the single-point commands.
    pub fn gamma_d_add(&self) -> f64 {
        self.gamma_d_add_list[0]
    }

    pub fn writes_stdout(&self) -> bool {
        self.output == "-"
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub key: Option<String>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, &self.key) {
            (Some(line), Some(key)) => write!(f, "line {line}, key `{key}`: {}", self.message),
            (Some(line), None) => write!(f, "line {line}: {}", self.message),
            (None, Some(key)) => write!(f, "key `{key}`: {}", self.message),
            (None, None) => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

const KEYS: &[&str] = &[
    "z_min",
    "z_max",
    "z_steps",
    "scale",
    "d",
    "gamma",
    "gamma_d_add_list",
    "N",
    "pop",
    "p2_fixed",
    "mc_m",
    "mc_seed",
    "mc_alpha",
    "mc_n_p",
    "mc_r_light",
    "output",
    "z",
    "t_end",
    "h",
];

struct Entries {
    values: HashMap<String, (usize, String)>,
}

impl Entries {
    fn err(&self, key: &str, message: impl Into<String>) -> ConfigError {
        ConfigError {
            line: self.values.get(key).map(|(l, _)| *l),
            key: Some(key.to_string()),
            message: message.into(),
        }
    }

    fn has(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|(_, v)| v.as_str())
    }

    fn real(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        self.raw(key)
            .map(|v| {
                v.parse::<f64>()
                    .ok()
                    .filter(|x| !x.is_nan())
                    .ok_or_else(|| self.err(key, format!("malformed number `{v}`")))
            })
            .transpose()
    }

    fn count(&self, key: &str) -> Result<Option<u64>, ConfigError> {
        self.raw(key)
            .map(|v| {
                v.parse::<u64>()
                    .ok()
                    .or_else(|| {
                        // Accept integral values written like `1e6`.
                        v.parse::<f64>()
                            .ok()
                            .filter(|x| x.fract() == 0.0 && *x >= 0.0 && *x <= u64::MAX as f64)
                            .map(|x| x as u64)
                    })
                    .ok_or_else(|| self.err(key, format!("malformed count `{v}`")))
            })
            .transpose()
    }
}

fn tokenize(text: &str) -> Result<Entries, ConfigError> {
    let mut values = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| ConfigError {
            line: Some(line_no),
            key: None,
            message: format!("expected `key = value`, got `{line}`"),
        })?;
        let key = key.trim();
        let value = value.trim();
        if !KEYS.contains(&key) {
            return Err(ConfigError {
                line: Some(line_no),
                key: Some(key.to_string()),
                message: "unknown key".into(),
            });
        }
        if value.is_empty() {
            return Err(ConfigError {
                line: Some(line_no),
                key: Some(key.to_string()),
                message: "missing value".into(),
            });
        }
        if let Some((first, _)) = values.insert(key.to_string(), (line_no, value.to_string())) {
            return Err(ConfigError {
                line: Some(line_no),
                key: Some(key.to_string()),
                message: format!("duplicate key, first set on line {first}"),
            });
        }
    }
    Ok(Entries { values })
}

/// Parses and validates a configuration. Absent keys take their defaults.
pub fn parse_config(text: &str) -> Result<SweepConfig, ConfigError> {
    let e = tokenize(text)?;
    let mut cfg = SweepConfig::default();

    macro_rules! set_real {
        ($key:literal, $field:expr) => {
            if let Some(v) = e.real($key)? {
                $field = v;
            }
        };
    }
    set_real!("z_min", cfg.z_min);
    set_real!("z_max", cfg.z_max);
    set_real!("d", cfg.d);
    set_real!("gamma", cfg.gamma);
    set_real!("N", cfg.n_atoms);
    set_real!("z", cfg.z);
    cfg.t_end = e.real("t_end")?;
    cfg.h = e.real("h")?;
    if let Some(n) = e.count("z_steps")? {
        cfg.z_steps = n as usize;
    }
    if let Some(v) = e.raw("scale") {
        cfg.scale = match v {
            "log" => Scale::Log,
            "linear" => Scale::Linear,
            other => {
                return Err(e.err(
                    "scale",
                    format!("expected `log` or `linear`, got `{other}`"),
                ))
            }
        };
    }
    if let Some(v) = e.raw("gamma_d_add_list") {
        cfg.gamma_d_add_list = v
            .split(',')
            .map(|item| {
                let item = item.trim();
                item.parse::<f64>()
                    .ok()
                    .filter(|x| !x.is_nan())
                    .ok_or_else(|| e.err("gamma_d_add_list", format!("malformed number `{item}`")))
            })
            .collect::<Result<_, _>>()?;
    }
    if let Some(v) = e.raw("output") {
        cfg.output = v.to_string();
    }

    let p2_fixed = e.real("p2_fixed")?;
    cfg.pop = match e.raw("pop").unwrap_or("derived") {
        "derived" => {
            if p2_fixed.is_some() {
                return Err(e.err("p2_fixed", "only valid with `pop = fixed`"));
            }
            PopulationModel::RateBalance
        }
        "fixed" => {
            let v = p2_fixed.ok_or_else(|| e.err("pop", "`pop = fixed` requires `p2_fixed`"))?;
            PopulationModel::fixed(v).map_err(|_| e.err("p2_fixed", "must lie in [0, 1]"))?
        }
        other => {
            return Err(e.err(
                "pop",
                format!("expected `derived` or `fixed`, got `{other}`"),
            ))
        }
    };

    let mc_keys = ["mc_seed", "mc_alpha", "mc_n_p", "mc_r_light"];
    cfg.mc = match e.count("mc_m")? {
        Some(m) => Some(McConfig {
            m: m as usize,
            seed: e.count("mc_seed")?.unwrap_or(0),
            alpha: e.real("mc_alpha")?.unwrap_or(f64::INFINITY),
            n_p: e.real("mc_n_p")?.unwrap_or(cfg.n_atoms),
            r_light: e.real("mc_r_light")?.unwrap_or(0.0),
        }),
        None => {
            if let Some(k) = mc_keys.iter().find(|k| e.has(k)) {
                return Err(e.err(k, "Monte-Carlo settings require `mc_m`"));
            }
            None
        }
    };

    validate(&cfg, &e)?;
    Ok(cfg)
}

fn validate(cfg: &SweepConfig, e: &Entries) -> Result<(), ConfigError> {
    let finite_at_least = |key: &str, v: f64, min: f64| {
        if !v.is_finite() || v < min {
            Err(e.err(key, format!("must be finite and >= {min}, got {v}")))
        } else {
            Ok(())
        }
    };
    finite_at_least("z_min", cfg.z_min, 1.0)?;
    finite_at_least("z_max", cfg.z_max, 1.0)?;
    if cfg.z_min > cfg.z_max {
        return Err(e.err("z_min", "z_min > z_max"));
    }
    if cfg.z_steps < 1 {
        return Err(e.err("z_steps", "must be >= 1"));
    }
    finite_at_least("d", cfg.d, 0.0)?;
    if !(cfg.gamma > 0.0) || !cfg.gamma.is_finite() {
        return Err(e.err("gamma", "must be finite and > 0"));
    }
    if cfg.gamma_d_add_list.is_empty() {
        return Err(e.err("gamma_d_add_list", "must not be empty"));
    }
    for &g in &cfg.gamma_d_add_list {
        finite_at_least("gamma_d_add_list", g, 0.0)?;
    }
    if !(cfg.n_atoms > 0.0) || !cfg.n_atoms.is_finite() {
        return Err(e.err("N", "must be finite and > 0"));
    }
    finite_at_least("z", cfg.z, 1.0)?;
    if let Some(t) = cfg.t_end {
        if !(t > 0.0) || !t.is_finite() {
            return Err(e.err("t_end", "must be finite and > 0"));
        }
    }
    if let Some(h) = cfg.h {
        if !(h > 0.0) || !h.is_finite() {
            return Err(e.err("h", "must be finite and > 0"));
        }
    }
    if let Some(mc) = &cfg.mc {
        if mc.m < 100 {
            return Err(e.err("mc_m", "must be >= 100"));
        }
        if !(mc.alpha > 0.0) {
            return Err(e.err("mc_alpha", "must be > 0"));
        }
        if !(mc.n_p > 0.0) || !mc.n_p.is_finite() {
            return Err(e.err("mc_n_p", "must be finite and > 0"));
        }
        if !mc.r_light.is_finite() {
            return Err(e.err("mc_r_light", "must be finite"));
        }
    }
    if cfg.output.is_empty() {
        return Err(e.err("output", "must not be empty"));
    }
    Ok(())
}
