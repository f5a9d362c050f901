//! Run configuration: a flat `key = value` file with command-line overrides.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use spinc_core::checks::ModelSettings;
use spinc_core::exterior::ModelParams;
use spinc_core::report::fmt_float;
use thiserror::Error;

/// Environment variable naming the default configuration file.
pub const CONFIG_ENV: &str = "SPINC_CONFIG";

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {msg}")]
    Io { path: String, msg: String },
    #[error("config line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("invalid value `{value}` for `{key}`: {msg}")]
    Value { key: String, value: String, msg: String },
}

fn invalid(key: &str, value: &str, msg: impl Into<String>) -> ConfigError {
    ConfigError::Value { key: key.into(), value: value.into(), msg: msg.into() }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub n: Option<usize>,
    pub cutoff: Option<usize>,
    pub a: Option<Vec<f64>>,
    pub flux: Vec<usize>,
    pub grid: usize,
    pub tol: f64,
    pub algebra_tol: f64,
    pub spectrum_tol: f64,
    pub trials: usize,
    pub seed: u64,
    pub instances: usize,
    pub rules: Option<PathBuf>,
    pub json_out: Option<PathBuf>,
    pub csv_out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n: None,
            cutoff: None,
            a: None,
            flux: vec![1, 2, 3, 4, 5],
            grid: 64,
            tol: 1e-6,
            algebra_tol: 1e-10,
            spectrum_tol: 1e-8,
            trials: 200,
            seed: 2024,
            instances: 21,
            rules: None,
            json_out: None,
            csv_out: None,
        }
    }
}

fn number<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e: T::Err| invalid(key, value, e.to_string()))
}

/// A real number, optionally a multiple of π: `6.28`, `2pi`, `-2π`, `4*pi`, `pi`.
pub fn parse_real(text: &str) -> Option<f64> {
    let t = text.trim();
    let stripped = t.strip_suffix("pi").or_else(|| t.strip_suffix('π'));
    match stripped {
        Some(coef) => {
            let coef = coef.trim().trim_end_matches('*').trim();
            let c = match coef {
                "" | "+" => 1.0,
                "-" => -1.0,
                c => c.parse().ok()?,
            };
            Some(c * PI)
        }
        None => t.parse().ok(),
    }
}

/// Comma-separated list of curvature eigenvalues.
pub fn parse_a_list(key: &str, value: &str) -> Result<Vec<f64>, ConfigError> {
    let a: Vec<f64> = value
        .split(',')
        .map(|s| parse_real(s).ok_or_else(|| invalid(key, value, format!("`{}` is not a number", s.trim()))))
        .collect::<Result<_, _>>()?;
    if a.iter().any(|x| *x == 0.0 || !x.is_finite()) {
        return Err(invalid(key, value, "entries must be finite and nonzero"));
    }
    Ok(a)
}

/// Comma-separated flux list; `a..b` ranges are inclusive.
pub fn parse_flux_list(key: &str, value: &str) -> Result<Vec<usize>, ConfigError> {
    let mut out = Vec::new();
    for part in value.split(',').map(str::trim) {
        match part.split_once("..") {
            Some((lo, hi)) => {
                let (lo, hi): (usize, usize) = (number(key, lo.trim())?, number(key, hi.trim())?);
                out.extend(lo..=hi);
            }
            None => out.push(number(key, part)?),
        }
    }
    if out.is_empty() {
        return Err(invalid(key, value, "empty list"));
    }
    Ok(out)
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Io { path: path.display().to_string(), msg: e.to_string() })?;
        Self::parse(&text)
    }

    /// Parses `key = value` lines on top of the defaults; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(ConfigError::Syntax { line: i + 1 })?;
            cfg.set(key.trim(), value.trim())?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "n" => self.n = Some(number(key, value)?),
            "cutoff" => self.cutoff = Some(number(key, value)?),
            "a" => self.a = Some(parse_a_list(key, value)?),
            "flux" => self.flux = parse_flux_list(key, value)?,
            "grid" => self.grid = number(key, value)?,
            "tol" => self.tol = number(key, value)?,
            "algebra_tol" => self.algebra_tol = number(key, value)?,
            "spectrum_tol" => self.spectrum_tol = number(key, value)?,
            "trials" => self.trials = number(key, value)?,
            "seed" => self.seed = number(key, value)?,
            "instances" => self.instances = number(key, value)?,
            "rules" => self.rules = Some(value.into()),
            "json_out" => self.json_out = Some(value.into()),
            "csv_out" => self.csv_out = Some(value.into()),
            _ => return Err(ConfigError::UnknownKey(key.into())),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = |key: &str, v: usize| if v == 0 { Err(invalid(key, "0", "must be positive")) } else { Ok(()) };
        let tol = |key: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(invalid(key, &v.to_string(), "must be positive"))
            }
        };
        if let Some(n) = self.n {
            positive("n", n)?;
        }
        if let Some(c) = self.cutoff {
            positive("cutoff", c)?;
        }
        if let (Some(n), Some(a)) = (self.n, &self.a) {
            if a.len() != n {
                return Err(invalid("a", &format!("{} entries", a.len()), format!("n = {n} requires {n} entries")));
            }
        }
        for &p in &self.flux {
            positive("flux", p)?;
        }
        positive("grid", self.grid)?;
        positive("trials", self.trials)?;
        positive("instances", self.instances)?;
        tol("tol", self.tol)?;
        tol("algebra_tol", self.algebra_tol)?;
        tol("spectrum_tol", self.spectrum_tol)?;
        Ok(())
    }

    /// Curvature eigenvalues: the explicit list, else `2π` in each of `n` directions.
    pub fn params(&self) -> ModelParams {
        let a = self.a.clone().unwrap_or_else(|| vec![2.0 * PI; self.n.unwrap_or(1)]);
        ModelParams::new(a).expect("validated nonzero")
    }

    /// Default cutoff: 40 in one direction, 12 otherwise.
    pub fn cutoff(&self) -> usize {
        self.cutoff.unwrap_or(if self.params().n() == 1 { 40 } else { 12 })
    }

    pub fn settings(&self) -> ModelSettings {
        ModelSettings {
            tol: self.tol,
            algebra_tol: self.algebra_tol,
            spectrum_tol: self.spectrum_tol,
            trials: self.trials,
            seed: self.seed,
            ..ModelSettings::new(self.params(), self.cutoff())
        }
    }

    /// Resolved configuration as sorted strings; output paths are omitted so
    /// the report does not depend on where it is written.
    pub fn echo(&self) -> BTreeMap<String, String> {
        let p = self.params();
        let list = |v: Vec<String>| v.join(",");
        let mut m = BTreeMap::new();
        m.insert("n".into(), p.n().to_string());
        m.insert("a".into(), list(p.a.iter().map(|x| fmt_float(*x)).collect()));
        m.insert("cutoff".into(), self.cutoff().to_string());
        m.insert("flux".into(), list(self.flux.iter().map(|x| x.to_string()).collect()));
        m.insert("grid".into(), self.grid.to_string());
        m.insert("tol".into(), fmt_float(self.tol));
        m.insert("algebra_tol".into(), fmt_float(self.algebra_tol));
        m.insert("spectrum_tol".into(), fmt_float(self.spectrum_tol));
        m.insert("trials".into(), self.trials.to_string());
        m.insert("seed".into(), self.seed.to_string());
        m.insert("instances".into(), self.instances.to_string());
        m.insert("rules".into(), self.rules.as_ref().map_or("bundled".into(), |r| r.display().to_string()));
        m
    }
}
