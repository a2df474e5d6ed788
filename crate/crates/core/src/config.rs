//! Flat `key = value` configuration files.
//!
//! ```text
//! # comment
//! family = gamma-law
//! gamma = 1.3333333333333333
//! ```
//!
//! Unknown keys are rejected so that typos surface as errors.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::eos::{BarotropicEos, IdealGasEos, IsentropicEos};
use crate::error::{Error, Result};
use crate::fvsim::{Boundary, Profile, SimConfig};

pub const KNOWN_KEYS: &[&str] = &[
    // equation of state
    "family", "gamma", "m", "kappa", "k", "c_v", "table", "p_ref",
    // grids
    "p_min", "p_max", "n_min", "n_max", "states", "covectors", "shocks",
    // shocks
    "p_minus", "p_plus", "n_minus", "sigma_minus", "v_minus",
    // simulation
    "preset", "profile", "n", "length", "cfl", "t_end", "snapshots", "boundary",
    "second_order", "t_shock", "p", "v", "p0", "amp", "v0", "v_amp",
    "p_left", "v_left", "p_right", "v_right", "x0",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct KeyValues {
    entries: BTreeMap<String, String>,
    /// Directory relative paths (`table`) are resolved against.
    base: PathBuf,
}

impl KeyValues {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value, got {line:?}", i + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            if !KNOWN_KEYS.contains(&k) {
                return Err(Error::Config(format!("line {}: unknown key {k:?}", i + 1)));
            }
            if v.is_empty() {
                return Err(Error::Config(format!("line {}: empty value for {k}", i + 1)));
            }
            if entries.insert(k.to_string(), v.to_string()).is_some() {
                return Err(Error::Config(format!("line {}: duplicate key {k}", i + 1)));
            }
        }
        Ok(Self {
            entries,
            base: PathBuf::new(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let mut kv = Self::parse(&text)?;
        kv.base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(kv)
    }

    pub fn entries(&self) -> &BTreeMap<String, String> {
        &self.entries
    }

    pub fn set(&mut self, key: &str, value: &str) {
        self.entries.insert(key.to_string(), value.to_string());
    }

    pub fn str(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn f64(&self, key: &str) -> Result<Option<f64>> {
        self.str(key)
            .map(|v| {
                v.parse::<f64>()
                    .ok()
                    .filter(|x| !x.is_nan())
                    .ok_or_else(|| Error::Config(format!("{key} = {v:?} is not a number")))
            })
            .transpose()
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        Ok(self.f64(key)?.unwrap_or(default))
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        match self.str(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| Error::Config(format!("{key} = {v:?} is not a non-negative integer"))),
        }
    }

    pub fn bool_or(&self, key: &str, default: bool) -> Result<bool> {
        match self.str(key) {
            None => Ok(default),
            Some("true" | "1" | "yes") => Ok(true),
            Some("false" | "0" | "no") => Ok(false),
            Some(v) => Err(Error::Config(format!("{key} = {v:?} is not a boolean"))),
        }
    }

    /// Positive finite value, defaulted.
    pub fn positive_or(&self, key: &str, default: f64) -> Result<f64> {
        let x = self.f64_or(key, default)?;
        if !(x > 0.0 && x.is_finite()) {
            return Err(Error::Config(format!("{key} = {x} must be positive")));
        }
        Ok(x)
    }

    /// `(p_min, p_max)` with both positive and ordered.
    pub fn pressure_range(&self, lo: f64, hi: f64) -> Result<(f64, f64)> {
        let a = self.positive_or("p_min", lo)?;
        let b = self.positive_or("p_max", hi)?;
        if !(b > a) {
            return Err(Error::Config(format!("p_max = {b} must exceed p_min = {a}")));
        }
        Ok((a, b))
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        self.str(key).map(|v| self.base.join(v))
    }
}

/// Equation of state selected by `family`.
#[derive(Debug, Clone, PartialEq)]
pub enum EosSpec {
    Barotropic {
        eos: BarotropicEos,
        /// The isentropic fluid inducing `eos`, when there is one.
        isentropic: Option<IsentropicEos>,
    },
    IdealGas(IdealGasEos),
}

impl EosSpec {
    pub fn from_config(kv: &KeyValues) -> Result<Self> {
        let family = kv.str("family").unwrap_or("gamma-law");
        Ok(match family {
            "gamma-law" => {
                let gamma = kv.f64_or("gamma", 4.0 / 3.0)?;
                if !(gamma > 1.0 && gamma.is_finite()) {
                    return Err(Error::Config(format!("gamma = {gamma} must exceed 1")));
                }
                EosSpec::Barotropic {
                    // acausal gamma is kept so that verification can flag it
                    eos: BarotropicEos::gamma_law_unchecked(gamma),
                    isentropic: IsentropicEos::massless_gamma(gamma).ok(),
                }
            }
            "stiff" => EosSpec::Barotropic {
                eos: BarotropicEos::stiff(),
                isentropic: Some(IsentropicEos::stiff()),
            },
            "polytrope" => {
                let (m, kappa, gamma) = (kv.f64_or("m", 1.0)?, kv.f64_or("kappa", 1.0)?, kv.f64_or("gamma", 5.0 / 3.0)?);
                EosSpec::Barotropic {
                    eos: BarotropicEos::polytrope(m, kappa, gamma).map_err(as_config)?,
                    isentropic: Some(IsentropicEos::polytrope(m, kappa, gamma).map_err(as_config)?),
                }
            }
            "tabulated" => {
                let path = kv
                    .path("table")
                    .ok_or_else(|| Error::Config("family = tabulated needs table = PATH".into()))?;
                EosSpec::Barotropic {
                    eos: BarotropicEos::from_csv(&path)?,
                    isentropic: None,
                }
            }
            "ideal-gas" => EosSpec::IdealGas(
                IdealGasEos::new(
                    kv.f64_or("m", 1.0)?,
                    kv.f64_or("k", 1.0)?,
                    kv.f64_or("c_v", 1.0)?,
                    kv.f64_or("gamma", 5.0 / 3.0)?,
                )
                .map_err(as_config)?,
            ),
            other => {
                return Err(Error::Config(format!(
                    "unknown family {other:?} (gamma-law, stiff, polytrope, tabulated, ideal-gas)"
                )))
            }
        })
    }

    pub fn label(&self) -> String {
        match self {
            EosSpec::Barotropic { eos, .. } => eos.label.clone(),
            EosSpec::IdealGas(g) => g.label(),
        }
    }

    /// The barotrope, where one exists (massless ideal gases reduce to one).
    pub fn barotrope(&self) -> Result<BarotropicEos> {
        match self {
            EosSpec::Barotropic { eos, .. } => Ok(eos.clone()),
            EosSpec::IdealGas(g) => g.reduce_to_barotropic(),
        }
    }
}

fn as_config(e: Error) -> Error {
    match e {
        Error::Domain { .. } | Error::Unsupported(_) | Error::Precondition(_) => Error::Config(e.to_string()),
        other => other,
    }
}

/// Simulation settings: a preset (default `smooth`) with overrides.
pub fn sim_config(kv: &KeyValues) -> Result<SimConfig> {
    let mut cfg = SimConfig::preset(kv.str("preset").unwrap_or("smooth"))?;
    if kv.str("family").is_some() {
        cfg.eos = EosSpec::from_config(kv)?.barotrope().map_err(as_config)?;
    }
    if let Some(name) = kv.str("profile") {
        cfg.profile = match name {
            "uniform" => Profile::Uniform {
                p: kv.positive_or("p", 1.0)?,
                v: kv.f64_or("v", 0.0)?,
            },
            "sound-wave" => Profile::SoundWave {
                p0: kv.positive_or("p0", 1.0)?,
                amp: kv.f64_or("amp", 0.01)?,
                v0: kv.f64_or("v0", 0.0)?,
                v_amp: kv.f64_or("v_amp", 0.0)?,
            },
            "shock-tube" => Profile::ShockTube {
                p_left: kv.positive_or("p_left", 10.0)?,
                v_left: kv.f64_or("v_left", 0.0)?,
                p_right: kv.positive_or("p_right", 1.0)?,
                v_right: kv.f64_or("v_right", 0.0)?,
                x0: kv.f64_or("x0", 0.5)?,
            },
            "rh-shock" => Profile::RhShock {
                p_minus: kv.positive_or("p_minus", 1.0)?,
                p_plus: kv.positive_or("p_plus", 5.0)?,
                x0: kv.f64_or("x0", 0.2)?,
            },
            other => {
                return Err(Error::Config(format!(
                    "unknown profile {other:?} (uniform, sound-wave, shock-tube, rh-shock)"
                )))
            }
        };
    }
    cfg.p_ref = kv.positive_or("p_ref", cfg.p_ref)?;
    cfg.n = kv.usize_or("n", cfg.n)?;
    cfg.length = kv.f64_or("length", cfg.length)?;
    cfg.cfl = kv.f64_or("cfl", cfg.cfl)?;
    cfg.t_end = kv.f64_or("t_end", cfg.t_end)?;
    cfg.snapshots = kv.usize_or("snapshots", cfg.snapshots)?;
    cfg.second_order = kv.bool_or("second_order", cfg.second_order)?;
    if let Some(t) = kv.f64("t_shock")? {
        cfg.t_shock = Some(t);
    }
    if let Some(b) = kv.str("boundary") {
        cfg.boundary = match b {
            "periodic" => Boundary::Periodic,
            "outflow" => Boundary::Outflow,
            other => return Err(Error::Config(format!("unknown boundary {other:?} (periodic, outflow)"))),
        };
    }
    cfg.validate()?;
    Ok(cfg)
}
