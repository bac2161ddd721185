//! `key = value` configuration files.
//!
//! One pair per line, `#` starts a comment, keys are the field names of
//! [`SystemParams`] plus the mode-geometry keys `n_index_max`, `gouy_scale_k`,
//! `envelope_on`. Trajectory settings live under the `simulate.` prefix,
//! written either in full (`simulate.dt = 0.5`) or after a `[simulate]`
//! header line. Unknown keys are rejected.

use super::SystemParams;
use crate::modes::ModeSet;
use crate::{Error, Result};

/// Default `kz₀`: a confocal cavity ten thousand wavelengths long.
pub const DEFAULT_GOUY_SCALE_K: f64 = 2.0 * std::f64::consts::PI * 1.0e4;

#[derive(Debug, Clone, PartialEq)]
pub struct SimulateSettings {
    pub dt: f64,
    pub n_steps: usize,
    pub n_trajectories: usize,
    pub seed: u64,
    /// Standard deviation of the initial momentum, in `ħk`.
    pub p0_spread: f64,
    /// `true`: coefficients evaluated at the atom's position; `false`:
    /// frozen at their wavelength averages.
    pub position_resolved: bool,
    pub include_force: bool,
    pub sample_every: usize,
}

impl Default for SimulateSettings {
    fn default() -> Self {
        Self {
            dt: 1.0,
            n_steps: 20_000,
            n_trajectories: 2_000,
            seed: 1,
            p0_spread: 0.0,
            position_resolved: false,
            include_force: true,
            sample_every: 100,
        }
    }
}

/// Everything a run needs, after config file and command-line overrides.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: SystemParams,
    pub n_index_max: usize,
    pub gouy_scale_k: f64,
    pub envelope_on: bool,
    pub simulate: SimulateSettings,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: SystemParams::default(),
            n_index_max: 0,
            gouy_scale_k: DEFAULT_GOUY_SCALE_K,
            envelope_on: true,
            simulate: SimulateSettings::default(),
        }
    }
}

/// Every key accepted by [`RunConfig::set`], in canonical order.
pub const KEYS: &[&str] = &[
    "gamma",
    "kappa",
    "delta_a",
    "delta_c",
    "eta",
    "g_single",
    "recoil_freq",
    "u2bar",
    "k_atom_ratio",
    "n_index_max",
    "gouy_scale_k",
    "envelope_on",
    "simulate.dt",
    "simulate.n_steps",
    "simulate.n_trajectories",
    "simulate.seed",
    "simulate.p0_spread",
    "simulate.coefficients",
    "simulate.include_force",
    "simulate.sample_every",
];

fn bad(key: &str, value: &str, reason: impl Into<String>) -> Error {
    Error::BadValue {
        key: key.into(),
        value: value.into(),
        reason: reason.into(),
    }
}

fn float(key: &str, value: &str) -> Result<f64> {
    value
        .parse::<f64>()
        .map_err(|e| bad(key, value, e.to_string()))
}

fn uint<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .parse::<T>()
        .map_err(|e| bad(key, value, e.to_string()))
}

fn boolean(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(bad(key, value, "expected true or false")),
    }
}

impl RunConfig {
    /// Applies one `key = value` assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let p = &mut self.params;
        let s = &mut self.simulate;
        match key {
            "gamma" => p.gamma = float(key, value)?,
            "kappa" => p.kappa = float(key, value)?,
            "delta_a" => p.delta_a = float(key, value)?,
            "delta_c" => p.delta_c = float(key, value)?,
            "eta" => p.eta = float(key, value)?,
            "g_single" => p.g_single = float(key, value)?,
            "recoil_freq" => p.recoil_freq = float(key, value)?,
            "u2bar" => p.u2bar = float(key, value)?,
            "k_atom_ratio" => p.k_atom_ratio = float(key, value)?,
            "n_index_max" => self.n_index_max = uint(key, value)?,
            "gouy_scale_k" => self.gouy_scale_k = float(key, value)?,
            "envelope_on" => self.envelope_on = boolean(key, value)?,
            "simulate.dt" => s.dt = float(key, value)?,
            "simulate.n_steps" => s.n_steps = uint(key, value)?,
            "simulate.n_trajectories" => s.n_trajectories = uint(key, value)?,
            "simulate.seed" => s.seed = uint(key, value)?,
            "simulate.p0_spread" => s.p0_spread = float(key, value)?,
            "simulate.coefficients" => {
                s.position_resolved = match value {
                    "frozen" => false,
                    "position" => true,
                    _ => return Err(bad(key, value, "expected `frozen` or `position`")),
                }
            }
            "simulate.include_force" => s.include_force = boolean(key, value)?,
            "simulate.sample_every" => s.sample_every = uint(key, value)?,
            _ => return Err(Error::UnknownKey(key.into())),
        }
        Ok(())
    }

    /// Applies a `key=value` string as given on the command line.
    pub fn set_pair(&mut self, pair: &str) -> Result<()> {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| bad(pair, "", "expected key=value"))?;
        self.set(k.trim(), v.trim())
    }

    pub fn mode_set(&self) -> Result<ModeSet> {
        ModeSet::new(
            self.n_index_max,
            self.params.g_single,
            self.gouy_scale_k,
            self.envelope_on,
        )
    }

    /// `(key, value)` pairs for every key, in the order of [`KEYS`]. Values
    /// use round-trip float formatting so the listing can be parsed back.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let p = &self.params;
        let s = &self.simulate;
        let values = [
            format!("{:?}", p.gamma),
            format!("{:?}", p.kappa),
            format!("{:?}", p.delta_a),
            format!("{:?}", p.delta_c),
            format!("{:?}", p.eta),
            format!("{:?}", p.g_single),
            format!("{:?}", p.recoil_freq),
            format!("{:?}", p.u2bar),
            format!("{:?}", p.k_atom_ratio),
            self.n_index_max.to_string(),
            format!("{:?}", self.gouy_scale_k),
            self.envelope_on.to_string(),
            format!("{:?}", s.dt),
            s.n_steps.to_string(),
            s.n_trajectories.to_string(),
            s.seed.to_string(),
            format!("{:?}", s.p0_spread),
            if s.position_resolved {
                "position"
            } else {
                "frozen"
            }
            .to_string(),
            s.include_force.to_string(),
            s.sample_every.to_string(),
        ];
        KEYS.iter().copied().zip(values).collect()
    }
}

/// Parses a configuration file on top of the defaults.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    let mut prefix = String::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(section) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            let section = section.trim();
            if section != "simulate" {
                return Err(Error::Config {
                    line: line_no,
                    message: format!("unknown section [{section}]"),
                });
            }
            prefix = format!("{section}.");
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Config {
            line: line_no,
            message: format!("expected `key = value`, found `{line}`"),
        })?;
        let key = format!("{prefix}{}", key.trim());
        cfg.set(&key, value.trim()).map_err(|e| Error::Config {
            line: line_no,
            message: e.to_string(),
        })?;
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_comments_and_sections() {
        let text = "\
# headline point
kappa = 0.1   # good cavity
g_single = 0.3
n_index_max = 8
envelope_on = false

[simulate]
dt = 0.5
coefficients = position
";
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.params.kappa, 0.1);
        assert_eq!(cfg.params.g_single, 0.3);
        assert_eq!(cfg.n_index_max, 8);
        assert!(!cfg.envelope_on);
        assert_eq!(cfg.simulate.dt, 0.5);
        assert!(cfg.simulate.position_resolved);
    }

    #[test]
    fn unknown_key_is_an_error() {
        let err = parse_config("kapa = 1\n").unwrap_err();
        assert_eq!(
            err,
            Error::Config {
                line: 1,
                message: "unknown configuration key `kapa`".into()
            }
        );
    }

    #[test]
    fn malformed_line_is_an_error() {
        assert!(matches!(
            parse_config("\n\nkappa 1\n"),
            Err(Error::Config { line: 3, .. })
        ));
        assert!(parse_config("kappa = fast\n").is_err());
        assert!(parse_config("[other]\n").is_err());
    }

    #[test]
    fn entries_round_trip() {
        let mut cfg = RunConfig::default();
        cfg.set_pair("delta_a=-49.8").unwrap();
        cfg.set_pair("simulate.seed = 99").unwrap();
        let text: String = cfg
            .entries()
            .into_iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect();
        assert_eq!(parse_config(&text).unwrap(), cfg);
    }
}
