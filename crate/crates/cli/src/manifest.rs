//! Run record embedded as `#` comment lines at the top of every CSV.

use cavity_cooling::params::RunConfig;
use std::fmt::Display;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

/// Prefix of the only manifest line that differs between identical runs.
pub const WALL_CLOCK_PREFIX: &str = "wall_clock_unix: ";

pub struct Manifest {
    lines: Vec<String>,
}

impl Manifest {
    pub fn new(subcommand: &str, cfg: &RunConfig, out: Option<&Path>) -> Self {
        let wall = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs_f64())
            .unwrap_or(0.0);
        let mut lines = vec![
            format!("cavcool {}", env!("CARGO_PKG_VERSION")),
            format!("subcommand: {subcommand}"),
            format!(
                "output: {}",
                out.map_or("-".to_string(), |p| p.display().to_string())
            ),
            format!("{WALL_CLOCK_PREFIX}{wall:.3}"),
            format!("seed: {}", cfg.simulate.seed),
        ];
        lines.extend(cfg.entries().into_iter().map(|(k, v)| format!("{k} = {v}")));
        Self { lines }
    }

    /// Records a subcommand flag as `arg.<name> = <value>`.
    pub fn arg(&mut self, name: &str, value: &impl Display) {
        self.lines.push(format!("arg.{name} = {value}"));
    }

    pub fn note(&mut self, line: String) {
        self.lines.push(line);
    }

    pub fn lines(&self) -> Vec<String> {
        self.lines.clone()
    }
}
