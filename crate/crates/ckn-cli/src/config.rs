//! Run settings: flags override the config file, which overrides built-ins.

use std::path::Path;

use ckn_core::numerics::LogGrid;

use crate::args::{Cli, Format};
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub format: Format,
    pub seed: u64,
    pub jobs: usize,
    pub nodes: usize,
    pub span: f64,
    pub max_iters: usize,
    pub tol: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            format: Format::Json,
            seed: 42,
            jobs: std::thread::available_parallelism().map_or(1, |n| n.get()),
            nodes: 4001,
            span: 14.0,
            max_iters: 2000,
            tol: 1e-7,
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str, line: usize) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Config(format!("line {line}: cannot parse `{value}` for `{key}`")))
}

impl Settings {
    /// Applies `key = value` lines. Blank lines and `#` comments are skipped.
    pub fn apply_config(&mut self, text: &str) -> Result<(), CliError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected `key = value`", i + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            let n = i + 1;
            match key {
                "format" => {
                    self.format = <Format as clap::ValueEnum>::from_str(value, true)
                        .map_err(|_| CliError::Config(format!("line {n}: unknown format `{value}`")))?
                }
                "seed" => self.seed = parse(key, value, n)?,
                "jobs" => self.jobs = parse(key, value, n)?,
                "nodes" => self.nodes = parse(key, value, n)?,
                "span" => self.span = parse(key, value, n)?,
                "max_iters" => self.max_iters = parse(key, value, n)?,
                "tol" => self.tol = parse(key, value, n)?,
                other => return Err(CliError::Config(format!("line {n}: unknown key `{other}`"))),
            }
        }
        Ok(())
    }

    pub fn resolve(cli: &Cli) -> Result<Self, CliError> {
        let mut s = Self::default();
        if let Some(path) = &cli.config {
            s.apply_config(&read(path)?)?;
        }
        s.format = cli.format.unwrap_or(s.format);
        s.seed = cli.seed.unwrap_or(s.seed);
        s.jobs = cli.jobs.unwrap_or(s.jobs);
        s.nodes = cli.nodes.unwrap_or(s.nodes);
        s.span = cli.span.unwrap_or(s.span);
        if s.jobs == 0 {
            return Err(CliError::Input("jobs must be at least 1".into()));
        }
        Ok(s)
    }

    pub fn grid(&self) -> Result<LogGrid<f64>, CliError> {
        Ok(LogGrid::symmetric(self.span, self.nodes)?)
    }
}

pub fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
