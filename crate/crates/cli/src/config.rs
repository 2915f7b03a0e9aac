//! INI-style run configuration.
//!
//! ```text
//! [scenario]
//! n = 200
//! replications = 2000
//! error = normal:1
//!
//! [bandwidths]
//! a_const = 1
//!
//! [grids]
//! t_grid = linspace:-2,2,9
//! ```
//!
//! Blank lines and lines starting with `#` or `;` are ignored. A `[run]`
//! section is accepted and skipped so that a written manifest can be fed
//! back in as a config.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use errdist::montecarlo::ScenarioConfig;
use errdist::{BandwidthSchedule, ErrorModel};

use crate::error::{CliError, CliResult};

/// One `key = value` entry.
#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub section: String,
    pub key: String,
    pub value: String,
    pub line: usize,
}

/// Parsed but uninterpreted config text.
#[derive(Debug, Clone)]
pub struct Ini {
    pub path: String,
    pub entries: Vec<Entry>,
}

impl Ini {
    pub fn parse(path: &str, text: &str) -> CliResult<Self> {
        let mut section = String::new();
        let mut entries: Vec<Entry> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let s = raw.trim();
            if s.is_empty() || s.starts_with('#') || s.starts_with(';') {
                continue;
            }
            let err = |message: String| CliError::Config {
                path: path.to_string(),
                line,
                message,
            };
            if let Some(rest) = s.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| err(format!("unterminated section header `{s}`")))?;
                section = name.trim().to_string();
                continue;
            }
            let (key, value) = s
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, got `{s}`")))?;
            let key = key.trim().to_string();
            if section.is_empty() {
                return Err(err(format!("key `{key}` appears before any section")));
            }
            if entries.iter().any(|e| e.section == section && e.key == key) {
                return Err(err(format!("duplicate key `{key}` in [{section}]")));
            }
            entries.push(Entry {
                section: section.clone(),
                key,
                value: value.trim().to_string(),
                line,
            });
        }
        Ok(Self {
            path: path.to_string(),
            entries,
        })
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&path.display().to_string(), &text)
    }

    pub fn section<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a Entry> + 'a {
        self.entries.iter().filter(move |e| e.section == name)
    }

    pub fn error_at(&self, entry: &Entry, message: impl Into<String>) -> CliError {
        CliError::Config {
            path: self.path.clone(),
            line: entry.line,
            message: message.into(),
        }
    }

    /// Rejects sections outside `allowed`.
    pub fn check_sections(&self, allowed: &[&str]) -> CliResult<()> {
        match self.entries.iter().find(|e| !allowed.contains(&e.section.as_str())) {
            Some(e) => Err(self.error_at(e, format!("unknown section [{}]", e.section))),
            None => Ok(()),
        }
    }
}

fn parse_value<T: FromStr>(ini: &Ini, entry: &Entry) -> CliResult<T>
where
    T::Err: std::fmt::Display,
{
    entry
        .value
        .parse()
        .map_err(|e| ini.error_at(entry, format!("bad value for `{}`: {e}", entry.key)))
}

/// Parses a comma-separated list or `linspace:start,stop,count`.
pub fn parse_t_grid(s: &str) -> Result<Vec<f64>, String> {
    let s = s.trim();
    if let Some(spec) = s.strip_prefix("linspace:") {
        let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err("linspace needs start,stop,count".into());
        }
        let start: f64 = parts[0].parse().map_err(|e| format!("linspace start: {e}"))?;
        let stop: f64 = parts[1].parse().map_err(|e| format!("linspace stop: {e}"))?;
        let count: usize = parts[2].parse().map_err(|e| format!("linspace count: {e}"))?;
        return match count {
            0 => Err("linspace count must be positive".into()),
            1 => Ok(vec![start]),
            _ => Ok((0..count)
                .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
                .collect()),
        };
    }
    s.split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|e| format!("`{}`: {e}", v.trim())))
        .collect()
}

pub fn parse_sizes(s: &str) -> Result<Vec<usize>, String> {
    s.split(',')
        .map(|v| v.trim().parse::<usize>().map_err(|e| format!("size `{}`: {e}", v.trim())))
        .collect()
}

pub fn join<T: std::fmt::Display>(values: &[T]) -> String {
    let mut out = String::new();
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "{v}");
    }
    out
}

/// A simulation config: the scenario plus the optional convergence sizes.
#[derive(Debug, Clone)]
pub struct SimulationConfig {
    pub scenario: ScenarioConfig,
    /// False when `n` was absent; only convergence studies may omit it.
    pub has_n: bool,
    pub sizes: Option<Vec<usize>>,
}

impl SimulationConfig {
    pub fn from_ini(ini: &Ini) -> CliResult<Self> {
        ini.check_sections(&["scenario", "bandwidths", "grids", "run"])?;
        let mut sc = ScenarioConfig::new(0, 0, ErrorModel::normal(1.0)?);
        let mut has_n = false;
        let mut has_reps = false;
        let mut has_error = false;
        let mut sizes = None;
        let (mut a_const, mut c_const) = (1.0, 1.0);
        for e in &ini.entries {
            match (e.section.as_str(), e.key.as_str()) {
                ("run", _) => {}
                ("scenario", "n") => {
                    sc.n = parse_value(ini, e)?;
                    has_n = true;
                }
                ("scenario", "replications") => {
                    sc.replications = parse_value(ini, e)?;
                    has_reps = true;
                }
                ("scenario", "seed") => sc.seed = parse_value(ini, e)?,
                ("scenario", "order") => sc.order = parse_value(ini, e)?,
                ("scenario", "covariate") => sc.covariate = parse_value(ini, e)?,
                ("scenario", "regression") => sc.regression = parse_value(ini, e)?,
                ("scenario", "error") => {
                    sc.error = parse_value(ini, e)?;
                    has_error = true;
                }
                ("scenario", "smoothing_kernel") => sc.smoothing_kernel = parse_value(ini, e)?,
                ("scenario", "regression_kernel") => sc.regression_kernel = parse_value(ini, e)?,
                ("bandwidths", "a_const") => a_const = parse_value(ini, e)?,
                ("bandwidths", "c_const") => c_const = parse_value(ini, e)?,
                ("grids", "t_grid") => {
                    sc.t_grid = parse_t_grid(&e.value).map_err(|m| ini.error_at(e, m))?;
                }
                ("grids", "sup_grid_size") => sc.sup_grid_size = parse_value(ini, e)?,
                ("grids", "sizes") => {
                    sizes = Some(parse_sizes(&e.value).map_err(|m| ini.error_at(e, m))?);
                }
                (s, k) => return Err(ini.error_at(e, format!("unknown key `{k}` in [{s}]"))),
            }
        }
        let missing =
            |key: &str| CliError::Input(format!("{}: missing required key `{key}` in [scenario]", ini.path));
        if !has_reps {
            return Err(missing("replications"));
        }
        if !has_error {
            return Err(missing("error"));
        }
        sc.schedule = BandwidthSchedule::new(a_const, c_const)?;
        Ok(Self {
            scenario: sc,
            has_n,
            sizes,
        })
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        Self::from_ini(&Ini::read(path)?)
    }
}

/// `[scenario]`, `[bandwidths]` and `[grids]` sections for a resolved
/// scenario, in the format [`SimulationConfig::from_ini`] reads.
pub fn scenario_sections(sc: &ScenarioConfig, include_n: bool, sizes: Option<&[usize]>) -> String {
    let mut out = String::from("[scenario]\n");
    if include_n {
        let _ = writeln!(out, "n = {}", sc.n);
    }
    let _ = writeln!(out, "replications = {}", sc.replications);
    let _ = writeln!(out, "seed = {}", sc.seed);
    let _ = writeln!(out, "order = {}", sc.order);
    let _ = writeln!(out, "covariate = {}", sc.covariate);
    let _ = writeln!(out, "regression = {}", sc.regression);
    let _ = writeln!(out, "error = {}", sc.error);
    let _ = writeln!(out, "smoothing_kernel = {}", sc.smoothing_kernel);
    let _ = writeln!(out, "regression_kernel = {}", sc.regression_kernel);
    out.push_str("\n[bandwidths]\n");
    let _ = writeln!(out, "a_const = {}", sc.schedule.a_constant);
    let _ = writeln!(out, "c_const = {}", sc.schedule.c_constant);
    out.push_str("\n[grids]\n");
    let _ = writeln!(out, "t_grid = {}", join(&sc.t_grid));
    let _ = writeln!(out, "sup_grid_size = {}", sc.sup_grid_size);
    if let Some(sizes) = sizes {
        let _ = writeln!(out, "sizes = {}", join(sizes));
    }
    out
}
