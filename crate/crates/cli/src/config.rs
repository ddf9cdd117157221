//! Line-oriented `key=value` run configuration.
//!
//! Blank lines and lines starting with `#` are ignored. Every other line must
//! hold exactly one `key=value` pair; unknown keys are rejected. Command-line
//! overrides use the same syntax and take precedence over the file.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use fkp_core::experiments::PerturbationKind;
use fkp_core::{FkpParams, Sigma};

use crate::error::{io_err, CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, clap::ValueEnum)]
pub enum Subcommand {
    GroundState,
    Evolve,
    Experiment,
    Spectrum,
    GrowthRate,
    Branch,
    Sweep,
    Verify,
}

impl Subcommand {
    pub fn as_str(self) -> &'static str {
        match self {
            Subcommand::GroundState => "ground-state",
            Subcommand::Evolve => "evolve",
            Subcommand::Experiment => "experiment",
            Subcommand::Spectrum => "spectrum",
            Subcommand::GrowthRate => "growth-rate",
            Subcommand::Branch => "branch",
            Subcommand::Sweep => "sweep",
            Subcommand::Verify => "verify",
        }
    }

    fn required(self) -> &'static [&'static str] {
        const PROFILE: &[&str] = &["alpha", "c", "Lx", "nx"];
        const EVOLVE: &[&str] = &["alpha", "sigma", "c", "Lx", "Ly", "nx", "ny", "dt", "t_end"];
        const EXPERIMENT: &[&str] =
            &["alpha", "sigma", "c", "Lx", "Ly", "nx", "ny", "dt", "t_end", "perturbation", "rho", "x0"];
        const SWEEP: &[&str] =
            &["sweep_alpha", "sigma", "c", "Lx", "Ly", "nx", "ny", "dt", "t_end", "perturbation", "rho", "x0"];
        match self {
            Subcommand::GroundState | Subcommand::Spectrum | Subcommand::GrowthRate | Subcommand::Branch => PROFILE,
            Subcommand::Evolve => EVOLVE,
            Subcommand::Experiment => EXPERIMENT,
            Subcommand::Sweep => SWEEP,
            Subcommand::Verify => &[],
        }
    }
}

impl fmt::Display for Subcommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Every key the parser accepts.
pub const KEYS: &[&str] = &[
    "alpha",
    "sigma",
    "c",
    "Lx",
    "Ly",
    "nx",
    "ny",
    "dt",
    "t_end",
    "perturbation",
    "rho",
    "x0",
    "crest_offset",
    "cadence",
    "snapshot_every",
    "out_dir",
    "deterministic",
    "dealias",
    "energy",
    "solve_n",
    "k_count",
    "k_max_factor",
    "modes",
    "s_min",
    "s_max",
    "branch_ny",
    "sweep_alpha",
    "workers",
];

/// Validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub subcommand: Subcommand,
    pub alpha: f64,
    pub sigma: Sigma,
    pub c: f64,
    pub lx: f64,
    pub ly: f64,
    pub nx: usize,
    pub ny: usize,
    pub dt: f64,
    pub t_end: f64,
    pub perturbation: PerturbationKind,
    pub rho: f64,
    pub x0: f64,
    pub crest_offset: f64,
    /// Diagnostics are recorded every `cadence` steps.
    pub cadence: usize,
    /// Snapshot every n-th diagnostics record; 0 writes only the final state.
    pub snapshot_every: usize,
    pub out_dir: PathBuf,
    pub deterministic: bool,
    pub dealias: bool,
    pub energy: bool,
    /// Grid size for the ground-state solve before subsampling to `nx`.
    pub solve_n: Option<usize>,
    pub k_count: usize,
    pub k_max_factor: f64,
    pub modes: usize,
    pub s_min: f64,
    pub s_max: f64,
    pub branch_ny: usize,
    pub sweep_alpha: Vec<f64>,
    pub workers: usize,
    /// The explicitly given keys, echoed into the manifest.
    pub entries: BTreeMap<String, String>,
}

impl RunConfig {
    pub fn params(&self) -> Result<FkpParams<f64>> {
        Ok(FkpParams::new(self.alpha, self.sigma, self.c)?)
    }

    /// Copy with `key` set to `value`, re-validated.
    pub fn with_entry(&self, key: &str, value: &str) -> Result<Self> {
        let mut entries = self.entries.clone();
        entries.insert(key.to_string(), value.to_string());
        from_entries(self.subcommand, entries)
    }
}

/// Splits `key=value` lines, skipping blanks and comments.
pub fn parse_pairs<'a>(lines: impl IntoIterator<Item = &'a str>) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (i, raw) in lines.into_iter().enumerate() {
        let text = raw.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let (key, value) = text.split_once('=').ok_or_else(|| CliError::Syntax { line: i + 1, text: text.into() })?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || value.is_empty() {
            return Err(CliError::Syntax { line: i + 1, text: text.into() });
        }
        pairs.push((key.to_string(), value.to_string()));
    }
    Ok(pairs)
}

fn collect(pairs: Vec<(String, String)>, into: &mut BTreeMap<String, String>) -> Result<()> {
    let mut seen = BTreeMap::new();
    for (key, value) in pairs {
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::UnknownKey(key));
        }
        if seen.insert(key.clone(), ()).is_some() {
            return Err(CliError::DuplicateKey(key));
        }
        into.insert(key, value);
    }
    Ok(())
}

/// Parses config text plus overrides for `subcommand`.
pub fn parse_config_str(subcommand: Subcommand, text: &str, overrides: &[String]) -> Result<RunConfig> {
    let mut entries = BTreeMap::new();
    collect(parse_pairs(text.lines())?, &mut entries)?;
    collect(parse_pairs(overrides.iter().map(String::as_str))?, &mut entries)?;
    from_entries(subcommand, entries)
}

/// Reads the optional config file and applies `key=value` overrides.
pub fn parse_config(subcommand: Subcommand, path: Option<&Path>, overrides: &[String]) -> Result<RunConfig> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p).map_err(io_err(p))?,
        None => String::new(),
    };
    parse_config_str(subcommand, &text, overrides)
}

struct Lookup<'a> {
    entries: &'a BTreeMap<String, String>,
    subcommand: Subcommand,
}

impl Lookup<'_> {
    fn raw(&self, key: &'static str) -> Result<Option<&str>> {
        match self.entries.get(key) {
            Some(v) => Ok(Some(v.as_str())),
            None if self.subcommand.required().contains(&key) => Err(CliError::MissingKey(key)),
            None => Ok(None),
        }
    }

    fn num(&self, key: &'static str, default: f64) -> Result<f64> {
        match self.raw(key)? {
            Some(v) => parse_f64(key, v),
            None => Ok(default),
        }
    }

    fn count(&self, key: &'static str, default: usize) -> Result<usize> {
        match self.raw(key)? {
            Some(v) => v.parse().map_err(|_| CliError::Invalid(format!("{key}: expected a non-negative integer, got {v:?}"))),
            None => Ok(default),
        }
    }

    fn flag(&self, key: &'static str, default: bool) -> Result<bool> {
        match self.raw(key)? {
            Some("true" | "1" | "yes") => Ok(true),
            Some("false" | "0" | "no") => Ok(false),
            Some(v) => Err(CliError::Invalid(format!("{key}: expected true or false, got {v:?}"))),
            None => Ok(default),
        }
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    let x: f64 = match v {
        "pi" => std::f64::consts::PI,
        _ => v.parse().map_err(|_| CliError::Invalid(format!("{key}: expected a number, got {v:?}")))?,
    };
    if !x.is_finite() {
        return Err(CliError::Invalid(format!("{key}: value must be finite")));
    }
    Ok(x)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 1.0 / 3.0 && alpha <= 2.0 {
        Ok(())
    } else {
        Err(CliError::Invalid(format!("alpha must be in (1/3, 2], got {alpha}")))
    }
}

fn check_points(key: &str, n: usize) -> Result<()> {
    if !n.is_power_of_two() {
        return Err(CliError::Invalid(format!("{key} = {n}: power of two required")));
    }
    if n < 8 {
        return Err(CliError::Invalid(format!("{key} = {n}: at least 8 points required")));
    }
    Ok(())
}

fn positive(key: &str, v: f64) -> Result<()> {
    if v > 0.0 {
        Ok(())
    } else {
        Err(CliError::Invalid(format!("{key} must be positive, got {v}")))
    }
}

pub(crate) fn from_entries(subcommand: Subcommand, entries: BTreeMap<String, String>) -> Result<RunConfig> {
    let get = Lookup { entries: &entries, subcommand };
    let sweep_alpha = match get.raw("sweep_alpha")? {
        Some(list) => list.split(',').map(|v| parse_f64("sweep_alpha", v.trim())).collect::<Result<Vec<_>>>()?,
        None => Vec::new(),
    };
    let alpha = match get.raw("alpha")? {
        Some(v) => parse_f64("alpha", v)?,
        None => sweep_alpha.first().copied().unwrap_or(2.0),
    };
    let sigma_value = get.num("sigma", -1.0)?;
    let sigma = Sigma::from_value(sigma_value)
        .map_err(|_| CliError::Invalid(format!("sigma must be -1 or +1, got {sigma_value}")))?;
    let perturbation = match get.raw("perturbation")? {
        Some(v) => PerturbationKind::parse(v)
            .map_err(|_| CliError::Invalid(format!("perturbation must be psi1 or psi2, got {v:?}")))?,
        None => PerturbationKind::Localized,
    };
    let solve_n = match get.raw("solve_n")? {
        Some(_) => Some(get.count("solve_n", 0)?),
        None => None,
    };
    let config = RunConfig {
        subcommand,
        alpha,
        sigma,
        c: get.num("c", 2.0)?,
        lx: get.num("Lx", 60.0)?,
        ly: get.num("Ly", 30.0)?,
        nx: get.count("nx", 512)?,
        ny: get.count("ny", 128)?,
        dt: get.num("dt", 1e-3)?,
        t_end: get.num("t_end", 10.0)?,
        perturbation,
        rho: get.num("rho", 0.0)?,
        x0: get.num("x0", 10.0)?,
        crest_offset: get.num("crest_offset", 0.0)?,
        cadence: get.count("cadence", 100)?,
        snapshot_every: get.count("snapshot_every", 0)?,
        out_dir: PathBuf::from(get.raw("out_dir")?.unwrap_or("out")),
        deterministic: get.flag("deterministic", true)?,
        dealias: get.flag("dealias", false)?,
        energy: get.flag("energy", false)?,
        solve_n,
        k_count: get.count("k_count", 64)?,
        k_max_factor: get.num("k_max_factor", 1.5)?,
        modes: get.count("modes", 8)?,
        s_min: get.num("s_min", 1e-4)?,
        s_max: get.num("s_max", 1e-2)?,
        branch_ny: get.count("branch_ny", 64)?,
        sweep_alpha,
        workers: get.count("workers", 1)?,
        entries: entries.clone(),
    };
    validate(&config)?;
    Ok(config)
}

fn validate(cfg: &RunConfig) -> Result<()> {
    check_alpha(cfg.alpha)?;
    for &a in &cfg.sweep_alpha {
        check_alpha(a)?;
    }
    if cfg.subcommand == Subcommand::Sweep && cfg.sweep_alpha.is_empty() {
        return Err(CliError::Invalid("sweep_alpha must list at least one value".into()));
    }
    positive("c", cfg.c)?;
    positive("Lx", cfg.lx)?;
    positive("Ly", cfg.ly)?;
    check_points("nx", cfg.nx)?;
    check_points("ny", cfg.ny)?;
    check_points("branch_ny", cfg.branch_ny)?;
    if let Some(n) = cfg.solve_n {
        check_points("solve_n", n)?;
        if n < cfg.nx {
            return Err(CliError::Invalid(format!("solve_n = {n} must be at least nx = {}", cfg.nx)));
        }
    }
    positive("dt", cfg.dt)?;
    positive("t_end", cfg.t_end)?;
    if cfg.dt > cfg.t_end {
        return Err(CliError::Invalid(format!("dt = {} exceeds t_end = {}", cfg.dt, cfg.t_end)));
    }
    if cfg.rho < 0.0 {
        return Err(CliError::Invalid(format!("rho must be non-negative, got {}", cfg.rho)));
    }
    for (key, v) in [("cadence", cfg.cadence), ("k_count", cfg.k_count), ("modes", cfg.modes), ("workers", cfg.workers)] {
        if v == 0 {
            return Err(CliError::Invalid(format!("{key} must be at least 1")));
        }
    }
    positive("k_max_factor", cfg.k_max_factor)?;
    positive("s_min", cfg.s_min)?;
    if cfg.s_max <= cfg.s_min {
        return Err(CliError::Invalid(format!("s_max = {} must exceed s_min = {}", cfg.s_max, cfg.s_min)));
    }
    if matches!(cfg.subcommand, Subcommand::GrowthRate | Subcommand::Branch) && cfg.sigma != Sigma::KpI {
        return Err(CliError::Invalid(format!("{} requires sigma = -1", cfg.subcommand)));
    }
    Ok(())
}
