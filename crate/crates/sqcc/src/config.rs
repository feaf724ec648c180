//! Flat key-value configuration files and their merge with command-line
//! overrides.
//!
//! The format is INI-style without sections: one `key = value` per line,
//! `#` or `;` comments, blank lines ignored. Every command-line flag has a
//! config key of the same name; a flag, when given, wins over the file.

use crate::keyrate::Detection;
use crate::sim::{BitPattern, ProtocolParams};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("invalid config field `{field}`: {reason}")]
    InvalidField { field: String, reason: String },
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("config line {0} is not `key = value`: {1:?}")]
    Malformed(usize, String),
    #[error("cannot read config file {path}")]
    Unreadable {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Parsed key-value pairs, last occurrence wins.
pub type KvMap = BTreeMap<String, String>;

pub fn parse_kv(text: &str) -> Result<KvMap, ConfigError> {
    let mut map = KvMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find(['#', ';']) {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| ConfigError::Malformed(lineno + 1, raw.to_string()))?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

pub fn load_kv(path: &std::path::Path) -> Result<KvMap, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| ConfigError::Unreadable { path: path.to_path_buf(), source })?;
    parse_kv(&text)
}

fn bad(field: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::InvalidField { field: field.to_string(), reason: reason.into() }
}

/// Parse a number, also accepting `2^-32` power notation.
pub fn parse_number(field: &str, s: &str) -> Result<f64, ConfigError> {
    let s = s.trim();
    if let Some((base, exp)) = s.split_once('^') {
        let b: f64 = base.trim().parse().map_err(|_| bad(field, format!("bad base in {s:?}")))?;
        let e: f64 = exp.trim().parse().map_err(|_| bad(field, format!("bad exponent in {s:?}")))?;
        return Ok(b.powf(e));
    }
    s.parse().map_err(|_| bad(field, format!("not a number: {s:?}")))
}

/// Parse a grid: either a comma list `0,2,4` or a range `start:stop:step`
/// (inclusive of both ends up to rounding).
pub fn parse_grid(field: &str, s: &str) -> Result<Vec<f64>, ConfigError> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(bad(field, format!("range must be start:stop:step, got {s:?}")));
        }
        let start = parse_number(field, parts[0])?;
        let stop = parse_number(field, parts[1])?;
        let step = parse_number(field, parts[2])?;
        if !(step > 0.0) || stop < start {
            return Err(bad(field, "range needs step > 0 and stop >= start"));
        }
        let n = ((stop - start) / step).round() as usize + 1;
        return Ok((0..n).map(|i| start + step * i as f64).collect());
    }
    s.split(',').map(|tok| parse_number(field, tok)).collect()
}

fn parse_detections(field: &str, s: &str) -> Result<Vec<Detection>, ConfigError> {
    s.split(',')
        .map(|tok| match tok.trim() {
            "hom" | "homodyne" => Ok(Detection::Homodyne),
            "het" | "heterodyne" => Ok(Detection::Heterodyne),
            other => Err(bad(field, format!("unknown detection {other:?} (use hom|het)"))),
        })
        .collect()
}

/// Full sweep/run configuration: the protocol link parameters plus the
/// loss grid, block sizes, security constants and output controls.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub loss_db_grid: Vec<f64>,
    pub detections: Vec<Detection>,
    pub block_sizes: Vec<f64>,
    pub params: ProtocolParams,
    pub beta: f64,
    pub epsilon: f64,
    pub p_ec: f64,
    pub m_fraction: f64,
    /// Monte Carlo shots per grid point; 0 disables simulation columns.
    pub shots: u64,
    /// Optional received amplitude activating the second-order
    /// normalization penalty.
    pub second_order_alpha: Option<f64>,
    pub out: Option<PathBuf>,
    pub emit_gnuplot: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            loss_db_grid: (0..=30).step_by(2).map(f64::from).collect(),
            detections: vec![Detection::Homodyne, Detection::Heterodyne],
            block_sizes: vec![1e8, 1e10, 1e12],
            params: ProtocolParams { seed: 1, ..ProtocolParams::default() },
            beta: 0.95,
            epsilon: 2f64.powi(-32),
            p_ec: 0.95,
            m_fraction: 0.1,
            shots: 0,
            second_order_alpha: None,
            out: None,
            emit_gnuplot: false,
        }
    }
}

impl SweepConfig {
    /// Apply key-value settings on top of `self`. Unknown keys are errors.
    pub fn apply_kv(&mut self, kv: &KvMap) -> Result<(), ConfigError> {
        for (key, value) in kv {
            match key.as_str() {
                "loss_db" => self.loss_db_grid = parse_grid(key, value)?,
                "detection" => self.detections = parse_detections(key, value)?,
                "block_sizes" | "block_size" => self.block_sizes = parse_grid(key, value)?,
                "alpha" => self.params.alpha = parse_number(key, value)?,
                "v_mod" => self.params.v_mod = parse_number(key, value)?,
                "eta" => self.params.eta = parse_number(key, value)?,
                "xi" => self.params.xi = parse_number(key, value)?,
                "nu_el" => self.params.nu_el = parse_number(key, value)?,
                "omega_d" => self.params.omega_d = parse_number(key, value)?,
                "sigma_pulse" => self.params.sigma_pulse = parse_number(key, value)?,
                "samples_per_pulse" => {
                    self.params.samples_per_pulse = parse_number(key, value)? as usize
                }
                "bit_pattern" => {
                    self.params.bit_pattern = match value.as_str() {
                        "random" => BitPattern::Random,
                        "zeros" => BitPattern::Fixed(false),
                        "ones" => BitPattern::Fixed(true),
                        "alternating" => BitPattern::Alternating,
                        other => {
                            return Err(bad(
                                key,
                                format!("unknown pattern {other:?} (random|zeros|ones|alternating)"),
                            ))
                        }
                    }
                }
                "seed" => self.params.seed = parse_number(key, value)? as u64,
                "beta" => self.beta = parse_number(key, value)?,
                "epsilon" => self.epsilon = parse_number(key, value)?,
                "p_ec" => self.p_ec = parse_number(key, value)?,
                "m_fraction" => self.m_fraction = parse_number(key, value)?,
                "shots" => self.shots = parse_number(key, value)? as u64,
                "second_order_alpha" => {
                    self.second_order_alpha = if value.is_empty() {
                        None
                    } else {
                        Some(parse_number(key, value)?)
                    }
                }
                "out" => {
                    self.out = if value.is_empty() { None } else { Some(PathBuf::from(value)) }
                }
                "gnuplot" => {
                    self.emit_gnuplot = value
                        .parse()
                        .map_err(|_| bad(key, format!("expected true/false, got {value:?}")))?
                }
                _ => return Err(ConfigError::UnknownKey(key.clone())),
            }
        }
        Ok(())
    }

    /// Validate the cross-field invariants.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.loss_db_grid.is_empty() {
            return Err(bad("loss_db", "loss grid must not be empty"));
        }
        if !self.loss_db_grid.windows(2).all(|w| w[0] < w[1]) {
            return Err(bad("loss_db", "loss grid must be strictly increasing"));
        }
        if self.detections.is_empty() {
            return Err(bad("detection", "need at least one detection mode"));
        }
        if !self.block_sizes.windows(2).all(|w| w[0] < w[1]) {
            return Err(bad("block_sizes", "block sizes must be strictly increasing"));
        }
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return Err(bad("beta", format!("reconciliation efficiency {} outside (0, 1]", self.beta)));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 0.5) {
            return Err(bad("epsilon", "security parameter must lie in (0, 0.5)"));
        }
        if !(self.p_ec > 0.0 && self.p_ec <= 1.0) {
            return Err(bad("p_ec", "error-correction success probability outside (0, 1]"));
        }
        if !(self.m_fraction > 0.0 && self.m_fraction < 1.0) {
            return Err(bad("m_fraction", "estimation fraction outside (0, 1)"));
        }
        self.params
            .validate()
            .map_err(|e| bad("params", e.to_string()))?;
        Ok(())
    }

    /// Canonical text rendering of the resolved configuration (stable key
    /// order), the input to the deterministic config hash.
    pub fn canonical_string(&self) -> String {
        let mut s = String::new();
        let grid: Vec<String> = self.loss_db_grid.iter().map(|v| format!("{v:e}")).collect();
        let blocks: Vec<String> = self.block_sizes.iter().map(|v| format!("{v:e}")).collect();
        let dets: Vec<String> = self.detections.iter().map(|d| d.to_string()).collect();
        let p = &self.params;
        let _ = write!(
            s,
            "alpha={:e}\nbeta={:e}\nbit_pattern={:?}\nblock_sizes={}\ndetection={}\nepsilon={:e}\n\
             eta={:e}\ngnuplot={}\nloss_db={}\nm_fraction={:e}\nnu_el={:e}\nomega_d={:e}\n\
             p_ec={:e}\nsamples_per_pulse={}\nsecond_order_alpha={:?}\nseed={}\nshots={}\n\
             sigma_pulse={:e}\nv_mod={:e}\nxi={:e}\n",
            p.alpha,
            self.beta,
            p.bit_pattern,
            blocks.join(","),
            dets.join(","),
            self.epsilon,
            p.eta,
            self.emit_gnuplot,
            grid.join(","),
            self.m_fraction,
            p.nu_el,
            p.omega_d,
            self.p_ec,
            p.samples_per_pulse,
            self.second_order_alpha,
            p.seed,
            self.shots,
            p.sigma_pulse,
            p.v_mod,
            p.xi,
        );
        s
    }

    /// FNV-1a hash of the canonical configuration string; stable across
    /// runs and platforms, emitted in the provenance column.
    pub fn config_hash(&self) -> u64 {
        fnv1a(self.canonical_string().as_bytes())
    }
}

pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}
