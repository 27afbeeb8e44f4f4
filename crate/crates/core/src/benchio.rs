//! Bench configuration files and result tables.
//!
//! Configuration is a sectioned `key = value` text file; every key is
//! optional and quantities are SI (Hz, seconds). Full-line comments start
//! with `#` or `;`.
//!
//! ```text
//! [bench]
//! sigma_f_hz = 1e6          # detuning spread (default 1e6)
//! tau1_s = 1e-6             # first-stage delay (default 1e-6)
//! tau2_s = 1e-6             # second-stage delay (default tau1_s)
//! # or a scan of tau21 = tau2 - tau1 instead of tau2_s:
//! # tau21_start_s = -5e-9
//! # tau21_stop_s = 5e-9
//! # tau21_steps = 21        # default 21
//!
//! [source]
//! mean_photon_number = 0.02 # default 0.02
//! n_pairs = 100000          # default 100000
//! higher_order_ratio = 0.01 # default 0.01
//!
//! [detector]
//! pulse_sigma_s = 5e-10         # default 5e-10
//! coincidence_window_s = 5e-9   # default 5e-9
//!
//! [run]
//! seed = 0                  # default 0; COHOM_SEED overrides, --seed wins
//! mode = amplitude          # amplitude | classical
//! heterodyne_filter = true  # default true
//! ```

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::analytic::{ensemble_coincidence, ensemble_intensity, AnalyticError};
use crate::montecarlo::{g2_estimate, CountsAccumulator, Mode, RunConfig};

pub const CSV_HEADER: [&str; 13] = [
    "tau21_s",
    "I1",
    "I2",
    "I3",
    "I4",
    "R13",
    "R24",
    "g2_13",
    "g2_13_err",
    "g2_24",
    "g2_24_err",
    "n_coinc_13",
    "n_coinc_24",
];

/// Environment variable overriding the file seed.
pub const SEED_ENV: &str = "COHOM_SEED";

pub const DEFAULT_SCAN_STEPS: usize = 21;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ConfigError {
    /// 1-based; 0 when the problem is not tied to a location.
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ConfigError {
    fn at(line: usize, column: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            column,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanSpec {
    pub start_s: f64,
    pub stop_s: f64,
    pub steps: usize,
}

impl ScanSpec {
    /// Evenly spaced `tau21` values, endpoints included.
    pub fn points(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.start_s];
        }
        let step = (self.stop_s - self.start_s) / (self.steps - 1) as f64;
        (0..self.steps)
            .map(|k| {
                if k + 1 == self.steps {
                    self.stop_s
                } else {
                    self.start_s + step * k as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Timing {
    Fixed { tau2_s: f64 },
    Scan(ScanSpec),
}

/// A parsed configuration file, in file units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub sigma_f_hz: f64,
    pub tau1_s: f64,
    pub timing: Timing,
    pub mean_photon_number: f64,
    pub n_pairs: u64,
    pub higher_order_ratio: f64,
    pub pulse_sigma_s: f64,
    pub coincidence_window_s: f64,
    pub seed: u64,
    pub mode: Mode,
    pub heterodyne_filter: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            sigma_f_hz: 1.0e6,
            tau1_s: 1.0e-6,
            timing: Timing::Fixed { tau2_s: 1.0e-6 },
            mean_photon_number: 0.02,
            n_pairs: 100_000,
            higher_order_ratio: 0.01,
            pulse_sigma_s: 0.5e-9,
            coincidence_window_s: 5.0e-9,
            seed: 0,
            mode: Mode::Amplitude,
            heterodyne_filter: true,
        }
    }
}

impl BenchConfig {
    pub fn scan(&self) -> Option<&ScanSpec> {
        match &self.timing {
            Timing::Scan(s) => Some(s),
            Timing::Fixed { .. } => None,
        }
    }

    /// Engine configuration at the given delays; `sigma_f` becomes rad/s.
    pub fn run_config_at(&self, tau2_s: f64) -> RunConfig {
        RunConfig {
            sigma_f: 2.0 * PI * self.sigma_f_hz,
            tau1: self.tau1_s,
            tau2: tau2_s,
            mean_photon_number: self.mean_photon_number,
            n_pairs: self.n_pairs,
            seed: self.seed,
            higher_order_ratio: self.higher_order_ratio,
            detector_pulse_sigma: self.pulse_sigma_s,
            coincidence_window: self.coincidence_window_s,
            heterodyne_filter: self.heterodyne_filter,
            mode: self.mode,
        }
    }

    /// `(tau21, RunConfig)` for every point: one for a fixed bench, the scan
    /// grid otherwise.
    pub fn points(&self) -> Vec<(f64, RunConfig)> {
        match &self.timing {
            Timing::Fixed { tau2_s } => vec![(tau2_s - self.tau1_s, self.run_config_at(*tau2_s))],
            Timing::Scan(s) => s
                .points()
                .into_iter()
                .map(|t21| (t21, self.run_config_at(self.tau1_s + t21)))
                .collect(),
        }
    }
}

#[derive(Clone, Copy)]
enum Key {
    SigmaF,
    Tau1,
    Tau2,
    ScanStart,
    ScanStop,
    ScanSteps,
    Mu,
    NPairs,
    HigherOrder,
    PulseSigma,
    Window,
    Seed,
    Mode,
    Filter,
}

const KEYS: [(&str, &str, Key); 14] = [
    ("bench", "sigma_f_hz", Key::SigmaF),
    ("bench", "tau1_s", Key::Tau1),
    ("bench", "tau2_s", Key::Tau2),
    ("bench", "tau21_start_s", Key::ScanStart),
    ("bench", "tau21_stop_s", Key::ScanStop),
    ("bench", "tau21_steps", Key::ScanSteps),
    ("source", "mean_photon_number", Key::Mu),
    ("source", "n_pairs", Key::NPairs),
    ("source", "higher_order_ratio", Key::HigherOrder),
    ("detector", "pulse_sigma_s", Key::PulseSigma),
    ("detector", "coincidence_window_s", Key::Window),
    ("run", "seed", Key::Seed),
    ("run", "mode", Key::Mode),
    ("run", "heterodyne_filter", Key::Filter),
];

struct Entry<'a> {
    value: &'a str,
    line: usize,
    key_col: usize,
    value_col: usize,
}

impl Entry<'_> {
    fn err(&self, message: impl Into<String>) -> ConfigError {
        ConfigError::at(self.line, self.value_col, message)
    }

    fn float(&self, name: &str) -> Result<f64, ConfigError> {
        match self.value.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(self.err(format!(
                "`{name}` expects a finite number, got `{}`",
                self.value
            ))),
        }
    }

    fn non_negative(&self, name: &str) -> Result<f64, ConfigError> {
        let v = self.float(name)?;
        if v < 0.0 {
            return Err(self.err(format!("`{name}` must be non-negative, got {v}")));
        }
        Ok(v)
    }

    fn positive(&self, name: &str) -> Result<f64, ConfigError> {
        let v = self.float(name)?;
        if v <= 0.0 {
            return Err(self.err(format!("`{name}` must be positive, got {v}")));
        }
        Ok(v)
    }

    /// Integers may be written in exponent form (`1e6`) when exact.
    fn integer(&self, name: &str) -> Result<u64, ConfigError> {
        if let Ok(v) = self.value.parse::<u64>() {
            return Ok(v);
        }
        match self.value.parse::<f64>() {
            Ok(v) if v.is_finite() && v >= 0.0 && v.fract() == 0.0 && v <= 2f64.powi(53) => {
                Ok(v as u64)
            }
            _ => Err(self.err(format!(
                "`{name}` expects a non-negative integer, got `{}`",
                self.value
            ))),
        }
    }
}

fn strip_comment(line: &str) -> &str {
    let trimmed = line.trim_start();
    if trimmed.starts_with('#') || trimmed.starts_with(';') {
        return "";
    }
    // Inline comments need whitespace before the marker.
    let bytes = line.as_bytes();
    for (k, &b) in bytes.iter().enumerate() {
        if (b == b'#' || b == b';') && k > 0 && bytes[k - 1].is_ascii_whitespace() {
            return &line[..k];
        }
    }
    line
}

fn column_of(line: &str, part: &str) -> usize {
    // `part` is a subslice of `line`.
    let offset = part.as_ptr() as usize - line.as_ptr() as usize;
    line[..offset].chars().count() + 1
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<BenchConfig, ConfigError> {
    let mut section: Option<&str> = None;
    let mut entries: Vec<Option<Entry>> = (0..KEYS.len()).map(|_| None).collect();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = strip_comment(raw);
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        let col = column_of(raw, trimmed);
        if let Some(rest) = trimmed.strip_prefix('[') {
            let Some(name) = rest.strip_suffix(']') else {
                return Err(ConfigError::at(line_no, col, "unterminated section header"));
            };
            let name = name.trim();
            if !KEYS.iter().any(|(s, _, _)| *s == name) {
                return Err(ConfigError::at(
                    line_no,
                    col,
                    format!("unknown section `[{name}]`"),
                ));
            }
            section = Some(name);
            continue;
        }
        let Some((key_part, value_part)) = trimmed.split_once('=') else {
            return Err(ConfigError::at(line_no, col, "expected `key = value`"));
        };
        let key = key_part.trim();
        let value = value_part.trim();
        let key_col = column_of(raw, key);
        let value_col = if value.is_empty() {
            column_of(raw, value_part) + value_part.chars().count()
        } else {
            column_of(raw, value)
        };
        let Some(sec) = section else {
            return Err(ConfigError::at(
                line_no,
                key_col,
                format!("key `{key}` appears before any section"),
            ));
        };
        let Some(slot) = KEYS.iter().position(|(s, k, _)| *s == sec && *k == key) else {
            return Err(ConfigError::at(
                line_no,
                key_col,
                format!("unknown key `{key}` in section [{sec}]"),
            ));
        };
        if entries[slot].is_some() {
            return Err(ConfigError::at(
                line_no,
                key_col,
                format!("duplicate key `{key}`"),
            ));
        }
        if value.is_empty() {
            return Err(ConfigError::at(
                line_no,
                value_col,
                format!("`{key}` has no value"),
            ));
        }
        entries[slot] = Some(Entry {
            value,
            line: line_no,
            key_col,
            value_col,
        });
    }

    let mut cfg = BenchConfig::default();
    let mut tau2: Option<(f64, &Entry)> = None;
    let mut scan_start: Option<(f64, &Entry)> = None;
    let mut scan_stop: Option<(f64, &Entry)> = None;
    let mut scan_steps: Option<(usize, &Entry)> = None;

    for ((_, name, key), entry) in KEYS.iter().zip(&entries) {
        let Some(e) = entry else { continue };
        match key {
            Key::SigmaF => cfg.sigma_f_hz = e.non_negative(name)?,
            Key::Tau1 => cfg.tau1_s = e.non_negative(name)?,
            Key::Tau2 => tau2 = Some((e.non_negative(name)?, e)),
            Key::ScanStart => scan_start = Some((e.float(name)?, e)),
            Key::ScanStop => scan_stop = Some((e.float(name)?, e)),
            Key::ScanSteps => {
                let n = e.integer(name)?;
                if n < 1 {
                    return Err(e.err("`tau21_steps` must be at least 1"));
                }
                scan_steps = Some((n as usize, e));
            }
            Key::Mu => cfg.mean_photon_number = e.positive(name)?,
            Key::NPairs => {
                cfg.n_pairs = e.integer(name)?;
                if cfg.n_pairs < 1 {
                    return Err(e.err("`n_pairs` must be at least 1"));
                }
            }
            Key::HigherOrder => {
                let v = e.non_negative(name)?;
                if v >= 1.0 {
                    return Err(e.err(format!("`{name}` must lie in [0, 1), got {v}")));
                }
                cfg.higher_order_ratio = v;
            }
            Key::PulseSigma => cfg.pulse_sigma_s = e.non_negative(name)?,
            Key::Window => cfg.coincidence_window_s = e.positive(name)?,
            Key::Seed => cfg.seed = e.integer(name)?,
            Key::Mode => cfg.mode = e.value.parse().map_err(|m: String| e.err(m))?,
            Key::Filter => {
                cfg.heterodyne_filter = match e.value {
                    "true" => true,
                    "false" => false,
                    other => {
                        return Err(e.err(format!("`{name}` expects true or false, got `{other}`")))
                    }
                }
            }
        }
    }

    let scan_given = scan_start.or(scan_stop).is_some() || scan_steps.is_some();
    cfg.timing = if scan_given {
        if let Some((_, e)) = tau2 {
            return Err(ConfigError::at(
                e.line,
                e.key_col,
                "`tau2_s` cannot be combined with a tau21 scan",
            ));
        }
        let first = scan_start
            .map(|(_, e)| e)
            .or(scan_stop.map(|(_, e)| e))
            .or(scan_steps.map(|(_, e)| e))
            .expect("scan key present");
        let Some((start_s, _)) = scan_start else {
            return Err(ConfigError::at(
                first.line,
                first.key_col,
                "scan needs `tau21_start_s`",
            ));
        };
        let Some((stop_s, _)) = scan_stop else {
            return Err(ConfigError::at(
                first.line,
                first.key_col,
                "scan needs `tau21_stop_s`",
            ));
        };
        let steps = scan_steps.map_or(DEFAULT_SCAN_STEPS, |(n, _)| n);
        let scan = ScanSpec {
            start_s,
            stop_s,
            steps,
        };
        for (t21, e) in [(start_s, scan_start), (stop_s, scan_stop)]
            .into_iter()
            .filter_map(|(t, e)| e.map(|(_, e)| (t, e)))
        {
            if cfg.tau1_s + t21 < 0.0 {
                return Err(e.err(format!("tau2 = tau1_s + {t21} would be negative")));
            }
        }
        Timing::Scan(scan)
    } else {
        Timing::Fixed {
            tau2_s: tau2.map_or(cfg.tau1_s, |(v, _)| v),
        }
    };
    Ok(cfg)
}

/// Canonical text form; `parse_config(&render_config(c)) == Ok(c)`.
pub fn render_config(cfg: &BenchConfig) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "[bench]");
    let _ = writeln!(out, "sigma_f_hz = {:?}", cfg.sigma_f_hz);
    let _ = writeln!(out, "tau1_s = {:?}", cfg.tau1_s);
    match &cfg.timing {
        Timing::Fixed { tau2_s } => {
            let _ = writeln!(out, "tau2_s = {tau2_s:?}");
        }
        Timing::Scan(s) => {
            let _ = writeln!(out, "tau21_start_s = {:?}", s.start_s);
            let _ = writeln!(out, "tau21_stop_s = {:?}", s.stop_s);
            let _ = writeln!(out, "tau21_steps = {}", s.steps);
        }
    }
    let _ = writeln!(out, "\n[source]");
    let _ = writeln!(out, "mean_photon_number = {:?}", cfg.mean_photon_number);
    let _ = writeln!(out, "n_pairs = {}", cfg.n_pairs);
    let _ = writeln!(out, "higher_order_ratio = {:?}", cfg.higher_order_ratio);
    let _ = writeln!(out, "\n[detector]");
    let _ = writeln!(out, "pulse_sigma_s = {:?}", cfg.pulse_sigma_s);
    let _ = writeln!(out, "coincidence_window_s = {:?}", cfg.coincidence_window_s);
    let _ = writeln!(out, "\n[run]");
    let _ = writeln!(out, "seed = {}", cfg.seed);
    let _ = writeln!(out, "mode = {}", cfg.mode);
    let _ = writeln!(out, "heterodyne_filter = {}", cfg.heterodyne_filter);
    out
}

/// Seed precedence: command-line flag, then `COHOM_SEED`, then the file.
pub fn resolve_seed(flag: Option<u64>, env: Option<&str>, file: u64) -> Result<u64, ConfigError> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match env {
        Some(text) => text.trim().parse().map_err(|_| {
            ConfigError::at(
                0,
                0,
                format!("{SEED_ENV}=`{text}` is not a non-negative integer"),
            )
        }),
        None => Ok(file),
    }
}

/// One scan point of a result table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub tau21_s: f64,
    /// Normalized port intensities I1..I4.
    pub intensities: [f64; 4],
    pub r13: f64,
    pub r24: f64,
    pub g2_13: f64,
    pub g2_13_err: f64,
    pub g2_24: f64,
    pub g2_24_err: f64,
    pub n_coinc_13: u64,
    pub n_coinc_24: u64,
}

impl ResultRow {
    fn floats(&self) -> [f64; 11] {
        let i = self.intensities;
        [
            self.tau21_s,
            i[0],
            i[1],
            i[2],
            i[3],
            self.r13,
            self.r24,
            self.g2_13,
            self.g2_13_err,
            self.g2_24,
            self.g2_24_err,
        ]
    }

    fn from_floats(f: [f64; 11], n_coinc_13: u64, n_coinc_24: u64) -> Self {
        Self {
            tau21_s: f[0],
            intensities: [f[1], f[2], f[3], f[4]],
            r13: f[5],
            r24: f[6],
            g2_13: f[7],
            g2_13_err: f[8],
            g2_24: f[9],
            g2_24_err: f[10],
            n_coinc_13,
            n_coinc_24,
        }
    }

    /// Closed-form row: Gaussian-averaged intensities and coincidences,
    /// `g2 = R / (I_i I_j)` with zero error and no counts.
    pub fn analytic(tau21_s: f64, run: &RunConfig) -> Result<Self, AnalyticError> {
        let (s, t1, t2) = (run.sigma_f, run.tau1, run.tau2);
        let mut intensities = [0.0; 4];
        for (k, slot) in intensities.iter_mut().enumerate() {
            *slot = ensemble_intensity(k as u8 + 1, s, t1, t2)?;
        }
        let r13 = ensemble_coincidence((1, 3), s, t1, t2)?;
        let r24 = ensemble_coincidence((2, 4), s, t1, t2)?;
        Ok(Self {
            tau21_s,
            intensities,
            r13,
            r24,
            g2_13: r13 / (intensities[0] * intensities[2]),
            g2_13_err: 0.0,
            g2_24: r24 / (intensities[1] * intensities[3]),
            g2_24_err: 0.0,
            n_coinc_13: 0,
            n_coinc_24: 0,
        })
    }

    /// Monte Carlo row: rates per generated pair and g2 estimates (NaN when
    /// undefined).
    pub fn from_counts(tau21_s: f64, counts: &CountsAccumulator) -> Self {
        let n = counts.n_generated as f64;
        let g2 = |pair| {
            g2_estimate(counts, pair).map_or((f64::NAN, f64::NAN), |g| (g.value, g.std_error))
        };
        let (g2_13, g2_13_err) = g2((1, 3));
        let (g2_24, g2_24_err) = g2((2, 4));
        Self {
            tau21_s,
            intensities: [1, 2, 3, 4].map(|k| counts.singles(k) as f64 / n),
            r13: counts.coincidences(1, 3) as f64 / n,
            r24: counts.coincidences(2, 4) as f64 / n,
            g2_13,
            g2_13_err,
            g2_24,
            g2_24_err,
            n_coinc_13: counts.coincidences(1, 3),
            n_coinc_24: counts.coincidences(2, 4),
        }
    }

    /// The row as stored on disk: every float cut to 12 significant digits.
    pub fn rounded(&self) -> Self {
        Self::from_floats(
            self.floats().map(round_sig12),
            self.n_coinc_13,
            self.n_coinc_24,
        )
    }
}

fn format_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else {
        format!("{x:.11e}")
    }
}

fn round_sig12(x: f64) -> f64 {
    if x.is_finite() {
        format_float(x).parse().expect("formatted float parses")
    } else {
        x
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    /// The effective configuration, rendered; re-running it reproduces the table.
    pub config: String,
    pub started_unix_s: f64,
    pub wall_clock_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub manifest: Manifest,
    pub rows: Vec<ResultRow>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, thiserror::Error)]
pub enum ResultsError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Write(#[from] std::io::Error),
    #[error("malformed csv: {0}")]
    Csv(String),
    #[error("malformed json: {0}")]
    Json(String),
}

impl From<csv::Error> for ResultsError {
    fn from(e: csv::Error) -> Self {
        ResultsError::Csv(e.to_string())
    }
}

/// CSV table, header first; the manifest is not part of the CSV.
pub fn render_csv(rows: &[ResultRow]) -> Result<String, ResultsError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for row in rows {
        let mut record: Vec<String> = row.floats().iter().map(|&x| format_float(x)).collect();
        record.push(row.n_coinc_13.to_string());
        record.push(row.n_coinc_24.to_string());
        w.write_record(&record)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| ResultsError::Csv(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is ASCII"))
}

pub fn parse_csv(text: &str) -> Result<Vec<ResultRow>, ResultsError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(ResultsError::Csv(format!("unexpected header {header:?}")));
    }
    let mut rows = Vec::new();
    for record in r.records() {
        let record = record?;
        let num = |k: usize| -> Result<f64, ResultsError> {
            record[k]
                .parse::<f64>()
                .map_err(|_| ResultsError::Csv(format!("bad number `{}`", &record[k])))
        };
        let count = |k: usize| -> Result<u64, ResultsError> {
            record[k]
                .parse::<u64>()
                .map_err(|_| ResultsError::Csv(format!("bad count `{}`", &record[k])))
        };
        let mut f = [0.0; 11];
        for (k, slot) in f.iter_mut().enumerate() {
            *slot = num(k)?;
        }
        rows.push(ResultRow::from_floats(f, count(11)?, count(12)?));
    }
    Ok(rows)
}

fn json_number(x: f64) -> Value {
    serde_json::Number::from_f64(round_sig12(x)).map_or(Value::Null, Value::Number)
}

pub fn render_json(result: &RunResult) -> Result<String, ResultsError> {
    let rows: Vec<Value> = result
        .rows
        .iter()
        .map(|row| {
            let mut obj = serde_json::Map::new();
            for (name, x) in CSV_HEADER.iter().zip(row.floats()) {
                obj.insert(name.to_string(), json_number(x));
            }
            obj.insert("n_coinc_13".into(), json!(row.n_coinc_13));
            obj.insert("n_coinc_24".into(), json!(row.n_coinc_24));
            Value::Object(obj)
        })
        .collect();
    let doc = json!({
        "manifest": result.manifest,
        "columns": CSV_HEADER,
        "rows": rows,
    });
    let mut text =
        serde_json::to_string_pretty(&doc).map_err(|e| ResultsError::Json(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

pub fn parse_json(text: &str) -> Result<RunResult, ResultsError> {
    let bad = |m: String| ResultsError::Json(m);
    let doc: Value = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    let manifest: Manifest = serde_json::from_value(doc["manifest"].clone())
        .map_err(|e| bad(format!("manifest: {e}")))?;
    let Some(items) = doc["rows"].as_array() else {
        return Err(bad("missing `rows`".into()));
    };
    let mut rows = Vec::with_capacity(items.len());
    for item in items {
        let mut f = [0.0; 11];
        for (slot, name) in f.iter_mut().zip(CSV_HEADER) {
            *slot = match &item[name] {
                Value::Null => f64::NAN,
                v => v
                    .as_f64()
                    .ok_or_else(|| bad(format!("`{name}` is not a number")))?,
            };
        }
        let count = |name: &str| {
            item[name]
                .as_u64()
                .ok_or_else(|| bad(format!("`{name}` is not a count")))
        };
        rows.push(ResultRow::from_floats(
            f,
            count("n_coinc_13")?,
            count("n_coinc_24")?,
        ));
    }
    Ok(RunResult { manifest, rows })
}

pub fn render_results(result: &RunResult, format: Format) -> Result<String, ResultsError> {
    match format {
        Format::Csv => render_csv(&result.rows),
        Format::Json => render_json(result),
    }
}

/// Writes `result` to `path`, or to standard output when `path` is `None`.
pub fn write_results(
    result: &RunResult,
    path: Option<&Path>,
    format: Format,
) -> Result<(), ResultsError> {
    let text = render_results(result, format)?;
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| ResultsError::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}
