//! Deterministic benchmark datasets and integer file I/O.
//!
//! All generators draw from [`SplitMix64`], so a `(family, n, k, seed)`
//! tuple yields the same array on every platform.
//!
//! | family           | values                                              |
//! |------------------|-----------------------------------------------------|
//! | `uniform`        | i.i.d. in `[0, k-1]`                                |
//! | `gaussian`       | `round(N(0, k/4))` clamped to `[-k/2, k/2]`         |
//! | `zipf`           | rank `r ∈ [1, k]` with `p(r) ∝ r^-s`, `k ≤ 10^6`    |
//! | `presorted_asc`  | `0, 1, …, n-1`                                      |
//! | `presorted_desc` | `n-1, …, 1, 0`                                      |
//! | `sawtooth`       | `i mod period`                                      |
//! | `alternating`    | `0, k-1, 0, k-1, …`                                 |
//! | `constant`       | all zeros                                           |
//! | `empty`          | nothing                                             |
//!
//! Gaussian draws use the inverse normal CDF on a uniform variate rather
//! than Box–Muller.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::SortKey;

pub const ZIPF_MAX_K: u64 = 1_000_000;
pub const DEFAULT_ZIPF_S: f64 = 1.5;
pub const DEFAULT_SAWTOOTH_PERIOD: u64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Uniform,
    Gaussian,
    Zipf,
    PresortedAsc,
    PresortedDesc,
    Sawtooth,
    Alternating,
    Constant,
    Empty,
}

impl Family {
    pub const ALL: [Family; 9] = [
        Family::Uniform,
        Family::Gaussian,
        Family::Zipf,
        Family::PresortedAsc,
        Family::PresortedDesc,
        Family::Sawtooth,
        Family::Alternating,
        Family::Constant,
        Family::Empty,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::Uniform => "uniform",
            Family::Gaussian => "gaussian",
            Family::Zipf => "zipf",
            Family::PresortedAsc => "presorted_asc",
            Family::PresortedDesc => "presorted_desc",
            Family::Sawtooth => "sawtooth",
            Family::Alternating => "alternating",
            Family::Constant => "constant",
            Family::Empty => "empty",
        }
    }

    fn uses_range(self) -> bool {
        matches!(
            self,
            Family::Uniform | Family::Gaussian | Family::Zipf | Family::Alternating
        )
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::InvalidDataset(format!("unknown family {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub family: Family,
    pub n: usize,
    pub k: u64,
    pub seed: u64,
    pub zipf_s: f64,
    pub sawtooth_period: u64,
}

impl DatasetSpec {
    pub fn new(family: Family, n: usize, k: u64, seed: u64) -> Self {
        Self {
            family,
            n,
            k,
            seed,
            zipf_s: DEFAULT_ZIPF_S,
            sawtooth_period: DEFAULT_SAWTOOTH_PERIOD,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.family.uses_range() && self.k == 0 {
            return Err(Error::InvalidDataset(format!("{}: k must be at least 1", self.family)));
        }
        if self.family == Family::Zipf {
            if !(self.zipf_s > 1.0 && self.zipf_s.is_finite()) {
                return Err(Error::InvalidDataset(format!(
                    "zipf skew {} must exceed 1",
                    self.zipf_s
                )));
            }
            if self.k > ZIPF_MAX_K {
                return Err(Error::ZipfRangeCap {
                    k: self.k,
                    cap: ZIPF_MAX_K,
                });
            }
        }
        if self.family == Family::Sawtooth && self.sawtooth_period == 0 {
            return Err(Error::InvalidDataset("sawtooth period must be at least 1".into()));
        }
        Ok(())
    }

    /// Stable identifier, e.g. `uniform:n=1000:k=500:seed=1`.
    pub fn id(&self) -> String {
        let mut id = format!("{}:n={}", self.family, self.n);
        if self.family.uses_range() {
            id.push_str(&format!(":k={}", self.k));
        }
        match self.family {
            Family::Zipf => id.push_str(&format!(":s={}", self.zipf_s)),
            Family::Sawtooth => id.push_str(&format!(":period={}", self.sawtooth_period)),
            _ => {}
        }
        id.push_str(&format!(":seed={}", self.seed));
        id
    }
}

impl FromStr for DatasetSpec {
    type Err = Error;

    /// Parses `family[:key=value]...` with keys `n`, `k`, `seed`, `s`,
    /// `period`. Missing keys default to `n=1000`, `k=1000`, `seed=42`.
    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split(':');
        let family: Family = parts.next().unwrap_or_default().parse()?;
        let mut spec = DatasetSpec::new(family, 1000, 1000, 42);
        for part in parts {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::InvalidDataset(format!("expected key=value, got {part:?}")))?;
            let bad = || Error::InvalidDataset(format!("bad value for {key}: {value:?}"));
            match key {
                "n" => spec.n = parse_count(value).ok_or_else(bad)? as usize,
                "k" => spec.k = parse_count(value).ok_or_else(bad)?,
                "seed" => spec.seed = value.parse().map_err(|_| bad())?,
                "s" => spec.zipf_s = value.parse().map_err(|_| bad())?,
                "period" => spec.sawtooth_period = parse_count(value).ok_or_else(bad)?,
                _ => return Err(Error::InvalidDataset(format!("unknown key {key:?}"))),
            }
        }
        spec.validate()?;
        Ok(spec)
    }
}

/// Accepts plain integers and `1e6`-style powers of ten.
pub fn parse_count(s: &str) -> Option<u64> {
    if let Some((mantissa, exp)) = s.split_once(['e', 'E']) {
        let m: u64 = mantissa.parse().ok()?;
        let e: u32 = exp.parse().ok()?;
        10u64.checked_pow(e)?.checked_mul(m)
    } else {
        s.parse().ok()
    }
}

pub fn generate(spec: &DatasetSpec) -> Result<Vec<SortKey>> {
    spec.validate()?;
    let n = spec.n;
    let mut rng = SplitMix64::new(spec.seed);
    let k = spec.k;
    let data = match spec.family {
        Family::Empty => Vec::new(),
        Family::Constant => vec![0; n],
        Family::PresortedAsc => (0..n as i64).collect(),
        Family::PresortedDesc => (0..n as i64).rev().collect(),
        Family::Sawtooth => (0..n as u64).map(|i| (i % spec.sawtooth_period) as i64).collect(),
        Family::Alternating => {
            let hi = (k - 1) as i64;
            (0..n).map(|i| if i % 2 == 0 { 0 } else { hi }).collect()
        }
        Family::Uniform => (0..n).map(|_| rng.below(k) as i64).collect(),
        Family::Gaussian => {
            let sigma = (k as f64 / 4.0).sqrt();
            let half = (k / 2) as f64;
            let normal =
                Normal::new(0.0, sigma.max(f64::MIN_POSITIVE)).map_err(|e| Error::InvalidDataset(e.to_string()))?;
            (0..n)
                .map(|_| {
                    let x = normal.inverse_cdf(rng.next_open_f64()).round();
                    x.clamp(-half, half) as i64
                })
                .collect()
        }
        Family::Zipf => {
            let table = zipf_cdf(k as usize, spec.zipf_s);
            (0..n)
                .map(|_| {
                    let u = rng.next_f64();
                    let rank = table.partition_point(|&c| c <= u).min(table.len() - 1);
                    rank as i64 + 1
                })
                .collect()
        }
    };
    Ok(data)
}

/// Cumulative distribution over ranks `1..=k`, last entry forced to 1.
fn zipf_cdf(k: usize, s: f64) -> Vec<f64> {
    let weights: Vec<f64> = (1..=k).map(|r| (r as f64).powf(-s)).collect();
    let total: f64 = weights.iter().sum();
    let mut acc = 0.0;
    let mut cdf: Vec<f64> = weights
        .iter()
        .map(|w| {
            acc += w / total;
            acc
        })
        .collect();
    if let Some(last) = cdf.last_mut() {
        *last = 1.0;
    }
    cdf
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FileFormat {
    /// Newline-delimited signed decimal integers.
    #[default]
    Text,
    /// Little-endian `i64`, no header.
    Binary,
}

impl FromStr for FileFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(FileFormat::Text),
            "binary" => Ok(FileFormat::Binary),
            _ => Err(Error::InvalidDataset(format!("unknown format {s:?}"))),
        }
    }
}

/// Reads a dataset file. Any invalid token aborts the whole load.
pub fn load_file(path: &Path, format: FileFormat) -> Result<Vec<SortKey>> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes, format, path)
}

/// Parses dataset bytes; `origin` names the source in error messages.
pub fn decode(bytes: &[u8], format: FileFormat, origin: &Path) -> Result<Vec<SortKey>> {
    match format {
        FileFormat::Text => parse_text(origin, bytes),
        FileFormat::Binary => {
            if bytes.len() % 8 != 0 {
                return Err(Error::TruncatedBinary {
                    path: origin.to_owned(),
                    len: bytes.len() as u64,
                });
            }
            Ok(bytes
                .chunks_exact(8)
                .map(|c| i64::from_le_bytes(c.try_into().unwrap()))
                .collect())
        }
    }
}

fn parse_text(path: &Path, bytes: &[u8]) -> Result<Vec<SortKey>> {
    let text = String::from_utf8_lossy(bytes);
    let mut out = Vec::new();
    for (i, token) in text.lines().enumerate() {
        match parse_integer(token) {
            Some(v) => out.push(v),
            None => {
                return Err(Error::InvalidToken {
                    path: path.to_owned(),
                    line: i + 1,
                    token: token.to_owned(),
                })
            }
        }
    }
    Ok(out)
}

/// Optional leading `-`, then ASCII digits only.
fn parse_integer(token: &str) -> Option<i64> {
    let digits = token.strip_prefix('-').unwrap_or(token);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    token.parse().ok()
}

pub fn write_file(path: &Path, data: &[SortKey], format: FileFormat) -> Result<()> {
    let bytes = encode(data, format);
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn encode(data: &[SortKey], format: FileFormat) -> Vec<u8> {
    match format {
        FileFormat::Text => {
            let mut out = Vec::with_capacity(data.len() * 8);
            for x in data {
                writeln!(out, "{x}").expect("writing to a Vec cannot fail");
            }
            out
        }
        FileFormat::Binary => data.iter().flat_map(|x| x.to_le_bytes()).collect(),
    }
}
