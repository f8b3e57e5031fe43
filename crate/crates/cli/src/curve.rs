//! Curve files: `#`-prefixed `key=value` header lines followed by
//! whitespace-separated `theta x y` rows.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use gptshape::C64;

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, PartialEq)]
pub struct CurveFile {
    /// `(θ, z)` in increasing `θ`.
    pub samples: Vec<(f64, C64)>,
    pub closed: bool,
    /// Header entries other than `closed`, in key order.
    pub metadata: BTreeMap<String, String>,
}

impl CurveFile {
    /// Closed curve from points at `θ_j = 2πj/n`.
    pub fn uniform(points: &[C64]) -> Self {
        let n = points.len();
        Self {
            samples: points
                .iter()
                .enumerate()
                .map(|(j, z)| (2.0 * PI * j as f64 / n as f64, *z))
                .collect(),
            closed: true,
            metadata: BTreeMap::new(),
        }
    }

    pub fn with_metadata(mut self, key: &str, value: impl Into<String>) -> Self {
        self.metadata.insert(key.to_string(), value.into());
        self
    }

    pub fn points(&self) -> Vec<C64> {
        self.samples.iter().map(|(_, z)| *z).collect()
    }

    /// At least three samples, finite values, and `θ` strictly increasing
    /// in `[0, 2π)`. A closed curve must not repeat its first point at the
    /// end, the wrap is implied.
    pub fn validate(&self) -> CliResult<()> {
        if self.samples.len() < 3 {
            return Err(CliError::Usage(format!(
                "curve has {} samples, need at least 3",
                self.samples.len()
            )));
        }
        let mut previous = -1.0;
        for (theta, z) in &self.samples {
            if !(theta.is_finite() && z.is_finite()) {
                return Err(CliError::Usage("curve contains non-finite values".into()));
            }
            if *theta < 0.0 || *theta >= 2.0 * PI || *theta <= previous {
                return Err(CliError::Usage(format!(
                    "theta must increase strictly within [0, 2pi), got {theta} after {previous}"
                )));
            }
            previous = *theta;
        }
        if self.closed {
            let first = self.samples[0].1;
            let last = self.samples[self.samples.len() - 1].1;
            let scale = self.samples.iter().map(|(_, z)| (z - first).norm()).fold(0.0, f64::max);
            if (last - first).norm() <= 1e-12 * scale {
                return Err(CliError::Usage(
                    "closed curve repeats its first sample at the end".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# closed={}", self.closed).unwrap();
        for (key, value) in &self.metadata {
            writeln!(out, "# {key}={value}").unwrap();
        }
        writeln!(out, "# theta x y").unwrap();
        for (theta, z) in &self.samples {
            writeln!(out, "{theta} {} {}", z.re, z.im).unwrap();
        }
        out
    }

    pub fn from_text(text: &str) -> CliResult<Self> {
        let mut closed = None;
        let mut metadata = BTreeMap::new();
        let mut samples = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(header) = line.strip_prefix('#') {
                if let Some((key, value)) = header.split_once('=') {
                    let (key, value) = (key.trim(), value.trim());
                    if key == "closed" {
                        closed = Some(match value {
                            "true" => true,
                            "false" => false,
                            _ => {
                                return Err(CliError::Usage(format!(
                                    "closed flag must be true or false, got {value:?}"
                                )))
                            }
                        });
                    } else {
                        metadata.insert(key.to_string(), value.to_string());
                    }
                }
                continue;
            }
            let fields: Vec<f64> = line
                .split_whitespace()
                .map(str::parse)
                .collect::<Result<_, _>>()
                .map_err(|_| CliError::Usage(format!("line {}: expected three numbers", lineno + 1)))?;
            if fields.len() != 3 {
                return Err(CliError::Usage(format!("line {}: expected three numbers", lineno + 1)));
            }
            samples.push((fields[0], C64::new(fields[1], fields[2])));
        }
        let curve = Self {
            samples,
            closed: closed.ok_or_else(|| CliError::Usage("curve header lacks the closed flag".into()))?,
            metadata,
        };
        curve.validate()?;
        Ok(curve)
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_text(&text).map_err(|e| match e {
            CliError::Usage(msg) => CliError::Usage(format!("{}: {msg}", path.display())),
            other => other,
        })
    }
}
