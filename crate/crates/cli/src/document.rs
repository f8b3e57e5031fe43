//! GPT documents: JSON with `order`, `sigma`, `lambda`, `n1`, `n2` and
//! forward metadata. Entries are `[re, im]` pairs, rows outermost.

use std::collections::BTreeMap;
use std::path::Path;

use gptshape::potential::Contrast;
use gptshape::tensors::{GptMatrix, NoiseScale};
use gptshape::C64;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Reals that may be infinite, written as a JSON number or `"inf"`.
mod extended {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Number(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(value: &f64, serializer: S) -> Result<S::Ok, S::Error> {
        if value.is_finite() {
            Repr::Number(*value)
        } else {
            Repr::Text(super::format_real(*value))
        }
        .serialize(serializer)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<f64, D::Error> {
        match Repr::deserialize(deserializer)? {
            Repr::Number(x) => Ok(x),
            Repr::Text(s) => super::parse_real(&s).map_err(serde::de::Error::custom),
        }
    }
}

/// Shortest round-trip text for a real, with `inf`/`-inf` for infinities.
pub fn format_real(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x}")
    }
}

/// Parses a decimal, a ratio `a/b`, or `inf`.
pub fn parse_real(text: &str) -> Result<f64, String> {
    let t = text.trim();
    match t.to_ascii_lowercase().as_str() {
        "inf" | "infinity" | "+inf" => return Ok(f64::INFINITY),
        "-inf" | "-infinity" => return Ok(f64::NEG_INFINITY),
        _ => {}
    }
    let parse = |s: &str| s.trim().parse::<f64>().map_err(|_| format!("not a number: {text:?}"));
    let value = match t.split_once('/') {
        Some((num, den)) => parse(num)? / parse(den)?,
        None => parse(t)?,
    };
    if value.is_nan() {
        return Err(format!("not a number: {text:?}"));
    }
    Ok(value)
}

pub fn format_complex(z: C64) -> String {
    format!("{},{}", z.re, z.im)
}

/// `re` or `re,im`.
pub fn parse_complex(text: &str) -> Result<C64, String> {
    let parse = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| format!("not a complex number: {text:?}"))
    };
    match text.split_once(',') {
        Some((re, im)) => Ok(C64::new(parse(re)?, parse(im)?)),
        None => Ok(C64::new(parse(text)?, 0.0)),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForwardMetadata {
    pub shape: String,
    /// Shape flags as given, e.g. `radius`, `center`.
    #[serde(default)]
    pub shape_parameters: BTreeMap<String, String>,
    pub n_quad: usize,
    #[serde(with = "extended")]
    pub snr: f64,
    pub seed: u64,
    pub noise_scale: NoiseScale,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GptDocument {
    pub order: usize,
    #[serde(with = "extended")]
    pub sigma: f64,
    pub lambda: f64,
    pub n1: Vec<Vec<[f64; 2]>>,
    pub n2: Vec<Vec<[f64; 2]>>,
    pub metadata: ForwardMetadata,
}

fn rows(m: &DMatrix<C64>) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

fn matrix(name: &str, rows: &[Vec<[f64; 2]>], order: usize) -> CliResult<DMatrix<C64>> {
    if rows.len() != order || rows.iter().any(|r| r.len() != order) {
        return Err(CliError::Usage(format!("{name} must be {order} x {order}")));
    }
    Ok(DMatrix::from_fn(order, order, |i, j| {
        C64::new(rows[i][j][0], rows[i][j][1])
    }))
}

impl GptDocument {
    pub fn new(gpt: &GptMatrix, contrast: Contrast, metadata: ForwardMetadata) -> Self {
        Self {
            order: gpt.order(),
            sigma: contrast.sigma(),
            lambda: gpt.lambda,
            n1: rows(&gpt.n1),
            n2: rows(&gpt.n2),
            metadata,
        }
    }

    pub fn contrast(&self) -> CliResult<Contrast> {
        let contrast = Contrast::from_sigma(self.sigma)?;
        if (contrast.lambda() - self.lambda).abs() > 1e-12 * self.lambda.abs() {
            return Err(CliError::Usage(format!(
                "lambda {} does not match sigma {}",
                self.lambda,
                format_real(self.sigma)
            )));
        }
        Ok(contrast)
    }

    pub fn gpt(&self) -> CliResult<GptMatrix> {
        let n1 = matrix("n1", &self.n1, self.order)?;
        let n2 = matrix("n2", &self.n2, self.order)?;
        Ok(GptMatrix::new(n1, n2, self.lambda)?)
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("GPT document serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Usage(format!("malformed GPT document: {e}")))
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text)
    }
}
