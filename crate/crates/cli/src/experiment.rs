//! One forward/recovery run: shape construction from flags, forward GPTs
//! with optional noise, recovery by a chosen method, and curve output.

use std::collections::BTreeMap;
use std::fmt;

use gptshape::conformal::{boundary_frame, ExteriorMap, ShapeSpec};
use gptshape::potential::Contrast;
use gptshape::recover::{
    recover_conformal, recover_disk, recover_ellipse_perturbation, Displacement, EllipseParams, PerturbationResult,
};
use gptshape::tensors::{add_noise, gpt_forward, GptMatrix, NoiseScale};
use gptshape::C64;

use crate::curve::CurveFile;
use crate::document::{format_complex, format_real, ForwardMetadata, GptDocument};
use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, clap::ValueEnum)]
pub enum Method {
    /// Perturbed disk.
    Disk,
    /// Perturbed equivalent ellipse.
    Ellipse,
    /// Exterior conformal map coefficients.
    Conformal,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Disk, Method::Ellipse, Method::Conformal];

    pub fn name(self) -> &'static str {
        match self {
            Method::Disk => "disk",
            Method::Ellipse => "ellipse",
            Method::Conformal => "conformal",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Optional shape flags; which ones apply depends on the shape name.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ShapeParams {
    pub radius: Option<f64>,
    pub gamma: Option<f64>,
    pub e1: Option<C64>,
    pub center: Option<C64>,
}

#[derive(Clone, Debug)]
pub struct NamedShape {
    pub name: String,
    pub geometry: ShapeSpec,
    /// Effective parameter values, recorded in output metadata.
    pub parameters: BTreeMap<String, String>,
}

impl NamedShape {
    /// `disk` takes `radius` and `center`, `ellipse` takes `gamma`, `e1` and
    /// `center`, `asymmetric` takes `center`; the other catalog shapes take
    /// no parameters.
    pub fn build(name: &str, params: &ShapeParams) -> CliResult<Self> {
        let allowed: &[&str] = match name {
            "disk" => &["radius", "center"],
            "ellipse" => &["gamma", "e1", "center"],
            "asymmetric" => &["center"],
            "kite" | "straight" | "crescent" => &[],
            _ => {
                return Err(CliError::Usage(format!(
                    "unknown shape {name:?}; expected disk, ellipse, asymmetric, kite, straight or crescent"
                )))
            }
        };
        let given = [
            ("radius", params.radius.is_some()),
            ("gamma", params.gamma.is_some()),
            ("e1", params.e1.is_some()),
            ("center", params.center.is_some()),
        ];
        for (flag, present) in given {
            if present && !allowed.contains(&flag) {
                return Err(CliError::Usage(format!("--{flag} does not apply to shape {name}")));
            }
        }
        let center = params.center.unwrap_or(C64::new(0.0, 0.0));
        let mut parameters = BTreeMap::new();
        let usage = |e: gptshape::Error| CliError::Usage(e.to_string());
        let geometry = match name {
            "disk" => {
                let radius = params.radius.unwrap_or(1.0);
                parameters.insert("radius".into(), format_real(radius));
                parameters.insert("center".into(), format_complex(center));
                ShapeSpec::Map(ExteriorMap::disk(radius, center).map_err(usage)?)
            }
            "ellipse" => {
                let gamma = params.gamma.unwrap_or(1.0);
                let e1 = params.e1.unwrap_or(C64::new(0.5, 0.0));
                parameters.insert("gamma".into(), format_real(gamma));
                parameters.insert("e1".into(), format_complex(e1));
                parameters.insert("center".into(), format_complex(center));
                ShapeSpec::Map(EllipseParams::new(gamma, center, e1).map_err(usage)?.map())
            }
            "asymmetric" => {
                parameters.insert("center".into(), format_complex(center));
                ShapeSpec::Map(ExteriorMap::asymmetric().translated(center))
            }
            other => ShapeSpec::by_name(other).expect("catalog shape"),
        };
        Ok(Self {
            name: name.to_string(),
            geometry,
            parameters,
        })
    }

    /// Boundary samples at uniform parameter values.
    pub fn curve(&self, samples: usize) -> CurveFile {
        let mut curve = CurveFile::uniform(&self.geometry.sample(samples)).with_metadata("shape", self.name.clone());
        for (key, value) in &self.parameters {
            curve = curve.with_metadata(key, value.clone());
        }
        curve
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub shape: NamedShape,
    pub contrast: Contrast,
    pub order: usize,
    pub n_quad: usize,
    /// Decibels; `+∞` for exact data.
    pub snr: f64,
    pub seed: u64,
    pub noise_scale: NoiseScale,
    pub method: Method,
    pub curve_samples: usize,
}

impl ExperimentConfig {
    /// Defaults: order 6, 1024 quadrature nodes, no noise, seed 0, 512
    /// curve samples, conformal recovery.
    pub fn new(shape: NamedShape, contrast: Contrast) -> Self {
        Self {
            shape,
            contrast,
            order: 6,
            n_quad: 1024,
            snr: f64::INFINITY,
            seed: 0,
            noise_scale: NoiseScale::default(),
            method: Method::Conformal,
            curve_samples: 512,
        }
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.order < 2 {
            return Err(CliError::Usage(format!("order must be at least 2, got {}", self.order)));
        }
        if self.n_quad < 8 * self.order {
            return Err(CliError::Usage(format!(
                "quadrature nodes {} below 8 x order = {}",
                self.n_quad,
                8 * self.order
            )));
        }
        if self.curve_samples < 8 {
            return Err(CliError::Usage(format!("curve samples {} below 8", self.curve_samples)));
        }
        if self.snr.is_nan() || self.snr == f64::NEG_INFINITY {
            return Err(CliError::Usage(format!("invalid SNR {}", self.snr)));
        }
        Ok(())
    }

    /// Nyström GPTs of the shape, with noise when `snr` is finite.
    pub fn forward(&self) -> CliResult<GptDocument> {
        self.validate()?;
        let frame = boundary_frame(&self.shape.geometry, self.n_quad)?;
        let exact = gpt_forward(&frame, self.contrast, self.order)?;
        let gpt = add_noise(&exact, self.snr, self.seed, self.noise_scale);
        let metadata = ForwardMetadata {
            shape: self.shape.name.clone(),
            shape_parameters: self.shape.parameters.clone(),
            n_quad: self.n_quad,
            snr: self.snr,
            seed: self.seed,
            noise_scale: self.noise_scale,
        };
        Ok(GptDocument::new(&gpt, self.contrast, metadata))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Reconstruction {
    Perturbation(PerturbationResult),
    Map(ExteriorMap),
}

/// Runs `method` on the leading `order` x `order` block of the GPTs.
pub fn reconstruct(gpt: &GptMatrix, contrast: Contrast, method: Method, order: usize) -> CliResult<Reconstruction> {
    if order > gpt.order() {
        return Err(CliError::Usage(format!(
            "requested order {order} exceeds the document order {}",
            gpt.order()
        )));
    }
    Ok(match method {
        Method::Disk => Reconstruction::Perturbation(recover_disk(gpt, contrast, order)?),
        Method::Ellipse => Reconstruction::Perturbation(recover_ellipse_perturbation(gpt, contrast, order)?),
        Method::Conformal => Reconstruction::Map(recover_conformal(gpt, contrast, order)?),
    })
}

impl Reconstruction {
    pub fn points(&self, samples: usize) -> Vec<C64> {
        match self {
            Reconstruction::Perturbation(result) => result.curve(samples),
            Reconstruction::Map(map) => (0..samples)
                .map(|j| map.boundary_point(2.0 * std::f64::consts::PI * j as f64 / samples as f64))
                .collect(),
        }
    }

    /// Recovered parameters as header entries.
    pub fn parameters(&self) -> BTreeMap<String, String> {
        let mut out = BTreeMap::new();
        match self {
            Reconstruction::Perturbation(result) => {
                let base = &result.base;
                match result.displacement {
                    Displacement::Disk => {
                        out.insert("method".into(), "disk".into());
                        out.insert("gamma".into(), format_real(base.gamma_e));
                        out.insert("center".into(), format_complex(base.e0));
                    }
                    Displacement::Ellipse => {
                        out.insert("method".into(), "ellipse".into());
                        out.insert("gamma_e".into(), format_real(base.gamma_e));
                        out.insert("e0".into(), format_complex(base.e0));
                        out.insert("e1".into(), format_complex(base.e1));
                        out.insert("aspect_ratio".into(), format_real(base.aspect_ratio()));
                    }
                }
                for (k, c) in result.fhat.iter().enumerate() {
                    out.insert(format!("fhat_{k}"), format_complex(*c));
                }
            }
            Reconstruction::Map(map) => {
                out.insert("method".into(), "conformal".into());
                out.insert("gamma".into(), format_real(map.gamma()));
                out.insert("a_0".into(), format_complex(map.a0()));
                for (k, c) in map.tail().iter().enumerate() {
                    out.insert(format!("a_{}", k + 1), format_complex(*c));
                }
            }
        }
        out
    }

    pub fn curve(&self, samples: usize) -> CurveFile {
        let mut curve = CurveFile::uniform(&self.points(samples));
        curve.metadata = self.parameters();
        curve
    }
}
