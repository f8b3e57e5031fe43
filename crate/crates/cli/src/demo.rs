//! Figure reproductions: every (method x contrast) cell of a figure, with
//! per-cell GPT, curve and metric files plus a manifest of overlay pairs.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use gptshape::potential::Contrast;
use gptshape::tensors::NoiseScale;
use rayon::prelude::*;

use crate::document::{format_real, GptDocument};
use crate::error::{CliError, CliResult};
use crate::experiment::{reconstruct, ExperimentConfig, Method, NamedShape, ShapeParams};
use crate::metrics::{compare, ShapeMetrics};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Figure {
    /// Kite at sigma 5, 50 and inf.
    Kite,
    /// Kite at sigma 50 with orders 2 and 4.
    KiteOrders,
    /// Asymmetric map shape at sigma 1/5, 1/50 and 0.
    Asymmetric,
    /// Asymmetric map shape at sigma 1/50 with SNR inf, 5 and 2.
    AsymmetricNoise,
    /// Rotated rectangle at sigma 1/5, 1/50 and 0.
    Straight,
    /// Crescent at sigma 5, 50 and inf.
    Crescent,
}

impl Figure {
    pub fn name(self) -> &'static str {
        match self {
            Figure::Kite => "kite",
            Figure::KiteOrders => "kite-orders",
            Figure::Asymmetric => "asymmetric",
            Figure::AsymmetricNoise => "asymmetric-noise",
            Figure::Straight => "straight",
            Figure::Crescent => "crescent",
        }
    }

    fn shape(self) -> &'static str {
        match self {
            Figure::Kite | Figure::KiteOrders => "kite",
            Figure::Asymmetric | Figure::AsymmetricNoise => "asymmetric",
            Figure::Straight => "straight",
            Figure::Crescent => "crescent",
        }
    }

    /// `(σ, order, snr)` per GPT set.
    fn grid(self) -> Vec<(f64, usize, f64)> {
        let inf = f64::INFINITY;
        match self {
            Figure::Kite | Figure::Crescent => vec![(5.0, 6, inf), (50.0, 6, inf), (inf, 6, inf)],
            Figure::KiteOrders => vec![(50.0, 2, inf), (50.0, 4, inf)],
            Figure::Asymmetric | Figure::Straight => vec![(0.2, 6, inf), (0.02, 6, inf), (0.0, 6, inf)],
            Figure::AsymmetricNoise => vec![(0.02, 6, inf), (0.02, 6, 5.0), (0.02, 6, 2.0)],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DemoOptions {
    pub n_quad: usize,
    pub curve_samples: usize,
    pub seed: u64,
    pub noise_scale: NoiseScale,
}

impl Default for DemoOptions {
    fn default() -> Self {
        Self {
            n_quad: 1024,
            curve_samples: 512,
            seed: 0,
            noise_scale: NoiseScale::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Cell {
    pub label: String,
    pub config: ExperimentConfig,
}

fn gpt_label(shape: &str, sigma: f64, order: usize, snr: f64) -> String {
    format!(
        "{shape}_sigma-{}_ord-{order}_snr-{}",
        format_real(sigma),
        format_real(snr)
    )
}

pub fn cells(figure: Figure, options: &DemoOptions) -> CliResult<Vec<Cell>> {
    let shape = NamedShape::build(figure.shape(), &ShapeParams::default())?;
    let mut out = Vec::new();
    for (sigma, order, snr) in figure.grid() {
        let contrast = Contrast::from_sigma(sigma)?;
        for method in Method::ALL {
            let mut config = ExperimentConfig::new(shape.clone(), contrast);
            config.order = order;
            config.n_quad = options.n_quad;
            config.snr = snr;
            config.seed = options.seed;
            config.noise_scale = options.noise_scale;
            config.method = method;
            config.curve_samples = options.curve_samples;
            out.push(Cell {
                label: format!("{}_{method}", gpt_label(figure.shape(), sigma, order, snr)),
                config,
            });
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub enum CellStatus {
    Ok(ShapeMetrics),
    /// The reconstruction crosses itself, so no area metric exists.
    NonSimple,
    Failed(String),
}

#[derive(Clone, Debug)]
pub struct CellOutcome {
    pub label: String,
    pub method: Method,
    pub sigma: f64,
    pub order: usize,
    pub snr: f64,
    pub gpt_file: String,
    pub recon_file: Option<String>,
    pub status: CellStatus,
}

impl CellOutcome {
    pub fn metrics(&self) -> Option<ShapeMetrics> {
        match self.status {
            CellStatus::Ok(m) => Some(m),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct DemoReport {
    pub figure: Figure,
    pub truth_file: String,
    pub cells: Vec<CellOutcome>,
}

impl DemoReport {
    pub fn find(&self, method: Method, sigma: f64, order: usize, snr: f64) -> Option<&CellOutcome> {
        self.cells
            .iter()
            .find(|c| c.method == method && c.sigma == sigma && c.order == order && c.snr == snr)
    }

    pub fn failures(&self) -> usize {
        self.cells
            .iter()
            .filter(|c| matches!(c.status, CellStatus::Failed(_)))
            .count()
    }

    pub fn manifest(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# figure={}", self.figure.name()).unwrap();
        writeln!(out, "# truth={}", self.truth_file).unwrap();
        writeln!(
            out,
            "# cell method sigma order snr gpt recon status symmetric_difference hausdorff"
        )
        .unwrap();
        for c in &self.cells {
            let (status, sd, hd) = match &c.status {
                CellStatus::Ok(m) => ("ok", format!("{}", m.symmetric_difference), format!("{}", m.hausdorff)),
                CellStatus::NonSimple => ("non-simple", "nan".into(), "nan".into()),
                CellStatus::Failed(_) => ("failed", "nan".into(), "nan".into()),
            };
            writeln!(
                out,
                "{} {} {} {} {} {} {} {status} {sd} {hd}",
                c.label,
                c.method,
                format_real(c.sigma),
                c.order,
                format_real(c.snr),
                c.gpt_file,
                c.recon_file.as_deref().unwrap_or("-"),
            )
            .unwrap();
        }
        out
    }
}

fn write(dir: &Path, name: &str, contents: &str) -> CliResult<()> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| CliError::io(&path, e))
}

/// Runs every cell of `figure`, writing into `out_dir`. Cells that fail
/// are recorded in the manifest and the report; only I/O and setup errors
/// abort the run.
pub fn run_demo(figure: Figure, options: &DemoOptions, out_dir: &Path) -> CliResult<DemoReport> {
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    let cells = cells(figure, options)?;
    let truth_config = &cells[0].config;
    let truth = truth_config.shape.curve(options.curve_samples);
    let truth_file = format!("{}.truth.txt", figure.shape());
    write(out_dir, &truth_file, &truth.to_text())?;

    // One GPT set per (σ, order, snr), shared by the three methods.
    let mut gpt_jobs: BTreeMap<String, &ExperimentConfig> = BTreeMap::new();
    for cell in &cells {
        let c = &cell.config;
        gpt_jobs
            .entry(gpt_label(figure.shape(), c.contrast.sigma(), c.order, c.snr))
            .or_insert(c);
    }
    let documents: BTreeMap<String, Result<GptDocument, String>> = gpt_jobs
        .into_par_iter()
        .map(|(label, config)| {
            let doc = config.forward().map_err(|e| e.to_string());
            (label, doc)
        })
        .collect();
    for (label, doc) in &documents {
        if let Ok(doc) = doc {
            write(out_dir, &format!("{label}.gpt.json"), &doc.to_json())?;
        }
    }

    let outcomes: Vec<CliResult<CellOutcome>> = cells
        .par_iter()
        .map(|cell| {
            let c = &cell.config;
            let key = gpt_label(figure.shape(), c.contrast.sigma(), c.order, c.snr);
            let mut outcome = CellOutcome {
                label: cell.label.clone(),
                method: c.method,
                sigma: c.contrast.sigma(),
                order: c.order,
                snr: c.snr,
                gpt_file: format!("{key}.gpt.json"),
                recon_file: None,
                status: CellStatus::NonSimple,
            };
            let recon = match &documents[&key] {
                Err(msg) => Err(msg.clone()),
                Ok(doc) => doc
                    .gpt()
                    .and_then(|gpt| reconstruct(&gpt, c.contrast, c.method, c.order))
                    .map_err(|e| e.to_string()),
            };
            let metrics_file = format!("{}.metrics.txt", cell.label);
            match recon {
                Err(msg) => {
                    write(out_dir, &metrics_file, &format!("status=failed\nerror={msg}\n"))?;
                    outcome.status = CellStatus::Failed(msg);
                }
                Ok(recon) => {
                    let curve = recon.curve(c.curve_samples);
                    let recon_file = format!("{}.recon.txt", cell.label);
                    write(out_dir, &recon_file, &curve.to_text())?;
                    outcome.recon_file = Some(recon_file);
                    match compare(&truth, &curve) {
                        Ok(m) => {
                            write(out_dir, &metrics_file, &format!("status=ok\n{}", m.to_text()))?;
                            outcome.status = CellStatus::Ok(m);
                        }
                        Err(CliError::InvalidCurve(msg)) => {
                            write(out_dir, &metrics_file, &format!("status=non-simple\nerror={msg}\n"))?;
                        }
                        Err(e) => return Err(e),
                    }
                }
            }
            Ok(outcome)
        })
        .collect();
    let report = DemoReport {
        figure,
        truth_file,
        cells: outcomes.into_iter().collect::<CliResult<_>>()?,
    };
    write(out_dir, "manifest.txt", &report.manifest())?;
    Ok(report)
}

pub fn output_dir_name(figure: Figure) -> PathBuf {
    PathBuf::from(format!("demo-{}", figure.name()))
}
