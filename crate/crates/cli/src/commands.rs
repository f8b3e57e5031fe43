//! Argument parsing and subcommand dispatch.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use gptshape::potential::Contrast;
use gptshape::tensors::NoiseScale;
use gptshape::C64;

use crate::curve::CurveFile;
use crate::demo::{output_dir_name, run_demo, DemoOptions, Figure};
use crate::document::{parse_complex, parse_real, GptDocument};
use crate::error::{CliError, CliResult};
use crate::experiment::{reconstruct, ExperimentConfig, Method, NamedShape, ShapeParams};
use crate::metrics::compare;

#[derive(Debug, Parser)]
#[command(
    name = "gptshape",
    version,
    about = "Polarization-tensor forward runs and shape recovery"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute GPTs of a shape and write a GPT document.
    Forward(ForwardArgs),
    /// Recover a shape from a GPT document and write a curve file.
    Recover(RecoverArgs),
    /// Compare a reconstruction against a truth curve.
    Evaluate(EvaluateArgs),
    /// Run every cell of a figure configuration.
    Demo(DemoArgs),
}

fn sigma_value(text: &str) -> Result<f64, String> {
    let sigma = parse_real(text)?;
    if sigma < 0.0 {
        return Err(format!("conductivity must be non-negative, got {text}"));
    }
    Ok(sigma)
}

fn snr_value(text: &str) -> Result<f64, String> {
    let snr = parse_real(text)?;
    if snr == f64::NEG_INFINITY {
        return Err("SNR must be finite or inf".into());
    }
    Ok(snr)
}

fn noise_scale_value(text: &str) -> Result<NoiseScale, String> {
    match text {
        "relative" => Ok(NoiseScale::Relative),
        "absolute" => Ok(NoiseScale::Absolute),
        _ => Err(format!("expected relative or absolute, got {text:?}")),
    }
}

#[derive(Debug, Args)]
pub struct ShapeArgs {
    /// disk, ellipse, asymmetric, kite, straight or crescent.
    #[arg(long)]
    pub shape: String,
    /// Disk radius.
    #[arg(long)]
    pub radius: Option<f64>,
    /// Ellipse conformal radius.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Ellipse coefficient, `re` or `re,im`.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub e1: Option<C64>,
    /// Translation, `re` or `re,im`.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub center: Option<C64>,
}

impl ShapeArgs {
    fn build(&self) -> CliResult<NamedShape> {
        NamedShape::build(
            &self.shape,
            &ShapeParams {
                radius: self.radius,
                gamma: self.gamma,
                e1: self.e1,
                center: self.center,
            },
        )
    }
}

#[derive(Debug, Args)]
pub struct ForwardArgs {
    #[command(flatten)]
    pub shape: ShapeArgs,
    /// Conductivity: a number, a ratio such as 1/50, 0, or inf.
    #[arg(long, value_parser = sigma_value)]
    pub sigma: f64,
    #[arg(long, default_value_t = 6)]
    pub order: usize,
    #[arg(long = "quad-nodes", default_value_t = 1024)]
    pub quad_nodes: usize,
    /// Noise level in decibels, or inf for exact tensors.
    #[arg(long, value_parser = snr_value, default_value = "inf")]
    pub snr: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// absolute (default) or relative to each entry.
    #[arg(long = "noise-scale", value_parser = noise_scale_value, default_value = "absolute")]
    pub noise_scale: NoiseScale,
    /// GPT document path; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the true boundary as a curve file.
    #[arg(long = "truth-out")]
    pub truth_out: Option<PathBuf>,
    #[arg(long = "curve-samples", default_value_t = 512)]
    pub curve_samples: usize,
}

#[derive(Debug, Args)]
pub struct RecoverArgs {
    #[arg(long)]
    pub gpt: PathBuf,
    #[arg(long, value_enum)]
    pub method: Method,
    /// Defaults to the document order.
    #[arg(long)]
    pub order: Option<usize>,
    #[arg(long = "curve-samples", default_value_t = 512)]
    pub curve_samples: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub truth: PathBuf,
    #[arg(long)]
    pub recon: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DemoArgs {
    #[arg(value_enum)]
    pub figure: Figure,
    /// Output directory; `demo-<figure>` when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long = "quad-nodes", default_value_t = 1024)]
    pub quad_nodes: usize,
    #[arg(long = "curve-samples", default_value_t = 512)]
    pub curve_samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "noise-scale", value_parser = noise_scale_value, default_value = "absolute")]
    pub noise_scale: NoiseScale,
}

fn emit(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::io(Path::new("<stdout>"), e)),
    }
}

fn forward(args: &ForwardArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let contrast = Contrast::from_sigma(args.sigma).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut config = ExperimentConfig::new(args.shape.build()?, contrast);
    config.order = args.order;
    config.n_quad = args.quad_nodes;
    config.snr = args.snr;
    config.seed = args.seed;
    config.noise_scale = args.noise_scale;
    config.curve_samples = args.curve_samples;
    config.validate()?;
    let doc = config.forward()?;
    if let Some(path) = &args.truth_out {
        emit(Some(path), &config.shape.curve(config.curve_samples).to_text(), stdout)?;
    }
    emit(args.out.as_deref(), &doc.to_json(), stdout)
}

fn recover(args: &RecoverArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let doc = GptDocument::read(&args.gpt)?;
    let contrast = doc.contrast()?;
    let gpt = doc.gpt()?;
    let order = args.order.unwrap_or(doc.order);
    if args.curve_samples < 8 {
        return Err(CliError::Usage(format!("curve samples {} below 8", args.curve_samples)));
    }
    let recon = reconstruct(&gpt, contrast, args.method, order)?;
    let curve = recon
        .curve(args.curve_samples)
        .with_metadata("order", order.to_string());
    emit(args.out.as_deref(), &curve.to_text(), stdout)
}

fn evaluate(args: &EvaluateArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let truth = CurveFile::read(&args.truth)?;
    let recon = CurveFile::read(&args.recon)?;
    let metrics = compare(&truth, &recon)?;
    emit(args.out.as_deref(), &metrics.to_text(), stdout)
}

fn demo(args: &DemoArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let options = DemoOptions {
        n_quad: args.quad_nodes,
        curve_samples: args.curve_samples,
        seed: args.seed,
        noise_scale: args.noise_scale,
    };
    let dir = args.out.clone().unwrap_or_else(|| output_dir_name(args.figure));
    let report = run_demo(args.figure, &options, &dir)?;
    emit(None, &report.manifest(), stdout)?;
    match report.failures() {
        0 => Ok(()),
        failed => Err(CliError::DemoFailures {
            failed,
            total: report.cells.len(),
        }),
    }
}

pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> CliResult<()> {
    match &cli.command {
        Command::Forward(args) => forward(args, stdout),
        Command::Recover(args) => recover(args, stdout),
        Command::Evaluate(args) => evaluate(args, stdout),
        Command::Demo(args) => demo(args, stdout),
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit status: 0 on success, 1 for usage errors, 2 for numerical ones.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = stdout.write_all(text.as_bytes());
            } else {
                let _ = stderr.write_all(text.as_bytes());
            }
            return code;
        }
    };
    match execute(&cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn status(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(args.iter().copied(), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(status(&["gptshape"]).0, 1);
        assert_eq!(status(&["gptshape", "forward", "--shape", "kite"]).0, 1);
        assert_eq!(
            status(&["gptshape", "forward", "--shape", "kite", "--sigma", "-2"]).0,
            1
        );
        assert_eq!(status(&["gptshape", "forward", "--shape", "kite", "--sigma", "1"]).0, 1);
        assert_eq!(status(&["gptshape", "forward", "--shape", "blob", "--sigma", "5"]).0, 1);
        assert_eq!(
            status(&["gptshape", "forward", "--shape", "kite", "--sigma", "5", "--order", "1"]).0,
            1
        );
        assert_eq!(status(&["gptshape", "demo", "square"]).0, 1);
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = status(&["gptshape", "--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("forward"));
    }

    #[test]
    fn disk_forward_to_stdout() {
        let (code, out, err) = status(&[
            "gptshape",
            "forward",
            "--shape",
            "disk",
            "--radius",
            "1",
            "--sigma",
            "5",
            "--order",
            "2",
            "--quad-nodes",
            "128",
        ]);
        assert_eq!(code, 0, "{err}");
        let doc = GptDocument::from_json(&out).unwrap();
        let want = 8.0 * std::f64::consts::PI / 3.0;
        assert!((doc.n2[0][0][0] - want).abs() < 1e-8 * want);
        assert_eq!(doc.lambda, 0.75);
    }

    #[test]
    fn negative_complex_flags_parse() {
        let (code, out, err) = status(&[
            "gptshape",
            "forward",
            "--shape",
            "ellipse",
            "--e1",
            "-0.3,0.1",
            "--center",
            "-1,-1",
            "--sigma",
            "inf",
            "--order",
            "2",
            "--quad-nodes",
            "64",
        ]);
        assert_eq!(code, 0, "{err}");
        let doc = GptDocument::from_json(&out).unwrap();
        assert_eq!(doc.metadata.shape_parameters["e1"], "-0.3,0.1");
        assert_eq!(doc.metadata.shape_parameters["center"], "-1,-1");
    }
}
