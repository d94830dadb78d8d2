//! Command-line front end. Exit codes: 0 success, 1 usage, 2 data error,
//! 3 internal error. `SLICE2STL_LOG` sets the log level (default `warn`).

use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::phantom::{PhantomSpec, Shape};
use crate::pipeline::{
    cmd_convert, cmd_phantom, cmd_smooth, cmd_stitch, cmd_validate, MorphStep, PipelineConfig, PipelineError, Stage,
    ThresholdSpace,
};
use crate::segment::RoiPolicy;
use crate::smooth::{Boundary, SmoothMethod, SmoothingParams};
use crate::stl::StlFormat;

pub const LOG_ENV: &str = "SLICE2STL_LOG";

#[derive(Debug, Parser)]
#[command(name = "slice2stl", version, about = "Reconstruct watertight STL meshes from CT slice stacks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Segment a directory of .dcm or .pgm slices and write an STL.
    Convert(ConvertArgs),
    /// Stitch contour point files (one per layer, bottom first) into an STL.
    Stitch(StitchArgs),
    /// Smooth the contours of a point file.
    Smooth(SmoothArgs),
    /// Write a synthetic slice stack with known geometry.
    Phantom(PhantomArgs),
    /// Audit an existing STL file.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    MovingAverage,
    Loess2,
}

impl From<MethodArg> for SmoothMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::MovingAverage => SmoothMethod::MovingAverage,
            MethodArg::Loess2 => SmoothMethod::Loess2,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BoundaryArg {
    Cyclic,
    Open,
    Auto,
}

impl From<BoundaryArg> for Boundary {
    fn from(b: BoundaryArg) -> Self {
        match b {
            BoundaryArg::Cyclic => Boundary::Cyclic,
            BoundaryArg::Open => Boundary::Open,
            BoundaryArg::Auto => Boundary::Auto,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Binary,
    Ascii,
}

impl From<FormatArg> for StlFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Binary => StlFormat::Binary,
            FormatArg::Ascii => StlFormat::Ascii,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RoiArg {
    LargestArea,
    All,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SpaceArg {
    Hu,
    Enhanced,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ShapeArg {
    Cylinder,
    Box,
    TorusStack,
}

/// Flags override the config file, which overrides built-in defaults.
#[derive(Debug, Args)]
struct ConvertArgs {
    /// Directory of slice files, ordered by file name.
    input: PathBuf,
    /// Output STL path.
    #[arg(short, long)]
    output: PathBuf,
    /// TOML file with pipeline settings.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the JSON report here as well.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Lower bound of the HU window mapped to gray [default: -1024].
    #[arg(long, allow_hyphen_values = true)]
    window_min: Option<f64>,
    /// Upper bound of the HU window [default: 3071].
    #[arg(long, allow_hyphen_values = true)]
    window_max: Option<f64>,
    /// Power-law exponent [default: 0.3].
    #[arg(long)]
    gamma: Option<f64>,
    /// Power-law scale [default: 1].
    #[arg(long = "c")]
    c: Option<f64>,
    /// Median filter size [default: 9].
    #[arg(long)]
    median_kernel: Option<usize>,
    /// Mean filter size [default: 9].
    #[arg(long)]
    mean_kernel: Option<usize>,
    /// Foreground is strictly above this HU value [default: 400].
    #[arg(long, allow_hyphen_values = true)]
    threshold: Option<f64>,
    /// Threshold the raw HU slice or the enhanced image [default: hu].
    #[arg(long, value_enum)]
    threshold_space: Option<SpaceArg>,
    /// Morphology steps as op:k, comma separated [default: close:3].
    #[arg(long, value_delimiter = ',')]
    morph: Option<Vec<MorphStep>>,
    /// Contours with fewer points are ignored [default: 5].
    #[arg(long)]
    min_points: Option<usize>,
    /// Smoothing span in (0, 1) [default: 0.1].
    #[arg(long)]
    span: Option<f64>,
    /// Smoothing method [default: loess2].
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    /// Smoothing window behaviour at the contour seam [default: auto].
    #[arg(long, value_enum)]
    boundary: Option<BoundaryArg>,
    /// Which contours of a slice to keep [default: largest-area].
    #[arg(long, value_enum)]
    roi: Option<RoiArg>,
    /// Layer spacing in mm [default: slice thickness].
    #[arg(long)]
    z_spacing: Option<f64>,
    /// Pixel size in mm [default: 1].
    #[arg(long)]
    pixel_spacing: Option<f64>,
    /// Thickness assigned to PGM slices in mm [default: 1].
    #[arg(long)]
    pgm_thickness: Option<f64>,
    /// Inclusive slice positions, e.g. 80:87.
    #[arg(long, value_parser = parse_range)]
    slice_range: Option<[usize; 2]>,
    /// Resample each contour to this many points.
    #[arg(long)]
    resample: Option<usize>,
    /// STL encoding [default: binary].
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Worker threads for per-slice stages.
    #[arg(long)]
    workers: Option<usize>,
    /// Write enhanced slices as 8-bit PGM into this directory.
    #[arg(long)]
    enhanced_dir: Option<PathBuf>,
}

fn parse_range(s: &str) -> Result<[usize; 2], String> {
    let (a, b) = s
        .split_once(':')
        .or_else(|| s.split_once(".."))
        .ok_or_else(|| format!("expected first:last, got {s:?}"))?;
    let a = a.trim().parse().map_err(|_| format!("bad slice index {a:?}"))?;
    let b = b.trim().parse().map_err(|_| format!("bad slice index {b:?}"))?;
    Ok([a, b])
}

impl ConvertArgs {
    fn config(&self) -> Result<PipelineConfig, PipelineError> {
        let mut cfg = match &self.config {
            Some(path) => PipelineConfig::load(path)?,
            None => PipelineConfig::default(),
        };
        macro_rules! set {
            ($($flag:ident => $field:ident),* $(,)?) => {
                $(if let Some(v) = self.$flag.clone() { cfg.$field = v.into(); })*
            };
        }
        set!(
            window_min => window_min,
            window_max => window_max,
            gamma => gamma,
            c => c,
            median_kernel => median_kernel,
            mean_kernel => mean_kernel,
            threshold => threshold_hu,
            morph => morph_schedule,
            min_points => min_contour_points,
            span => span,
            method => smooth_method,
            boundary => smooth_boundary,
            pixel_spacing => pixel_spacing_mm,
            pgm_thickness => pgm_thickness_mm,
            format => output_format,
        );
        if let Some(space) = self.threshold_space {
            cfg.threshold_space = match space {
                SpaceArg::Hu => ThresholdSpace::Hu,
                SpaceArg::Enhanced => ThresholdSpace::Enhanced,
            };
        }
        if let Some(roi) = self.roi {
            cfg.roi_policy = match roi {
                RoiArg::LargestArea => RoiPolicy::LargestArea,
                RoiArg::All => RoiPolicy::All,
            };
        }
        if self.z_spacing.is_some() {
            cfg.z_spacing_mm = self.z_spacing;
        }
        if self.slice_range.is_some() {
            cfg.slice_range = self.slice_range;
        }
        if self.resample.is_some() {
            cfg.resample_n = self.resample;
        }
        if self.workers.is_some() {
            cfg.workers = self.workers;
        }
        if self.enhanced_dir.is_some() {
            cfg.enhanced_dir.clone_from(&self.enhanced_dir);
        }
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
struct StitchArgs {
    /// Contour point files, bottom layer first.
    files: Vec<PathBuf>,
    /// Distance between layers in mm.
    #[arg(short, long)]
    z: f64,
    #[arg(short, long)]
    output: PathBuf,
    #[arg(long, value_enum, default_value = "binary")]
    format: FormatArg,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SmoothArgs {
    input: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    /// Fraction of the points in each local window, in (0, 1).
    #[arg(long, default_value_t = 0.1)]
    span: f64,
    #[arg(long, value_enum, default_value = "loess2")]
    method: MethodArg,
    #[arg(long, value_enum, default_value = "auto")]
    boundary: BoundaryArg,
}

#[derive(Debug, Args)]
struct PhantomArgs {
    #[arg(value_enum)]
    shape: ShapeArg,
    /// Output directory.
    #[arg(short, long)]
    output: PathBuf,
    #[arg(long, default_value_t = 8)]
    slices: usize,
    /// Cylinder radius in pixels.
    #[arg(long, default_value_t = 100.0)]
    radius: f64,
    /// Box side in pixels.
    #[arg(long, default_value_t = 200.0)]
    side: f64,
    /// Torus ring radius in pixels.
    #[arg(long, default_value_t = 120.0)]
    major_radius: f64,
    /// Torus tube radius in pixels.
    #[arg(long, default_value_t = 40.0)]
    minor_radius: f64,
    #[arg(long, default_value_t = 512)]
    width: usize,
    #[arg(long, default_value_t = 512)]
    height: usize,
    #[arg(long, default_value_t = 12)]
    bits: u8,
    /// Slice thickness in mm.
    #[arg(long, default_value_t = 1.5)]
    thickness: f64,
    /// Also write DICOM copies into OUTPUT/dicom.
    #[arg(long)]
    dicom: bool,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    stl: PathBuf,
    #[arg(long)]
    report: Option<PathBuf>,
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), PipelineError> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| PipelineError::Internal { stage: Stage::Write, message: e.to_string() })?;
    std::fs::write(path, text + "\n").map_err(|e| PipelineError::Data {
        stage: Stage::Write,
        message: format!("{}: {e}", path.display()),
    })
}

fn emit(out: &mut dyn std::io::Write, text: &str) -> Result<(), PipelineError> {
    out.write_all(text.as_bytes())
        .map_err(|e| PipelineError::Internal { stage: Stage::Write, message: e.to_string() })
}

fn dispatch(command: Command, out: &mut dyn std::io::Write) -> Result<(), PipelineError> {
    match command {
        Command::Convert(args) => {
            let cfg = args.config()?;
            let report = cmd_convert(&args.input, &cfg, &args.output)?;
            if let Some(path) = &args.report {
                write_json(path, &report)?;
            }
            emit(out, &report.to_key_values())
        }
        Command::Stitch(args) => {
            let report = cmd_stitch(&args.files, args.z, args.format.into(), &args.output)?;
            if let Some(path) = &args.report {
                write_json(path, &report)?;
            }
            emit(out, &report.to_key_values())
        }
        Command::Smooth(args) => {
            let params = SmoothingParams::new(args.span, args.method.into())
                .map_err(|e| PipelineError::Usage(e.to_string()))?
                .with_boundary(args.boundary.into());
            let report = cmd_smooth(&args.input, &params, &args.output)?;
            emit(out, &report.to_key_values())
        }
        Command::Phantom(args) => {
            let shape = match args.shape {
                ShapeArg::Cylinder => Shape::Cylinder { radius: args.radius },
                ShapeArg::Box => Shape::Box { side: args.side },
                ShapeArg::TorusStack => {
                    Shape::TorusStack { major_radius: args.major_radius, minor_radius: args.minor_radius }
                }
            };
            let spec = PhantomSpec {
                shape,
                width: args.width,
                height: args.height,
                slices: args.slices,
                bits_stored: args.bits,
                slice_thickness_mm: args.thickness,
            };
            let files = cmd_phantom(&spec, &args.output, args.dicom)?;
            emit(out, &format!("slices={}\ndicom={}\n", files.len(), args.dicom))
        }
        Command::Validate(args) => {
            let report = cmd_validate(&args.stl)?;
            if let Some(path) = &args.report {
                write_json(path, &report)?;
            }
            emit(out, &report.to_key_values())?;
            if report.watertight {
                Ok(())
            } else {
                Err(PipelineError::Data { stage: Stage::Validate, message: "mesh is not watertight".into() })
            }
        }
    }
}

fn init_logging() {
    let env = env_logger::Env::new().filter_or(LOG_ENV, "warn");
    // A second initialisation (tests, repeated calls) is harmless.
    let _ = env_logger::Builder::from_env(env).format_timestamp(None).try_init();
}

/// Runs the command line and returns the process exit code. Reports go to
/// `out`, diagnostics to stderr.
pub fn run_with_output<I, T>(args: I, out: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    init_logging();
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| dispatch(cli.command, out)));
    match result {
        Ok(Ok(())) => 0,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
        Err(_) => {
            eprintln!("error: internal failure");
            3
        }
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    let code = run_with_output(args, &mut lock);
    let _ = lock.flush();
    code
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String) {
        let mut buf = Vec::new();
        let code = run_with_output(std::iter::once("slice2stl").chain(args.iter().copied()), &mut buf);
        (code, String::from_utf8(buf).unwrap())
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run_capture(&[]).0, 1);
        assert_eq!(run_capture(&["frobnicate"]).0, 1);
        assert_eq!(run_capture(&["convert"]).0, 1);
        assert_eq!(run_capture(&["--help"]).0, 0);
    }

    #[test]
    fn slice_range_parsing() {
        assert_eq!(parse_range("80:87"), Ok([80, 87]));
        assert_eq!(parse_range("80..87"), Ok([80, 87]));
        assert!(parse_range("80").is_err());
    }

    #[test]
    fn flags_override_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let cfg_path = dir.path().join("c.toml");
        std::fs::write(&cfg_path, "gamma = 0.5\nspan = 0.2\n").unwrap();
        let cli = Cli::try_parse_from([
            "slice2stl",
            "convert",
            "in",
            "-o",
            "out.stl",
            "--config",
            cfg_path.to_str().unwrap(),
            "--span",
            "0.3",
            "--morph",
            "open:3,close:5",
            "--threshold",
            "-100",
        ])
        .unwrap();
        let Command::Convert(args) = cli.command else { panic!("convert expected") };
        let cfg = args.config().unwrap();
        assert_eq!(cfg.gamma, 0.5);
        assert_eq!(cfg.span, 0.3);
        assert_eq!(cfg.threshold_hu, -100.0);
        assert_eq!(cfg.morph_schedule.len(), 2);
        assert_eq!(cfg.median_kernel, 9);
    }

    #[test]
    fn smooth_rejects_closed_span() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("p.txt");
        std::fs::write(&input, "0 0\n1 0\n2 1\n1 2\n0 1\n").unwrap();
        let out = dir.path().join("o.txt");
        let (code, _) = run_capture(&["smooth", input.to_str().unwrap(), "-o", out.to_str().unwrap(), "--span", "1.0"]);
        assert_eq!(code, 1);
    }
}
