//! End-to-end commands: slices to STL, contour files to STL, contour
//! smoothing, phantom generation and STL auditing.
//!
//! The binary segments in Hounsfield units on the unenhanced slice by
//! default. The enhancement chain (window, power law, median, mean) then
//! only feeds `enhanced_dir`. With `threshold_space = "enhanced"` the HU
//! threshold is pushed through the same window and power law and applied
//! to the filtered image instead.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::contour_io::{format_points, parse_points, parse_single};
use crate::enhance::{enhance, EnhanceParams, GrayImage};
use crate::geometry::ContourPolyline;
use crate::mesh::{MeshAudit, TriangleMesh};
use crate::pgm::write_pgm;
use crate::phantom::{write_phantom, PhantomSpec};
use crate::segment::{morph_schedule, select_roi, threshold, trace_contours, BinaryMask, MorphOp, RoiPolicy};
use crate::slice::{hu_to_gray, list_slice_files, load_slice, SliceImage};
use crate::smooth::{resample_closed, smooth_contour, Boundary, SmoothMethod, SmoothingParams, MIN_POINTS};
use crate::stitch::{assemble_detailed, LayerStack, StitchPlan};
use crate::stl::{read_stl, write_stl, StlFormat};

/// Pipeline stage an error is attributed to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Config,
    Parse,
    Enhance,
    Segment,
    Smooth,
    Stitch,
    Write,
    Validate,
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Stage::Config => "config",
            Stage::Parse => "parse",
            Stage::Enhance => "enhance",
            Stage::Segment => "segment",
            Stage::Smooth => "smooth",
            Stage::Stitch => "stitch",
            Stage::Write => "write",
            Stage::Validate => "validate",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    /// Bad arguments or configuration.
    #[error("{0}")]
    Usage(String),
    /// Input data could not be processed.
    #[error("{stage}: {message}")]
    Data { stage: Stage, message: String },
    /// An invariant of the output was violated.
    #[error("{stage}: internal error: {message}")]
    Internal { stage: Stage, message: String },
}

impl PipelineError {
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Usage(_) => 1,
            PipelineError::Data { .. } => 2,
            PipelineError::Internal { .. } => 3,
        }
    }
}

fn data(stage: Stage) -> impl Fn(&dyn std::fmt::Display) -> PipelineError {
    move |e| PipelineError::Data { stage, message: e.to_string() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphStep {
    pub op: MorphOp,
    pub k: usize,
}

impl std::str::FromStr for MorphStep {
    type Err = String;

    /// `op:k`, e.g. `close:3`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (op, k) = s.split_once(':').ok_or_else(|| format!("expected op:k, got {s:?}"))?;
        let k = k.parse().map_err(|_| format!("bad kernel size in {s:?}"))?;
        Ok(MorphStep { op: op.parse()?, k })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdSpace {
    #[default]
    Hu,
    Enhanced,
}

/// Every tunable of the slice-to-STL pipeline. Missing keys in a config
/// file take these defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub window_min: f64,
    pub window_max: f64,
    pub gamma: f64,
    pub c: f64,
    pub median_kernel: usize,
    pub mean_kernel: usize,
    pub threshold_hu: f64,
    pub threshold_space: ThresholdSpace,
    pub morph_schedule: Vec<MorphStep>,
    pub min_contour_points: usize,
    pub span: f64,
    pub smooth_method: SmoothMethod,
    pub smooth_boundary: Boundary,
    pub roi_policy: RoiPolicy,
    /// Layer spacing; the first slice's thickness when unset.
    pub z_spacing_mm: Option<f64>,
    pub pixel_spacing_mm: f64,
    /// Thickness assigned to PGM slices, which carry none.
    pub pgm_thickness_mm: f64,
    /// Inclusive positions in the sorted slice list.
    pub slice_range: Option<[usize; 2]>,
    pub resample_n: Option<usize>,
    pub output_format: StlFormat,
    pub workers: Option<usize>,
    /// Where to write the enhanced 8-bit slices, if anywhere.
    pub enhanced_dir: Option<PathBuf>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            window_min: -1024.0,
            window_max: 3071.0,
            gamma: 0.3,
            c: 1.0,
            median_kernel: 9,
            mean_kernel: 9,
            threshold_hu: 400.0,
            threshold_space: ThresholdSpace::Hu,
            morph_schedule: vec![MorphStep { op: MorphOp::Close, k: 3 }],
            min_contour_points: MIN_POINTS,
            span: 0.1,
            smooth_method: SmoothMethod::Loess2,
            smooth_boundary: Boundary::Auto,
            roi_policy: RoiPolicy::LargestArea,
            z_spacing_mm: None,
            pixel_spacing_mm: 1.0,
            pgm_thickness_mm: 1.0,
            slice_range: None,
            resample_n: None,
            output_format: StlFormat::Binary,
            workers: None,
            enhanced_dir: None,
        }
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self, PipelineError> {
        toml::from_str(text).map_err(|e| PipelineError::Usage(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PipelineError::Usage(format!("config {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn enhance_params(&self) -> EnhanceParams {
        EnhanceParams { c: self.c, gamma: self.gamma, median_kernel: self.median_kernel, mean_kernel: self.mean_kernel }
    }

    pub fn smoothing_params(&self) -> Result<SmoothingParams, PipelineError> {
        SmoothingParams::new(self.span, self.smooth_method)
            .map(|p| p.with_boundary(self.smooth_boundary))
            .map_err(|e| PipelineError::Usage(e.to_string()))
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let fail = |m: String| Err(PipelineError::Usage(m));
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(PipelineError::Usage(format!("{name} must be positive, got {v}")))
            }
        };
        if !(self.window_min < self.window_max) {
            return fail(format!("window_min {} must be below window_max {}", self.window_min, self.window_max));
        }
        positive("gamma", self.gamma)?;
        positive("c", self.c)?;
        positive("pixel_spacing_mm", self.pixel_spacing_mm)?;
        positive("pgm_thickness_mm", self.pgm_thickness_mm)?;
        if let Some(z) = self.z_spacing_mm {
            positive("z_spacing_mm", z)?;
        }
        for (name, k) in [("median_kernel", self.median_kernel), ("mean_kernel", self.mean_kernel)] {
            if k % 2 == 0 {
                return fail(format!("{name} must be odd, got {k}"));
            }
        }
        for step in &self.morph_schedule {
            if step.k % 2 == 0 {
                return fail(format!("morphology kernel must be odd, got {}", step.k));
            }
        }
        if self.min_contour_points < MIN_POINTS {
            return fail(format!("min_contour_points must be at least {MIN_POINTS}"));
        }
        self.smoothing_params()?;
        if let Some([a, b]) = self.slice_range {
            if a > b {
                return fail(format!("slice range {a}..{b} is empty"));
            }
        }
        if let Some(n) = self.resample_n {
            if n < 3 {
                return fail(format!("resample_n must be at least 3, got {n}"));
            }
        }
        if self.workers == Some(0) {
            return fail("workers must be at least 1".into());
        }
        Ok(())
    }
}

/// Summary of a finished mesh.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeshReport {
    pub facets: usize,
    pub vertices: usize,
    pub edges: usize,
    pub watertight: bool,
    pub boundary_edges: usize,
    pub nonmanifold_edges: usize,
    pub misoriented_edges: usize,
    pub degenerate_facets: usize,
    pub components: usize,
    pub euler_characteristic: i64,
    pub genus: Option<i64>,
    pub signed_volume_mm3: f64,
}

impl From<&MeshAudit> for MeshReport {
    fn from(a: &MeshAudit) -> Self {
        Self {
            facets: a.facets,
            vertices: a.vertices,
            edges: a.edges,
            watertight: a.is_watertight(),
            boundary_edges: a.boundary_edges,
            nonmanifold_edges: a.nonmanifold_edges,
            misoriented_edges: a.misoriented_edges,
            degenerate_facets: a.degenerate_facets,
            components: a.components,
            euler_characteristic: a.euler_characteristic,
            genus: a.genus(),
            signed_volume_mm3: a.signed_volume,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SliceReport {
    /// Position in the sorted slice list.
    pub index: usize,
    pub file: String,
    pub contours: usize,
    pub points_before: usize,
    pub points_after: usize,
    pub smoothing_fallbacks: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StackReport {
    pub layers: usize,
    pub wall_layers: usize,
    pub z_spacing_mm: f64,
    pub cap_facets: [usize; 2],
    pub wall_plans: Vec<StitchPlan>,
    pub mesh: MeshReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvertReport {
    pub slices: Vec<SliceReport>,
    pub stack: StackReport,
}

fn push_mesh(out: &mut String, m: &MeshReport) {
    let genus = m.genus.map_or_else(|| "none".to_string(), |g| g.to_string());
    for (k, v) in [
        ("facets", m.facets.to_string()),
        ("vertices", m.vertices.to_string()),
        ("edges", m.edges.to_string()),
        ("watertight", m.watertight.to_string()),
        ("boundary_edges", m.boundary_edges.to_string()),
        ("nonmanifold_edges", m.nonmanifold_edges.to_string()),
        ("misoriented_edges", m.misoriented_edges.to_string()),
        ("degenerate_facets", m.degenerate_facets.to_string()),
        ("components", m.components.to_string()),
        ("euler", m.euler_characteristic.to_string()),
        ("genus", genus),
        ("volume_mm3", format!("{:.6}", m.signed_volume_mm3)),
    ] {
        writeln!(out, "{k}={v}").unwrap();
    }
}

impl MeshReport {
    pub fn to_key_values(&self) -> String {
        let mut out = String::new();
        push_mesh(&mut out, self);
        out
    }
}

impl StackReport {
    pub fn to_key_values(&self) -> String {
        let mut out = String::new();
        writeln!(out, "layers={}", self.layers).unwrap();
        writeln!(out, "wall_layers={}", self.wall_layers).unwrap();
        writeln!(out, "z_spacing_mm={}", self.z_spacing_mm).unwrap();
        writeln!(out, "cap_facets={},{}", self.cap_facets[0], self.cap_facets[1]).unwrap();
        for (k, p) in self.wall_plans.iter().enumerate() {
            writeln!(out, "wall.{k}.facets={}", p.facet_count()).unwrap();
        }
        push_mesh(&mut out, &self.mesh);
        out
    }
}

impl ConvertReport {
    pub fn to_key_values(&self) -> String {
        let mut out = format!("slices={}\n", self.slices.len());
        for s in &self.slices {
            let p = format!("slice.{}", s.index);
            writeln!(out, "{p}.file={}", s.file).unwrap();
            writeln!(out, "{p}.contours={}", s.contours).unwrap();
            writeln!(out, "{p}.points_before={}", s.points_before).unwrap();
            writeln!(out, "{p}.points_after={}", s.points_after).unwrap();
            writeln!(out, "{p}.smoothing_fallbacks={}", s.smoothing_fallbacks).unwrap();
        }
        out.push_str(&self.stack.to_key_values());
        out
    }
}

struct SliceOutcome {
    report: SliceReport,
    contour: ContourPolyline,
    thickness_mm: f64,
}

/// HU threshold mapped through the window and power law onto the
/// enhanced gray scale.
fn enhanced_threshold(cfg: &PipelineConfig) -> f64 {
    let clamped = cfg.threshold_hu.clamp(cfg.window_min, cfg.window_max);
    let gray = (clamped - cfg.window_min) / (cfg.window_max - cfg.window_min);
    (cfg.c * gray.powf(cfg.gamma) * 255.0).clamp(0.0, 255.0)
}

fn enhanced_slice(cfg: &PipelineConfig, slice: &SliceImage) -> Result<GrayImage, PipelineError> {
    let gray = hu_to_gray(slice, cfg.window_min, cfg.window_max).map_err(|e| data(Stage::Enhance)(&e))?;
    let img = GrayImage::from_slice(&gray).map_err(|e| data(Stage::Enhance)(&e))?;
    enhance(&img, &cfg.enhance_params()).map_err(|e| data(Stage::Enhance)(&e))
}

fn segment_mask(cfg: &PipelineConfig, slice: &SliceImage, enhanced: Option<&GrayImage>) -> BinaryMask {
    match (cfg.threshold_space, enhanced) {
        (ThresholdSpace::Enhanced, Some(img)) => {
            let t = enhanced_threshold(cfg);
            BinaryMask::new(img.width(), img.height(), img.pixels().iter().map(|&v| v > t).collect())
                .expect("dimensions match the image")
        }
        _ => threshold(slice, cfg.threshold_hu),
    }
}

fn process_slice(cfg: &PipelineConfig, index: usize, path: &Path) -> Result<SliceOutcome, PipelineError> {
    let name = path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned());
    let at = |stage: Stage, e: &dyn std::fmt::Display| PipelineError::Data { stage, message: format!("{name}: {e}") };
    let slice = load_slice(path, cfg.pgm_thickness_mm).map_err(|e| at(Stage::Parse, &e))?.with_slice_index(index);

    let needs_enhanced = cfg.threshold_space == ThresholdSpace::Enhanced || cfg.enhanced_dir.is_some();
    let enhanced = if needs_enhanced { Some(enhanced_slice(cfg, &slice)?) } else { None };
    if let (Some(dir), Some(img)) = (&cfg.enhanced_dir, &enhanced) {
        let quantized: Vec<f64> = img.quantized().into_iter().map(f64::from).collect();
        let out = SliceImage::new(img.width(), img.height(), 8, quantized, slice.slice_thickness_mm(), index)
            .map_err(|e| at(Stage::Enhance, &e))?;
        let bytes = write_pgm(&out).map_err(|e| at(Stage::Write, &e))?;
        let target = dir.join(format!("enhanced_{index:04}.pgm"));
        std::fs::write(&target, bytes).map_err(|e| at(Stage::Write, &e))?;
    }

    let mask = segment_mask(cfg, &slice, enhanced.as_ref());
    let schedule: Vec<(MorphOp, usize)> = cfg.morph_schedule.iter().map(|s| (s.op, s.k)).collect();
    let mask = morph_schedule(&mask, &schedule).map_err(|e| at(Stage::Segment, &e))?;
    let contours = trace_contours(&mask, cfg.min_contour_points).map_err(|e| at(Stage::Segment, &e))?;
    let found = contours.len();
    if found == 0 {
        return Err(at(Stage::Segment, &format_args!("no region above threshold {}", cfg.threshold_hu)));
    }
    let mut selected = select_roi(contours, cfg.roi_policy).map_err(|e| at(Stage::Segment, &e))?;
    if selected.len() != 1 {
        return Err(at(Stage::Segment, &format_args!(
            "{} contours selected; each layer must hold exactly one",
            selected.len()
        )));
    }
    let raw = selected.remove(0);
    let points_before = raw.len();
    let smoothed = smooth_contour(&raw, &cfg.smoothing_params()?).map_err(|e| at(Stage::Smooth, &e))?;
    let mut contour = smoothed.contour;
    if let Some(n) = cfg.resample_n {
        contour = resample_closed(&contour, n).map_err(|e| at(Stage::Smooth, &e))?;
    }
    let contour = contour.scaled(cfg.pixel_spacing_mm);
    Ok(SliceOutcome {
        report: SliceReport {
            index,
            file: name.clone(),
            contours: found,
            points_before,
            points_after: contour.len(),
            smoothing_fallbacks: smoothed.fallbacks,
        },
        contour,
        thickness_mm: slice.slice_thickness_mm(),
    })
}

fn in_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, PipelineError> {
    match workers {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| PipelineError::Internal { stage: Stage::Config, message: e.to_string() })?;
            Ok(pool.install(f))
        }
    }
}

/// Stitches layers and audits the result.
pub fn build_stack(layers: Vec<ContourPolyline>, z_spacing_mm: f64) -> Result<(TriangleMesh, StackReport), PipelineError> {
    let stack = LayerStack::new(layers, z_spacing_mm, 0.0).map_err(|e| data(Stage::Stitch)(&e))?;
    let assembly = assemble_detailed(&stack).map_err(|e| data(Stage::Stitch)(&e))?;
    let audit = assembly.mesh.audit();
    let report = StackReport {
        layers: stack.len(),
        wall_layers: assembly.wall_plans.len(),
        z_spacing_mm,
        cap_facets: assembly.cap_facets,
        wall_plans: assembly.wall_plans,
        mesh: MeshReport::from(&audit),
    };
    Ok((assembly.mesh, report))
}

fn write_mesh(mesh: &TriangleMesh, format: StlFormat, out: &Path) -> Result<(), PipelineError> {
    let bytes = write_stl(mesh, format, "slice2stl").map_err(|e| data(Stage::Write)(&e))?;
    std::fs::write(out, bytes).map_err(|e| data(Stage::Write)(&format_args!("{}: {e}", out.display())))
}

/// Rejects meshes that failed their audit, after they have been written
/// for inspection.
fn require_watertight(report: &MeshReport) -> Result<(), PipelineError> {
    if report.watertight {
        Ok(())
    } else {
        Err(PipelineError::Internal {
            stage: Stage::Stitch,
            message: format!(
                "mesh is not watertight ({} boundary, {} non-manifold, {} misoriented edges)",
                report.boundary_edges, report.nonmanifold_edges, report.misoriented_edges
            ),
        })
    }
}

/// Slices in `input_dir` to an STL at `out`.
pub fn cmd_convert(input_dir: &Path, cfg: &PipelineConfig, out: &Path) -> Result<ConvertReport, PipelineError> {
    cfg.validate()?;
    let files = list_slice_files(input_dir).map_err(|e| data(Stage::Parse)(&e))?;
    let total = files.len();
    let selected: Vec<(usize, PathBuf)> = files
        .into_iter()
        .enumerate()
        .filter(|(k, _)| cfg.slice_range.is_none_or(|[a, b]| (a..=b).contains(k)))
        .collect();
    if selected.is_empty() {
        return Err(data(Stage::Parse)(&format_args!("no slices in range ({total} slice files found)")));
    }
    if selected.len() < 2 {
        return Err(data(Stage::Parse)(&"at least 2 slices are needed"));
    }
    if let Some(dir) = &cfg.enhanced_dir {
        std::fs::create_dir_all(dir).map_err(|e| data(Stage::Write)(&format_args!("{}: {e}", dir.display())))?;
    }
    log::info!("processing {} of {total} slices", selected.len());

    let results: Vec<Result<SliceOutcome, PipelineError>> = in_pool(cfg.workers, || {
        selected.par_iter().map(|(k, path)| process_slice(cfg, *k, path)).collect()
    })?;
    let mut outcomes = Vec::with_capacity(results.len());
    for r in results {
        outcomes.push(r?);
    }

    let z = cfg.z_spacing_mm.unwrap_or(outcomes[0].thickness_mm);
    let slices: Vec<SliceReport> = outcomes.iter().map(|o| o.report.clone()).collect();
    let layers = outcomes.into_iter().map(|o| o.contour).collect();
    let (mesh, stack) = build_stack(layers, z)?;
    write_mesh(&mesh, cfg.output_format, out)?;
    require_watertight(&stack.mesh)?;
    Ok(ConvertReport { slices, stack })
}

/// One contour file per layer, bottom first, to an STL at `out`.
pub fn cmd_stitch(files: &[PathBuf], z_spacing_mm: f64, format: StlFormat, out: &Path) -> Result<StackReport, PipelineError> {
    if files.len() < 2 {
        return Err(PipelineError::Usage(format!("stitch needs at least 2 contour files, got {}", files.len())));
    }
    if !(z_spacing_mm > 0.0 && z_spacing_mm.is_finite()) {
        return Err(PipelineError::Usage(format!("z spacing must be positive, got {z_spacing_mm}")));
    }
    let mut layers = Vec::with_capacity(files.len());
    for f in files {
        let text = std::fs::read_to_string(f).map_err(|e| data(Stage::Parse)(&format_args!("{}: {e}", f.display())))?;
        layers.push(parse_single(&text).map_err(|e| data(Stage::Parse)(&format_args!("{}: {e}", f.display())))?);
    }
    let (mesh, report) = build_stack(layers, z_spacing_mm)?;
    write_mesh(&mesh, format, out)?;
    require_watertight(&report.mesh)?;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmoothReport {
    pub contours: usize,
    pub points: Vec<usize>,
    pub fallbacks: usize,
}

/// Smooths every contour of a point file.
pub fn cmd_smooth(input: &Path, params: &SmoothingParams, output: &Path) -> Result<SmoothReport, PipelineError> {
    let text = std::fs::read_to_string(input).map_err(|e| data(Stage::Parse)(&format_args!("{}: {e}", input.display())))?;
    let contours = parse_points(&text).map_err(|e| data(Stage::Parse)(&format_args!("{}: {e}", input.display())))?;
    if contours.is_empty() {
        return Err(data(Stage::Parse)(&format_args!("{}: no contours", input.display())));
    }
    let mut out = Vec::with_capacity(contours.len());
    let mut fallbacks = 0;
    for c in &contours {
        let s = smooth_contour(c, params).map_err(|e| data(Stage::Smooth)(&e))?;
        fallbacks += s.fallbacks;
        out.push(s.contour);
    }
    std::fs::write(output, format_points(&out)).map_err(|e| data(Stage::Write)(&format_args!("{}: {e}", output.display())))?;
    Ok(SmoothReport { contours: out.len(), points: out.iter().map(ContourPolyline::len).collect(), fallbacks })
}

impl SmoothReport {
    pub fn to_key_values(&self) -> String {
        let mut out = format!("contours={}\n", self.contours);
        for (k, n) in self.points.iter().enumerate() {
            writeln!(out, "contour.{k}.points={n}").unwrap();
        }
        writeln!(out, "fallbacks={}", self.fallbacks).unwrap();
        out
    }
}

pub fn cmd_phantom(spec: &PhantomSpec, out_dir: &Path, with_dicom: bool) -> Result<Vec<PathBuf>, PipelineError> {
    write_phantom(spec, out_dir, with_dicom).map_err(|e| match e {
        crate::phantom::PhantomError::InvalidParams(m) => PipelineError::Usage(format!("phantom: {m}")),
        other => data(Stage::Write)(&other),
    })
}

/// Audits an existing STL file.
pub fn cmd_validate(path: &Path) -> Result<MeshReport, PipelineError> {
    let bytes = std::fs::read(path).map_err(|e| data(Stage::Parse)(&format_args!("{}: {e}", path.display())))?;
    let mesh = read_stl(&bytes).map_err(|e| data(Stage::Parse)(&e))?;
    Ok(MeshReport::from(&mesh.audit()))
}
