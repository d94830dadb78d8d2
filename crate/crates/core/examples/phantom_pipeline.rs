//! Full conversion of a cylinder phantom: slices on disk to STL.

use slice2stl::phantom::{write_phantom, PhantomSpec, Shape};
use slice2stl::pipeline::{cmd_convert, PipelineConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let spec = PhantomSpec { width: 128, height: 128, ..PhantomSpec::new(Shape::Cylinder { radius: 40.0 }, 6) };
    write_phantom(&spec, dir.path(), true)?;
    let cfg = PipelineConfig::default();
    let out = dir.path().join("cylinder.stl");
    let report = cmd_convert(&dir.path().join("dicom"), &cfg, &out)?;
    print!("{}", report.to_key_values());
    let analytic = std::f64::consts::PI * 40.0 * 40.0 * 5.0 * spec.slice_thickness_mm;
    println!("analytic_volume_mm3={analytic:.1}");
    Ok(())
}
