//! Threshold, close and trace a phantom slice.

use slice2stl::phantom::{PhantomSpec, Shape};
use slice2stl::segment::{morph_schedule, select_roi, threshold, trace_contours, MorphOp, RoiPolicy};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = PhantomSpec { width: 64, height: 64, ..PhantomSpec::new(Shape::TorusStack { major_radius: 20.0, minor_radius: 6.0 }, 3) };
    let slice = spec.render_slice(1)?;
    let mask = morph_schedule(&threshold(&slice, 400.0), &[(MorphOp::Close, 3)])?;
    println!("foreground pixels: {}", mask.count());
    let contours = trace_contours(&mask, 5)?;
    for c in &contours {
        println!("contour: {} points, area {:.1}, starts at {:?}", c.len(), c.area(), c.points()[0]);
    }
    let roi = select_roi(contours, RoiPolicy::LargestArea)?;
    println!("roi keeps {} contour(s)", roi.len());
    Ok(())
}
