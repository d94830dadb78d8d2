//! Smoothing a noisy circle with both methods and a few spans.

use slice2stl::geometry::{ContourPolyline, Point};
use slice2stl::smooth::{smooth_contour, SmoothMethod, SmoothingParams};

fn radial_rms(c: &ContourPolyline, r: f64) -> f64 {
    let s: f64 = c.points().iter().map(|p| (p.coords.norm() - r).powi(2)).sum();
    (s / c.len() as f64).sqrt()
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 120;
    let pts = (0..n)
        .map(|k| {
            let t = k as f64 * std::f64::consts::TAU / n as f64;
            // Deterministic wobble plus two spikes.
            let spike = if k == 30 || k == 77 { 6.0 } else { 0.0 };
            let r = 50.0 + 0.8 * (13.0 * t).sin() + spike;
            Point::new(r * t.cos(), r * t.sin())
        })
        .collect();
    let noisy = ContourPolyline::new(pts)?;
    println!("input radial rms error {:.3}", radial_rms(&noisy, 50.0));
    for method in [SmoothMethod::Loess2, SmoothMethod::MovingAverage] {
        for span in [0.1, 0.2, 0.3, 0.4] {
            let out = smooth_contour(&noisy, &SmoothingParams::new(span, method)?)?;
            println!(
                "{method:?} span={span}: rms {:.3}, fallbacks {}",
                radial_rms(&out.contour, 50.0),
                out.fallbacks
            );
        }
    }
    Ok(())
}
