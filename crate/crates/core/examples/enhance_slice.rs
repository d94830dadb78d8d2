//! Power law, median and mean filtering on a synthetic gray slice.

use slice2stl::enhance::{enhance, mean_filter, median_filter, power_law, EnhanceParams, GrayImage};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (w, h) = (32, 32);
    let pixels = (0..w * h)
        .map(|i| {
            let (x, y) = (i % w, i / w);
            let base = if (x as i32 - 16).pow(2) + (y as i32 - 16).pow(2) < 64 { 180.0 } else { 40.0 };
            // Salt noise on a fixed lattice.
            if (x * 7 + y * 13) % 29 == 0 { 255.0 } else { base }
        })
        .collect();
    let img = GrayImage::new(w, h, pixels)?;
    let bright = power_law(&img, 1.0, 0.3)?;
    let med = median_filter(&img, 3)?;
    let mean = mean_filter(&img, 3)?;
    let full = enhance(&img, &EnhanceParams::default())?;
    let row = |g: &GrayImage| (0..w).step_by(4).map(|x| format!("{:5.1}", g.get(x, 16))).collect::<Vec<_>>().join(" ");
    println!("input    {}", row(&img));
    println!("power    {}", row(&bright));
    println!("median3  {}", row(&med));
    println!("mean3    {}", row(&mean));
    println!("enhanced {}", row(&full));
    Ok(())
}
