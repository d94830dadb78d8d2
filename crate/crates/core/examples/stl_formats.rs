//! Binary and ASCII STL of the same mesh.

use slice2stl::geometry::ContourPolyline;
use slice2stl::stitch::{assemble, LayerStack};
use slice2stl::stl::{read_stl, write_ascii_stl, write_binary_stl};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tri = ContourPolyline::from_xy(&[(0.0, 0.0), (3.0, 0.0), (0.0, 4.0)])?;
    let mesh = assemble(&LayerStack::new(vec![tri.clone(), tri], 2.5, 0.0)?)?;
    let bin = write_binary_stl(&mesh, "slice2stl example")?;
    println!("binary: {} bytes for {} facets", bin.len(), mesh.facet_count());
    let ascii = write_ascii_stl(&mesh, "wedge");
    print!("{}", ascii.lines().take(7).map(|l| format!("{l}\n")).collect::<String>());
    let back = read_stl(ascii.as_bytes())?;
    println!("ascii read back: {} facets, same binary = {}", back.facet_count(), write_binary_stl(&back, "slice2stl example")? == bin);
    Ok(())
}
