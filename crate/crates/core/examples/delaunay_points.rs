//! Delaunay triangulation of a small point set, and the same set with a
//! forced edge.

use slice2stl::delaunay::{constrained_delaunay, delaunay_2d};
use slice2stl::geometry::Point;
use slice2stl::predicates::incircle;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let pts: Vec<Point> = [(0.0, 0.0), (4.0, 0.0), (5.0, 3.0), (2.0, 5.0), (-1.0, 3.0), (2.0, 1.5)]
        .iter()
        .map(|&(x, y)| Point::new(x, y))
        .collect();
    let tris = delaunay_2d(&pts)?;
    for t in &tris {
        let [a, b, c] = t.map(|k| pts[k]);
        let worst = (0..pts.len())
            .filter(|k| !t.contains(k))
            .map(|k| incircle(a, b, c, pts[k]))
            .fold(f64::NEG_INFINITY, f64::max);
        println!("{t:?} max incircle of others = {worst:.3}");
    }
    let forced = constrained_delaunay(&pts, &[(0, 2)])?;
    println!("with edge 0-2 forced: {forced:?}");
    Ok(())
}
