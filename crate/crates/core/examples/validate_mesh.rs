//! Audit a closed mesh, then the same mesh with one facet removed.

use slice2stl::geometry::ContourPolyline;
use slice2stl::mesh::{MeshAudit, TriangleMesh};
use slice2stl::stitch::{assemble, LayerStack};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let square = ContourPolyline::from_xy(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])?;
    let closed = assemble(&LayerStack::new(vec![square.clone(), square], 1.0, 0.0)?)?;
    let mut open = TriangleMesh::new();
    for f in 1..closed.facet_count() {
        let [a, b, c] = closed.triangle(f);
        let ia = open.add_vertex(a);
        let ib = open.add_vertex(b);
        let ic = open.add_vertex(c);
        open.add_triangle([ia, ib, ic]);
    }
    for (name, mesh) in [("closed", closed), ("open", open.welded(1e-9))] {
        let a = MeshAudit::of(&mesh);
        println!(
            "{name}: facets={} boundary_edges={} watertight={} euler={} genus={:?}",
            a.facets,
            a.boundary_edges,
            a.is_watertight(),
            a.euler_characteristic,
            a.genus()
        );
    }
    Ok(())
}
