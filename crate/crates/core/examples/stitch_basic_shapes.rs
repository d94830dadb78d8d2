//! Square prism and a square-to-octagon loft, stitched from contours.

use slice2stl::geometry::ContourPolyline;
use slice2stl::mesh::MeshAudit;
use slice2stl::stitch::{assemble_detailed, LayerStack};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let square = ContourPolyline::from_xy(&[(0.0, 0.0), (10.0, 0.0), (10.0, 10.0), (0.0, 10.0)])?;
    let prism = assemble_detailed(&LayerStack::new(vec![square.clone(), square.clone()], 5.0, 0.0)?)?;
    let audit = MeshAudit::of(&prism.mesh);
    println!("prism: {} facets, watertight={}, volume={}", audit.facets, audit.is_watertight(), audit.signed_volume);

    let octagon: Vec<(f64, f64)> = (0..8)
        .map(|k| {
            let t = k as f64 * std::f64::consts::TAU / 8.0;
            (5.0 + 6.0 * t.cos(), 5.0 + 6.0 * t.sin())
        })
        .collect();
    let stack = LayerStack::new(vec![square.clone(), ContourPolyline::from_xy(&octagon)?, square], 5.0, 0.0)?;
    let loft = assemble_detailed(&stack)?;
    for (k, plan) in loft.wall_plans.iter().enumerate() {
        println!(
            "wall {k}: i={} j={} q={} r={} case={:?} assignments={:?} facets={}",
            plan.i,
            plan.j,
            plan.q,
            plan.r,
            plan.case,
            plan.assignments,
            plan.facet_count()
        );
    }
    let audit = MeshAudit::of(&loft.mesh);
    println!("loft: {} facets, euler={}, genus={:?}", audit.facets, audit.euler_characteristic, audit.genus());
    Ok(())
}
