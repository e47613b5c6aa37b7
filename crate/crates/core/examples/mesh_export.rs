//! Meshes a perturbed 60° sector, refines it twice and writes the text
//! export of each level; the round trip through the importer is checked.
//!
//! cargo run --example mesh_export -- [output_dir]

use std::f64::consts::PI;
use std::path::PathBuf;

use serrin_lab::geometry::{make_sector_domain, RadiusFn};
use serrin_lab::mesher::{refine, triangulate, BoundaryTag, TaggedMesh};

fn main() -> serrin_lab::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "mesh_out".into()));
    std::fs::create_dir_all(&dir)?;
    let spec = make_sector_domain(PI / 3.0, RadiusFn::fourier(1.0, [(6, 0.04)]), 128)?;
    let mut mesh = triangulate(&spec, 0.1)?;
    for level in 0..3 {
        if level > 0 {
            mesh = refine(&mesh);
        }
        mesh.validate()?;
        let text = mesh.export_text();
        let back = TaggedMesh::import_text(&text)?;
        assert_eq!(back.triangles, mesh.triangles);
        let path = dir.join(format!("sector_level{level}.mesh"));
        std::fs::write(&path, &text)?;
        println!(
            "level {level}: {} vertices, {} triangles, h_max {:.4}, min angle {:.1}°, |Γ0| {:.6}, |Γ1| {:.6} -> {}",
            mesh.num_vertices(),
            mesh.num_triangles(),
            mesh.h_max,
            mesh.min_angle,
            mesh.boundary_length(BoundaryTag::Gamma0),
            mesh.boundary_length(BoundaryTag::Gamma1),
            path.display()
        );
    }
    println!("exact |Γ0| = {:.6}", spec.gamma0_length());
    Ok(())
}
