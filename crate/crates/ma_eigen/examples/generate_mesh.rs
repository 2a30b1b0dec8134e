//! Generates the two experiment domains, reports mesh statistics, and shows the
//! text-format round trip.

use std::sync::Arc;

use ma_eigen::mesh::{generate_mesh, load_mesh, save_mesh, DomainSpec};
use ma_eigen::Point2;

fn main() -> ma_eigen::Result<()> {
    let out_dir = std::env::current_dir()?.join("examples_out");
    std::fs::create_dir_all(&out_dir)?;

    let domains = [
        ("disk", DomainSpec::unit_disk(), 0.1),
        (
            "superellipse_2p5",
            DomainSpec::superellipse(2.5, 1.0, Point2::new(0.0, 0.0)),
            0.1,
        ),
        (
            "superellipse_3",
            DomainSpec::superellipse(3.0, 0.5, Point2::new(0.5, 0.5)),
            0.05,
        ),
    ];
    for (name, domain, target) in domains {
        let mesh = Arc::new(generate_mesh(&domain, target)?);
        println!(
            "{name}: {} vertices ({} interior), {} triangles, area {:.6}, h = {:.4}, min angle {:.1} deg",
            mesh.n_vertices(),
            mesh.n_interior(),
            mesh.triangles.len(),
            mesh.area,
            mesh.h,
            mesh.min_angle_deg()
        );
        let path = out_dir.join(format!("{name}.msh"));
        save_mesh(&mesh, &path)?;
        let again = load_mesh(&path)?;
        assert_eq!(again.triangles, mesh.triangles);
        println!("  saved and re-validated: {}", path.display());
    }
    Ok(())
}
