//! C1 genus-2 surface from Fraeijs de Veubeke–Sander elements on the double
//! cover.

use branched_splines::cover::{BranchedCover, BranchedCoverSpec};
use branched_splines::fvs::build_fvs_surface;
use branched_splines::geometry::{export_obj, mesh_report, tessellate, EmbeddingConfig};

fn main() -> branched_splines::Result<()> {
    let cover = BranchedCover::new(BranchedCoverSpec::double_example())?;
    let surface = build_fvs_surface(&cover, &EmbeddingConfig::stacked(2))?;
    let (dv, dg) = surface.junction_discrepancy(5);
    println!(
        "element residual {:e}, half-diagonal jumps {dv:e} / {dg:e}",
        surface.max_residual()
    );
    let mesh = tessellate(&cover, &surface, 4)?;
    println!("{:?}", mesh_report(&mesh));
    let path = std::env::args().nth(1).unwrap_or_else(|| "genus2_fvs.obj".into());
    export_obj(&mesh, std::io::BufWriter::new(std::fs::File::create(&path)?), true)?;
    println!("wrote {path}");
    Ok(())
}
