//! Degree 1 and 2 branched B-spline surfaces over the triple cover, written
//! as OBJ files into the given directory (default: current directory).

use std::path::PathBuf;

use branched_splines::branched_basis::{enumerate_components, BranchedSpline};
use branched_splines::cover::{BranchedCover, BranchedCoverSpec};
use branched_splines::geometry::{export_obj, mesh_report, sample_control_net, tessellate, EmbeddingConfig};

fn main() -> branched_splines::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| ".".into()));
    let cover = BranchedCover::new(BranchedCoverSpec::triple_example())?;
    let cfg = EmbeddingConfig::stacked(3);
    for degree in [1, 2] {
        let basis = enumerate_components(&cover, degree)?;
        let net = sample_control_net(&basis, &cfg)?;
        let mesh = tessellate(&cover, &BranchedSpline::new(&basis, &net.points)?, cfg.density)?;
        let path = dir.join(format!("genus3_degree{degree}.obj"));
        export_obj(&mesh, std::io::BufWriter::new(std::fs::File::create(&path)?), true)?;
        println!("{}: {:?}", path.display(), mesh_report(&mesh));
    }
    Ok(())
}
