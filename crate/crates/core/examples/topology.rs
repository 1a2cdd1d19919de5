//! Counts vertices, edges and faces of the triple and double covers and
//! checks the Riemann–Hurwitz relation.

use branched_splines::cover::{BranchedCover, BranchedCoverSpec};

fn main() -> branched_splines::Result<()> {
    for (name, spec) in [
        ("triple", BranchedCoverSpec::triple_example()),
        ("double", BranchedCoverSpec::double_example()),
    ] {
        let t = BranchedCover::new(spec)?.topology();
        println!(
            "{name}: V'={} E'={} F'={} chi={} genus={} ramification={:?} riemann-hurwitz={}",
            t.vertices,
            t.edges,
            t.faces,
            t.euler_characteristic,
            t.genus,
            t.ramification
                .iter()
                .map(|r| (r.vertex, r.indices.clone()))
                .collect::<Vec<_>>(),
            t.riemann_hurwitz_holds()
        );
    }
    Ok(())
}
