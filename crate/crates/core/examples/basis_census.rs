//! Lifts the degree 1 and 2 torus B-splines to the triple cover and prints
//! the census. Pass a path to also write the per-support CSV.

use branched_splines::branched_basis::enumerate_components;
use branched_splines::cover::{BranchedCover, BranchedCoverSpec};

fn main() -> branched_splines::Result<()> {
    let cover = BranchedCover::new(BranchedCoverSpec::triple_example())?;
    for degree in [1, 2] {
        let basis = enumerate_components(&cover, degree)?;
        println!("{}", serde_json::to_string(&basis.summary())?);
        if degree == 2 {
            for c in basis.census().iter().filter(|c| c.ramified > 0) {
                println!(
                    "  ramified support at anchor {:?}: {} components",
                    c.anchor, c.components
                );
            }
            if let Some(path) = std::env::args().nth(1) {
                basis.write_census_csv(std::fs::File::create(path)?)?;
            }
        }
    }
    Ok(())
}
