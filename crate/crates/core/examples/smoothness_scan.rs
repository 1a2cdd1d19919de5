//! Numeric C0/C1 scan of degree 1 and 2 branched B-splines across every
//! cover edge, separating edges that touch a ramification point.

use branched_splines::analyzer::{numeric_smoothness_scan, EdgeSamplePlan};
use branched_splines::branched_basis::{enumerate_components, BranchedSpline};
use branched_splines::cover::{BranchedCover, BranchedCoverSpec};
use branched_splines::geometry::{sample_control_net, EmbeddingConfig};

fn main() -> branched_splines::Result<()> {
    let cover = BranchedCover::new(BranchedCoverSpec::triple_example())?;
    let plan = EdgeSamplePlan::all_edges(&cover, 5);
    for degree in [1, 2] {
        let basis = enumerate_components(&cover, degree)?;
        let net = sample_control_net(&basis, &EmbeddingConfig::stacked(3))?;
        let spline = BranchedSpline::new(&basis, &net.points)?;
        for order in [0, 1] {
            let r = numeric_smoothness_scan(&cover, &spline, &plan, order, if order == 0 { 1e-10 } else { 1e-8 });
            println!(
                "degree {degree} C{order}: value {:e} gradient {:?} ramified {:?} ({} edges) pass={}",
                r.max_value_discrepancy,
                r.max_gradient_discrepancy,
                r.max_gradient_discrepancy_ramified,
                r.ramification_incident_edges,
                r.pass
            );
        }
    }
    Ok(())
}
