//! Smoothing cofactor of two polynomial pieces across a line, and a
//! conformality check at a vertex where four pieces meet.

use branched_splines::analyzer::{check_smooth_cofactor, verify_conformality, LinearForm};
use branched_splines::base_splines::Poly2;

fn main() -> branched_splines::Result<()> {
    // p_j - p_i = x^2 (y + 1): C1 across x = 0
    let l = LinearForm::from_ints(1, 0)?;
    let x = Poly2::x();
    let p_i = Poly2::y();
    let p_j = &p_i + &(&(&x * &x) * &(&Poly2::y() + &Poly2::one()));
    for r in 0..3 {
        let res = check_smooth_cofactor(&p_i, &p_j, &l, r);
        println!(
            "r={r}: divides={} quotient={:?}",
            res.divides,
            res.quotient.map(|q| q.to_string())
        );
    }

    // x^2 - x^2 + y^2 - y^2 = 0 around the cross x = 0, y = 0
    let forms = [
        LinearForm::from_ints(1, 0)?,
        LinearForm::from_ints(0, 1)?,
        LinearForm::from_ints(1, 0)?,
        LinearForm::from_ints(0, 1)?,
    ];
    let (one, minus) = (Poly2::one(), -&Poly2::one());
    println!(
        "conformal: {}",
        verify_conformality(&forms, &[one.clone(), one, minus.clone(), minus], 1)?
    );
    Ok(())
}
