//! Exact dimension of the conformality solution space compared with two
//! readings of the closed-form count, over a small sweep.

use branched_splines::analyzer::{conformality_sweep, write_sweep_csv};

fn main() -> branched_splines::Result<()> {
    let rows = conformality_sweep(2..=4, 0..=6, 0..=5)?;
    let rows: Vec<_> = rows.into_iter().filter(|r| r.smoothness < r.degree).collect();
    write_sweep_csv(&rows, std::io::stdout().lock())?;
    let a = rows.iter().filter(|r| r.agree_a()).count();
    let b = rows.iter().filter(|r| r.agree_b()).count();
    eprintln!("agreement: A {a}/{n}, B {b}/{n}", n = rows.len());
    Ok(())
}
