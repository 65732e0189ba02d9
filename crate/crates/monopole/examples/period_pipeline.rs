//! Full pipeline for one index: period matrices, Humbert relations, lattice vector.
//!
//!     cargo run --example period_pipeline -- 2 3
use monopole::curve::{run_pipeline, MonopoleIndex};

fn main() -> monopole::Result<()> {
    let a: Vec<i64> = std::env::args().skip(1).filter_map(|x| x.parse().ok()).collect();
    let (m, n) = if a.len() == 2 { (a[0], a[1]) } else { (1, 3) };
    let p = run_pipeline(MonopoleIndex::new(m, n)?)?;
    println!("index {}", p.curve.index);
    println!("tau_s =\n{:.10}", p.periods.tau_s.matrix());
    println!("a, b, c, d = {:.10}, {:.10}, {:.10}, {:.10}", p.periods.a, p.periods.b, p.periods.c, p.periods.d);
    println!("T = {:.12}", p.periods.modulus);
    let (r1, r2) = p.periods.humbert_relations();
    println!("Humbert residuals {r1:.2e} {r2:.2e}, reduction residual {:.2e}", p.periods.humbert_residual);
    println!("lattice vector {:?}, residual {:.2e}", p.vectors.lattice, p.vectors.lattice_residual);
    Ok(())
}
