//! Which integer |R| make h_{-1} vanish at y = 2 rho / 3.
use monopole::vanishing::{mudots_residual, mudots_solutions};

fn main() -> monopole::Result<()> {
    for r in 1..=12 {
        println!("|R| = {r:>2}  residual {:.2e}  solution: {}", mudots_residual(r as f64)?, mudots_solutions(r as f64)?);
    }
    Ok(())
}
