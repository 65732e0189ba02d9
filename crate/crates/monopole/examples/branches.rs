//! Trace the branches y = X_k(|R|) and list the fold points.
use monopole::vanishing::branch_loci;

fn main() -> monopole::Result<()> {
    let pts = branch_loci(0.5, 12.0, 116, 2.0)?;
    println!("{} branch points", pts.len());
    for p in pts.iter().filter(|p| p.vertical_tangent) {
        println!("vertical tangent near |R| = {:.3}, y/rho = {:.4}, k = {}", p.r_abs, p.y_over_rho, p.k);
    }
    Ok(())
}
