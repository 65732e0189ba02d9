//! Count zeros of H on the real line and print the verdict.
//!
//!     cargo run --release --example zero_count -- 2 5
use monopole::curve::MonopoleIndex;
use monopole::vanishing::count_zeros;

fn main() -> monopole::Result<()> {
    let a: Vec<i64> = std::env::args().skip(1).filter_map(|x| x.parse().ok()).collect();
    let (m, n) = if a.len() == 2 { (a[0], a[1]) } else { (1, 3) };
    let r = count_zeros(MonopoleIndex::new(m, n)?, 2048, 1e-9)?;
    for z in &r.zeros {
        println!("lambda = {:.10}  k = {:+}  |h| = {:.1e}  winding {}", z.lambda, z.k, z.residual, z.winding);
    }
    println!(
        "{} zeros (conjectured {}), endpoint orders at 0: h-1 {:.2}, h1 {:.2}, H {:.2}; verdict: {}",
        r.zero_count, r.conjecture_count, r.at_zero.h_minus.slope, r.at_zero.h_plus.slope, r.at_zero.big_h.slope, r.verdict
    );
    Ok(())
}
