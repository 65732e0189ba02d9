//! Solve for the curve parameters of a few admissible (m, n).
//!
//!     cargo run --example curve_solve -- 1 3
use monopole::curve::{solve_curve, MonopoleIndex};

fn main() -> monopole::Result<()> {
    let args: Vec<i64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let pairs = match args.as_slice() {
        [m, n] => vec![(*m, *n)],
        _ => vec![(0, 1), (1, 1), (1, 2), (1, 3), (-1, 4)],
    };
    println!("{:>8} {:>22} {:>18} {:>14}", "(m, n)", "b", "chi^(1/3)", "t");
    for (m, n) in pairs {
        let cd = solve_curve(MonopoleIndex::new(m, n)?)?;
        println!("{:>8} {:>22.15} {:>18.15} {:>14.10}", cd.index.to_string(), cd.b, cd.chi_cbrt, cd.t);
    }
    Ok(())
}
