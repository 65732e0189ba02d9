//! The genus-4 / genus-2 theta quotient is constant in z.
use monopole::curve::{fay_accola_ratio, run_pipeline, MonopoleIndex};
use monopole::theta::C64;

fn main() -> monopole::Result<()> {
    let p = run_pipeline(MonopoleIndex::new(0, 1)?)?;
    for z in [[C64::new(0.1, 0.05), C64::new(-0.2, 0.1)], [C64::new(0.37, -0.1), C64::new(0.05, 0.22)]] {
        println!("ratio at {z:?} = {:.12}", fay_accola_ratio(&p.periods, z, 1e-13)?);
    }
    Ok(())
}
