//! Zeros of the genus-4 theta line, of the genus-2 f_k and of the elliptic h_{k-1} coincide.
use monopole::curve::{run_pipeline, MonopoleIndex};
use monopole::vanishing::equivalence_chain;

fn main() -> monopole::Result<()> {
    for (m, n) in [(1, 2), (1, 3)] {
        let idx = MonopoleIndex::new(m, n)?;
        let p = run_pipeline(idx)?;
        let c = equivalence_chain(idx, &p.periods, &p.vectors, 1024, 1e-4)?;
        println!("{idx}: genus-4 zeros {:?}", c.genus4_minus);
        println!("   mismatch {:.2e} (cell {:.2e}) agrees: {}", c.mismatch, c.cell(), c.agrees());
    }
    Ok(())
}
