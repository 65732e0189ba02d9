//! Theta identities at random moduli, under the right and a wrong convention.
use monopole::theta::{Convention, UpperHalfPlanePoint, C64};
use monopole::vanishing::verify_identities;
use rand::{rngs::StdRng, Rng, SeedableRng};

fn main() -> monopole::Result<()> {
    let mut rng = StdRng::seed_from_u64(1);
    for _ in 0..5 {
        let tau = UpperHalfPlanePoint::new(C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(0.5..3.0)))?;
        let good = verify_identities(&tau, Convention::Standard)?;
        let bad = verify_identities(&tau, Convention::DoubledNome)?;
        println!("tau = {:.4}: residual {:.1e}, doubled nome {:.1e}", tau.tau(), good.max_residual(), bad.max_residual());
    }
    Ok(())
}
