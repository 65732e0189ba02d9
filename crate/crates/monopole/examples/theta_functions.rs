//! Jacobi and Riemann theta values, including the quasi-periodicity factor.
use monopole::theta::{jacobi_theta, riemann_theta, RiemannPeriodMatrix, ThetaCharacteristic, UpperHalfPlanePoint, C64};
use nalgebra::DMatrix;

fn main() -> monopole::Result<()> {
    let tau = UpperHalfPlanePoint::new(C64::new(0.25, 1.1))?;
    let z = C64::new(0.3, 0.2);
    for kind in 1..=4u8 {
        println!("theta_{kind}(z|tau) = {:.15}", jacobi_theta(kind, z, &tau, 1e-15)?);
    }
    let t = tau.tau();
    let shifted = jacobi_theta(3, z + t, &tau, 1e-15)?;
    let factor = (C64::new(0.0, -std::f64::consts::PI) * (t + 2.0 * z)).exp();
    println!("theta_3(z+tau) / (e^(-i pi tau - 2 pi i z) theta_3(z)) = {:.15}", shifted / (factor * jacobi_theta(3, z, &tau, 1e-15)?));

    let m = DMatrix::from_row_slice(2, 2, &[C64::new(0.0, 1.2), C64::new(0.5, 0.0), C64::new(0.5, 0.0), C64::new(0.0, 1.5)]);
    let pm = RiemannPeriodMatrix::new(m)?;
    let ch = ThetaCharacteristic::from_pairs(&[(1, 2), (0, 1)], &[(1, 3), (2, 3)])?;
    let v = riemann_theta(&[C64::new(0.1, 0.0), C64::new(0.0, 0.2)], &pm, &ch, 1e-14)?;
    println!("genus-2 theta with characteristic = {v:.15}");
    Ok(())
}
