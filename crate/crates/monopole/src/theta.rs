//! Jacobi theta functions and genus-g Riemann theta functions with rational
//! characteristics.
//!
//! Convention: ϑ₃(z|τ) = Σₙ exp(iπn²τ + 2πinz), period 1 in z, nome e^{iπτ}.
//! ϑ₂ shifts n by 1/2, ϑ₄ inserts (−1)ⁿ and ϑ₁ = −θ[½,½] is the odd one with
//! ϑ₁'(0) > 0 for purely imaginary τ.
//!
//! Values can be huge far from the real axis, so every evaluator has a
//! `_scaled` form returning `mantissa · exp(log_scale)`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

const PI: f64 = std::f64::consts::PI;
const I: C64 = C64::new(0.0, 1.0);
const MAX_RADIUS: f64 = 64.0;

/// A complex number kept as `mantissa · exp(log_scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub mantissa: C64,
    pub log_scale: C64,
}

impl Scaled {
    pub fn value(&self) -> C64 {
        self.mantissa * self.log_scale.exp()
    }

    /// ln|value|, finite for any non-zero mantissa.
    pub fn ln_abs(&self) -> f64 {
        self.mantissa.norm().ln() + self.log_scale.re
    }
}

/// A point τ of the upper half plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UpperHalfPlanePoint {
    tau: C64,
}

impl UpperHalfPlanePoint {
    pub fn new(tau: C64) -> Result<Self> {
        if !(tau.im > 0.0) || !tau.re.is_finite() {
            return Err(Error::Modulus(format!("Im tau must be positive, got {tau}")));
        }
        Ok(Self { tau })
    }

    pub fn tau(&self) -> C64 {
        self.tau
    }
}

/// Which sum to use for the Jacobi thetas. `DoubledNome` is a deliberately
/// wrong convention (nome e^{2πiτ}) used as a negative control.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Convention {
    #[default]
    Standard,
    DoubledNome,
}

/// Number of terms on each side so that the dropped tail is below `tol`.
fn genus_one_terms(im_tau: f64, tol: f64) -> i64 {
    // Terms decay like exp(−π Im τ (n² − |n|)) once z is reduced.
    let budget = (1.0 / tol).ln() + 0.5 * (1.0 / im_tau).ln().max(0.0) + 4.0;
    let mut n = 1i64;
    while PI * im_tau * ((n * n - n) as f64) < budget {
        n += 1;
    }
    n + 1
}

fn jacobi_char(kind: u8) -> Result<(f64, f64, f64)> {
    // (a, b, overall sign) with ϑ = sign · θ[a, b] in genus one
    match kind {
        1 => Ok((0.5, 0.5, -1.0)),
        2 => Ok((0.5, 0.0, 1.0)),
        3 => Ok((0.0, 0.0, 1.0)),
        4 => Ok((0.0, 0.5, 1.0)),
        _ => Err(Error::Domain(format!("theta kind must be 1..4, got {kind}"))),
    }
}

/// Jacobi theta ϑ_kind(z|τ) with absolute truncation error ≤ tol·(1+|result|).
pub fn jacobi_theta(kind: u8, z: C64, tau: &UpperHalfPlanePoint, tol: f64) -> Result<C64> {
    Ok(jacobi_theta_scaled(kind, z, tau, tol)?.value())
}

pub fn jacobi_theta_scaled(kind: u8, z: C64, tau: &UpperHalfPlanePoint, tol: f64) -> Result<Scaled> {
    jacobi_theta_in(Convention::Standard, kind, z, tau, tol)
}

/// Jacobi theta under an explicit convention.
pub fn jacobi_theta_in(
    conv: Convention,
    kind: u8,
    z: C64,
    tau: &UpperHalfPlanePoint,
    tol: f64,
) -> Result<Scaled> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tol must be positive, got {tol}")));
    }
    let (ca, cb, sign) = jacobi_char(kind)?;
    let t = match conv {
        Convention::Standard => tau.tau,
        Convention::DoubledNome => 2.0 * tau.tau,
    };

    // z = z0 + p + qτ with z0 in the centred period cell.
    let q = (z.im / t.im).round();
    let z1 = z - q * t;
    let p = z1.re.round();
    let z0 = z1 - p;

    let n = genus_one_terms(t.im, tol);
    let mut sum = C64::zero();
    // For ϑ₁, ϑ₂ the factor e^{iπτ/4} moves into the log scale, keeping the mantissa O(1).
    let lead = ca * ca;
    for k in -n..=n {
        let v = k as f64 + ca;
        sum += (I * PI * ((v * v - lead) * t + 2.0 * v * (z0 + cb))).exp();
    }
    // ϑ(w+τ) = ε₁ e^{−iπτ−2πiw} ϑ(w) and ϑ(w+1) = ε₂ ϑ(w), with ε from the characteristic.
    let eps_tau = if cb == 0.5 { -1.0 } else { 1.0 };
    let eps_one = if ca == 0.5 { -1.0 } else { 1.0 };
    let qi = q as i64;
    let pi_ = p as i64;
    let mut s = sign;
    if qi.rem_euclid(2) == 1 {
        s *= eps_tau;
    }
    if pi_.rem_euclid(2) == 1 {
        s *= eps_one;
    }
    let log_scale = I * PI * lead * t - I * PI * q * q * t - 2.0 * PI * I * q * z0;
    Ok(Scaled {
        mantissa: s * sum,
        log_scale,
    })
}

fn ratio(num: u8, den: u8, z: C64, tau: &UpperHalfPlanePoint, tol: f64) -> Result<C64> {
    let a = jacobi_theta_scaled(num, z, tau, tol)?;
    let b = jacobi_theta_scaled(den, z, tau, tol)?;
    if b.mantissa.norm() < 1e3 * tol {
        return Err(Error::Pole(b.mantissa.norm()));
    }
    // Both carry the same quasi-periodicity factor.
    Ok(a.mantissa / b.mantissa * (a.log_scale - b.log_scale).exp())
}

/// (ϑ₃/ϑ₂)(z|τ); errors near the zeros of ϑ₂.
pub fn theta_ratio_32(z: C64, tau: &UpperHalfPlanePoint, tol: f64) -> Result<C64> {
    ratio(3, 2, z, tau, tol)
}

/// (ϑ₂/ϑ₃)(z|τ); errors near the zeros of ϑ₃.
pub fn theta_ratio_23(z: C64, tau: &UpperHalfPlanePoint, tol: f64) -> Result<C64> {
    ratio(2, 3, z, tau, tol)
}

/// d/dz (ϑ₃/ϑ₂)(z|τ) = π ϑ₄²(0|τ) (ϑ₁ϑ₄/ϑ₂²)(z|τ).
pub fn theta_ratio_32_derivative(z: C64, tau: &UpperHalfPlanePoint, tol: f64) -> Result<C64> {
    let t40 = jacobi_theta(4, C64::zero(), tau, tol)?;
    let t1 = jacobi_theta_scaled(1, z, tau, tol)?;
    let t4 = jacobi_theta_scaled(4, z, tau, tol)?;
    let t2 = jacobi_theta_scaled(2, z, tau, tol)?;
    if t2.mantissa.norm() < 1e3 * tol {
        return Err(Error::Pole(t2.mantissa.norm()));
    }
    let m = t1.mantissa * t4.mantissa / (t2.mantissa * t2.mantissa);
    let l = t1.log_scale + t4.log_scale - 2.0 * t2.log_scale;
    Ok(PI * t40 * t40 * m * l.exp())
}

/// Rational characteristic (a, b) of a theta function.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ThetaCharacteristic {
    pub a: Vec<Rational64>,
    pub b: Vec<Rational64>,
}

impl ThetaCharacteristic {
    pub fn zero(g: usize) -> Self {
        Self {
            a: vec![Rational64::zero(); g],
            b: vec![Rational64::zero(); g],
        }
    }

    pub fn new(a: Vec<Rational64>, b: Vec<Rational64>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::Shape(format!(
                "characteristic halves differ in length: {} vs {}",
                a.len(),
                b.len()
            )));
        }
        Ok(Self { a, b })
    }

    /// Build from (numerator, denominator) pairs.
    pub fn from_pairs(a: &[(i64, i64)], b: &[(i64, i64)]) -> Result<Self> {
        let conv = |v: &[(i64, i64)]| v.iter().map(|&(p, q)| Rational64::new(p, q)).collect();
        Self::new(conv(a), conv(b))
    }

    pub fn genus(&self) -> usize {
        self.a.len()
    }

    pub fn neg(&self) -> Self {
        Self {
            a: self.a.iter().map(|x| -x).collect(),
            b: self.b.iter().map(|x| -x).collect(),
        }
    }

    /// Reduce both halves into [0, 1).
    ///
    /// Returns the reduced characteristic and the phase φ with
    /// θ_{a,b} = e^{2πiφ} θ_{reduced}, φ taken mod 1.
    pub fn reduce(&self) -> (Self, Rational64) {
        let fl = |x: &Rational64| x.floor();
        let a0: Vec<_> = self.a.iter().map(|x| x - fl(x)).collect();
        let b0: Vec<_> = self.b.iter().map(|x| x - fl(x)).collect();
        // θ_{a0+p, b0+q} = e^{2πi a0·q} θ_{a0,b0}
        let mut phase = Rational64::zero();
        for (ai, bi) in a0.iter().zip(&self.b) {
            phase += ai * fl(bi);
        }
        let phase = phase - phase.floor();
        (Self { a: a0, b: b0 }, phase)
    }

    pub fn a_f64(&self) -> Vec<f64> {
        self.a.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect()
    }

    pub fn b_f64(&self) -> Vec<f64> {
        self.b.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect()
    }
}

/// A symmetric g×g matrix with positive definite imaginary part.
#[derive(Debug, Clone)]
pub struct RiemannPeriodMatrix {
    tau: DMatrix<C64>,
    y_inv: DMatrix<f64>,
    chol: DMatrix<f64>,
    lambda_min: f64,
}

impl RiemannPeriodMatrix {
    pub fn new(tau: DMatrix<C64>) -> Result<Self> {
        let g = tau.nrows();
        if tau.ncols() != g || g == 0 {
            return Err(Error::Shape(format!("period matrix is {}x{}", g, tau.ncols())));
        }
        let scale = tau.iter().map(|x| x.norm()).fold(1.0, f64::max);
        for i in 0..g {
            for j in 0..i {
                if (tau[(i, j)] - tau[(j, i)]).norm() > 1e-12 * scale {
                    return Err(Error::Modulus(format!(
                        "period matrix not symmetric at ({i},{j}): {} vs {}",
                        tau[(i, j)],
                        tau[(j, i)]
                    )));
                }
            }
        }
        // Symmetrize exactly before use.
        let tau = (&tau + tau.transpose()).map(|x| x * 0.5);
        let y = tau.map(|x| x.im);
        let lambda_min = SymmetricEigen::new(y.clone()).eigenvalues.min();
        if !(lambda_min > 0.0) {
            return Err(Error::Modulus(format!(
                "Im tau is not positive definite (smallest eigenvalue {lambda_min:e})"
            )));
        }
        let chol = y
            .clone()
            .cholesky()
            .ok_or_else(|| Error::Modulus("Cholesky factorization of Im tau failed".into()))?;
        let y_inv = chol.inverse();
        Ok(Self {
            tau,
            y_inv,
            chol: chol.l(),
            lambda_min,
        })
    }

    pub fn genus(&self) -> usize {
        self.tau.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.tau
    }

    pub fn lambda_min(&self) -> f64 {
        self.lambda_min
    }

    /// Ellipsoid radius (in the Im τ metric) so that the dropped tail is below tol.
    pub fn radius_for(&self, tol: f64) -> Result<f64> {
        let g = self.genus() as f64;
        let rho = (PI * self.lambda_min).sqrt();
        let bound = |r: f64| {
            let x = (r - 0.5 * rho).max(0.0);
            0.5 * g * (2.0 / rho).powf(g) * statrs::function::gamma::gamma_ui(0.5 * g, x * x)
        };
        let mut r = 0.5 * rho + 1.0;
        while bound(r) > tol {
            r += 0.05;
            if r / PI.sqrt() > MAX_RADIUS {
                return Err(Error::TruncationCap(r / PI.sqrt()));
            }
        }
        Ok(r / PI.sqrt())
    }
}

/// Visit every v ∈ shift + Zᵍ with (v−c)ᵀY(v−c) ≤ r², passing v and the quadratic form.
fn enumerate_ellipsoid(
    l: &DMatrix<f64>,
    c: &[f64],
    shift: &[f64],
    r2: f64,
    visit: &mut dyn FnMut(&[f64], f64),
) {
    let g = c.len();
    let mut v = vec![0.0; g];
    fn rec(
        i: usize,
        l: &DMatrix<f64>,
        c: &[f64],
        shift: &[f64],
        r2: f64,
        partial: f64,
        v: &mut Vec<f64>,
        visit: &mut dyn FnMut(&[f64], f64),
    ) {
        let g = c.len();
        let lii = l[(i, i)];
        let mut off = 0.0;
        for j in i + 1..g {
            off += l[(j, i)] * (v[j] - c[j]);
        }
        let center = c[i] - off / lii;
        let rem = r2 - partial;
        if rem < 0.0 {
            return;
        }
        let hw = rem.sqrt() / lii;
        let lo = (center - hw - shift[i]).ceil() as i64;
        let hi = (center + hw - shift[i]).floor() as i64;
        for k in lo..=hi {
            v[i] = k as f64 + shift[i];
            let w = lii * (v[i] - center);
            let p = partial + w * w;
            if i == 0 {
                visit(v, p);
            } else {
                rec(i - 1, l, c, shift, r2, p, v, visit);
            }
        }
    }
    rec(g - 1, l, c, shift, r2, 0.0, &mut v, visit);
}

/// θ[a,b](z|τ) = Σ_{n∈Zᵍ} exp(iπ(n+a)ᵀτ(n+a) + 2πi(n+a)ᵀ(z+b)).
pub fn riemann_theta(
    z: &[C64],
    tau: &RiemannPeriodMatrix,
    ch: &ThetaCharacteristic,
    tol: f64,
) -> Result<C64> {
    Ok(riemann_theta_scaled(z, tau, ch, tol)?.value())
}

/// Riemann theta normalized by its Gaussian envelope exp(π yᵀY⁻¹y), y = Im z.
pub fn riemann_theta_scaled(
    z: &[C64],
    tau: &RiemannPeriodMatrix,
    ch: &ThetaCharacteristic,
    tol: f64,
) -> Result<Scaled> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tol must be positive, got {tol}")));
    }
    let r = tau.radius_for(tol)?;
    riemann_theta_with_radius(z, tau, ch, r)
}

/// Same sum with an explicit ellipsoid radius.
pub fn riemann_theta_with_radius(
    z: &[C64],
    tau: &RiemannPeriodMatrix,
    ch: &ThetaCharacteristic,
    radius: f64,
) -> Result<Scaled> {
    let g = tau.genus();
    if z.len() != g || ch.genus() != g {
        return Err(Error::Shape(format!(
            "genus {g} period matrix with argument of length {} and characteristic of genus {}",
            z.len(),
            ch.genus()
        )));
    }
    let y: Vec<f64> = z.iter().map(|w| w.im).collect();
    let x: Vec<f64> = z.iter().map(|w| w.re).collect();
    // centre of the Gaussian envelope
    let mut c = vec![0.0; g];
    for i in 0..g {
        for j in 0..g {
            c[i] -= tau.y_inv[(i, j)] * y[j];
        }
    }
    let envelope: f64 = -c.iter().zip(&y).map(|(ci, yi)| ci * yi).sum::<f64>();
    let a = ch.a_f64();
    let b = ch.b_f64();
    let xr = tau.tau.map(|w| w.re);
    let xb: Vec<f64> = x.iter().zip(&b).map(|(u, v)| u + v).collect();

    let mut sum = C64::zero();
    let mut visit = |v: &[f64], q: f64| {
        let mut quad = 0.0;
        let mut lin = 0.0;
        for i in 0..g {
            let mut row = 0.0;
            for j in 0..g {
                row += xr[(i, j)] * v[j];
            }
            quad += v[i] * row;
            lin += v[i] * xb[i];
        }
        let phase = PI * quad + 2.0 * PI * lin;
        sum += C64::from_polar((-PI * q).exp(), phase);
    };
    enumerate_ellipsoid(&tau.chol, &c, &a, radius * radius, &mut visit);
    Ok(Scaled {
        mantissa: sum,
        log_scale: C64::new(PI * envelope, 0.0),
    })
}

// Serialized as a list of rows; deserializing re-validates the matrix.
impl Serialize for RiemannPeriodMatrix {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<C64>> = self.tau.row_iter().map(|r| r.iter().copied().collect()).collect();
        rows.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for RiemannPeriodMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<C64>>::deserialize(de)?;
        let g = rows.len();
        if rows.iter().any(|r| r.len() != g) {
            return Err(serde::de::Error::custom("period matrix must be square"));
        }
        let m = DMatrix::from_fn(g, g, |i, j| rows[i][j]);
        RiemannPeriodMatrix::new(m).map_err(serde::de::Error::custom)
    }
}
