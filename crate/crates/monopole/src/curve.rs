//! From an index (m, n) to the curve η³ + χ(ζ⁶ + bζ³ − 1) = 0, its periods,
//! the genus-4, genus-2 and elliptic period matrices, and the winding data.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{self, check_index, HypergeometricQuery};
use crate::symplectic::{self, checked_inverse};
use crate::theta::{jacobi_theta, riemann_theta_scaled, RiemannPeriodMatrix, ThetaCharacteristic, UpperHalfPlanePoint, C64};

const PI: f64 = std::f64::consts::PI;
const I: C64 = C64::new(0.0, 1.0);
const THETA_TOL: f64 = 1e-15;

/// Primitive cube root of unity e^{2πi/3}.
pub fn rho() -> C64 {
    C64::from_polar(1.0, 2.0 * PI / 3.0)
}

/// Coprime (m, n) with (m+n)(m−2n) < 0, stored with n + m ≥ 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawIndex")]
pub struct MonopoleIndex {
    m: i64,
    n: i64,
}

impl MonopoleIndex {
    /// Validate and canonicalize; (m, n) and (−m, −n) describe the same curve.
    pub fn new(m: i64, n: i64) -> Result<Self> {
        Ok(Self::canonicalize(m, n)?.0)
    }

    /// Like [`Self::new`], also reporting whether the sign was flipped.
    pub fn canonicalize(m: i64, n: i64) -> Result<(Self, bool)> {
        check_index(m, n)?;
        if m + n >= 1 {
            Ok((Self { m, n }, false))
        } else {
            Ok((Self { m: -m, n: -n }, true))
        }
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    /// (n − m, n): exchanges ℛ with 1/ℛ.
    pub fn partner(&self) -> Self {
        Self::new(self.n - self.m, self.n).expect("partner of an admissible pair is admissible")
    }

    /// ℛ = (m − 2n)/(m + n) < 0.
    pub fn ratio(&self) -> f64 {
        (self.m - 2 * self.n) as f64 / (self.m + self.n) as f64
    }

    /// 𝒯 = 2i√3 (n+m)/(2n−m).
    pub fn modulus(&self) -> C64 {
        I * (2.0 * 3f64.sqrt() * (self.n + self.m) as f64 / (2 * self.n - self.m) as f64)
    }

    /// Predicted number of zeros of H on λ ∈ (0, 2).
    pub fn conjectured_zero_count(&self) -> usize {
        2 * (self.n.unsigned_abs() as usize - 1)
    }

    /// All canonical admissible pairs with |m|, |n| ≤ bound, ordered by (n, m).
    pub fn admissible_up_to(bound: i64) -> Vec<Self> {
        let mut out = Vec::new();
        for n in -bound..=bound {
            for m in -bound..=bound {
                if let Ok(idx) = Self::new(m, n) {
                    if idx.m.abs() <= bound && idx.n.abs() <= bound {
                        out.push(idx);
                    }
                }
            }
        }
        out.sort_by_key(|i| (i.n, i.m));
        out.dedup();
        out
    }

    /// All canonical admissible pairs with n ≤ bound, whatever the size of m.
    /// Canonical pairs have n ≥ 1 and −n < m < 2n.
    pub fn admissible_with_n_up_to(bound: i64) -> Vec<Self> {
        (1..=bound)
            .flat_map(|n| (1 - n..2 * n).filter_map(move |m| Self::new(m, n).ok()))
            .collect()
    }
}

#[derive(Deserialize)]
struct RawIndex {
    m: i64,
    n: i64,
}

impl TryFrom<RawIndex> for MonopoleIndex {
    type Error = Error;
    fn try_from(r: RawIndex) -> Result<Self> {
        Self::new(r.m, r.n)
    }
}

impl std::fmt::Display for MonopoleIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.m, self.n)
    }
}

/// Scalar invariants of the curve for one index.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurveData {
    pub index: MonopoleIndex,
    /// ln(t/(1−t)); carries t when t rounds to 0 or 1.
    pub log_odds: f64,
    pub t: f64,
    pub one_minus_t: f64,
    pub b: f64,
    pub chi: f64,
    pub chi_cbrt: f64,
    pub alpha: f64,
    pub i1: f64,
    pub j1: f64,
    pub r: f64,
    pub x1: C64,
    pub x4: C64,
    pub c0: i64,
}

impl CurveData {
    /// x̄ᵀHx with x = (x₁, ρx₁, ρ²x₁, x₄), H = diag(1,1,1,−1).
    pub fn hermitian_form(&self) -> f64 {
        3.0 * self.x1.norm_sqr() - self.x4.norm_sqr()
    }

    /// Periods rescaled so that 𝒥₁ = 1.
    pub fn normalized_periods(&self) -> (C64, C64) {
        (self.x1 / self.j1, self.x4 / self.j1)
    }
}

/// ℐ₁ and 𝒥₁ written with t and s = 1−t: both equal ±(2π√3/9)(ts)^{1/6}·F(·).
fn period_integrals_from_split(t: f64, s: f64) -> Result<(f64, f64)> {
    let pref = 2.0 * PI * 3f64.sqrt() / 9.0 * (t * s).powf(1.0 / 6.0);
    let f = |x: f64, cx: f64| -> Result<f64> {
        if x <= 0.5 {
            specfun::gauss_2f1(&HypergeometricQuery::new(1.0 / 3.0, 2.0 / 3.0, 1.0, x))
        } else {
            specfun::gauss_2f1_complement(1.0 / 3.0, 2.0 / 3.0, 1.0, cx)
        }
    };
    Ok((-pref * f(t, s)?, pref * f(s, t)?))
}

/// ℐ₁(α) = −(2π√3/9) α ₂F₁(1/3,1/3;1;−α⁶) and 𝒥₁(α) = (2π√3/(9α)) ₂F₁(1/3,1/3;1;−α⁻⁶).
pub fn period_integrals(alpha: f64) -> Result<(f64, f64)> {
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!("alpha must be positive, got {alpha}")));
    }
    let c = 2.0 * PI * 3f64.sqrt() / 9.0;
    let third = 1.0 / 3.0;
    let i1 = -c * alpha * specfun::gauss_2f1(&HypergeometricQuery::new(third, third, 1.0, -alpha.powi(6)))?;
    let j1 = c / alpha * specfun::gauss_2f1(&HypergeometricQuery::new(third, third, 1.0, -alpha.powi(-6)))?;
    Ok((i1, j1))
}

/// Solve for t, then b, χ, α and the periods.
pub fn solve_curve(idx: MonopoleIndex) -> Result<CurveData> {
    let (m, n) = (idx.m, idx.n);
    let u = specfun::solve_es_log_odds(m, n)?;
    let (t, s) = specfun::split_log_odds(u);
    let alpha = (u / 6.0).exp();
    // b = (1−2t)/√(t(1−t)) = α⁻³ − α³
    let b = (-u / 2.0).exp() - (u / 2.0).exp();
    let (i1, j1) = period_integrals_from_split(t, s)?;
    let chi_cbrt = (m + n) as f64 * i1;
    let mut cd = CurveData {
        index: idx,
        log_odds: u,
        t,
        one_minus_t: s,
        b,
        chi: chi_cbrt.powi(3),
        chi_cbrt,
        alpha,
        i1,
        j1,
        r: i1 / j1,
        x1: C64::new(0.0, 0.0),
        x4: C64::new(0.0, 0.0),
        c0: -3 * (2 * n - m),
    };
    let (x1, x4) = compute_periods(&cd);
    cd.x1 = x1;
    cd.x4 = x4;
    Ok(cd)
}

/// x₁ = −(2𝒥₁+ℐ₁)ρ − 2ℐ₁ − 𝒥₁, x₄ = 3(𝒥₁−ℐ₁)ρ + 3𝒥₁.
pub fn compute_periods(cd: &CurveData) -> (C64, C64) {
    let r = rho();
    let (i1, j1) = (cd.i1, cd.j1);
    let x1 = -(2.0 * j1 + i1) * r - 2.0 * i1 - j1;
    let x4 = 3.0 * (j1 - i1) * r + 3.0 * j1;
    (x1, x4)
}

/// Period matrices for one curve.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PeriodData {
    pub tau_s: RiemannPeriodMatrix,
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
    pub tau_c: RiemannPeriodMatrix,
    pub tau_g2: RiemannPeriodMatrix,
    pub tau11: C64,
    pub tau22: C64,
    pub modulus: C64,
    /// max |S·𝔖(τ̂ˢ)·S⁻¹ − τ̂ᶜ| entrywise.
    pub transport_residual: f64,
    /// max |reduced τ_g2 − [[τ̃₁₁, ½], [½, τ̃₂₂]]|.
    pub humbert_residual: f64,
}

impl PeriodData {
    /// Residuals of the two quadratic Humbert relations on τ_g2:
    /// 3τ₁₁ − τ₂₂ + 2 and 1 + 3τ₁₁ − τ₁₂² + 3τ₁₁².
    pub fn humbert_relations(&self) -> (f64, f64) {
        humbert_relations(self.tau_g2.matrix())
    }

    /// The same relations in their mirrored form 3τ₁₁ − τ₂₂ − 2 and
    /// 1 − 3τ₁₁ − τ₁₂² + 3τ₁₁², evaluated on −τ̄_g2.
    pub fn humbert_relations_mirrored(&self) -> (f64, f64) {
        let t = self.tau_g2.matrix().map(|x| -x.conj());
        let (t11, t12, t22) = (t[(0, 0)], t[(0, 1)], t[(1, 1)]);
        (
            (3.0 * t11 - t22 - 2.0).norm(),
            (1.0 - 3.0 * t11 - t12 * t12 + 3.0 * t11 * t11).norm(),
        )
    }

    /// max deviation of τ̂ᶜ from the (a,b,b,b / b,c,d,d / b,d,c,d / b,d,d,c) pattern.
    pub fn pattern_residual(&self) -> f64 {
        let p = fay_accola_pattern(self.a, self.b, self.c, self.d);
        max_abs_diff(self.tau_c.matrix(), &p)
    }
}

pub fn humbert_relations(t: &DMatrix<C64>) -> (f64, f64) {
    let (t11, t12, t22) = (t[(0, 0)], t[(0, 1)], t[(1, 1)]);
    (
        (3.0 * t11 - t22 + 2.0).norm(),
        (1.0 + 3.0 * t11 - t12 * t12 + 3.0 * t11 * t11).norm(),
    )
}

fn fay_accola_pattern(a: C64, b: C64, c: C64, d: C64) -> DMatrix<C64> {
    DMatrix::from_row_slice(
        4,
        4,
        &[a, b, b, b, b, c, d, d, b, d, c, d, b, d, d, c],
    )
}

fn max_abs_diff(x: &DMatrix<C64>, y: &DMatrix<C64>) -> f64 {
    (x - y).iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// τ̂ˢ = −ρ²(H + (ρ²−1) x'x'ᵀ/(x'ᵀHx')) with x' = (x₁, ρx₁, ρ²x₁, −x₄).
pub fn tau_s_matrix(x1: C64, x4: C64) -> DMatrix<C64> {
    let r = rho();
    let r2 = r * r;
    let xp = [x1, r * x1, r2 * x1, -x4];
    let h = [1.0, 1.0, 1.0, -1.0];
    let q: C64 = (0..4).map(|i| h[i] * xp[i] * xp[i]).sum();
    DMatrix::from_fn(4, 4, |i, j| {
        let diag = if i == j { C64::new(h[i], 0.0) } else { C64::new(0.0, 0.0) };
        -r2 * (diag + (r2 - 1.0) * xp[i] * xp[j] / q)
    })
}

/// Build τ̂ˢ, the Fay–Accola form τ̂ᶜ, the genus-2 quotient and the elliptic moduli.
pub fn build_period_matrices(cd: &CurveData) -> Result<PeriodData> {
    if cd.hermitian_form() >= 0.0 {
        return Err(Error::NotPositive(format!(
            "x̄ᵀHx = {} is not negative",
            cd.hermitian_form()
        )));
    }
    let (x1, x4) = cd.normalized_periods();
    let den = 3.0 * x1 * x1 - x4 * x4;
    if den.norm() < 1e-12 * x4.norm_sqr() {
        return Err(Error::Degenerate(format!("|3x1² − x4²| = {:e}", den.norm())));
    }
    let tau_s = RiemannPeriodMatrix::new(tau_s_matrix(x1, x4))
        .map_err(|e| Error::NotPositive(e.to_string()))?;

    let r = rho();
    let one2r = 1.0 + 2.0 * r;
    let a = -(6.0 * x1 * x1 - x4 * x4 + r * (3.0 * x1 * x1 + x4 * x4)) / den;
    let b = one2r * x1 * x4 / den;
    let c = (2.0 * x1 * x1 - x4 * x4 + r * (x1 * x1 - x4 * x4)) / den;
    let d = -one2r * x1 * x1 / den;
    let tau_c = RiemannPeriodMatrix::new(fay_accola_pattern(a, b, c, d))?;

    let moved = symplectic::to_fay_accola_basis().act_on_period(&tau_s)?;
    let transport_residual = max_abs_diff(moved.matrix(), tau_c.matrix());

    let tau_g2 = RiemannPeriodMatrix::new(DMatrix::from_row_slice(2, 2, &[a / 3.0, b, b, c + 2.0 * d]))?;
    let modulus = cd.index.modulus();
    let tau11 = 1.0 - 1.0 / (modulus - 2.0);
    let tau22 = modulus / 12.0 - 0.5;
    let reduced = symplectic::humbert_reduction().act_on_period(&tau_g2)?;
    let target = DMatrix::from_row_slice(2, 2, &[tau11, C64::new(0.5, 0.0), C64::new(0.5, 0.0), tau22]);
    let humbert_residual = max_abs_diff(reduced.matrix(), &target);

    Ok(PeriodData {
        tau_s,
        a,
        b,
        c,
        d,
        tau_c,
        tau_g2,
        tau11,
        tau22,
        modulus,
        transport_residual,
        humbert_residual,
    })
}

/// Winding vector, Riemann-constant vector and their genus-2 and reduced images.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MonopoleVectors {
    pub u_hat: [C64; 4],
    pub k_tilde: [C64; 4],
    pub u_star: [C64; 2],
    pub k_star: [C64; 2],
    pub l_star: [C64; 2],
    pub u_prime: [C64; 2],
    pub l_prime: [C64; 2],
    pub k_prime: [C64; 2],
    /// (n̂, 𝔪̂) with 2Û = n̂ + 𝔪̂τ̂ᶜ.
    pub lattice: [i64; 8],
    pub lattice_residual: f64,
    /// |Û − Ûˢ(A+Bτ̂ˢ)⁻¹| from transporting the s-basis vector.
    pub transport_residual: f64,
    /// |(U′, l′, K′) transported − closed forms in 𝒯|.
    pub reduced_residual: f64,
}

/// Û from the closed forms, checked against the lattice and against transport.
pub fn build_vectors(cd: &CurveData, pd: &PeriodData) -> Result<MonopoleVectors> {
    let (m, n) = (cd.index.m, cd.index.n);
    let (x1, x4) = cd.normalized_periods();
    let c0 = cd.c0 as f64;
    let den = 3.0 * x1 * x1 - x4 * x4;
    let u0 = -c0 * x4 / den;
    let u1 = c0 * x1 / den;
    let u_hat = [u0, u1, u1, u1];

    let lattice = [5 * n - m, n, n, n, 3 * n, -m, -m, -m];
    let tc = pd.tau_c.matrix();
    let mut lattice_residual: f64 = 0.0;
    for j in 0..4 {
        let mut v = 2.0 * u_hat[j] - lattice[j] as f64;
        for i in 0..4 {
            v -= lattice[4 + i] as f64 * tc[(i, j)];
        }
        lattice_residual = lattice_residual.max(v.norm());
    }
    if lattice_residual > 1e-8 {
        return Err(Error::Convention(lattice_residual));
    }

    // Second route: the s-basis vector carried across by (A+Bτ̂ˢ)⁻¹.
    let r = rho();
    let x42 = x4 * x4;
    let us = DMatrix::from_row_slice(1, 4, &[-c0 * x1 / x42, -c0 * r * x1 / x42, -c0 * r * r * x1 / x42, c0 / x4]);
    let fac = symplectic::to_fay_accola_basis().period_factor(pd.tau_s.matrix());
    let carried = us * checked_inverse(&fac)?;
    let transport_residual = (0..4).map(|j| (carried[(0, j)] - u_hat[j]).norm()).fold(0.0, f64::max);

    let half = C64::new(0.5, 0.0);
    let mut k_tilde = [half; 4];
    for (j, k) in k_tilde.iter_mut().enumerate() {
        for i in 0..4 {
            *k += 0.5 * tc[(i, j)];
        }
    }
    let u_star = [u0 / 3.0, u1];
    let k_star = [k_tilde[0] / 3.0, k_tilde[1]];
    let l_star = [C64::new(1.0 / 3.0, 0.0), C64::new(0.0, 0.0)];

    let hr = symplectic::humbert_reduction();
    let fac2 = checked_inverse(&hr.period_factor(pd.tau_g2.matrix()))?;
    let apply = |v: &[C64; 2]| -> [C64; 2] {
        let row = DMatrix::from_row_slice(1, 2, v) * &fac2;
        [row[(0, 0)], row[(0, 1)]]
    };
    let u_prime = apply(&u_star);
    let l_prime = apply(&l_star);
    let reduced = hr.act_on_period(&pd.tau_g2)?;
    let k_base = apply(&k_star);
    let (cd_diag, ab_diag) = half_diagonals(&hr);
    let tr = reduced.matrix();
    let mut k_prime = [C64::new(0.0, 0.0); 2];
    for j in 0..2 {
        k_prime[j] = k_base[j] + 0.5 * cd_diag[j] as f64;
        for i in 0..2 {
            k_prime[j] += 0.5 * ab_diag[i] as f64 * tr[(i, j)];
        }
    }

    let t = pd.modulus;
    let s3 = 3f64.sqrt();
    let u_closed = [
        (-1.0 + I * s3) * c0 * t / (36.0 * (t - 2.0)),
        -(3.0 + I * s3) * c0 * t / 216.0,
    ];
    let l_closed = [-(t - 3.0) / (3.0 * (t - 2.0)), C64::new(1.0 / 6.0, 0.0)];
    let k_closed = [4.0 / 3.0 - 1.0 / (3.0 * (t - 2.0)), t / 12.0 - 1.0 / 6.0];
    let mut reduced_residual: f64 = 0.0;
    for j in 0..2 {
        reduced_residual = reduced_residual
            .max((u_prime[j] - u_closed[j]).norm())
            .max((l_prime[j] - l_closed[j]).norm())
            .max((k_prime[j] - k_closed[j]).norm());
    }

    Ok(MonopoleVectors {
        u_hat,
        k_tilde,
        u_star,
        k_star,
        l_star,
        u_prime,
        l_prime,
        k_prime,
        lattice,
        lattice_residual,
        transport_residual,
        reduced_residual,
    })
}

/// diag(CDᵀ) and diag(ABᵀ).
fn half_diagonals(m: &symplectic::IntegerSymplectic) -> (Vec<i64>, Vec<i64>) {
    let (a, b, c, d) = (m.a(), m.b(), m.c(), m.d());
    let g = m.genus();
    let dot = |x: &[i64], y: &[i64]| x.iter().zip(y).map(|(p, q)| p * q).sum::<i64>();
    (
        (0..g).map(|i| dot(&c[i], &d[i])).collect(),
        (0..g).map(|i| dot(&a[i], &b[i])).collect(),
    )
}

/// θ(3z₀, z₁, z₁, z₁ | τ̂ᶜ) / ∏ₖ θ[(0,0),(k/3,0)](z₀, z₁ | τ_g2).
pub fn fay_accola_ratio(pd: &PeriodData, z: [C64; 2], tol: f64) -> Result<C64> {
    let num = riemann_theta_scaled(&[3.0 * z[0], z[1], z[1], z[1]], &pd.tau_c, &ThetaCharacteristic::zero(4), tol)?;
    let mut mant = num.mantissa;
    let mut log = num.log_scale;
    for k in 0..3 {
        let ch = ThetaCharacteristic::from_pairs(&[(0, 1), (0, 1)], &[(k, 3), (0, 1)])?;
        let f = riemann_theta_scaled(&z, &pd.tau_g2, &ch, tol)?;
        if f.mantissa.norm() < 1e-10 {
            return Err(Error::DivisorCollision);
        }
        mant /= f.mantissa;
        log -= f.log_scale;
    }
    Ok(mant * log.exp())
}

/// ϑ₃(0|τ) and ϑ₃(0|τ) − ϑ₃(0|3τ) for purely imaginary τ, as series in the
/// real nome q = e^{iπτ}. The difference is summed termwise so it keeps full
/// relative precision when both thetas are 1 to within rounding.
fn theta3_and_gap(q: f64) -> (f64, f64) {
    let (mut th, mut gap) = (1.0, 0.0);
    for n in 1..64i32 {
        let a = q.powi(n * n);
        if a == 0.0 {
            break;
        }
        th += 2.0 * a;
        gap += 2.0 * a * (1.0 - q.powi(2 * n * n));
        if a < 1e-18 * th {
            break;
        }
    }
    (th, gap)
}

/// p = 3ϑ₃²(0|𝒯/2)/ϑ₃²(0|𝒯/6) together with p − 1 and 3 − p.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RamanujanP {
    pub p: f64,
    pub p_minus_1: f64,
    pub three_minus_p: f64,
}

/// Both gaps come from the same theta constants: 3 − p directly at 𝒯/6, and
/// p − 1 after τ ↦ −1/τ, where p = ϑ₃²(0|τ′)/ϑ₃²(0|3τ′) with τ′ = −2/𝒯.
pub fn ramanujan_p_parts(idx: MonopoleIndex) -> RamanujanP {
    let im_t = idx.modulus().im;
    let (a, gap) = theta3_and_gap((-PI * im_t / 6.0).exp());
    let b = a - gap;
    let three_minus_p = 3.0 * gap * (a + b) / (a * a);
    let (a2, gap2) = theta3_and_gap((-2.0 * PI / im_t).exp());
    let b2 = a2 - gap2;
    let p_minus_1 = gap2 * (a2 + b2) / (b2 * b2);
    let p = if p_minus_1 < three_minus_p { 1.0 + p_minus_1 } else { 3.0 - three_minus_p };
    RamanujanP { p, p_minus_1, three_minus_p }
}

/// p evaluated with the general Jacobi theta routine.
pub fn ramanujan_p(idx: MonopoleIndex) -> Result<f64> {
    let t = idx.modulus();
    let t2 = UpperHalfPlanePoint::new(t / 2.0)?;
    let t6 = UpperHalfPlanePoint::new(t / 6.0)?;
    let a = jacobi_theta(3, C64::new(0.0, 0.0), &t2, THETA_TOL)?;
    let b = jacobi_theta(3, C64::new(0.0, 0.0), &t6, THETA_TOL)?;
    Ok((3.0 * a * a / (b * b)).re)
}

/// b as a rational function of p: √3(p⁶ − 45p⁴ + 135p² − 27)/(9p(p⁴ − 10p² + 9)).
pub fn b_from_p(p: f64) -> f64 {
    b_from_parts(&RamanujanP { p, p_minus_1: p - 1.0, three_minus_p: 3.0 - p })
}

/// Same rational function with p⁴ − 10p² + 9 = −(p−1)(p+1)(3−p)(p+3) built from the gaps.
pub fn b_from_parts(r: &RamanujanP) -> f64 {
    let p = r.p;
    let p2 = p * p;
    let num = p2 * p2 * p2 - 45.0 * p2 * p2 + 135.0 * p2 - 27.0;
    let den = -9.0 * p * r.p_minus_1 * (p + 1.0) * r.three_minus_p * (p + 3.0);
    3f64.sqrt() * num / den
}

/// b computed from theta constants at 𝒯 only.
pub fn b_via_theta_constants(idx: MonopoleIndex) -> Result<f64> {
    let r = ramanujan_p_parts(idx);
    if r.p_minus_1 == 0.0 || r.three_minus_p == 0.0 {
        return Err(Error::Degenerate(format!("p = {} sits on a pole of b(p)", r.p)));
    }
    Ok(b_from_parts(&r))
}

/// Moduli of the two elliptic quotients, three ways.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct JacobiModuli {
    pub p: f64,
    /// From M = K/L with the branch fixed by M = (p + i√3)/(p − i√3).
    pub algebraic: (f64, f64),
    /// ϑ₂⁴/ϑ₃⁴ at 𝒯/6 and 𝒯/2.
    pub theta: (f64, f64),
    /// (p+1)³(3−p)/(16p) and (p+1)(3−p)³/(16p³).
    pub ramanujan: (f64, f64),
    /// Largest imaginary part left in the algebraic form.
    pub algebraic_imag: f64,
}

/// M = K/L for the curve parameter b.
///
/// The cube root is ρ·((−2i − b)^{1/3}) with the principal root, which equals
/// (p + i√3)/(p − i√3); the principal root of (2i − b) is not the right sheet.
pub fn covering_m(b: f64) -> C64 {
    let k = rho() * C64::new(-b, -2.0).powf(1.0 / 3.0);
    let l = (b * b + 4.0).powf(1.0 / 6.0);
    k / l
}

pub fn jacobi_moduli(idx: MonopoleIndex) -> Result<JacobiModuli> {
    let cd = solve_curve(idx)?;
    let m = covering_m(cd.b);
    let r = rho();
    let kpm = |s: f64| -> C64 { -r * (r * m + s) * (r * m - s).powi(3) / ((m + s) * (m - s).powi(3)) };
    let kp = kpm(1.0);
    let km = kpm(-1.0);

    let t = idx.modulus();
    let ratio4 = |tau: C64| -> Result<f64> {
        let q = UpperHalfPlanePoint::new(tau)?;
        let z = C64::new(0.0, 0.0);
        let v = jacobi_theta(2, z, &q, THETA_TOL)? / jacobi_theta(3, z, &q, THETA_TOL)?;
        Ok(v.powi(4).re)
    };
    let p = ramanujan_p_parts(idx).p;
    Ok(JacobiModuli {
        p,
        algebraic: (kp.re, km.re),
        theta: (ratio4(t / 6.0)?, ratio4(t / 2.0)?),
        ramanujan: (
            (p + 1.0).powi(3) * (3.0 - p) / (16.0 * p),
            (p + 1.0) * (3.0 - p).powi(3) / (16.0 * p.powi(3)),
        ),
        algebraic_imag: kp.im.abs().max(km.im.abs()),
    })
}

/// Everything the pipeline produces for one index.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Pipeline {
    pub curve: CurveData,
    pub periods: PeriodData,
    pub vectors: MonopoleVectors,
}

pub fn run_pipeline(idx: MonopoleIndex) -> Result<Pipeline> {
    let curve = solve_curve(idx)?;
    let periods = build_period_matrices(&curve)?;
    let vectors = build_vectors(&curve, &periods)?;
    Ok(Pipeline {
        curve,
        periods,
        vectors,
    })
}
