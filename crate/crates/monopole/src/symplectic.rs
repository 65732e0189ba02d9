//! Integer symplectic matrices acting on period matrices and on theta
//! characteristics, plus the fixed transformations used by the pipeline.
//!
//! Two actions of M = [[A, B], [C, D]] appear:
//! - [`IntegerSymplectic::act_on_period`]: τ ↦ (C + Dτ)(A + Bτ)⁻¹, the change of
//!   homology basis used when moving period data between bases. Row vectors
//!   of b-periods move as U ↦ U(A + Bτ)⁻¹.
//! - [`IntegerSymplectic::moebius`]: τ ↦ (Aτ + B)(Cτ + D)⁻¹, the action under
//!   which [`IntegerSymplectic::act_on_characteristic`] is the Igusa rule.

use nalgebra::DMatrix;
use num_rational::Rational64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::theta::{RiemannPeriodMatrix, ThetaCharacteristic, C64};

/// A 2g×2g integer matrix M with M J Mᵀ = J.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerSymplectic {
    g: usize,
    m: Vec<Vec<i64>>,
}

fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Result<Vec<Vec<i64>>> {
    let n = a.len();
    let k = b.len();
    let p = b.first().map_or(0, |r| r.len());
    let mut out = vec![vec![0i64; p]; n];
    for i in 0..n {
        for j in 0..p {
            let mut acc: i128 = 0;
            for l in 0..k {
                acc += a[i][l] as i128 * b[l][j] as i128;
            }
            out[i][j] = i64::try_from(acc)
                .map_err(|_| Error::Domain("integer overflow in matrix product".into()))?;
        }
    }
    Ok(out)
}

fn transpose(a: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    let p = a.first().map_or(0, |r| r.len());
    (0..p).map(|j| (0..n).map(|i| a[i][j]).collect()).collect()
}

fn standard_form(g: usize) -> Vec<Vec<i64>> {
    let mut j = vec![vec![0i64; 2 * g]; 2 * g];
    for i in 0..g {
        j[i][g + i] = 1;
        j[g + i][i] = -1;
    }
    j
}

/// True iff M J Mᵀ = J exactly.
pub fn is_symplectic(m: &[Vec<i64>]) -> Result<bool> {
    let n = m.len();
    if n == 0 || n % 2 == 1 || m.iter().any(|r| r.len() != n) {
        return Err(Error::Shape(format!("need an even square matrix, got {n} rows")));
    }
    let j = standard_form(n / 2);
    Ok(mat_mul(&mat_mul(m, &j)?, &transpose(m))? == j)
}

impl IntegerSymplectic {
    pub fn new(rows: Vec<Vec<i64>>) -> Result<Self> {
        if !is_symplectic(&rows)? {
            return Err(Error::Domain("matrix is not symplectic".into()));
        }
        Ok(Self {
            g: rows.len() / 2,
            m: rows,
        })
    }

    pub fn identity(g: usize) -> Self {
        let m = (0..2 * g)
            .map(|i| (0..2 * g).map(|j| i64::from(i == j)).collect())
            .collect();
        Self { g, m }
    }

    /// Block-diagonal diag(P, P) for a permutation matrix P (P⁻ᵀ = P).
    pub fn from_permutation(p: &[Vec<i64>]) -> Result<Self> {
        let g = p.len();
        let mut m = vec![vec![0i64; 2 * g]; 2 * g];
        for i in 0..g {
            for j in 0..g {
                m[i][j] = p[i][j];
                m[g + i][g + j] = p[i][j];
            }
        }
        Self::new(m)
    }

    pub fn genus(&self) -> usize {
        self.g
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.m
    }

    fn block(&self, bi: usize, bj: usize) -> Vec<Vec<i64>> {
        let g = self.g;
        (0..g)
            .map(|i| (0..g).map(|j| self.m[bi * g + i][bj * g + j]).collect())
            .collect()
    }

    pub fn a(&self) -> Vec<Vec<i64>> {
        self.block(0, 0)
    }
    pub fn b(&self) -> Vec<Vec<i64>> {
        self.block(0, 1)
    }
    pub fn c(&self) -> Vec<Vec<i64>> {
        self.block(1, 0)
    }
    pub fn d(&self) -> Vec<Vec<i64>> {
        self.block(1, 1)
    }

    /// Matrix product self · other.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.g != other.g {
            return Err(Error::Shape("genus mismatch in composition".into()));
        }
        Self::new(mat_mul(&self.m, &other.m)?)
    }

    /// M⁻¹ = −J Mᵀ J.
    pub fn inverse(&self) -> Self {
        let j = standard_form(self.g);
        let mt = transpose(&self.m);
        let inv = mat_mul(&mat_mul(&j, &mt).expect("bounded"), &j).expect("bounded");
        let m = inv.into_iter().map(|r| r.into_iter().map(|x| -x).collect()).collect();
        Self { g: self.g, m }
    }

    fn cblock(&self, bi: usize, bj: usize) -> DMatrix<C64> {
        let g = self.g;
        DMatrix::from_fn(g, g, |i, j| C64::new(self.m[bi * g + i][bj * g + j] as f64, 0.0))
    }

    /// A + Bτ, the factor moving row vectors of b-periods.
    pub fn period_factor(&self, tau: &DMatrix<C64>) -> DMatrix<C64> {
        self.cblock(0, 0) + self.cblock(0, 1) * tau
    }

    /// τ ↦ (C + Dτ)(A + Bτ)⁻¹.
    pub fn act_on_period(&self, tau: &RiemannPeriodMatrix) -> Result<RiemannPeriodMatrix> {
        let t = tau.matrix();
        let den = self.period_factor(t);
        let inv = checked_inverse(&den)?;
        let out = (self.cblock(1, 0) + self.cblock(1, 1) * t) * inv;
        RiemannPeriodMatrix::new(out)
    }

    /// τ ↦ (Aτ + B)(Cτ + D)⁻¹.
    pub fn moebius(&self, tau: &RiemannPeriodMatrix) -> Result<RiemannPeriodMatrix> {
        let t = tau.matrix();
        let den = self.cblock(1, 0) * t + self.cblock(1, 1);
        let inv = checked_inverse(&den)?;
        let out = (self.cblock(0, 0) * t + self.cblock(0, 1)) * inv;
        RiemannPeriodMatrix::new(out)
    }

    /// Cτ + D, the automorphy factor of [`Self::moebius`].
    pub fn moebius_factor(&self, tau: &DMatrix<C64>) -> DMatrix<C64> {
        self.cblock(1, 0) * tau + self.cblock(1, 1)
    }

    /// Igusa action 𝔤·(a,b) = (a,b)𝔤⁻¹ + ½(diag(CDᵀ), diag(ABᵀ)) and the phase
    /// φ_{a,b}(𝔤) as an exact rational (multiple of 2π).
    pub fn act_on_characteristic(&self, ch: &ThetaCharacteristic) -> Result<(ThetaCharacteristic, Rational64)> {
        let g = self.g;
        if ch.genus() != g {
            return Err(Error::Shape(format!("genus {} characteristic for genus {g} matrix", ch.genus())));
        }
        let inv = self.inverse();
        let row: Vec<Rational64> = ch.a.iter().chain(&ch.b).cloned().collect();
        let mut out = vec![Rational64::zero(); 2 * g];
        for (j, o) in out.iter_mut().enumerate() {
            for (i, r) in row.iter().enumerate() {
                *o += r * inv.m[i][j];
            }
        }
        let (a, b, c, d) = (self.a(), self.b(), self.c(), self.d());
        let cd = mat_mul(&c, &transpose(&d))?;
        let ab = mat_mul(&a, &transpose(&b))?;
        let half = Rational64::new(1, 2);
        for i in 0..g {
            out[i] += half * cd[i][i];
            out[g + i] += half * ab[i][i];
        }

        // φ = −½(a Dᵀ B aᵀ − 2 a Bᵀ C bᵀ + b Cᵀ A bᵀ) + ½(a Dᵀ − b Cᵀ)·diag(A Bᵀ)
        let quad = |x: &[Rational64], m: &[Vec<i64>], y: &[Rational64]| -> Rational64 {
            let mut acc = Rational64::zero();
            for i in 0..g {
                for j in 0..g {
                    acc += x[i] * m[i][j] * y[j];
                }
            }
            acc
        };
        let dtb = mat_mul(&transpose(&d), &b)?;
        let btc = mat_mul(&transpose(&b), &c)?;
        let cta = mat_mul(&transpose(&c), &a)?;
        let mut phi = -half * (quad(&ch.a, &dtb, &ch.a) - Rational64::from(2) * quad(&ch.a, &btc, &ch.b) + quad(&ch.b, &cta, &ch.b));
        for k in 0..g {
            let mut v = Rational64::zero();
            for i in 0..g {
                v += ch.a[i] * d[k][i] - ch.b[i] * c[k][i];
            }
            phi += half * v * ab[k][k];
        }
        let ch_out = ThetaCharacteristic::new(out[..g].to_vec(), out[g..].to_vec())?;
        Ok((ch_out, phi))
    }
}

/// Inverse with a condition-number guard.
pub fn checked_inverse(m: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    let inv = m
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Conditioning("singular matrix".into()))?;
    let norm = |x: &DMatrix<C64>| x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let cond = norm(m) * norm(&inv);
    if !cond.is_finite() || cond > 1e12 {
        return Err(Error::Conditioning(format!("condition number {cond:e}")));
    }
    Ok(inv)
}

/// Change of homology basis to the cyclic basis of the genus-4 curve.
pub fn cyclic_basis() -> IntegerSymplectic {
    IntegerSymplectic::new(cyclic_basis_rows()).expect("table is symplectic")
}

pub fn cyclic_basis_rows() -> Vec<Vec<i64>> {
    vec![
        vec![1, 0, 0, 0, 0, 0, 0, 0],
        vec![0, -1, 0, 0, 0, 1, 0, 0],
        vec![0, 0, 0, 0, 0, 0, -1, 0],
        vec![0, 0, 0, 1, 0, 0, 0, 0],
        vec![0, 0, 0, 0, 1, 0, 0, 0],
        vec![0, -1, 0, 0, 0, 0, 0, 0],
        vec![0, 0, 1, 0, 0, 0, -1, 0],
        vec![0, 0, 0, -1, 0, 0, 0, 1],
    ]
}

/// Cyclic permutation putting the distinguished cycle first.
pub fn reorder_permutation() -> Vec<Vec<i64>> {
    vec![vec![0, 0, 0, 1], vec![1, 0, 0, 0], vec![0, 1, 0, 0], vec![0, 0, 1, 0]]
}

/// Reorder ∘ cyclic basis: takes τ̂ˢ to the Fay–Accola form τ̂ᶜ.
pub fn to_fay_accola_basis() -> IntegerSymplectic {
    let s = IntegerSymplectic::from_permutation(&reorder_permutation()).expect("permutation");
    s.compose(&cyclic_basis()).expect("genus 4")
}

/// Genus-2 reduction bringing the quotient period matrix to off-diagonal 1/2.
pub fn humbert_reduction() -> IntegerSymplectic {
    IntegerSymplectic::new(vec![
        vec![0, 1, 1, 0],
        vec![1, 1, 0, 1],
        vec![0, 1, 0, 1],
        vec![0, 0, 1, 0],
    ])
    .expect("table is symplectic")
}

/// λ₁ ↦ λ₁/(1 − 4λ₁) on [[λ₁, ½], [½, λ₂]].
pub fn gamma2_s() -> IntegerSymplectic {
    IntegerSymplectic::new(vec![
        vec![1, 2, -4, 0],
        vec![0, 1, 0, 0],
        vec![0, 0, 1, 0],
        vec![0, 1, -2, 1],
    ])
    .expect("table is symplectic")
}

/// λ₁ ↦ λ₁ + 1 on [[λ₁, ½], [½, λ₂]].
pub fn gamma2_t() -> IntegerSymplectic {
    IntegerSymplectic::new(vec![
        vec![1, 0, 0, 0],
        vec![0, 1, 0, 0],
        vec![1, 0, 1, 0],
        vec![0, 0, 0, 1],
    ])
    .expect("table is symplectic")
}

/// Exchange λ₁ ↔ λ₂.
pub fn gamma2_swap() -> IntegerSymplectic {
    IntegerSymplectic::from_permutation(&[vec![0, 1], vec![1, 0]]).expect("permutation")
}

/// The transformation sending [[τ̃₁₁, ½], [½, τ̃₂₂]] to Bolza form:
/// s²t⁻¹ on the first modulus and t on the second.
pub fn bolza_transform() -> IntegerSymplectic {
    let s = gamma2_s();
    let t = gamma2_t();
    let w = gamma2_swap();
    let t2 = w.compose(&t).and_then(|x| x.compose(&w)).expect("genus 2");
    let first = s.compose(&s).and_then(|x| x.compose(&t.inverse())).expect("genus 2");
    t2.compose(&first).expect("genus 2")
}

/// Every hard-coded table by name, for self-checks.
pub fn named_tables() -> Vec<(&'static str, Vec<Vec<i64>>)> {
    vec![
        ("cyclic_basis", cyclic_basis_rows()),
        ("fay_accola_basis", to_fay_accola_basis().rows().to_vec()),
        ("humbert_reduction", humbert_reduction().rows().to_vec()),
        ("gamma2_s", gamma2_s().rows().to_vec()),
        ("gamma2_t", gamma2_t().rows().to_vec()),
        ("gamma2_swap", gamma2_swap().rows().to_vec()),
    ]
}
