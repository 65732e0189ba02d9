//! Zeros of the three elliptic functions h₋₁, h₀, h₁ along y(λ) = λ(n+m)ρ/3,
//! the identities they rest on, and the monopole verdict.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::{rho, MonopoleIndex, MonopoleVectors, PeriodData};
use crate::error::{Error, Result};
use crate::theta::{jacobi_theta_in, riemann_theta_scaled, Convention, Scaled, ThetaCharacteristic, UpperHalfPlanePoint, C64};

const PI: f64 = std::f64::consts::PI;
const I: C64 = C64::new(0.0, 1.0);
/// Truncation tolerance of every Jacobi theta sum in this module.
const TOL: f64 = 1e-15;

/// Reduce k into {−1, 0, 1}.
pub fn reduce_k(k: i64) -> i64 {
    (k + 1).rem_euclid(3) - 1
}

fn scaled_ratio(conv: Convention, num: u8, den: u8, z: C64, tau: &UpperHalfPlanePoint) -> Result<C64> {
    let a = jacobi_theta_in(conv, num, z, tau, TOL)?;
    let b = jacobi_theta_in(conv, den, z, tau, TOL)?;
    if b.mantissa.norm() < 1e3 * TOL {
        return Err(Error::Pole(b.mantissa.norm()));
    }
    Ok(a.mantissa / b.mantissa * (a.log_scale - b.log_scale).exp())
}

/// The modulus 𝒯 and the bits of the index the h_k need.
#[derive(Debug, Clone, Copy)]
pub struct EllipticContext {
    modulus: UpperHalfPlanePoint,
    third: UpperHalfPlanePoint,
    n_plus_m: i64,
    m_odd: bool,
}

/// The two pieces of h_k: A/B + s·C/D with A = ϑ₃, B = ϑ₂ at i√3y + k𝒯/3 (modulus 𝒯)
/// and C = ϑ₂, D = ϑ₃ at y + k/3 (modulus 𝒯/3), s = (−1)^k.
#[derive(Debug, Clone, Copy)]
pub struct HkParts {
    pub a: Scaled,
    pub b: Scaled,
    pub c: Scaled,
    pub d: Scaled,
    pub sign: f64,
}

impl HkParts {
    fn ratio(x: &Scaled, y: &Scaled) -> Result<C64> {
        if y.mantissa.norm() < 1e3 * TOL {
            return Err(Error::Pole(y.mantissa.norm()));
        }
        Ok(x.mantissa / y.mantissa * (x.log_scale - y.log_scale).exp())
    }

    pub fn h(&self) -> Result<C64> {
        Ok(Self::ratio(&self.a, &self.b)? + self.sign * Self::ratio(&self.c, &self.d)?)
    }

    pub fn g(&self) -> Result<C64> {
        Ok(Self::ratio(&self.b, &self.a)? + self.sign * Self::ratio(&self.d, &self.c)?)
    }

    /// Smallest normalized denominator magnitude, |B| and |D|.
    pub fn denominator_floor(&self) -> f64 {
        self.b.mantissa.norm().min(self.d.mantissa.norm())
    }
}

impl EllipticContext {
    pub fn from_index(idx: MonopoleIndex) -> Result<Self> {
        Self::new(idx.modulus(), idx.n() + idx.m(), idx.m().rem_euclid(2) == 1)
    }

    /// A context for an arbitrary modulus, e.g. 𝒯 = −2i√3/ℛ for real ℛ < 0.
    pub fn new(modulus: C64, n_plus_m: i64, m_odd: bool) -> Result<Self> {
        Ok(Self {
            modulus: UpperHalfPlanePoint::new(modulus)?,
            third: UpperHalfPlanePoint::new(modulus / 3.0)?,
            n_plus_m,
            m_odd,
        })
    }

    /// 𝒯 = −2i√3/ℛ, i.e. 2i√3/|ℛ|.
    pub fn from_ratio_abs(r_abs: f64) -> Result<Self> {
        if !(r_abs > 0.0) {
            return Err(Error::Domain(format!("|R| must be positive, got {r_abs}")));
        }
        Self::new(I * (2.0 * 3f64.sqrt() / r_abs), 1, false)
    }

    pub fn modulus(&self) -> C64 {
        self.modulus.tau()
    }

    pub fn n_plus_m(&self) -> i64 {
        self.n_plus_m
    }

    /// dy/dλ = (n+m)ρ/3.
    pub fn dy_dlambda(&self) -> C64 {
        rho() * (self.n_plus_m as f64 / 3.0)
    }

    pub fn y(&self, lambda: f64) -> C64 {
        self.dy_dlambda() * lambda
    }

    pub fn parts(&self, y: C64, k: i64) -> Result<HkParts> {
        let k = reduce_k(k);
        let t = self.modulus.tau();
        let z1 = I * 3f64.sqrt() * y + k as f64 * t / 3.0;
        let z2 = y + k as f64 / 3.0;
        let conv = Convention::Standard;
        Ok(HkParts {
            a: jacobi_theta_in(conv, 3, z1, &self.modulus, TOL)?,
            b: jacobi_theta_in(conv, 2, z1, &self.modulus, TOL)?,
            c: jacobi_theta_in(conv, 2, z2, &self.third, TOL)?,
            d: jacobi_theta_in(conv, 3, z2, &self.third, TOL)?,
            sign: if k == 0 { 1.0 } else { -1.0 },
        })
    }

    /// h_k(y) = (ϑ₃/ϑ₂)(i√3y + k𝒯/3 | 𝒯) + (−1)^k (ϑ₂/ϑ₃)(y + k/3 | 𝒯/3).
    pub fn h(&self, y: C64, k: i64) -> Result<C64> {
        self.parts(y, k)?.h()
    }

    /// g_k: both ratios of h_k inverted. Same zeros as h_k away from the poles.
    pub fn g(&self, y: C64, k: i64) -> Result<C64> {
        self.parts(y, k)?.g()
    }

    /// H(y) = h₋₁(y) h₀(y) h₁(y).
    pub fn big_h(&self, y: C64) -> Result<C64> {
        Ok(self.h(y, -1)? * self.h(y, 0)? * self.h(y, 1)?)
    }

    /// |h_k(y(λ))|, with poles mapped to +∞ so they never look like minima.
    fn abs_h_line(&self, lambda: f64, k: i64) -> f64 {
        match self.h(self.y(lambda), k) {
            Ok(v) => v.norm(),
            Err(_) => f64::INFINITY,
        }
    }
}

/// θ(λU* + K* + k l* | τ_g2), normalized by its Gaussian envelope.
pub fn f_k(pd: &PeriodData, vec: &MonopoleVectors, lambda: f64, k: i64, tol: f64) -> Result<Scaled> {
    let k = reduce_k(k) as f64;
    let z: Vec<C64> = (0..2)
        .map(|j| lambda * vec.u_star[j] + vec.k_star[j] + k * vec.l_star[j])
        .collect();
    riemann_theta_scaled(&z, &pd.tau_g2, &ThetaCharacteristic::zero(2), tol)
}

/// θ(λÛ + sign·K̃ | τ̂ᶜ), normalized by its Gaussian envelope.
pub fn genus4_line(pd: &PeriodData, vec: &MonopoleVectors, lambda: f64, sign: f64, tol: f64) -> Result<Scaled> {
    let z: Vec<C64> = (0..4).map(|j| lambda * vec.u_hat[j] + sign * vec.k_tilde[j]).collect();
    riemann_theta_scaled(&z, &pd.tau_c, &ThetaCharacteristic::zero(4), tol)
}

/// Residuals of the two identities at τ and of the chain of equalities they imply.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct IdentityReport {
    pub tau: C64,
    /// (ϑ₃/ϑ₂)(τ/3|τ) − (ϑ₂/ϑ₃)(1/3|τ/3).
    pub relation: f64,
    /// ϑ₄²(0|τ) i√3 (ϑ₁ϑ₄/ϑ₂²)(τ/3|τ) + ϑ₄²(0|τ/3)(ϑ₁ϑ₄/ϑ₃²)(1/3|τ/3).
    pub derivative: f64,
    /// Largest deviation among the ±τ/3, 2τ/3 and −(ϑ₂/ϑ₃)(2/3|τ/3) forms.
    pub chain: f64,
}

impl IdentityReport {
    pub fn max_residual(&self) -> f64 {
        self.relation.max(self.derivative).max(self.chain)
    }
}

fn rel_diff(a: C64, b: C64) -> f64 {
    (a - b).norm() / 1f64.max(a.norm()).max(b.norm())
}

pub fn verify_identities(tau: &UpperHalfPlanePoint, conv: Convention) -> Result<IdentityReport> {
    let t = tau.tau();
    let t3 = UpperHalfPlanePoint::new(t / 3.0)?;
    let third = C64::new(1.0 / 3.0, 0.0);
    let th = |kind: u8, z: C64, q: &UpperHalfPlanePoint| -> Result<C64> { Ok(jacobi_theta_in(conv, kind, z, q, TOL)?.value()) };

    let lhs = scaled_ratio(conv, 3, 2, t / 3.0, tau)?;
    let rhs = scaled_ratio(conv, 2, 3, third, &t3)?;

    let zero = C64::new(0.0, 0.0);
    let d1 = th(4, zero, tau)?.powi(2) * I * 3f64.sqrt() * th(1, t / 3.0, tau)? * th(4, t / 3.0, tau)?
        / th(2, t / 3.0, tau)?.powi(2);
    let d2 = th(4, zero, &t3)?.powi(2) * th(1, third, &t3)? * th(4, third, &t3)? / th(3, third, &t3)?.powi(2);
    let derivative = (d1 + d2).norm() / 1f64.max(d1.norm());

    let minus = scaled_ratio(conv, 3, 2, -t / 3.0, tau)?;
    let twice = scaled_ratio(conv, 3, 2, 2.0 * t / 3.0, tau)?;
    let other = -scaled_ratio(conv, 2, 3, C64::new(2.0 / 3.0, 0.0), &t3)?;
    let chain = [minus, twice, rhs, other]
        .iter()
        .map(|&v| rel_diff(lhs, v))
        .fold(0.0, f64::max);

    Ok(IdentityReport {
        tau: t,
        relation: rel_diff(lhs, rhs),
        derivative,
        chain,
    })
}

/// Worst relative residual of each periodicity law over a set of random y.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PeriodicityReport {
    pub samples: usize,
    /// h_k(y + 2(n+m)/3) = h_{k−(n+m)}(y).
    pub real_shift: f64,
    /// h_k(y + 2(n+m)ρ/3) = (−1)^{n+m} h_{k−(n+m)}(y) for even m, (−1)^{n+m} g_{k−(n+m)}(y) for odd m.
    pub rho_shift: f64,
    /// h_k·ϑ₂ϑ₃ and g_k·ϑ₃ϑ₂ share the numerator H_k.
    pub h_g_numerator: f64,
    /// h_k(y + 2(n+m)) = h_k(y) and h_k(y + 4(n+m)ρ) = h_k(y).
    pub elliptic_periods: f64,
}

impl PeriodicityReport {
    pub fn max_residual(&self) -> f64 {
        self.real_shift
            .max(self.rho_shift)
            .max(self.h_g_numerator)
            .max(self.elliptic_periods)
    }
}

pub fn verify_periodicities(ctx: &EllipticContext, samples: usize, seed: u64) -> Result<PeriodicityReport> {
    let mut rng = StdRng::seed_from_u64(seed);
    let s = ctx.n_plus_m;
    let sf = s as f64;
    let sgn = if s.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let r = rho();
    let mut rep = PeriodicityReport {
        samples: 0,
        real_shift: 0.0,
        rho_shift: 0.0,
        h_g_numerator: 0.0,
        elliptic_periods: 0.0,
    };
    let mut tries = 0;
    while rep.samples < samples {
        tries += 1;
        if tries > 20 * samples + 100 {
            return Err(Error::Pole(0.0));
        }
        let y = C64::new(rng.gen_range(-0.4..0.4), rng.gen_range(-0.25..0.25));
        let step = || -> Result<[f64; 4]> {
            let mut w = [0.0f64; 4];
            for k in -1..=1 {
                let hk = ctx.h(y, k)?;
                w[0] = w[0].max(rel_diff(ctx.h(y + 2.0 * sf / 3.0, k)?, ctx.h(y, k - s)?));
                let target = if ctx.m_odd { ctx.g(y, k - s)? } else { ctx.h(y, k - s)? };
                w[1] = w[1].max(rel_diff(ctx.h(y + 2.0 * sf * r / 3.0, k)?, sgn * target));
                let p = ctx.parts(y, k)?;
                let via_h = hk * p.b.value() * p.d.value();
                let via_g = p.sign * p.g()? * p.a.value() * p.c.value();
                w[2] = w[2].max(rel_diff(via_h, via_g));
                w[3] = w[3]
                    .max(rel_diff(ctx.h(y + 2.0 * sf, k)?, hk))
                    .max(rel_diff(ctx.h(y + 4.0 * sf * r, k)?, hk));
            }
            Ok(w)
        };
        // A sample that lands on a pole is redrawn.
        let Ok(w) = step() else { continue };
        rep.real_shift = rep.real_shift.max(w[0]);
        rep.rho_shift = rep.rho_shift.max(w[1]);
        rep.h_g_numerator = rep.h_g_numerator.max(w[2]);
        rep.elliptic_periods = rep.elliptic_periods.max(w[3]);
        rep.samples += 1;
    }
    Ok(rep)
}

/// |(ϑ₃/ϑ₂)((|ℛ|+2)𝒯/6 | 𝒯) − (ϑ₂/ϑ₃)(|ℛ|𝒯/6 + 1/3 | 𝒯/3)| with 𝒯 = 2i√3/|ℛ|:
/// the condition h₋₁(2ρ/3) = 0.
pub fn mudots_residual(r_abs: f64) -> Result<f64> {
    let ctx = EllipticContext::from_ratio_abs(r_abs)?;
    let t = ctx.modulus();
    let conv = Convention::Standard;
    let lhs = scaled_ratio(conv, 3, 2, (r_abs + 2.0) / 6.0 * t, &ctx.modulus)?;
    let rhs = scaled_ratio(conv, 2, 3, r_abs / 6.0 * t + 1.0 / 3.0, &ctx.third)?;
    Ok((lhs - rhs).norm())
}

pub fn mudots_solutions(r_abs: f64) -> Result<bool> {
    Ok(mudots_residual(r_abs)? < 1e-8)
}

/// A located zero of h_k on the λ line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroRecord {
    pub lambda: f64,
    pub k: i64,
    /// |h_k(y(λ))| at the reported λ.
    pub residual: f64,
    /// Argument-principle count (zeros minus poles) on the confirmation circle.
    pub winding: i64,
    /// false when the candidate could not be confirmed or ruled out.
    pub confirmed: bool,
    /// min(|ϑ₂|, |ϑ₃|) of the two denominators, normalized.
    pub denominator_floor: f64,
    /// |h_k(ρ·y)| / median, reported only; None at a pole.
    pub rho_rotation: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderFit {
    pub slope: f64,
    pub order: i64,
}

impl OrderFit {
    fn from_slope(slope: f64) -> Self {
        Self {
            slope,
            order: slope.round() as i64,
        }
    }
}

/// Vanishing orders of h₋₁, h₀, h₁ and H at one endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EndpointOrders {
    pub h_minus: OrderFit,
    pub h_zero: OrderFit,
    pub h_plus: OrderFit,
    pub big_h: OrderFit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Monopole,
    NotMonopole,
    /// No zeros were found but the endpoint self-check failed, so the empty
    /// zero set cannot be trusted.
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Monopole => "monopole",
            Verdict::NotMonopole => "not monopole",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VanishingReport {
    pub index: MonopoleIndex,
    pub modulus: C64,
    pub grid: usize,
    pub tol: f64,
    /// Zeros on the open interval, confirmed ones and ambiguous ones alike.
    pub zeros: Vec<ZeroRecord>,
    /// Candidates whose nearest zero of h_k lies off the real-λ line.
    pub near_misses: usize,
    /// Candidates that converged onto the zeros at λ = 0 or 2.
    pub endpoint_hits: usize,
    pub at_zero: EndpointOrders,
    pub at_two: EndpointOrders,
    pub h0_at_origin: C64,
    /// Confirmed zeros counted with multiplicity.
    pub zero_count: usize,
    pub ambiguous: usize,
    pub conjecture_count: usize,
    pub matches_conjecture: bool,
    pub low_confidence: bool,
    pub verdict: Verdict,
}

fn median(v: &mut [f64]) -> f64 {
    let mut finite: Vec<f64> = v.iter().copied().filter(|x| x.is_finite()).collect();
    if finite.is_empty() {
        return f64::NAN;
    }
    finite.sort_by(|a, b| a.partial_cmp(b).unwrap());
    finite[finite.len() / 2]
}

/// Least-squares slope of log|f(λ)| against log λ for λ in [1e−4, 1e−2].
fn log_log_slope(f: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let pts = 33;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..pts {
        let x = (1e-4f64).ln() + (100f64).ln() * i as f64 / (pts - 1) as f64;
        let y = f(x.exp())?.ln();
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let n = pts as f64;
    Ok((n * sxy - sx * sy) / (n * sxx - sx * sx))
}

fn endpoint_orders(ctx: &EllipticContext, at: f64, dir: f64) -> Result<EndpointOrders> {
    let fit = |k: Option<i64>| -> Result<OrderFit> {
        let slope = log_log_slope(|s| {
            let y = ctx.y(at + dir * s);
            Ok(match k {
                Some(k) => ctx.h(y, k)?.norm(),
                None => ctx.big_h(y)?.norm(),
            })
        })?;
        Ok(OrderFit::from_slope(slope))
    };
    Ok(EndpointOrders {
        h_minus: fit(Some(-1))?,
        h_zero: fit(Some(0))?,
        h_plus: fit(Some(1))?,
        big_h: fit(None)?,
    })
}

/// Zeros minus poles of h_k inside the circle |y − c| = r.
pub fn winding_number(ctx: &EllipticContext, k: i64, c: C64, r: f64) -> Result<i64> {
    let mut m = 128usize;
    'outer: loop {
        let mut total = 0.0;
        let mut prev = ctx.h(c + r, k)?.arg();
        for j in 1..=m {
            let w = c + C64::from_polar(r, 2.0 * PI * j as f64 / m as f64);
            let a = ctx.h(w, k)?.arg();
            let mut d = a - prev;
            while d > PI {
                d -= 2.0 * PI;
            }
            while d < -PI {
                d += 2.0 * PI;
            }
            if d.abs() > PI / 3.0 {
                if m >= 8192 {
                    return Err(Error::Conditioning(format!("winding count unresolved at {c} radius {r:e}")));
                }
                m *= 2;
                continue 'outer;
            }
            total += d;
            prev = a;
        }
        return Ok((total / (2.0 * PI)).round() as i64);
    }
}

/// Shrink a bracket around a grid minimum of |f| by repeated halving of a
/// 9-point local grid, until the minimizer moves less than 1e−8.
fn refine_minimum(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> (f64, f64) {
    let mut centre = 0.5 * (lo + hi);
    let mut half = 0.5 * (hi - lo);
    let mut best = f(centre);
    for _ in 0..80 {
        let mut arg = centre;
        for j in -4..=4 {
            let x = centre + half * j as f64 / 4.0;
            if x < lo || x > hi {
                continue;
            }
            let v = f(x);
            if v < best {
                best = v;
                arg = x;
            }
        }
        let moved = (arg - centre).abs();
        centre = arg;
        half *= 0.5;
        if moved < 1e-8 && half < 1e-8 {
            break;
        }
    }
    (centre, best)
}

/// Newton in the complex y plane with a centred-difference derivative.
fn newton_zero(ctx: &EllipticContext, k: i64, y0: C64, _scale: f64) -> Option<C64> {
    // Near a zero with a small denominator the residual plateaus at rounding
    // level, so convergence is judged by the Newton step rather than |h|.
    let mut y = y0;
    let mut best = (f64::INFINITY, y0);
    let mut stalled = 0;
    for _ in 0..80 {
        let v = ctx.h(y, k).ok()?;
        let d = 1e-6 * (1.0 + y.norm());
        let dv = (ctx.h(y + d, k).ok()? - ctx.h(y - d, k).ok()?) / (2.0 * d);
        if dv.norm() == 0.0 {
            return None;
        }
        let step = v / dv;
        if step.norm() < best.0 {
            best = (step.norm(), y - step);
            stalled = 0;
        } else {
            stalled += 1;
            if stalled >= 4 {
                break;
            }
        }
        y -= step;
        if step.norm() < 1e-15 * (1.0 + y.norm()) {
            return Some(y);
        }
    }
    (best.0 < 1e-10 * (1.0 + best.1.norm())).then_some(best.1)
}

/// Grid points λ_i = 2(i + ½)/grid: cell centres on (0, 2).
fn grid_points(grid: usize) -> Vec<f64> {
    (0..grid).map(|i| 2.0 * (i as f64 + 0.5) / grid as f64).collect()
}

enum Candidate {
    Zero(ZeroRecord),
    Ambiguous(ZeroRecord),
    NearMiss,
    Endpoint,
    Nothing,
}

/// Zeros this close to λ = 0 or 2 belong to the endpoint vanishing.
const ENDPOINT_GUARD: f64 = 1e-6;

fn examine(ctx: &EllipticContext, k: i64, lambda0: f64, spacing: f64, scale: f64, tol: f64) -> Candidate {
    let line = |l: f64| ctx.abs_h_line(l, k);
    let (lam, res) = refine_minimum(line, (lambda0 - spacing).max(0.0), (lambda0 + spacing).min(2.0));
    let delta = spacing * ctx.dy_dlambda().norm();
    let centre = ctx.y(lam);
    let denominator_floor = ctx.parts(centre, k).map(|p| p.denominator_floor()).unwrap_or(0.0);
    let mut rec = ZeroRecord {
        lambda: lam,
        k: reduce_k(k),
        residual: res,
        winding: 0,
        confirmed: false,
        denominator_floor,
        rho_rotation: None,
    };
    let small = res < tol * scale;
    let Ok(w) = winding_number(ctx, k, centre, delta) else {
        return if small { Candidate::Ambiguous(rec) } else { Candidate::Nothing };
    };
    rec.winding = w;
    if w >= 1 {
        // A circle that reaches an endpoint zero with the same winding is that zero.
        for end in [0.0, 2.0] {
            let ye = ctx.y(end);
            if (ye - centre).norm() < delta && ctx.abs_h_line(end, k) < tol * scale {
                if winding_number(ctx, k, ye, 2.0 * delta).ok() == Some(w) {
                    return Candidate::Endpoint;
                }
            }
        }
        if let Some(ys) = newton_zero(ctx, k, centre, scale) {
            let lc = ys / ctx.dy_dlambda();
            if lc.im.abs() <= tol && (lc.re - lam).abs() <= delta / ctx.dy_dlambda().norm() {
                // Newton stalls near 1e−8 on the double zeros at the endpoints.
                if lc.re < ENDPOINT_GUARD || lc.re > 2.0 - ENDPOINT_GUARD {
                    return Candidate::Endpoint;
                }
                rec.lambda = lc.re;
                rec.residual = ctx.abs_h_line(lc.re, k);
                rec.denominator_floor = ctx.parts(ctx.y(lc.re), k).map(|p| p.denominator_floor()).unwrap_or(0.0);
                rec.rho_rotation = ctx.h(rho() * ctx.y(lc.re), k).ok().map(|v| v.norm() / scale);
                rec.confirmed = rec.denominator_floor > 1e-6;
                return if rec.confirmed { Candidate::Zero(rec) } else { Candidate::Ambiguous(rec) };
            }
        }
        return if small { Candidate::Ambiguous(rec) } else { Candidate::NearMiss };
    }
    if small {
        Candidate::Ambiguous(rec)
    } else {
        Candidate::Nothing
    }
}

/// Locate the zeros of H(y(λ)) on (0, 2) and decide the index.
pub fn count_zeros(idx: MonopoleIndex, grid: usize, tol: f64) -> Result<VanishingReport> {
    if grid < 512 {
        return Err(Error::Domain(format!("grid must be at least 512, got {grid}")));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tol must be positive, got {tol}")));
    }
    let ctx = EllipticContext::from_index(idx)?;
    let lams = grid_points(grid);
    let spacing = 2.0 / grid as f64;

    let per_k: Vec<(i64, Vec<Candidate>)> = [-1i64, 0, 1]
        .par_iter()
        .map(|&k| {
            let mut vals: Vec<f64> = lams.par_iter().map(|&l| ctx.abs_h_line(l, k)).collect();
            let scale = median(&mut vals.clone());
            let eps = 1e-4 * scale;
            let mut picks = Vec::new();
            for i in 1..grid - 1 {
                let local_min = vals[i] <= vals[i - 1] && vals[i] <= vals[i + 1];
                if local_min || vals[i] < eps {
                    picks.push(lams[i]);
                }
            }
            vals.clear();
            let found: Vec<Candidate> = picks
                .par_iter()
                .map(|&l| examine(&ctx, k, l, spacing, scale, tol))
                .collect();
            (k, found)
        })
        .collect();

    let mut zeros: Vec<ZeroRecord> = Vec::new();
    let mut near_misses = 0;
    let mut endpoint_hits = 0;
    for (_, found) in per_k {
        for c in found {
            match c {
                Candidate::Zero(r) | Candidate::Ambiguous(r) => {
                    if !zeros.iter().any(|z| z.k == r.k && (z.lambda - r.lambda).abs() < 1e-6) {
                        zeros.push(r);
                    }
                }
                Candidate::NearMiss => near_misses += 1,
                Candidate::Endpoint => endpoint_hits += 1,
                Candidate::Nothing => {}
            }
        }
    }
    zeros.sort_by(|a, b| a.lambda.partial_cmp(&b.lambda).unwrap().then(a.k.cmp(&b.k)));

    let zero_count: usize = zeros.iter().filter(|z| z.confirmed).map(|z| z.winding as usize).sum();
    let ambiguous = zeros.iter().filter(|z| !z.confirmed).count();
    let conjecture_count = idx.conjectured_zero_count();
    let at_zero = endpoint_orders(&ctx, 0.0, 1.0)?;
    let at_two = endpoint_orders(&ctx, 2.0, -1.0)?;
    // H has a fourth-order zero at both ends; when the fit cannot see it the
    // evaluation is too inaccurate for the interior count to mean anything.
    let low_confidence = [at_zero, at_two].iter().any(|o| (o.big_h.slope - 4.0).abs() > 0.5);
    let verdict = match (zeros.is_empty(), low_confidence) {
        (false, _) => Verdict::NotMonopole,
        (true, false) => Verdict::Monopole,
        (true, true) => Verdict::Inconclusive,
    };
    Ok(VanishingReport {
        index: idx,
        modulus: ctx.modulus(),
        grid,
        tol,
        near_misses,
        endpoint_hits,
        at_zero,
        at_two,
        h0_at_origin: ctx.h(C64::new(0.0, 0.0), 0)?,
        zero_count,
        ambiguous,
        conjecture_count,
        matches_conjecture: ambiguous == 0 && zero_count == conjecture_count,
        low_confidence,
        verdict,
        zeros,
    })
}

/// λ values where |F| has a grid minimum that refines below `eps_rel`·median.
/// The grid includes both endpoints.
pub fn line_zero_set(f: impl Fn(f64) -> f64 + Sync, grid: usize, eps_rel: f64) -> Vec<f64> {
    let lams: Vec<f64> = (0..grid).map(|i| 2.0 * i as f64 / (grid - 1) as f64).collect();
    let vals: Vec<f64> = lams.par_iter().map(|&l| f(l)).collect();
    let eps = eps_rel * median(&mut vals.clone());
    let h = 2.0 / (grid - 1) as f64;
    let mut out = Vec::new();
    for i in 0..grid {
        let left = if i == 0 { f64::INFINITY } else { vals[i - 1] };
        let right = if i + 1 == grid { f64::INFINITY } else { vals[i + 1] };
        if !(vals[i] <= left && vals[i] <= right) {
            continue;
        }
        let lo = (lams[i] - h).max(0.0);
        let hi = (lams[i] + h).min(2.0);
        let (l, v) = refine_minimum(&f, lo, hi);
        if v < eps {
            out.push(l);
        }
    }
    out
}

/// The three zero sets of the reduction chain on λ ∈ [0, 2].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChainReport {
    pub index: MonopoleIndex,
    pub grid: usize,
    pub genus4_minus: Vec<f64>,
    pub genus4_plus: Vec<f64>,
    /// zeros of f_k for k = −1, 0, 1
    pub f: [Vec<f64>; 3],
    /// zeros of h_{k−1} for k = −1, 0, 1, i.e. of h₁, h₋₁, h₀
    pub h_shifted: [Vec<f64>; 3],
    /// largest distance from a point of one set to the nearest point of another
    pub mismatch: f64,
}

impl ChainReport {
    pub fn cell(&self) -> f64 {
        2.0 / (self.grid - 1) as f64
    }

    pub fn agrees(&self) -> bool {
        self.mismatch <= self.cell()
    }
}

fn set_distance(a: &[f64], b: &[f64]) -> f64 {
    let one = |x: &[f64], y: &[f64]| {
        x.iter()
            .map(|p| y.iter().map(|q| (p - q).abs()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    one(a, b).max(one(b, a))
}

/// Zero sets of θ(λÛ ∓ K̃|τ̂ᶜ), of f_k and of h_{k−1}(y(λ)), compared cell by cell.
pub fn equivalence_chain(
    idx: MonopoleIndex,
    pd: &PeriodData,
    vec: &MonopoleVectors,
    grid: usize,
    eps_rel: f64,
) -> Result<ChainReport> {
    let ctx = EllipticContext::from_index(idx)?;
    let tol = 1e-12;
    let g4 = |sign: f64| line_zero_set(|l| genus4_line(pd, vec, l, sign, tol).map(|s| s.mantissa.norm()).unwrap_or(f64::INFINITY), grid, eps_rel);
    let genus4_minus = g4(-1.0);
    let genus4_plus = g4(1.0);
    let mut f: [Vec<f64>; 3] = Default::default();
    let mut h_shifted: [Vec<f64>; 3] = Default::default();
    for (slot, k) in (-1i64..=1).enumerate() {
        f[slot] = line_zero_set(|l| f_k(pd, vec, l, k, tol).map(|s| s.mantissa.norm()).unwrap_or(f64::INFINITY), grid, eps_rel);
        h_shifted[slot] = line_zero_set(|l| ctx.abs_h_line(l, k - 1), grid, eps_rel);
    }
    let union = |sets: &[Vec<f64>; 3]| {
        let mut u: Vec<f64> = sets.iter().flatten().copied().collect();
        u.sort_by(|a, b| a.partial_cmp(b).unwrap());
        u
    };
    let fu = union(&f);
    let hu = union(&h_shifted);
    let mut mismatch = set_distance(&genus4_minus, &fu)
        .max(set_distance(&fu, &hu))
        .max(set_distance(&genus4_minus, &genus4_plus));
    for s in 0..3 {
        mismatch = mismatch.max(set_distance(&f[s], &h_shifted[s]));
    }
    Ok(ChainReport {
        index: idx,
        grid,
        genus4_minus,
        genus4_plus,
        f,
        h_shifted,
        mismatch,
    })
}

/// One point of a branch y = X_k(ℛ): h_k(sρ) = 0 at |ℛ| with s = y/ρ real.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchPoint {
    pub r_abs: f64,
    pub y_over_rho: f64,
    pub k: i64,
    /// set where two roots merge between neighbouring |ℛ| samples
    pub vertical_tangent: bool,
}

/// Real roots s ∈ (0, s_max) of h_k(sρ) for 𝒯 = 2i√3/|ℛ|, via sign changes of
/// the real part after removing the constant phase along the ray.
pub fn branch_roots(r_abs: f64, k: i64, s_max: f64, samples: usize) -> Result<Vec<f64>> {
    let ctx = EllipticContext::from_ratio_abs(r_abs)?;
    let r = rho();
    let eval = |s: f64| ctx.h(r * s, k).ok();
    let ss: Vec<f64> = (1..samples).map(|i| s_max * i as f64 / samples as f64).collect();
    let vals: Vec<Option<C64>> = ss.iter().map(|&s| eval(s)).collect();
    // h_k is real or purely imaginary along the ray; project on the dominant axis.
    let (re, im) = vals.iter().flatten().fold((0.0, 0.0), |acc, v| (acc.0 + v.re.abs(), acc.1 + v.im.abs()));
    let proj = move |v: C64| if re >= im { v.re } else { v.im };
    let mut out = Vec::new();
    for i in 0..ss.len() - 1 {
        let (Some(a), Some(b)) = (vals[i], vals[i + 1]) else { continue };
        let (fa, fb) = (proj(a), proj(b));
        if fa == 0.0 {
            out.push(ss[i]);
            continue;
        }
        if fa * fb >= 0.0 {
            continue;
        }
        // Exclude sign flips through a pole: the magnitude blows up there.
        let (mut lo, mut hi, mut flo) = (ss[i], ss[i + 1], fa);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            let Some(v) = eval(mid) else { break };
            let fm = proj(v);
            if fm * flo > 0.0 {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        let root = 0.5 * (lo + hi);
        if let Some(v) = eval(root) {
            if v.norm() < 1e-6 * (1.0 + a.norm().min(b.norm())) {
                out.push(root);
            }
        }
    }
    Ok(out)
}

/// Trace the branches X_k(ℛ) for |ℛ| on a uniform grid, marking fold points.
pub fn branch_loci(rmin: f64, rmax: f64, rsteps: usize, s_max: f64) -> Result<Vec<BranchPoint>> {
    if !(rmin > 0.0 && rmax > rmin && rsteps >= 2) {
        return Err(Error::Domain(format!("bad |R| range [{rmin}, {rmax}] with {rsteps} steps")));
    }
    let rs: Vec<f64> = (0..rsteps).map(|i| rmin + (rmax - rmin) * i as f64 / (rsteps - 1) as f64).collect();
    let mut out = Vec::new();
    for k in -1..=1 {
        let roots: Vec<Vec<f64>> = rs
            .par_iter()
            .map(|&r| branch_roots(r, k, s_max, 2000))
            .collect::<Result<_>>()?;
        for (i, (&r, rr)) in rs.iter().zip(&roots).enumerate() {
            for &s in rr {
                out.push(BranchPoint {
                    r_abs: r,
                    y_over_rho: s,
                    k,
                    vertical_tangent: false,
                });
            }
            // Two roots present here and absent at the next step (or vice versa) merged in between.
            if i + 1 < rs.len() {
                let next = &roots[i + 1];
                let (more, fewer, at) = if rr.len() > next.len() { (rr, next, r) } else { (next, rr, rs[i + 1]) };
                if more.len() >= fewer.len() + 2 {
                    let mut orphans: Vec<f64> = more
                        .iter()
                        .copied()
                        .filter(|s| fewer.iter().all(|q| (q - s).abs() > 2.0 * s_max / 2000.0 + 0.05))
                        .collect();
                    orphans.sort_by(|a, b| a.partial_cmp(b).unwrap());
                    for pair in orphans.windows(2) {
                        if (pair[1] - pair[0]).abs() < 0.2 {
                            out.push(BranchPoint {
                                r_abs: at,
                                y_over_rho: 0.5 * (pair[0] + pair[1]),
                                k,
                                vertical_tangent: true,
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(m: i64, n: i64) -> MonopoleIndex {
        MonopoleIndex::new(m, n).unwrap()
    }

    #[test]
    fn h_at_origin() {
        let h0 = [((0, 1), 2.9484), ((1, 1), 115.71), ((1, 2), 8.3631), ((1, 3), 5.2844)];
        for ((m, n), want) in h0 {
            let ctx = EllipticContext::from_index(idx(m, n)).unwrap();
            let z = C64::new(0.0, 0.0);
            assert!(ctx.h(z, 1).unwrap().norm() < 1e-10);
            assert!(ctx.h(z, -1).unwrap().norm() < 1e-10);
            let v = ctx.h(z, 0).unwrap().norm();
            assert!((v - want).abs() < 1e-3 * want, "({m},{n}) {v}");
        }
    }

    #[test]
    fn k_reduction() {
        let ctx = EllipticContext::from_index(idx(1, 3)).unwrap();
        let y = C64::new(0.13, 0.04);
        for k in -1..=1 {
            assert!((ctx.h(y, k).unwrap() - ctx.h(y, k + 3).unwrap()).norm() < 1e-13);
            assert!((ctx.h(y, k).unwrap() - ctx.h(y, k - 6).unwrap()).norm() < 1e-13);
        }
        assert_eq!(reduce_k(5), -1);
        assert_eq!(reduce_k(-2), 1);
    }

    #[test]
    fn identities_at_named_points() {
        for t in [C64::new(0.0, 1.0), C64::new(0.0, 4.0 * 3f64.sqrt()), C64::new(0.5, 2.0)] {
            let r = verify_identities(&UpperHalfPlanePoint::new(t).unwrap(), Convention::Standard).unwrap();
            assert!(r.max_residual() < 1e-10, "{t}: {r:?}");
        }
    }

    #[test]
    fn identities_fail_under_wrong_nome() {
        let r = verify_identities(&UpperHalfPlanePoint::new(C64::new(0.0, 1.0)).unwrap(), Convention::DoubledNome).unwrap();
        assert!(r.relation > 1e-3, "{r:?}");
    }

    #[test]
    fn periodicity_laws() {
        for (m, n) in [(1, 2), (0, 1), (1, 3), (2, 3), (-1, 2), (3, 4), (1, 1)] {
            let ctx = EllipticContext::from_index(idx(m, n)).unwrap();
            let r = verify_periodicities(&ctx, 50, 7).unwrap();
            assert!(r.max_residual() < 1e-8, "({m},{n}) {r:?}");
        }
    }

    #[test]
    fn mudots_table() {
        for r in 1..=12 {
            let want = ![1, 4, 7, 10].contains(&r);
            let res = mudots_residual(r as f64).unwrap();
            assert_eq!(mudots_solutions(r as f64).unwrap(), want, "|R| = {r}: residual {res:e}");
        }
    }

    #[test]
    fn derived_zero_locations() {
        let cases: [((i64, i64), &[(i64, f64)]); 3] = [
            ((1, 2), &[(0, 2.0 / 3.0), (0, 4.0 / 3.0)]),
            ((1, 3), &[(0, 0.45806), (0, 0.86821), (1, 1.13179), (1, 1.54194)]),
            ((-1, 2), &[(-1, 0.70017), (-1, 1.29983)]),
        ];
        for ((m, n), want) in cases {
            let rep = count_zeros(idx(m, n), 2048, 1e-9).unwrap();
            assert_eq!(rep.ambiguous, 0);
            assert_eq!(rep.zeros.len(), want.len(), "({m},{n}) {:?}", rep.zeros);
            for (z, &(k, l)) in rep.zeros.iter().zip(want) {
                assert_eq!(z.k, k);
                assert!((z.lambda - l).abs() < 1e-4, "({m},{n}) {z:?}");
                assert_eq!(z.winding, 1);
                assert!(z.denominator_floor > 1e-6);
            }
            assert_eq!(rep.verdict, Verdict::NotMonopole);
            assert!(rep.matches_conjecture);
        }
    }

    #[test]
    fn tetrahedral_curves_have_no_zeros() {
        for (m, n) in [(0, 1), (1, 1)] {
            let rep = count_zeros(idx(m, n), 2048, 1e-9).unwrap();
            assert!(rep.zeros.is_empty(), "{:?}", rep.zeros);
            assert_eq!(rep.verdict, Verdict::Monopole);
        }
    }

    #[test]
    fn endpoint_orders_at_origin() {
        for (m, n) in [(0, 1), (1, 2), (1, 3), (-1, 3)] {
            let rep = count_zeros(idx(m, n), 512, 1e-9).unwrap();
            let o = rep.at_zero;
            assert!((o.h_minus.slope - 2.0).abs() < 0.1 && (o.h_plus.slope - 2.0).abs() < 0.1, "{o:?}");
            assert!(o.h_zero.slope.abs() < 0.1);
            assert!((o.big_h.slope - 4.0).abs() < 0.1);
        }
    }

    #[test]
    fn big_h_zero_set_shifts_by_two() {
        // H(y(λ)) = 0 iff H(y(λ+2)) = 0
        let ctx = EllipticContext::from_index(idx(1, 3)).unwrap();
        for l in [0.45806, 0.86821, 1.13179, 1.54194] {
            let a = ctx.big_h(ctx.y(l)).unwrap().norm();
            let b = ctx.big_h(ctx.y(l + 2.0)).unwrap().norm();
            assert!(a < 1e-3 && b < 1e-3, "{l}: {a} {b}");
        }
    }

    #[test]
    fn branches_pass_through_table_points() {
        // h₋₁ vanishes at y = 2ρ/3 exactly when |ℛ| is not 1 mod 3.
        let at = |r: f64| EllipticContext::from_ratio_abs(r).unwrap().h(rho() * (2.0 / 3.0), -1).unwrap().norm();
        for r in [2.0, 3.0, 5.0] {
            assert!(at(r) < 1e-12, "|R| = {r}");
        }
        assert!(at(4.0) > 0.1);
        // At |R| = 2 the zero is double: two roots split off on either side just beyond.
        assert!(branch_roots(2.0, -1, 2.0, 2000).unwrap().is_empty());
        let split = branch_roots(2.05, -1, 2.0, 2000).unwrap();
        assert_eq!(split.len(), 2);
        assert!(split[0] < 2.0 / 3.0 && split[1] > 2.0 / 3.0, "{split:?}");
    }

    #[test]
    fn branch_folds_are_marked() {
        let pts = branch_loci(0.5, 12.0, 116, 2.0).unwrap();
        let folds: Vec<&BranchPoint> = pts.iter().filter(|p| p.vertical_tangent).collect();
        assert!(folds.len() >= 3, "{folds:?}");
        assert!(folds.iter().all(|p| p.y_over_rho > 0.0 && p.y_over_rho < 2.0));
        assert!(branch_loci(2.0, 1.0, 10, 2.0).is_err());
    }
}
