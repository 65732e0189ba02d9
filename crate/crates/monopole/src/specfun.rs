//! Real special functions: Gamma, digamma and the Gauss hypergeometric
//! function ₂F₁, plus the transcendental equation fixing the curve parameter t.
//!
//! `gauss_2f1` covers the whole real line below the branch point:
//! the power series on |z| ≤ 1/2, Pfaff's transformation for z < 0 and the
//! z → 1−z connection formulas (including the logarithmic integer cases)
//! on (1/2, 1).

use crate::error::{Error, Result};

const SERIES_EPS: f64 = 1e-17;
const MAX_TERMS: usize = 20_000;

/// Arguments of ₂F₁(a, b; c; z).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypergeometricQuery {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub z: f64,
}

impl HypergeometricQuery {
    pub fn new(a: f64, b: f64, c: f64, z: f64) -> Self {
        Self { a, b, c, z }
    }
}

/// Γ(x) for x > 0 (Lanczos approximation).
pub fn gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("gamma needs a positive argument, got {x}")));
    }
    Ok(statrs::function::gamma::gamma(x))
}

/// ψ(x) = Γ'(x)/Γ(x).
pub fn digamma(x: f64) -> f64 {
    statrs::function::gamma::digamma(x)
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

/// 1/Γ(x), zero at the poles of Γ.
fn rgamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        0.0
    } else {
        1.0 / statrs::function::gamma::gamma(x)
    }
}

fn gamma_any(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

/// Plain Maclaurin series; terminates early for polynomial cases.
fn series(a: f64, b: f64, c: f64, z: f64) -> f64 {
    let mut sum = 1.0;
    let mut term = 1.0;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        term *= (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * z;
        sum += term;
        if term == 0.0 || term.abs() <= SERIES_EPS * sum.abs() {
            break;
        }
    }
    sum
}

/// ₂F₁(a, b; c; z) for real arguments with z ≤ 1.
pub fn gauss_2f1(q: &HypergeometricQuery) -> Result<f64> {
    let HypergeometricQuery { a, b, c, z } = *q;
    if !(a.is_finite() && b.is_finite() && c.is_finite() && z.is_finite()) {
        return Err(Error::Domain(format!("non-finite input {q:?}")));
    }
    if is_nonpositive_integer(c) {
        return Err(Error::Domain(format!("c = {c} is a non-positive integer")));
    }
    if z > 1.0 {
        return Err(Error::Domain(format!("z = {z} lies on the branch cut")));
    }
    if z == 1.0 {
        let s = c - a - b;
        if s <= 1e-12 {
            return Err(Error::Divergent(s));
        }
        return Ok(gamma_any(c) * gamma_any(s) * rgamma(c - a) * rgamma(c - b));
    }
    Ok(eval_with_complement(a, b, c, z, 1.0 - z))
}

/// ₂F₁(a, b; c; 1−s) for 0 < s ≤ 1, keeping full relative precision in s.
///
/// Needed when 1−s rounds to 1 in double precision.
pub fn gauss_2f1_complement(a: f64, b: f64, c: f64, s: f64) -> Result<f64> {
    if is_nonpositive_integer(c) {
        return Err(Error::Domain(format!("c = {c} is a non-positive integer")));
    }
    if !(s > 0.0) {
        return Err(Error::Domain(format!("complement s = {s} must be positive")));
    }
    Ok(eval_with_complement(a, b, c, 1.0 - s, s))
}

fn eval_with_complement(a: f64, b: f64, c: f64, z: f64, w: f64) -> f64 {
    if is_nonpositive_integer(a) || is_nonpositive_integer(b) {
        return series(a, b, c, z);
    }
    if z.abs() <= 0.5 {
        return series(a, b, c, z);
    }
    if z < 0.0 {
        // Pfaff: F(a,b;c;z) = (1−z)^(−a) F(a, c−b; c; z/(z−1)), with z/(z−1) ∈ (1/3, 1).
        let x = z / (z - 1.0);
        let wx = 1.0 / w; // 1 − x = 1/(1−z)
        return w.powf(-a) * eval_with_complement(a, c - b, c, x, wx);
    }
    connection(a, b, c, w)
}

/// F(a,b;c;1−w) for w ∈ (0, 1/2) via the 1−z connection formulas.
fn connection(a: f64, b: f64, c: f64, w: f64) -> f64 {
    let s = c - a - b;
    let m = s.round();
    if (s - m).abs() > 1e-12 {
        let t1 = gamma_any(c) * gamma_any(s) * rgamma(c - a) * rgamma(c - b)
            * series(a, b, 1.0 - s, w);
        let t2 = w.powf(s) * gamma_any(c) * gamma_any(-s) * rgamma(a) * rgamma(b)
            * series(c - a, c - b, s + 1.0, w);
        return t1 + t2;
    }
    if m < 0.0 {
        // Euler: F(a,b;c;z) = (1−z)^(c−a−b) F(c−a, c−b; c; z).
        return w.powf(m) * connection(c - a, c - b, c, w);
    }
    log_connection(a, b, m as usize, w)
}

/// Degenerate case c = a + b + m, m a non-negative integer.
fn log_connection(a: f64, b: f64, m: usize, w: f64) -> f64 {
    let mf = m as f64;
    let c = a + b + mf;
    let ln_w = w.ln();

    let mut finite = 0.0;
    if m > 0 {
        let pre = gamma_any(mf) * gamma_any(c) * rgamma(a + mf) * rgamma(b + mf);
        let mut term = 1.0;
        for n in 0..m {
            finite += term;
            let nf = n as f64;
            term *= (a + nf) * (b + nf) / ((nf + 1.0) * (1.0 - mf + nf)) * w;
        }
        finite *= pre;
    }

    // Σ (a+m)_n (b+m)_n / (n! (n+m)!) wⁿ [ln w − ψ(n+1) − ψ(n+m+1) + ψ(a+n+m) + ψ(b+n+m)]
    let mut coef = 1.0 / factorial(m);
    let mut psi_n1 = digamma(1.0);
    let mut psi_nm1 = digamma(mf + 1.0);
    let mut psi_a = digamma(a + mf);
    let mut psi_b = digamma(b + mf);
    let mut sum = 0.0;
    let mut wn = 1.0;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        let term = coef * wn * (ln_w - psi_n1 - psi_nm1 + psi_a + psi_b);
        sum += term;
        if n > 2 && term.abs() <= SERIES_EPS * sum.abs() {
            break;
        }
        coef *= (a + mf + nf) * (b + mf + nf) / ((nf + 1.0) * (nf + mf + 1.0));
        wn *= w;
        psi_n1 += 1.0 / (nf + 1.0);
        psi_nm1 += 1.0 / (nf + mf + 1.0);
        psi_a += 1.0 / (a + mf + nf);
        psi_b += 1.0 / (b + mf + nf);
    }
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 }; // (z−1)^m = (−w)^m
    finite - sign * w.powi(m as i32) * gamma_any(c) * rgamma(a) * rgamma(b) * sum
}

fn factorial(m: usize) -> f64 {
    (1..=m).map(|k| k as f64).product()
}

/// F(1/3, 2/3; 1; ·) evaluated at t and at 1−t, given the log-odds u = ln(t/(1−t)).
///
/// Both values keep full precision even when t or 1−t underflows relative to 1.
pub fn es_pair(u: f64) -> Result<(f64, f64)> {
    let (t, s) = split_log_odds(u);
    let f = |x: f64, cx: f64| -> Result<f64> {
        if x <= 0.5 {
            gauss_2f1(&HypergeometricQuery::new(1.0 / 3.0, 2.0 / 3.0, 1.0, x))
        } else {
            gauss_2f1_complement(1.0 / 3.0, 2.0 / 3.0, 1.0, cx)
        }
    };
    Ok((f(t, s)?, f(s, t)?))
}

/// (t, 1−t) from u = ln(t/(1−t)), each with full relative precision.
pub fn split_log_odds(u: f64) -> (f64, f64) {
    if u >= 0.0 {
        let e = (-u).exp();
        (1.0 / (1.0 + e), e / (1.0 + e))
    } else {
        let e = u.exp();
        (e / (1.0 + e), 1.0 / (1.0 + e))
    }
}

/// The ratio F(t)/F(1−t) as a function of the log-odds of t.
pub fn es_ratio_log_odds(u: f64) -> Result<f64> {
    let (ft, fs) = es_pair(u)?;
    Ok(ft / fs)
}

/// F(t)/F(1−t) with F = ₂F₁(1/3, 2/3; 1; ·).
pub fn es_ratio(t: f64) -> Result<f64> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::Domain(format!("t = {t} outside (0, 1)")));
    }
    es_ratio_log_odds((t / (1.0 - t)).ln())
}

pub(crate) fn check_index(m: i64, n: i64) -> Result<()> {
    let bad = |reason: &str| Error::InvalidIndex {
        m,
        n,
        reason: reason.to_string(),
    };
    if num_integer::gcd(m, n) != 1 {
        return Err(bad("m and n are not coprime"));
    }
    if (m + n) * (m - 2 * n) >= 0 {
        return Err(bad("requires (m+n)(m-2n) < 0"));
    }
    Ok(())
}

/// Largest |u| the bracket covers. Targets up to ratio ≈ 2.7e2 fit, far beyond |m|,|n| ≤ 50.
const U_MAX: f64 = 700.0;

/// Log-odds ln(t/(1−t)) of the unique t with F(t)/F(1−t) = (2n−m)/(m+n).
pub fn solve_es_log_odds(m: i64, n: i64) -> Result<f64> {
    check_index(m, n)?;
    let target = (2 * n - m) as f64 / (m + n) as f64;
    let g = |u: f64| -> Result<f64> { Ok(es_ratio_log_odds(u)?.ln() - target.ln()) };

    // Monotonicity is assumed by the bracket; check it on a coarse grid.
    let mut prev = f64::NEG_INFINITY;
    for i in 0..64 {
        let u = -U_MAX + 2.0 * U_MAX * i as f64 / 63.0;
        let r = es_ratio_log_odds(u)?;
        if !(r > prev) {
            return Err(Error::RootSolve(format!(
                "ratio not increasing at u = {u}: {r} after {prev}"
            )));
        }
        prev = r;
    }

    let (mut lo, mut hi) = (-U_MAX, U_MAX);
    let (mut glo, ghi) = (g(lo)?, g(hi)?);
    if !(glo < 0.0 && ghi > 0.0) {
        return Err(Error::RootSolve(format!(
            "target {target} not bracketed on [{lo}, {hi}]: g = ({glo}, {ghi})"
        )));
    }
    while hi - lo > 1e-3 {
        let mid = 0.5 * (lo + hi);
        let gm = g(mid)?;
        if gm < 0.0 {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    // Secant polish inside the bracket.
    let (mut u0, mut g0) = (lo, glo);
    let mut u1 = hi;
    let mut g1 = g(u1)?;
    for _ in 0..60 {
        if g1 == g0 || g1 == 0.0 {
            break;
        }
        let u2 = u1 - g1 * (u1 - u0) / (g1 - g0);
        let u2 = if u2 > lo - 1.0 && u2 < hi + 1.0 { u2 } else { 0.5 * (lo + hi) };
        u0 = u1;
        g0 = g1;
        u1 = u2;
        g1 = g(u1)?;
        if (u1 - u0).abs() <= 1e-15 * (1.0 + u1.abs()) {
            break;
        }
    }
    Ok(u1)
}

/// t ∈ (0, 1) solving F(t)/F(1−t) = (2n−m)/(m+n).
///
/// For very unbalanced pairs t rounds to 0 or 1 in double precision; use
/// [`solve_es_log_odds`] when the complement is needed.
pub fn solve_es_ratio(m: i64, n: i64) -> Result<f64> {
    Ok(split_log_odds(solve_es_log_odds(m, n)?).0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    // 30-digit reference values.
    const GAMMA_1_6: f64 = 5.566_316_001_780_235_2;
    const GAUSS_SUM_13_13: f64 = 1.460_998_486_206_318_4;

    /// Euler integral by double-exponential quadrature, valid for c > b > 0.
    fn euler_integral(a: f64, b: f64, c: f64, z: f64) -> f64 {
        let h = 1.0 / 64.0;
        let mut s = 0.0;
        for k in -6 * 64..=6 * 64 {
            let x = k as f64 * h;
            let u = std::f64::consts::FRAC_PI_2 * x.sinh();
            let t = 1.0 / (1.0 + (-2.0 * u).exp());
            let one_minus_t = 1.0 / (1.0 + (2.0 * u).exp());
            let w = std::f64::consts::FRAC_PI_2 * x.cosh() / (2.0 * u.cosh().powi(2));
            if t <= 0.0 || one_minus_t <= 0.0 {
                continue;
            }
            s += w * t.powf(b - 1.0) * one_minus_t.powf(c - b - 1.0) * (1.0 - z * t).powf(-a);
        }
        s * h * gamma_any(c) / (gamma_any(b) * gamma_any(c - b))
    }

    #[test]
    fn gamma_values() {
        assert_relative_eq!(gamma(1.0).unwrap(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(
            gamma(0.5).unwrap(),
            std::f64::consts::PI.sqrt(),
            max_relative = 1e-14
        );
        assert_relative_eq!(gamma(1.0 / 6.0).unwrap(), GAMMA_1_6, max_relative = 1e-13);
        assert!(gamma(0.0).is_err());
        assert!(gamma(-1.5).is_err());
    }

    #[test]
    fn gamma_recurrence_grid() {
        for i in 0..=99 {
            let x = 0.1 + 9.9 * i as f64 / 99.0;
            let lhs = gamma(x + 1.0).unwrap();
            let rhs = x * gamma(x).unwrap();
            assert_relative_eq!(lhs, rhs, max_relative = 1e-12);
        }
    }

    #[test]
    fn hypergeometric_special_points() {
        let third = 1.0 / 3.0;
        let q = HypergeometricQuery::new(third, 2.0 * third, 1.0, 0.0);
        assert_eq!(gauss_2f1(&q).unwrap(), 1.0);
        let q = HypergeometricQuery::new(third, 2.0 * third, 1.0, 1.0);
        assert!(matches!(gauss_2f1(&q), Err(Error::Divergent(_))));
        let q = HypergeometricQuery::new(third, third, 1.0, 1.0);
        assert_relative_eq!(gauss_2f1(&q).unwrap(), GAUSS_SUM_13_13, max_relative = 1e-13);
        let q = HypergeometricQuery::new(third, third, 0.0, 0.2);
        assert!(gauss_2f1(&q).is_err());
    }

    #[test]
    fn hypergeometric_reference_values() {
        let third = 1.0 / 3.0;
        let cases = [
            (third, 2.0 * third, 1.0, 0.3, 1.080_782_209_186_556_2),
            (third, third, 1.0, -5.0, 0.787_655_390_136_596_2),
            (third, 2.0 * third, 1.0, 0.9, 1.563_268_212_972_069_9),
            (third, 2.0 * third, 1.0, 1.0 - 1e-12, 8.525_441_323_263_79),
            (third, 2.0 * third, 2.0, 0.8, 1.138_894_738_310_202_8),
            (0.25, 0.5, 1.5, 0.95, 1.156_149_312_557_948),
            (third, third, 1.0, -1e6, 0.047_169_897_356_252_58),
            (third, 2.0 * third, 0.5, 0.7, 1.727_000_891_857_560_2),
            (-2.0, 0.5, 1.5, 0.9, 0.562),
        ];
        for (a, b, c, z, want) in cases {
            let got = gauss_2f1(&HypergeometricQuery::new(a, b, c, z)).unwrap();
            assert_relative_eq!(got, want, max_relative = 1e-12);
        }
    }

    #[test]
    fn complement_matches_direct() {
        let third = 1.0 / 3.0;
        for s in [0.4, 0.1, 1e-3, 1e-8] {
            let z = 1.0 - s;
            let direct = gauss_2f1(&HypergeometricQuery::new(third, 2.0 * third, 1.0, z)).unwrap();
            let comp = gauss_2f1_complement(third, 2.0 * third, 1.0, 1.0 - z).unwrap();
            assert_relative_eq!(direct, comp, max_relative = 1e-12);
        }
    }

    #[test]
    fn solve_midpoint_and_tetrahedral() {
        assert_relative_eq!(solve_es_ratio(1, 2).unwrap(), 0.5, epsilon = 1e-14);
        let s3 = 3f64.sqrt();
        let t01 = solve_es_ratio(0, 1).unwrap();
        let t11 = solve_es_ratio(1, 1).unwrap();
        assert_relative_eq!(t01, (9.0 + 5.0 * s3) / 18.0, epsilon = 1e-13);
        assert_relative_eq!(t11, (9.0 - 5.0 * s3) / 18.0, epsilon = 1e-13);
        let resid = es_ratio(t01).unwrap() - 2.0;
        assert!(resid.abs() < 1e-13, "{resid}");
        assert!(matches!(solve_es_ratio(2, 1), Err(Error::InvalidIndex { .. })));
        assert!(matches!(solve_es_ratio(2, 4), Err(Error::InvalidIndex { .. })));
    }

    proptest! {
        #[test]
        fn series_matches_integral(z in -20.0f64..0.97, fam in 0usize..2) {
            let third = 1.0 / 3.0;
            let (a, b) = if fam == 0 { (third, third) } else { (third, 2.0 * third) };
            // Euler integral needs c > b; both families have b < c = 1.
            let got = gauss_2f1(&HypergeometricQuery::new(a, b, 1.0, z)).unwrap();
            let want = euler_integral(a, b, 1.0, z);
            prop_assert!(((got - want) / want).abs() < 1e-10, "z={} got={} want={}", z, got, want);
        }

        #[test]
        fn symmetric_pairs_give_complementary_t(n in 1i64..9, m in -8i64..9) {
            prop_assume!(check_index(m, n).is_ok() && check_index(n - m, n).is_ok());
            let u1 = solve_es_log_odds(m, n).unwrap();
            let u2 = solve_es_log_odds(n - m, n).unwrap();
            let (t1, _) = split_log_odds(u1);
            let (_, s2) = split_log_odds(u2);
            prop_assert!((t1 - s2).abs() < 1e-12, "{} {}", t1, s2);
        }
    }
}
