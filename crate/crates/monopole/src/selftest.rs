//! Invariant suites run by `monopole selftest`.
//!
//! Each check is named `module/invariant`. [`Hooks`] lets a harness inject a
//! wrong theta convention or a corrupted symplectic table so the suites can be
//! seen to fail for the right reason.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::curve::{b_via_theta_constants, run_pipeline, solve_curve, MonopoleIndex};
use crate::error::Result;
use crate::specfun::{es_ratio, gamma, gauss_2f1, HypergeometricQuery};
use crate::symplectic::{is_symplectic, named_tables, IntegerSymplectic};
use crate::theta::{
    jacobi_theta, riemann_theta, Convention, RiemannPeriodMatrix, ThetaCharacteristic, UpperHalfPlanePoint, C64,
};
use crate::vanishing::{count_zeros, mudots_solutions, verify_identities, verify_periodicities, EllipticContext};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Check {
    pub module: String,
    pub invariant: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn id(&self) -> String {
        format!("{}/{}", self.module, self.invariant)
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SelftestReport {
    pub checks: Vec<Check>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Fault injection for negative controls.
#[derive(Debug, Clone, Default)]
pub struct Hooks {
    pub convention: Convention,
    /// Replaces the built-in symplectic tables when set.
    pub tables: Option<Vec<(String, Vec<Vec<i64>>)>>,
}

impl Hooks {
    pub fn perturbed_theta() -> Self {
        Hooks {
            convention: Convention::DoubledNome,
            tables: None,
        }
    }

    /// The built-in tables with one entry of `cyclic_basis` flipped.
    pub fn corrupted_table() -> Self {
        let tables = named_tables()
            .into_iter()
            .map(|(name, mut rows)| {
                if name == "cyclic_basis" {
                    rows[0][0] += 1;
                }
                (name.to_string(), rows)
            })
            .collect();
        Hooks {
            convention: Convention::Standard,
            tables: Some(tables),
        }
    }
}

struct Suite<'a> {
    module: &'static str,
    out: &'a mut Vec<Check>,
}

impl Suite<'_> {
    /// Records `residual <= bound`; errors count as failures.
    fn bound(&mut self, invariant: &str, residual: Result<f64>, bound: f64) {
        let (passed, detail) = match residual {
            Ok(r) if r <= bound => (true, format!("residual {r:.3e} <= {bound:.0e}")),
            Ok(r) => (false, format!("residual {r:.3e} exceeds {bound:.0e}")),
            Err(e) => (false, e.to_string()),
        };
        self.push(invariant, passed, detail);
    }

    fn truth(&mut self, invariant: &str, ok: Result<bool>, what: &str) {
        let (passed, detail) = match ok {
            Ok(true) => (true, what.to_string()),
            Ok(false) => (false, format!("violated: {what}")),
            Err(e) => (false, e.to_string()),
        };
        self.push(invariant, passed, detail);
    }

    fn push(&mut self, invariant: &str, passed: bool, detail: String) {
        self.out.push(Check {
            module: self.module.into(),
            invariant: invariant.into(),
            passed,
            detail,
        });
    }
}

const TETRA_CHI_CBRT: f64 = -1.249_202_240_233_769_4;

fn specfun_suite(s: &mut Suite<'_>) {
    s.bound(
        "gamma_reflection",
        (|| Ok((gamma(1.0 / 3.0)? * gamma(2.0 / 3.0)? - 2.0 * PI / 3f64.sqrt()).abs()))(),
        1e-13,
    );
    s.bound(
        "gauss_at_one",
        (|| {
            let f = gauss_2f1(&HypergeometricQuery::new(1.0 / 3.0, 1.0 / 3.0, 1.0, 1.0))?;
            Ok((f - gamma(1.0 / 3.0)? / gamma(2.0 / 3.0)?.powi(2)).abs())
        })(),
        1e-13,
    );
    s.truth(
        "es_ratio_monotone",
        (|| {
            let vals = (1..200).map(|i| es_ratio(i as f64 / 200.0)).collect::<Result<Vec<_>>>()?;
            Ok(vals.windows(2).all(|w| w[1] > w[0]))
        })(),
        "F(t)/F(1-t) increasing on (0,1)",
    );
}

fn theta_suite(s: &mut Suite<'_>) {
    let tol = 1e-14;
    let taus = [C64::new(0.3, 0.8), C64::new(-0.45, 1.7), C64::new(0.1, 0.55)];
    s.bound(
        "jacobi_quartic",
        (|| {
            let mut worst: f64 = 0.0;
            for &t in &taus {
                let tau = UpperHalfPlanePoint::new(t)?;
                let z = C64::new(0.0, 0.0);
                let (a, b, c) = (jacobi_theta(2, z, &tau, tol)?, jacobi_theta(3, z, &tau, tol)?, jacobi_theta(4, z, &tau, tol)?);
                worst = worst.max((b.powi(4) - a.powi(4) - c.powi(4)).norm() / b.norm().powi(4));
            }
            Ok(worst)
        })(),
        1e-12,
    );
    s.bound(
        "quasi_periodicity",
        (|| {
            let mut worst: f64 = 0.0;
            let z = C64::new(0.17, -0.08);
            for &t in &taus {
                let tau = UpperHalfPlanePoint::new(t)?;
                let lhs = jacobi_theta(3, z + t, &tau, tol)?;
                let rhs = (C64::new(0.0, -PI) * (t + 2.0 * z)).exp() * jacobi_theta(3, z, &tau, tol)?;
                worst = worst.max((lhs - rhs).norm() / rhs.norm());
            }
            Ok(worst)
        })(),
        1e-12,
    );
    s.bound(
        "modular_inversion",
        (|| {
            let mut worst: f64 = 0.0;
            for &t in &taus {
                let tau = UpperHalfPlanePoint::new(t)?;
                let inv = UpperHalfPlanePoint::new(-1.0 / t)?;
                let z = C64::new(0.0, 0.0);
                let lhs = jacobi_theta(3, z, &inv, tol)?;
                let rhs = (C64::new(0.0, -1.0) * t).sqrt() * jacobi_theta(3, z, &tau, tol)?;
                worst = worst.max((lhs - rhs).norm() / rhs.norm());
            }
            Ok(worst)
        })(),
        1e-12,
    );
    s.bound(
        "riemann_diagonal_factorizes",
        (|| {
            let (t1, t2) = (C64::new(0.2, 1.1), C64::new(-0.3, 0.9));
            let m = RiemannPeriodMatrix::new(DMatrix::from_row_slice(2, 2, &[t1, C64::new(0.0, 0.0), C64::new(0.0, 0.0), t2]))?;
            let z = [C64::new(0.1, 0.05), C64::new(-0.2, 0.1)];
            let lhs = riemann_theta(&z, &m, &ThetaCharacteristic::zero(2), tol)?;
            let rhs = jacobi_theta(3, z[0], &UpperHalfPlanePoint::new(t1)?, tol)?
                * jacobi_theta(3, z[1], &UpperHalfPlanePoint::new(t2)?, tol)?;
            Ok((lhs - rhs).norm() / rhs.norm())
        })(),
        1e-12,
    );
}

fn symplectic_suite(s: &mut Suite<'_>, hooks: &Hooks) {
    let tables: Vec<(String, Vec<Vec<i64>>)> = hooks
        .tables
        .clone()
        .unwrap_or_else(|| named_tables().into_iter().map(|(n, t)| (n.to_string(), t)).collect());
    for (name, rows) in &tables {
        s.truth(&format!("is_symplectic:{name}"), is_symplectic(rows), "M J Mt = J");
    }
    s.truth(
        "inverse_composes_to_identity",
        (|| {
            let mut ok = true;
            for (_, rows) in named_tables() {
                let m = IntegerSymplectic::new(rows)?;
                ok &= m.compose(&m.inverse())? == IntegerSymplectic::identity(m.genus());
            }
            Ok(ok)
        })(),
        "M M^-1 = 1 for every table",
    );
}

fn curve_suite(s: &mut Suite<'_>) {
    s.bound(
        "tetrahedral_constants",
        (|| {
            let mut worst: f64 = 0.0;
            for (m, n) in [(0, 1), (1, 1)] {
                let cd = solve_curve(MonopoleIndex::new(m, n)?)?;
                worst = worst.max((cd.b.abs() - 5.0 * 2f64.sqrt()).abs());
                worst = worst.max((cd.chi_cbrt - TETRA_CHI_CBRT).abs());
            }
            Ok(worst)
        })(),
        1e-9,
    );
    let probe = [(1, 2), (1, 3), (2, 3), (-1, 4), (3, 5)];
    s.bound(
        "lattice_membership",
        (|| {
            let mut worst: f64 = 0.0;
            for (m, n) in probe {
                worst = worst.max(run_pipeline(MonopoleIndex::new(m, n)?)?.vectors.lattice_residual);
            }
            Ok(worst)
        })(),
        1e-8,
    );
    s.bound(
        "humbert_relations",
        (|| {
            let mut worst: f64 = 0.0;
            for (m, n) in probe {
                let p = run_pipeline(MonopoleIndex::new(m, n)?)?.periods;
                let (r1, r2) = p.humbert_relations();
                worst = worst.max(r1).max(r2).max(p.humbert_residual);
            }
            Ok(worst)
        })(),
        1e-10,
    );
    s.bound(
        "dual_route_b",
        (|| {
            let mut worst: f64 = 0.0;
            for (m, n) in probe {
                let idx = MonopoleIndex::new(m, n)?;
                let b = solve_curve(idx)?.b;
                worst = worst.max((b - b_via_theta_constants(idx)?).abs() / b.abs().max(1.0));
            }
            Ok(worst)
        })(),
        1e-10,
    );
    s.bound(
        "partner_moduli",
        (|| {
            let mut worst: f64 = 0.0;
            for (m, n) in probe {
                let idx = MonopoleIndex::new(m, n)?;
                let t = idx.modulus() * idx.partner().modulus();
                worst = worst.max((t + 12.0).norm());
            }
            Ok(worst)
        })(),
        1e-12,
    );
}

fn vanishing_suite(s: &mut Suite<'_>, hooks: &Hooks) {
    s.bound(
        "identity_residuals",
        (|| {
            let mut worst: f64 = 0.0;
            for t in [C64::new(0.0, 1.0), C64::new(0.37, 0.62), C64::new(-1.2, 2.5), C64::new(0.5, 0.5 * 3f64.sqrt())] {
                worst = worst.max(verify_identities(&UpperHalfPlanePoint::new(t)?, hooks.convention)?.max_residual());
            }
            Ok(worst)
        })(),
        1e-9,
    );
    s.bound(
        "periodicity_laws",
        (|| {
            let mut worst: f64 = 0.0;
            for (m, n) in [(1, 2), (0, 1), (2, 3)] {
                let ctx = EllipticContext::from_index(MonopoleIndex::new(m, n)?)?;
                worst = worst.max(verify_periodicities(&ctx, 10, 7)?.max_residual());
            }
            Ok(worst)
        })(),
        1e-9,
    );
    s.truth(
        "mudots_table",
        (|| {
            let mut ok = true;
            for r in 1..=12 {
                ok &= mudots_solutions(r as f64)? == (r % 3 != 1);
            }
            Ok(ok)
        })(),
        "solutions exactly at |R| in {2,3,5,6,8,9,11,12}",
    );
    s.truth(
        "zero_counts",
        (|| {
            let mut ok = true;
            for (m, n) in [(0, 1), (1, 1), (1, 2), (1, 3)] {
                let idx = MonopoleIndex::new(m, n)?;
                let r = count_zeros(idx, 1024, 1e-9)?;
                ok &= r.zero_count == idx.conjectured_zero_count() && r.ambiguous == 0;
            }
            Ok(ok)
        })(),
        "interior zero counts 0, 0, 2, 4 for (0,1), (1,1), (1,2), (1,3)",
    );
}

/// Runs every suite. Never panics; each failure is a named check.
pub fn run(hooks: &Hooks) -> SelftestReport {
    let mut checks = Vec::new();
    specfun_suite(&mut Suite { module: "specfun", out: &mut checks });
    theta_suite(&mut Suite { module: "theta", out: &mut checks });
    symplectic_suite(&mut Suite { module: "symplectic", out: &mut checks }, hooks);
    curve_suite(&mut Suite { module: "curve", out: &mut checks });
    vanishing_suite(&mut Suite { module: "vanishing", out: &mut checks }, hooks);
    SelftestReport { checks }
}
