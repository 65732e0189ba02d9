//! Acceptance criteria 1 to 10. Each test prints one `criterion N: PASS|FAIL` line
//! and then asserts the same outcome.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use monopole::curve::{b_via_theta_constants, fay_accola_ratio, run_pipeline, solve_curve, MonopoleIndex};
use monopole::symplectic::humbert_reduction;
use monopole::theta::{Convention, UpperHalfPlanePoint, C64};
use monopole::vanishing::{count_zeros, equivalence_chain, mudots_solutions, reduce_k, verify_identities, Verdict};
use rand::{rngs::StdRng, Rng, SeedableRng};
use rayon::prelude::*;
use statrs::function::gamma::gamma;

const GRID: usize = 2048;
const TOL: f64 = 1e-9;

fn verdict_line(n: u32, name: &str, pass: bool, started: Instant, budget: Duration, detail: &str) {
    let took = started.elapsed();
    let in_time = took <= budget;
    let ok = pass && in_time;
    println!(
        "criterion {n}: {} {name}: {detail}; {:.2}s of {}s budget{}",
        if ok { "PASS" } else { "FAIL" },
        took.as_secs_f64(),
        budget.as_secs(),
        if in_time { "" } else { " (over budget)" }
    );
    assert!(ok, "criterion {n} failed: {detail}");
}

fn box8() -> Vec<MonopoleIndex> {
    MonopoleIndex::admissible_up_to(8)
}

#[test]
fn criterion_01_tetrahedral_constants() {
    let t0 = Instant::now();
    // −Γ(1/6)Γ(1/3) / (6 · 2^{1/6} √π)
    let chi_want = -gamma(1.0 / 6.0) * gamma(1.0 / 3.0) / (6.0 * 2f64.powf(1.0 / 6.0) * PI.sqrt());
    let mut worst_b: f64 = 0.0;
    let mut worst_chi: f64 = 0.0;
    for (m, n) in [(0, 1), (1, 1)] {
        let cd = solve_curve(MonopoleIndex::new(m, n).unwrap()).unwrap();
        worst_b = worst_b.max((cd.b.abs() - 5.0 * 2f64.sqrt()).abs());
        worst_chi = worst_chi.max((cd.chi_cbrt - chi_want).abs());
    }
    verdict_line(
        1,
        "tetrahedral b and chi^(1/3)",
        worst_b < 1e-9 && worst_chi < 1e-8,
        t0,
        Duration::from_secs(2),
        &format!("max ||b| - 5 sqrt 2| = {worst_b:.2e} (< 1e-9), max chi^(1/3) error = {worst_chi:.2e} (< 1e-8)"),
    );
}

#[test]
fn criterion_02_dual_oracle_b() {
    let t0 = Instant::now();
    let rows: Vec<(MonopoleIndex, f64, f64)> = box8()
        .par_iter()
        .map(|&i| {
            let b = solve_curve(i).unwrap().b;
            let bt = b_via_theta_constants(i).unwrap();
            (i, b, (b - bt).abs())
        })
        .collect();
    let bad: Vec<String> = rows
        .iter()
        .filter(|r| !(r.2 < 1e-8))
        .map(|(i, b, d)| format!("{i} |b|={:.1e} diff={d:.1e} rel={:.1e}", b.abs(), d / b.abs().max(1.0)))
        .collect();
    let worst_rel = rows.iter().map(|r| r.2 / r.1.abs().max(1.0)).fold(0.0, f64::max);
    for line in &bad {
        println!("  criterion 2 detail: {line}");
    }
    verdict_line(
        2,
        "solve_curve b vs theta-constant b",
        bad.is_empty(),
        t0,
        Duration::from_secs(30),
        &format!(
            "{} of {} pairs exceed the absolute 1e-8 bound; worst relative difference {worst_rel:.1e}",
            bad.len(),
            rows.len()
        ),
    );
}

#[test]
fn criterion_03_lattice_membership() {
    let t0 = Instant::now();
    let mut worst: f64 = 0.0;
    let mut wrong = Vec::new();
    for i in box8() {
        let p = run_pipeline(i).unwrap();
        let (m, n) = (i.m(), i.n());
        if p.vectors.lattice != [5 * n - m, n, n, n, 3 * n, -m, -m, -m] {
            wrong.push(i);
        }
        worst = worst.max(p.vectors.lattice_residual);
    }
    verdict_line(
        3,
        "2U = n + m tau_c on the predicted lattice point",
        wrong.is_empty() && worst < 1e-8,
        t0,
        Duration::from_secs(10),
        &format!("max residual {worst:.2e} (< 1e-8), unexpected lattice vectors at {wrong:?}"),
    );
}

#[test]
fn criterion_04_fay_accola_constancy() {
    let t0 = Instant::now();
    let mut rng = StdRng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for (m, n) in [(0, 1), (1, 1), (1, 2)] {
        let p = run_pipeline(MonopoleIndex::new(m, n).unwrap()).unwrap();
        let zs: Vec<[C64; 2]> = (0..20)
            .map(|_| {
                let mut c = || C64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.3..0.3));
                [c(), c()]
            })
            .collect();
        let vals: Vec<C64> = zs.par_iter().map(|&z| fay_accola_ratio(&p.periods, z, 1e-13).unwrap()).collect();
        let r0 = vals[0];
        for v in &vals {
            worst = worst.max((v - r0).norm() / r0.norm());
        }
    }
    verdict_line(
        4,
        "Fay-Accola ratio independent of z",
        worst < 1e-7,
        t0,
        Duration::from_secs(60),
        &format!("max relative variation over 3 x 20 points {worst:.2e} (< 1e-7)"),
    );
}

#[test]
fn criterion_05_humbert_structure() {
    let t0 = Instant::now();
    let mut rel: f64 = 0.0;
    let mut red: f64 = 0.0;
    for i in box8() {
        let p = run_pipeline(i).unwrap().periods;
        let (r1, r2) = p.humbert_relations();
        rel = rel.max(r1).max(r2);
        let t = humbert_reduction().act_on_period(&p.tau_g2).unwrap();
        let t = t.matrix();
        let big_t = i.modulus();
        let want11 = 1.0 - 1.0 / (big_t - 2.0);
        let want22 = big_t / 12.0 - 0.5;
        let half = C64::new(0.5, 0.0);
        red = red
            .max((t[(0, 1)] - half).norm())
            .max((t[(1, 0)] - half).norm())
            .max((t[(0, 0)] - want11).norm())
            .max((t[(1, 1)] - want22).norm());
    }
    verdict_line(
        5,
        "Humbert relations and reduced period matrix",
        rel < 1e-10 && red < 1e-10,
        t0,
        Duration::from_secs(5),
        &format!("relation residual {rel:.2e}, reduced-matrix residual {red:.2e} (both < 1e-10)"),
    );
}

#[test]
fn criterion_06_identities_and_endpoint_orders() {
    let t0 = Instant::now();
    let mut rng = StdRng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let t = C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(0.5..4.0));
        let r = verify_identities(&UpperHalfPlanePoint::new(t).unwrap(), Convention::Standard).unwrap();
        worst = worst.max(r.relation).max(r.derivative);
    }
    let mut slope_err: f64 = 0.0;
    for (m, n) in [(0, 1), (1, 1), (1, 2), (-1, 2), (1, 3), (2, 3), (-1, 4), (3, 4), (2, 5)] {
        let idx = MonopoleIndex::new(m, n).unwrap();
        let rep = count_zeros(idx, 512, TOL).unwrap();
        // At λ = 0 the double zeros sit on h₋₁ and h₁. The shift by 2 moves k by
        // n + m, so at λ = 2 they sit on k ≡ n + m ± 1 and h_{n+m} stays finite.
        let finite_at_two = reduce_k(idx.n() + idx.m());
        for (o, finite_k) in [(rep.at_zero, 0), (rep.at_two, finite_at_two)] {
            for (k, fit) in [(-1, o.h_minus), (0, o.h_zero), (1, o.h_plus)] {
                let want = if k == finite_k { 0.0 } else { 2.0 };
                slope_err = slope_err.max((fit.slope - want).abs());
            }
            slope_err = slope_err.max((o.big_h.slope - 4.0).abs());
        }
    }
    verdict_line(
        6,
        "theta identities and endpoint vanishing orders",
        worst < 1e-9 && slope_err < 0.1,
        t0,
        Duration::from_secs(10),
        &format!("identity residual {worst:.2e} over 50 moduli (< 1e-9), worst order deviation {slope_err:.3} (< 0.1)"),
    );
}

#[test]
fn criterion_07_theorem_reproduction() {
    let t0 = Instant::now();
    let results: Vec<(MonopoleIndex, Result<Verdict, String>)> = box8()
        .par_iter()
        .map(|&i| (i, count_zeros(i, GRID, TOL).map(|r| r.verdict).map_err(|e| e.to_string())))
        .collect();
    let monopoles: Vec<(i64, i64)> = results
        .iter()
        .filter(|r| r.1 == Ok(Verdict::Monopole))
        .map(|r| (r.0.m(), r.0.n()))
        .collect();
    let failed: Vec<String> = results.iter().filter_map(|r| r.1.as_ref().err().map(|e| format!("{}: {e}", r.0))).collect();
    verdict_line(
        7,
        "monopole verdict exactly for (0,1) and (1,1)",
        monopoles == vec![(0, 1), (1, 1)] && failed.is_empty(),
        t0,
        Duration::from_secs(300),
        &format!("{} pairs scanned, monopoles {monopoles:?}, failures {failed:?}", results.len()),
    );
}

#[test]
fn criterion_08_zero_count_conjecture() {
    let t0 = Instant::now();
    let check: Vec<(MonopoleIndex, usize, usize, usize)> = MonopoleIndex::admissible_with_n_up_to(5)
        .par_iter()
        .map(|&i| {
            let r = count_zeros(i, GRID, TOL).unwrap();
            (i, r.zero_count, r.conjecture_count, r.ambiguous)
        })
        .collect();
    let bad: Vec<String> = check
        .iter()
        .filter(|c| c.1 != c.2 || c.3 != 0)
        .map(|c| format!("{} found {} want {} ambiguous {}", c.0, c.1, c.2, c.3))
        .collect();
    // Report only: 5 < n ≤ 12 inside the |m|, |n| ≤ 12 box.
    let extra: Vec<MonopoleIndex> = MonopoleIndex::admissible_up_to(12).into_iter().filter(|i| i.n() > 5).collect();
    let report: Vec<(MonopoleIndex, Option<(usize, usize, bool)>)> = extra
        .par_iter()
        .map(|&i| (i, count_zeros(i, GRID, TOL).ok().map(|r| (r.zero_count, r.conjecture_count, r.low_confidence))))
        .collect();
    let agree = report.iter().filter(|r| matches!(r.1, Some((a, b, _)) if a == b)).count();
    let shaky = report.iter().filter(|r| matches!(r.1, Some((_, _, true)))).count();
    for (i, r) in report.iter().filter(|r| !matches!(r.1, Some((a, b, _)) if a == b)) {
        println!("  criterion 8 report-only: {i} {r:?}");
    }
    println!(
        "  criterion 8 report-only: {agree} of {} pairs with 5 < n <= 12 match, {shaky} flagged low confidence",
        report.len()
    );
    verdict_line(
        8,
        "interior zero count 2(|n|-1) for n <= 5",
        bad.is_empty(),
        t0,
        Duration::from_secs(600),
        &format!("{} pairs checked, mismatches {bad:?}", check.len()),
    );
}

#[test]
fn criterion_09_proof_table() {
    let t0 = Instant::now();
    let got: Vec<i64> = (1..=12).filter(|&r| mudots_solutions(r as f64).unwrap()).collect();
    verdict_line(
        9,
        "integer |R| solving the endpoint equation",
        got == vec![2, 3, 5, 6, 8, 9, 11, 12],
        t0,
        Duration::from_secs(5),
        &format!("solutions {got:?}"),
    );
}

#[test]
fn criterion_10_equivalence_chain() {
    let t0 = Instant::now();
    let mut details = Vec::new();
    let mut ok = true;
    for (m, n) in [(1, 2), (1, 3)] {
        let i = MonopoleIndex::new(m, n).unwrap();
        let p = run_pipeline(i).unwrap();
        let c = equivalence_chain(i, &p.periods, &p.vectors, GRID, 1e-4).unwrap();
        ok &= c.agrees();
        details.push(format!("{i} mismatch {:.2e} vs cell {:.2e}", c.mismatch, c.cell()));
    }
    verdict_line(
        10,
        "genus-4, genus-2 and elliptic zero sets agree",
        ok,
        t0,
        Duration::from_secs(120),
        &details.join(", "),
    );
}
