//! Serialized outputs: JSON reports, CSV tables and a small SVG emitter.
//!
//! Complex numbers are written as `[re, im]`, rationals as `[num, den]`.
//! Floats go through the shortest round-trip representation, so re-parsing
//! any report reproduces the in-memory values exactly.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::curve::{b_via_theta_constants, run_pipeline, MonopoleIndex, Pipeline};
use crate::error::{Error, Result};
use crate::theta::C64;
use crate::vanishing::{branch_loci, count_zeros, BranchPoint, EllipticContext, VanishingReport, Verdict, ZeroRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::Domain(format!("unknown format {other:?} (json or csv)"))),
        }
    }
}

/// Full output of `verify` for one index.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyReport {
    /// The pair as given on the command line.
    pub requested: [i64; 2],
    pub index: MonopoleIndex,
    pub canonicalized: bool,
    pub pipeline: Pipeline,
    /// b recomputed from theta constants of 𝒯.
    pub b_theta: f64,
    pub lattice_ok: bool,
    pub vanishing: VanishingReport,
}

impl VerifyReport {
    pub fn verdict(&self) -> Verdict {
        self.vanishing.verdict
    }
}

/// Lattice residual accepted by `verify`.
pub const LATTICE_TOL: f64 = 1e-8;

pub fn verify(m: i64, n: i64, grid: usize, tol: f64) -> Result<VerifyReport> {
    let (index, canonicalized) = MonopoleIndex::canonicalize(m, n)?;
    let pipeline = run_pipeline(index)?;
    let b_theta = b_via_theta_constants(index)?;
    let vanishing = count_zeros(index, grid, tol)?;
    Ok(VerifyReport {
        requested: [m, n],
        index,
        canonicalized,
        lattice_ok: pipeline.vectors.lattice_residual < LATTICE_TOL,
        pipeline,
        b_theta,
        vanishing,
    })
}

/// One line of a scan table. Failed rows keep their index and carry the error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub m: i64,
    pub n: i64,
    pub b: Option<f64>,
    pub chi_cbrt: Option<f64>,
    pub modulus: Option<C64>,
    pub zero_count: Option<usize>,
    pub conjectured: usize,
    pub matches: Option<bool>,
    pub verdict: Option<Verdict>,
    pub ambiguous: Option<usize>,
    pub low_confidence: Option<bool>,
    pub error: Option<String>,
}

fn scan_row(idx: MonopoleIndex, grid: usize, tol: f64) -> ScanRow {
    let mut row = ScanRow {
        m: idx.m(),
        n: idx.n(),
        b: None,
        chi_cbrt: None,
        modulus: None,
        zero_count: None,
        conjectured: idx.conjectured_zero_count(),
        matches: None,
        verdict: None,
        ambiguous: None,
        low_confidence: None,
        error: None,
    };
    let res = run_pipeline(idx).and_then(|p| {
        row.b = Some(p.curve.b);
        row.chi_cbrt = Some(p.curve.chi_cbrt);
        row.modulus = Some(p.periods.modulus);
        count_zeros(idx, grid, tol)
    });
    match res {
        Ok(r) => {
            row.zero_count = Some(r.zero_count);
            row.matches = Some(r.matches_conjecture);
            row.verdict = Some(r.verdict);
            row.ambiguous = Some(r.ambiguous);
            row.low_confidence = Some(r.low_confidence);
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

/// Every admissible pair with |m|, |n| ≤ max_abs, ordered by (n, m).
/// Rows are computed in parallel; the ordering does not depend on scheduling.
pub fn scan(max_abs: i64, grid: usize, tol: f64) -> Vec<ScanRow> {
    scan_indices(&MonopoleIndex::admissible_up_to(max_abs), grid, tol)
}

pub fn scan_indices(indices: &[MonopoleIndex], grid: usize, tol: f64) -> Vec<ScanRow> {
    let mut idx = indices.to_vec();
    idx.sort_by_key(|i| (i.n(), i.m()));
    idx.par_iter().map(|&i| scan_row(i, grid, tol)).collect()
}

// CSV mirrors of the row types: complex numbers split into two columns,
// missing values left empty.

#[derive(Debug, Serialize, Deserialize)]
struct ScanCsv {
    m: i64,
    n: i64,
    b: Option<f64>,
    chi_cbrt: Option<f64>,
    modulus_re: Option<f64>,
    modulus_im: Option<f64>,
    zero_count: Option<usize>,
    conjectured: usize,
    matches: Option<bool>,
    verdict: Option<Verdict>,
    ambiguous: Option<usize>,
    low_confidence: Option<bool>,
    error: Option<String>,
}

impl From<&ScanRow> for ScanCsv {
    fn from(r: &ScanRow) -> Self {
        ScanCsv {
            m: r.m,
            n: r.n,
            b: r.b,
            chi_cbrt: r.chi_cbrt,
            modulus_re: r.modulus.map(|z| z.re),
            modulus_im: r.modulus.map(|z| z.im),
            zero_count: r.zero_count,
            conjectured: r.conjectured,
            matches: r.matches,
            verdict: r.verdict,
            ambiguous: r.ambiguous,
            low_confidence: r.low_confidence,
            error: r.error.clone(),
        }
    }
}

impl From<ScanCsv> for ScanRow {
    fn from(r: ScanCsv) -> Self {
        ScanRow {
            m: r.m,
            n: r.n,
            b: r.b,
            chi_cbrt: r.chi_cbrt,
            modulus: r.modulus_re.zip(r.modulus_im).map(|(a, b)| C64::new(a, b)),
            zero_count: r.zero_count,
            conjectured: r.conjectured,
            matches: r.matches,
            verdict: r.verdict,
            ambiguous: r.ambiguous,
            low_confidence: r.low_confidence,
            error: r.error,
        }
    }
}

/// (λ, k, |residual|, winding) per zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroCsv {
    pub lambda: f64,
    pub k: i64,
    pub residual: f64,
    pub winding: i64,
}

impl From<&ZeroRecord> for ZeroCsv {
    fn from(z: &ZeroRecord) -> Self {
        ZeroCsv {
            lambda: z.lambda,
            k: z.k,
            residual: z.residual,
            winding: z.winding,
        }
    }
}

/// |h₋₁|, |h₀|, |h₁| and |H| at one λ. Poles are written as `inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub lambda: f64,
    pub h_minus: f64,
    pub h_zero: f64,
    pub h_plus: f64,
    pub big_h: f64,
}

/// Profile of the h_k and H along λ ∈ (0, 2) at `grid` cell centres.
pub fn profile(idx: MonopoleIndex, grid: usize) -> Result<Vec<ProfileRow>> {
    if grid == 0 {
        return Err(Error::Domain("grid must be positive".into()));
    }
    let ctx = EllipticContext::from_index(idx)?;
    let abs_or_inf = |r: Result<C64>| r.map(|v| v.norm()).unwrap_or(f64::INFINITY);
    Ok((0..grid)
        .into_par_iter()
        .map(|i| {
            let lambda = 2.0 * (i as f64 + 0.5) / grid as f64;
            let y = ctx.y(lambda);
            ProfileRow {
                lambda,
                h_minus: abs_or_inf(ctx.h(y, -1)),
                h_zero: abs_or_inf(ctx.h(y, 0)),
                h_plus: abs_or_inf(ctx.h(y, 1)),
                big_h: abs_or_inf(ctx.big_h(y)),
            }
        })
        .collect())
}

/// Interior local minima of |H| that fall below `rel` times the median.
pub fn profile_dips(rows: &[ProfileRow], rel: f64) -> Vec<f64> {
    let mut vals: Vec<f64> = rows.iter().map(|r| r.big_h).filter(|v| v.is_finite()).collect();
    vals.sort_by(|a, b| a.total_cmp(b));
    let med = vals.get(vals.len() / 2).copied().unwrap_or(f64::NAN);
    rows.windows(3)
        .filter(|w| w[1].big_h <= w[0].big_h && w[1].big_h <= w[2].big_h && w[1].big_h < rel * med)
        .map(|w| w[1].lambda)
        .collect()
}

/// Branch data for |ℛ| in [rmin, rmax], searching y/ρ in [0, 2].
pub fn branches(rmin: f64, rmax: f64, rsteps: usize) -> Result<Vec<BranchPoint>> {
    branch_loci(rmin, rmax, rsteps, 2.0)
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    Ok(serde_json::from_str(text)?)
}

fn csv_string<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Result<String> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(vec![]);
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Serialize(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Serialize(e.to_string()))
}

fn csv_parse<T: DeserializeOwned>(text: &str) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

pub fn scan_to_csv(rows: &[ScanRow]) -> Result<String> {
    let out = csv_string(rows.iter().map(ScanCsv::from))?;
    // csv writes no header for an empty table; keep one anyway.
    if rows.is_empty() {
        return Ok("m,n,b,chi_cbrt,modulus_re,modulus_im,zero_count,conjectured,matches,verdict,ambiguous,low_confidence,error\n".into());
    }
    Ok(out)
}

pub fn scan_from_csv(text: &str) -> Result<Vec<ScanRow>> {
    Ok(csv_parse::<ScanCsv>(text)?.into_iter().map(ScanRow::from).collect())
}

pub fn zeros_to_csv(zeros: &[ZeroRecord]) -> Result<String> {
    if zeros.is_empty() {
        return Ok("lambda,k,residual,winding\n".into());
    }
    csv_string(zeros.iter().map(ZeroCsv::from))
}

pub fn zeros_from_csv(text: &str) -> Result<Vec<ZeroCsv>> {
    csv_parse(text)
}

pub fn profile_to_csv(rows: &[ProfileRow]) -> Result<String> {
    csv_string(rows.iter())
}

pub fn profile_from_csv(text: &str) -> Result<Vec<ProfileRow>> {
    csv_parse(text)
}

pub fn branches_to_csv(points: &[BranchPoint]) -> Result<String> {
    if points.is_empty() {
        return Ok("r_abs,y_over_rho,k,vertical_tangent\n".into());
    }
    csv_string(points.iter())
}

pub fn branches_from_csv(text: &str) -> Result<Vec<BranchPoint>> {
    csv_parse(text)
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// A named polyline for [`svg_plot`].
pub struct Series<'a> {
    pub name: &'a str,
    pub points: Vec<(f64, f64)>,
    /// Draw as isolated dots instead of a connected line.
    pub scatter: bool,
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Static SVG with one polyline (or dot cloud) per series. With `log_y`
/// non-positive and non-finite values are skipped.
pub fn svg_plot(title: &str, x_label: &str, y_label: &str, series: &[Series<'_>], log_y: bool) -> String {
    let (w, h, pad) = (800.0, 500.0, 60.0);
    let ty = |v: f64| if log_y { v.log10() } else { v };
    let usable = |&(x, y): &(f64, f64)| x.is_finite() && y.is_finite() && (!log_y || y > 0.0);
    let pts: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|s| s.points.iter().copied().filter(usable))
        .map(|(x, y)| (x, ty(y)))
        .collect();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, y) in &pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if pts.is_empty() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 == x0 {
        x1 = x0 + 1.0;
    }
    if y1 == y0 {
        y1 = y0 + 1.0;
    }
    let sx = |x: f64| pad + (x - x0) / (x1 - x0) * (w - 2.0 * pad);
    let sy = |y: f64| h - pad - (y - y0) / (y1 - y0) * (h - 2.0 * pad);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<rect x="{pad}" y="{pad}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        w - 2.0 * pad,
        h - 2.0 * pad
    );
    let _ = writeln!(out, r#"<text x="{}" y="30" text-anchor="middle" font-size="15">{}</text>"#, w / 2.0, escape(title));
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, w / 2.0, h - 15.0, escape(x_label));
    let ylab = if log_y { format!("log10 {y_label}") } else { y_label.to_string() };
    let _ = writeln!(
        out,
        r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">{}</text>"#,
        h / 2.0,
        h / 2.0,
        escape(&ylab)
    );
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
        let _ = writeln!(out, r#"<text x="{:.1}" y="{}" text-anchor="middle">{:.3}</text>"#, sx(xv), h - pad + 16.0, xv);
        let _ = writeln!(out, r#"<text x="{}" y="{:.1}" text-anchor="end">{:.3}</text>"#, pad - 4.0, sy(yv) + 4.0, yv);
    }
    for (i, s) in series.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let mapped: Vec<(f64, f64)> = s.points.iter().copied().filter(usable).map(|(x, y)| (sx(x), sy(ty(y)))).collect();
        if s.scatter {
            for (x, y) in &mapped {
                let _ = writeln!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="1.5" fill="{colour}"/>"#);
            }
        } else {
            let coords: Vec<String> = mapped.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
            let _ = writeln!(
                out,
                r#"<polyline fill="none" stroke="{colour}" stroke-width="1" points="{}"/>"#,
                coords.join(" ")
            );
        }
        let ly = pad + 16.0 * (i as f64 + 1.0);
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{ly}" fill="{colour}" text-anchor="end">{}</text>"#,
            w - pad - 6.0,
            escape(s.name)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// SVG of a profile on a log |·| axis.
pub fn profile_svg(idx: MonopoleIndex, rows: &[ProfileRow]) -> String {
    let col = |f: fn(&ProfileRow) -> f64| rows.iter().map(|r| (r.lambda, f(r))).collect::<Vec<_>>();
    let series = [
        Series { name: "|h_-1|", points: col(|r| r.h_minus), scatter: false },
        Series { name: "|h_0|", points: col(|r| r.h_zero), scatter: false },
        Series { name: "|h_1|", points: col(|r| r.h_plus), scatter: false },
        Series { name: "|H|", points: col(|r| r.big_h), scatter: false },
    ];
    svg_plot(&format!("profile along the real line, index {idx}"), "lambda", "|value|", &series, true)
}

/// SVG of branch loci, one dot cloud per k, vertical tangents highlighted.
pub fn branches_svg(points: &[BranchPoint]) -> String {
    let mut series: Vec<Series<'_>> = [(-1i64, "k = -1"), (0, "k = 0"), (1, "k = 1")]
        .into_iter()
        .map(|(k, name)| Series {
            name,
            points: points.iter().filter(|p| p.k == k).map(|p| (p.r_abs, p.y_over_rho)).collect(),
            scatter: true,
        })
        .collect();
    series.push(Series {
        name: "vertical tangent",
        points: points.iter().filter(|p| p.vertical_tangent).map(|p| (p.r_abs, p.y_over_rho)).collect(),
        scatter: true,
    });
    svg_plot("branches y = X_k(|R|)", "|R|", "y / rho", &series, false)
}
