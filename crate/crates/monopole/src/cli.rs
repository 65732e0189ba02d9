//! Command-line front end. The binary is a thin wrapper around [`run`].
//!
//! Exit codes: 0 monopole / success, 1 not a monopole, 2 invalid index or
//! arguments, 3 numeric or I/O failure (including an inconclusive verdict),
//! 4 self-test failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::curve::MonopoleIndex;
use crate::error::{Error, Result};
use crate::report::{self, Format, ScanRow, VerifyReport};
use crate::selftest::{self, Hooks};
use crate::vanishing::Verdict;

pub const EXIT_MONOPOLE: i32 = 0;
pub const EXIT_NOT_MONOPOLE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_SELFTEST: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "monopole", version, about = "Hitchin-condition checks for the cyclic charge-3 spectral curves")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, clap::Args)]
pub struct Common {
    /// λ grid size on (0, 2).
    #[arg(long, default_value_t = 2048)]
    pub grid: usize,
    /// Numerical tolerance for zero detection and theta truncation.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Output format.
    #[arg(long, default_value = "json")]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlotKind {
    #[value(name = "H")]
    BigH,
    #[value(name = "hk")]
    Hk,
    #[value(name = "branches")]
    Branches,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Inject {
    /// Evaluate thetas with the nome squared.
    Theta,
    /// Corrupt one symplectic table entry.
    Symplectic,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether the curve for (m, n) is a monopole spectral curve.
    #[command(allow_negative_numbers = true)]
    Verify {
        m: i64,
        n: i64,
        #[command(flatten)]
        common: Common,
    },
    /// Tabulate every admissible (m, n) with |m|, |n| ≤ max-abs.
    Scan {
        #[arg(long, default_value_t = 5)]
        max_abs: i64,
        #[command(flatten)]
        common: Common,
    },
    /// Run the invariant suites of every module.
    Selftest {
        #[arg(long, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Fault injection for negative controls.
        #[arg(long, hide = true)]
        inject: Option<Inject>,
    },
    /// Emit plot data as CSV, or SVG when the output path ends in `.svg`.
    #[command(allow_negative_numbers = true)]
    Plot {
        m: i64,
        n: i64,
        what: PlotKind,
        /// Output path (positional form).
        path: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 2048)]
        grid: usize,
        #[arg(long, default_value_t = 0.5)]
        rmin: f64,
        #[arg(long, default_value_t = 12.0)]
        rmax: f64,
        #[arg(long, default_value_t = 232)]
        rsteps: usize,
    },
}

/// Exit code for a library error.
pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::InvalidIndex { .. } => EXIT_INVALID,
        _ => EXIT_NUMERIC,
    }
}

pub fn exit_code_for_verdict(v: Verdict) -> i32 {
    match v {
        Verdict::Monopole => EXIT_MONOPOLE,
        Verdict::NotMonopole => EXIT_NOT_MONOPOLE,
        Verdict::Inconclusive => EXIT_NUMERIC,
    }
}

/// Scan exit code: 3 if any row failed, 0 otherwise.
pub fn exit_code_for_scan(rows: &[ScanRow]) -> i32 {
    if rows.iter().any(|r| r.error.is_some()) {
        EXIT_NUMERIC
    } else {
        0
    }
}

fn emit(out: &Option<PathBuf>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(p) => report::write_file(p, text),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Error::io("<stdout>", e)),
    }
}

fn check_common(c: &Common) -> Result<()> {
    if c.grid < 512 {
        return Err(Error::Domain(format!("--grid must be at least 512, got {}", c.grid)));
    }
    if !(c.tol > 0.0 && c.tol < 1.0) {
        return Err(Error::Domain(format!("--tol must lie in (0, 1), got {}", c.tol)));
    }
    Ok(())
}

fn summary(r: &VerifyReport) -> String {
    let c = &r.pipeline.curve;
    let p = &r.pipeline.periods;
    let v = &r.vanishing;
    let mut s = format!(
        "index {}  b = {:.12}  (theta route {:.12})  chi^(1/3) = {:.12}\n",
        r.index, c.b, r.b_theta, c.chi_cbrt
    );
    s += &format!(
        "T = {:.10}i  Humbert residual {:.2e}  lattice residual {:.2e} ({})\n",
        p.modulus.im,
        p.humbert_residual,
        r.pipeline.vectors.lattice_residual,
        if r.lattice_ok { "ok" } else { "FAILED" }
    );
    s += &format!(
        "zeros on (0,2): {} (conjectured {}, ambiguous {})  verdict: {}\n",
        v.zero_count, v.conjecture_count, v.ambiguous, v.verdict
    );
    for z in &v.zeros {
        s += &format!(
            "  lambda = {:.10}  k = {:+}  |h| = {:.1e}  winding {}{}\n",
            z.lambda,
            z.k,
            z.residual,
            z.winding,
            if z.confirmed { "" } else { "  (unconfirmed)" }
        );
    }
    s
}

fn cmd_verify(m: i64, n: i64, c: &Common, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    check_common(c)?;
    let r = report::verify(m, n, c.grid, c.tol)?;
    if r.canonicalized {
        let _ = writeln!(stderr, "({m}, {n}) has n + m < 0; using the canonical representative {}", r.index);
    }
    let _ = write!(stderr, "{}", summary(&r));
    let text = match c.format {
        Format::Json => report::to_json(&r)? + "\n",
        Format::Csv => report::zeros_to_csv(&r.vanishing.zeros)?,
    };
    emit(&c.out, &text, stdout)?;
    if !r.lattice_ok {
        return Ok(EXIT_NUMERIC);
    }
    Ok(exit_code_for_verdict(r.verdict()))
}

fn cmd_scan(max_abs: i64, c: &Common, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    check_common(c)?;
    if max_abs < 1 {
        return Err(Error::Domain(format!("--max-abs must be at least 1, got {max_abs}")));
    }
    let rows = report::scan(max_abs, c.grid, c.tol);
    for r in rows.iter().filter(|r| r.error.is_some()) {
        let _ = writeln!(stderr, "({}, {}) failed: {}", r.m, r.n, r.error.as_deref().unwrap_or(""));
    }
    let text = match c.format {
        Format::Json => report::to_json(&rows)? + "\n",
        Format::Csv => report::scan_to_csv(&rows)?,
    };
    emit(&c.out, &text, stdout)?;
    Ok(exit_code_for_scan(&rows))
}

fn cmd_selftest(
    format: Format,
    out: &Option<PathBuf>,
    inject: Option<Inject>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32> {
    let hooks = match inject {
        None => Hooks::default(),
        Some(Inject::Theta) => Hooks::perturbed_theta(),
        Some(Inject::Symplectic) => Hooks::corrupted_table(),
    };
    let r = selftest::run(&hooks);
    for c in &r.checks {
        let _ = writeln!(stderr, "{} {}: {}", if c.passed { "ok  " } else { "FAIL" }, c.id(), c.detail);
    }
    let text = match format {
        Format::Json => report::to_json(&r)? + "\n",
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(vec![]);
            for c in &r.checks {
                w.serialize(c)?;
            }
            String::from_utf8(w.into_inner().map_err(|e| Error::Serialize(e.to_string()))?)
                .map_err(|e| Error::Serialize(e.to_string()))?
        }
    };
    emit(out, &text, stdout)?;
    Ok(if r.passed() { 0 } else { EXIT_SELFTEST })
}

fn is_svg(p: &Path) -> bool {
    p.extension().is_some_and(|e| e.eq_ignore_ascii_case("svg"))
}

#[allow(clippy::too_many_arguments)]
fn cmd_plot(
    m: i64,
    n: i64,
    what: PlotKind,
    out: Option<PathBuf>,
    grid: usize,
    (rmin, rmax, rsteps): (f64, f64, usize),
    stdout: &mut dyn Write,
) -> Result<i32> {
    let svg = out.as_deref().is_some_and(is_svg);
    let text = match what {
        PlotKind::Branches => {
            let pts = report::branches(rmin, rmax, rsteps)?;
            if svg {
                report::branches_svg(&pts)
            } else {
                report::branches_to_csv(&pts)?
            }
        }
        PlotKind::BigH | PlotKind::Hk => {
            let idx = MonopoleIndex::new(m, n)?;
            let rows = report::profile(idx, grid)?;
            if !svg {
                report::profile_to_csv(&rows)?
            } else if what == PlotKind::BigH {
                let pts = rows.iter().map(|r| (r.lambda, r.big_h)).collect();
                report::svg_plot(
                    &format!("|H| along the real line, index {idx}"),
                    "lambda",
                    "|H|",
                    &[report::Series { name: "|H|", points: pts, scatter: false }],
                    true,
                )
            } else {
                report::profile_svg(idx, &rows)
            }
        }
    };
    emit(&out, &text, stdout)?;
    Ok(0)
}

/// Parse `args` (including the program name) and execute. Returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => EXIT_INVALID,
            };
        }
    };
    let res = match cli.command {
        Command::Verify { m, n, common } => cmd_verify(m, n, &common, stdout, stderr),
        Command::Scan { max_abs, common } => cmd_scan(max_abs, &common, stdout, stderr),
        Command::Selftest { format, out, inject } => cmd_selftest(format, &out, inject, stdout, stderr),
        Command::Plot { m, n, what, path, out, grid, rmin, rmax, rsteps } => {
            cmd_plot(m, n, what, out.or(path), grid, (rmin, rmax, rsteps), stdout)
        }
    };
    match res {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            match e {
                Error::Domain(_) => EXIT_INVALID,
                ref other => exit_code_for(other),
            }
        }
    }
}
