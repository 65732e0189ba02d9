//! Write a verify report as JSON, zeros and a profile as CSV, and an SVG plot, into a temp dir.
use monopole::curve::MonopoleIndex;
use monopole::report;

fn main() -> monopole::Result<()> {
    let dir = std::env::temp_dir().join("monopole-report-example");
    std::fs::create_dir_all(&dir).map_err(|e| monopole::Error::io(&dir, e))?;
    let r = report::verify(1, 3, 2048, 1e-9)?;
    report::write_file(&dir.join("verify.json"), &report::to_json(&r)?)?;
    report::write_file(&dir.join("zeros.csv"), &report::zeros_to_csv(&r.vanishing.zeros)?)?;
    let idx = MonopoleIndex::new(1, 3)?;
    let rows = report::profile(idx, 2048)?;
    report::write_file(&dir.join("profile.csv"), &report::profile_to_csv(&rows)?)?;
    report::write_file(&dir.join("profile.svg"), &report::profile_svg(idx, &rows))?;
    let back: report::VerifyReport = report::from_json(&std::fs::read_to_string(dir.join("verify.json")).unwrap())?;
    println!("wrote {} (re-read b = {}, same: {})", dir.display(), back.pipeline.curve.b, back.pipeline.curve.b == r.pipeline.curve.b);
    Ok(())
}
