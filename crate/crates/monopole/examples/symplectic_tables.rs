//! Built-in integer symplectic matrices and their action on a period matrix.
use monopole::curve::{run_pipeline, MonopoleIndex};
use monopole::symplectic::{humbert_reduction, is_symplectic, named_tables};

fn main() -> monopole::Result<()> {
    for (name, rows) in named_tables() {
        println!("{name:<18} {}x{} symplectic: {}", rows.len(), rows.len(), is_symplectic(&rows)?);
    }
    let p = run_pipeline(MonopoleIndex::new(1, 2)?)?;
    let reduced = humbert_reduction().act_on_period(&p.periods.tau_g2)?;
    println!("reduced genus-2 period matrix for (1, 2):\n{:.10}", reduced.matrix());
    Ok(())
}
