//! Run the invariant suites, then the two negative controls.
use monopole::selftest::{run, Hooks};

fn main() {
    for (label, hooks) in [("clean", Hooks::default()), ("doubled nome", Hooks::perturbed_theta()), ("corrupted table", Hooks::corrupted_table())] {
        let r = run(&hooks);
        let failed: Vec<String> = r.failures().map(|c| c.id()).collect();
        println!("{label:<16} {} checks, failures: {failed:?}", r.checks.len());
    }
}
