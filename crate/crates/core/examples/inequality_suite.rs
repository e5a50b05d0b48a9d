// The seeded inequality suite and a deliberately broken check.

use weighted_sums::harness::check::{run_check, run_check_corrupted};

pub fn main() {
    let report = run_check(1, 50);
    for c in &report.checks {
        println!(
            "{:26} {:3} instances, {:3} failures, worst margin {:+.3e}{}",
            c.name,
            c.instances,
            c.failures,
            c.worst_margin,
            if c.gating { "" } else { " (informational)" }
        );
    }
    println!("passed: {}", report.passed());

    let broken = run_check_corrupted(1, 3, Some("ac3"));
    let first = broken.failures.iter().find(|f| f.check == "ac3").unwrap();
    println!("corrupted ac3 reports: {}", serde_json::to_string(first).unwrap());
}
