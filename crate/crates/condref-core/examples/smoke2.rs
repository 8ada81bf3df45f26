use condref_core::corpus::laws;
use std::time::Instant;
fn main() {
    for suite in laws::SUITES {
        let t0 = Instant::now();
        let reps = laws::run_suite(suite, 0, 200).unwrap();
        for r in &reps {
            println!("{} ({:?}): checks={} violations={} {}", r.suite, t0.elapsed(), r.checks, r.violations,
                if r.violations > 0 { format!("NOTES: {:?}", r.notes) } else { String::new() });
        }
    }
}
