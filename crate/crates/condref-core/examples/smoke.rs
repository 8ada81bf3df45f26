use condref_core::corpus::{registry, run_example, RunCfg};
use std::time::Instant;
fn main() {
    let args: Vec<String> = std::env::args().collect();
    let filter = args.get(1).cloned();
    for def in registry() {
        if let Some(f) = &filter {
            if def.id != f.as_str() { continue; }
        }
        let t0 = Instant::now();
        let ex = (def.build)();
        let rep = run_example(&ex, &RunCfg::default(), true);
        println!("=== {} ({:?}) passed={}", def.id, t0.elapsed(), rep.passed);
        for o in &rep.obligations {
            println!("  {} expected={:?} got={} {}", o.id, o.expected, o.outcome, if o.matched {"OK"} else {"MISMATCH"});
        }
    }
}
