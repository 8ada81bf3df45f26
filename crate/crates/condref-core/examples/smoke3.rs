use std::time::Instant;
fn main() {
    let t0 = Instant::now();
    for rule in condref_core::memlang::FIG9_RULES {
        let t1 = Instant::now();
        let r = condref_core::memlang::fig9_harness(rule, 50, 0).unwrap();
        assert_eq!(r.violations, 0, "{rule}: {:?}", r.notes);
        println!("{rule}: 50 samples in {:?}", t1.elapsed());
    }
    println!("total {:?}", t0.elapsed());
}
