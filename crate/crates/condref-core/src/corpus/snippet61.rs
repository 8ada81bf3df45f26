//! The relational memory-logic quadruple: the target performs private
//! allocation and store/load steps before joining the source at a shared
//! print; both sides return lock-step allocated pointers.

use std::rc::Rc;

use crate::corpus::{Example, Expectation, Obligation, Outcome, RunCfg};
use crate::memlang::fig9::{check_quad, QuadInstance};
use crate::memlang::ghost::vrel;
use crate::wrapper::WrapVariant;

pub const T_SRC: &str = r#"module t {
  fn run() {
    let p = calloc(8);
    *p := 5;
    let x = *p;
    print(x);
    let q = calloc(40);
    ret q;
  }
}"#;

pub const S_SRC: &str = r#"module s {
  fn run() {
    print(5);
    let q = calloc(40);
    ret q;
  }
}"#;

fn instance() -> QuadInstance {
    let mut i = QuadInstance::base("snippet-6.1", T_SRC, S_SRC);
    i.fname = "run".into();
    // target allocates block 0 (the scratch cell) and block 1 (the
    // returned array); the source allocates block 0 only
    i.rel_pairs = vec![(1, 0)];
    i.post = Rc::new(|l, v_s, v_t| vrel(l, v_t, v_s));
    i
}

pub fn snippet61() -> Example {
    let run = |_cfg: &RunCfg| match check_quad(&instance(), WrapVariant::V2Strong) {
        Ok((v, _)) => Outcome::Verdict(v),
        Err(e) => Outcome::Error(e),
    };
    Example {
        id: "snippet-6.1".into(),
        summary: String::new(),
        obligations: vec![Obligation::new(
            "snippet61-quadruple",
            WrapVariant::V2Strong,
            Expectation::Proven,
            "target-only steps then matched print and lock-step allocated \
             returns",
            run,
        )],
        growable: false,
    }
}
