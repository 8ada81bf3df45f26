//! Command-line interface: list the example corpus, check examples against
//! their golden expectations, run the property-law suites, print
//! counter-traces, and parse memLang sources.

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use condref_core::corpus::{self, laws, RunCfg};
use condref_core::memlang;
use condref_core::wrapper::WrapVariant;

#[derive(Parser)]
#[command(
    name = "condref",
    about = "Desk-scale workbench for conditional contextual refinement",
    version
)]
struct Cli {
    /// Refuse resource algebras larger than this carrier size.
    #[arg(long, global = true, default_value_t = 1 << 16)]
    max_carrier: u32,
    /// Override the interpretation fuel (call-depth bound).
    #[arg(long, global = true)]
    fuel: Option<u32>,
    /// Refuse universes with more values than this cap.
    #[arg(long, global = true)]
    universe_cap: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// List example ids with their obligations and expected outcomes.
    List,
    /// Run one example's obligations and compare against expectations.
    Check {
        /// Example id (see `list`).
        id: String,
        /// Restrict to obligations of one wrapper variant.
        #[arg(long, value_parser = parse_variant)]
        variant: Option<WrapVariant>,
        /// Machine-readable JSON report.
        #[arg(long)]
        json: bool,
        /// Enlarge the universe by one value (a Proven verdict must hold).
        #[arg(long)]
        grown: bool,
        /// Include wall-clock timings (breaks byte-determinism of reports).
        #[arg(long)]
        timings: bool,
    },
    /// Run the property-law suites.
    Laws {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        iters: u64,
        /// Restrict to one suite: res | conds | refine | memlang.
        #[arg(long)]
        module: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Re-run one obligation and print its counter-trace.
    Trace {
        id: String,
        obligation: String,
        #[arg(long)]
        json: bool,
    },
    /// Parse a memLang source file and dump the canonical syntax tree.
    Parse { file: String },
}

fn parse_variant(s: &str) -> Result<WrapVariant, String> {
    match s {
        "v1" => Ok(WrapVariant::V1Peek),
        "v2" => Ok(WrapVariant::V2Strong),
        other => Err(format!("unknown variant {other:?} (expected v1 or v2)")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let base_cfg = RunCfg {
        max_carrier: cli.max_carrier,
        fuel_override: cli.fuel,
        universe_cap: cli.universe_cap,
        ..RunCfg::default()
    };
    match cli.cmd {
        Cmd::List => {
            for line in corpus::list_lines() {
                println!("{line}");
            }
            ExitCode::SUCCESS
        }
        Cmd::Check { id, variant, json, grown, timings } => {
            let Some(def) = corpus::find_example(&id) else {
                eprintln!("unknown example {id:?}; see `condref list`");
                return ExitCode::from(2);
            };
            let cfg = RunCfg { variant_filter: variant, grown, ..base_cfg };
            let report = corpus::run_example(&(def.build)(), &cfg, timings);
            if json {
                println!("{}", corpus::reports_to_json(&[report.clone()]));
            } else {
                println!("example {}:", report.example);
                for o in &report.obligations {
                    println!(
                        "  {} [{}] expected {:?}, got {}{}",
                        o.id,
                        o.variant,
                        o.expected,
                        o.outcome,
                        if o.matched { "" } else { "  <-- MISMATCH" }
                    );
                }
                println!("{}", if report.passed { "all expectations met" } else { "FAILED" });
            }
            if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Cmd::Laws { seed, iters, module, json } => {
            let reports = match &module {
                None => laws::run_all(seed, iters),
                Some(m) => match laws::run_suite(m, seed, iters) {
                    Some(r) => r,
                    None => {
                        eprintln!("unknown suite {m:?} (expected one of {:?})", laws::SUITES);
                        return ExitCode::from(2);
                    }
                },
            };
            let ok = reports.iter().all(|r| r.ok());
            if json {
                println!("{}", serde_json::to_string_pretty(&reports).expect("serialize"));
            } else {
                for r in &reports {
                    println!(
                        "{}: {} checks, {} violations{}",
                        r.suite,
                        r.checks,
                        r.violations,
                        if r.notes.is_empty() {
                            String::new()
                        } else {
                            format!(" ({})", r.notes.join("; "))
                        }
                    );
                }
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Cmd::Trace { id, obligation, json } => {
            let Some(def) = corpus::find_example(&id) else {
                eprintln!("unknown example {id:?}");
                return ExitCode::from(2);
            };
            let report = corpus::run_example(&(def.build)(), &base_cfg, false);
            let Some(ob) = report.obligations.iter().find(|o| o.id == obligation) else {
                eprintln!(
                    "unknown obligation {obligation:?}; this example has: {}",
                    report
                        .obligations
                        .iter()
                        .map(|o| o.id.as_str())
                        .collect::<Vec<_>>()
                        .join(", ")
                );
                return ExitCode::from(2);
            };
            match &ob.counter_trace {
                None => println!("obligation {} produced no counter-trace ({})", ob.id, ob.outcome),
                Some(t) => {
                    if json {
                        println!("{}", serde_json::to_string_pretty(t).expect("serialize"));
                    } else {
                        println!("counter-trace for {}:", ob.id);
                        for (name, arg, result) in &t.events {
                            println!("  {name}({arg}) = {result}");
                        }
                        println!("  terminates with {}", t.end);
                    }
                }
            }
            ExitCode::SUCCESS
        }
        Cmd::Parse { file } => {
            let text = match std::fs::read_to_string(&file) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("cannot read {file:?}: {e}");
                    return ExitCode::from(2);
                }
            };
            match memlang::parse_memlang(&text) {
                Ok(module) => {
                    print!("{}", memlang::dump_module(&module));
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("{e}");
                    ExitCode::from(2)
                }
            }
        }
    }
}
