//! The thirteen acceptance criteria at their pinned tolerances.
//!
//! Runs without the libtest harness so every verdict is printed. Positional
//! arguments select criteria by name (`cargo test --test acceptance -- whitney`).

use std::process::ExitCode;
use std::time::{Duration, Instant};

use dlab_core::checks::{run_check, CheckKind, CheckParams};

fn budget(kind: CheckKind) -> Duration {
    let secs = match kind {
        CheckKind::Exponents => 1,
        CheckKind::Constants | CheckKind::CAlpha | CheckKind::Galilean | CheckKind::Whitney => 5,
        CheckKind::Morrey => 10,
        CheckKind::ScaleLemma => 30,
        CheckKind::Soliton | CheckKind::Decoupling | CheckKind::Solvers => 60,
        CheckKind::SteinTomas => 300,
        CheckKind::Profiles => 600,
        CheckKind::Embedding => 900,
        CheckKind::Interpolation => 60,
    };
    Duration::from_secs(secs)
}

fn main() -> ExitCode {
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let params = CheckParams::default();
    let mut failed = 0;
    let mut ran = 0;
    for kind in CheckKind::ALL.into_iter().filter(|k| k.criterion().is_some()) {
        if !filters.is_empty() && !filters.iter().any(|f| kind.name().contains(f.as_str())) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let outcome = run_check(kind, &params);
        let elapsed = start.elapsed();
        let limit = budget(kind);
        let line = match &outcome {
            Ok(rep) if rep.passed && elapsed <= limit => format!("{}  [{:.1?} / {:?}]", rep.summary(), elapsed, limit),
            Ok(rep) if rep.passed => {
                failed += 1;
                format!("{} over budget  [{:.1?} / {:?}]", rep.summary().replace("PASS", "FAIL"), elapsed, limit)
            }
            Ok(rep) => {
                failed += 1;
                let rest = rep.failures.iter().skip(1).map(|f| format!("\n        {f}")).collect::<String>();
                format!("{}  [{:.1?}]{rest}", rep.summary(), elapsed)
            }
            Err(e) => {
                failed += 1;
                format!("[{:>2}] {kind}: FAIL (error: {e})", kind.criterion().unwrap_or(0))
            }
        };
        println!("{line}");
    }
    println!("acceptance: {} passed, {failed} failed", ran - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
