//! The acceptance suite, one line per criterion. `VANVISC_QUICK=1` trims the
//! sample counts no criterion pins down; `VANVISC_CRITERIA=3,7` runs a subset.

use std::process::ExitCode;

use vanvisc::lab::{run_criterion, CRITERIA};

fn main() -> ExitCode {
    // `cargo test -- --list` and filters from other targets land here too.
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let quick = std::env::var("VANVISC_QUICK").is_ok_and(|v| v == "1");
    let only: Option<Vec<usize>> =
        std::env::var("VANVISC_CRITERIA").ok().map(|s| s.split(',').filter_map(|t| t.trim().parse().ok()).collect());
    let mut failed = Vec::new();
    let mut ran = 0;
    for c in CRITERIA.iter() {
        if only.as_ref().is_some_and(|o| !o.contains(&c.id)) {
            continue;
        }
        let out = run_criterion(c.id, quick);
        println!("{}", out.line());
        for v in &out.verdicts {
            println!("    {}", v.line());
        }
        ran += 1;
        if !out.passed {
            failed.push(c.id);
        }
    }
    println!("acceptance: {}/{ran} criteria passed", ran - failed.len());
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failing criteria: {failed:?}");
        ExitCode::FAILURE
    }
}
