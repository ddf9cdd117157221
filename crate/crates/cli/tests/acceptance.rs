//! Acceptance suite. Prints one line per criterion and exits nonzero if any
//! criterion fails. Criterion ids given as arguments restrict the run.

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use fkp_cli::verify::{run_suite_with, CRITERIA};

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let ids: Vec<&str> = if args.is_empty() {
        CRITERIA.iter().map(|c| c.id).collect()
    } else {
        CRITERIA.iter().map(|c| c.id).filter(|id| args.iter().any(|a| a == id)).collect()
    };
    println!("running {} acceptance criteria", ids.len());
    let started = Instant::now();
    let mut failed = Vec::new();
    run_suite_with(&ids, |result| {
        println!("{}", result.line());
        let _ = std::io::stdout().flush();
        if !result.passed {
            failed.push(result.id);
        }
    });
    println!(
        "acceptance: {} passed, {} failed ({:.0} s)",
        ids.len() - failed.len(),
        failed.len(),
        started.elapsed().as_secs_f64()
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failed: {}", failed.join(", "));
        ExitCode::FAILURE
    }
}
