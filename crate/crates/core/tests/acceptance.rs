//! Acceptance suite: one PASS/FAIL line per criterion.

use std::io::Write;

use jostlt::verify::{run, Context, VerifyOptions};

// Lines go straight to stdout so they show up without `--nocapture`.
fn emit(line: &str) {
    let mut out = std::io::stdout().lock();
    writeln!(out, "{line}").unwrap();
    out.flush().unwrap();
}

#[test]
fn acceptance_criteria() {
    let ctx = Context::new(VerifyOptions::default());
    let mut failed = vec![];
    emit("");
    for id in 1..=10 {
        let r = run(&ctx, id);
        emit(&r.line());
        for d in &r.details {
            emit(&format!("        {d}"));
        }
        if !r.passed {
            failed.push(id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
