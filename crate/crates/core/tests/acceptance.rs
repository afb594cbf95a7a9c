//! Runs the full acceptance suite, then a fault-injection pass with a wrong
//! `B_4`. Built without the libtest harness so every line reaches stdout.

use std::process::ExitCode;

use qpz_core::acceptance::{run_suite, Suite};
use qpz_core::exact::with_bernoulli_override;
use rug::Rational;

fn main() -> ExitCode {
    let mut ok = true;

    println!("acceptance suite (full)");
    let outcomes = run_suite(Suite::Full);
    for o in &outcomes {
        println!("{o}");
    }
    let failed: Vec<u32> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    if outcomes.len() != 9 || !failed.is_empty() {
        println!("FAILED criteria: {failed:?}");
        ok = false;
    }

    println!("fault injection: B_4 replaced by 1/29 (fast suite)");
    let tampered = with_bernoulli_override(4, Rational::from((1, 29)), || run_suite(Suite::Fast));
    let caught = tampered.iter().filter(|o| !o.passed).count();
    let ids: Vec<u32> = tampered.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    if caught >= 2 {
        println!("[PASS] tampered B_4 caught by criteria {ids:?}");
    } else {
        println!("[FAIL] tampered B_4 caught by only {caught} criteria");
        ok = false;
    }

    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
