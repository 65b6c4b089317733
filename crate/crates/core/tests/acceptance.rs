use std::process::ExitCode;

use lmg_core::verify::acceptance_checks;
use lmg_core::Exec;

fn main() -> ExitCode {
    let checks = acceptance_checks(Exec::default());
    for c in &checks {
        println!(
            "{} criterion {}: {} ({:.2} s) {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            c.seconds,
            c.detail
        );
    }
    let passed = checks.iter().filter(|c| c.passed).count();
    println!("{passed}/{} criteria passed", checks.len());
    ExitCode::SUCCESS
}
