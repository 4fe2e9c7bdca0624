//! Run the three worked examples and print their checks.

use treewco::fixtures::{lip_tail_by_truncation, run_fixture, worked_examples};

fn main() -> treewco::Result<()> {
    for fixture in worked_examples() {
        let report = run_fixture(&fixture, 0)?;
        println!(
            "{}: {} [{}]",
            report.name,
            report.summary,
            if report.passed { "ok" } else { "MISMATCH" }
        );
        for c in &report.checks {
            println!("  {:<40} expected {:<18} observed {}", c.what, c.expected, c.observed);
        }
        if fixture.name == "bounded-not-compact" {
            let tails = lip_tail_by_truncation(&fixture, &fixture.psi, 0)?;
            let last = tails.last().unwrap();
            println!("  ℒ tail on the depth-{} truncation: {:.4}", last.0, last.1);
        }
        if let Some(note) = report.details.get("note").and_then(|n| n.as_str()) {
            println!("  note: {note}");
        }
    }
    Ok(())
}
