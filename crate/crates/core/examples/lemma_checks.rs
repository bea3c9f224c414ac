//! Runs every band-function claim and prints the failing records.

use hall_edge::band::{dispersion_scan, envelope_solutions, verify_lemma, LemmaTolerances};

fn main() -> hall_edge::Result<()> {
    let branches = dispersion_scan(3, -4.0, 8.0, 0.05)?;
    let report = verify_lemma(&branches, &envelope_solutions(3)?, &LemmaTolerances::default())?;
    for r in &report.records {
        let mark = if r.pass { "ok  " } else { "FAIL" };
        println!(
            "{mark} ({:<3}) n={} {:<52} {:>14.6e} ref {:>12.4e}",
            r.claim, r.n, r.check, r.value, r.reference
        );
    }
    println!(
        "{} records, {} failing",
        report.records.len(),
        report.failures().count()
    );
    Ok(())
}
