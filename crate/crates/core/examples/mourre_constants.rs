//! δ_n, ν(n, λ/2) and the admissible impurity size for a few windows.

use hall_edge::mourre::{band_scan, delta_n, mourre_budget, threshold_conditions};

fn main() -> hall_edge::Result<()> {
    for n in 0..=2 {
        let branches = band_scan(n, 0.05)?;
        println!("n={n}: delta_n = {}", delta_n(n, &branches)?);
        for &(l, lp) in &[(0.2, 0.2), (0.1, 0.3), (0.3, 0.1)] {
            let b = mourre_budget(n, l, lp, &branches)?;
            let t = threshold_conditions(n, b.delta_admissible, l, lp, &branches)?;
            println!(
                "  lambda={l} lambda'={lp}: sigma={:.4} nu={:.6} delta_adm={:.4e} (largest delta {:.4e})",
                b.sigma, b.nu, b.delta_admissible, t.delta_bound
            );
        }
    }
    Ok(())
}
